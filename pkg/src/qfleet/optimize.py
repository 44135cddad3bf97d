"""Self-contained Nelder-Mead simplex minimizer (standard coefficients).

max_evals caps objective evaluations; ftol stops the loop once the simplex
has collapsed in function value and an iteration improves the best vertex
by less than ftol.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

_REFLECT, _EXPAND, _CONTRACT, _SHRINK = 1.0, 2.0, 0.5, 0.5


@dataclass
class OptimizeResult:
    x: list[float]
    fun: float
    evaluations: int
    converged: bool
    history: list[float] = field(default_factory=list)  # every evaluation, in order


def nelder_mead(f: Callable[[list[float]], float], x0: Sequence[float],
                max_evals: int = 200, ftol: float = 1e-8,
                step: float = 0.5) -> OptimizeResult:
    x0 = [float(v) for v in x0]
    n = len(x0)
    history: list[float] = []

    def ev(x: list[float]) -> float:
        value = float(f(x))
        history.append(value)
        return value

    if n == 0 or max_evals < n + 1:
        # budget cannot even hold the initial simplex; best effort on x0
        best_x, best_f = list(x0), ev(x0)
        for i in range(min(max_evals - 1, n)):
            x = list(x0)
            x[i] += step
            v = ev(x)
            if v < best_f:
                best_x, best_f = x, v
        return OptimizeResult(best_x, best_f, len(history), False, history)

    simplex = [list(x0)]
    for i in range(n):
        x = list(x0)
        x[i] += step
        simplex.append(x)
    values = [ev(x) for x in simplex]

    converged = False
    while len(history) < max_evals:
        order = sorted(range(n + 1), key=values.__getitem__)
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        best_before = values[0]

        centroid = [sum(x[i] for x in simplex[:-1]) / n for i in range(n)]
        worst = simplex[-1]
        reflected = [c + _REFLECT * (c - w) for c, w in zip(centroid, worst)]
        fr = ev(reflected)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = reflected, fr
        elif fr < values[0]:
            if len(history) >= max_evals:
                simplex[-1], values[-1] = reflected, fr
            else:
                expanded = [c + _EXPAND * (r - c) for c, r in zip(centroid, reflected)]
                fe = ev(expanded)
                if fe < fr:
                    simplex[-1], values[-1] = expanded, fe
                else:
                    simplex[-1], values[-1] = reflected, fr
        else:
            if len(history) >= max_evals:
                break
            contracted = [c + _CONTRACT * (w - c) for c, w in zip(centroid, worst)]
            fc = ev(contracted)
            if fc < values[-1]:
                simplex[-1], values[-1] = contracted, fc
            else:
                # shrink toward the best vertex
                for i in range(1, n + 1):
                    if len(history) >= max_evals:
                        break
                    simplex[i] = [(b + _SHRINK * (x - b))
                                  for b, x in zip(simplex[0], simplex[i])]
                    values[i] = ev(simplex[i])

        best_after = min(values)
        spread = max(values) - min(values)
        if spread < ftol and abs(best_before - best_after) < ftol:
            converged = True
            break

    best = min(range(n + 1), key=values.__getitem__)
    return OptimizeResult(simplex[best], values[best], len(history), converged, history)
