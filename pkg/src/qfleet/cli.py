"""Command-line entry points: worker, run, scan, vqe, bench, frame.

Exit codes: 0 success, 2 configuration/input errors, 3 transport errors,
4 numerical errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import protocol, report
from .circuit import Circuit
from .cluster import (EnsembleError, LocalWorkerFleet, ping_worker)
from .observable import PauliFormatError, TermEvaluationError, load_hamiltonian
from .pool import (ExecutorPool, JobTable, JobTimeout, PoolExhaustedError,
                   RunConfig, cell_job_id, cell_seed, pool32_endpoints,
                   run_async, shots_for_precision, wait_all)
from .qasm import QasmError, evaluate_angle, parse_qasm
from .simulator import (QubitCapError, run_counts, run_expectation)
from .vqe import (VqeParams, fixed_point_energy_benchmark,
                  hardware_efficient_ansatz, synthetic_hamiltonian,
                  vqe_minimize)
from .worker import WorkerDaemon

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TRANSPORT = 3
EXIT_NUMERICAL = 4

ENDPOINTS_ENV = "QFLEET_ENDPOINTS"


class ConfigError(ValueError):
    pass


# -- shared plumbing ----------------------------------------------------------

def load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must be a mapping")
    return data


def resolve_endpoints(args, config: dict) -> list[str]:
    """Precedence: --endpoints flag, config file, environment, preset."""
    if getattr(args, "endpoints", None):
        return [e.strip() for e in args.endpoints.split(",") if e.strip()]
    if config.get("endpoints"):
        return [str(e) for e in config["endpoints"]]
    env = os.environ.get(ENDPOINTS_ENV)
    if env:
        return [e.strip() for e in env.split(",") if e.strip()]
    if getattr(args, "preset", None) == "pool32":
        return pool32_endpoints()
    return []


def load_circuit_file(path: str) -> Circuit:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        return Circuit.from_json_dict(json.loads(text))
    return parse_qasm(text)


def effective_config(args, config: dict, endpoints: list[str]) -> dict:
    merged = dict(config)
    merged["endpoints"] = endpoints
    for key in ("shots", "seed", "points", "workers", "output"):
        if getattr(args, key, None) is not None:
            merged[key] = getattr(args, key)
    merged["subcommand"] = args.command
    return merged


def maybe_print_config(args, config: dict, endpoints: list[str]) -> None:
    if getattr(args, "print_config", False):
        yaml.safe_dump(effective_config(args, config, endpoints),
                       sys.stdout, sort_keys=True)


def scan_thetas(start: float, stop: float, points: int) -> np.ndarray:
    return np.linspace(start, stop, points)


def print_counts(counts: dict[str, int], shots: int) -> None:
    width = max((len(k) for k in counts), default=4)
    print(f"{'state':<{width}}  count  frequency")
    for key in sorted(counts):
        print(f"{key:<{width}}  {counts[key]:>5}  {counts[key] / shots:.4f}")


# -- subcommands --------------------------------------------------------------

def cmd_worker(args) -> int:
    daemon = WorkerDaemon(host=args.host, port=args.port,
                          max_qubits=args.max_qubits, threads=args.threads,
                          worker_id=args.worker_id, delay=args.delay)
    try:
        daemon.bind()
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    print(f"READY {daemon.address}", flush=True)
    try:
        daemon.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        daemon.stop()
    return EXIT_OK


def cmd_run(args) -> int:
    config = load_config_file(args.config)
    endpoints = resolve_endpoints(args, config)
    maybe_print_config(args, config, endpoints)
    circuit = load_circuit_file(args.circuit)
    if circuit.parameter_count() > 0:
        theta = [float(v) for v in args.theta.split(",")] if args.theta else []
        circuit = circuit.bind_parameters(theta)
    if not circuit.measurements:
        circuit = circuit.measure_all()
    shots = None if args.exact else args.shots
    if endpoints:
        with ExecutorPool(endpoints, timeout=args.timeout) as pool:
            handle = pool.submit(circuit, shots, args.seed)
            wait_all([handle], timeout=args.timeout)
            if not handle.complete():
                raise ConnectionError(handle.error or "job failed")
            value = handle.result
    else:
        value = (run_expectation(circuit)[0] if shots is None
                 else run_counts(circuit, shots, args.seed))
    if shots is None:
        print(json.dumps({"expectation": value}) if args.json
              else f"expectation: {value:+.12f}")
    else:
        if args.json:
            print(json.dumps({"counts": value.counts, "shots": value.shots},
                             sort_keys=True))
        else:
            print_counts(value.counts, value.shots)
    return EXIT_OK


def _build_scan_table(circuit: Circuit, thetas, shots: int, seed: int) -> JobTable:
    if circuit.parameter_count() != 1:
        raise ConfigError(f"scan needs a 1-parameter circuit; this one has "
                          f"{circuit.parameter_count()}")
    columns = [RunConfig(shots=shots, seed=seed, theta=(float(t),)) for t in thetas]
    return JobTable(rows=[circuit], columns=columns)


def cmd_scan(args) -> int:
    config = load_config_file(args.config)
    endpoints = resolve_endpoints(args, config)
    maybe_print_config(args, config, endpoints)
    if not endpoints:
        raise ConfigError("scan needs worker endpoints (--endpoints, config "
                          f"file, or {ENDPOINTS_ENV})")
    circuit = load_circuit_file(args.circuit)
    thetas = scan_thetas(evaluate_angle(args.start), evaluate_angle(args.stop),
                         args.points)
    table = _build_scan_table(circuit, thetas, args.shots, args.seed)
    rows = []
    with ExecutorPool(endpoints, timeout=args.timeout) as pool:
        handles = [run_async(table, 0, j, pool) for j in range(len(table.columns))]
        try:
            wait_all(handles, timeout=args.timeout)
        except JobTimeout as exc:
            print(f"warning: {exc}", file=sys.stderr)
        for theta, handle in zip(thetas, handles):
            rows.append({
                "theta": float(theta),
                "job_id": handle.job_id,
                "state": handle.state.value,
                "counts": handle.result.counts if handle.complete() else None,
                "error": handle.error,
            })
    written = report.write_scan_report(rows, args.output, as_json=args.json,
                                       plot=args.plot)
    for path in written:
        print(f"wrote {path}")
    failed = sum(1 for r in rows if r["state"] != "complete")
    if failed:
        print(f"error: {failed}/{len(rows)} scan points failed", file=sys.stderr)
        return EXIT_TRANSPORT
    return EXIT_OK


def _resolve_ansatz(args) -> Circuit:
    if args.ansatz == "hardware-efficient":
        if not args.qubits:
            raise ConfigError("--qubits is required with the built-in ansatz")
        return hardware_efficient_ansatz(args.qubits, args.depth)
    circuit = load_circuit_file(args.ansatz)
    if circuit.measurements:
        raise ConfigError("ansatz circuit must not contain measurements")
    return circuit


def _parse_theta0(text: str, count: int) -> list[float]:
    if text == "zeros":
        return [0.0] * count
    values = [float(v) for v in text.split(",") if v.strip()]
    return values


def cmd_vqe(args) -> int:
    config = load_config_file(args.config)
    endpoints = resolve_endpoints(args, config)
    maybe_print_config(args, config, endpoints)
    ansatz = _resolve_ansatz(args)
    hamiltonian = load_hamiltonian(args.hamiltonian,
                                   num_qubits=ansatz.num_qubits)
    theta0 = _parse_theta0(args.theta0, ansatz.parameter_count())
    params = VqeParams(ansatz=ansatz, hamiltonian=hamiltonian, theta0=theta0,
                       max_iters=args.max_iters, ftol=args.ftol,
                       shots=None if args.exact else args.shots, seed=args.seed,
                       n_virtual_qpus=args.workers)
    if endpoints:
        result = vqe_minimize(params, endpoints)
    else:
        with LocalWorkerFleet(args.workers, max_qubits=ansatz.num_qubits) as fleet:
            result = vqe_minimize(params, fleet.addresses)
    print(f"opt_val: {result.opt_val:+.9f} after {result.evaluations} evaluations"
          f" ({'converged' if result.converged else 'budget exhausted'})")
    print("opt_params: " + ", ".join(f"{v:.6f}" for v in result.opt_params))
    written = report.write_vqe_report(result, args.output, plot=args.plot)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_bench(args) -> int:
    worker_counts = [int(k) for k in args.workers.split(",") if k.strip()]
    if not worker_counts:
        raise ConfigError("--workers must list at least one worker count")
    hamiltonian = synthetic_hamiltonian(args.qubits, args.terms, seed=args.seed)
    ansatz = hardware_efficient_ansatz(args.qubits, args.depth)
    rng = np.random.default_rng(args.seed)
    theta0 = [float(t) for t in rng.uniform(0, 2 * np.pi, ansatz.parameter_count())]
    params = VqeParams(ansatz=ansatz, hamiltonian=hamiltonian, theta0=theta0,
                       shots=None if args.mode == "exact" else args.shots,
                       seed=args.seed)
    with LocalWorkerFleet(max(worker_counts), max_qubits=args.qubits,
                          threads=args.threads) as fleet:
        bench = fixed_point_energy_benchmark(params, worker_counts, fleet.addresses)
    print(f"{'k':>3} {'wall_s':>9} {'exec_s':>9} {'overhead_s':>11} "
          f"{'speedup':>8}  circuits/worker")
    for row in bench.rows:
        print(f"{row.workers:>3} {row.wall_seconds:>9.3f} "
              f"{row.execution_seconds:>9.3f} {row.pre_post_seconds:>11.3f} "
              f"{row.speedup:>8.2f}  "
              + "/".join(str(c) for c in row.circuits_per_worker))
    written = report.write_benchmark_report(bench, args.output, plot=args.plot)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_frame(args) -> int:
    """Emit the canonical wire frame(s) for a job-table cell (protocol audit)."""
    circuit = load_circuit_file(args.circuit)
    thetas = scan_thetas(evaluate_angle(args.start), evaluate_angle(args.stop),
                         args.points)
    table = _build_scan_table(circuit, thetas, args.shots, args.seed)
    columns = range(len(table.columns)) if args.all_columns else [args.col]
    out = sys.stdout.buffer
    for j in columns:
        row_circuit, conf = table.cell(args.row, j)
        bound = row_circuit.bind_parameters(conf.theta)
        message = protocol.execute_message(cell_job_id(args.row, j),
                                           bound.to_json_dict(), conf.shots,
                                           cell_seed(conf, args.row))
        out.write(protocol.pack_frame(message))
    out.flush()
    return EXIT_OK


def cmd_ping(args) -> int:
    config = load_config_file(args.config)
    endpoints = resolve_endpoints(args, config)
    if not endpoints:
        raise ConfigError("no endpoints to ping")
    status = 0
    for address in endpoints:
        try:
            pong = ping_worker(address, timeout=args.timeout)
            print(f"{address}: ok worker_id={pong['worker_id']} "
                  f"max_qubits={pong['max_qubits']}")
        except OSError as exc:
            print(f"{address}: unreachable ({exc})")
            status = EXIT_TRANSPORT
    return status


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfleet",
        description="Distributed orchestrator for quantum circuit ensembles "
                    "over simulator-backed virtual QPUs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("worker", help="serve a virtual QPU on a TCP port")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0, help="0 picks a free port")
    p.add_argument("--max-qubits", type=int, default=24)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--worker-id", default=None)
    p.add_argument("--delay", type=float, default=0.0,
                   help="artificial per-circuit delay in seconds (testing)")
    p.set_defaults(func=cmd_worker)

    p = sub.add_parser("run", help="execute one circuit file")
    p.add_argument("--circuit", required=True, help=".qasm or circuit .json")
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--exact", action="store_true", help="deterministic expectation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta", default=None, help="comma-separated parameter values")
    p.add_argument("--endpoints", default=None)
    p.add_argument("--preset", choices=["pool32"], default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--timeout", type=float, default=120.0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--print-config", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("scan", help="parameter scan over a job table")
    p.add_argument("--circuit", required=True)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--start", default="0")
    p.add_argument("--stop", default="pi")
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--endpoints", default=None)
    p.add_argument("--preset", choices=["pool32"], default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--timeout", type=float, default=300.0)
    p.add_argument("--output", default="scan")
    p.add_argument("--json", action="store_true", help="also write JSON")
    p.add_argument("--plot", action="store_true", help="also render a figure")
    p.add_argument("--print-config", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("vqe", help="variational ground-state search")
    p.add_argument("--hamiltonian", required=True, help="Pauli-term text file")
    p.add_argument("--ansatz", default="hardware-efficient",
                   help="'hardware-efficient' or an unmeasured .qasm/.json file")
    p.add_argument("--qubits", type=int, default=None)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--theta0", default="zeros")
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--ftol", type=float, default=1e-8)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--endpoints", default=None)
    p.add_argument("--preset", choices=["pool32"], default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--output", default="vqe")
    p.add_argument("--plot", action="store_true")
    p.add_argument("--print-config", action="store_true")
    p.set_defaults(func=cmd_vqe)

    p = sub.add_parser("bench", help="fixed-parameter energy scaling benchmark")
    p.add_argument("--qubits", type=int, default=16)
    p.add_argument("--terms", type=int, default=3052)
    p.add_argument("--workers", default="1,2,4",
                   help="comma-separated virtual-QPU counts")
    p.add_argument("--mode", choices=["exact", "shots"], default="exact")
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="bench")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("frame", help="print canonical wire frames for a scan cell")
    p.add_argument("--circuit", required=True)
    p.add_argument("--row", type=int, default=0)
    p.add_argument("--col", type=int, default=0)
    p.add_argument("--all-columns", action="store_true")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--start", default="0")
    p.add_argument("--stop", default="pi")
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("ping", help="health-check worker endpoints")
    p.add_argument("--endpoints", default=None)
    p.add_argument("--preset", choices=["pool32"], default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--timeout", type=float, default=5.0)
    p.set_defaults(func=cmd_ping)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QubitCapError, TermEvaluationError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EnsembleError, PoolExhaustedError, JobTimeout, protocol.ProtocolError,
            ConnectionError, OSError) as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except (ConfigError, QasmError, PauliFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
