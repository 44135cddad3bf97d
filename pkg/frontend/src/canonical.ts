/**
 * Canonical JSON encoding matching the coordinator's frame serializer:
 * keys sorted, no whitespace, ASCII-only escapes, and floats rendered
 * exactly as CPython's repr() so frames are byte-identical across clients.
 *
 * Plain `number` values serialize as integers (shots, seeds, qubit indices);
 * real-valued fields must be wrapped in PyFloat to opt into float rendering.
 */

export class PyFloat {
  constructor(public readonly value: number) {
    if (!Number.isFinite(value)) {
      throw new Error("non-finite floats are not representable in JSON");
    }
  }
}

export type Wire =
  | null
  | boolean
  | number
  | string
  | PyFloat
  | Wire[]
  | { [key: string]: Wire };

/** CPython repr() of a float, reconstructed from JS shortest-round-trip digits. */
export function pyFloatRepr(x: number): string {
  if (!Number.isFinite(x)) throw new Error("non-finite floats have no JSON repr");
  if (x === 0) return Object.is(x, -0) ? "-0.0" : "0.0";
  const neg = x < 0 ? "-" : "";
  const s = Math.abs(x).toString();
  // normalize to (digits, E) with value = d.igits * 10^E
  let digits: string;
  let E: number;
  if (s.includes("e")) {
    const [mantissa, exp] = s.split("e");
    E = parseInt(exp, 10);
    digits = mantissa.replace(".", "");
  } else {
    const dot = s.indexOf(".");
    if (dot < 0) {
      digits = s;
      E = s.length - 1;
    } else {
      const intPart = s.slice(0, dot);
      const frac = s.slice(dot + 1);
      if (intPart === "0") {
        let lead = 0;
        while (lead < frac.length && frac[lead] === "0") lead++;
        digits = frac.slice(lead);
        E = -lead - 1;
      } else {
        digits = intPart + frac;
        E = intPart.length - 1;
      }
    }
  }
  digits = digits.replace(/0+$/, "") || "0";
  if (E >= 16 || E < -4) {
    const mant = digits.length > 1 ? `${digits[0]}.${digits.slice(1)}` : digits;
    const sign = E < 0 ? "-" : "+";
    return `${neg}${mant}e${sign}${Math.abs(E).toString().padStart(2, "0")}`;
  }
  if (E >= digits.length - 1) {
    return `${neg}${digits}${"0".repeat(E - digits.length + 1)}.0`;
  }
  if (E >= 0) {
    return `${neg}${digits.slice(0, E + 1)}.${digits.slice(E + 1)}`;
  }
  return `${neg}0.${"0".repeat(-E - 1)}${digits}`;
}

const SHORT_ESCAPES: Record<string, string> = {
  '"': '\\"',
  "\\": "\\\\",
  "\b": "\\b",
  "\f": "\\f",
  "\n": "\\n",
  "\r": "\\r",
  "\t": "\\t",
};

/** String escaping identical to json.dumps defaults (ensure_ascii). */
export function escapeString(s: string): string {
  let out = '"';
  for (let i = 0; i < s.length; i++) {
    const ch = s[i];
    const code = s.charCodeAt(i);
    if (ch in SHORT_ESCAPES) {
      out += SHORT_ESCAPES[ch];
    } else if (code < 0x20 || code > 0x7e) {
      // non-ASCII escapes; surrogate pairs fall out naturally per code unit
      out += "\\u" + code.toString(16).padStart(4, "0");
    } else {
      out += ch;
    }
  }
  return out + '"';
}

export function canonicalStringify(value: Wire): string {
  if (value === null) return "null";
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "number") {
    if (!Number.isInteger(value)) {
      throw new Error(
        `bare number ${value} is not an integer; wrap floats in PyFloat`);
    }
    return value.toString();
  }
  if (typeof value === "string") return escapeString(value);
  if (value instanceof PyFloat) return pyFloatRepr(value.value);
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalStringify).join(",") + "]";
  }
  const keys = Object.keys(value).sort();
  const parts = keys.map((k) => `${escapeString(k)}:${canonicalStringify(value[k])}`);
  return "{" + parts.join(",") + "}";
}

export function canonicalBytes(value: Wire): Buffer {
  return Buffer.from(canonicalStringify(value), "utf-8");
}
