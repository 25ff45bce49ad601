// Exact display formatting.  Chances are shown as percentages, but the
// shown digits must round-trip to the service's float bit-for-bit, so
// the decimal point is shifted on the number's shortest string form
// instead of multiplying by 100 (which would introduce binary noise,
// e.g. 0.55 * 100 === 55.00000000000001).

function shiftDecimal(digits: string, shift: number): string {
  // digits is a plain non-negative decimal string like "0.125" or "3".
  const [wholeRaw, fracRaw = ""] = digits.split(".");
  const whole = wholeRaw === "" ? "0" : (wholeRaw as string);
  const all = whole + fracRaw;
  let point = whole.length + shift;
  let padded = all;
  if (point <= 0) {
    padded = "0".repeat(1 - point) + all;
    point = 1;
  } else if (point > all.length) {
    padded = all + "0".repeat(point - all.length);
  }
  const head = padded.slice(0, point).replace(/^0+(?=\d)/, "");
  const tail = padded.slice(point).replace(/0+$/, "");
  return tail ? `${head}.${tail}` : head;
}

function decimalForm(value: number): { digits: string; exponent: number } {
  const repr = String(value);
  const match = /^(\d+(?:\.\d+)?)e([+-]\d+)$/.exec(repr);
  if (match) {
    return { digits: match[1] as string, exponent: Number(match[2]) };
  }
  return { digits: repr, exponent: 0 };
}

/** A chance in [0, 1] as an exact percentage string, e.g. 0.55 -> "55%". */
export function formatChance(value: number): string {
  if (!(value >= 0 && value <= 1)) {
    throw new Error(`chance out of range: ${value}`);
  }
  const { digits, exponent } = decimalForm(value);
  return shiftDecimal(digits, exponent + 2) + "%";
}

/** Inverse of formatChance; returns the identical float. */
export function parseChance(text: string): number {
  if (!text.endsWith("%")) {
    throw new Error(`not a percentage: ${text}`);
  }
  return Number(shiftDecimal(text.slice(0, -1), -2));
}

/**
 * Deterministic left/right placement per gamble id (FNV-1a parity).
 * Randomizing the option order per card counters position bias; seeding
 * it by the id keeps a re-rendered card identical.
 */
export function gambleOnLeft(gambleId: string): boolean {
  let hash = 0x811c9dc5;
  for (let i = 0; i < gambleId.length; i++) {
    hash ^= gambleId.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return (hash & 1) === 1;
}
