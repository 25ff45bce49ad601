// Utility-curve chart as an SVG string: elicited points over the unit
// square with the diagonal as the risk-neutral reference.  Pure string
// generation so it is testable without a DOM.

import type { UtilityPointWire } from "./types.js";

const SIZE = 320;
const PAD = 36;

function sx(v: number): number {
  return PAD + v * (SIZE - 2 * PAD);
}

function sy(v: number): number {
  return SIZE - PAD - v * (SIZE - 2 * PAD);
}

function fmt(n: number): string {
  return n.toFixed(2).replace(/\.?0+$/, "");
}

export function curveSvg(points: UtilityPointWire[]): string {
  if (points.length === 0) {
    return (
      `<svg viewBox="0 0 ${SIZE} ${SIZE}" role="img" aria-label="utility curve">` +
      `<text x="${SIZE / 2}" y="${SIZE / 2}" text-anchor="middle" class="placeholder">` +
      `no utilities yet</text></svg>`
    );
  }
  const sorted = [...points].sort((a, b) => a.c - b.c);
  const path = sorted
    .map((pt, i) => `${i === 0 ? "M" : "L"}${fmt(sx(pt.c))} ${fmt(sy(pt.u))}`)
    .join(" ");
  const dots = sorted
    .map(
      (pt) =>
        `<circle cx="${fmt(sx(pt.c))}" cy="${fmt(sy(pt.u))}" r="4" class="pt ${pt.disposition}">` +
        `<title>c=${pt.c} u=${pt.u} (${pt.disposition})</title></circle>`,
    )
    .join("");
  const ticks = [0, 0.25, 0.5, 0.75, 1]
    .map(
      (t) =>
        `<text x="${fmt(sx(t))}" y="${SIZE - 12}" text-anchor="middle" class="tick">${t}</text>` +
        `<text x="${PAD - 8}" y="${fmt(sy(t) + 4)}" text-anchor="end" class="tick">${t}</text>`,
    )
    .join("");
  return (
    `<svg viewBox="0 0 ${SIZE} ${SIZE}" role="img" aria-label="utility curve">` +
    `<rect x="${PAD}" y="${PAD}" width="${SIZE - 2 * PAD}" height="${SIZE - 2 * PAD}" class="frame"/>` +
    `<line x1="${fmt(sx(0))}" y1="${fmt(sy(0))}" x2="${fmt(sx(1))}" y2="${fmt(sy(1))}" class="diagonal"/>` +
    `<path d="${path}" class="curve"/>` +
    dots +
    ticks +
    `</svg>`
  );
}
