/** SVG chart builders. Pure string producers so they are testable without a
 * DOM; the app assigns the output to innerHTML. */

import type { Lane } from "./model.js";

// Deterministic palette keyed by level index, so lane colors are stable
// across refreshes for the same level set.
const PALETTE = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
  "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac",
];

export function levelColor(levelIndex: number): string {
  return PALETTE[levelIndex % PALETTE.length];
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export function incumbentChartSvg(series: number[], width = 640, height = 220): string {
  if (series.length === 0) {
    return `<svg width="${width}" height="${height}" role="img"></svg>`;
  }
  const margin = { left: 54, right: 12, top: 10, bottom: 24 };
  const w = width - margin.left - margin.right;
  const h = height - margin.top - margin.bottom;
  const lo = Math.min(...series);
  const hi = Math.max(...series);
  const span = hi - lo || 1;
  const x = (i: number) => margin.left + (series.length === 1 ? 0 : (i / (series.length - 1)) * w);
  const y = (v: number) => margin.top + h - ((v - lo) / span) * h;
  const path = series.map((v, i) => `${i === 0 ? "M" : "L"}${x(i).toFixed(1)},${y(v).toFixed(1)}`).join(" ");
  const dots = series
    .map((v, i) => `<circle cx="${x(i).toFixed(1)}" cy="${y(v).toFixed(1)}" r="2.4" fill="#4e79a7"/>`)
    .join("");
  return (
    `<svg width="${width}" height="${height}" role="img" aria-label="incumbent over iterations">` +
    `<line x1="${margin.left}" y1="${margin.top + h}" x2="${margin.left + w}" y2="${margin.top + h}" stroke="#999"/>` +
    `<line x1="${margin.left}" y1="${margin.top}" x2="${margin.left}" y2="${margin.top + h}" stroke="#999"/>` +
    `<text x="${margin.left - 6}" y="${y(hi) + 4}" text-anchor="end" font-size="11">${esc(format(hi))}</text>` +
    `<text x="${margin.left - 6}" y="${y(lo) + 4}" text-anchor="end" font-size="11">${esc(format(lo))}</text>` +
    `<text x="${margin.left + w}" y="${height - 6}" text-anchor="end" font-size="11">iteration ${series.length - 1}</text>` +
    `<path d="${path}" fill="none" stroke="#4e79a7" stroke-width="1.6"/>` +
    dots +
    `</svg>`
  );
}

export function decisionPathSvg(lanes: Lane[], width = 640, laneHeight = 34): string {
  if (lanes.length === 0) return "";
  const labelWidth = 110;
  const n = Math.max(1, ...lanes.map((l) => l.stripes.length));
  const stripeWidth = (width - labelWidth) / n;
  const height = lanes.length * laneHeight + 20;
  const parts: string[] = [
    `<svg width="${width}" height="${height}" role="img" aria-label="categorical decision path">`,
  ];
  lanes.forEach((lane, row) => {
    const top = row * laneHeight + 4;
    parts.push(
      `<text x="4" y="${top + laneHeight / 2}" font-size="11" dominant-baseline="middle">${esc(lane.varName)}</text>`
    );
    lane.stripes.forEach((stripe, i) => {
      const title = `${esc(lane.varName)}=${esc(stripe.label)} @ ${stripe.iteration} (y=${format(stripe.y)})`;
      parts.push(
        `<rect class="stripe" x="${(labelWidth + i * stripeWidth).toFixed(2)}" y="${top}" ` +
          `width="${Math.max(stripeWidth - 0.5, 0.5).toFixed(2)}" height="${laneHeight - 8}" ` +
          `fill="${levelColor(stripe.levelIndex)}"><title>${title}</title></rect>`
      );
    });
  });
  parts.push(`<text x="${labelWidth}" y="${height - 4}" font-size="10">iterations 0..${n - 1}</text>`);
  parts.push("</svg>");
  return parts.join("");
}

function format(v: number): string {
  if (!Number.isFinite(v)) return String(v);
  return Math.abs(v) >= 1000 ? v.toFixed(0) : v.toPrecision(4);
}
