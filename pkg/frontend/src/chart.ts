/**
 * Hand-rolled SVG charts for sweep results.
 *
 * Two figure kinds: throughput-vs-load curves with 95% confidence bands,
 * and throughput-at-target-PLR bars on a log axis. Every plotted point and
 * bar carries data-* attributes with the exact values, so the rendered
 * series can be read back out of the file. Output is a pure function of the
 * inputs: no timestamps, no randomness.
 */

import { loadAtTargetPlr, type SweepRow } from "./csv.js";

export interface LabeledSweep {
  label: string;
  rows: SweepRow[];
}

const PALETTE = [
  "#4361ee",
  "#e63946",
  "#2d6a4f",
  "#f3722c",
  "#9d4edd",
  "#577590",
];

const W = 640;
const H = 420;
const ML = 64;
const MR = 24;
const MT = 40;
const MB = 56;
const PW = W - ML - MR;
const PH = H - MT - MB;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    ticks.push(Number(v.toFixed(12)));
  }
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1000 || abs < 0.001) return v.toExponential(0);
  return String(Number(v.toPrecision(4)));
}

function svgOpen(title: string, subtitle: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" ` +
    `font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${W}" height="${H}" fill="#fff"/>\n` +
    `<text x="${ML}" y="18" font-size="13" font-weight="600" fill="#222">${esc(title)}</text>\n` +
    `<text x="${ML}" y="32" font-size="9" fill="#888">${esc(subtitle)}</text>\n`
  );
}

function axesFrame(): string {
  return (
    `<line x1="${ML}" y1="${MT}" x2="${ML}" y2="${MT + PH}" stroke="#333" stroke-width="1"/>\n` +
    `<line x1="${ML}" y1="${MT + PH}" x2="${ML + PW}" y2="${MT + PH}" stroke="#333" stroke-width="1"/>\n`
  );
}

function axisLabels(xLabel: string, yLabel: string): string {
  const cx = ML + PW / 2;
  const cy = MT + PH / 2;
  return (
    `<text x="${cx}" y="${H - 10}" text-anchor="middle" font-size="11" fill="#333">${esc(xLabel)}</text>\n` +
    `<text x="16" y="${cy}" text-anchor="middle" font-size="11" fill="#333" ` +
    `transform="rotate(-90,16,${cy})">${esc(yLabel)}</text>\n`
  );
}

function legend(entries: { label: string; color: string }[]): string {
  let out = "";
  entries.forEach(({ label, color }, i) => {
    const y = MT + 10 + i * 14;
    const x = ML + PW - 150;
    out += `<line x1="${x}" y1="${y}" x2="${x + 16}" y2="${y}" stroke="${color}" stroke-width="2"/>\n`;
    out += `<text x="${x + 21}" y="${y + 3}" font-size="9" fill="#444" class="legend-label">${esc(label)}</text>\n`;
  });
  return out;
}

export function renderCurves(inputs: LabeledSweep[]): string {
  if (inputs.length === 0) {
    throw new Error("curves needs at least one input");
  }
  const allLoads = inputs.flatMap(({ rows }) => rows.map((r) => r.load));
  const allTops = inputs.flatMap(({ rows }) =>
    rows.map((r) => r.throughputMean + r.throughputCi95),
  );
  const xMin = Math.min(...allLoads);
  const xMax = Math.max(...allLoads);
  const yMin = 0;
  const yMax = Math.max(...allTops) * 1.08 || 1;
  const xOf = (v: number) => ML + ((v - xMin) / (xMax - xMin || 1)) * PW;
  const yOf = (v: number) => MT + PH - ((v - yMin) / (yMax - yMin)) * PH;

  const subtitle = inputs
    .map(({ label, rows }) => `${label}: ${rows[0].protocol} n_slots=${rows[0].nSlots}`)
    .join("  |  ");
  let s = svgOpen("Throughput vs. channel load", subtitle);

  for (const v of niceTicks(yMin, yMax, 6)) {
    const y = yOf(v);
    s += `<line x1="${ML}" y1="${y.toFixed(1)}" x2="${ML + PW}" y2="${y.toFixed(1)}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${ML - 6}" y="${(y + 3).toFixed(1)}" text-anchor="end" font-size="9" fill="#666">${fmt(v)}</text>\n`;
  }
  for (const v of niceTicks(xMin, xMax, 8)) {
    const x = xOf(v);
    s += `<line x1="${x.toFixed(1)}" y1="${MT + PH}" x2="${x.toFixed(1)}" y2="${MT + PH + 4}" stroke="#333" stroke-width="0.6"/>\n`;
    s += `<text x="${x.toFixed(1)}" y="${MT + PH + 15}" text-anchor="middle" font-size="9" fill="#666">${fmt(v)}</text>\n`;
  }

  inputs.forEach(({ label, rows }, i) => {
    const color = PALETTE[i % PALETTE.length];
    const band = [
      ...rows.map((r) => `${xOf(r.load).toFixed(1)},${yOf(r.throughputMean + r.throughputCi95).toFixed(1)}`),
      ...[...rows].reverse().map((r) => `${xOf(r.load).toFixed(1)},${yOf(Math.max(0, r.throughputMean - r.throughputCi95)).toFixed(1)}`),
    ].join(" ");
    s += `<polygon fill="${color}" opacity="0.15" points="${band}" class="ci-band"/>\n`;
    const pts = rows
      .map((r) => `${xOf(r.load).toFixed(1)},${yOf(r.throughputMean).toFixed(1)}`)
      .join(" ");
    s += `<polyline fill="none" stroke="${color}" stroke-width="1.6" points="${pts}" data-series="${esc(label)}"/>\n`;
    for (const r of rows) {
      s +=
        `<circle cx="${xOf(r.load).toFixed(1)}" cy="${yOf(r.throughputMean).toFixed(1)}" r="2.4" ` +
        `fill="${color}" data-series="${esc(label)}" data-load="${r.load}" ` +
        `data-throughput="${r.throughputMean}"/>\n`;
    }
  });

  s += axesFrame();
  s += axisLabels("channel load [pk/slot]", "throughput [pk/slot]");
  s += legend(inputs.map(({ label }, i) => ({ label, color: PALETTE[i % PALETTE.length] })));
  s += "</svg>\n";
  return s;
}

export function renderBars(inputs: LabeledSweep[], target: number): string {
  if (inputs.length === 0) {
    throw new Error("bars needs at least one input");
  }
  if (!(target > 0 && target < 1)) {
    throw new Error(`target must be in (0,1), got ${target}`);
  }
  const picks = inputs.map(({ label, rows }) => ({
    label,
    pick: loadAtTargetPlr(rows, target),
  }));
  const values = picks
    .filter((p) => p.pick !== null)
    .map((p) => (p.pick as { throughput: number }).throughput)
    .filter((v) => v > 0);
  // log axis spanning every positive bar, padded a decade below the smallest
  const yMax = values.length ? Math.max(...values) * 2 : 1;
  const yMin = values.length ? Math.min(...values) / 10 : 0.001;
  const logMin = Math.log10(yMin);
  const logMax = Math.log10(yMax);
  const yOf = (v: number) =>
    MT + PH - ((Math.log10(v) - logMin) / (logMax - logMin || 1)) * PH;

  let s = svgOpen(
    `Throughput at target PLR <= ${target}`,
    picks
      .map((p) => `${p.label}: ${p.pick ? `G=${fmt(p.pick.load)}` : "no qualifying point"}`)
      .join("  |  "),
  );

  for (let e = Math.ceil(logMin); e <= Math.floor(logMax) + 1e-9; e++) {
    const v = Math.pow(10, e);
    if (v > yMax) break;
    const y = yOf(v);
    s += `<line x1="${ML}" y1="${y.toFixed(1)}" x2="${ML + PW}" y2="${y.toFixed(1)}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${ML - 6}" y="${(y + 3).toFixed(1)}" text-anchor="end" font-size="9" fill="#666">1e${e}</text>\n`;
  }

  const slot = PW / picks.length;
  const barW = Math.min(80, slot * 0.5);
  picks.forEach(({ label, pick }, i) => {
    const color = PALETTE[i % PALETTE.length];
    const xc = ML + slot * (i + 0.5);
    const x = xc - barW / 2;
    if (pick === null || pick.throughput <= 0) {
      // zero-height bar: baseline stub plus annotation
      s +=
        `<rect x="${x.toFixed(1)}" y="${(MT + PH).toFixed(1)}" width="${barW.toFixed(1)}" height="0" ` +
        `fill="${color}" data-label="${esc(label)}" data-throughput="0"/>\n`;
      s += `<text x="${xc.toFixed(1)}" y="${MT + PH - 8}" text-anchor="middle" font-size="9" fill="#999" class="bar-note">no point at PLR &lt;= ${target}</text>\n`;
    } else {
      const top = yOf(pick.throughput);
      s +=
        `<rect x="${x.toFixed(1)}" y="${top.toFixed(1)}" width="${barW.toFixed(1)}" ` +
        `height="${(MT + PH - top).toFixed(1)}" fill="${color}" opacity="0.85" ` +
        `data-label="${esc(label)}" data-load="${pick.load}" ` +
        `data-throughput="${pick.throughput}"/>\n`;
      s += `<text x="${xc.toFixed(1)}" y="${(top - 5).toFixed(1)}" text-anchor="middle" font-size="9" fill="#333">${fmt(pick.throughput)}</text>\n`;
    }
    s += `<text x="${xc.toFixed(1)}" y="${MT + PH + 15}" text-anchor="middle" font-size="10" fill="#333">${esc(label)}</text>\n`;
  });

  s += axesFrame();
  s += axisLabels("scheme", "throughput [pk/slot]");
  s += "</svg>\n";
  return s;
}
