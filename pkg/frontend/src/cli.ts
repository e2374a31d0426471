#!/usr/bin/env node
/**
 * plots: render ra-sim sweep CSVs as SVG figures.
 *
 *   plots curves --in results.csv[:label] [--in ...] --out fig.svg
 *   plots bars   --in results.csv[:label] [--in ...] --target 0.01 --out fig.svg
 *
 * Inputs must follow the ra-sim sweep CSV schema. A `path:label` input names
 * the series; otherwise the file stem is used. Identical inputs always
 * produce identical SVG bytes.
 */

import { readFileSync, writeFileSync } from "node:fs";
import path from "node:path";

import { renderBars, renderCurves, type LabeledSweep } from "./chart.js";
import { parseSweepCsv, SchemaError } from "./csv.js";

export class UsageError extends Error {}

export interface FigureSpec {
  kind: "curves" | "bars";
  inputs: { path: string; label: string }[];
  target: number | null;
  out: string;
}

function splitInput(arg: string): { path: string; label: string } {
  const colon = arg.lastIndexOf(":");
  if (colon > 0 && colon < arg.length - 1 && !arg.slice(colon + 1).includes(path.sep)) {
    return { path: arg.slice(0, colon), label: arg.slice(colon + 1) };
  }
  return { path: arg, label: path.basename(arg).replace(/\.csv$/i, "") };
}

export function parseArgs(argv: string[]): FigureSpec {
  if (argv.length === 0) {
    throw new UsageError("usage: plots curves|bars --in file[:label] ... [--target T] --out img.svg");
  }
  const [kind, ...rest] = argv;
  if (kind !== "curves" && kind !== "bars") {
    throw new UsageError(`unknown figure kind '${kind}', expected curves or bars`);
  }
  const inputs: { path: string; label: string }[] = [];
  let target: number | null = null;
  let out: string | null = null;
  for (let i = 0; i < rest.length; i++) {
    const flag = rest[i];
    const value = rest[i + 1];
    switch (flag) {
      case "--in":
        if (value === undefined) throw new UsageError("--in needs a file argument");
        inputs.push(splitInput(value));
        i++;
        break;
      case "--target": {
        if (value === undefined) throw new UsageError("--target needs a number");
        target = Number(value);
        if (Number.isNaN(target)) throw new UsageError(`bad target '${value}'`);
        i++;
        break;
      }
      case "--out":
        if (value === undefined) throw new UsageError("--out needs a path");
        out = value;
        i++;
        break;
      default:
        throw new UsageError(`unknown flag '${flag}'`);
    }
  }
  if (inputs.length === 0) {
    throw new UsageError("at least one --in file is required");
  }
  if (out === null) {
    throw new UsageError("--out is required");
  }
  if (kind === "bars") {
    if (target === null) {
      throw new UsageError("bars requires --target");
    }
    if (!(target > 0 && target < 1)) {
      throw new UsageError(`--target must be in (0,1), got ${target}`);
    }
  }
  return { kind, inputs, target, out };
}

export function renderSpec(spec: FigureSpec): string {
  const labeled: LabeledSweep[] = spec.inputs.map(({ path: p, label }) => ({
    label,
    rows: parseSweepCsv(readFileSync(p, "utf-8"), p),
  }));
  return spec.kind === "curves"
    ? renderCurves(labeled)
    : renderBars(labeled, spec.target as number);
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    writeFileSync(spec.out, renderSpec(spec));
    console.log(`wrote ${spec.out}`);
    return 0;
  } catch (err) {
    if (err instanceof UsageError || err instanceof SchemaError || err instanceof Error) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${String(err)}`);
    return 1;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("plots")) {
  process.exit(main(process.argv.slice(2)));
}
