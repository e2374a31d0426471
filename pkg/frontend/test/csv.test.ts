import { readFileSync } from "node:fs";
import path from "node:path";
import { describe, expect, it } from "vitest";

import { loadAtTargetPlr, parseSweepCsv, SchemaError } from "../src/csv.js";

const FIXTURES = path.join(__dirname, "fixtures");

const HEADER =
  "protocol,distribution,n_slots,load,trials,throughput_mean,throughput_ci95," +
  "plr_mean,plr_ci95_low,plr_ci95_high,packets_total";

function row(load: number, thr: number, plr: number): string {
  return `sa,1:1.0,100,${load},10,${thr},0.001,${plr},${plr},${plr},1000`;
}

describe("parseSweepCsv", () => {
  it("parses a real engine sweep", () => {
    const text = readFileSync(path.join(FIXTURES, "irsa_200.csv"), "utf-8");
    const rows = parseSweepCsv(text, "irsa_200.csv");
    expect(rows).toHaveLength(10);
    expect(rows[0].protocol).toBe("irsa");
    expect(rows[0].distribution).toBe("2:0.5,3:0.28,8:0.22"); // unquoted again
    expect(rows[0].nSlots).toBe(200);
    expect(rows.map((r) => r.load)).toEqual([...rows.map((r) => r.load)].sort((a, b) => a - b));
  });

  it("rejects a wrong header", () => {
    expect(() => parseSweepCsv("a,b,c\n1,2,3\n", "x")).toThrow(SchemaError);
    expect(() => parseSweepCsv("a,b,c\n1,2,3\n", "x")).toThrow(/line 1/);
  });

  it("rejects an empty file and an empty body", () => {
    expect(() => parseSweepCsv("", "x")).toThrow(/empty file/);
    expect(() => parseSweepCsv(HEADER + "\n", "x")).toThrow(/empty CSV body/);
  });

  it("names line and column for a bad cell", () => {
    const text = `${HEADER}\n${row(0.5, 0.3, 0.1).replace("0.3", "oops")}\n`;
    expect(() => parseSweepCsv(text, "x")).toThrow(/line 2.*throughput_mean/);
  });

  it("rejects rows with missing fields", () => {
    const short = row(0.5, 0.3, 0.1).split(",").slice(0, 5).join(",");
    expect(() => parseSweepCsv(`${HEADER}\n${short}\n`, "x")).toThrow(/line 2/);
  });

  it("rejects mixed sweeps in one file", () => {
    const text = `${HEADER}\n${row(0.5, 0.3, 0.1)}\n${row(0.6, 0.3, 0.1).replace("sa", "irsa")}\n`;
    expect(() => parseSweepCsv(text, "x")).toThrow(/mixed/);
  });

  it("sorts rows by load", () => {
    const text = `${HEADER}\n${row(0.9, 0.3, 0.5)}\n${row(0.1, 0.09, 0.01)}\n`;
    const rows = parseSweepCsv(text, "x");
    expect(rows.map((r) => r.load)).toEqual([0.1, 0.9]);
  });
});

describe("loadAtTargetPlr", () => {
  // analytic slotted ALOHA points: PLR = 1 - exp(-G)
  const loads = [0.005, 0.01, 0.0105, 0.05, 0.5];
  const rows = parseSweepCsv(
    HEADER +
      "\n" +
      loads
        .map((g) => row(g, g * Math.exp(-g), 1 - Math.exp(-g)))
        .join("\n") +
      "\n",
    "synthetic",
  );

  it("inverts the analytic slotted ALOHA loss curve", () => {
    // PLR <= 1e-2 forces G <= -ln(0.99) = 0.01005
    const pick = loadAtTargetPlr(rows, 0.01);
    expect(pick).not.toBeNull();
    expect(pick!.load).toBeCloseTo(0.01, 12);
    expect(pick!.throughput).toBeCloseTo(0.01 * Math.exp(-0.01), 12);
  });

  it("returns null when nothing qualifies", () => {
    expect(loadAtTargetPlr(rows, 1e-9)).toBeNull();
  });
});
