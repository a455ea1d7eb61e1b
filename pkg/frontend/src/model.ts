import { numColumn, strColumn, SchemaError, type Table } from "./csv.js";

/** Square kernel grid keyed by the sorted site list. */
export interface KernelGrid {
  sites: number[];
  values: number[][];
  maxAbs: number;
}

export function kernelGrid(table: Table, path: string): KernelGrid {
  const xs = numColumn(table, path, "x");
  const ys = numColumn(table, path, "y");
  const vs = numColumn(table, path, "value");
  const sites = [...new Set(xs.concat(ys))].sort((a, b) => a - b);
  const index = new Map(sites.map((s, i) => [s, i]));
  const n = sites.length;
  const values = Array.from({ length: n }, () => new Array<number>(n).fill(0));
  let maxAbs = 0;
  for (let r = 0; r < xs.length; r += 1) {
    const i = index.get(xs[r]);
    const j = index.get(ys[r]);
    if (i === undefined || j === undefined) continue;
    values[i][j] = vs[r];
    maxAbs = Math.max(maxAbs, Math.abs(vs[r]));
  }
  return { sites, values, maxAbs };
}

/**
 * Collapse space-time entries onto the largest magnitude at each nonnegative
 * time separation u = s - t.  The result is the envelope whose slope exposes
 * the exponential falloff of the two-time kernel.
 */
export function decayCurve(table: Table, path: string): { u: number[]; peak: number[] } {
  const ts = numColumn(table, path, "t");
  const ss = numColumn(table, path, "s");
  const vs = numColumn(table, path, "value");
  const byGap = new Map<string, number>();
  for (let r = 0; r < ts.length; r += 1) {
    const u = ss[r] - ts[r];
    if (u < 0) continue;
    const key = u.toPrecision(12);
    const cur = byGap.get(key) ?? 0;
    byGap.set(key, Math.max(cur, Math.abs(vs[r])));
  }
  const pairs = [...byGap.entries()]
    .map(([k, v]) => [Number(k), v] as const)
    .sort((a, b) => a[0] - b[0]);
  return { u: pairs.map((p) => p[0]), peak: pairs.map((p) => p[1]) };
}

export interface LimitSeries {
  regime: string;
  rung: number[];
  error: number[];
}

export function limitsSeries(table: Table, path: string): LimitSeries[] {
  const regimes = strColumn(table, path, "regime");
  const rungs = numColumn(table, path, "ladder_k");
  const errors = numColumn(table, path, "sup_entry_error");
  const order: string[] = [];
  const grouped = new Map<string, LimitSeries>();
  for (let r = 0; r < regimes.length; r += 1) {
    let series = grouped.get(regimes[r]);
    if (series === undefined) {
      series = { regime: regimes[r], rung: [], error: [] };
      grouped.set(regimes[r], series);
      order.push(regimes[r]);
    }
    series.rung.push(rungs[r]);
    series.error.push(errors[r]);
  }
  return order.map((name) => grouped.get(name)!);
}

/** Mean occupancy per (site, step) across all trajectory draws. */
export interface OccupancyGrid {
  steps: number[];
  times: number[];
  siteCount: number;
  /** occupancy[site][stepIndex] in [0, 1] */
  occupancy: number[][];
}

export function occupancyGrid(table: Table, path: string): OccupancyGrid {
  const steps = numColumn(table, path, "step");
  const times = numColumn(table, path, "time");
  const bits = strColumn(table, path, "bitstring");
  if (bits.length === 0) throw new SchemaError(path, "bitstring", "no trajectory rows");
  const siteCount = bits[0].length;
  const stepValues = [...new Set(steps)].sort((a, b) => a - b);
  const stepIndex = new Map(stepValues.map((s, i) => [s, i]));
  const timeOf = new Array<number>(stepValues.length).fill(0);
  const sums = Array.from({ length: siteCount }, () => new Array<number>(stepValues.length).fill(0));
  const counts = new Array<number>(stepValues.length).fill(0);
  for (let r = 0; r < steps.length; r += 1) {
    const si = stepIndex.get(steps[r])!;
    timeOf[si] = times[r];
    counts[si] += 1;
    const b = bits[r];
    if (b.length !== siteCount) {
      throw new SchemaError(path, "bitstring", `row ${r + 1} length ${b.length} differs from ${siteCount}`);
    }
    for (let k = 0; k < siteCount; k += 1) {
      if (b[k] === "1") sums[k][si] += 1;
      else if (b[k] !== "0") throw new SchemaError(path, "bitstring", `row ${r + 1} has character ${b[k]}`);
    }
  }
  const occupancy = sums.map((row) => row.map((v, si) => (counts[si] > 0 ? v / counts[si] : 0)));
  return { steps: stepValues, times: timeOf, siteCount, occupancy };
}

/** Transfer-operator block at the smallest listed duration, labels in file order. */
export interface CylindricGrid {
  t: number;
  labels: string[];
  entries: number[][];
}

export function cylindricGrid(table: Table, path: string): CylindricGrid {
  const lams = strColumn(table, path, "lambda");
  const mus = strColumn(table, path, "mu");
  const ts = numColumn(table, path, "t");
  const es = numColumn(table, path, "entry");
  if (ts.length === 0) throw new SchemaError(path, "t", "no transfer entries");
  const t = Math.min(...ts);
  const labels: string[] = [];
  const index = new Map<string, number>();
  for (let r = 0; r < lams.length; r += 1) {
    if (ts[r] !== t) continue;
    for (const label of [lams[r], mus[r]]) {
      if (!index.has(label)) {
        index.set(label, labels.length);
        labels.push(label);
      }
    }
  }
  const n = labels.length;
  const entries = Array.from({ length: n }, () => new Array<number>(n).fill(0));
  for (let r = 0; r < lams.length; r += 1) {
    if (ts[r] !== t) continue;
    entries[index.get(lams[r])!][index.get(mus[r])!] = es[r];
  }
  return { t, labels, entries };
}
