import {
  divergingColor,
  drawAxes,
  formatTick,
  linearScale,
  newPlot,
  niceTicks,
  sequentialColor,
  SERIES_COLORS,
  type Area,
} from "./axes.js";
import type { CylindricGrid, KernelGrid, LimitSeries, OccupancyGrid } from "./model.js";
import { cells, polyline, rect, text, type Figure } from "./scene.js";

const WIDTH = 480;
const HEIGHT = 380;

function thinned<T>(items: readonly T[], limit: number): { idx: number; item: T }[] {
  const stride = Math.max(1, Math.ceil(items.length / limit));
  const out: { idx: number; item: T }[] = [];
  for (let i = 0; i < items.length; i += stride) out.push({ idx: i, item: items[i] });
  return out;
}

function heatmapAxes(
  fig: Figure,
  area: Area,
  rowLabels: string[],
  colLabels: string[],
  spec: { title: string; xLabel: string; yLabel: string },
): void {
  const xs = linearScale([0, colLabels.length], [area.x, area.x + area.w]);
  const ys = linearScale([0, rowLabels.length], [area.y, area.y + area.h]);
  drawAxes(fig, area, xs, ys, {
    title: spec.title,
    xLabel: spec.xLabel,
    yLabel: spec.yLabel,
    xTicks: thinned(colLabels, 10).map(({ idx, item }) => ({ v: idx + 0.5, label: item })),
    yTicks: thinned(rowLabels, 12).map(({ idx, item }) => ({ v: idx + 0.5, label: item })),
  });
}

/** Static kernel as a symmetric diverging heatmap scaled to the largest entry. */
export function kernelHeatmapFigure(grid: KernelGrid): Figure {
  const { fig, area } = newPlot(WIDTH, HEIGHT);
  const scale = grid.maxAbs > 0 ? grid.maxAbs : 1;
  const colors = grid.values.map((row) => row.map((v) => divergingColor(v / scale)));
  cells(fig, area.x, area.y, area.w, area.h, colors);
  const labels = grid.sites.map(formatTick);
  heatmapAxes(fig, area, labels, labels, {
    title: "kernel entries",
    xLabel: "site y",
    yLabel: "site x",
  });
  text(fig, area.x + area.w, 16, `|k| max = ${formatTick(grid.maxAbs)}`, { anchor: "end", size: 9, fill: "#666666" });
  return fig;
}

function log10Points(x: number[], y: number[]): { x: number; y: number }[] {
  const out: { x: number; y: number }[] = [];
  for (let i = 0; i < x.length; i += 1) {
    if (y[i] > 0) out.push({ x: x[i], y: Math.log10(y[i]) });
  }
  return out;
}

function decadeTicks(lo: number, hi: number): { v: number; label: string }[] {
  const ticks: { v: number; label: string }[] = [];
  const step = Math.max(1, Math.ceil((hi - lo) / 6));
  for (let e = Math.ceil(lo); e <= Math.floor(hi); e += step) {
    ticks.push({ v: e, label: e === 0 ? "1" : `1e${e}` });
  }
  return ticks.length > 0 ? ticks : [{ v: lo, label: `1e${Math.round(lo)}` }];
}

function logLinePlot(
  seriesList: { name: string; pts: { x: number; y: number }[] }[],
  spec: { title: string; xLabel: string; yLabel: string },
): Figure {
  const { fig, area } = newPlot(WIDTH, HEIGHT);
  const all = seriesList.flatMap((s) => s.pts);
  if (all.length === 0) {
    text(fig, WIDTH / 2, HEIGHT / 2, "no positive values to plot", { anchor: "middle" });
    return fig;
  }
  const xLo = Math.min(...all.map((p) => p.x));
  const xHi = Math.max(...all.map((p) => p.x));
  let yLo = Math.min(...all.map((p) => p.y));
  let yHi = Math.max(...all.map((p) => p.y));
  if (yHi - yLo < 0.5) {
    yLo -= 0.5;
    yHi += 0.5;
  }
  const pad = (yHi - yLo) * 0.06;
  const xs = linearScale([xLo, xHi === xLo ? xLo + 1 : xHi], [area.x, area.x + area.w]);
  const ys = linearScale([yLo - pad, yHi + pad], [area.y + area.h, area.y]);
  drawAxes(fig, area, xs, ys, {
    title: spec.title,
    xLabel: spec.xLabel,
    yLabel: spec.yLabel,
    xTicks: niceTicks(xLo, xHi).map((v) => ({ v, label: formatTick(v) })),
    yTicks: decadeTicks(yLo - pad, yHi + pad),
  });
  seriesList.forEach((s, si) => {
    if (s.pts.length === 0) return;
    const color = SERIES_COLORS[si % SERIES_COLORS.length];
    polyline(fig, s.pts.map((p) => [xs(p.x), ys(p.y)] as [number, number]), color, 1.5);
    for (const p of s.pts) {
      rect(fig, xs(p.x) - 1.5, ys(p.y) - 1.5, 3, 3, color);
    }
  });
  if (seriesList.length > 1) {
    seriesList.forEach((s, si) => {
      const ly = area.y + 8 + si * 12;
      const color = SERIES_COLORS[si % SERIES_COLORS.length];
      rect(fig, area.x + area.w - 150, ly - 4, 8, 8, color);
      text(fig, area.x + area.w - 138, ly + 3, s.name, { size: 8 });
    });
  }
  return fig;
}

/** Envelope of |two-time kernel| against time separation, log vertical axis. */
export function spacetimeDecayFigure(curve: { u: number[]; peak: number[] }): Figure {
  return logLinePlot([{ name: "envelope", pts: log10Points(curve.u, curve.peak) }], {
    title: "two-time kernel decay",
    xLabel: "time separation u",
    yLabel: "max |r| over site pairs",
  });
}

/** One convergence trace per scaling regime, log vertical axis. */
export function limitsCurveFigure(series: LimitSeries[]): Figure {
  return logLinePlot(
    series.map((s) => ({ name: s.regime, pts: log10Points(s.rung, s.error) })),
    {
      title: "limit transition convergence",
      xLabel: "ladder rung k",
      yLabel: "sup entry error",
    },
  );
}

/** Mean occupancy of each site at each sampled time across all draws. */
export function trajectoryRasterFigure(grid: OccupancyGrid): Figure {
  const { fig, area } = newPlot(WIDTH, HEIGHT);
  const colors = Array.from({ length: grid.siteCount }, (_, site) =>
    grid.occupancy[site].map((v) => sequentialColor(v)),
  );
  cells(fig, area.x, area.y, area.w, area.h, colors);
  const colLabels = grid.times.map(formatTick);
  const rowLabels = Array.from({ length: grid.siteCount }, (_, i) => String(i));
  heatmapAxes(fig, area, rowLabels, colLabels, {
    title: "mean occupancy per site and time",
    xLabel: "time",
    yLabel: "site index",
  });
  return fig;
}

/** Transfer-operator block at the smallest duration on a log color scale. */
export function cylindricHeatmapFigure(grid: CylindricGrid): Figure {
  const { fig, area } = newPlot(WIDTH, HEIGHT);
  const positives = grid.entries.flat().filter((v) => v > 0);
  const top = positives.length > 0 ? Math.log10(Math.max(...positives)) : 0;
  const span = 12;
  const colors = grid.entries.map((row) =>
    row.map((v) => (v > 0 ? sequentialColor((Math.log10(v) - (top - span)) / span) : sequentialColor(0))),
  );
  cells(fig, area.x, area.y, area.w, area.h, colors);
  const labels = grid.labels.map((s) => (s === "" ? "()" : s));
  heatmapAxes(fig, area, labels, labels, {
    title: `transfer entries at t = ${formatTick(grid.t)}`,
    xLabel: "partition mu",
    yLabel: "partition lambda",
  });
  return fig;
}

/** Full-figure banner shown instead of plots when the run did not succeed. */
export function failureBannerFigure(status: string, failures: string[]): Figure {
  const { fig } = newPlot(WIDTH, 200);
  rect(fig, 0, 0, WIDTH, 200, "#fdf2f2");
  rect(fig, 0, 0, WIDTH, 6, "#b2182b");
  text(fig, WIDTH / 2, 60, "report not rendered", { anchor: "middle", size: 13, fill: "#b2182b" });
  text(fig, WIDTH / 2, 90, `run status: ${status}`, { anchor: "middle", size: 11 });
  failures.slice(0, 3).forEach((f, i) => {
    const line = f.length > 64 ? `${f.slice(0, 61)}...` : f;
    text(fig, WIDTH / 2, 115 + i * 16, line, { anchor: "middle", size: 9, fill: "#555555" });
  });
  return fig;
}
