import { readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { readTable, SchemaError } from "./csv.js";
import { cylindricGrid, decayCurve, kernelGrid, limitsSeries, occupancyGrid } from "./model.js";
import {
  cylindricHeatmapFigure,
  failureBannerFigure,
  kernelHeatmapFigure,
  limitsCurveFigure,
  spacetimeDecayFigure,
  trajectoryRasterFigure,
} from "./plots.js";
import { figureToPng } from "./raster.js";
import type { Figure } from "./scene.js";
import { figureToSvg } from "./svg.js";

export const PLOT_NAMES = [
  "kernel_heatmap",
  "spacetime_decay",
  "limits_curve",
  "trajectory_raster",
  "cylindric_heatmap",
] as const;

export type PlotName = (typeof PLOT_NAMES)[number];

export interface PlotSpec {
  reportDir: string;
  plots: PlotName[];
  format: "png" | "svg";
  dpi: number;
}

interface Manifest {
  status: string;
  failures: string[];
}

function readManifest(dir: string): Manifest {
  const path = join(dir, "manifest.json");
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch {
    throw new SchemaError(path, "status", "manifest.json is missing or unreadable");
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    throw new SchemaError(path, "status", "manifest.json is not valid json");
  }
  const obj = parsed as { status?: unknown; failures?: unknown };
  if (typeof obj.status !== "string") {
    throw new SchemaError(path, "status", "manifest has no status string");
  }
  const failures = Array.isArray(obj.failures) ? obj.failures.map(String) : [];
  return { status: obj.status, failures };
}

const SCHEMAS: Record<PlotName, { file: string; header: string[] }> = {
  kernel_heatmap: { file: "kernel.csv", header: ["x", "y", "value"] },
  spacetime_decay: { file: "spacetime.csv", header: ["x", "t", "y", "s", "value"] },
  limits_curve: { file: "limits.csv", header: ["regime", "ladder_k", "scale_param", "sup_entry_error"] },
  trajectory_raster: { file: "trajectory.csv", header: ["draw_id", "step", "time", "bitstring"] },
  cylindric_heatmap: { file: "cylindric.csv", header: ["lambda", "mu", "t", "entry"] },
};

function buildFigure(name: PlotName, dir: string): Figure {
  const { file, header } = SCHEMAS[name];
  const path = join(dir, file);
  const table = readTable(path, header);
  switch (name) {
    case "kernel_heatmap":
      return kernelHeatmapFigure(kernelGrid(table, path));
    case "spacetime_decay":
      return spacetimeDecayFigure(decayCurve(table, path));
    case "limits_curve":
      return limitsCurveFigure(limitsSeries(table, path));
    case "trajectory_raster":
      return trajectoryRasterFigure(occupancyGrid(table, path));
    case "cylindric_heatmap":
      return cylindricHeatmapFigure(cylindricGrid(table, path));
  }
}

function writeFigure(fig: Figure, path: string, format: "png" | "svg", dpi: number): void {
  if (format === "svg") writeFileSync(path, figureToSvg(fig));
  else writeFileSync(path, figureToPng(fig, dpi));
}

/**
 * Render the requested plots from a report directory.
 *
 * Returns the written image paths.  A report whose manifest records anything
 * but success yields a single failure banner; an empty plot list writes
 * nothing.  Input CSVs are only ever opened for reading.
 */
export function render(spec: PlotSpec): string[] {
  if (spec.plots.length === 0) return [];
  const manifest = readManifest(spec.reportDir);
  if (manifest.status !== "success") {
    const path = join(spec.reportDir, `failure.${spec.format}`);
    writeFigure(failureBannerFigure(manifest.status, manifest.failures), path, spec.format, spec.dpi);
    return [path];
  }
  const written: string[] = [];
  for (const name of spec.plots) {
    const fig = buildFigure(name, spec.reportDir);
    const path = join(spec.reportDir, `${name}.${spec.format}`);
    writeFigure(fig, path, spec.format, spec.dpi);
    written.push(path);
  }
  return written;
}
