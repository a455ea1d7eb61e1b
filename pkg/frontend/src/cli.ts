#!/usr/bin/env node
/**
 * Report figure renderer.
 *
 * Usage: render --report <dir> --plots kernel_heatmap,spacetime_decay --format png [--dpi 96]
 *
 * Exit codes: 0 render complete (or nothing requested); 2 bad arguments;
 * 3 a report file is missing or fails schema validation (message names the
 * file and column).
 */
import { SchemaError } from "./csv.js";
import { PLOT_NAMES, render, type PlotName, type PlotSpec } from "./render.js";

function usage(msg: string): never {
  process.stderr.write(`error: ${msg}\n`);
  process.stderr.write("usage: render --report <dir> --plots a,b,c --format png|svg [--dpi N]\n");
  process.stderr.write(`plots: ${PLOT_NAMES.join(", ")}\n`);
  process.exit(2);
}

export function parseArgs(argv: string[]): PlotSpec {
  let reportDir: string | undefined;
  let plotsRaw: string | undefined;
  let format = "png";
  let dpi = 96;
  for (let i = 0; i < argv.length; i += 1) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--report":
        if (value === undefined) usage("--report needs a directory");
        reportDir = value;
        i += 1;
        break;
      case "--plots":
        if (value === undefined) usage("--plots needs a list");
        plotsRaw = value;
        i += 1;
        break;
      case "--format":
        if (value === undefined) usage("--format needs png or svg");
        format = value;
        i += 1;
        break;
      case "--dpi":
        if (value === undefined || !(Number(value) > 0)) usage("--dpi needs a positive number");
        dpi = Number(value);
        i += 1;
        break;
      default:
        usage(`unknown argument ${flag}`);
    }
  }
  if (reportDir === undefined) usage("--report is required");
  if (format !== "png" && format !== "svg") usage(`format ${format} is not png or svg`);
  const plots: PlotName[] = [];
  for (const part of (plotsRaw ?? "").split(",")) {
    const name = part.trim();
    if (name === "") continue;
    if (!(PLOT_NAMES as readonly string[]).includes(name)) usage(`unknown plot ${name}`);
    plots.push(name as PlotName);
  }
  return { reportDir, plots, format, dpi };
}

export function main(argv: string[]): number {
  const spec = parseArgs(argv);
  try {
    for (const path of render(spec)) {
      process.stdout.write(`${path}\n`);
    }
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 3;
    }
    throw err;
  }
  return 0;
}

