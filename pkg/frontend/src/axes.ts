import { makeFigure, polyline, rect, text, type Figure } from "./scene.js";

export interface Area {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  return fn;
}

/** Round tick positions covering [lo, hi] with a 1-2-5 step. */
export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / Math.max(1, count);
  const mag = 10 ** Math.floor(Math.log10(raw));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(0).replace("e+", "e").toLowerCase();
  }
  const s = v.toPrecision(4);
  return s.includes(".") ? s.replace(/0+$/, "").replace(/\.$/, "") : s;
}

export interface AxesSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xTicks: { v: number; label: string }[];
  yTicks: { v: number; label: string }[];
}

export const MARGIN = { left: 62, right: 16, top: 28, bottom: 46 };

export function newPlot(width: number, height: number): { fig: Figure; area: Area } {
  const fig = makeFigure(width, height);
  return {
    fig,
    area: {
      x: MARGIN.left,
      y: MARGIN.top,
      w: width - MARGIN.left - MARGIN.right,
      h: height - MARGIN.top - MARGIN.bottom,
    },
  };
}

/** Frame, tick marks, tick labels, axis titles around a plot area. */
export function drawAxes(fig: Figure, area: Area, xs: Scale, ys: Scale, spec: AxesSpec): void {
  const axisColor = "#333333";
  polyline(
    fig,
    [
      [area.x, area.y],
      [area.x, area.y + area.h],
      [area.x + area.w, area.y + area.h],
    ],
    axisColor,
    1,
  );
  for (const tk of spec.xTicks) {
    const px = xs(tk.v);
    if (px < area.x - 0.5 || px > area.x + area.w + 0.5) continue;
    polyline(fig, [[px, area.y + area.h], [px, area.y + area.h + 4]], axisColor, 1);
    text(fig, px, area.y + area.h + 15, tk.label, { anchor: "middle", size: 9 });
  }
  for (const tk of spec.yTicks) {
    const py = ys(tk.v);
    if (py < area.y - 0.5 || py > area.y + area.h + 0.5) continue;
    polyline(fig, [[area.x - 4, py], [area.x, py]], axisColor, 1);
    text(fig, area.x - 7, py + 3, tk.label, { anchor: "end", size: 9 });
  }
  text(fig, area.x + area.w / 2, fig.height - 10, spec.xLabel, { anchor: "middle", size: 10 });
  text(fig, 14, area.y + area.h / 2, spec.yLabel, { anchor: "middle", size: 10, rotate: 90 });
  text(fig, area.x + area.w / 2, 16, spec.title, { anchor: "middle", size: 11 });
}

function lerpChannel(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

function hex(rgb: [number, number, number]): string {
  return `#${rgb.map((c) => c.toString(16).padStart(2, "0")).join("")}`;
}

function mix(a: [number, number, number], b: [number, number, number], t: number): string {
  return hex([lerpChannel(a[0], b[0], t), lerpChannel(a[1], b[1], t), lerpChannel(a[2], b[2], t)]);
}

const BLUE: [number, number, number] = [33, 102, 172];
const WHITE: [number, number, number] = [255, 255, 255];
const RED: [number, number, number] = [178, 24, 43];
const DEEP: [number, number, number] = [8, 48, 107];

/** Signed value in [-1, 1] to a blue-white-red ramp. */
export function divergingColor(t: number): string {
  const c = Math.max(-1, Math.min(1, t));
  return c < 0 ? mix(WHITE, BLUE, -c) : mix(WHITE, RED, c);
}

/** Value in [0, 1] to a white-to-deep-blue ramp. */
export function sequentialColor(t: number): string {
  return mix(WHITE, DEEP, Math.max(0, Math.min(1, t)));
}

export const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];
