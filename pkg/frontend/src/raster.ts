import { PNG } from "pngjs";
import { glyphColumns, GLYPH_W } from "./font.js";
import type { Figure, TextEl } from "./scene.js";

function parseColor(hex: string): [number, number, number] {
  const v = parseInt(hex.slice(1), 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

class Canvas {
  readonly width: number;
  readonly height: number;
  readonly data: Buffer;

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
    this.data = Buffer.alloc(width * height * 4, 0xff);
  }

  set(x: number, y: number, rgb: [number, number, number]): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const o = (y * this.width + x) * 4;
    this.data[o] = rgb[0];
    this.data[o + 1] = rgb[1];
    this.data[o + 2] = rgb[2];
    this.data[o + 3] = 0xff;
  }

  fill(x0: number, y0: number, x1: number, y1: number, rgb: [number, number, number]): void {
    const xa = Math.max(0, Math.min(x0, x1));
    const xb = Math.min(this.width, Math.max(x0, x1));
    const ya = Math.max(0, Math.min(y0, y1));
    const yb = Math.min(this.height, Math.max(y0, y1));
    for (let y = ya; y < yb; y += 1) {
      for (let x = xa; x < xb; x += 1) this.set(x, y, rgb);
    }
  }
}

function strokeSegment(cv: Canvas, x0: number, y0: number, x1: number, y1: number, half: number, rgb: [number, number, number]): void {
  const steps = Math.max(1, Math.ceil(Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0))));
  for (let i = 0; i <= steps; i += 1) {
    const x = x0 + ((x1 - x0) * i) / steps;
    const y = y0 + ((y1 - y0) * i) / steps;
    cv.fill(Math.round(x - half), Math.round(y - half), Math.round(x + half) + 1, Math.round(y + half) + 1, rgb);
  }
}

function drawText(cv: Canvas, el: TextEl, scale: number): void {
  const s = Math.max(1, Math.round((el.size * scale) / 10));
  const rgb = parseColor(el.fill);
  const width = el.text.length * GLYPH_W * s;
  let offset = 0;
  if (el.anchor === "middle") offset = -width / 2;
  else if (el.anchor === "end") offset = -width;
  const bx = el.x * scale;
  const by = el.y * scale;
  for (let ci = 0; ci < el.text.length; ci += 1) {
    const cols = glyphColumns(el.text[ci]);
    for (let cc = 0; cc < 5; cc += 1) {
      const bits = cols[cc];
      for (let rr = 0; rr < 7; rr += 1) {
        if (((bits >> rr) & 1) === 0) continue;
        const dx = offset + (ci * GLYPH_W + cc) * s;
        const dy = (rr - 7) * s;
        for (let py = 0; py < s; py += 1) {
          for (let px = 0; px < s; px += 1) {
            if (el.rotate === 90) {
              cv.set(Math.round(bx + dy + py), Math.round(by - dx - px), rgb);
            } else {
              cv.set(Math.round(bx + dx + px), Math.round(by + dy + py), rgb);
            }
          }
        }
      }
    }
  }
}

/** Rasterize a figure at dpi (96 keeps figure units as pixels) and encode a PNG. */
export function figureToPng(fig: Figure, dpi: number): Buffer {
  const scale = dpi / 96;
  const cv = new Canvas(Math.max(1, Math.round(fig.width * scale)), Math.max(1, Math.round(fig.height * scale)));
  cv.fill(0, 0, cv.width, cv.height, parseColor(fig.background));
  for (const el of fig.elements) {
    switch (el.kind) {
      case "rect":
        cv.fill(
          Math.round(el.x * scale),
          Math.round(el.y * scale),
          Math.round((el.x + el.w) * scale),
          Math.round((el.y + el.h) * scale),
          parseColor(el.fill),
        );
        break;
      case "cells": {
        const rows = el.colors.length;
        const colsN = rows > 0 ? el.colors[0].length : 0;
        for (let r = 0; r < rows; r += 1) {
          const y0 = Math.round((el.y + (r * el.h) / rows) * scale);
          const y1 = Math.round((el.y + ((r + 1) * el.h) / rows) * scale);
          for (let c = 0; c < colsN; c += 1) {
            const x0 = Math.round((el.x + (c * el.w) / colsN) * scale);
            const x1 = Math.round((el.x + ((c + 1) * el.w) / colsN) * scale);
            cv.fill(x0, y0, x1, y1, parseColor(el.colors[r][c]));
          }
        }
        break;
      }
      case "line": {
        const rgb = parseColor(el.stroke);
        const half = Math.max(0.5, (el.width * scale) / 2) - 0.5;
        for (let i = 0; i + 1 < el.points.length; i += 1) {
          strokeSegment(
            cv,
            el.points[i][0] * scale,
            el.points[i][1] * scale,
            el.points[i + 1][0] * scale,
            el.points[i + 1][1] * scale,
            half,
            rgb,
          );
        }
        break;
      }
      case "text":
        drawText(cv, el, scale);
        break;
    }
  }
  const png = new PNG({ width: cv.width, height: cv.height });
  cv.data.copy(png.data);
  return PNG.sync.write(png);
}
