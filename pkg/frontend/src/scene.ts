/**
 * Minimal retained scene for figures.
 *
 * Plot builders emit elements in abstract figure units; the SVG writer keeps
 * those units while the raster writer multiplies by dpi / 96.  Keeping one
 * shared description guarantees the two formats show identical content.
 */

export type Anchor = "start" | "middle" | "end";

export interface RectEl {
  kind: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string;
}

export interface LineEl {
  kind: "line";
  points: [number, number][];
  stroke: string;
  width: number;
}

export interface TextEl {
  kind: "text";
  x: number;
  y: number;
  text: string;
  size: number;
  fill: string;
  anchor: Anchor;
  /** Degrees counterclockwise about (x, y); only 0 and 90 are used. */
  rotate: number;
}

/** Dense cell grid, colors[row][col], row 0 at the top edge. */
export interface CellsEl {
  kind: "cells";
  x: number;
  y: number;
  w: number;
  h: number;
  colors: string[][];
}

export type Element = RectEl | LineEl | TextEl | CellsEl;

export interface Figure {
  width: number;
  height: number;
  background: string;
  elements: Element[];
}

export function makeFigure(width: number, height: number): Figure {
  return { width, height, background: "#ffffff", elements: [] };
}

export function rect(fig: Figure, x: number, y: number, w: number, h: number, fill: string): void {
  fig.elements.push({ kind: "rect", x, y, w, h, fill });
}

export function polyline(fig: Figure, points: [number, number][], stroke: string, width = 1.5): void {
  fig.elements.push({ kind: "line", points, stroke, width });
}

export function text(
  fig: Figure,
  x: number,
  y: number,
  s: string,
  opts: Partial<Omit<TextEl, "kind" | "x" | "y" | "text">> = {},
): void {
  fig.elements.push({
    kind: "text",
    x,
    y,
    text: s,
    size: opts.size ?? 10,
    fill: opts.fill ?? "#222222",
    anchor: opts.anchor ?? "start",
    rotate: opts.rotate ?? 0,
  });
}

export function cells(fig: Figure, x: number, y: number, w: number, h: number, colors: string[][]): void {
  fig.elements.push({ kind: "cells", x, y, w, h, colors });
}
