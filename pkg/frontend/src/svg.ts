import type { Element, Figure } from "./scene.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmt(v: number): string {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

function emit(el: Element): string {
  switch (el.kind) {
    case "rect":
      return `<rect x="${fmt(el.x)}" y="${fmt(el.y)}" width="${fmt(el.w)}" height="${fmt(el.h)}" fill="${el.fill}"/>`;
    case "line": {
      const pts = el.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
      return `<polyline points="${pts}" fill="none" stroke="${el.stroke}" stroke-width="${fmt(el.width)}"/>`;
    }
    case "text": {
      const transform = el.rotate !== 0 ? ` transform="rotate(${fmt(-el.rotate)} ${fmt(el.x)} ${fmt(el.y)})"` : "";
      const anchor = el.anchor === "start" ? "" : ` text-anchor="${el.anchor}"`;
      return (
        `<text x="${fmt(el.x)}" y="${fmt(el.y)}" font-family="monospace" font-size="${fmt(el.size)}"` +
        ` fill="${el.fill}"${anchor}${transform}>${esc(el.text)}</text>`
      );
    }
    case "cells": {
      const rows = el.colors.length;
      const cols = rows > 0 ? el.colors[0].length : 0;
      if (rows === 0 || cols === 0) return "";
      const cw = el.w / cols;
      const ch = el.h / rows;
      const parts: string[] = [];
      for (let r = 0; r < rows; r += 1) {
        for (let c = 0; c < cols; c += 1) {
          // Pad each cell slightly so adjacent rects cannot open hairline seams.
          parts.push(
            `<rect x="${fmt(el.x + c * cw)}" y="${fmt(el.y + r * ch)}" width="${fmt(cw + 0.5)}" height="${fmt(ch + 0.5)}" fill="${el.colors[r][c]}"/>`,
          );
        }
      }
      return parts.join("");
    }
  }
}

export function figureToSvg(fig: Figure): string {
  const body = fig.elements.map(emit).join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${fig.width}" height="${fig.height}"` +
    ` viewBox="0 0 ${fig.width} ${fig.height}">\n` +
    `<rect x="0" y="0" width="${fig.width}" height="${fig.height}" fill="${fig.background}"/>\n` +
    `${body}\n</svg>\n`
  );
}
