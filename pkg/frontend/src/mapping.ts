/**
 * Coordinate mapping between the canvas, the design domain, and the
 * normalized action space the server expects.
 *
 * Actions are 6 numbers in [-1, 1]: (xa, ya, xb, yb, ta, tb). The linear
 * scaling mirrors the server: coordinates span the domain, thicknesses span
 * [0.01, 0.05 * min(width, height)].
 */

import type { Placement, Problem } from "./types.js";

export const THICKNESS_MIN = 0.01;
export const THICKNESS_MAX_FRACTION = 0.05;

export interface Viewport {
  scale: number; // canvas pixels per domain unit
  offsetX: number;
  offsetY: number;
  pixelWidth: number;
  pixelHeight: number;
}

/** Letterbox the domain into a square canvas, preserving aspect ratio. */
export function viewport(problem: Problem, canvasSize: number): Viewport {
  const scale = canvasSize / Math.max(problem.width, problem.height);
  const pixelWidth = Math.round(problem.width * scale);
  const pixelHeight = Math.round(problem.height * scale);
  return {
    scale,
    offsetX: Math.floor((canvasSize - pixelWidth) / 2),
    offsetY: Math.floor((canvasSize - pixelHeight) / 2),
    pixelWidth,
    pixelHeight,
  };
}

/** Canvas pixel to domain coordinates (canvas y grows downward). */
export function canvasToDomain(
  vp: Viewport,
  problem: Problem,
  px: number,
  py: number,
): { x: number; y: number } {
  const x = (px - vp.offsetX) / vp.scale;
  const y = (vp.pixelHeight - (py - vp.offsetY)) / vp.scale;
  return {
    x: Math.min(Math.max(x, 0), problem.width),
    y: Math.min(Math.max(y, 0), problem.height),
  };
}

/** Domain coordinates to canvas pixels. */
export function domainToCanvas(
  vp: Viewport,
  px: number,
  py: number,
): { x: number; y: number } {
  return {
    x: vp.offsetX + px * vp.scale,
    y: vp.offsetY + vp.pixelHeight - py * vp.scale,
  };
}

export function thicknessBounds(problem: Problem): { lo: number; hi: number } {
  return {
    lo: THICKNESS_MIN,
    hi: THICKNESS_MAX_FRACTION * Math.min(problem.width, problem.height),
  };
}

function toUnit(value: number, lo: number, hi: number): number {
  const a = (2 * (value - lo)) / (hi - lo) - 1;
  return Math.min(Math.max(a, -1), 1);
}

function fromUnit(a: number, lo: number, hi: number): number {
  return lo + ((Math.min(Math.max(a, -1), 1) + 1) / 2) * (hi - lo);
}

/** Placement in domain units -> normalized action vector. */
export function placementToAction(p: Placement, problem: Problem): number[] {
  const t = thicknessBounds(problem);
  return [
    toUnit(p.xa, 0, problem.width),
    toUnit(p.ya, 0, problem.height),
    toUnit(p.xb, 0, problem.width),
    toUnit(p.yb, 0, problem.height),
    toUnit(p.ta, t.lo, t.hi),
    toUnit(p.tb, t.lo, t.hi),
  ];
}

/** Normalized action -> the bar geometry the server will build (mirror of the server's scaling). */
export function actionToPlacement(action: number[], problem: Problem): Placement {
  if (action.length !== 6) {
    throw new Error(`action must have 6 entries, got ${action.length}`);
  }
  const t = thicknessBounds(problem);
  return {
    xa: fromUnit(action[0], 0, problem.width),
    ya: fromUnit(action[1], 0, problem.height),
    xb: fromUnit(action[2], 0, problem.width),
    yb: fromUnit(action[3], 0, problem.height),
    ta: fromUnit(action[4], t.lo, t.hi),
    tb: fromUnit(action[5], t.lo, t.hi),
  };
}
