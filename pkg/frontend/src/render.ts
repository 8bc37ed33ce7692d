/** Canvas drawing: problem marks, server rasters, and the drag preview. */

import { domainToCanvas, Viewport } from "./mapping.js";
import type { Placement, Problem } from "./types.js";

export const SUPPORT_COLOR = "#222";
export const LOAD_COLOR = "#b22222";
export const PREVIEW_COLOR = "rgba(31, 119, 180, 0.55)";

/** Endpoints of the support band in domain coordinates. */
export function supportSegment(problem: Problem): {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
} {
  const lo = problem.support_start;
  const hi = problem.support_start + problem.support_length;
  switch (problem.support_boundary) {
    case "left":
      return { x1: 0, y1: lo * problem.height, x2: 0, y2: hi * problem.height };
    case "right":
      return {
        x1: problem.width,
        y1: lo * problem.height,
        x2: problem.width,
        y2: hi * problem.height,
      };
    case "bottom":
      return { x1: lo * problem.width, y1: 0, x2: hi * problem.width, y2: 0 };
    case "top":
      return {
        x1: lo * problem.width,
        y1: problem.height,
        x2: hi * problem.width,
        y2: problem.height,
      };
  }
}

/** Load application point in domain coordinates. */
export function loadPoint(problem: Problem): { x: number; y: number } {
  const f = problem.load_position;
  switch (problem.load_boundary) {
    case "left":
      return { x: 0, y: f * problem.height };
    case "right":
      return { x: problem.width, y: f * problem.height };
    case "bottom":
      return { x: f * problem.width, y: 0 };
    case "top":
      return { x: f * problem.width, y: problem.height };
  }
}

export function drawProblem(
  ctx: CanvasRenderingContext2D,
  vp: Viewport,
  problem: Problem,
): void {
  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1;
  ctx.strokeRect(vp.offsetX, vp.offsetY, vp.pixelWidth, vp.pixelHeight);

  const seg = supportSegment(problem);
  const a = domainToCanvas(vp, seg.x1, seg.y1);
  const b = domainToCanvas(vp, seg.x2, seg.y2);
  ctx.strokeStyle = SUPPORT_COLOR;
  ctx.lineWidth = 5;
  ctx.beginPath();
  ctx.moveTo(a.x, a.y);
  ctx.lineTo(b.x, b.y);
  ctx.stroke();

  const load = loadPoint(problem);
  const tip = domainToCanvas(vp, load.x, load.y);
  // arrow shaft pointing along the load direction (canvas y is flipped)
  const rad = (problem.load_angle_deg * Math.PI) / 180;
  const dx = Math.cos(rad);
  const dy = -Math.sin(rad);
  const len = 22;
  ctx.strokeStyle = LOAD_COLOR;
  ctx.fillStyle = LOAD_COLOR;
  ctx.lineWidth = 2.5;
  ctx.beginPath();
  ctx.moveTo(tip.x - len * dx, tip.y - len * dy);
  ctx.lineTo(tip.x, tip.y);
  ctx.stroke();
  ctx.beginPath();
  ctx.arc(tip.x, tip.y, 3.5, 0, 2 * Math.PI);
  ctx.fill();
}

/** Paint a 3x64x64 raster (row-major, RGB planes) into the canvas. */
export function drawRaster(
  ctx: CanvasRenderingContext2D,
  raster: number[][][],
  canvasSize: number,
): void {
  const size = raster[0].length;
  const image = ctx.createImageData(size, size);
  for (let r = 0; r < size; r++) {
    for (let c = 0; c < size; c++) {
      const i = 4 * (r * size + c);
      image.data[i] = raster[0][r][c];
      image.data[i + 1] = raster[1][r][c];
      image.data[i + 2] = raster[2][r][c];
      image.data[i + 3] = 255;
    }
  }
  ctx.imageSmoothingEnabled = false;
  ctx.putImageData(image, 0, 0);
  ctx.drawImage(ctx.canvas, 0, 0, size, size, 0, 0, canvasSize, canvasSize);
}

/** Outline of the bar being dragged, before it is committed. */
export function drawPreview(
  ctx: CanvasRenderingContext2D,
  vp: Viewport,
  placement: Placement,
): void {
  const a = domainToCanvas(vp, placement.xa, placement.ya);
  const b = domainToCanvas(vp, placement.xb, placement.yb);
  const width = Math.max(2, ((placement.ta + placement.tb) / 2) * 2 * vp.scale);
  ctx.strokeStyle = PREVIEW_COLOR;
  ctx.lineWidth = width;
  ctx.lineCap = "round";
  ctx.beginPath();
  ctx.moveTo(a.x, a.y);
  ctx.lineTo(b.x, b.y);
  ctx.stroke();
}
