// Corner-pin math: the same 4-point direct linear transform the calibration
// service uses. Each correspondence contributes two rows of the 8x8 system
// (h33 pinned to 1), solved by Gauss-Jordan elimination with partial
// pivoting. Shared golden vectors keep both solvers in lockstep.

import { Point, Quad } from "./quad.js";

export type Mat3 = number[][]; // row-major 3x3 with m[2][2] === 1

const SING_EPS = 1e-12;
const CORNER_TOL = 1e-9;

function solveLinear(a: number[][], b: number[]): number[] {
  const n = b.length;
  const m = a.map((row, i) => [...row, b[i]]);
  for (let col = 0; col < n; col++) {
    let pivot = col;
    for (let r = col + 1; r < n; r++) {
      if (Math.abs(m[r][col]) > Math.abs(m[pivot][col])) pivot = r;
    }
    if (Math.abs(m[pivot][col]) <= SING_EPS) {
      throw new Error("singular corner-pin system");
    }
    [m[col], m[pivot]] = [m[pivot], m[col]];
    for (let r = 0; r < n; r++) {
      if (r === col) continue;
      const factor = m[r][col] / m[col][col];
      if (factor === 0) continue;
      for (let c = col; c <= n; c++) m[r][c] -= factor * m[col][c];
    }
  }
  return m.map((row, i) => row[n] / row[i]);
}

export function solveHomography(source: Quad, target: Quad): Mat3 {
  const a: number[][] = [];
  const b: number[] = [];
  for (let i = 0; i < 4; i++) {
    const [x, y] = source[i];
    const [u, v] = target[i];
    a.push([x, y, 1, 0, 0, 0, -u * x, -u * y]);
    b.push(u);
    a.push([0, 0, 0, x, y, 1, -v * x, -v * y]);
    b.push(v);
  }
  const h = solveLinear(a, b);
  const m: Mat3 = [
    [h[0], h[1], h[2]],
    [h[3], h[4], h[5]],
    [h[6], h[7], 1],
  ];
  const err = Math.max(
    ...source.map((s, i) => distance(applyHomography(m, s), target[i])),
  );
  if (!(err < CORNER_TOL)) {
    throw new Error(`near-singular quad pair (corner error ${err})`);
  }
  return m;
}

export function applyHomography(m: Mat3, p: Point): Point {
  const [x, y] = p;
  const w = m[2][0] * x + m[2][1] * y + m[2][2];
  if (Math.abs(w) <= SING_EPS) throw new Error("point maps to infinity");
  return [
    (m[0][0] * x + m[0][1] * y + m[0][2]) / w,
    (m[1][0] * x + m[1][1] * y + m[1][2]) / w,
  ];
}

export function distance(a: Point, b: Point): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}

/**
 * Embed a 3x3 plane transform into the column-major 4x4 CSS expects,
 * with the z row and column left as identity.
 */
export function toCssMatrix3d(m: Mat3): string {
  const [[a, b, c], [d, e, f], [g, h, i]] = m;
  const v = [a, d, 0, g, b, e, 0, h, 0, 0, 1, 0, c, f, 0, i];
  return `matrix3d(${v.join(",")})`;
}

/**
 * CSS transform warping a w x h pixel tile onto a quad given in pixel
 * coordinates of the same container; apply with transform-origin 0 0.
 */
export function tileTransform(w: number, h: number, quadPx: Quad): string {
  const source: Quad = [
    [0, 0],
    [w, 0],
    [w, h],
    [0, h],
  ];
  return toCssMatrix3d(solveHomography(source, quadPx));
}

/** Scale a quad in normalized [0,1]^2 coordinates to pixels. */
export function quadToPixels(quad: Quad, width: number, height: number): Quad {
  return quad.map(([x, y]) => [x * width, y * height] as Point) as Quad;
}
