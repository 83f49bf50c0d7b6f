// Quad validity rules shared with the calibration service: no collinear
// corner triple, no crossing edges. Corner order is TL, TR, BR, BL.

export type Point = [number, number];
export type Quad = [Point, Point, Point, Point];

export const GEOM_EPS = 1e-9;

function orient(a: Point, b: Point, c: Point): number {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

function segmentsCross(a: Point, b: Point, c: Point, d: Point): boolean {
  return (
    orient(a, b, c) * orient(a, b, d) < 0 && orient(c, d, a) * orient(c, d, b) < 0
  );
}

/** Why these corners do not form a usable quad, or null if they do. */
export function quadDefect(corners: Quad): string | null {
  for (const [x, y] of corners) {
    if (!Number.isFinite(x) || !Number.isFinite(y)) {
      return "corner coordinates must be finite";
    }
  }
  for (let i = 0; i < 4; i++) {
    for (let j = i + 1; j < 4; j++) {
      for (let k = j + 1; k < 4; k++) {
        const area = Math.abs(orient(corners[i], corners[j], corners[k])) / 2;
        if (area <= GEOM_EPS) return `corners ${i},${j},${k} are collinear`;
      }
    }
  }
  const e = (i: number): [Point, Point] => [corners[i], corners[(i + 1) % 4]];
  if (segmentsCross(...e(0), ...e(2)) || segmentsCross(...e(1), ...e(3))) {
    return "edges cross (self-intersecting quad)";
  }
  return null;
}

export function unitSquare(): Quad {
  return [
    [0, 0],
    [1, 0],
    [1, 1],
    [0, 1],
  ];
}

export function asQuad(raw: number[][]): Quad {
  if (raw.length !== 4 || raw.some((p) => p.length !== 2)) {
    throw new Error("a quad has exactly 4 [x, y] corners");
  }
  return raw.map(([x, y]) => [x, y] as Point) as Quad;
}
