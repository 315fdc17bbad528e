// Project a point cloud onto canvas coordinates: fixed isometric-style
// rotation, bounds-normalized, hard point budget.

export interface ProjectedPoint {
  x: number;
  y: number;
  depth: number;
}

const COS = Math.cos(Math.PI / 6);
const SIN = Math.sin(Math.PI / 6);

export const projectPoints = (
  points: Float32Array,
  width: number,
  height: number,
  budget = 20000,
): ProjectedPoint[] => {
  const total = Math.floor(points.length / 3);
  const n = Math.min(total, budget);
  if (n === 0) return [];

  const sx = new Float64Array(n);
  const sy = new Float64Array(n);
  const sz = new Float64Array(n);
  for (let i = 0; i < n; i += 1) {
    const x = points[i * 3];
    const y = points[i * 3 + 1];
    const z = points[i * 3 + 2];
    // rotate around the vertical axis, then tilt toward the viewer
    const rx = x * COS + y * SIN;
    const ry = -x * SIN + y * COS;
    sx[i] = rx;
    sy[i] = z * COS - ry * SIN;
    sz[i] = ry;
  }

  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (let i = 0; i < n; i += 1) {
    if (sx[i] < minX) minX = sx[i];
    if (sx[i] > maxX) maxX = sx[i];
    if (sy[i] < minY) minY = sy[i];
    if (sy[i] > maxY) maxY = sy[i];
  }
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const scale = 0.9 * Math.min(width / spanX, height / spanY);
  const offsetX = (width - spanX * scale) / 2;
  const offsetY = (height - spanY * scale) / 2;

  const out: ProjectedPoint[] = new Array(n);
  for (let i = 0; i < n; i += 1) {
    out[i] = {
      x: offsetX + (sx[i] - minX) * scale,
      y: height - (offsetY + (sy[i] - minY) * scale),
      depth: sz[i],
    };
  }
  return out;
};
