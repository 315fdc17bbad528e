// Minimal binary-little-endian PLY reader for the preview derivatives the
// service produces: extracts vertex x/y/z, skipping other scalar properties.

const SCALAR_SIZES: Record<string, number> = {
  int8: 1, uint8: 1, int16: 2, uint16: 2, int32: 4, uint32: 4,
  float32: 4, float64: 8,
  char: 1, uchar: 1, short: 2, ushort: 2, int: 4, uint: 4,
  float: 4, double: 8,
};

interface VertexLayout {
  stride: number;
  count: number;
  dataOffset: number;
  x: { offset: number; size: number } | null;
  y: { offset: number; size: number } | null;
  z: { offset: number; size: number } | null;
}

export class PlyPreviewError extends Error {}

const parseHeader = (bytes: Uint8Array): VertexLayout => {
  const terminator = "end_header\n";
  const headText = new TextDecoder("ascii", { fatal: false })
    .decode(bytes.subarray(0, Math.min(bytes.length, 65536)));
  const end = headText.indexOf(terminator);
  if (end < 0) throw new PlyPreviewError("no end_header in preview file");
  const lines = headText.slice(0, end).split("\n").map((l) => l.trim());
  if (lines[0] !== "ply") throw new PlyPreviewError("not a PLY file");
  if (!lines.some((l) => l === "format binary_little_endian 1.0")) {
    throw new PlyPreviewError("preview must be binary little endian");
  }

  let inVertex = false;
  let seenVertex = false;
  let count = 0;
  let stride = 0;
  const fields: Record<string, { offset: number; size: number }> = {};
  for (const line of lines) {
    const parts = line.split(/\s+/);
    if (parts[0] === "element") {
      inVertex = parts[1] === "vertex";
      if (inVertex) {
        seenVertex = true;
        count = Number(parts[2]);
      } else if (seenVertex) {
        break; // only elements before any later one matter; vertex is first by convention
      }
    } else if (parts[0] === "property" && inVertex) {
      if (parts[1] === "list") throw new PlyPreviewError("list property in vertex element");
      const size = SCALAR_SIZES[parts[1]];
      if (!size) throw new PlyPreviewError(`unknown property type ${parts[1]}`);
      const isFloat = parts[1].startsWith("float") || parts[1] === "double";
      if (isFloat && (parts[2] === "x" || parts[2] === "y" || parts[2] === "z")) {
        fields[parts[2]] = { offset: stride, size };
      }
      stride += size;
    }
  }
  if (!seenVertex) throw new PlyPreviewError("no vertex element");
  if (!fields.x || !fields.y || !fields.z) throw new PlyPreviewError("vertex has no float x/y/z");
  return {
    stride,
    count,
    dataOffset: end + terminator.length,
    x: fields.x,
    y: fields.y,
    z: fields.z,
  };
};

export const parsePreviewPoints = (buffer: ArrayBuffer, budget = 100000): Float32Array => {
  const bytes = new Uint8Array(buffer);
  const layout = parseHeader(bytes);
  const view = new DataView(buffer);
  const available = Math.floor((buffer.byteLength - layout.dataOffset) / layout.stride);
  const n = Math.min(layout.count, available, budget);
  const out = new Float32Array(n * 3);
  const read = (slot: { offset: number; size: number }, row: number): number => {
    const at = layout.dataOffset + row * layout.stride + slot.offset;
    return slot.size === 8 ? view.getFloat64(at, true) : view.getFloat32(at, true);
  };
  for (let i = 0; i < n; i += 1) {
    out[i * 3] = read(layout.x!, i);
    out[i * 3 + 1] = read(layout.y!, i);
    out[i * 3 + 2] = read(layout.z!, i);
  }
  return out;
};
