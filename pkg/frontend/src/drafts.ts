// Draft documents are plain JSON shaped by the server's schema descriptor;
// these helpers create and edit them by dotted path, mirroring the paths
// used in validation reports.

import type { DepositJson, FieldDef, ObjectJson, SchemaDescriptor } from "./types.js";

const LIST_KINDS = new Set(["agent-list", "vocab-list", "string-list", "object-list",
  "document-list", "relation-list"]);

export const emptyValue = (field: FieldDef): unknown =>
  LIST_KINDS.has(field.kind) ? [] : null;

export const emptyDraft = (schema: SchemaDescriptor): DepositJson => {
  const draft: DepositJson = {};
  for (const field of schema.deposit) draft[field.key] = emptyValue(field);
  draft.local_id = 1;
  draft.access_policy = "public";
  draft.status = "draft";
  return draft;
};

export const emptyObject = (schema: SchemaDescriptor, localId: number): ObjectJson => {
  const obj: ObjectJson = { local_id: localId };
  for (const field of schema.object) {
    if (field.key !== "local_id") obj[field.key] = emptyValue(field);
  }
  return obj;
};

const segments = (path: string): (string | number)[] =>
  path.split(".").map((part) => (/^\d+$/.test(part) ? Number(part) : part));

export const getPath = (root: unknown, path: string): unknown => {
  let value: unknown = root;
  for (const part of segments(path)) {
    if (value === null || value === undefined) return undefined;
    value = (value as Record<string | number, unknown>)[part];
  }
  return value;
};

export const setPath = (root: DepositJson, path: string, value: unknown): void => {
  const parts = segments(path);
  let target: Record<string | number, unknown> = root;
  for (let i = 0; i < parts.length - 1; i += 1) {
    const part = parts[i];
    let next = target[part];
    if (next === null || next === undefined || typeof next !== "object") {
      next = typeof parts[i + 1] === "number" ? [] : {};
      target[part] = next;
    }
    target = next as Record<string | number, unknown>;
  }
  target[parts[parts.length - 1]] = value;
};
