// Pure form-model builder: the wizard's inputs are generated entirely from
// the schema descriptor, and every validation message is attached to the
// control whose path prefixes it. No field list is hard-coded anywhere, so
// a new schema field shows up as a new control with zero code changes.

import { getPath } from "./drafts.js";
import type {
  DepositJson,
  DocumentJson,
  FieldDef,
  ObjectJson,
  SchemaDescriptor,
  ValidationReport,
} from "./types.js";

export type Widget =
  | "text"
  | "textarea"
  | "number"
  | "date"
  | "select"
  | "year-range"
  | "agent"
  | "agent-list"
  | "vocab-list"
  | "string-list"
  | "readonly";

export interface FormControl {
  path: string;
  key: string;
  label: string;
  widget: Widget;
  required: boolean;
  options: string[];
  openEnum: boolean;
  scheme: string | null;
  value: unknown;
  errors: string[];
  warnings: string[];
}

export interface DocumentRow {
  path: string;
  filename: string;
  mediaRole: string;
  formatClass: string;
  badge: string;
  byteSize: number;
  external: boolean;
  relationCount: number;
  errors: string[];
}

export interface ObjectSection {
  path: string;
  localId: number | null;
  heading: string;
  controls: FormControl[];
  documents: DocumentRow[];
  errors: string[];
}

export interface DepositFormModel {
  controls: FormControl[];
  objects: ObjectSection[];
  errorCount: number;
  warningCount: number;
  publishEnabled: boolean;
}

const READONLY_KEYS = new Set(["local_id", "pid", "status"]);

export const widgetFor = (field: FieldDef): Widget => {
  if (READONLY_KEYS.has(field.key) || field.kind === "pid") return "readonly";
  switch (field.kind) {
    case "integer":
      return "number";
    case "date":
      return "date";
    case "enum":
      return "select";
    case "text":
      return "textarea";
    case "year-range":
      return "year-range";
    case "agent":
      return "agent";
    case "agent-list":
      return "agent-list";
    case "vocab-list":
      return "vocab-list";
    case "string-list":
      return "string-list";
    default:
      return "text";
  }
};

const messagesAt = (report: ValidationReport, path: string) => {
  const matches = (entryPath: string) =>
    entryPath === path || entryPath.startsWith(path + ".");
  return {
    errors: report.errors.filter((e) => matches(e.path)).map((e) => `${e.code}: ${e.message}`),
    warnings: report.warnings.filter((w) => matches(w.path)).map((w) => `${w.code}: ${w.message}`),
  };
};

const buildControl = (
  field: FieldDef,
  basePath: string,
  container: Record<string, unknown>,
  report: ValidationReport,
): FormControl => {
  const path = basePath ? `${basePath}.${field.key}` : field.key;
  const { errors, warnings } = messagesAt(report, path);
  return {
    path,
    key: field.key,
    label: field.label,
    widget: widgetFor(field),
    required: field.required,
    options: field.enum ?? [],
    openEnum: field.open_enum,
    scheme: field.scheme,
    value: container[field.key],
    errors,
    warnings,
  };
};

export const DEPOSIT_ONLY_BADGE = "deposit only — not archivable";
export const ARCHIVABLE_BADGE = "archivable";

const buildDocumentRow = (
  doc: DocumentJson,
  path: string,
  report: ValidationReport,
): DocumentRow => ({
  path,
  filename: doc.filename ?? "(unnamed)",
  mediaRole: doc.media_role ?? "other",
  formatClass: doc.format_class ?? "DepositOnly",
  badge: doc.format_class === "Archivable" ? ARCHIVABLE_BADGE : DEPOSIT_ONLY_BADGE,
  byteSize: doc.byte_size ?? 0,
  external: doc.storage?.kind === "external",
  relationCount: (doc.relations ?? []).length,
  errors: messagesAt(report, path).errors,
});

const buildObjectSection = (
  schema: SchemaDescriptor,
  obj: ObjectJson,
  index: number,
  report: ValidationReport,
): ObjectSection => {
  const path = `objects.${index}`;
  const controls = schema.object
    .filter((field) => field.kind !== "document-list")
    .map((field) => buildControl(field, path, obj, report));
  const documents = (obj.documents ?? []).map((doc, j) =>
    buildDocumentRow(doc, `${path}.documents.${j}`, report));
  return {
    path,
    localId: obj.local_id,
    heading: typeof obj.title === "string" && obj.title ? obj.title : `Object ${obj.local_id ?? index + 1}`,
    controls,
    documents,
    errors: messagesAt(report, path).errors,
  };
};

export const publishEnabled = (report: ValidationReport): boolean =>
  report.errors.length === 0;

export const buildDepositForm = (
  schema: SchemaDescriptor,
  draft: DepositJson,
  report: ValidationReport,
): DepositFormModel => {
  const controls = schema.deposit
    .filter((field) => field.kind !== "object-list")
    .map((field) => buildControl(field, "", draft, report));
  const objects = (draft.objects ?? []).map((obj, i) =>
    buildObjectSection(schema, obj, i, report));
  return {
    controls,
    objects,
    errorCount: report.errors.length,
    warningCount: report.warnings.length,
    publishEnabled: publishEnabled(report),
  };
};
