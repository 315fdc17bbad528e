// Pure view model for the public deposit page: one display group per
// schema field, the DOI as a resolvable link, and one card per object.

import type {
  AgentJson,
  DepositJson,
  FieldDef,
  ObjectJson,
  SchemaDescriptor,
  VocabRefJson,
  YearRangeJson,
} from "./types.js";

export interface FieldGroup {
  key: string;
  label: string;
  value: string;
}

export interface ObjectCard {
  localId: number | null;
  title: string;
  doiUrl: string | null;
  category: string;
  version: string;
  documentCount: number;
  finalModel: string | null;
  previewPath: string | null;
  groups: FieldGroup[];
}

export interface DepositPageModel {
  title: string;
  doiUrl: string | null;
  citation: string;
  groups: FieldGroup[];
  objects: ObjectCard[];
}

const agentName = (agent: AgentJson | null | undefined): string => {
  if (!agent || !agent.name) return "";
  return agent.org ? `${agent.name} (${agent.org})` : agent.name;
};

const NOT_SET = "(not set)";

export const doiUrlFor = (pid: unknown): string | null =>
  typeof pid === "string" && pid ? `https://doi.org/${pid}` : null;

export const formatValue = (field: FieldDef, value: unknown): string => {
  if (value === null || value === undefined) return NOT_SET;
  switch (field.kind) {
    case "agent":
      return agentName(value as AgentJson) || NOT_SET;
    case "agent-list": {
      const names = (value as AgentJson[]).map(agentName).filter(Boolean);
      return names.length ? names.join("; ") : NOT_SET;
    }
    case "year-range": {
      const range = value as YearRangeJson;
      if (range.min === null || range.max === null) return NOT_SET;
      return `${range.min} to ${range.max}`;
    }
    case "vocab-list": {
      const labels = (value as VocabRefJson[]).map((t) => t.label ?? t.uri ?? "").filter(Boolean);
      return labels.length ? labels.join("; ") : NOT_SET;
    }
    case "string-list": {
      const items = (value as unknown[]).map(String).filter(Boolean);
      return items.length ? items.join("; ") : NOT_SET;
    }
    case "pid":
      return typeof value === "string" && value ? value : NOT_SET;
    default:
      return String(value) || NOT_SET;
  }
};

const buildObjectCard = (
  schema: SchemaDescriptor,
  depositId: number,
  obj: ObjectJson,
): ObjectCard => {
  const groups = schema.object
    .filter((field) => field.kind !== "document-list")
    .map((field) => ({
      key: field.key,
      label: field.label,
      value: formatValue(field, obj[field.key]),
    }));
  return {
    localId: obj.local_id,
    title: typeof obj.title === "string" && obj.title ? obj.title : `Object ${obj.local_id}`,
    doiUrl: doiUrlFor(obj.pid),
    category: typeof obj.category === "string" ? obj.category : "",
    version: typeof obj.version === "string" ? obj.version : "",
    documentCount: (obj.documents ?? []).length,
    finalModel: obj.final_model ?? null,
    previewPath: obj.local_id === null
      ? null
      : `/api/deposits/${depositId}/objects/${obj.local_id}/preview.ply`,
    groups,
  };
};

export const buildDepositPage = (
  schema: SchemaDescriptor,
  depositId: number,
  deposit: DepositJson,
): DepositPageModel => {
  const groups = schema.deposit
    .filter((field) => field.kind !== "object-list")
    .map((field) => ({
      key: field.key,
      label: field.label,
      value: formatValue(field, deposit[field.key]),
    }));
  return {
    title: typeof deposit.title === "string" ? deposit.title : "",
    doiUrl: doiUrlFor(deposit.pid),
    citation: typeof deposit.citation === "string" ? deposit.citation : "",
    groups,
    objects: (deposit.objects ?? []).map((obj) => buildObjectCard(schema, depositId, obj)),
  };
};
