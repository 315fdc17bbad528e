// JSON shapes exchanged with the repository service.

export interface FieldDef {
  key: string;
  label: string;
  kind: string;
  required: boolean;
  enum: string[] | null;
  open_enum: boolean;
  scheme: string | null;
}

export interface SchemaDescriptor {
  deposit: FieldDef[];
  object: FieldDef[];
  document: FieldDef[];
}

export interface ReportEntry {
  path: string;
  code: string;
  message: string;
}

export interface ValidationReport {
  ok: boolean;
  errors: ReportEntry[];
  warnings: ReportEntry[];
}

export interface AgentJson {
  name: string | null;
  role_note?: string | null;
  org?: string | null;
}

export interface StorageJson {
  kind: string;
  blob_key?: string;
  url?: string;
  path?: string;
}

export interface RelationJson {
  relation_kind: string;
  target: string;
}

export interface DocumentJson {
  filename: string | null;
  media_role: string | null;
  byte_size: number | null;
  checksum: string | null;
  format_class: string | null;
  storage: StorageJson | null;
  relations: RelationJson[];
}

export interface YearRangeJson {
  min: number | null;
  max: number | null;
}

export interface VocabRefJson {
  scheme: string | null;
  uri: string | null;
  label: string | null;
}

export interface ObjectJson {
  [key: string]: unknown;
  local_id: number | null;
  title?: string | null;
  documents?: DocumentJson[];
  final_model?: string | null;
}

export interface DepositJson {
  [key: string]: unknown;
  objects?: ObjectJson[];
}

export interface DepositEnvelope {
  local_id: number;
  owner: string;
  version: number;
  deposit: DepositJson;
  report: ValidationReport;
}

export interface SearchHit {
  local_id: number;
  pid: string;
  pid_url: string;
  title: string;
  access_policy: string;
  object_count: number;
  categories: string[];
}

export interface SearchResponse {
  total: number;
  page: number;
  page_size: number;
  results: SearchHit[];
}

export interface VocabEntry {
  scheme: string;
  uri: string;
  preferred_label: string;
  alt_labels: string[];
  bounds: number[] | null;
  coords: number[] | null;
}

export interface PublishResponse {
  pid: string;
  pid_url: string;
  object_pids: string[];
}

export interface UploadResponse {
  document: DocumentJson;
  verdict: { format_class: string; detected_format: string; issues: unknown[] };
  version: number;
}
