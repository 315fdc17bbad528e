// Test fixtures mirroring the server's /api/schema and a published deposit.

import type {
  DepositJson,
  FieldDef,
  SchemaDescriptor,
  ValidationReport,
} from "../src/types.js";

const f = (key: string, label: string, kind: string, required: boolean,
           extra: Partial<FieldDef> = {}): FieldDef => ({
  key, label, kind, required,
  enum: null, open_enum: false, scheme: null, ...extra,
});

export const schemaFixture = (): SchemaDescriptor => ({
  deposit: [
    f("local_id", "Deposit number", "integer", true),
    f("pid", "DOI", "pid", false),
    f("title", "Title", "string", true),
    f("deposit_creator", "Deposit creator", "agent", true),
    f("silent_partners", "Silent Partner", "agent-list", false),
    f("nature_of_resource", "Nature of resource", "enum", true,
      { enum: ["3D", "images", "texts", "mixed"], open_enum: true }),
    f("nature_of_deposit", "Nature of the deposit", "enum", true,
      { enum: ["digitisation", "restitution", "mixed"] }),
    f("scientific_objectives", "Scientific and technical objectives", "text", true),
    f("deposit_date", "Date of Deposit", "date", true),
    f("project_date_range", "Project date", "year-range", true),
    f("archaeological_date_range", "Archaeological date range", "year-range", true),
    f("period_terms", "Period", "vocab-list", false, { scheme: "PeriodO" }),
    f("place_terms", "Place", "vocab-list", false, { scheme: "Geonames" }),
    f("subject_terms", "Subject", "vocab-list", false, { scheme: "PACTOLS" }),
    f("citation", "Citation", "text", true),
    f("related_publications", "Related publications", "string-list", false),
    f("objects", "Content of Deposit", "object-list", false),
    f("access_policy", "Access policy", "enum", false, { enum: ["public", "restricted"] }),
    f("status", "Status", "enum", false, { enum: ["draft", "published"] }),
  ],
  object: [
    f("local_id", "Object number", "integer", true),
    f("pid", "DOI", "pid", false),
    f("title", "Title", "string", true),
    f("creators", "Creator(s)", "agent-list", true),
    f("contributors", "Contributor(s)", "agent-list", false),
    f("creation_3d_date", "3D date", "date", true),
    f("archaeological_date", "Archaeological date", "year-range", true),
    f("version", "Version", "string", true),
    f("category", "Category", "enum", true,
      { enum: ["mesh", "point-cloud", "scene"], open_enum: true }),
    f("documents", "Documents", "document-list", false),
    f("final_model", "Final model", "string", false),
  ],
  document: [
    f("filename", "Filename", "string", true),
    f("media_role", "Media role", "enum", true,
      { enum: ["final-model", "source-scan", "texture", "image", "plan", "report", "other"] }),
    f("byte_size", "Size (bytes)", "integer", true),
    f("checksum", "SHA-256 checksum", "checksum", true),
    f("format_class", "Format class", "enum", true, { enum: ["Archivable", "DepositOnly"] }),
    f("storage", "Storage", "storage", true),
    f("relations", "Relations", "relation-list", false),
  ],
});

export const depositFixture = (): DepositJson => ({
  local_id: 257350,
  pid: "10.34969/CND3D/257350.d.2015",
  title: "Les thermes de Chassenon",
  deposit_creator: { name: "Jeanne Martin", role_note: null, org: "Archeovision" },
  silent_partners: [{ name: "Conseil départemental de la Charente", role_note: "funder", org: null }],
  nature_of_resource: "3D",
  nature_of_deposit: "digitisation",
  scientific_objectives: "Digitisation of the Gallo-Roman baths of Cassinomagus.",
  deposit_date: "2015-06-12",
  project_date_range: { min: 2013, max: 2015 },
  archaeological_date_range: { min: 40, max: 260 },
  period_terms: [{ scheme: "PeriodO", uri: "http://n2t.net/ark:/99152/p0877q3r", label: "Gallo-romain" }],
  place_terms: [{ scheme: "Geonames", uri: "https://sws.geonames.org/3025734/", label: "Chassenon" }],
  subject_terms: [{ scheme: "PACTOLS", uri: "https://ark.frantiq.fr/ark:/26678/pcrtHljBZmgBVD", label: "thermes" }],
  citation: "Les thermes de Chassenon, dépôt 257350, 2015.",
  related_publications: ["hal-01526713"],
  objects: [
    {
      local_id: 1,
      pid: "10.34969/CND3D/1.o.2015",
      title: "Les thermes de Chassenon",
      creators: [{ name: "Jeanne Martin", role_note: null, org: null }],
      contributors: [],
      creation_3d_date: "2015-03-01",
      archaeological_date: { min: 40, max: 260 },
      version: "1.0",
      category: "mesh",
      documents: [
        {
          filename: "cube.ply", media_role: "final-model", byte_size: 420,
          checksum: "a".repeat(64), format_class: "Archivable",
          storage: { kind: "internal", blob_key: "a".repeat(64) }, relations: [],
        },
        {
          filename: "scene.fbx", media_role: "source-scan", byte_size: 99,
          checksum: "b".repeat(64), format_class: "DepositOnly",
          storage: { kind: "internal", blob_key: "b".repeat(64) }, relations: [],
        },
      ],
      final_model: "cube.ply",
    },
  ],
  access_policy: "public",
  status: "published",
});

export const cleanReport = (): ValidationReport => ({ ok: true, errors: [], warnings: [] });

export const reportWith = (
  errors: [string, string][],
  warnings: [string, string][] = [],
): ValidationReport => ({
  ok: errors.length === 0,
  errors: errors.map(([path, code]) => ({ path, code, message: `${code} at ${path}` })),
  warnings: warnings.map(([path, code]) => ({ path, code, message: `${code} at ${path}` })),
});
