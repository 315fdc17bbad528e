// Deposit-builder wizard: schema-driven form, live server-side validation,
// drag-to-attach uploads, vocabulary typeahead, publish gate.

import { ApiClient, ApiError } from "./api.js";
import { emptyDraft, emptyObject, setPath } from "./drafts.js";
import { buildDepositForm } from "./forms.js";
import { fillVocabChoices, h, renderDepositForm } from "./dom.js";
import type { DepositJson, SchemaDescriptor, ValidationReport } from "./types.js";

const EMPTY_REPORT: ValidationReport = { ok: true, errors: [], warnings: [] };

const parseFieldValue = (schema: SchemaDescriptor, path: string, raw: string): unknown => {
  const key = path.split(".")[0] === "objects" ? path.split(".")[2] : path.split(".")[0];
  const level = path.startsWith("objects.") ? schema.object : schema.deposit;
  const field = level.find((f) => f.key === key);
  if (!field) return raw;
  if (path.endsWith(".min") || path.endsWith(".max") || field.kind === "integer") {
    return raw === "" ? null : Number(raw);
  }
  if (field.kind === "agent") return raw ? { name: raw, role_note: null, org: null } : null;
  if (field.kind === "agent-list") {
    return raw.split(";").map((s) => s.trim()).filter(Boolean)
      .map((name) => ({ name, role_note: null, org: null }));
  }
  if (field.kind === "string-list") {
    return raw.split(";").map((s) => s.trim()).filter(Boolean);
  }
  return raw === "" ? null : raw;
};

export class Wizard {
  draft: DepositJson;
  depositId: number | null = null;
  version = 1;
  report: ValidationReport = EMPTY_REPORT;

  constructor(
    private api: ApiClient,
    private schema: SchemaDescriptor,
    private root: HTMLElement,
    private status: HTMLElement,
  ) {
    this.draft = emptyDraft(schema);
    this.draft.objects = [emptyObject(schema, 1)];
  }

  async start(): Promise<void> {
    const created = await this.api.createDeposit(this.stripped());
    this.depositId = created.local_id;
    this.version = created.version;
    await this.revalidate();
  }

  private stripped(): DepositJson {
    // storage-bearing documents only exist server-side; send metadata only
    const clone = JSON.parse(JSON.stringify(this.draft)) as DepositJson;
    for (const obj of clone.objects ?? []) obj.documents = [];
    return clone;
  }

  private async saveAndValidate(): Promise<void> {
    if (this.depositId === null) return;
    try {
      const envelope = await this.api.getDeposit(this.depositId);
      const merged = envelope.deposit;
      for (const key of Object.keys(this.draft)) {
        if (key !== "objects") merged[key] = this.draft[key];
      }
      const serverObjects = merged.objects ?? [];
      for (const [i, obj] of (this.draft.objects ?? []).entries()) {
        const target = serverObjects.find((o) => o.local_id === obj.local_id);
        if (target) {
          for (const key of Object.keys(obj)) {
            if (key !== "documents") target[key] = obj[key];
          }
        } else if (i >= serverObjects.length) {
          serverObjects.push({ ...obj, documents: [] });
        }
      }
      merged.objects = serverObjects;
      const updated = await this.api.updateDeposit(this.depositId, merged, envelope.version);
      this.version = updated.version;
      this.draft = (await this.api.getDeposit(this.depositId)).deposit;
    } catch (error) {
      if (error instanceof ApiError && error.code === "CONFLICT") {
        this.draft = (await this.api.getDeposit(this.depositId)).deposit;
        this.note("draft changed elsewhere; reloaded the latest version");
      } else {
        throw error;
      }
    }
    await this.revalidate();
  }

  private async revalidate(): Promise<void> {
    if (this.depositId === null) return;
    const envelope = await this.api.getDeposit(this.depositId);
    this.report = envelope.report;
    this.render();
  }

  private note(text: string): void {
    this.status.replaceChildren(h("p", { class: "status" }, text));
  }

  render(): void {
    const model = buildDepositForm(this.schema, this.draft, this.report);
    const form = renderDepositForm(model, {
      onFieldChange: (path, raw) => {
        setPath(this.draft, path, parseFieldValue(this.schema, path, raw));
        void this.saveAndValidate();
      },
      onVocabQuery: (path, scheme, query) => {
        if (!scheme || !query) return;
        void this.api.vocabSearch(scheme, query).then((body) => {
          fillVocabChoices(path, body.results);
          const chosen = body.results.find((e) => e.preferred_label === query);
          if (chosen) {
            const terms = (this.draft[path.split(".")[0]] ?? []) as unknown[];
            terms.push({ scheme: chosen.scheme, uri: chosen.uri, label: chosen.preferred_label });
            setPath(this.draft, path.split(".")[0], terms);
            void this.saveAndValidate();
          }
        });
      },
      onAttachFiles: (objectIndex, files) => {
        void this.attach(objectIndex, files);
      },
      onPublish: () => {
        void this.publish();
      },
    });
    this.root.replaceChildren(form);
  }

  private async attach(objectIndex: number, files: FileList): Promise<void> {
    if (this.depositId === null) return;
    const objectId = (this.draft.objects ?? [])[objectIndex]?.local_id;
    if (objectId === null || objectId === undefined) return;
    for (const file of Array.from(files)) {
      const body = await file.arrayBuffer();
      const uploaded = await this.api.uploadDocument(
        this.depositId, objectId, file.name, "other", body);
      this.note(`${file.name}: ${uploaded.verdict.format_class}`);
    }
    this.draft = (await this.api.getDeposit(this.depositId)).deposit;
    await this.revalidate();
  }

  private async publish(): Promise<void> {
    if (this.depositId === null) return;
    try {
      const result = await this.api.publish(this.depositId);
      this.status.replaceChildren(
        h("div", { class: "published" },
          h("p", {}, "Published."),
          h("p", {}, "Deposit: ", h("a", { href: result.pid_url }, result.pid)),
          h("ul", {}, ...result.object_pids.map((pid) =>
            h("li", {}, h("a", { href: `https://doi.org/${pid}` }, pid))))));
    } catch (error) {
      if (error instanceof ApiError && error.report) {
        this.report = error.report;
        this.render();
        this.note(`publish refused: ${error.code}`);
      } else {
        throw error;
      }
    }
  }
}

export const mountWizard = async (api: ApiClient, container: HTMLElement): Promise<Wizard> => {
  const schema = await api.getSchema();
  const status = h("div", { class: "wizard-status" });
  const formRoot = h("div", { class: "wizard-form" });
  container.replaceChildren(h("h1", {}, "New deposit"), status, formRoot);
  const wizard = new Wizard(api, schema, formRoot, status);
  await wizard.start();
  wizard.render();
  return wizard;
};
