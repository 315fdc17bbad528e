// DOM renderers for the pure view models. All state lives in the models;
// these functions only translate them to elements and surface events
// through the handler callbacks.

import type { DepositPageModel } from "./deposit_view.js";
import type { DepositFormModel, DocumentRow, FormControl, ObjectSection } from "./forms.js";
import type { SearchHit, VocabEntry } from "./types.js";

type Attrs = Record<string, string | boolean | null | undefined>;

export const h = (
  tag: string,
  attrs: Attrs = {},
  ...children: (Node | string | null | undefined)[]
): HTMLElement => {
  const el = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (value === null || value === undefined || value === false) continue;
    if (value === true) el.setAttribute(key, "");
    else el.setAttribute(key, value);
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    el.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return el;
};

export interface FormHandlers {
  onFieldChange(path: string, raw: string): void;
  onVocabQuery(path: string, scheme: string, query: string): void;
  onAttachFiles(objectIndex: number, files: FileList): void;
  onPublish(): void;
}

const messageList = (messages: string[], cls: string): HTMLElement | null =>
  messages.length
    ? h("ul", { class: cls }, ...messages.map((m) => h("li", {}, m)))
    : null;

const inputFor = (control: FormControl, handlers: FormHandlers): HTMLElement => {
  const name = control.path;
  const value = control.value;
  const onChange = (event: Event) =>
    handlers.onFieldChange(name, (event.target as HTMLInputElement).value);

  switch (control.widget) {
    case "readonly":
      return h("output", { class: "readonly", "data-path": name },
        value === null || value === undefined ? "" : String(value));
    case "textarea": {
      const area = h("textarea", { "data-path": name, rows: "3" }) as HTMLTextAreaElement;
      area.value = typeof value === "string" ? value : "";
      area.addEventListener("change", onChange);
      return area;
    }
    case "select": {
      const select = h("select", { "data-path": name }) as HTMLSelectElement;
      select.append(h("option", { value: "" }, "(choose)"));
      for (const option of control.options) {
        select.append(h("option", { value: option }, option));
      }
      if (typeof value === "string") select.value = value;
      select.addEventListener("change", onChange);
      if (control.openEnum) {
        const wrap = h("span", {}, select);
        const free = h("input", { type: "text", placeholder: "other value",
          "data-path": `${name}:free` }) as HTMLInputElement;
        free.addEventListener("change", onChange);
        wrap.append(free);
        return wrap;
      }
      return select;
    }
    case "year-range": {
      const range = (value ?? {}) as { min?: number | null; max?: number | null };
      const wrap = h("span", { class: "year-range" });
      for (const half of ["min", "max"] as const) {
        const input = h("input", { type: "number", "data-path": `${name}.${half}`,
          placeholder: half }) as HTMLInputElement;
        if (range[half] !== null && range[half] !== undefined) input.value = String(range[half]);
        input.addEventListener("change", (event) =>
          handlers.onFieldChange(`${name}.${half}`, (event.target as HTMLInputElement).value));
        wrap.append(input);
      }
      return wrap;
    }
    case "vocab-list": {
      const wrap = h("span", { class: "vocab" });
      const terms = Array.isArray(value) ? value as { label?: string | null }[] : [];
      wrap.append(h("span", { class: "terms", "data-path": name },
        terms.map((t) => t.label ?? "").filter(Boolean).join("; ")));
      const input = h("input", { type: "search", placeholder: `search ${control.scheme ?? ""}`,
        "data-path": `${name}:query`, list: `${name}:choices` }) as HTMLInputElement;
      input.addEventListener("input", (event) =>
        handlers.onVocabQuery(name, control.scheme ?? "", (event.target as HTMLInputElement).value));
      wrap.append(input, h("datalist", { id: `${name}:choices` }));
      return wrap;
    }
    case "number": {
      const input = h("input", { type: "number", "data-path": name }) as HTMLInputElement;
      if (typeof value === "number") input.value = String(value);
      input.addEventListener("change", onChange);
      return input;
    }
    case "date": {
      const input = h("input", { type: "date", "data-path": name }) as HTMLInputElement;
      if (typeof value === "string") input.value = value;
      input.addEventListener("change", onChange);
      return input;
    }
    default: {
      const input = h("input", { type: "text", "data-path": name }) as HTMLInputElement;
      if (control.widget === "agent") {
        const agent = value as { name?: string | null } | null;
        input.value = agent?.name ?? "";
      } else if (control.widget === "agent-list") {
        const agents = Array.isArray(value) ? value as { name?: string | null }[] : [];
        input.value = agents.map((a) => a.name ?? "").filter(Boolean).join("; ");
        input.placeholder = "Name; Name";
      } else if (control.widget === "string-list") {
        input.value = Array.isArray(value) ? (value as unknown[]).join("; ") : "";
        input.placeholder = "item; item";
      } else if (typeof value === "string") {
        input.value = value;
      }
      input.addEventListener("change", onChange);
      return input;
    }
  }
};

export const renderControl = (control: FormControl, handlers: FormHandlers): HTMLElement =>
  h("div", { class: `field ${control.errors.length ? "invalid" : ""}`, "data-field": control.path },
    h("label", { for: control.path },
      control.label + (control.required ? " *" : "")),
    inputFor(control, handlers),
    messageList(control.errors, "errors"),
    messageList(control.warnings, "warnings"));

const renderDocumentRow = (row: DocumentRow): HTMLElement =>
  h("li", { class: "document", "data-path": row.path },
    h("span", { class: "filename" }, row.filename),
    h("span", { class: "role" }, row.mediaRole),
    h("span", { class: `badge ${row.formatClass === "Archivable" ? "ok" : "warn"}` }, row.badge),
    row.external ? h("span", { class: "external" }, "external") : null,
    messageList(row.errors, "errors"));

const renderObjectSection = (section: ObjectSection, handlers: FormHandlers): HTMLElement => {
  const dropzone = h("div", { class: "dropzone" },
    "drop files here or ",
    h("input", { type: "file", multiple: true }));
  const fileInput = dropzone.querySelector("input") as HTMLInputElement;
  const index = Number(section.path.split(".")[1]);
  fileInput.addEventListener("change", () => {
    if (fileInput.files) handlers.onAttachFiles(index, fileInput.files);
  });
  dropzone.addEventListener("dragover", (event) => event.preventDefault());
  dropzone.addEventListener("drop", (event) => {
    event.preventDefault();
    const files = (event as DragEvent).dataTransfer?.files;
    if (files) handlers.onAttachFiles(index, files);
  });
  return h("section", { class: "object", "data-path": section.path },
    h("h3", {}, section.heading),
    ...section.controls.map((control) => renderControl(control, handlers)),
    h("h4", {}, `Documents (${section.documents.length})`),
    h("ul", { class: "documents" }, ...section.documents.map(renderDocumentRow)),
    dropzone);
};

export const renderDepositForm = (
  model: DepositFormModel,
  handlers: FormHandlers,
): HTMLElement => {
  const publish = h("button", {
    class: "publish", type: "button",
    disabled: model.publishEnabled ? null : true,
  }, "Publish") as HTMLButtonElement;
  publish.addEventListener("click", () => handlers.onPublish());
  return h("form", { class: "deposit-form" },
    ...model.controls.map((control) => renderControl(control, handlers)),
    h("h2", {}, "Content of Deposit"),
    ...model.objects.map((section) => renderObjectSection(section, handlers)),
    h("footer", {},
      h("span", { class: "counts" },
        `${model.errorCount} error(s), ${model.warningCount} warning(s)`),
      publish));
};

export const fillVocabChoices = (path: string, entries: VocabEntry[]): void => {
  const datalist = document.getElementById(`${path}:choices`);
  if (!datalist) return;
  datalist.replaceChildren(
    ...entries.map((entry) => h("option", { value: entry.preferred_label }, entry.uri)));
};

export const renderDepositPage = (model: DepositPageModel): HTMLElement =>
  h("article", { class: "deposit-page" },
    h("h1", {}, model.title),
    model.doiUrl
      ? h("p", { class: "doi" }, "DOI: ", h("a", { href: model.doiUrl }, model.doiUrl))
      : null,
    h("dl", { class: "groups" },
      ...model.groups.flatMap((group) => [
        h("dt", { "data-key": group.key }, group.label),
        h("dd", { "data-key": group.key }, group.value),
      ])),
    h("section", { class: "objects" },
      h("h2", {}, "3D Virtual Objects"),
      ...model.objects.map((card) =>
        h("div", { class: "object-card", "data-object": String(card.localId) },
          h("h3", {}, card.title),
          card.doiUrl ? h("p", {}, h("a", { href: card.doiUrl }, card.doiUrl)) : null,
          h("p", {}, `${card.category} ${card.version}`.trim()),
          h("p", {}, `${card.documentCount} document(s)`),
          card.previewPath ? h("canvas", { class: "preview", width: "320", height: "240",
            "data-src": card.previewPath }) : null))));

export const renderAccessDenied = (): HTMLElement =>
  h("article", { class: "denied" },
    h("h1", {}, "Access denied"),
    h("p", {}, "This deposit is restricted. Sign in with an authorized token."));

export const renderSearchResults = (hits: SearchHit[], total: number): HTMLElement =>
  h("section", { class: "results" },
    h("p", { class: "total" }, `${total} result(s)`),
    h("ul", {}, ...hits.map((hit) =>
      h("li", { class: "result-card", "data-id": String(hit.local_id) },
        h("a", { href: `#/deposit/${hit.local_id}` }, hit.title),
        h("span", { class: "categories" }, hit.categories.join(", ")),
        h("a", { class: "doi", href: hit.pid_url }, hit.pid)))));
