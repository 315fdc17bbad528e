// Public catalog browser: search with filters, deposit pages, previews.

import { ApiClient, ApiError } from "./api.js";
import { buildDepositPage } from "./deposit_view.js";
import { h, renderAccessDenied, renderDepositPage, renderSearchResults } from "./dom.js";
import { parsePreviewPoints } from "./ply.js";
import { projectPoints } from "./preview.js";

export const POINT_BUDGET = 20000;

export const drawPreview = (canvas: HTMLCanvasElement, buffer: ArrayBuffer): number => {
  const points = parsePreviewPoints(buffer, POINT_BUDGET);
  const projected = projectPoints(points, canvas.width, canvas.height, POINT_BUDGET);
  const ctx = canvas.getContext("2d");
  if (ctx) {
    ctx.fillStyle = "#10141a";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    ctx.fillStyle = "#7fd0ff";
    for (const point of projected) {
      ctx.fillRect(point.x, point.y, 1, 1);
    }
  }
  return projected.length;
};

export const mountSearch = (api: ApiClient, container: HTMLElement): void => {
  const q = h("input", { type: "search", name: "q", placeholder: "search the catalog" }) as HTMLInputElement;
  const period = h("input", { type: "text", name: "period", placeholder: "period" }) as HTMLInputElement;
  const place = h("input", { type: "text", name: "place", placeholder: "place" }) as HTMLInputElement;
  const category = h("input", { type: "text", name: "category", placeholder: "category" }) as HTMLInputElement;
  const results = h("div", { class: "results-root" });

  const run = async () => {
    const body = await api.search({
      q: q.value, period: period.value, place: place.value, category: category.value,
    });
    results.replaceChildren(renderSearchResults(body.results, body.total));
  };
  const form = h("form", { class: "search-form" }, q, period, place, category,
    h("button", { type: "submit" }, "Search"));
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void run();
  });
  container.replaceChildren(h("h1", {}, "Catalog"), form, results);
  void run();
};

export const mountDepositPage = async (
  api: ApiClient,
  container: HTMLElement,
  depositId: number,
): Promise<void> => {
  let envelope;
  try {
    envelope = await api.getDeposit(depositId);
  } catch (error) {
    if (error instanceof ApiError && error.status === 403) {
      container.replaceChildren(renderAccessDenied());
      return;
    }
    throw error;
  }
  const schema = await api.getSchema();
  const model = buildDepositPage(schema, depositId, envelope.deposit);
  container.replaceChildren(renderDepositPage(model));
  for (const canvas of Array.from(container.querySelectorAll<HTMLCanvasElement>("canvas.preview"))) {
    const card = canvas.closest(".object-card");
    const objectId = Number(card?.getAttribute("data-object"));
    const buffer = await api.fetchPreview(depositId, objectId);
    if (buffer) {
      try {
        drawPreview(canvas, buffer);
      } catch {
        canvas.remove(); // no usable point data; the page stands without it
      }
    } else {
      canvas.remove();
    }
  }
};
