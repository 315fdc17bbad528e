// Hash-routed entry point: #/search (default), #/deposit/<id>, #/build.

import { ApiClient } from "./api.js";
import { mountDepositPage, mountSearch } from "./browse.js";
import { mountWizard } from "./wizard.js";

const api = new ApiClient();

const tokenInput = (): HTMLElement => {
  const input = document.createElement("input");
  input.type = "password";
  input.placeholder = "session token";
  input.value = sessionStorage.getItem("depot3d-token") ?? "";
  api.token = input.value || null;
  input.addEventListener("change", () => {
    sessionStorage.setItem("depot3d-token", input.value);
    api.token = input.value || null;
  });
  const label = document.createElement("label");
  label.className = "token";
  label.append("Token: ", input);
  return label;
};

const route = async (): Promise<void> => {
  const container = document.getElementById("app");
  if (!container) return;
  const hash = window.location.hash || "#/search";
  const depositMatch = hash.match(/^#\/deposit\/(\d+)$/);
  if (depositMatch) {
    await mountDepositPage(api, container, Number(depositMatch[1]));
  } else if (hash === "#/build") {
    await mountWizard(api, container);
  } else {
    mountSearch(api, container);
  }
};

const boot = (): void => {
  const nav = document.getElementById("nav");
  if (nav) {
    nav.append(tokenInput());
  }
  window.addEventListener("hashchange", () => void route());
  void route();
};

document.addEventListener("DOMContentLoaded", boot);
