/**
 * Bootstrap: mount the store, render on every change, delegate DOM events.
 */

import { ApiClient } from "./api.js";
import { renderApp } from "./render.js";
import { UiSession } from "./state.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const store = new UiSession(new ApiClient(), window.localStorage);
store.subscribe(() => {
  root.innerHTML = renderApp(store);
});

root.addEventListener("submit", (event) => {
  const form = event.target as HTMLFormElement;
  if (form.dataset.action === "login") {
    event.preventDefault();
    const name = (form.elements.namedItem("display_name") as HTMLInputElement).value.trim();
    if (name) void store.login(name);
  }
});

root.addEventListener("click", (event) => {
  const el = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!el) return;
  switch (el.dataset.action) {
    case "tab":
      if (store.tabEnabled(el.dataset.tab as never)) store.setTab(el.dataset.tab as never);
      break;
    case "level":
      store.setHistogramLevel(el.dataset.level as never);
      break;
    case "finalize":
      void store.finalize();
      break;
    case "new-session":
      if (store.user) void store.login(store.user.display_name);
      break;
  }
});

root.addEventListener("change", (event) => {
  const input = event.target as HTMLInputElement;
  if (input.dataset.action === "grade" && input.dataset.leaf) {
    store.setGrade(input.dataset.leaf, Number(input.value));
  }
});

void store.resume().then((resumed) => {
  if (!resumed) root.innerHTML = renderApp(store);
});
