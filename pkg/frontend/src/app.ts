// Application shell: snapshot picker, view navigation, URL-backed state.
// Each interaction updates the state, pushes it to the URL and re-renders,
// so any view is reproducible from its address alone.

import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import { DEFAULT_STATE, readState, writeState, VIEWS, type ExplorerState, type ViewName } from "./state.js";
import type { ViewContext } from "./context.js";
import { renderCommunities } from "./views/communities.js";
import { renderCorrelations } from "./views/correlations.js";
import { renderField } from "./views/field.js";
import { renderFlows } from "./views/flows.js";
import { renderMap } from "./views/map.js";
import { renderTopics } from "./views/topics.js";

const RENDERERS: Record<ViewName, (c: HTMLElement, ctx: ViewContext) => Promise<void>> = {
  field: renderField,
  communities: renderCommunities,
  map: renderMap,
  topics: renderTopics,
  flows: renderFlows,
  correlations: renderCorrelations,
};

export interface App {
  render(): Promise<void>;
  update(partial: Partial<ExplorerState>): void;
  readonly state: ExplorerState;
  /** Resolves when the most recently triggered render settles. */
  readonly rendering: Promise<void>;
}

export function createApp(root: HTMLElement, api: ApiClient): App {
  let state = readState();
  let renderToken = 0;
  let rendering: Promise<void> = Promise.resolve();

  const nav = el("nav", { class: "view-nav" });
  const snapshotSelect = el("select", { class: "snapshot-select" });
  const main = el("main", { class: "view-root" });
  root.append(
    el("header", {}, [el("h1", { text: "corposcope explorer" }), snapshotSelect]),
    nav, main,
  );

  for (const view of VIEWS) {
    const button = el("button", { class: "nav-button", "data-view": view, text: view });
    button.addEventListener("click", () => update({ view }));
    nav.append(button);
  }
  snapshotSelect.addEventListener("change", () => update({ snapshot: snapshotSelect.value }));

  function update(partial: Partial<ExplorerState>): void {
    state = { ...state, ...partial };
    writeState(state);
    rendering = render();
  }

  async function render(): Promise<void> {
    const token = ++renderToken;
    if (!state.snapshot) {
      const snapshots = await api.snapshots().catch(() => []);
      if (token !== renderToken) return;
      if (snapshots.length) {
        state = { ...state, snapshot: snapshots[snapshots.length - 1].snapshot_id };
        writeState(state);
      }
      clear(snapshotSelect);
      for (const snap of snapshots) {
        const option = el("option", { value: snap.snapshot_id, text: snap.snapshot_id });
        if (snap.snapshot_id === state.snapshot) option.setAttribute("selected", "selected");
        snapshotSelect.append(option);
      }
    } else if (!snapshotSelect.options.length) {
      snapshotSelect.append(el("option", { value: state.snapshot, text: state.snapshot, selected: "selected" }));
    }

    for (const button of nav.querySelectorAll("button")) {
      button.classList.toggle("active", button.dataset.view === state.view);
    }

    if (!state.snapshot) {
      clear(main);
      main.append(el("p", { class: "empty-state", text: "no snapshots in the workspace yet" }));
      return;
    }
    const ctx: ViewContext = { api, state, update };
    try {
      await RENDERERS[state.view](main, ctx);
    } catch (err) {
      if (token === renderToken) {
        clear(main);
        main.append(el("p", { class: "error-state", text: String(err) }));
      }
    }
  }

  window.addEventListener("popstate", () => {
    state = readState();
    void render();
  });

  return {
    render,
    update,
    get state() {
      return state;
    },
  };
}

export function defaultStateForTests(): ExplorerState {
  return { ...DEFAULT_STATE };
}

// browser entry point; tests build the app themselves
if (typeof document !== "undefined" && document.getElementById("app")) {
  const base = (document.getElementById("app") as HTMLElement).dataset.api ?? "http://127.0.0.1:8000";
  const app = createApp(document.getElementById("app") as HTMLElement, new ApiClient(base));
  void app.render();
}
