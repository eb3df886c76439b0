// Explorer state lives entirely in the URL query string: any view is
// shareable and reloading reproduces it exactly.

export type ViewName = "field" | "communities" | "map" | "topics" | "flows" | "correlations";

export const VIEWS: ViewName[] = ["field", "communities", "map", "topics", "flows", "correlations"];

export interface ExplorerState {
  snapshot: string | null;
  view: ViewName;
  keyword: string | null;              // semantic-field center
  article: string | null;              // wordcloud selection
  method: string;                      // map view classification method
  allocation: "authoring" | "studied";
  k: number;                           // cluster count
  methodA: string;                     // comparison pair
  methodB: string;
  threshold: number | null;            // topics view; null = server default
}

export const DEFAULT_STATE: ExplorerState = {
  snapshot: null,
  view: "field",
  keyword: null,
  article: null,
  method: "keywords",
  allocation: "studied",
  k: 4,
  methodA: "keywords",
  methodB: "citations",
  threshold: null,
};

export function stateToQuery(state: ExplorerState): string {
  const params = new URLSearchParams();
  if (state.snapshot) params.set("snapshot", state.snapshot);
  params.set("view", state.view);
  if (state.keyword) params.set("keyword", state.keyword);
  if (state.article) params.set("article", state.article);
  if (state.method !== DEFAULT_STATE.method) params.set("method", state.method);
  if (state.allocation !== DEFAULT_STATE.allocation) params.set("allocation", state.allocation);
  if (state.k !== DEFAULT_STATE.k) params.set("k", String(state.k));
  if (state.methodA !== DEFAULT_STATE.methodA) params.set("a", state.methodA);
  if (state.methodB !== DEFAULT_STATE.methodB) params.set("b", state.methodB);
  if (state.threshold !== null) params.set("threshold", String(state.threshold));
  return params.toString();
}

export function stateFromQuery(query: string): ExplorerState {
  const params = new URLSearchParams(query);
  const view = params.get("view");
  const allocation = params.get("allocation");
  return {
    snapshot: params.get("snapshot"),
    view: VIEWS.includes(view as ViewName) ? (view as ViewName) : DEFAULT_STATE.view,
    keyword: params.get("keyword"),
    article: params.get("article"),
    method: params.get("method") ?? DEFAULT_STATE.method,
    allocation: allocation === "authoring" ? "authoring" : "studied",
    k: Number(params.get("k") ?? DEFAULT_STATE.k) || DEFAULT_STATE.k,
    methodA: params.get("a") ?? DEFAULT_STATE.methodA,
    methodB: params.get("b") ?? DEFAULT_STATE.methodB,
    threshold: params.has("threshold") ? Number(params.get("threshold")) : null,
  };
}

export function readState(): ExplorerState {
  return stateFromQuery(window.location.search.replace(/^\?/, ""));
}

export function writeState(state: ExplorerState): void {
  const query = stateToQuery(state);
  window.history.pushState(null, "", `${window.location.pathname}?${query}`);
}
