import type { ApiClient } from "./api.js";
import type { ExplorerState } from "./state.js";

export interface ViewContext {
  api: ApiClient;
  state: ExplorerState;
  /** Merge a partial state, push it to the URL, re-render. */
  update: (partial: Partial<ExplorerState>) => void;
}
