import { el } from "../dom.js";
import type { ViewContext } from "../context.js";

const METHODS = ["keywords", "citations", "topics"];

export function methodPairControls(ctx: ViewContext): HTMLElement {
  const { state } = ctx;
  const selectA = el("select", { class: "method-a" });
  const selectB = el("select", { class: "method-b" });
  for (const method of METHODS) {
    const optionA = el("option", { value: method, text: method });
    if (method === state.methodA) optionA.setAttribute("selected", "selected");
    selectA.append(optionA);
    const optionB = el("option", { value: method, text: method });
    if (method === state.methodB) optionB.setAttribute("selected", "selected");
    selectB.append(optionB);
  }
  selectA.addEventListener("change", () => ctx.update({ methodA: selectA.value }));
  selectB.addEventListener("change", () => ctx.update({ methodB: selectB.value }));
  return el("div", { class: "controls" }, [
    el("label", { text: "compare " }), selectA, el("label", { text: " with " }), selectB,
  ]);
}
