// Flows view: alluvial diagram of the flow matrix between two methods.
// Link widths are proportional to flow mass; hovering shows the share of
// the total.

import { clear, colorFor, el, svg } from "../dom.js";
import type { ViewContext } from "../context.js";
import { isNotComputed, type FlowsDoc } from "../types.js";
import { methodPairControls } from "./pair.js";

const WIDTH = 720;
const HEIGHT = 440;
const COLUMN = 120;
const GAP = 6;

export async function renderFlows(container: HTMLElement, ctx: ViewContext): Promise<void> {
  const { state, api } = ctx;
  clear(container);
  if (!state.snapshot) return;

  container.append(el("div", { class: "view-header" }, [el("h2", { text: "Classification flows" })]));
  container.append(methodPairControls(ctx));

  const envelope = await api.flows(state.snapshot, state.methodA, state.methodB);
  if (!envelope) return;
  if (isNotComputed(envelope.result)) {
    container.append(el("p", { class: "empty-state", text: envelope.result.reason }));
    return;
  }
  const doc = envelope.result as FlowsDoc;
  const { nodes, links } = doc.sankey;
  const total = links.reduce((sum, link) => sum + link.value, 0) || 1;

  const leftNodes = nodes.filter((n) => n.method === doc.method_a);
  const rightNodes = nodes.filter((n) => n.method === doc.method_b);
  const sizeSum = (list: typeof nodes) => list.reduce((s, n) => s + n.size, 0) || 1;
  const usable = HEIGHT - GAP * Math.max(leftNodes.length, rightNodes.length);

  function layout(list: typeof nodes): { y0: number; y1: number }[] {
    const totalSize = sizeSum(list);
    let y = 0;
    return list.map((node) => {
      const h = Math.max(2, (node.size / totalSize) * usable);
      const band = { y0: y, y1: y + h };
      y += h + GAP;
      return band;
    });
  }

  const leftBands = layout(leftNodes);
  const rightBands = layout(rightNodes);
  const x0 = COLUMN;
  const x1 = WIDTH - COLUMN;
  const plot = svg("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT + 20}`, width: WIDTH, height: HEIGHT + 20, class: "flows-plot",
  });

  const leftOffsets = leftBands.map((b) => b.y0);
  const rightOffsets = rightBands.map((b) => b.y0);
  const tooltip = el("div", { class: "tooltip", text: "" });

  for (const link of links) {
    const li = link.source;
    const ri = link.target - leftNodes.length;
    const leftTotal = leftNodes[li].size || 1;
    const rightTotal = rightNodes[ri].size || 1;
    const hL = (link.value / leftTotal) * (leftBands[li].y1 - leftBands[li].y0);
    const hR = (link.value / rightTotal) * (rightBands[ri].y1 - rightBands[ri].y0);
    const yL = leftOffsets[li];
    const yR = rightOffsets[ri];
    leftOffsets[li] += hL;
    rightOffsets[ri] += hR;
    const mid = (x0 + x1) / 2;
    const d = [
      `M${x0},${yL}`,
      `C${mid},${yL} ${mid},${yR} ${x1},${yR}`,
      `L${x1},${yR + hR}`,
      `C${mid},${yR + hR} ${mid},${yL + hL} ${x0},${yL + hL}`,
      "Z",
    ].join(" ");
    const share = link.value / total;
    const path = svg("path", {
      d,
      class: "flow-link",
      fill: colorFor(li),
      opacity: 0.55,
      "data-value": link.value,
      "data-share": share,
    });
    path.addEventListener("mouseenter", () => {
      tooltip.textContent =
        `${leftNodes[li].category} -> ${rightNodes[ri].category}: ` +
        `${(share * 100).toFixed(1)}% of total mass`;
    });
    path.addEventListener("mouseleave", () => { tooltip.textContent = ""; });
    plot.append(path);
  }

  leftNodes.forEach((node, i) => {
    plot.append(svg("rect", {
      x: x0 - 10, y: leftBands[i].y0, width: 10, height: leftBands[i].y1 - leftBands[i].y0,
      fill: colorFor(i), class: "flow-node", "data-category": node.category,
    }));
    plot.append(svg("text", {
      x: x0 - 14, y: (leftBands[i].y0 + leftBands[i].y1) / 2, "text-anchor": "end",
      class: "axis-label", text: `${doc.method_a}:${node.category}`,
    }));
  });
  rightNodes.forEach((node, i) => {
    plot.append(svg("rect", {
      x: x1, y: rightBands[i].y0, width: 10, height: rightBands[i].y1 - rightBands[i].y0,
      fill: "#888", class: "flow-node", "data-category": node.category,
    }));
    plot.append(svg("text", {
      x: x1 + 14, y: (rightBands[i].y0 + rightBands[i].y1) / 2, "text-anchor": "start",
      class: "axis-label", text: `${doc.method_b}:${node.category}`,
    }));
  });

  container.append(plot, tooltip);
  container.append(el("p", {
    class: "hint",
    text: `${doc.article_count} articles classified by both methods; link width is flow mass.`,
  }));
}
