// Semantic-field view: the selected keyword at the center, neighbors on a
// radial layout at the service-computed distance (1/modal weight), with a
// reference circle at distance 1. Clicking a neighbor re-centers the field.

import { clear, colorFor, el, svg } from "../dom.js";
import type { ViewContext } from "../context.js";
import { isNotComputed, type FieldDoc, type NetworkDoc } from "../types.js";

const SIZE = 640;
const PAD = 40;

export async function renderField(container: HTMLElement, ctx: ViewContext): Promise<void> {
  const { state, api } = ctx;
  clear(container);
  if (!state.snapshot) return;

  let keyword = state.keyword;
  if (!keyword) {
    const network = await api.keywordNetwork(state.snapshot);
    if (!network) return;
    if (isNotComputed(network.result)) {
      container.append(el("p", { class: "empty-state", text: network.result.reason }));
      return;
    }
    const nodes = (network.result as NetworkDoc).nodes;
    if (!nodes.length) return;
    keyword = nodes.reduce((a, b) => (b.frequency > a.frequency ? b : a)).keyword;
  }

  const envelope = await api.semanticField(state.snapshot, keyword);
  if (!envelope) return; // superseded by a newer selection
  const field: FieldDoc = envelope.result;

  const header = el("div", { class: "view-header" }, [
    el("h2", { text: `Semantic field: ${field.center}` }),
  ]);
  container.append(header);

  if (!field.points.length) {
    container.append(
      el("p", { class: "empty-state", text: field.notice ?? "no linked neighbors" }),
    );
    return;
  }

  const maxDistance = Math.max(1, ...field.points.map((p) => p.distance));
  const unitPx = (SIZE / 2 - PAD) / maxDistance;

  const plot = svg("svg", {
    viewBox: `0 0 ${SIZE} ${SIZE}`,
    width: SIZE,
    height: SIZE,
    class: "field-plot",
  });
  const cx = SIZE / 2;
  plot.append(
    svg("circle", {
      class: "unit-circle",
      cx,
      cy: cx,
      r: unitPx,
      fill: "none",
      stroke: "#999",
      "stroke-dasharray": "4 3",
    }),
  );
  plot.append(svg("circle", { class: "field-center", cx, cy: cx, r: 6, fill: "#222" }));
  const centerLabel = svg("text", { x: cx, y: cx - 12, "text-anchor": "middle", text: field.center });
  centerLabel.setAttribute("class", "center-label");
  plot.append(centerLabel);

  for (const point of field.points) {
    const x = cx + point.distance * unitPx * Math.cos(point.angle_radians);
    const y = cx + point.distance * unitPx * Math.sin(point.angle_radians);
    const dot = svg("circle", {
      class: "field-neighbor",
      cx: x,
      cy: y,
      r: 5,
      fill: colorFor(point.community),
      "data-keyword": point.keyword,
      "data-distance": point.distance,
      "data-community": point.community,
    });
    dot.append(svg("title", { text: `${point.keyword} (distance ${point.distance.toFixed(3)})` }));
    dot.addEventListener("click", () => ctx.update({ keyword: point.keyword }));
    plot.append(dot);
    const label = svg("text", {
      x,
      y: y - 8,
      "text-anchor": "middle",
      class: "neighbor-label",
      text: point.keyword,
    });
    label.addEventListener("click", () => ctx.update({ keyword: point.keyword }));
    plot.append(label);
  }
  container.append(plot);
  container.append(
    el("p", {
      class: "hint",
      text: "Dashed circle marks modal weight 1; closer neighbors co-occur more than expected. Click a neighbor to re-center.",
    }),
  );
}
