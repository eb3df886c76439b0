// Correlations view: heatmap of column correlations between two
// classifications with the bootstrap null bands; cells stronger than the
// upper band are flagged. The relative-modularity curve for the same pair
// is drawn underneath.

import { clear, el, svg } from "../dom.js";
import type { ViewContext } from "../context.js";
import { isNotComputed, type CorrelationsDoc, type ModularityDoc } from "../types.js";
import { methodPairControls } from "./pair.js";

const CELL = 34;

function divergingColor(value: number): string {
  // blue (-1) .. white (0) .. red (+1)
  const t = Math.max(-1, Math.min(1, value));
  const other = Math.round(255 * (1 - Math.abs(t)));
  return t >= 0
    ? `rgb(255,${other},${other})`
    : `rgb(${other},${other},255)`;
}

export async function renderCorrelations(container: HTMLElement, ctx: ViewContext): Promise<void> {
  const { state, api } = ctx;
  clear(container);
  if (!state.snapshot) return;

  container.append(el("div", { class: "view-header" }, [el("h2", { text: "Correlations between classifications" })]));
  container.append(methodPairControls(ctx));

  const envelope = await api.correlations(state.snapshot, state.methodA, state.methodB);
  if (!envelope) return;
  if (isNotComputed(envelope.result)) {
    container.append(el("p", { class: "empty-state", text: envelope.result.reason }));
    return;
  }
  const doc = envelope.result as CorrelationsDoc;
  const upperMax = doc.null_upper.max.mean;

  const rows = doc.rho.length;
  const cols = rows ? doc.rho[0].length : 0;
  const plot = svg("svg", {
    viewBox: `0 0 ${cols * CELL + 60} ${rows * CELL + 40}`,
    width: cols * CELL + 60,
    height: rows * CELL + 40,
    class: "correlation-plot",
  });
  doc.rho.forEach((row, i) => {
    row.forEach((value, j) => {
      const outside = value !== null && Math.abs(value) > upperMax;
      const rect = svg("rect", {
        x: 40 + j * CELL, y: 20 + i * CELL, width: CELL - 2, height: CELL - 2,
        fill: value === null ? "#f4f4f4" : divergingColor(value),
        class: outside ? "rho-cell outside-band" : "rho-cell",
        stroke: outside ? "#000" : "#dddddd",
        "stroke-width": outside ? 2 : 1,
        "data-rho": value === null ? "" : value,
      });
      rect.append(svg("title", {
        text: value === null ? "undefined" : `rho(${i},${j}) = ${value.toFixed(3)}`,
      }));
      plot.append(rect);
    });
  });
  container.append(plot);

  const fmt = (x: number) => x.toFixed(3);
  const band = (stats: { mean: number; sd: number }) => `${fmt(stats.mean)} +/- ${fmt(stats.sd)}`;
  container.append(el("table", { class: "band-table" }, [
    el("tr", {}, [el("th", { text: "" }), el("th", { text: "observed" }),
      el("th", { text: "lower null (full shuffle)" }), el("th", { text: "upper null (50% self-shuffle)" })]),
    el("tr", {}, [el("td", { text: "max rho" }), el("td", { text: fmt(doc.max_rho), class: "observed-max" }),
      el("td", { text: band(doc.null_lower.max) }), el("td", { text: band(doc.null_upper.max) })]),
    el("tr", {}, [el("td", { text: "min rho" }), el("td", { text: fmt(doc.min_rho) }),
      el("td", { text: band(doc.null_lower.min) }), el("td", { text: band(doc.null_upper.min) })]),
    el("tr", {}, [el("td", { text: "mean |rho|" }), el("td", { text: fmt(doc.mean_abs_rho) }),
      el("td", { text: band(doc.null_lower.mean_abs) }), el("td", { text: band(doc.null_upper.mean_abs) })]),
  ]));

  const modEnvelope = await api.modularity(state.snapshot, state.methodA, state.methodB);
  if (modEnvelope && !isNotComputed(modEnvelope.result)) {
    const curve = modEnvelope.result as ModularityDoc;
    const width = 360, height = 140, pad = 28;
    const defined = curve.relative_modularity.filter((v): v is number => v !== null);
    const maxVal = Math.max(1, ...defined);
    const x = (i: number) => pad + (i * (width - 2 * pad)) / Math.max(1, curve.thresholds.length - 1);
    const y = (v: number) => height - pad - (v / maxVal) * (height - 2 * pad);
    const mini = svg("svg", {
      viewBox: `0 0 ${width} ${height}`, width, height, class: "modularity-plot",
    });
    mini.append(svg("line", { x1: pad, y1: height - pad, x2: width - pad, y2: height - pad, stroke: "#555" }));
    const points = curve.relative_modularity
      .map((v, i) => (v === null ? null : `${x(i)},${y(v)}`))
      .filter((p): p is string => p !== null)
      .join(" ");
    mini.append(svg("polyline", { points, fill: "none", stroke: "#4269d0", "stroke-width": 2 }));
    container.append(el("div", { class: "modularity-block" }, [
      el("h3", { text: `Relative modularity of ${curve.method_a} in ${curve.method_b}-induced networks` }),
      mini,
    ]));
  }
}
