// Topics view: documents addressing each topic per year, with a threshold
// slider that re-queries the service, plus the per-topic top words.

import { clear, colorFor, el, svg } from "../dom.js";
import type { ViewContext } from "../context.js";
import { isNotComputed, type EvolutionDoc, type TopicsDoc } from "../types.js";

const WIDTH = 720;
const HEIGHT = 300;
const PAD = 36;

export async function renderTopics(container: HTMLElement, ctx: ViewContext): Promise<void> {
  const { state, api } = ctx;
  clear(container);
  if (!state.snapshot) return;

  const topicsEnvelope = await api.topics(state.snapshot);
  if (!topicsEnvelope) return;
  if (isNotComputed(topicsEnvelope.result)) {
    container.append(el("p", { class: "empty-state", text: topicsEnvelope.result.reason }));
    return;
  }
  const topics = topicsEnvelope.result as TopicsDoc;

  const evolutionEnvelope = await api.evolution(state.snapshot, state.threshold);
  if (!evolutionEnvelope) return;
  const evolution = evolutionEnvelope.result as EvolutionDoc;

  container.append(
    el("div", { class: "view-header" }, [
      el("h2", { text: `Topics over time (${topics.K} topics, ${topics.language})` }),
      el("span", { class: "threshold-label", text: `threshold ${evolution.threshold}` }),
    ]),
  );

  const slider = el("input", {
    type: "range", min: 0, max: 1, step: 0.05,
    value: evolution.threshold, class: "threshold-slider",
  });
  slider.addEventListener("change", () => ctx.update({ threshold: Number(slider.value) }));
  container.append(el("div", { class: "controls" }, [el("label", { text: "threshold " }), slider]));

  const years = evolution.years;
  const maxCount = Math.max(1, ...evolution.counts.flat());
  const x = (i: number) =>
    PAD + (years.length === 1 ? 0 : (i * (WIDTH - 2 * PAD)) / (years.length - 1));
  const y = (count: number) => HEIGHT - PAD - (count * (HEIGHT - 2 * PAD)) / maxCount;

  const plot = svg("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`, width: WIDTH, height: HEIGHT, class: "topics-plot",
  });
  plot.append(svg("line", { x1: PAD, y1: HEIGHT - PAD, x2: WIDTH - PAD, y2: HEIGHT - PAD, stroke: "#555" }));
  plot.append(svg("line", { x1: PAD, y1: PAD, x2: PAD, y2: HEIGHT - PAD, stroke: "#555" }));
  years.forEach((year, i) => {
    if (years.length <= 12 || i % 2 === 0) {
      plot.append(svg("text", {
        x: x(i), y: HEIGHT - PAD + 14, "text-anchor": "middle", class: "axis-label", text: year,
      }));
    }
  });
  for (let topic = 0; topic < topics.K; topic++) {
    const points = years.map((_, i) => `${x(i)},${y(evolution.counts[i][topic])}`).join(" ");
    plot.append(svg("polyline", {
      points,
      fill: "none",
      stroke: colorFor(topic),
      "stroke-width": 2,
      class: "topic-line",
      "data-topic": topic,
    }));
  }
  container.append(plot);

  const words = el("div", { class: "topic-words" });
  topics.topics.forEach((topic, idx) => {
    const line = topic.slice(0, 8).map((w) => w.word).join(", ");
    words.append(
      el("div", { class: "topic-row", "data-topic": idx }, [
        el("span", { class: "swatch", style: `background:${colorFor(idx)}`, text: " " }),
        el("span", { text: `topic ${idx}: ${line}` }),
      ]),
    );
  });
  container.append(words);
}
