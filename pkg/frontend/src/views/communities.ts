// Communities view: the keyword and citation community structures side by
// side, plus a per-article wordcloud of relevant terms in its citation
// neighborhood (word size linear in count, colored by community).

import { clear, colorFor, el } from "../dom.js";
import type { ViewContext } from "../context.js";
import {
  isNotComputed,
  type CitationNetworkDoc,
  type NetworkDoc,
  type WordcloudDoc,
} from "../types.js";

function communityBlock(title: string, network: NetworkDoc, modularity: number | null): HTMLElement {
  const byCommunity = new Map<number, { keyword: string; frequency: number }[]>();
  for (const node of network.nodes) {
    if (node.community === null) continue;
    const list = byCommunity.get(node.community) ?? [];
    list.push({ keyword: node.keyword, frequency: node.frequency });
    byCommunity.set(node.community, list);
  }
  const block = el("div", { class: "community-block" }, [
    el("h3", { text: `${title} (${byCommunity.size} communities, Q=${modularity?.toFixed(3) ?? "?"})` }),
  ]);
  for (const id of [...byCommunity.keys()].sort((a, b) => a - b)) {
    const members = byCommunity.get(id)!;
    members.sort((a, b) => b.frequency - a.frequency);
    const words = members.slice(0, 10).map((m) => m.keyword).join(", ");
    block.append(el("div", { class: "community-row", "data-community": id }, [
      el("span", { class: "swatch", style: `background:${colorFor(id)}`, text: " " }),
      el("span", { text: `${id}: ${words}${members.length > 10 ? ", ..." : ""}` }),
    ]));
  }
  return block;
}

export async function renderCommunities(container: HTMLElement, ctx: ViewContext): Promise<void> {
  const { state, api } = ctx;
  clear(container);
  if (!state.snapshot) return;

  container.append(el("div", { class: "view-header" }, [el("h2", { text: "Community structures" })]));

  const keywordEnvelope = await api.keywordNetwork(state.snapshot);
  if (keywordEnvelope) {
    if (isNotComputed(keywordEnvelope.result)) {
      container.append(el("p", { class: "empty-state", text: keywordEnvelope.result.reason }));
    } else {
      const doc = keywordEnvelope.result as NetworkDoc;
      container.append(communityBlock("Declared keywords", doc, doc.modularity));
    }
  }

  const citationEnvelope = await api.citationNetwork(state.snapshot);
  if (citationEnvelope) {
    if (isNotComputed(citationEnvelope.result)) {
      container.append(el("p", { class: "empty-state", text: citationEnvelope.result.reason }));
    } else {
      const doc = citationEnvelope.result as CitationNetworkDoc;
      container.append(
        communityBlock(
          `Citation neighborhood (theta_w=${doc.theta_w}, k_max=${doc.k_max})`,
          doc.network,
          doc.network.modularity,
        ),
      );
    }
  }

  // wordcloud for one article's neighborhood
  const form = el("div", { class: "controls" });
  const input = el("input", {
    type: "text", class: "article-input", placeholder: "article id",
    value: state.article ?? "",
  });
  const button = el("button", { text: "show wordcloud" });
  button.addEventListener("click", () => ctx.update({ article: input.value.trim() || null }));
  form.append(el("label", { text: "article " }), input, button);
  container.append(form);

  if (state.article) {
    try {
      const cloudEnvelope = await api.wordcloud(state.snapshot, state.article);
      if (cloudEnvelope) {
        const cloud = cloudEnvelope.result as WordcloudDoc;
        const box = el("div", { class: "wordcloud", "data-article": cloud.article_id });
        const maxCount = Math.max(1, ...cloud.words.map((w) => w.count));
        for (const word of cloud.words.slice(0, 60)) {
          // font size linear in count
          const size = 10 + (word.count / maxCount) * 26;
          box.append(el("span", {
            class: "cloud-word",
            style: `font-size:${size.toFixed(1)}px;color:${colorFor(word.community)}`,
            "data-count": word.count,
            text: word.ngram + " ",
          }));
        }
        container.append(el("h3", { text: `Neighborhood wordcloud: ${cloud.article_id}` }), box);
      }
    } catch {
      container.append(el("p", { class: "empty-state", text: `unknown article ${state.article}` }));
    }
  }
}
