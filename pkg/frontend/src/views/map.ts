// Map view: country clusters as a choropleth joined on iso_a2, cluster
// mean profiles as stacked bars, and a cluster-count slider served by
// on-the-fly dendrogram cuts. Geometry comes from a static
// geometry.geojson next to the page; square tiles stand in when absent.

import { clear, colorFor, el, svg } from "../dom.js";
import type { ViewContext } from "../context.js";
import {
  isNotComputed,
  type ClustersDoc,
  type GeoCollection,
  type ProfilesDoc,
} from "../types.js";

const WIDTH = 720;
const HEIGHT = 420;

interface MapCache {
  geometry: GeoCollection | null;
  geometryLoaded: boolean;
  profilesKey: string;
  profiles: ProfilesDoc | null;
}

const cache: MapCache = { geometry: null, geometryLoaded: false, profilesKey: "", profiles: null };

async function loadGeometry(): Promise<GeoCollection | null> {
  if (cache.geometryLoaded) return cache.geometry;
  cache.geometryLoaded = true;
  try {
    const response = await fetch("./geometry.geojson");
    if (response.ok) cache.geometry = (await response.json()) as GeoCollection;
  } catch {
    cache.geometry = null;
  }
  return cache.geometry;
}

function tileGeometry(codes: string[]): GeoCollection {
  // fallback: one square tile per country, alphabetical grid
  const features = codes.sort().map((code, i) => {
    const x = (i % 8) * 2;
    const y = Math.floor(i / 8) * 2;
    return {
      type: "Feature" as const,
      properties: { iso_a2: code },
      geometry: {
        type: "Polygon",
        coordinates: [[[x, y], [x + 1.6, y], [x + 1.6, y + 1.6], [x, y + 1.6], [x, y]]],
      },
    };
  });
  return { type: "FeatureCollection", features };
}

function polygonRings(geometry: { type: string; coordinates: unknown }): number[][][] {
  if (geometry.type === "Polygon") return geometry.coordinates as number[][][];
  if (geometry.type === "MultiPolygon") {
    return (geometry.coordinates as number[][][][]).flat();
  }
  return [];
}

export async function renderMap(container: HTMLElement, ctx: ViewContext): Promise<void> {
  const { state, api } = ctx;
  clear(container);
  if (!state.snapshot) return;

  const envelope = await api.clusters(state.snapshot, state.method, state.allocation, state.k);
  if (!envelope) return;
  if (isNotComputed(envelope.result)) {
    container.append(el("p", { class: "empty-state", text: envelope.result.reason }));
    return;
  }
  const clusters = envelope.result as ClustersDoc;

  const profilesKey = `${state.snapshot}:${state.method}:${state.allocation}`;
  if (cache.profilesKey !== profilesKey) {
    const profEnvelope = await api.countryProfiles(state.snapshot, state.method, state.allocation);
    cache.profiles = profEnvelope && !isNotComputed(profEnvelope.result)
      ? (profEnvelope.result as ProfilesDoc)
      : null;
    cache.profilesKey = profilesKey;
  }
  const profileByCountry = new Map(
    (cache.profiles?.profiles ?? []).map((p) => [p.country, p]),
  );

  const header = el("div", { class: "view-header" }, [
    el("h2", { text: `Country clusters: ${clusters.method} / ${clusters.allocation}` }),
    el("span", {
      class: "inertia-label",
      text: `k=${clusters.k}, inertia share ${(clusters.inertia_share * 100).toFixed(1)}%`,
    }),
  ]);
  container.append(header);

  const controls = el("div", { class: "controls" });
  const methodSelect = el("select", { class: "method-select" });
  for (const method of ["keywords", "citations", "topics"]) {
    const option = el("option", { value: method, text: method });
    if (method === state.method) option.setAttribute("selected", "selected");
    methodSelect.append(option);
  }
  methodSelect.addEventListener("change", () => ctx.update({ method: methodSelect.value }));
  const allocationSelect = el("select", { class: "allocation-select" });
  for (const allocation of ["studied", "authoring"]) {
    const option = el("option", { value: allocation, text: allocation });
    if (allocation === state.allocation) option.setAttribute("selected", "selected");
    allocationSelect.append(option);
  }
  allocationSelect.addEventListener("change", () =>
    ctx.update({ allocation: allocationSelect.value as "authoring" | "studied" }),
  );
  const slider = el("input", {
    type: "range",
    min: 1,
    max: Math.max(state.k, Object.keys(clusters.assignment).length),
    value: state.k,
    class: "k-slider",
  });
  slider.addEventListener("change", () => ctx.update({ k: Number(slider.value) }));
  controls.append(
    el("label", { text: "method " }), methodSelect,
    el("label", { text: " allocation " }), allocationSelect,
    el("label", { text: " clusters " }), slider,
  );
  container.append(controls);

  let geometry = await loadGeometry();
  if (!geometry || !geometry.features.length) {
    geometry = tileGeometry(Object.keys(clusters.assignment));
  }

  // equirectangular fit of all rings into the viewport
  let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  for (const feature of geometry.features) {
    if (!feature.geometry) continue;
    for (const ring of polygonRings(feature.geometry)) {
      for (const [x, y] of ring) {
        minX = Math.min(minX, x); maxX = Math.max(maxX, x);
        minY = Math.min(minY, y); maxY = Math.max(maxY, y);
      }
    }
  }
  const scale = Math.min(WIDTH / (maxX - minX || 1), HEIGHT / (maxY - minY || 1));
  const px = (x: number) => (x - minX) * scale;
  const py = (y: number) => HEIGHT - (y - minY) * scale;

  const plot = svg("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    width: WIDTH,
    height: HEIGHT,
    class: "map-plot",
  });
  const tooltip = el("div", { class: "tooltip", text: "" });
  for (const feature of geometry.features) {
    const code = feature.properties.iso_a2;
    if (!feature.geometry || !code) continue;
    const cluster = clusters.assignment[code];
    const d = polygonRings(feature.geometry)
      .map((ring) => "M" + ring.map(([x, y]) => `${px(x).toFixed(1)},${py(y).toFixed(1)}`).join("L") + "Z")
      .join(" ");
    const path = svg("path", {
      d,
      class: "country",
      fill: cluster === undefined ? "#eeeeee" : colorFor(cluster),
      stroke: "#ffffff",
      "data-country": code,
      "data-cluster": cluster === undefined ? "" : cluster,
    });
    path.addEventListener("mouseenter", () => {
      const profile = profileByCountry.get(code);
      const shares = profile
        ? profile.shares.map((v) => v.toFixed(3)).join(", ")
        : "no profile";
      tooltip.textContent = `${code} - cluster ${cluster ?? "none"} - [${shares}]`;
    });
    path.addEventListener("mouseleave", () => { tooltip.textContent = ""; });
    plot.append(path);
  }
  container.append(plot, tooltip);

  const bars = el("div", { class: "cluster-profiles" });
  const clusterIds = Object.keys(clusters.cluster_mean_profiles).sort((a, b) => Number(a) - Number(b));
  for (const id of clusterIds) {
    const profile = clusters.cluster_mean_profiles[id];
    const row = el("div", { class: "cluster-row", "data-cluster": id });
    row.append(el("span", { class: "swatch", style: `background:${colorFor(Number(id))}`, text: " " }));
    row.append(el("span", { text: `cluster ${id}` }));
    const bar = svg("svg", { width: 320, height: 14, class: "profile-bar" });
    let offset = 0;
    profile.forEach((share, categoryIdx) => {
      const w = share * 320;
      bar.append(svg("rect", {
        x: offset, y: 0, width: w, height: 14,
        fill: colorFor(categoryIdx),
        "data-share": share,
      }));
      offset += w;
    });
    row.append(bar);
    bars.append(row);
  }
  container.append(bars);
}
