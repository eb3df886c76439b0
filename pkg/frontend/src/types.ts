// Payload shapes of the analysis service. Everything rendered by the
// explorer comes from these documents; nothing is recomputed client-side.

export interface Envelope<T> {
  snapshot_id: string;
  config: Record<string, unknown>;
  result: T;
}

export interface SnapshotSummary {
  snapshot_id: string;
  created_at: string;
  corpus_digest: string;
  skipped: Record<string, string>;
}

export interface NetworkNode {
  keyword: string;
  frequency: number;
  degree: number;
  community: number | null;
}

export interface NetworkEdge {
  source: string;
  target: string;
  w_obs: number;
  w_e: number | null;
  mw: number | null;
}

export interface NetworkDoc {
  nodes: NetworkNode[];
  edges: NetworkEdge[];
  modularity: number | null;
}

export interface CitationNetworkDoc {
  network: NetworkDoc;
  theta_w: number;
  k_max: number;
  grid: { theta_w: number; k_max: number; node_count: number; modularity: number | null }[];
  pareto_front: { theta_w: number; k_max: number; node_count: number; modularity: number | null }[];
}

export interface FieldPoint {
  keyword: string;
  distance: number;
  angle_radians: number;
  community: number;
}

export interface FieldDoc {
  center: string;
  points: FieldPoint[];
  notice: string | null;
}

export interface ClustersDoc {
  method: string;
  allocation: string;
  k: number;
  inertia_share: number;
  assignment: Record<string, number>;
  cluster_mean_profiles: Record<string, number[]>;
  dendrogram: unknown[];
}

export interface ProfilesDoc {
  method: string;
  allocation: string;
  profiles: { country: string; shares: number[]; article_count: number }[];
}

export interface TopicsDoc {
  K: number;
  topics: { word: string; probability: number }[][];
  theta: Record<string, number[]>;
  doc_years: Record<string, number>;
  language: string;
}

export interface EvolutionDoc {
  threshold: number;
  years: number[];
  counts: number[][];
}

export interface SankeyDoc {
  nodes: { method: string; category: string; size: number }[];
  links: { source: number; target: number; value: number }[];
}

export interface FlowsDoc {
  method_a: string;
  method_b: string;
  categories_a: string[];
  categories_b: string[];
  flows: number[][];
  article_count: number;
  sankey: SankeyDoc;
}

export interface BandStats {
  mean: number;
  sd: number;
}

export interface CorrelationsDoc {
  method_a: string;
  method_b: string;
  rho: (number | null)[][];
  min_rho: number;
  max_rho: number;
  mean_abs_rho: number;
  null_lower: Record<string, BandStats>;
  null_upper: Record<string, BandStats>;
  b: number;
  shuffle_fraction: number;
}

export interface ModularityDoc {
  method_a: string;
  method_b: string;
  thresholds: number[];
  relative_modularity: (number | null)[];
}

export interface WordcloudDoc {
  article_id: string;
  words: { ngram: string; count: number; community: number | null }[];
}

export interface NotComputed {
  status: "not computed";
  reason: string;
}

export function isNotComputed(x: unknown): x is NotComputed {
  return typeof x === "object" && x !== null && (x as NotComputed).status === "not computed";
}

export interface GeoFeature {
  type: "Feature";
  properties: { iso_a2?: string; [key: string]: unknown };
  geometry: { type: string; coordinates: unknown } | null;
}

export interface GeoCollection {
  type: "FeatureCollection";
  features: GeoFeature[];
}
