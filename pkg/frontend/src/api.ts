// Thin typed client for the analysis service. Concurrent fetches on the
// same channel are sequence-numbered; a response that arrives after a
// newer request on its channel is discarded (returned as null).

import type {
  CitationNetworkDoc,
  ClustersDoc,
  CorrelationsDoc,
  Envelope,
  EvolutionDoc,
  FieldDoc,
  FlowsDoc,
  ModularityDoc,
  NetworkDoc,
  NotComputed,
  ProfilesDoc,
  SnapshotSummary,
  TopicsDoc,
  WordcloudDoc,
} from "./types.js";

export type FetchLike = (url: string) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  private sequences = new Map<string, number>();
  requestCount = 0;

  constructor(
    private base: string,
    private fetchFn: FetchLike = (url) => fetch(url),
  ) {}

  /** GET a path; returns null when a newer request superseded this one. */
  async get<T>(path: string, channel?: string): Promise<Envelope<T> | null> {
    const key = channel ?? path;
    const seq = (this.sequences.get(key) ?? 0) + 1;
    this.sequences.set(key, seq);
    this.requestCount += 1;
    const response = await this.fetchFn(`${this.base}${path}`);
    if (this.sequences.get(key) !== seq) {
      return null; // stale: a newer request went out on this channel
    }
    if (!response.ok) {
      const detail = await response.json().catch(() => ({}));
      throw new ApiError(response.status, JSON.stringify(detail));
    }
    return (await response.json()) as Envelope<T>;
  }

  async snapshots(): Promise<SnapshotSummary[]> {
    this.requestCount += 1;
    const response = await this.fetchFn(`${this.base}/snapshots`);
    if (!response.ok) throw new ApiError(response.status, "cannot list snapshots");
    const body = (await response.json()) as { snapshots: SnapshotSummary[] };
    return body.snapshots;
  }

  keywordNetwork(sid: string) {
    return this.get<NetworkDoc | NotComputed>(`/${sid}/networks/keywords`, "network");
  }

  citationNetwork(sid: string) {
    return this.get<CitationNetworkDoc | NotComputed>(`/${sid}/networks/citations`, "citnet");
  }

  semanticField(sid: string, keyword: string) {
    return this.get<FieldDoc>(`/${sid}/networks/keywords/field/${encodeURIComponent(keyword)}`, "field");
  }

  clusters(sid: string, method: string, allocation: string, k: number) {
    return this.get<ClustersDoc | NotComputed>(
      `/${sid}/countries/clusters?method=${method}&allocation=${allocation}&k=${k}`,
      "clusters",
    );
  }

  countryProfiles(sid: string, method: string, allocation: string) {
    return this.get<ProfilesDoc | NotComputed>(
      `/${sid}/countries/profiles?method=${method}&allocation=${allocation}`,
      "profiles",
    );
  }

  topics(sid: string) {
    return this.get<TopicsDoc | NotComputed>(`/${sid}/topics`, "topics");
  }

  evolution(sid: string, threshold: number | null) {
    const query = threshold === null ? "" : `?threshold=${threshold}`;
    return this.get<EvolutionDoc | NotComputed>(`/${sid}/topics/evolution${query}`, "evolution");
  }

  flows(sid: string, a: string, b: string) {
    return this.get<FlowsDoc | NotComputed>(`/${sid}/complementarity/flows?a=${a}&b=${b}`, "flows");
  }

  correlations(sid: string, a: string, b: string) {
    return this.get<CorrelationsDoc | NotComputed>(
      `/${sid}/complementarity/correlations?a=${a}&b=${b}`,
      "correlations",
    );
  }

  modularity(sid: string, a: string, b: string) {
    return this.get<ModularityDoc | NotComputed>(
      `/${sid}/complementarity/modularity?a=${a}&b=${b}`,
      "modularity",
    );
  }

  wordcloud(sid: string, articleId: string) {
    return this.get<WordcloudDoc>(`/${sid}/articles/${encodeURIComponent(articleId)}/wordcloud`, "wordcloud");
  }
}
