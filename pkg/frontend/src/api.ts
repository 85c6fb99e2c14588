import type {
  CatalogResponse,
  ChoroplethCollection,
  FireSummary,
  HotspotResponse,
  Level,
  ResultRow,
  UnitDetail,
  UnitSummary,
  WeightsDoc,
  WhatifResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  if (!res.ok) {
    let detail = `${res.status} ${res.statusText}`;
    try {
      const body: unknown = await res.json();
      if (
        body &&
        typeof body === "object" &&
        typeof (body as { detail?: unknown }).detail === "string"
      ) {
        detail = (body as { detail: string }).detail;
      }
    } catch {
      // body was not JSON; keep the status line
    }
    throw new ApiError(res.status, detail);
  }
  return res.json() as Promise<T>;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  catalog(): Promise<CatalogResponse> {
    return request(`${this.base}/api/catalog`);
  }

  units(level?: Level): Promise<UnitSummary[]> {
    const q = level ? `?level=${level}` : "";
    return request(`${this.base}/api/units${q}`);
  }

  results(level: Level): Promise<ResultRow[]> {
    return request(`${this.base}/api/results?level=${level}`);
  }

  choropleth(level: Level): Promise<ChoroplethCollection> {
    return request(`${this.base}/api/choropleth/${level}`);
  }

  unit(unitId: string): Promise<UnitDetail> {
    return request(`${this.base}/api/unit/${encodeURIComponent(unitId)}`);
  }

  fireSummary(): Promise<FireSummary> {
    return request(`${this.base}/api/fire-risk/summary`);
  }

  hotspots(level: Level): Promise<HotspotResponse> {
    return request(`${this.base}/api/hotspots?level=${level}`);
  }

  whatif(weights: Partial<WeightsDoc>, signal?: AbortSignal): Promise<WhatifResponse> {
    return request(`${this.base}/api/whatif`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(weights),
      signal,
    });
  }
}
