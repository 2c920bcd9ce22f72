/** Typed client for the campaign service. The console never computes
 * optimization logic; every displayed number comes through this client. */

export interface CategoricalVarDoc {
  name: string;
  levels: string[];
}

export interface ContinuousVarDoc {
  name: string;
  lower: number;
  upper: number;
}

export interface SpaceDoc {
  categoricals: CategoricalVarDoc[];
  continuous: ContinuousVarDoc[];
}

export interface PointDoc {
  cat: number[];
  con: number[];
}

export interface ObservationDoc {
  point: PointDoc;
  y: number;
  iteration: number;
  tag: string;
}

export interface AcqDoc {
  kind: string;
  xi: number;
  beta: number;
}

export interface CampaignDoc {
  schema_version: number;
  id?: string;
  space: SpaceDoc;
  config: {
    suggest: Record<string, number>;
    acq: AcqDoc;
    kernel: Record<string, unknown>;
    direction: "maximize" | "minimize";
  };
  history: ObservationDoc[];
  incumbent: { point: PointDoc; y: number } | null;
  trust_region: Record<string, number>;
  seed: number;
  pending: { point: PointDoc; tag: string } | null;
  initial_design: PointDoc[];
}

export interface CampaignSummary {
  id: string;
  n_observations: number;
  incumbent: { point: PointDoc; y: number } | null;
  trust_region: Record<string, number>;
  direction: string;
  acq: AcqDoc;
}

export interface CreateResponse {
  id: string;
  initial_design: PointDoc[];
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseError(resp: Response): Promise<never> {
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, detail);
}

export class CatboxClient {
  constructor(private base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  listCampaigns(): Promise<string[]> {
    return this.request("/campaigns");
  }

  createCampaign(space: SpaceDoc, config: Record<string, unknown> = {}): Promise<CreateResponse> {
    return this.request("/campaigns", {
      method: "POST",
      body: JSON.stringify({ space, config }),
    });
  }

  getCampaign(id: string): Promise<CampaignDoc> {
    return this.request(`/campaigns/${id}`);
  }

  tell(id: string, point: PointDoc, y: number): Promise<CampaignSummary> {
    return this.request(`/campaigns/${id}/tell`, {
      method: "POST",
      body: JSON.stringify({ point, y }),
    });
  }

  suggest(id: string): Promise<{ point: PointDoc; pending: boolean }> {
    return this.request(`/campaigns/${id}/suggest`, { method: "POST" });
  }

  patchConfig(id: string, patch: { acq?: string; xi?: number; beta?: number }): Promise<CampaignSummary> {
    return this.request(`/campaigns/${id}/config`, {
      method: "PATCH",
      body: JSON.stringify(patch),
    });
  }

  exportUrl(id: string): string {
    return `${this.base}/campaigns/${id}/export.csv`;
  }

  async exportCsv(id: string): Promise<string> {
    const resp = await fetch(this.exportUrl(id));
    if (!resp.ok) await parseError(resp);
    return await resp.text();
  }
}
