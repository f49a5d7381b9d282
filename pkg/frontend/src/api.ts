/** Thin fetch client for the workbench service. */
import type {
  BerTable, ChannelModel, ExitCurves, JobKind, JobOut, Profile, ProfileOut,
  SexitBundle,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function orThrow(resp: Response): Promise<Response> {
  if (resp.ok) return resp;
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    if (body && body.detail) {
      detail = Array.isArray(body.detail) ? body.detail.join("; ") : String(body.detail);
    }
  } catch {
    // keep statusText
  }
  throw new ApiError(resp.status, detail);
}

export class ApiClient {
  constructor(readonly base: string, private readonly fetchImpl?: FetchLike) {}

  private f(url: string, init?: RequestInit): Promise<Response> {
    const impl = this.fetchImpl ?? fetch;
    return impl(`${this.base}${url}`, init);
  }

  private async json<T>(url: string, init?: RequestInit): Promise<T> {
    const resp = await orThrow(await this.f(url, init));
    return (await resp.json()) as T;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.json("/health");
  }

  listProfiles(): Promise<{ profiles: ProfileOut[] }> {
    return this.json("/profiles");
  }

  getProfile(name: string): Promise<ProfileOut> {
    return this.json(`/profiles/${encodeURIComponent(name)}`);
  }

  saveProfile(name: string, profile: Profile): Promise<ProfileOut> {
    return this.json(`/profiles/${encodeURIComponent(name)}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(profile),
    });
  }

  deleteProfile(name: string): Promise<void> {
    return this.f(`/profiles/${encodeURIComponent(name)}`, { method: "DELETE" })
      .then(orThrow).then(() => undefined);
  }

  exitCurves(body: { profile?: Profile; profile_name?: string; channel: ChannelModel; n_points?: number }):
    Promise<ExitCurves> {
    return this.json("/analytic/exit", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  submitJob(kind: JobKind, params: Record<string, unknown>): Promise<JobOut> {
    return this.json("/jobs", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ kind, params }),
    });
  }

  getJob(id: string): Promise<JobOut> {
    return this.json(`/jobs/${id}`);
  }

  cancelJob(id: string): Promise<JobOut> {
    return this.json(`/jobs/${id}`, { method: "DELETE" });
  }

  bundleResult(id: string): Promise<SexitBundle> {
    return this.json(`/results/${id}`);
  }

  berResult(id: string): Promise<BerTable> {
    return this.json(`/results/${id}/files/table.json`);
  }

  async resultJson<T>(id: string): Promise<T> {
    return this.json(`/results/${id}`);
  }
}
