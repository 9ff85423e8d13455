/**
 * Thin typed client for the secready API. The base URL is configurable at
 * runtime: `window.SECREADY_API`, an `?api=` query parameter, or the
 * constructor argument (tests point it at an ephemeral server).
 */

import type {
  ApiErrorDoc,
  FrameworkDoc,
  FrameworkSummary,
  HistogramDoc,
  ResultDoc,
  SessionDoc,
  SummaryDoc,
  TrendDoc,
  UserDoc,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly details?: string[];

  constructor(status: number, doc: ApiErrorDoc) {
    super(doc.message);
    this.code = doc.code;
    this.status = status;
    this.details = doc.details;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (error) {
    throw new ApiError(0, { code: "network_error", message: `cannot reach ${url}: ${error}` });
  }
  const text = await response.text();
  let doc: unknown = null;
  if (text) {
    try {
      doc = JSON.parse(text);
    } catch {
      throw new ApiError(response.status, { code: "bad_response", message: "response is not JSON" });
    }
  }
  if (!response.ok) {
    const err = (doc ?? { code: "http_error", message: `HTTP ${response.status}` }) as ApiErrorDoc;
    throw new ApiError(response.status, err);
  }
  return doc as T;
}

export function defaultBaseUrl(): string {
  const w = globalThis as { SECREADY_API?: string; location?: Location };
  if (w.SECREADY_API) return w.SECREADY_API;
  if (w.location?.search) {
    const fromQuery = new URLSearchParams(w.location.search).get("api");
    if (fromQuery) return fromQuery;
  }
  return "http://127.0.0.1:8421";
}

export class ApiClient {
  readonly base: string;

  constructor(base?: string) {
    this.base = (base ?? defaultBaseUrl()).replace(/\/+$/, "");
  }

  listFrameworks(): Promise<FrameworkSummary[]> {
    return request(`${this.base}/api/frameworks`);
  }

  getFramework(id: string): Promise<FrameworkDoc> {
    return request(`${this.base}/api/frameworks/${encodeURIComponent(id)}`);
  }

  createUser(displayName: string): Promise<UserDoc> {
    return request(`${this.base}/api/users`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ display_name: displayName }),
    });
  }

  createSession(userId: string, frameworkId: string): Promise<SessionDoc> {
    return request(`${this.base}/api/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ user_id: userId, framework_id: frameworkId }),
    });
  }

  getSession(sessionId: string): Promise<SessionDoc> {
    return request(`${this.base}/api/sessions/${encodeURIComponent(sessionId)}`);
  }

  putAnswer(sessionId: string, leafId: string, grade: number): Promise<SessionDoc> {
    return request(
      `${this.base}/api/sessions/${encodeURIComponent(sessionId)}/answers/${encodeURIComponent(leafId)}`,
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ grade }),
      },
    );
  }

  finalize(sessionId: string): Promise<ResultDoc> {
    return request(`${this.base}/api/sessions/${encodeURIComponent(sessionId)}/finalize`, {
      method: "POST",
    });
  }

  getResult(sessionId: string): Promise<ResultDoc> {
    return request(`${this.base}/api/sessions/${encodeURIComponent(sessionId)}/result`);
  }

  getSummary(sessionId: string): Promise<SummaryDoc> {
    return request(`${this.base}/api/sessions/${encodeURIComponent(sessionId)}/summary`);
  }

  getHistogram(sessionId: string, level: "domains" | "controls"): Promise<HistogramDoc> {
    return request(
      `${this.base}/api/sessions/${encodeURIComponent(sessionId)}/histogram?level=${level}`,
    );
  }

  getTrend(userId: string): Promise<TrendDoc> {
    return request(`${this.base}/api/users/${encodeURIComponent(userId)}/trend`);
  }
}
