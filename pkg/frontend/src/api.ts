/** Thin fetch client for the session API. The console's only configuration
 * is the base URL; every number it renders originates in these payloads. */

import type {
  FramePayload,
  Intervention,
  ScenarioInfo,
  SeriesPayload,
  SessionSummary,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let res: Response;
  try {
    res = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, "network", `cannot reach ${url}: ${String(err)}`);
  }
  const body = await res.json().catch(() => null);
  if (!res.ok) {
    const code = body?.error?.code ?? "http_error";
    const message = body?.error?.message ?? `HTTP ${res.status}`;
    throw new ApiError(res.status, code, message);
  }
  return body as T;
}

function post(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  };
}

export class ApiClient {
  constructor(public baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  async listScenarios(): Promise<ScenarioInfo[]> {
    const doc = await request<{ scenarios: ScenarioInfo[] }>(
      `${this.baseUrl}/scenarios`,
    );
    return doc.scenarios;
  }

  async createSession(scenario: string | object): Promise<SessionSummary> {
    const doc = await request<{ session: SessionSummary }>(
      `${this.baseUrl}/sessions`,
      post({ scenario }),
    );
    return doc.session;
  }

  async step(
    sessionId: string,
    interventions: Intervention[],
    feedbackGamma?: number,
  ): Promise<FramePayload> {
    const body: Record<string, unknown> = { interventions };
    if (feedbackGamma !== undefined) {
      body.feedback_gamma = feedbackGamma;
    }
    const doc = await request<{ frame: FramePayload }>(
      `${this.baseUrl}/sessions/${sessionId}/step`,
      post(body),
    );
    return doc.frame;
  }

  async fork(sessionId: string, atStep: number): Promise<SessionSummary> {
    const doc = await request<{ session: SessionSummary }>(
      `${this.baseUrl}/sessions/${sessionId}/fork`,
      post({ at_step: atStep }),
    );
    return doc.session;
  }

  async series(sessionId: string): Promise<SeriesPayload> {
    return request<SeriesPayload>(`${this.baseUrl}/sessions/${sessionId}/series`);
  }
}
