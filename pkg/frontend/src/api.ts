// REST client for the tuning service. One place builds URLs; the rest of the
// dashboard never touches fetch directly.

import type { NetworkSpecDoc, PresetDoc, SessionInfo } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function asJson(response: Response): Promise<any> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      detail = body.detail ?? JSON.stringify(body);
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return response.json();
}

export class Client {
  constructor(private readonly base: string = "") {}

  wsUrl(sessionId: string): string {
    const origin = this.base || window.location.origin;
    return origin.replace(/^http/, "ws") + `/sessions/${sessionId}/stream`;
  }

  async presets(): Promise<PresetDoc[]> {
    const doc = await asJson(await fetch(`${this.base}/presets`));
    return doc.presets;
  }

  async createSession(spec: NetworkSpecDoc): Promise<{ id: string; session: SessionInfo }> {
    return asJson(
      await fetch(`${this.base}/sessions`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ spec }),
      }),
    );
  }

  async run(sessionId: string, untilMs?: number): Promise<SessionInfo> {
    return asJson(
      await fetch(`${this.base}/sessions/${sessionId}/run`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(untilMs === undefined ? {} : { until_ms: untilMs }),
      }),
    );
  }

  async pause(sessionId: string): Promise<SessionInfo> {
    return asJson(await fetch(`${this.base}/sessions/${sessionId}/pause`, { method: "POST" }));
  }

  async info(sessionId: string): Promise<SessionInfo> {
    return asJson(await fetch(`${this.base}/sessions/${sessionId}`));
  }

  async patchParam(sessionId: string, path: string, value: number): Promise<void> {
    await asJson(
      await fetch(`${this.base}/sessions/${sessionId}/params`, {
        method: "PATCH",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ [path]: value }),
      }),
    );
  }

  async stats(sessionId: string, windowMs: number): Promise<any> {
    return asJson(
      await fetch(`${this.base}/sessions/${sessionId}/stats?window_ms=${windowMs}`),
    );
  }

  async deleteSession(sessionId: string): Promise<void> {
    await fetch(`${this.base}/sessions/${sessionId}`, { method: "DELETE" });
  }
}
