/** Thin fetch wrapper over the box service's JSON API. */

import {
  ListBoxesReply,
  ScoreboardReply,
  STATUS_MESSAGES,
  UseBoxReply,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: { method?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

function describe(status: number, error?: string): string {
  return error ?? STATUS_MESSAGES[status] ?? `status ${status}`;
}

export class BoxApi {
  private readonly base: string;

  constructor(
    serverUrl: string,
    private readonly apiKey: string,
    private readonly fetchFn: FetchLike = globalThis.fetch as FetchLike,
  ) {
    this.base = serverUrl.replace(/\/+$/, "");
  }

  private async call<T extends { status: number; error?: string }>(
    path: string,
    params: Record<string, string | number>,
    method = "GET",
  ): Promise<T> {
    const query = new URLSearchParams({ apiKey: this.apiKey });
    for (const [k, v] of Object.entries(params)) query.set(k, String(v));
    let resp;
    try {
      resp = await this.fetchFn(`${this.base}${path}?${query}`, { method });
    } catch (exc) {
      throw new ApiError(-1, `cannot reach server: ${exc}`);
    }
    const body = (await resp.json()) as T;
    if (body.status !== 0) {
      throw new ApiError(body.status, describe(body.status, body.error));
    }
    return body;
  }

  /** Play this side of one transaction.  Returns the output symbol. */
  async useBox(
    boxId: number,
    transactionId: string,
    inputName: "x" | "y",
    input: number,
  ): Promise<number> {
    const body = await this.call<UseBoxReply>("/api/v1/useBox", {
      boxID: boxId,
      transactionID: transactionId,
      [inputName]: input,
    });
    const out = inputName === "x" ? body.a : body.b;
    if (out === undefined) {
      throw new ApiError(-1, "reply is missing the output symbol");
    }
    return out;
  }

  async listBoxes(): Promise<ListBoxesReply> {
    return this.call<ListBoxesReply>("/api/v1/listBoxes", {});
  }

  async reveal(boxId: number, transactionId: string): Promise<void> {
    await this.call(
      "/api/v1/game/reveal",
      { boxID: boxId, transactionID: transactionId },
      "POST",
    );
  }

  async scoreboard(boxId: number): Promise<ScoreboardReply> {
    return this.call<ScoreboardReply>("/api/v1/game/scoreboard", {
      boxID: boxId,
    });
  }
}
