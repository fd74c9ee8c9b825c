/**
 * One player's game state: the current round id, what they played, and what
 * the scoreboard has disclosed.  All state lives in the tab; the server is
 * consulted only through the documented endpoints, with this player's key.
 */

import { ApiError, BoxApi, FetchLike } from "./api.js";
import { roundId } from "./roundid.js";
import { summarize, ScoreSummary } from "./scoreboard.js";
import { RoundView, Role, SessionConfig } from "./types.js";

export interface PlayResult {
  round: RoundView;
  /** true when the press was a repeat and nothing was sent */
  alreadyPlayed: boolean;
}

export class GameSession {
  private readonly api: BoxApi;
  private counter = 1;
  private rounds = new Map<string, RoundView>();
  private order: string[] = [];

  constructor(
    readonly config: SessionConfig,
    fetchFn?: FetchLike,
    private readonly today: Date = new Date(),
  ) {
    this.api = new BoxApi(config.serverUrl, config.apiKey, fetchFn);
  }

  private get inputName(): "x" | "y" {
    return this.config.role === "alice" ? "x" : "y";
  }

  /** Confirm the key really is the configured side of the configured box. */
  async connect(): Promise<void> {
    const listing = await this.api.listBoxes();
    const mine = (listing.boxes ?? []).find(
      (b) => b.boxID === this.config.boxId,
    );
    if (!mine) {
      throw new ApiError(5, `this key belongs to no box ${this.config.boxId}`);
    }
    if (mine.role !== this.config.role) {
      throw new ApiError(
        5,
        `key is the ${mine.role} side, session configured as ${this.config.role}`,
      );
    }
  }

  get currentRoundId(): string {
    return roundId(this.today, this.counter);
  }

  get playedRounds(): RoundView[] {
    return this.order.map((tid) => this.rounds.get(tid)!);
  }

  /**
   * Play the current round with the given input.  A second press while the
   * round is already played is a local no-op: no request is issued, so a
   * jittery finger can never mint a duplicate transaction.
   */
  async playRound(input: 0 | 1): Promise<PlayResult> {
    const tid = this.currentRoundId;
    const existing = this.rounds.get(tid);
    if (existing) {
      return { round: existing, alreadyPlayed: true };
    }
    const output = await this.api.useBox(
      this.config.boxId,
      tid,
      this.inputName,
      input,
    );
    const round: RoundView = {
      transactionId: tid,
      myInput: input,
      myOutput: output,
      revealedByMe: false,
    };
    this.rounds.set(tid, round);
    this.order.push(tid);
    return { round, alreadyPlayed: false };
  }

  /** Move on to the next round id. */
  advance(): void {
    if (!this.rounds.has(this.currentRoundId)) {
      throw new Error("play the current round before advancing");
    }
    this.counter += 1;
  }

  /** Consent to disclosing one of my played rounds. */
  async reveal(transactionId: string): Promise<void> {
    const round = this.rounds.get(transactionId);
    if (!round) {
      throw new Error(`round ${transactionId} was not played here`);
    }
    await this.api.reveal(this.config.boxId, transactionId);
    round.revealedByMe = true;
  }

  /**
   * Pull the scoreboard and fill in opponent data for rounds both sides
   * revealed.  Until a round shows up there, the opponent fields stay
   * undefined.
   */
  async refreshScoreboard(): Promise<ScoreSummary> {
    const board = await this.api.scoreboard(this.config.boxId);
    const disclosed = board.rounds ?? [];
    for (const r of disclosed) {
      const mine = this.rounds.get(r.transactionID);
      if (!mine) continue;
      const opponent: Role = this.config.role === "alice" ? "bob" : "alice";
      mine.opponentInput = opponent === "bob" ? r.y : r.x;
      mine.opponentOutput = opponent === "bob" ? r.b : r.a;
      mine.payoff = r.payoff;
    }
    return summarize(disclosed);
  }
}
