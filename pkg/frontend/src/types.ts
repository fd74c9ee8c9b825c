/** Wire shapes of the box service, plus the console's own view models. */

export type Role = "alice" | "bob";

/** Protocol status codes carried in every JSON reply. */
export const STATUS_MESSAGES: Record<number, string> = {
  0: "ok",
  1: "bad or missing API key",
  2: "unknown box",
  3: "invalid request: check the input and transaction id",
  4: "this round was already played with a different input",
  5: "your key is not this side of this box",
  6: "server busy, try again",
};

export interface UseBoxReply {
  status: number;
  boxID?: number;
  a?: number;
  b?: number;
  error?: string;
}

export interface BoxListing {
  boxID: number;
  role: Role;
  behavior: string;
}

export interface ListBoxesReply {
  status: number;
  boxes?: BoxListing[];
  error?: string;
}

export interface ScoreboardRound {
  transactionID: string;
  x: number;
  y: number;
  a: number;
  b: number;
  payoff: number;
}

export interface ScoreboardReply {
  status: number;
  boxID?: number;
  rounds?: ScoreboardRound[];
  meanPayoff?: number | null;
  error?: string;
}

export interface SessionConfig {
  serverUrl: string;
  apiKey: string;
  boxId: number;
  role: Role;
}

/**
 * One round as this player sees it.  Opponent data stays undefined until the
 * scoreboard says both sides revealed; the console never learns it any other
 * way.
 */
export interface RoundView {
  transactionId: string;
  myInput: number;
  myOutput: number;
  revealedByMe: boolean;
  opponentInput?: number;
  opponentOutput?: number;
  payoff?: number;
}
