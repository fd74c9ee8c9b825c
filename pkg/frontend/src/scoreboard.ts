/** Pure scoring math over mutually revealed rounds. */

import { ScoreboardRound } from "./types.js";

/** Best average payoff any strategy without a box can reach. */
export const CLASSICAL_BOUND = 0.5;

export interface PairStats {
  n: number;
  meanPayoff: number;
}

export interface ScoreSummary {
  n: number;
  wins: number;
  losses: number;
  meanPayoff: number | null;
  winRate: number | null;
  /** keyed "xy", e.g. "01" for x=0, y=1 */
  perPair: Record<string, PairStats>;
  classicalBound: number;
}

export function summarize(rounds: ScoreboardRound[]): ScoreSummary {
  const perPair: Record<string, { n: number; total: number }> = {};
  let wins = 0;
  let total = 0;
  for (const r of rounds) {
    total += r.payoff;
    if (r.payoff > 0) wins += 1;
    const key = `${r.x}${r.y}`;
    (perPair[key] ??= { n: 0, total: 0 }).n += 1;
    perPair[key].total += r.payoff;
  }
  const n = rounds.length;
  return {
    n,
    wins,
    losses: n - wins,
    meanPayoff: n ? total / n : null,
    winRate: n ? wins / n : null,
    perPair: Object.fromEntries(
      Object.entries(perPair).map(([k, v]) => [
        k,
        { n: v.n, meanPayoff: v.total / v.n },
      ]),
    ),
    classicalBound: CLASSICAL_BOUND,
  };
}

/**
 * Positions for a horizontal payoff gauge: payoffs live in [-1, 1], the
 * classical bound renders as a reference line.  Returns percentages.
 */
export function gaugePositions(summary: ScoreSummary): {
  mean: number | null;
  bound: number;
} {
  const toPercent = (v: number) => ((v + 1) / 2) * 100;
  return {
    mean: summary.meanPayoff === null ? null : toPercent(summary.meanPayoff),
    bound: toPercent(summary.classicalBound),
  };
}
