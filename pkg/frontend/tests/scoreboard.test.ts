import { describe, expect, it } from "vitest";

import {
  CLASSICAL_BOUND,
  gaugePositions,
  summarize,
} from "../src/scoreboard.js";
import { ScoreboardRound } from "../src/types.js";

function round(
  x: number,
  y: number,
  payoff: number,
  tid = "t",
): ScoreboardRound {
  const a = 0;
  const b = payoff > 0 ? (x && y ? 1 : 0) : x && y ? 0 : 1;
  return { transactionID: tid, x, y, a, b, payoff };
}

describe("score summary", () => {
  it("is empty-safe", () => {
    const s = summarize([]);
    expect(s.n).toBe(0);
    expect(s.meanPayoff).toBeNull();
    expect(s.winRate).toBeNull();
    expect(s.perPair).toEqual({});
  });

  it("an all-wins session means payoff 1", () => {
    const s = summarize([round(0, 0, 1), round(1, 1, 1), round(0, 1, 1)]);
    expect(s.meanPayoff).toBe(1);
    expect(s.winRate).toBe(1);
    expect(s.losses).toBe(0);
  });

  it("mixed sessions score (wins - losses) / n", () => {
    const s = summarize([round(0, 0, 1), round(0, 0, 1), round(1, 1, -1), round(0, 1, 1)]);
    expect(s.n).toBe(4);
    expect(s.wins).toBe(3);
    expect(s.losses).toBe(1);
    expect(s.meanPayoff).toBe(0.5);
    expect(s.winRate).toBe(0.75);
  });

  it("breaks scores down per input pair", () => {
    const s = summarize([
      round(0, 0, 1),
      round(0, 0, -1),
      round(1, 1, 1),
    ]);
    expect(s.perPair["00"]).toEqual({ n: 2, meanPayoff: 0 });
    expect(s.perPair["11"]).toEqual({ n: 1, meanPayoff: 1 });
    expect(s.perPair["01"]).toBeUndefined();
  });

  it("always carries the classical reference at one half", () => {
    expect(CLASSICAL_BOUND).toBe(0.5);
    expect(summarize([]).classicalBound).toBe(0.5);
    expect(summarize([round(0, 0, 1)]).classicalBound).toBe(0.5);
  });
});

describe("payoff gauge", () => {
  it("maps [-1, 1] onto percentages with the bound at 75%", () => {
    const s = summarize([round(0, 0, 1)]);
    const g = gaugePositions(s);
    expect(g.bound).toBe(75); // payoff 0.5 on a -1..1 axis
    expect(g.mean).toBe(100);
  });

  it("hides the mean marker with no rounds", () => {
    expect(gaugePositions(summarize([])).mean).toBeNull();
  });
});
