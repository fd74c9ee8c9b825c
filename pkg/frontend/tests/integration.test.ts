/**
 * Full round trip against a real server process: provision a PR box over the
 * admin API, run two sessions (one per key) through 20 rounds with deliberate
 * repeated presses, reveal from both sides, and read the scoreboard back.
 */

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { gaugePositions } from "../src/scoreboard.js";
import { GameSession } from "../src/session.js";

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;
const ADMIN_KEY = "itest";
const TODAY = new Date(2021, 10, 6);

let server: ChildProcess;
let stderrTail = "";
let aliceKey: string;
let bobKey: string;
let boxId: number;

async function waitForHealth(deadlineMs: number): Promise<void> {
  const deadline = Date.now() + deadlineMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/api/v1/health`);
      if (resp.ok) return;
    } catch {
      // not listening yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error(`server never became healthy; stderr:\n${stderrTail}`);
}

async function adminPost(
  path: string,
  fields: Record<string, string>,
): Promise<Record<string, unknown>> {
  const resp = await fetch(`${BASE}${path}`, {
    method: "POST",
    headers: { "X-Admin-Key": ADMIN_KEY },
    body: new URLSearchParams(fields),
  });
  if (!resp.ok) {
    throw new Error(`${path} -> HTTP ${resp.status}: ${await resp.text()}`);
  }
  return (await resp.json()) as Record<string, unknown>;
}

beforeAll(async () => {
  server = spawn(
    "nsbox",
    ["serve", "--port", String(PORT), "--admin-key", ADMIN_KEY, "--seed", "5"],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  server.stderr!.on("data", (chunk) => {
    stderrTail = (stderrTail + chunk.toString()).slice(-4000);
  });
  await waitForHealth(30_000);

  const alice = await adminPost("/api/v1/admin/createUser", {
    displayName: "Alice",
  });
  const bob = await adminPost("/api/v1/admin/createUser", {
    displayName: "Bob",
  });
  const box = await adminPost("/api/v1/admin/createBox", {
    alice: String(alice.userID),
    bob: String(bob.userID),
    behaviorName: "pr",
  });
  aliceKey = String(alice.apiKey);
  bobKey = String(bob.apiKey);
  boxId = Number(box.boxID);
}, 60_000);

afterAll(() => {
  server?.kill();
});

describe("two-session PR game over a live server", () => {
  it("20 rounds with repeated presses end at mean payoff 1.0", async () => {
    const alice = new GameSession(
      { serverUrl: BASE, apiKey: aliceKey, boxId, role: "alice" },
      undefined,
      TODAY,
    );
    const bob = new GameSession(
      { serverUrl: BASE, apiKey: bobKey, boxId, role: "bob" },
      undefined,
      TODAY,
    );
    await alice.connect();
    await bob.connect();

    for (let round = 0; round < 20; round++) {
      // cycle through all four input pairs
      const x = ((round >> 1) & 1) as 0 | 1;
      const y = (round & 1) as 0 | 1;

      const aPlay = await alice.playRound(x);
      expect(aPlay.alreadyPlayed).toBe(false);
      if (round % 3 === 0) {
        const repeat = await alice.playRound(x);
        expect(repeat.alreadyPlayed).toBe(true);
        expect(repeat.round).toBe(aPlay.round);
      }

      const bPlay = await bob.playRound(y);
      expect(bPlay.alreadyPlayed).toBe(false);
      if (round % 4 === 0) {
        // a repeat with the other input must not overwrite anything either
        const repeat = await bob.playRound((1 - y) as 0 | 1);
        expect(repeat.alreadyPlayed).toBe(true);
        expect(repeat.round.myInput).toBe(y);
      }

      expect(aPlay.round.myOutput ^ bPlay.round.myOutput).toBe(x * y);
      alice.advance();
      bob.advance();
    }

    // a raw re-send of an already-played wire request (a retried HTTP call)
    // must land on the stored transaction, not mint a new one
    const replayed = alice.playedRounds[0];
    const resp = await fetch(
      `${BASE}/api/v1/useBox?apiKey=${aliceKey}&boxID=${boxId}` +
        `&transactionID=${replayed.transactionId}&x=${replayed.myInput}`,
    );
    const body = (await resp.json()) as { status: number; a: number };
    expect(body.status).toBe(0);
    expect(body.a).toBe(replayed.myOutput);

    // one-sided reveal discloses nothing
    for (const r of alice.playedRounds) await alice.reveal(r.transactionId);
    const hidden = await alice.refreshScoreboard();
    expect(hidden.n).toBe(0);
    expect(alice.playedRounds[0].opponentOutput).toBeUndefined();

    for (const r of bob.playedRounds) await bob.reveal(r.transactionId);

    const aliceBoard = await alice.refreshScoreboard();
    const bobBoard = await bob.refreshScoreboard();

    // exactly the 20 advanced rounds: repeats created no extra transactions
    expect(aliceBoard.n).toBe(20);
    expect(bobBoard.n).toBe(20);
    expect(aliceBoard.meanPayoff).toBe(1.0);
    expect(bobBoard.meanPayoff).toBe(1.0);
    expect(aliceBoard.classicalBound).toBe(0.5);
    expect(gaugePositions(aliceBoard).bound).toBe(75);

    for (const r of alice.playedRounds) {
      expect(r.opponentOutput).toBeDefined();
      expect(r.payoff).toBe(1);
    }
  }, 60_000);
});
