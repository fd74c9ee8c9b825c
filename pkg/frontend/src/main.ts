/** DOM wiring for the two-player console.  One session per tab. */

import { ApiError } from "./api.js";
import { gaugePositions, ScoreSummary } from "./scoreboard.js";
import { GameSession } from "./session.js";
import { Role, RoundView } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

let session: GameSession | null = null;

const banner = el<HTMLDivElement>("banner");

function notify(text: string, kind: "info" | "error" = "info"): void {
  banner.textContent = text;
  banner.className = `banner ${kind}`;
}

function describeError(exc: unknown): string {
  if (exc instanceof ApiError) return exc.message;
  return String(exc);
}

function inputLabel(role: Role): string {
  return role === "alice" ? "x" : "y";
}

function renderRounds(): void {
  if (!session) return;
  const body = el<HTMLTableSectionElement>("rounds-body");
  body.replaceChildren();
  const mine = inputLabel(session.config.role);
  const theirs = mine === "x" ? "y" : "x";
  for (const r of [...session.playedRounds].reverse()) {
    const row = document.createElement("tr");
    const opp =
      r.opponentOutput === undefined
        ? "hidden until both reveal"
        : `${theirs}=${r.opponentInput} out=${r.opponentOutput}`;
    const payoff =
      r.payoff === undefined ? "" : r.payoff > 0 ? "+1 win" : "-1 loss";
    row.innerHTML =
      `<td>${r.transactionId}</td>` +
      `<td>${mine}=${r.myInput}</td><td>${r.myOutput}</td>` +
      `<td>${opp}</td><td>${payoff}</td>`;
    const cell = document.createElement("td");
    if (!r.revealedByMe) {
      const button = document.createElement("button");
      button.textContent = "reveal";
      button.addEventListener("click", () => void doReveal(r));
      cell.appendChild(button);
    } else {
      cell.textContent = "revealed";
    }
    row.appendChild(cell);
    body.appendChild(row);
  }
}

function renderScore(summary: ScoreSummary): void {
  const positions = gaugePositions(summary);
  el<HTMLDivElement>("bound-line").style.left = `${positions.bound}%`;
  el<HTMLSpanElement>("bound-label").textContent =
    `classical bound ${summary.classicalBound}`;
  const marker = el<HTMLDivElement>("mean-marker");
  if (positions.mean === null) {
    marker.style.display = "none";
    el<HTMLSpanElement>("score-text").textContent = "no revealed rounds yet";
  } else {
    marker.style.display = "block";
    marker.style.left = `${positions.mean}%`;
    el<HTMLSpanElement>("score-text").textContent =
      `mean payoff ${summary.meanPayoff!.toFixed(3)} over ${summary.n} ` +
      `revealed rounds, ${summary.wins} wins / ${summary.losses} losses`;
  }
}

async function refresh(): Promise<void> {
  if (!session) return;
  try {
    renderScore(await session.refreshScoreboard());
    renderRounds();
  } catch (exc) {
    notify(describeError(exc), "error");
  }
}

async function doReveal(round: RoundView): Promise<void> {
  if (!session) return;
  try {
    await session.reveal(round.transactionId);
    notify(`revealed ${round.transactionId}`);
    await refresh();
  } catch (exc) {
    notify(describeError(exc), "error");
  }
}

async function play(input: 0 | 1): Promise<void> {
  if (!session) return;
  try {
    const result = await session.playRound(input);
    if (result.alreadyPlayed) {
      notify(
        `round ${result.round.transactionId} already played ` +
          `(${inputLabel(session.config.role)}=${result.round.myInput}, ` +
          `output ${result.round.myOutput})`,
      );
    } else {
      notify(
        `round ${result.round.transactionId}: your output is ` +
          `${result.round.myOutput}`,
      );
      el<HTMLButtonElement>("next-round").disabled = false;
    }
    renderRounds();
  } catch (exc) {
    notify(describeError(exc), "error");
  }
}

async function connect(): Promise<void> {
  const role = el<HTMLSelectElement>("cfg-role").value as Role;
  const candidate = new GameSession({
    serverUrl: el<HTMLInputElement>("cfg-server").value || location.origin,
    apiKey: el<HTMLInputElement>("cfg-key").value.trim(),
    boxId: Number(el<HTMLInputElement>("cfg-box").value),
    role,
  });
  try {
    await candidate.connect();
  } catch (exc) {
    notify(describeError(exc), "error");
    return;
  }
  session = candidate;
  el<HTMLDivElement>("setup").hidden = true;
  el<HTMLDivElement>("game").hidden = false;
  el<HTMLSpanElement>("whoami").textContent =
    `playing as ${role} (input ${inputLabel(role)}) on box ` +
    `${session.config.boxId}`;
  el<HTMLSpanElement>("round-label").textContent = session.currentRoundId;
  notify(`connected; round ${session.currentRoundId} is up`);
  await refresh();
}

el<HTMLButtonElement>("connect").addEventListener("click", () => void connect());
el<HTMLButtonElement>("play-0").addEventListener("click", () => void play(0));
el<HTMLButtonElement>("play-1").addEventListener("click", () => void play(1));
el<HTMLButtonElement>("next-round").addEventListener("click", () => {
  if (!session) return;
  try {
    session.advance();
  } catch (exc) {
    notify(describeError(exc), "error");
    return;
  }
  el<HTMLSpanElement>("round-label").textContent = session.currentRoundId;
  el<HTMLButtonElement>("next-round").disabled = true;
  notify(`round ${session.currentRoundId} is up`);
});
el<HTMLButtonElement>("refresh").addEventListener("click", () => void refresh());
