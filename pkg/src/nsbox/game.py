"""Playing and scoring the CHSH game over box clients.

A campaign draws uniform inputs round by round from a client-held seeded
RNG (the parties, not the server, are responsible for honest input choice),
feeds them to the two clients, and scores +1 when the output parity matches
the input product, else -1.  A behavior with table value 1/2 on matching
parities wins every round; the best any deterministic strategy pair can do
is an average of 1/2, and mixing cannot beat the best pure pair.
"""

from __future__ import annotations

import datetime as _dt
import itertools
import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .behavior import chsh_payoff, total_variation
from .client import BoxClient
from .engine import RoundLog, empirical_table, no_signaling_audit

Z_99 = 2.5758293035489004  # two-sided 99% normal quantile


@dataclass(frozen=True)
class Round:
    transaction_id: str
    x: int
    y: int
    a: int
    b: int
    payoff: int

    def as_dict(self) -> dict:
        return {
            "transactionID": self.transaction_id,
            "x": self.x, "y": self.y, "a": self.a, "b": self.b,
            "payoff": self.payoff,
        }


@dataclass
class GameRecord:
    """Transcript of one campaign."""

    behavior_name: str
    strategy: str
    rounds: list[Round] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.rounds)

    @property
    def mean_payoff(self) -> float:
        return sum(r.payoff for r in self.rounds) / self.n if self.rounds else 0.0

    @property
    def wins(self) -> int:
        return sum(1 for r in self.rounds if r.payoff > 0)

    @property
    def losses(self) -> int:
        return self.n - self.wins

    def ci_halfwidth(self, z: float = Z_99) -> float:
        """Normal-approximation confidence half-width for the mean payoff."""
        if self.n < 2:
            return float("inf")
        payoffs = np.array([r.payoff for r in self.rounds], dtype=float)
        return z * payoffs.std(ddof=1) / math.sqrt(self.n)

    def dump_jsonl(self, fileobj) -> None:
        for r in self.rounds:
            fileobj.write(json.dumps(r.as_dict(), separators=(",", ":")) + "\n")


def transaction_ids(n: int, date: Optional[_dt.date] = None, start: int = 1):
    """Date-plus-counter ids: 20211106001, 20211106002, ...

    The counter is zero-padded to three digits and grows beyond as needed,
    so ids stay unique and lexically ordered within one campaign.
    """
    date = date or _dt.date.today()
    prefix = date.strftime("%Y%m%d")
    for i in range(start, start + n):
        yield f"{prefix}{i:03d}"


def play_boxed(
    alice: BoxClient,
    bob: BoxClient,
    n: int,
    rng: random.Random,
    behavior_name: str = "",
    ids=None,
) -> GameRecord:
    """Play n rounds through the two clients, alternating who calls first."""
    record = GameRecord(behavior_name=behavior_name, strategy="boxed")
    ids = ids if ids is not None else transaction_ids(n)
    for i, tid in zip(range(n), ids):
        x = rng.randrange(2)
        y = rng.randrange(2)
        if i % 2 == 0:
            a = alice.use(tid, x)
            b = bob.use(tid, y)
        else:
            b = bob.use(tid, y)
            a = alice.use(tid, x)
        record.rounds.append(Round(tid, x, y, a, b, chsh_payoff(x, y, a, b)))
    return record


def play_classical(
    n: int,
    rng: random.Random,
    strategy: Optional[tuple[Callable[[int], int], Callable[[int], int]]] = None,
) -> GameRecord:
    """Play n rounds with a deterministic local strategy; no box involved.

    Default strategy: both parties always answer 0, which wins whenever
    x·y = 0, i.e. in three of the four equally likely input pairs.
    """
    fa, fb = strategy if strategy is not None else (lambda x: 0, lambda y: 0)
    record = GameRecord(behavior_name="", strategy="classical")
    for tid in transaction_ids(n):
        x = rng.randrange(2)
        y = rng.randrange(2)
        a, b = fa(x), fb(y)
        record.rounds.append(Round(tid, x, y, a, b, chsh_payoff(x, y, a, b)))
    return record


def deterministic_strategy_payoffs() -> dict[tuple[tuple[int, int], tuple[int, int]], float]:
    """Exact average payoff of every deterministic strategy pair.

    A strategy for one party is a function from its input bit to an output
    bit, written as the value table (f(0), f(1)); there are 4 per party, 16
    pairs.  By convexity, randomized strategies cannot exceed the best entry.
    """
    out = {}
    tables = list(itertools.product((0, 1), repeat=2))
    for fa in tables:
        for fb in tables:
            total = sum(
                chsh_payoff(x, y, fa[x], fb[y]) for x in (0, 1) for y in (0, 1)
            )
            out[(fa, fb)] = total / 4.0
    return out


def classical_bound() -> float:
    """Best average payoff achievable without a box: max over the 16 pairs."""
    return max(deterministic_strategy_payoffs().values())


@dataclass(frozen=True)
class VerifyReport:
    """Empirical behavior of a deployment, measured through its clients."""

    behavior_name: str
    n: int
    empirical: np.ndarray
    tv_by_pair: np.ndarray
    max_tv: float
    audit_tv_input: dict
    audit_tv_order: dict

    @property
    def worst_audit_tv(self) -> float:
        vals = list(self.audit_tv_input.values()) + list(self.audit_tv_order.values())
        return max(vals) if vals else 0.0


def verify_campaign(
    make_clients: Callable[[], tuple[BoxClient, BoxClient]],
    behavior,
    n: int,
    rng: random.Random,
    workers: int = 8,
    ids=None,
) -> VerifyReport:
    """Measure a deployment's empirical table against its declared behavior.

    Rounds are independent transactions, so they may be issued concurrently;
    ``make_clients`` supplies a fresh client pair per worker.  Inputs and
    first-mover order are drawn from the caller's RNG up front, which keeps
    the campaign's input statistics reproducible regardless of interleaving.
    """
    from concurrent.futures import ThreadPoolExecutor

    plan = []
    ids = ids if ids is not None else transaction_ids(n)
    for tid in itertools.islice(ids, n):
        plan.append((tid, rng.randrange(2), rng.randrange(2), rng.random() < 0.5))

    workers = max(1, min(workers, n))
    chunks = [plan[i::workers] for i in range(workers)]

    def run_chunk(chunk):
        alice, bob = make_clients()
        rows = []
        with alice, bob:
            for tid, x, y, alice_first in chunk:
                if alice_first:
                    a = alice.use(tid, x)
                    b = bob.use(tid, y)
                else:
                    b = bob.use(tid, y)
                    a = alice.use(tid, x)
                rows.append((x, y, a, b, alice_first))
        return rows

    if workers == 1:
        results = [run_chunk(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chunk, chunks))

    flat = [row for rows in results for row in rows]
    log = RoundLog(
        x=np.array([r[0] for r in flat], dtype=int),
        y=np.array([r[1] for r in flat], dtype=int),
        a=np.array([r[2] for r in flat], dtype=int),
        b=np.array([r[3] for r in flat], dtype=int),
        first_is_alice=np.array([r[4] for r in flat], dtype=bool),
    )
    emp = empirical_table(behavior, log)
    xs, ys = behavior.alphabets.x_size, behavior.alphabets.y_size
    tv = np.zeros((xs, ys))
    counts = np.zeros((xs, ys), dtype=int)
    np.add.at(counts, (log.x, log.y), 1)
    for x in range(xs):
        for y in range(ys):
            if counts[x, y]:
                tv[x, y] = total_variation(emp[x, y], behavior.table[x, y])
    audit = no_signaling_audit(behavior, log)
    return VerifyReport(
        behavior_name=behavior.name,
        n=len(log),
        empirical=emp,
        tv_by_pair=tv,
        max_tv=float(tv.max()),
        audit_tv_input={s.value: v for s, v in audit.max_tv_vs_counterpart_input.items()},
        audit_tv_order={s.value: v for s, v in audit.max_tv_vs_order.items()},
    )
