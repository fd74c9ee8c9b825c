"""Two-phase sampling of box transactions, plus statistical self-checks.

A transaction is one joint use of a box pair.  Whichever party calls first
gets an output drawn from their marginal; the second party's output is drawn
from the joint conditioned on everything the first call fixed.  Chaining the
two draws reproduces the behavior's joint distribution exactly, while each
party alone sees only their own no-signaling marginal.

All decisions happen inside the store's per-transaction lock, and the
output is durably stored before it is returned, so retries are idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .behavior import (
    Behavior,
    Side,
    conditional,
    marginal,
    require_no_signaling,
    total_variation,
)
from .entropy import EntropySource, SeededEntropy
from .errors import InputMismatchReplay
from .store import MemoryStore, Store, TransactionHandle


@dataclass(frozen=True)
class UseOutcome:
    """Result of one party's call on one transaction.

    ``first_use`` says this very call initiated the transaction; a replayed
    call reports ``first_use=False`` even when the original call was the
    initiator.  ``replayed`` means the output was read back from storage
    rather than drawn now.
    """

    output: int
    first_use: bool
    replayed: bool


def use_box(
    store: Store,
    box_id: int,
    transaction_id: str,
    side: Side,
    input: int,
    entropy: EntropySource,
    timeout: Optional[float] = None,
) -> UseOutcome:
    """One party presents an input to their half of a box pair.

    First call on a fresh transaction draws from that party's marginal;
    the other party's later call draws from the conditional given the stored
    half.  Calling again with the same input returns the stored output;
    calling again with a different input raises InputMismatchReplay, because
    the first draw already consumed the one-shot resource.
    """
    box = store.get_box(box_id)
    behavior = store.get_behavior(box.behavior_name)
    require_no_signaling(behavior)
    behavior.alphabets.check_input(side, input)

    def section(handle: TransactionHandle) -> UseOutcome:
        row = handle.get_or_create_row()
        mine = row.side_state(side)
        if mine is not None:
            stored_input, stored_output = mine
            if stored_input != input:
                raise InputMismatchReplay(
                    f"{side.value} already used transaction {transaction_id!r} "
                    f"with input {stored_input}, cannot redo with {input}"
                )
            return UseOutcome(output=stored_output, first_use=False, replayed=True)

        theirs = row.side_state(side.other)
        if theirs is None:
            dist = marginal(behavior, side, input)
            first_use = True
        else:
            their_input, their_output = theirs
            dist = conditional(behavior, side.other, their_input, their_output, input)
            first_use = False
        output = dist.draw_index(entropy.next_uniform())
        handle.store_side_result(side, input, output)
        return UseOutcome(output=output, first_use=first_use, replayed=False)

    return store.with_transaction_lock(box_id, transaction_id, section, timeout=timeout)


@dataclass(frozen=True)
class RoundLog:
    """Record of simulated rounds: parallel arrays, one entry per round."""

    x: np.ndarray
    y: np.ndarray
    a: np.ndarray
    b: np.ndarray
    first_is_alice: np.ndarray

    def __len__(self) -> int:
        return len(self.x)


def sample_rounds(
    behavior: Behavior,
    n: int,
    entropy: Optional[EntropySource] = None,
    first_mover: str = "random",
) -> RoundLog:
    """Run n full transactions against a throwaway in-memory deployment.

    Inputs are uniform over each side's alphabet.  ``first_mover`` is
    "alice", "bob", or "random" (an extra variate per round decides).  This
    drives the real use_box path end to end, so its statistics certify the
    sampling engine rather than just the arithmetic behind it.
    """
    if entropy is None:
        entropy = SeededEntropy(0)
    if first_mover not in ("alice", "bob", "random"):
        raise ValueError(f"unknown first_mover {first_mover!r}")
    named = behavior if behavior.name else Behavior(
        alphabets=behavior.alphabets, table=behavior.table, name="audit"
    )
    store = MemoryStore()
    store.register_behavior(named)
    alice = store.create_user("alice")
    bob = store.create_user("bob")
    box = store.create_box_instance(named.name, alice.user_id, bob.user_id)

    def draw_int(size: int) -> int:
        return min(int(entropy.next_uniform() * size), size - 1)

    log = RoundLog(
        x=np.zeros(n, dtype=int),
        y=np.zeros(n, dtype=int),
        a=np.zeros(n, dtype=int),
        b=np.zeros(n, dtype=int),
        first_is_alice=np.zeros(n, dtype=bool),
    )
    for i in range(n):
        tid = f"r{i:06d}"
        x = draw_int(behavior.alphabets.x_size)
        y = draw_int(behavior.alphabets.y_size)
        if first_mover == "random":
            alice_first = entropy.next_uniform() < 0.5
        else:
            alice_first = first_mover == "alice"
        order = (Side.ALICE, Side.BOB) if alice_first else (Side.BOB, Side.ALICE)
        outs = {}
        for s in order:
            inp = x if s is Side.ALICE else y
            outs[s] = use_box(store, box.box_id, tid, s, inp, entropy).output
        log.x[i] = x
        log.y[i] = y
        log.a[i] = outs[Side.ALICE]
        log.b[i] = outs[Side.BOB]
        log.first_is_alice[i] = alice_first
    return log


def empirical_table(behavior: Behavior, log: RoundLog) -> np.ndarray:
    """Empirical conditional frequencies P(a, b | x, y) from a round log.

    Input pairs never played give all-zero rows.
    """
    shape = behavior.alphabets.shape
    counts = np.zeros(shape, dtype=float)
    np.add.at(counts, (log.x, log.y, log.a, log.b), 1.0)
    totals = counts.sum(axis=(2, 3), keepdims=True)
    return np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)


@dataclass(frozen=True)
class FactorizeReport:
    """Comparison of sequentially sampled rounds against the exact table."""

    empirical: np.ndarray
    pair_counts: np.ndarray
    tv_by_pair: np.ndarray
    max_tv: float


def factorize_check(
    behavior: Behavior,
    n: int = 10000,
    entropy: Optional[EntropySource] = None,
    first_mover: str = "random",
) -> FactorizeReport:
    """Check that marginal-then-conditional sampling reproduces the joint.

    Per input pair, the total variation distance between the empirical
    output-pair frequencies and the behavior's exact row.
    """
    log = sample_rounds(behavior, n, entropy, first_mover)
    emp = empirical_table(behavior, log)
    counts = np.zeros(behavior.alphabets.shape[:2], dtype=int)
    np.add.at(counts, (log.x, log.y), 1)
    xs, ys = behavior.alphabets.x_size, behavior.alphabets.y_size
    tv = np.zeros((xs, ys))
    for x in range(xs):
        for y in range(ys):
            if counts[x, y]:
                tv[x, y] = total_variation(emp[x, y], behavior.table[x, y])
    return FactorizeReport(
        empirical=emp, pair_counts=counts, tv_by_pair=tv, max_tv=float(tv.max())
    )


@dataclass(frozen=True)
class SignalingAudit:
    """Empirical no-signaling evidence from played rounds.

    For each party and each of their inputs, their output frequencies are
    stratified by the counterpart's input and by who moved first; the worst
    total variation between strata is reported per party.  Strata thinner
    than ``min_count`` rounds are skipped as statistically empty.
    """

    max_tv_vs_counterpart_input: dict
    max_tv_vs_order: dict

    @property
    def worst(self) -> float:
        vals = list(self.max_tv_vs_counterpart_input.values())
        vals += list(self.max_tv_vs_order.values())
        return max(vals) if vals else 0.0


def _freq(outputs: np.ndarray, size: int) -> Optional[np.ndarray]:
    if len(outputs) == 0:
        return None
    return np.bincount(outputs, minlength=size) / len(outputs)


def no_signaling_audit(
    behavior: Behavior, log: RoundLog, min_count: int = 50
) -> SignalingAudit:
    """Stratify a round log to show neither party's outputs leak the other's
    input or the calling order."""
    by_input: dict = {}
    by_order: dict = {}
    for side in Side:
        own_in = log.x if side is Side.ALICE else log.y
        own_out = log.a if side is Side.ALICE else log.b
        other_in = log.y if side is Side.ALICE else log.x
        out_size = behavior.alphabets.output_size(side)
        worst_in = 0.0
        worst_ord = 0.0
        for v in range(behavior.alphabets.input_size(side)):
            at_v = own_in == v
            strata = []
            for w in range(behavior.alphabets.input_size(side.other)):
                sel = at_v & (other_in == w)
                if sel.sum() >= min_count:
                    strata.append(_freq(own_out[sel], out_size))
            for p in strata:
                for q in strata:
                    worst_in = max(worst_in, total_variation(p, q))
            first = at_v & (log.first_is_alice == (side is Side.ALICE))
            second = at_v & ~(log.first_is_alice == (side is Side.ALICE))
            if first.sum() >= min_count and second.sum() >= min_count:
                worst_ord = max(
                    worst_ord,
                    total_variation(
                        _freq(own_out[first], out_size),
                        _freq(own_out[second], out_size),
                    ),
                )
        by_input[side] = worst_in
        by_order[side] = worst_ord
    return SignalingAudit(
        max_tv_vs_counterpart_input=by_input, max_tv_vs_order=by_order
    )
