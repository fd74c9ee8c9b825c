"""Bipartite conditional-probability behaviors and their core analysis.

A behavior is the full description of a pair of boxes: for every input pair
(x, y) it gives a joint distribution over the output pair (a, b).  Tables are
stored as numpy arrays indexed ``table[x, y, a, b]``.  Everything in this
module is pure and operates on immutable values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    InputOutOfRange,
    NegativeProbability,
    NotBinaryAlphabets,
    NotNormalized,
    SignalingBehavior,
    ZeroProbabilityCondition,
)

# Default tolerances.  Built-in boxes hold exact dyadic or algebraic values,
# so these only need to absorb accumulated float rounding.
PROB_TOL = 1e-9        # table validation
NO_SIGNALING_TOL = 1e-9  # marginal agreement across counterpart inputs
DENOMINATOR_TOL = 1e-12  # conditioning denominator cutoff

# Reference counterpart input used when computing a one-sided marginal.  For a
# no-signaling behavior any choice gives the same distribution; pinning it to
# index 0 makes sampling a deterministic function of the entropy stream.
REFERENCE_INPUT = 0


class Side(enum.Enum):
    """The two parties holding the two halves of a box pair."""

    ALICE = "alice"
    BOB = "bob"

    @property
    def other(self) -> "Side":
        return Side.BOB if self is Side.ALICE else Side.ALICE

    @property
    def input_name(self) -> str:
        """Wire parameter name for this side's input."""
        return "x" if self is Side.ALICE else "y"

    @property
    def output_name(self) -> str:
        """Wire key name for this side's output."""
        return "a" if self is Side.ALICE else "b"


@dataclass(frozen=True)
class Alphabets:
    """Sizes of the four finite symbol sets (inputs x, y; outputs a, b).

    Symbols are integers ``0 .. size-1``.
    """

    x_size: int
    y_size: int
    a_size: int
    b_size: int

    def __post_init__(self):
        for name in ("x_size", "y_size", "a_size", "b_size"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise DimensionMismatch(f"{name} must be a positive integer, got {v!r}")

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.x_size, self.y_size, self.a_size, self.b_size)

    def input_size(self, side: Side) -> int:
        return self.x_size if side is Side.ALICE else self.y_size

    def output_size(self, side: Side) -> int:
        return self.a_size if side is Side.ALICE else self.b_size

    def check_input(self, side: Side, symbol: int) -> None:
        n = self.input_size(side)
        if not isinstance(symbol, (int, np.integer)) or not 0 <= symbol < n:
            raise InputOutOfRange(
                f"{side.value} input {symbol!r} outside alphabet of size {n}"
            )

    def check_output(self, side: Side, symbol: int) -> None:
        n = self.output_size(side)
        if not isinstance(symbol, (int, np.integer)) or not 0 <= symbol < n:
            raise InputOutOfRange(
                f"{side.value} output {symbol!r} outside alphabet of size {n}"
            )


@dataclass(frozen=True)
class Distribution:
    """A probability vector over one party's output alphabet."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, i: int) -> float:
        return float(self.probs[i])

    def draw_index(self, u: float) -> int:
        """Map one uniform variate in [0, 1) to an output symbol.

        Inverse-CDF walk in ascending symbol order: returns the smallest
        symbol s with u < P(0) + ... + P(s).  One variate per draw keeps a
        transcript of draws auditable.
        """
        acc = 0.0
        for s, p in enumerate(self.probs):
            acc += p
            if u < acc:
                return s
        # u can exceed the accumulated sum only through float rounding; the
        # draw then falls to the last symbol with nonzero probability.
        nonzero = np.flatnonzero(self.probs)
        return int(nonzero[-1]) if len(nonzero) else len(self.probs) - 1


@dataclass(frozen=True)
class Behavior:
    """A validated conditional distribution over output pairs given inputs."""

    alphabets: Alphabets
    table: np.ndarray
    name: str = ""

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def prob(self, x: int, y: int, a: int, b: int) -> float:
        return float(self.table[x, y, a, b])


@dataclass(frozen=True)
class NoSignalingReport:
    """Result of checking that each side's marginal ignores the other input.

    ``max_violation`` is the largest absolute deviation between marginals of
    one side computed with two different counterpart inputs.  ``witness``
    identifies one offending combination as
    ``(side, input, output, (counterpart_input_1, counterpart_input_2))``.
    """

    passes: bool
    max_violation: float
    witness: Optional[tuple[Side, int, int, tuple[int, int]]] = None


def validate_behavior(raw_table, alphabets: Alphabets, name: str = "") -> Behavior:
    """Validate a raw 4-d table against its alphabets and wrap it.

    Checks shape, entry bounds, and per-(x, y) normalization.  Signaling
    tables are accepted here (the checker needs counterexamples); refusing
    them is the job of the sampling and provisioning layers.
    """
    table = np.asarray(raw_table, dtype=float)
    if table.shape != alphabets.shape:
        raise DimensionMismatch(
            f"table shape {table.shape} does not match alphabets {alphabets.shape}"
        )
    if not np.all(np.isfinite(table)):
        raise NegativeProbability("table contains non-finite entries")
    low = table.min()
    if low < -PROB_TOL:
        idx = np.unravel_index(int(np.argmin(table)), table.shape)
        raise NegativeProbability(f"entry {low} at (x,y,a,b)={idx} is negative")
    if table.max() > 1 + PROB_TOL:
        idx = np.unravel_index(int(np.argmax(table)), table.shape)
        raise NotNormalized(f"entry {table.max()} at (x,y,a,b)={idx} exceeds 1")
    sums = table.sum(axis=(2, 3))
    bad = np.abs(sums - 1.0) > PROB_TOL
    if bad.any():
        x, y = map(int, np.argwhere(bad)[0])
        raise NotNormalized(f"entries for inputs (x={x}, y={y}) sum to {sums[x, y]}")
    return Behavior(alphabets=alphabets, table=np.clip(table, 0.0, 1.0), name=name)


def check_no_signaling(b: Behavior, tol: float = NO_SIGNALING_TOL) -> NoSignalingReport:
    """Verify that each party's output marginal is independent of the other
    party's input.

    For every (x, a) the sum over b of ``table[x, y, a, b]`` must agree for
    all y, and symmetrically for every (y, b) across all x.
    """
    worst = 0.0
    witness = None

    # Alice's marginal as a function of Bob's input: shape (x, y, a).
    alice = b.table.sum(axis=3)
    for x in range(b.alphabets.x_size):
        for a in range(b.alphabets.a_size):
            row = alice[x, :, a]
            dev = float(row.max() - row.min())
            if dev > worst:
                worst = dev
                witness = (Side.ALICE, x, a, (int(row.argmin()), int(row.argmax())))

    # Bob's marginal as a function of Alice's input: shape (x, y, b).
    bob = b.table.sum(axis=2)
    for y in range(b.alphabets.y_size):
        for bb in range(b.alphabets.b_size):
            col = bob[:, y, bb]
            dev = float(col.max() - col.min())
            if dev > worst:
                worst = dev
                witness = (Side.BOB, y, bb, (int(col.argmin()), int(col.argmax())))

    passes = worst <= tol
    return NoSignalingReport(
        passes=passes, max_violation=worst, witness=None if passes else witness
    )


def require_no_signaling(b: Behavior, tol: float = NO_SIGNALING_TOL) -> None:
    """Raise SignalingBehavior unless ``b`` passes the marginal check."""
    report = check_no_signaling(b, tol)
    if not report.passes:
        raise SignalingBehavior(
            f"behavior {b.name or '<unnamed>'} violates no-signaling by "
            f"{report.max_violation:g} (witness {report.witness})"
        )


def marginal(b: Behavior, side: Side, input: int) -> Distribution:
    """One party's output distribution for its own input alone.

    Computed by summing the joint over the counterpart's outputs at the fixed
    reference counterpart input; the no-signaling precondition guarantees the
    choice of reference input does not matter.
    """
    require_no_signaling(b)
    b.alphabets.check_input(side, input)
    if side is Side.ALICE:
        probs = b.table[input, REFERENCE_INPUT, :, :].sum(axis=1)
    else:
        probs = b.table[REFERENCE_INPUT, input, :, :].sum(axis=0)
    return Distribution(probs=probs)


def conditional(
    b: Behavior,
    first_side: Side,
    first_input: int,
    first_output: int,
    second_input: int,
) -> Distribution:
    """Second party's output distribution given the first party's round.

    The joint row for the now-known input pair is renormalized by the first
    output's probability under that pair.  A (near-)zero denominator means
    the first output could not have been produced by this behavior at all,
    which is an internal-consistency failure, not a sampling event.
    """
    b.alphabets.check_input(first_side, first_input)
    b.alphabets.check_output(first_side, first_output)
    b.alphabets.check_input(first_side.other, second_input)
    if first_side is Side.ALICE:
        joint = b.table[first_input, second_input, first_output, :]
    else:
        joint = b.table[second_input, first_input, :, first_output]
    denom = float(joint.sum())
    if denom <= DENOMINATOR_TOL:
        raise ZeroProbabilityCondition(
            f"output {first_output} has probability {denom:g} for "
            f"{first_side.value} input {first_input} with counterpart input "
            f"{second_input}"
        )
    return Distribution(probs=joint / denom)


def total_variation(p, q) -> float:
    """Total variation distance between two distributions on the same support.

    Half the L1 distance; also accepts matching-shape arrays of conditional
    tables, in which case it treats them as one long vector.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionMismatch(f"shapes {p.shape} and {q.shape} differ")
    return float(np.abs(p - q).sum()) / 2.0


def chsh_payoff(x: int, y: int, a: int, b: int) -> int:
    """Round payoff: +1 when the output parity matches the input product."""
    return 1 if (a ^ b) == (x & y) else -1


def _chsh_payoff_table() -> np.ndarray:
    x, y, a, b = np.indices((2, 2, 2, 2))
    return np.where((a ^ b) == (x & y), 1.0, -1.0)


_CHSH_PAYOFF = _chsh_payoff_table()
_CHSH_PAYOFF.setflags(write=False)


def chsh_expected_payoff(b: Behavior) -> float:
    """Average payoff of playing the game straight through the box.

    Inputs are uniform, so this is the payoff-weighted table sum divided by
    the four input pairs.  Only defined for binary alphabets.
    """
    if b.alphabets.shape != (2, 2, 2, 2):
        raise NotBinaryAlphabets(
            f"expected binary alphabets, got sizes {b.alphabets.shape}"
        )
    return float(np.tensordot(_CHSH_PAYOFF, b.table, axes=4)) / 4.0
