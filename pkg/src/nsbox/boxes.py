"""Built-in box library: the standard binary behaviors used everywhere.

All builders return validated behaviors that satisfy the no-signaling
marginal conditions exactly (no float slack needed beyond representation).
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .behavior import Alphabets, Behavior, validate_behavior
from .errors import InputOutOfRange, NotFound

BINARY = Alphabets(2, 2, 2, 2)

StrategyMap = Union[Mapping[int, int], Sequence[int], Callable[[int], int]]


def make_pr_box() -> Behavior:
    """The extremal no-signaling box: outputs satisfy a XOR b = x AND y,
    uniformly over the two satisfying pairs."""
    table = np.zeros(BINARY.shape)
    for x, y, a, b in itertools.product(range(2), repeat=4):
        if a ^ b == x & y:
            table[x, y, a, b] = 0.5
    return validate_behavior(table, BINARY, name="pr")


def make_uniform_box() -> Behavior:
    """Independent fair coins on both sides, ignoring the inputs."""
    table = np.full(BINARY.shape, 0.25)
    return validate_behavior(table, BINARY, name="uniform")


def make_tsirelson_box() -> Behavior:
    """The quantum-optimal binary box: correlators of magnitude 1/sqrt(2)
    signed like the PR box, giving the best physically achievable game score."""
    table = np.zeros(BINARY.shape)
    for x, y, a, b in itertools.product(range(2), repeat=4):
        table[x, y, a, b] = 0.25 * (1.0 + (-1.0) ** (a ^ b ^ (x & y)) / math.sqrt(2.0))
    return validate_behavior(table, BINARY, name="tsirelson")


def make_isotropic(visibility: float) -> Behavior:
    """Mixture of the PR box with visibility v and uniform noise with 1 - v."""
    if not 0.0 <= visibility <= 1.0:
        raise InputOutOfRange(f"visibility {visibility} outside [0, 1]")
    table = visibility * make_pr_box().table + (1.0 - visibility) * 0.25
    return validate_behavior(table, BINARY, name=f"isotropic-{visibility:g}")


def _as_strategy(f: StrategyMap, domain: int, what: str) -> list[int]:
    if callable(f):
        values = [f(i) for i in range(domain)]
    else:
        try:
            values = [f[i] for i in range(domain)]
        except (KeyError, IndexError) as exc:
            raise InputOutOfRange(f"{what} strategy not total on 0..{domain - 1}") from exc
    return [int(v) for v in values]


def make_local_deterministic(
    fa: StrategyMap, fb: StrategyMap, alphabets: Alphabets = BINARY
) -> Behavior:
    """Product of two fixed local response functions a(x) and b(y)."""
    a_of = _as_strategy(fa, alphabets.x_size, "alice")
    b_of = _as_strategy(fb, alphabets.y_size, "bob")
    for v in a_of:
        if not 0 <= v < alphabets.a_size:
            raise InputOutOfRange(f"alice strategy output {v} outside alphabet")
    for v in b_of:
        if not 0 <= v < alphabets.b_size:
            raise InputOutOfRange(f"bob strategy output {v} outside alphabet")
    table = np.zeros(alphabets.shape)
    for x in range(alphabets.x_size):
        for y in range(alphabets.y_size):
            table[x, y, a_of[x], b_of[y]] = 1.0
    name = "det-a" + "".join(map(str, a_of)) + "-b" + "".join(map(str, b_of))
    return validate_behavior(table, alphabets, name=name)


# Named builders that need no arguments, for registry-style lookup by the
# service and CLI.
BUILTIN_BUILDERS: dict[str, Callable[[], Behavior]] = {
    "pr": make_pr_box,
    "uniform": make_uniform_box,
    "tsirelson": make_tsirelson_box,
}


def builtin_behavior(name: str) -> Behavior:
    """Resolve a builtin name, including ``isotropic-<v>`` parametrized ones."""
    if name in BUILTIN_BUILDERS:
        return BUILTIN_BUILDERS[name]()
    if name.startswith("isotropic-"):
        try:
            v = float(name.split("-", 1)[1])
        except ValueError:
            raise NotFound(f"no built-in behavior {name!r}") from None
        return make_isotropic(v)
    raise NotFound(f"no built-in behavior {name!r}")
