"""Locality decision: membership in the convex hull of deterministic boxes.

A behavior is local when it can be produced with randomness shared before the
round, i.e. when its table is a convex combination of deterministic product
strategies.  At small alphabet sizes this is decided exactly by enumerating
every deterministic vertex and solving a linear program that minimizes the
worst-cell (infinity-norm) slack of the best convex combination.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .behavior import Alphabets, Behavior
from .errors import TooLargeToEnumerate

LP_TOL = 1e-7           # slack below this counts as inside the polytope
ENUMERATION_CAP = 4096  # max number of deterministic vertices


@dataclass(frozen=True)
class LocalityCertificate:
    """Outcome of the polytope-membership decision.

    When local, ``weights[i]`` is the convex coefficient on the i-th
    deterministic vertex (ordering of :func:`deterministic_vertices`).  When
    nonlocal, ``violation_gap`` is the smallest achievable worst-cell
    deviation from any convex combination.
    """

    is_local: bool
    weights: Optional[np.ndarray] = None
    violation_gap: Optional[float] = None


def deterministic_strategies(alphabets: Alphabets) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All pairs (alice response function, bob response function).

    A response function is a tuple giving the fixed output for each input.
    """
    alice = list(itertools.product(range(alphabets.a_size), repeat=alphabets.x_size))
    bob = list(itertools.product(range(alphabets.b_size), repeat=alphabets.y_size))
    return [(fa, fb) for fa in alice for fb in bob]


def deterministic_vertices(alphabets: Alphabets, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Flattened tables of all deterministic product boxes, one per row."""
    count = alphabets.a_size ** alphabets.x_size * alphabets.b_size ** alphabets.y_size
    if count > cap:
        raise TooLargeToEnumerate(
            f"{count} deterministic vertices exceed the cap of {cap}"
        )
    cells = int(np.prod(alphabets.shape))
    vertices = np.zeros((count, cells))
    for i, (fa, fb) in enumerate(deterministic_strategies(alphabets)):
        table = np.zeros(alphabets.shape)
        for x in range(alphabets.x_size):
            for y in range(alphabets.y_size):
                table[x, y, fa[x], fb[y]] = 1.0
        vertices[i] = table.reshape(-1)
    return vertices


def is_local(b: Behavior, tol: float = LP_TOL, cap: int = ENUMERATION_CAP) -> LocalityCertificate:
    """Decide whether ``b`` lies in the local polytope.

    Solves::

        minimize t  subject to  |V.T w - p| <= t (per cell),  sum w = 1,  w >= 0

    where V stacks the deterministic vertex tables and p is the behavior's
    flattened table.  The optimum t* is the infinity-norm distance to the
    polytope; t* <= tol means local.
    """
    vertices = deterministic_vertices(b.alphabets, cap=cap)
    n_vertices, n_cells = vertices.shape
    p = b.table.reshape(-1)

    # Unknowns: [w_0 .. w_{V-1}, t]
    c = np.zeros(n_vertices + 1)
    c[-1] = 1.0
    ones = np.ones((n_cells, 1))
    a_ub = np.block([[vertices.T, -ones], [-vertices.T, -ones]])
    b_ub = np.concatenate([p, -p])
    a_eq = np.zeros((1, n_vertices + 1))
    a_eq[0, :n_vertices] = 1.0
    b_eq = np.array([1.0])

    result = linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
        bounds=[(0, None)] * n_vertices + [(0, None)], method="highs",
    )
    if not result.success:
        raise RuntimeError(f"locality LP failed: {result.message}")

    gap = float(result.x[-1])
    if gap <= tol:
        weights = np.clip(result.x[:n_vertices], 0.0, None)
        weights = weights / weights.sum()
        return LocalityCertificate(is_local=True, weights=weights, violation_gap=None)
    return LocalityCertificate(is_local=False, weights=None, violation_gap=gap)
