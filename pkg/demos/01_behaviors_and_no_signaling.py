"""Boxes as conditional probability tables, and what no-signaling buys us.

Run: python3 demos/01_behaviors_and_no_signaling.py
"""

import numpy as np

from nsbox import (
    Side,
    chsh_expected_payoff,
    check_no_signaling,
    conditional,
    make_isotropic,
    make_pr_box,
    make_tsirelson_box,
    marginal,
    validate_behavior,
)

np.set_printoptions(precision=4, suppress=True)

# A behavior is a 4-index table P(a,b|x,y), indexed [x, y, a, b].
pr = make_pr_box()
print("PR box table, flattened per input pair:")
for x in (0, 1):
    for y in (0, 1):
        print(f"  x={x} y={y}:", pr.table[x, y].ravel())

# validate_behavior takes a raw table and returns the checked object;
# feeding a table back through it is a cheap self-test
validate_behavior(pr.table, pr.alphabets, name="pr-again")

# No-signaling: my output statistics cannot depend on your input choice.
# The report carries the worst marginal discrepancy over all strata.
for b in (pr, make_tsirelson_box(), make_isotropic(0.7)):
    rep = check_no_signaling(b)
    print(f"{b.name:.<16} no-signaling max violation {rep.max_violation:.2e}")

# Because of that, each party has a well-defined marginal...
m = marginal(pr, Side.ALICE, 0)
print("\nAlice's marginal at x=0:", m.probs)

# ...and the joint factorizes as marginal x conditional, in either order.
# Reconstruct one cell by hand:
x, y, a, b = 1, 1, 0, 1
p_a = marginal(pr, Side.ALICE, x).probs[a]
p_b_given_a = conditional(pr, Side.ALICE, x, a, y).probs[b]
print(f"P(a={a}|x={x}) * P(b={b}|a,x,y) = {p_a * p_b_given_a}")
print(f"table cell                     = {pr.table[x, y, a, b]}")

# The game payoff, as an expectation under uniform inputs:
print("\nexpected CHSH payoff")
print("  pr        ", chsh_expected_payoff(pr))
print("  tsirelson ", f"{chsh_expected_payoff(make_tsirelson_box()):.6f}")
for v in (0.0, 0.5, 0.9, 1.0):
    print(f"  isotropic({v})", chsh_expected_payoff(make_isotropic(v)))
