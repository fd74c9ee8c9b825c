"""Which boxes need more than shared randomness?

The local set is the convex hull of deterministic strategy pairs; membership
is one small LP away.  Run: python3 demos/02_locality_polytope.py
"""

import numpy as np

from nsbox import (
    deterministic_vertices,
    is_local,
    make_isotropic,
    make_local_deterministic,
    make_pr_box,
    make_tsirelson_box,
    make_uniform_box,
)

vertices = deterministic_vertices(make_pr_box().alphabets)
print(f"binary scenario: {vertices.shape[0]} deterministic vertices, "
      f"{vertices.shape[1]} table entries each")

for b in (make_uniform_box(), make_local_deterministic((0, 1), (0, 0)),
          make_tsirelson_box(), make_pr_box()):
    cert = is_local(b)
    if cert.is_local:
        # the certificate is an explicit convex decomposition
        support = int(np.count_nonzero(cert.weights > 1e-9))
        print(f"{b.name:<16} local     ({support} vertices in the mixture)")
    else:
        print(f"{b.name:<16} NOT local (distance {cert.violation_gap:.4f})")

# the isotropic family walks a straight line from white noise into the
# PR corner; the wall sits exactly halfway
print("\nv      local?")
for v in (0.0, 0.25, 0.49, 0.4999999, 0.5000001, 0.51, 0.75, 1.0):
    print(f"{v:<9} {is_local(make_isotropic(v)).is_local}")

lo, hi = 0.0, 1.0
while hi - lo > 1e-9:
    mid = (lo + hi) / 2
    if is_local(make_isotropic(mid)).is_local:
        lo = mid
    else:
        hi = mid
print(f"\nbisection puts the boundary at v = {(lo + hi) / 2:.9f}")
