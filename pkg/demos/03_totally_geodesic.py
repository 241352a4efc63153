"""
Curves through a point form a totally geodesic surface
======================================================

Fix a point y = (w0, z0) on the base curve.  Parameters t whose curve still
passes through y form a surface P_y.  A geodesic that starts tangent to P_y
should never leave it, and a geodesic through t0 should keep the
intersection with the base curve fixed.
"""

import numpy as np

from projmoduli.family import build_branched_cover_12, kodaira_section
from projmoduli.projconn import (PipelineField, PointConstraint, constraint_row, geodesic_integrate,
                                 same_intersection_check, tangent_basis, zero_sets)

fam = build_branched_cover_12()
field_ = PipelineField(fam)

y = PointConstraint(chart=1, z0=0.5)
print("tangent plane of P_y at t0 is spanned by")
print(np.round(tangent_basis(fam, y, fam.t0), 4))

# (1, -2, 0) is tangent: the section i(1 - 2z) vanishes at z = 1/2
V = 0.12 * np.array([1, -2, 0])
print("section at z0:", kodaira_section(fam, V).chart1(np.array([y.z0])))

path = geodesic_integrate(field_, fam.t0, V, 1.0, center=fam.t0, radius=fam.radius)
# phi vanishes identically at s = 0, so start just after it
for s in np.linspace(0.2, 1, 5):
    t = path.at(np.array([s]))[0][0]
    phi, _ = constraint_row(fam, y, t)
    z1, z2 = zero_sets(fam, t)
    print(f"s = {s:.1f}  |phi(z0, t(s))| = {abs(phi):.1e}  chart-1 zeros {np.round(z1, 10)}  "
          f"chart-2 zeros {np.round(z2, 10)}")

print(f"largest drift of the intersection: {same_intersection_check(fam, field_, V):.1e}")
