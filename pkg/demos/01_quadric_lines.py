"""
Lines stay lines: the (1,1) family on the quadric
=================================================

Graphs of Moebius maps z -> (a1 z + a0)/(b1 z + 1) form a three-parameter
family of curves.  The connection read off from the family should differ from
the flat one only by a trace term, so its geodesics are straight lines in
(a0, a1, b1) up to reparameterization.
"""

import numpy as np

from projmoduli.family import build_quadric_11, normal_bundle_degree
from projmoduli.projconn import (Christoffel, ConstantField, PipelineField, geodesic_integrate,
                                 projective_difference, trace_deviation)

fam = build_quadric_11()
print("base point", fam.t0, " normal bundle degree", normal_bundle_degree(fam, fam.t0))

# connection at a few points, and how far each is from being a pure trace term
field_ = PipelineField(fam)
rng = np.random.default_rng(1)
for _ in range(4):
    t = np.asarray(fam.t0) + rng.uniform(-0.2, 0.2, 3)
    G = field_.at(t)
    xi, res = projective_difference(G, Christoffel.zero(3))
    print(f"t = {np.round(t.real, 3)}  extraction residual {G.residual:.1e}  "
          f"non-trace part {res:.1e}  xi = {np.round(xi.xi.real, 4)}")

# a geodesic of the extracted connection against the straight line with the same start
V = np.array([0.15, -0.1, 0.05])
path = geodesic_integrate(field_, fam.t0, V, 1.0, center=fam.t0, radius=fam.radius)
line = geodesic_integrate(ConstantField(Christoffel.zero(3)), fam.t0, V, 3.0)
print("end point of the geodesic", np.round(path.t[-1].real, 6))
print("end point of the line at s = 1", np.round((np.asarray(fam.t0) + V).real, 6))
print(f"distance of the geodesic trace from the line: {trace_deviation(path, line):.1e}")
