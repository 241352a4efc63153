"""
The connection of the (1,2) branched-cover family
=================================================

Split the cocycle, extract the Christoffel symbols and compare them with the
closed-form table.  Two versions of the table are kept: as printed, and with
the sign of Gamma^0_02 reversed.  Only the second one agrees.

The point t = (1, 1, 1) is too far out for the two charts to share an annulus,
so there the pipeline is continued along the ray through the origin:
Delta * Gamma is a polynomial along the ray, and its Taylor coefficients are
read off from a small circle.
"""

import numpy as np

from projmoduli import reference as ref
from projmoduli.cech import split_cocycle
from projmoduli.family import build_branched_cover_12
from projmoduli.projconn import Christoffel, PipelineField, extract_connection, projective_difference, ray_continuation

fam = build_branched_cover_12()
t = np.array([0.1, -0.05, 0.12])

theta, diag = split_cocycle(fam, t)
print(f"split at t = {t}: residual {diag.residual:.1e}, Laurent tail {diag.tail:.1e}, K = {diag.K}")
G = extract_connection(fam, theta, t)
print(f"least-squares residual {G.residual:.1e}")

names = {(0, 0, 0): "G^0_00", (1, 0, 0): "G^1_00", (0, 0, 1): "G^0_01", (1, 0, 1): "G^1_01",
         (0, 0, 2): "G^0_02", (1, 0, 2): "G^1_02", (0, 1, 1): "G^0_11", (1, 1, 1): "G^1_11",
         (0, 1, 2): "G^0_12", (1, 1, 2): "G^1_12"}
printed = ref.gamma_at(t)
print(f"{'entry':8s} {'pipeline':>12s} {'printed':>12s}")
for idx, name in names.items():
    print(f"{name:8s} {G.G[idx].real:12.8f} {printed[idx].real:12.8f}")

for variant in ref.GAMMA_VARIANTS:
    xi, res = projective_difference(G, Christoffel(ref.gamma_at(t, variant)))
    print(f"table [{variant}]: non-trace difference {res:.1e}, trace part {np.round(xi.xi.real, 12)}")

G111 = ray_continuation(PipelineField(fam), [1, 1, 1], 1.0, ref.delta, degree=3)
print("continued to (1,1,1), times 14:",
      np.round(14 * np.array([G111.G[0, 0, 0], G111.G[1, 0, 0], G111.G[0, 0, 1], G111.G[1, 0, 1]]).real, 9))
