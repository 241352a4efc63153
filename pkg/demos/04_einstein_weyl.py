"""
The Weyl structure on the moduli space
======================================

Curves meeting to second order give a conformal structure; with the metric
chosen in that class, the extracted connection is projectively Weyl.  Solving
for the one-forms a and b recovers omega = a - 2b, the Weyl connection D, and
the Einstein-Weyl condition can be checked.
"""

import numpy as np

from projmoduli import reference as ref
from projmoduli.family import build_branched_cover_12
from projmoduli.projconn import PipelineField, projective_difference
from projmoduli.weyl import (conformal_from_family, einstein_weyl_residual, metric_closed_form, proportionality_minors,
                             solve_ab, weyl_from_connection)

fam = build_branched_cover_12()
g = metric_closed_form()
field_ = PipelineField(fam)
t = np.array([0.1, 0.2, 0.1])

M = conformal_from_family(fam, t)
print("discriminant form vs metric, largest 2x2 minor:", f"{proportionality_minors(M, g(t)):.1e}")

ab = solve_ab(field_, g, t)
print(f"solve_ab residual {ab.residual:.1e}")
print("a     ", np.round(ab.a.real, 10))
print("b     ", np.round(ab.b.real, 10))
print("-2b   ", np.round(-2 * ab.b.real, 10))
print("omega ", np.round(ab.omega.real, 10))

print("table a", np.round(ref.a_at(t).real, 10))
print("table b", np.round(ref.b_at(t).real, 10))
for name, val in ref.b1_variants_at(t).items():
    print(f"b_1 with {name}: {val.real:.10f}")

W = weyl_from_connection(field_, g)
print(f"D vs extracted connection, non-trace part {projective_difference(W.at(t), field_.at(t))[1]:.1e}")
print(f"Weyl compatibility {W.compatibility_residual(t):.1e}")
print(f"Einstein-Weyl residual {einstein_weyl_residual(W, t):.1e}")
