"""Closed-form reference data for the (1,2) branched-cover family.

Expressions are in the parameters t0, t1, t2 with
Delta = (1 + t0*t2)^2 + t1^2*(1 + 2*t0*t2).  Where a printed entry is
suspect, the alternatives are kept side by side as named variants so
comparisons can report which one the computation matches.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, Mapping, Tuple

import numpy as np

from .exactalg import RootExtElem, parse_expr
from .family import COVER_PARAMS
from .projconn import ExactField

DELTA = "((1 + t0*t2)^2 + t1^2*(1 + 2*t0*t2))"

# Gamma^g_ab as printed, keyed (g, a, b) with a <= b; all other entries vanish.
GAMMA_PRINTED: Dict[Tuple[int, int, int], str] = {
    (0, 0, 1): f"t1*(1 + 3*t0*t2)/(2*{DELTA})",
    (1, 0, 1): f"t2*(2 + t1^2 + 2*t0*t2)/(2*{DELTA})",
    (0, 0, 0): f"t2*(1 + t0*t2)/{DELTA}",
    (1, 0, 0): f"-t1*t2^2/{DELTA}",
    (0, 0, 2): f"t0*(1 + t0*t2 + t1^2)/(2*{DELTA})",
    (1, 0, 2): f"-t1*(1 + t1^2)/(2*{DELTA})",
    (0, 1, 1): f"-t0*(1 + t0*t2)/{DELTA}",
    (1, 1, 1): f"t0*t1*t2/{DELTA}",
    (0, 1, 2): f"-t0^2*t1/(2*{DELTA})",
    (1, 1, 2): f"-t0*(1 + t0*t2 + t1^2)/(2*{DELTA})",
}

GAMMA_VARIANTS: Dict[str, Dict[Tuple[int, int, int], str]] = {
    "printed": GAMMA_PRINTED,
    "Gamma^0_02 sign flipped": {**GAMMA_PRINTED, (0, 0, 2): f"-t0*(1 + t0*t2 + t1^2)/(2*{DELTA})"},
}

A_PRINTED = (
    f"3*t1^2*t2/(2*{DELTA})",
    f"-3*t1*(1 + t0*t2)/(4*{DELTA})",
    f"-3*t0*(1 + t0*t2 + t1^2)/(2*{DELTA})",
)
B_PRINTED = (
    f"-3*t1^2*t2/(4*{DELTA})",
    f"-3*t1*(1 + t0*t1)/(4*{DELTA})",
    f"-3*t0*(1 + t0*t2 + t1^2)/(2*{DELTA})",
)

B1_VARIANTS: Dict[str, str] = {
    "(1+t0*t1)": f"-3*t1*(1 + t0*t1)/(4*{DELTA})",
    "(1+t0*t2)": f"-3*t1*(1 + t0*t2)/(4*{DELTA})",
}

# a = -2b with b1 using (1 + t0*t2): the a-row the b-row implies.
A_VARIANTS: Dict[str, Tuple[str, str, str]] = {
    "printed": A_PRINTED,
    "a = -2b": (
        f"3*t1^2*t2/(2*{DELTA})",
        f"3*t1*(1 + t0*t2)/(2*{DELTA})",
        f"3*t0*(1 + t0*t2 + t1^2)/{DELTA}",
    ),
}

# Metric in the conformal class, symmetric convention g_ab = g_ba.
METRIC: Dict[Tuple[int, int], str] = {
    (0, 0): "t1^2*t2^2",
    (1, 1): "(1 + t0*t2)^2",
    (2, 2): "4*t0^2*(1 + t1^2)",
    (0, 1): "t1*t2*(1 + t0*t2)",
    (0, 2): "-2*(1 + t1^2)*(1 + t0*t2)",
    (1, 2): "-2*t0^2*t1*t2",
}


def _parse(text: str) -> RootExtElem:
    return parse_expr(text, COVER_PARAMS)


@lru_cache(maxsize=None)
def gamma_field(variant: str = "printed") -> ExactField:
    table = GAMMA_VARIANTS[variant]
    return ExactField(COVER_PARAMS, {k: _parse(v) for k, v in table.items()})


@lru_cache(maxsize=None)
def _compiled(texts: Tuple[str, ...]):
    from .exactalg import Evaluator

    return Evaluator({str(k): _parse(v) for k, v in enumerate(texts)})


def eval_exprs(texts, t) -> np.ndarray:
    """Evaluate expression strings in (t0, t1, t2) at one point."""
    texts = tuple(texts)
    vals = _compiled(texts)({p: complex(x) for p, x in zip(COVER_PARAMS, np.asarray(t).reshape(-1))})
    return np.array([complex(vals[str(k)]) for k in range(len(texts))])


def delta(t) -> complex:
    return complex(eval_exprs((DELTA,), t)[0])


def gamma_at(t, variant: str = "printed") -> np.ndarray:
    return gamma_field(variant)(t)


def a_at(t, variant: str = "printed") -> np.ndarray:
    return eval_exprs(A_VARIANTS[variant], t)


def b_at(t, b1_variant: str | None = None) -> np.ndarray:
    """Printed b, optionally with the b1 entry replaced by a named variant."""
    row = list(B_PRINTED)
    if b1_variant is not None:
        row[1] = B1_VARIANTS[b1_variant]
    return eval_exprs(row, t)


def b1_variants_at(t) -> Mapping[str, complex]:
    vals = eval_exprs(tuple(B1_VARIANTS.values()), t)
    return dict(zip(B1_VARIANTS, vals))


def metric_entries() -> Mapping[Tuple[int, int], RootExtElem]:
    return {k: _parse(v) for k, v in METRIC.items()}
