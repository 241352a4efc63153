"""Exact arithmetic over Gaussian rationals: polynomials, rational functions,
multiquadratic root extensions, a parser and a branch-tracked numeric evaluator."""

from .numeric import (
    BranchContext,
    BranchPointError,
    BranchSpec,
    Evaluator,
    NumPoly,
    PoleError,
    continue_root,
    eval_complex,
)
from .parse import ExprSyntaxError, UndeclaredIdentifierError, parse_expr, parse_poly, parse_ratfunc, to_text
from .poly import MultiPoly, NotDivisibleError, gcd, resultant
from .ratfunc import RatFunc
from .rootext import RootExtElem
from .scalar import I, ONE, ZERO, Scalar

__all__ = [
    "BranchContext", "BranchPointError", "BranchSpec", "Evaluator", "ExprSyntaxError", "I", "MultiPoly",
    "NotDivisibleError", "NumPoly", "ONE", "PoleError", "RatFunc", "RootExtElem", "Scalar",
    "UndeclaredIdentifierError", "ZERO", "continue_root", "eval_complex", "gcd", "parse_expr", "parse_poly",
    "parse_ratfunc", "resultant", "to_text",
]
