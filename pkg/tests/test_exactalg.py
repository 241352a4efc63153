import cmath
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from sympy.polys.subresultants_qq_zz import sylvester

from projmoduli.exactalg import (
    BranchContext, BranchPointError, BranchSpec, ExprSyntaxError, MultiPoly, PoleError, RatFunc, RootExtElem,
    Scalar, UndeclaredIdentifierError, eval_complex, gcd, parse_expr, parse_poly, parse_ratfunc, resultant,
    to_text,
)
from projmoduli.family import COVER_PARAMS, cover_polynomials

XY = ("x", "y")
SX, SY = sp.symbols("x y")


# -- strategies ---------------------------------------------------------------

small = st.integers(-4, 4)


@st.composite
def polys(draw, vars=XY, max_terms=4, max_deg=3):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        e = tuple(draw(st.integers(0, max_deg)) for _ in vars)
        terms[e] = Scalar(draw(small), draw(st.integers(-1, 1)))
    return MultiPoly(vars, terms)


def to_sympy(p: MultiPoly):
    syms = [sp.Symbol(v) for v in p.vars]
    out = 0
    for e, c in p.terms.items():
        mono = 1
        for s, k in zip(syms, e):
            mono *= s ** k
        out += (sp.Rational(c.re.numerator, c.re.denominator)
                + sp.I * sp.Rational(c.im.numerator, c.im.denominator)) * mono
    return sp.expand(out)


# -- Scalar ----------------------------------------------------------------------

def test_scalar_canonical():
    a = Scalar(Fraction(2, 4), Fraction(-3, 6))
    assert a == Scalar(Fraction(1, 2), Fraction(-1, 2))
    assert a.re.denominator > 0 and a.re == Fraction(1, 2)
    assert hash(a) == hash(Scalar(Fraction(1, 2), Fraction(-1, 2)))
    assert Scalar(0, 1) * Scalar(0, 1) == Scalar(-1)
    assert (Scalar(3, 4) / Scalar(3, 4)).is_one()


def test_scalar_zero_division():
    with pytest.raises(ZeroDivisionError):
        Scalar(0).inverse()


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(1, 20), st.integers(-50, 50), st.integers(-50, 50))
def test_scalar_field_axioms(a, b, d, c, e):
    x = Scalar(Fraction(a, d), Fraction(b, d))
    y = Scalar(c, e)
    assert (x + y) - y == x
    if not y.is_zero():
        assert (x * y) / y == x
    assert complex(x * y) == pytest.approx(complex(x) * complex(y))


# -- MultiPoly -------------------------------------------------------------------

def test_zero_polynomial_has_no_terms():
    p = MultiPoly(XY, {(1, 0): 1, (0, 1): 0})
    assert (p - p).terms == {}
    assert 0 not in [c for c in p.terms.values() if c.is_zero()]


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_distributivity(a, b, c):
    assert (a + b) * c == a * c + b * c


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_multiplication_matches_sympy(a, b):
    assert sp.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=3), polys(max_terms=3), polys(max_terms=2))
def test_gcd_matches_sympy(a, b, c):
    a, b = a * c, b * c
    if a.is_zero() or b.is_zero():
        return
    g = gcd(a, b)
    ref = sp.gcd(to_sympy(a), to_sympy(b))
    # equal up to a unit
    ratio = sp.cancel(to_sympy(g) / ref)
    assert ratio.free_symbols == set()
    assert ratio != 0


def test_gcd_examples():
    x, y = MultiPoly.var("x", XY), MultiPoly.var("y", XY)
    g = gcd((x - 1) * (x + y), (x - 1) * (y - 2))
    assert g.monic() == (x - 1).monic()
    assert gcd(x * y * y, x * x * y) == x * y


def test_resultant_examples():
    z = ("zeta",)
    p = parse_poly("zeta^2 - 2*zeta - 1", z)
    q = parse_poly("zeta^2 + 2*zeta + 4", z)
    assert resultant(p, q, "zeta").const_value() == Scalar(49)
    v = ("zeta", "a", "b")
    r = resultant(parse_poly("zeta - a", v), parse_poly("zeta - b", v), "zeta")
    assert r == parse_poly("a - b", v)
    u = parse_poly("(zeta - 1)*(zeta + 2)", v)
    w = parse_poly("(zeta - 1)*(zeta - 5*a)", v)
    assert resultant(u, w, "zeta").is_zero()


def test_resultant_needs_variable():
    with pytest.raises(ValueError):
        resultant(parse_poly("x + 1", XY), parse_poly("x - 1", XY), "q")


@settings(max_examples=50, deadline=None)
@given(st.lists(small, min_size=1, max_size=3), st.lists(small, min_size=1, max_size=3), small)
def test_resultant_planted_root(ca, cb, root):
    x = MultiPoly.var("x", ("x",))
    pa = MultiPoly.const(1, ("x",))
    for c in ca:
        pa = pa * x + c
    pb = MultiPoly.const(1, ("x",))
    for c in cb:
        pb = pb * x + c
    lin = x - root
    assert resultant(pa * lin, pb * lin, "x").is_zero()


@settings(max_examples=50, deadline=None)
@given(st.lists(small, min_size=1, max_size=3), st.lists(small, min_size=1, max_size=3))
def test_resultant_matches_sympy(ca, cb):
    x = sp.Symbol("x")
    fa = sp.Poly([1] + ca, x)
    fb = sp.Poly([1] + cb, x)
    mine = resultant(parse_poly(str(fa.as_expr()).replace("**", "^"), ("x",)),
                     parse_poly(str(fb.as_expr()).replace("**", "^"), ("x",)), "x")
    # Sylvester determinant; sympy's resultant() uses a different sign when deg fa < deg fb
    ref = sylvester(fa.as_expr(), fb.as_expr(), x).det()
    assert complex(mine.const_value() if not mine.is_zero() else 0) == pytest.approx(complex(ref))
    assert mine.is_zero() == (ref == 0)


# -- RatFunc ---------------------------------------------------------------------

def test_ratfunc_reduced_and_normalized():
    r = parse_ratfunc("(z^2 - 1)/(2*z - 2)", ("z",))
    assert r == parse_ratfunc("(z + 1)/2", ("z",))
    assert r.is_poly()
    q = parse_ratfunc("(z^2 + 1)/(3*z - 6)", ("z",))
    lead = q.den.leading()[1]
    assert lead.is_one()
    assert q.evaluate({"z": 1j}) == 0


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=3), polys(max_terms=3), polys(max_terms=3))
def test_ratfunc_reduction_matches_sympy(a, b, c):
    if b.is_zero() or c.is_zero():
        return
    r = RatFunc(a * c, b * c)
    assert sp.cancel(to_sympy(r.num) / to_sympy(r.den) - to_sympy(a) / to_sympy(b)) == 0
    g = sp.gcd(to_sympy(r.num), to_sympy(r.den))
    assert sp.Poly(g, SX, SY).total_degree() == 0


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=3), polys(max_terms=3))
def test_ratfunc_derivative_matches_sympy(a, b):
    if b.is_zero():
        return
    r = RatFunc(a, b)
    d = r.derivative("x")
    ref = sp.diff(to_sympy(a) / to_sympy(b), SX)
    assert sp.cancel(to_sympy(d.num) / to_sympy(d.den) - ref) == 0


# -- parsing ---------------------------------------------------------------------

def test_parse_rational_literal():
    e = parse_expr("(z^2+1)/(z-2)", ("z",))
    r = e.as_ratfunc()
    assert r.num == parse_poly("z^2 + 1", ("z",))
    assert r.den == parse_poly("z - 2", ("z",))


def test_parse_errors():
    with pytest.raises(ExprSyntaxError) as exc:
        parse_expr("z^", ("z",))
    assert exc.value.offset == 2
    with pytest.raises(UndeclaredIdentifierError):
        parse_expr("q + 1", ("z",))
    with pytest.raises(ExprSyntaxError):
        parse_expr("sqrt(z + 1)", ("z",))


def test_parse_sqrt_of_declared_root():
    e = parse_expr("sqrt(z^2 + 1)", ("z",), {"s": "z^2 + 1"})
    assert e == parse_expr("s", ("z",), {"s": "z^2 + 1"})


def test_root_rewrite_on_division():
    v = ("z",) + COVER_PARAMS
    Q = cover_polynomials(v)["Q"]
    e = parse_expr("i*(t2*z^2 + t1*z + t0)/sQ", v, {"sQ": Q})
    coeff = e.coefficient(["sQ"])
    assert coeff == parse_ratfunc("i*(t2*z^2 + t1*z + t0)", v) / RatFunc(Q)
    assert e.coefficient([]).is_zero()


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=3), polys(max_terms=2))
def test_print_parse_roundtrip(a, b):
    if b.is_zero():
        return
    e = RootExtElem.from_ratfunc(RatFunc(a, b))
    text = to_text(e)
    again = parse_expr(text, XY)
    assert again == e
    assert to_text(again) == text


# -- root extensions -------------------------------------------------------------

def test_multilinear_normal_form():
    s = parse_expr("s", ("z",), {"s": "z^2 + 1"})
    sq = s * s
    assert sq == parse_expr("z^2 + 1", ("z",), {"s": "z^2 + 1"})
    assert all("s" not in k for k in sq.coeffs)
    e = (s + 1) * (s + 1) * s
    assert all(len(k) == len(set(k)) for k in e.coeffs)


def test_root_derivative():
    v = ("z",) + COVER_PARAMS
    Q = cover_polynomials(v)["Q"]
    s = RootExtElem.root("sQ", Q)
    ref = RootExtElem.from_ratfunc(RatFunc(Q.derivative("z"))) * s / (RootExtElem.from_ratfunc(RatFunc(Q)) * 2)
    assert s.derivative("z") == ref
    assert parse_expr("z^2*t0", v).derivative("z") == parse_expr("2*z*t0", v)


def test_kodaira_derivative_at_base():
    v = ("z",) + COVER_PARAMS
    Q = cover_polynomials(v)["Q"]
    phi = parse_expr("i*(t2*z^2 + t1*z + t0)/sQ", v, {"sQ": Q})
    ctx = BranchContext({"sQ": BranchSpec({"t0": 0, "t1": 0, "t2": 0}, 1)})
    for k, p in enumerate(COVER_PARAMS):
        val = eval_complex(phi.derivative(p), {"z": 0.3 + 0.1j, "t0": 0, "t1": 0, "t2": 0}, ctx)
        assert val == pytest.approx(1j * (0.3 + 0.1j) ** k, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(polys(max_terms=3), polys(max_terms=3))
def test_mixed_derivatives_commute(a, b):
    s = RootExtElem.root("s", parse_poly("x^2 + y^2 + 1", XY))
    e = RootExtElem.from_ratfunc(RatFunc(a)) + RootExtElem.from_ratfunc(RatFunc(b)) * s
    assert e.derivative("x").derivative("y") == e.derivative("y").derivative("x")


# -- evaluation ------------------------------------------------------------------

def test_eval_rational_and_pole():
    e = parse_expr("(z^2+1)/(z-2)", ("z",))
    assert eval_complex(e, {"z": 1j}) == pytest.approx(0)
    with pytest.raises(PoleError):
        eval_complex(e, {"z": 2})


def test_eval_root_continuation():
    v = ("z",) + COVER_PARAMS
    Q = cover_polynomials(v)["Q"]
    s = RootExtElem.root("sQ", Q)
    ctx = BranchContext({"sQ": BranchSpec({"t0": 0, "t1": 0, "t2": 0}, 1)})
    assert eval_complex(s, {"z": 5.0, "t0": 0, "t1": 0, "t2": 0}, ctx) == pytest.approx(1)
    prev = 1.0
    for eps in np.linspace(0, 0.2, 11)[1:]:
        val = eval_complex(s, {"z": 0.7, "t0": 0, "t1": 0, "t2": eps}, ctx)
        assert abs(val - prev) < 0.1
        prev = val
        assert val == pytest.approx(cmath.sqrt(complex(Q.evaluate({"z": 0.7, "t0": 0, "t1": 0, "t2": eps}))))


def test_eval_branch_point():
    s = RootExtElem.root("s", parse_poly("x", ("x",)))
    ctx = BranchContext({"s": BranchSpec({"x": 1}, 1)})
    assert eval_complex(s, {"x": 4}, ctx) == pytest.approx(2)
    # continuation around the origin flips the sign
    val = eval_complex(s, {"x": 1}, ctx, path=[{"x": 1j}, {"x": -1}, {"x": -1j}])
    assert val == pytest.approx(-1)
    with pytest.raises(BranchPointError):
        eval_complex(s, {"x": -1}, ctx)


def test_bad_branch_value():
    s = RootExtElem.root("s", parse_poly("x", ("x",)))
    with pytest.raises(ValueError):
        eval_complex(s, {"x": 2}, BranchContext({"s": BranchSpec({"x": 1}, 3)}))


@settings(max_examples=30, deadline=None)
@given(polys(max_terms=3), polys(max_terms=3), st.floats(-1, 1), st.floats(-1, 1))
def test_derivative_matches_finite_differences(a, b, x0, y0):
    s = RootExtElem.root("s", parse_poly("x^2 + y^2 + 4", XY))
    e = RootExtElem.from_ratfunc(RatFunc(a)) + RootExtElem.from_ratfunc(RatFunc(b)) * s
    ctx = BranchContext({"s": BranchSpec({"x": 0, "y": 0}, 2)})
    h = 1e-5
    pt = {"x": x0, "y": y0}
    num = (eval_complex(e, {**pt, "x": x0 + h}, ctx) - eval_complex(e, {**pt, "x": x0 - h}, ctx)) / (2 * h)
    exact = eval_complex(e.derivative("x"), pt, ctx)
    assert abs(num - exact) <= 1e-7 * max(1.0, abs(exact))
