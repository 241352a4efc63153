"""Splitting tau = F (theta1 - theta2 o u) over the two-chart cover.

With ``h = tau / F`` on the overlap, the Laurent decomposition of h on a circle
gives theta1 (powers z^k, k >= 0, holomorphic in chart 1) and theta2 o u (minus
the negative-power part, holomorphic in chart 2).  The constant term is a pure
gauge choice and goes to theta1 by default.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property, lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .exactalg import Evaluator, MultiPoly, RatFunc, RootExtElem
from .family import Family, exact_cech, verify_second_derivative_relation

RECON_TOL = 1e-10
TAIL_TOL = 1e-12
RESIDUAL_TOL = 1e-9
NOISE_FLOOR = 64 * np.finfo(float).eps
DEFAULT_K = 256


class LaurentSplitError(ArithmeticError):
    pass


class SplitResidualError(ArithmeticError):
    def __init__(self, residual: float, tol: float):
        super().__init__(f"second-derivative relation residual {residual:.3g} exceeds {tol:.3g}")
        self.residual = residual


@dataclass(frozen=True)
class LaurentWindow:
    """Coefficients c_k, k = -K/2 .. K/2 - 1, of a function sampled on |z| = r."""

    r: float
    K: int
    coeffs: np.ndarray  # (..., K), index j <-> k = j - K/2
    tail: float
    reconstruction_error: float

    @property
    def valid(self) -> bool:
        return self.tail < TAIL_TOL and self.reconstruction_error < RECON_TOL

    def coefficient(self, k: int) -> np.ndarray:
        return self.coeffs[..., k + self.K // 2]

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        n = self.K // 2
        plus = _polyval(self.coeffs[..., n:], z)
        minus = _polyval(np.concatenate([np.zeros_like(self.coeffs[..., :1]), self.coeffs[..., n - 1::-1]], -1), 1 / z)
        return plus + minus


def _polyval(c: np.ndarray, x: np.ndarray) -> np.ndarray:
    """sum_k c[..., k] x^k by Horner, broadcasting c's leading axes against x."""
    out = np.zeros(c.shape[:-1] + np.shape(x), dtype=complex)
    lead = c.shape[:-1] + (1,) * np.ndim(x)
    for k in range(c.shape[-1] - 1, -1, -1):
        out = out * x + c[..., k].reshape(lead)
    return out


def circle(K: int, r: float = 1.0) -> np.ndarray:
    return r * np.exp(2j * np.pi * np.arange(K) / K)


def laurent_window(values: np.ndarray, r: float = 1.0) -> LaurentWindow:
    """Laurent coefficients from K equispaced samples (last axis) on |z| = r."""
    values = np.asarray(values, dtype=complex)
    K = values.shape[-1]
    if K % 2 or K < 4:
        raise ValueError("sample count must be even and at least 4")
    raw = np.fft.fft(values, axis=-1) / K
    k = np.fft.fftfreq(K, 1 / K).astype(int)  # 0..K/2-1, -K/2..-1
    c = raw * float(r) ** (-k.astype(float))
    order = np.argsort(k)
    c = c[..., order]
    raw = raw[..., order]  # tail decay is judged on the circle itself, not after the r^-k rescaling
    scale = max(1.0, float(np.max(np.abs(raw))) if raw.size else 1.0)
    edge = np.concatenate([raw[..., :2], raw[..., -2:]], axis=-1)
    tail = float(np.max(np.abs(edge))) / scale
    win = LaurentWindow(float(r), K, c, tail, 0.0)
    recon = float(np.max(np.abs(win(circle(K, r)) - values))) / max(1.0, float(np.max(np.abs(values))))
    return replace(win, reconstruction_error=recon)


@dataclass(frozen=True)
class LaurentSplit:
    plus: np.ndarray   # (..., n) coefficients of z^k, k = 0..n-1
    minus: np.ndarray  # (..., n) coefficients of z^-k, k = 1..n
    window: LaurentWindow
    minus_constant: Optional[np.ndarray] = None  # c_0, when assigned to the minus part

    def plus_at(self, z) -> np.ndarray:
        return _polyval(self.plus, np.asarray(z, dtype=complex))

    def minus_at(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        c = np.concatenate([np.zeros_like(self.minus[..., :1]), self.minus], -1)
        if self.minus_constant is not None:
            c[..., 0] = self.minus_constant
        return _polyval(c, 1 / z)


def laurent_split(h, r: float = 1.0, K: int = DEFAULT_K, constant: str = "plus",
                  tail_tol: float = TAIL_TOL, recon_tol: float = RECON_TOL) -> LaurentSplit:
    """Split h = plus(z) + minus(z) on |z| = r.

    ``h`` is a callable on an array of points (returning (..., K) values) or an
    array of samples at ``circle(K, r)``.  ``constant`` says which part gets c_0.
    """
    if constant not in ("plus", "minus"):
        raise ValueError("constant must be 'plus' or 'minus'")
    values = h(circle(K, r)) if callable(h) else np.asarray(h, dtype=complex)
    win = laurent_window(values, r)
    if win.tail >= tail_tol:
        raise LaurentSplitError(f"Laurent tail {win.tail:.3g} not below {tail_tol:.3g}: "
                                f"pole on or near |z|={r}, or K={K} too small")
    if win.reconstruction_error >= recon_tol:
        raise LaurentSplitError(f"reconstruction error {win.reconstruction_error:.3g}")
    n = K // 2
    plus = _trim(win.coeffs[..., n:].copy(), r)
    minus = _trim(win.coeffs[..., n - 1::-1].copy(), 1 / r)
    if constant == "minus":
        c0 = plus[..., 0].copy()
        plus[..., 0] = 0
        return LaurentSplit(plus, minus, win, c0)
    return LaurentSplit(plus, minus, win)


def _trim(c: np.ndarray, r: float) -> np.ndarray:
    """Drop the trailing run of coefficients at round-off level on |z| = r.

    Left in, that noise is amplified by |z/r|^k when the series is summed off the circle.
    """
    raw = np.abs(c) * float(r) ** np.arange(c.shape[-1])
    scale = max(float(raw.max()) if raw.size else 0.0, 1e-300)
    flat = c.reshape(-1, c.shape[-1])
    for row, mag in zip(flat, raw.reshape(flat.shape)):
        big = np.nonzero(mag > NOISE_FLOOR * scale)[0]
        row[(big[-1] + 1 if big.size else 0):] = 0
    return flat.reshape(c.shape)


# -- cochains -------------------------------------------------------------------

@dataclass(frozen=True)
class GaugeOneForm:
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=complex).reshape(-1))


@dataclass(frozen=True)
class Cochain0Form:
    """theta_i for both charts at one parameter point.

    ``theta1(z)`` and ``theta2_matched(z)`` return (m, K) arrays; the second is
    theta2 at the matched point zh = u(z).  ``shift`` is a gauge added to both.
    """

    t: np.ndarray
    chart1: Callable[[np.ndarray], np.ndarray]
    chart2_matched: Callable[[np.ndarray], np.ndarray]
    shift: np.ndarray
    chart2: Optional[Callable[[np.ndarray], np.ndarray]] = None
    source: str = "numeric"

    @property
    def m(self) -> int:
        return self.shift.shape[0]

    def _add(self, v: np.ndarray, z) -> np.ndarray:
        return v + self.shift.reshape((-1,) + (1,) * np.ndim(z))

    def theta1(self, z) -> np.ndarray:
        return self._add(self.chart1(np.asarray(z, dtype=complex)), z)

    def theta2_matched(self, z) -> np.ndarray:
        return self._add(self.chart2_matched(np.asarray(z, dtype=complex)), z)

    def theta2(self, zh) -> np.ndarray:
        """theta2 in its own coordinate (only when zh = 1/z on the overlap)."""
        if self.chart2 is None:
            raise NotImplementedError("theta2 is only available at matched points for this transition")
        return self._add(self.chart2(np.asarray(zh, dtype=complex)), zh)


def apply_gauge(theta: Cochain0Form, xi: GaugeOneForm | Sequence[complex]) -> Cochain0Form:
    xi = xi if isinstance(xi, GaugeOneForm) else GaugeOneForm(np.asarray(xi))
    if xi.xi.shape != theta.shift.shape:
        raise ValueError("gauge form has the wrong number of components")
    return replace(theta, shift=theta.shift + xi.xi)


def zero_cochain(m: int, t) -> Cochain0Form:
    def zero(z):
        return np.zeros((m,) + np.shape(z), dtype=complex)

    return Cochain0Form(np.asarray(t, dtype=complex), zero, zero, np.zeros(m, dtype=complex), zero, "zero")


@dataclass(frozen=True)
class SplitDiagnostics:
    residual: float
    tail: float
    reconstruction_error: float
    K: int
    r: float
    mode: str


def _zh_is_inverse(fam: Family) -> bool:
    g = fam.transition.g
    return g.is_root_free() and g.as_ratfunc() == RatFunc.var(fam.fiber[0], g.vars).inverse()


def split_cocycle(fam: Family, t, r: float = 1.0, K: int = DEFAULT_K, mode: str = "numeric",
                  constant: str = "plus", tol: float = RESIDUAL_TOL,
                  tail_tol: float = TAIL_TOL) -> Tuple[Cochain0Form, SplitDiagnostics]:
    """Split tau at t; ``mode`` is "numeric", "exact" (root-free families) or "auto"."""
    t = fam.check_t(t)
    if mode == "auto":
        mode = "exact" if fam.is_root_free() and constant == "plus" else "numeric"
    if mode == "exact":
        theta = exact_split(fam).at(t)
        tail = recon = 0.0
    elif mode == "numeric":
        z = circle(K, r)
        j = fam.jets(z, t)
        sp = laurent_split(j.tau / j.F[None, :], r, K, constant, tail_tol)
        tail, recon = sp.window.tail, sp.window.reconstruction_error
        inverse = _zh_is_inverse(fam)
        theta = Cochain0Form(
            t, sp.plus_at, lambda zz: -sp.minus_at(zz), np.zeros(fam.m, dtype=complex),
            (lambda zh: -sp.minus_at(1 / zh)) if inverse else None, "numeric")
    else:
        raise ValueError(f"unknown split mode {mode!r}")
    res = verify_second_derivative_relation(fam, t, theta)
    if not res < tol:
        raise SplitResidualError(res, tol)
    return theta, SplitDiagnostics(res, tail, recon, K, r, mode)


# -- exact partial-fraction split ------------------------------------------------

class _UPoly:
    """Univariate polynomial in the fiber variable with RatFunc coefficients."""

    def __init__(self, coeffs: List[RatFunc]):
        while coeffs and coeffs[-1].is_zero():
            coeffs = coeffs[:-1]
        self.c = coeffs

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    @classmethod
    def from_poly(cls, p: MultiPoly, var: str, vars) -> "_UPoly":
        cs = p.coeffs_in(var)
        n = max(cs) if cs else -1
        return cls([RatFunc.poly(cs[k].with_vars(vars)) if k in cs else RatFunc.const(0, vars)
                    for k in range(n + 1)])

    def __add__(self, o: "_UPoly") -> "_UPoly":
        n = max(len(self.c), len(o.c))
        zero = (self.c or o.c)[0] * 0
        a = self.c + [zero] * (n - len(self.c))
        b = o.c + [zero] * (n - len(o.c))
        return _UPoly([x + y for x, y in zip(a, b)])

    def __neg__(self) -> "_UPoly":
        return _UPoly([-x for x in self.c])

    def __sub__(self, o: "_UPoly") -> "_UPoly":
        return self + (-o)

    def __mul__(self, o: "_UPoly") -> "_UPoly":
        if not self.c or not o.c:
            return _UPoly([])
        out = [self.c[0] * 0] * (len(self.c) + len(o.c) - 1)
        for i, x in enumerate(self.c):
            for j, y in enumerate(o.c):
                out[i + j] = out[i + j] + x * y
        return _UPoly(out)

    def divmod(self, o: "_UPoly") -> Tuple["_UPoly", "_UPoly"]:
        if not o.c:
            raise ZeroDivisionError("division by zero polynomial")
        r = list(self.c)
        zero = o.c[0] * 0
        q = [zero] * max(1, len(r) - len(o.c) + 1)
        inv = o.c[-1].inverse()
        while len(r) >= len(o.c):
            k = len(r) - len(o.c)
            coef = r[-1] * inv
            q[k] = coef
            for i, y in enumerate(o.c):
                r[k + i] = r[k + i] - coef * y
            r = _UPoly(r[:-1]).c
        return _UPoly(q), _UPoly(r)

    def to_ratfunc(self, var: str, vars) -> RatFunc:
        x = RatFunc.var(var, vars)
        out = RatFunc.const(0, vars)
        for c in reversed(self.c):
            out = out * x + c
        return out


def _inverse_mod(b: _UPoly, a: _UPoly) -> _UPoly:
    """b^{-1} mod a by the extended Euclidean algorithm over the coefficient field."""
    r0, r1 = a, b.divmod(a)[1]
    s0, s1 = _UPoly([]), _UPoly([RatFunc.const(1, a.c[0].vars)])
    while r1.deg > 0:
        q, r2 = r0.divmod(r1)
        r0, r1 = r1, r2
        s0, s1 = s1, s0 - q * s1
    if r1.deg < 0:
        raise ArithmeticError("factors are not coprime")
    return _UPoly([c * r1.c[0].inverse() for c in s1.c]).divmod(a)[1]


@dataclass(frozen=True)
class ExactSplit:
    fam: Family
    theta1: Tuple[RootExtElem, ...]
    theta2: Tuple[RootExtElem, ...]        # in zh
    theta2_of_z: Tuple[RootExtElem, ...]   # theta2 o u, in z

    @cached_property
    def _ev(self) -> Tuple[Evaluator, Evaluator, Evaluator]:
        def ev(elems):
            return Evaluator({str(a): e for a, e in enumerate(elems)})

        return ev(self.theta1), ev(self.theta2), ev(self.theta2_of_z)

    def at(self, t) -> Cochain0Form:
        t = self.fam.check_t(t)
        pp = self.fam.param_point(t)
        z1, z2 = self.fam.fiber
        e1, e2, e2m = self._ev
        m = self.fam.m

        def stack(ev, var):
            def fn(x):
                vals = ev({var: x, **pp})
                return np.array([np.broadcast_to(vals[str(a)], np.shape(x)) for a in range(m)], dtype=complex)
            return fn

        return Cochain0Form(t, stack(e1, z1), stack(e2m, z1), np.zeros(m, dtype=complex), stack(e2, z2), "exact")


def _used_vars(r: RatFunc) -> set:
    out = set(r.num.used_vars())
    for p, _ in r.factors:
        out.update(p.used_vars())
    return out


def _classify(p: MultiPoly, var: str, fam: Family) -> str:
    """'inside', 'outside' or 'const' for a denominator factor, by its z-roots at t0."""
    if p.degree(var) <= 0:
        return "const"
    at0 = p.substitute({q: _exact(v) for q, v in zip(fam.params, fam.t0) if q in p.vars})
    cs = at0.coeffs_in(var)
    n = max(cs)
    coeffs = [complex(cs[k].const_value()) if k in cs else 0j for k in range(n, -1, -1)]
    roots = np.roots(coeffs) if n > 0 else np.zeros(0)
    escaped = p.degree(var) - n  # roots that went to infinity at t0
    r_in, r_out = fam.annulus
    if escaped == 0 and np.all(np.abs(roots) < r_in):
        return "inside"
    if np.all(np.abs(roots) > r_out):
        return "outside"
    raise ArithmeticError("denominator factor has roots on both sides of the annulus")


def _exact(v: complex):
    from fractions import Fraction

    from .exactalg import Scalar

    return Scalar(Fraction(v.real).limit_denominator(10**9), Fraction(v.imag).limit_denominator(10**9))


def _split_ratfunc(h: RatFunc, var: str, fam: Family) -> Tuple[RatFunc, RatFunc]:
    """h = plus + minus with minus = X/A (poles inside, vanishing at infinity)."""
    vars = h.vars
    A = MultiPoly.const(1, vars)
    B = MultiPoly.const(1, vars)
    for p, e in h.factors:
        kind = _classify(p, var, fam)
        if kind == "inside":
            A = A * p ** e
        else:
            B = B * p ** e
    if A.is_const():
        return h, RatFunc.const(0, vars)
    N = _UPoly.from_poly(h.num, var, vars)
    Au, Bu = _UPoly.from_poly(A, var, vars), _UPoly.from_poly(B, var, vars)
    q, R = N.divmod(Au * Bu)
    X = (R * _inverse_mod(Bu, Au)).divmod(Au)[1]
    Y, rem = (R - X * Bu).divmod(Au)
    if rem.c:
        raise ArithmeticError("partial fraction remainder is not exact")
    Ar, Br = RatFunc.poly(A), RatFunc.poly(B)
    minus = X.to_ratfunc(var, vars) / Ar
    plus = q.to_ratfunc(var, vars) + Y.to_ratfunc(var, vars) / Br
    return plus, minus


@lru_cache(maxsize=8)
def exact_split(fam: Family) -> ExactSplit:
    """Exact theta for root-free families, symbolic in t (constant term to theta1)."""
    ec = exact_cech(fam)
    z, zh = fam.fiber
    inv = fam.transition.inverse
    if inv is None or fam.normal[1] in _used_vars(inv.g.as_ratfunc()):
        raise NotImplementedError("exact theta2 needs a w-independent inverse fiber map")
    th1, th2, th2z = [], [], []
    z_of_zh = inv.g
    for tau_a in ec.tau:
        h = (tau_a / ec.F).as_ratfunc()
        plus, minus = _split_ratfunc(h, z, fam)
        th1.append(RootExtElem.from_ratfunc(plus))
        th2z.append(RootExtElem.from_ratfunc(-minus))
        th2.append(RootExtElem.from_ratfunc(-minus).compose({z: z_of_zh}))
    return ExactSplit(fam, tuple(th1), tuple(th2), tuple(th2z))
