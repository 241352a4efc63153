"""Reduced rational functions over Q(i) with factored denominators.

The denominator is kept as ``prod p_j^e_j`` over a basis of pairwise coprime,
monic, non-constant polynomials; single variables are always split off as their
own factors.  The numerator is coprime to every basis factor, so the quotient is
fully reduced.  Keeping the basis small means reduction is trial division by
small factors rather than a gcd against an expanded high power.
"""

from __future__ import annotations

import zlib
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .poly import P_MOD, MultiPoly, NotDivisibleError, _coprime_certificate, eval_mod_p, gcd
from .scalar import Scalar, ScalarLike

Factors = Tuple[Tuple[MultiPoly, int], ...]


def _factor_key(p: MultiPoly) -> tuple:
    return (p.total_degree(), len(p.terms), p.to_text())


class RatFunc:
    """``num / prod(p^e)``; see the module docstring for the invariants."""

    __slots__ = ("num", "factors", "_den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, *, reduced: bool = False):
        if den is None:
            den = MultiPoly.const(1, num.vars)
        num, den = num._align(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        basis: Dict[MultiPoly, int] = {}
        num = _insert(basis, den, 1, num)
        self._finish(num, basis)

    @classmethod
    def _from_parts(cls, num: MultiPoly, basis: Dict[MultiPoly, int]) -> "RatFunc":
        out = cls.__new__(cls)
        out._finish(num, basis)
        return out

    def _finish(self, num: MultiPoly, basis: Dict[MultiPoly, int]) -> None:
        vars = num.vars
        for p in basis:
            vars = vars + tuple(v for v in p.vars if v not in vars)
        num = num.with_vars(vars)
        basis = {p.with_vars(vars): e for p, e in basis.items() if e > 0}
        if num.is_zero():
            basis = {}
        else:
            for p in list(basis):
                while basis[p] > 0 and not _coprime_certificate(num, p):
                    try:
                        num = num.exact_div(p)
                    except NotDivisibleError:
                        break
                    basis[p] -= 1
                if basis[p] == 0:
                    del basis[p]
                elif not _coprime_certificate(num, p):
                    # basis factor may share a proper divisor with num: split it
                    g = gcd(num, p)
                    if g.is_const():
                        continue
                    e = basis.pop(p)
                    num = _insert(basis, g, e, num)
                    num = _insert(basis, p.exact_div(g), e, num)
                    self._finish(num, basis)
                    return
        self.num = num
        self.factors: Factors = tuple(sorted(basis.items(), key=lambda pe: _factor_key(pe[0])))
        self._den = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c: ScalarLike, vars: Sequence[str] = ()) -> "RatFunc":
        return cls._from_parts(MultiPoly.const(c, vars), {})

    @classmethod
    def var(cls, name: str, vars: Sequence[str] | None = None) -> "RatFunc":
        return cls._from_parts(MultiPoly.var(name, vars), {})

    @classmethod
    def poly(cls, p: MultiPoly) -> "RatFunc":
        return cls._from_parts(p, {})

    # -- structure ------------------------------------------------------------
    @property
    def vars(self) -> Tuple[str, ...]:
        return self.num.vars

    @property
    def den(self) -> MultiPoly:
        """Expanded monic denominator."""
        if self._den is None:
            d = MultiPoly.const(1, self.vars)
            for p, e in self.factors:
                d = d * p ** e
            self._den = d
        return self._den

    def with_vars(self, vars) -> "RatFunc":
        vars = tuple(vars)
        if vars == self.vars:
            return self
        out = RatFunc.__new__(RatFunc)
        out.num = self.num.with_vars(vars)
        out.factors = tuple((p.with_vars(vars), e) for p, e in self.factors)
        out._den = None
        return out

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, MultiPoly):
            return RatFunc.poly(other)
        return RatFunc.const(Scalar.coerce(other), self.vars)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return not self.factors

    def is_const(self) -> bool:
        return not self.factors and self.num.is_const()

    def const_value(self) -> Scalar:
        if self.factors:
            raise ValueError("rational function is not constant")
        return self.num.const_value()

    # -- arithmetic -----------------------------------------------------------
    def _basis(self) -> Dict[MultiPoly, int]:
        return dict(self.factors)

    def __add__(self, other) -> "RatFunc":
        o = self._coerce(other)
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        a, b = _common(self, o)
        # common basis: refine b's factors into a's
        basis = a._basis()
        one = MultiPoly.const(1, a.vars)
        for p, e in b.factors:
            _insert(basis, p, e, one)  # monic factors split into monic pieces
        # both denominators over lcm = prod p^max
        pa = _exponents_in(a.factors, basis)
        pb = _exponents_in(b.factors, basis)
        lcm = {p: max(pa.get(p, 0), pb.get(p, 0)) for p in basis}
        na = a.num * _prod({p: lcm[p] - pa.get(p, 0) for p in lcm}, a.vars)
        nb = b.num * _prod({p: lcm[p] - pb.get(p, 0) for p in lcm}, a.vars)
        return RatFunc._from_parts(na + nb, lcm)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc._from_parts(-self.num, self._basis())

    def __sub__(self, other) -> "RatFunc":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RatFunc":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RatFunc":
        o = self._coerce(other)
        a, b = _common(self, o)
        if a.is_zero() or b.is_zero():
            return RatFunc.const(0, a.vars)
        basis = a._basis()
        num = a.num * b.num
        for p, e in b.factors:
            num = _insert(basis, p, e, num)
        return RatFunc._from_parts(num, basis)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        basis: Dict[MultiPoly, int] = {}
        num = _insert(basis, self.num, 1, self.den)
        return RatFunc._from_parts(num, basis)

    def __truediv__(self, other) -> "RatFunc":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "RatFunc":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc._from_parts(self.num ** n, {p: e * n for p, e in self.factors})

    def derivative(self, var: str) -> "RatFunc":
        """d(n / prod p^e) = (n' P - n sum e p' P/p) / (prod p^e * P), P = prod of moving factors."""
        moving = [(p, e, p.derivative(var)) for p, e in self.factors]
        moving = [m for m in moving if not m[2].is_zero()]
        dn = self.num.derivative(var)
        if not moving:
            return RatFunc._from_parts(dn, self._basis())
        P = _prod({p: 1 for p, _, _ in moving}, self.vars)
        num = dn * P
        for p, e, dp in moving:
            num = num - self.num * dp * P.exact_div(p) * e
        basis = self._basis()
        for p, _, _ in moving:
            basis[p] += 1
        return RatFunc._from_parts(num, basis)

    def substitute(self, values: Mapping[str, ScalarLike]) -> "RatFunc":
        den = MultiPoly.const(1, self.vars)
        for p, e in self.factors:
            den = den * p.substitute(values) ** e
        return RatFunc(self.num.substitute(values), den)

    def compose(self, values: Mapping[str, "RatFunc"]) -> "RatFunc":
        """Replace variables by rational functions."""
        if not values:
            return self
        out = _compose_poly(self.num, values)
        for p, e in self.factors:
            out = out / _compose_poly(p, values) ** e
        return out

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        d = 1
        for p, e in self.factors:
            d *= p.evaluate(values) ** e
        if d == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num.evaluate(values) / d

    # -- comparison / text ----------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFunc):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        if self.vars == other.vars and self.factors == other.factors:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    def __hash__(self) -> int:
        # value at a fixed point mod a prime: independent of representation
        point = {v: zlib.crc32(v.encode()) % P_MOD for v in self.vars}
        d = 1
        for p, e in self.factors:
            d = d * pow(eval_mod_p(p, point), e, P_MOD) % P_MOD
        if d == 0:
            return 0
        return hash(eval_mod_p(self.num, point) * pow(d, -1, P_MOD) % P_MOD)

    def to_text(self) -> str:
        if not self.factors:
            return self.num.to_text()
        parts = []
        for p, e in self.factors:
            base = p.to_text()
            base = base if len(p.terms) == 1 and "*" not in base else f"({base})"
            parts.append(base if e == 1 else f"{base}^{e}")
        den = parts[0] if len(parts) == 1 else f"({'*'.join(parts)})"
        return f"({self.num.to_text()})/{den}"

    def __repr__(self) -> str:
        return f"RatFunc({self.to_text()!r})"


def _common(a: RatFunc, b: RatFunc) -> Tuple[RatFunc, RatFunc]:
    if a.vars == b.vars:
        return a, b
    vars = a.vars + tuple(v for v in b.vars if v not in a.vars)
    return a.with_vars(vars), b.with_vars(vars)


def _prod(exps: Mapping[MultiPoly, int], vars) -> MultiPoly:
    out = MultiPoly.const(1, vars)
    for p, e in exps.items():
        if e:
            out = out * p ** e
    return out


def _split_monomial(q: MultiPoly) -> Tuple[List[Tuple[MultiPoly, int]], MultiPoly]:
    """Pull single-variable powers out of q: q = prod v^k * rest."""
    low = [min(col) for col in zip(*q.terms)] if q.terms else []
    if not any(low):
        return [], q
    out = [(MultiPoly.var(v, q.vars), k) for v, k in zip(q.vars, low) if k]
    rest = MultiPoly._trusted(q.vars, {tuple(x - y for x, y in zip(e, low)): c for e, c in q.terms.items()})
    return out, rest


def _insert(basis: Dict[MultiPoly, int], q: MultiPoly, e: int, num: MultiPoly) -> MultiPoly:
    """Multiply the denominator by q^e, keeping the basis coprime.

    Constants are moved into the numerator, which is returned.
    """
    if e == 0:
        return num
    q, num = q._align(num)
    if basis:
        vars = q.vars
        for p in basis:
            vars = vars + tuple(v for v in p.vars if v not in vars)
        q, num = q.with_vars(vars), num.with_vars(vars)
        for p in list(basis):
            if p.vars != vars:
                basis[p.with_vars(vars)] = basis.pop(p)
    if q.is_const():
        return num.scale(q.const_value().inverse() ** e)
    mono, rest = _split_monomial(q)
    for v, k in mono:
        basis[v] = basis.get(v, 0) + k * e
    q = rest
    if q.is_const():
        return num.scale(q.const_value().inverse() ** e)
    _, lc = q.leading()
    if not lc.is_one():
        num = num.scale(lc.inverse() ** e)
        q = q.monic()
    if q in basis:
        basis[q] += e
        return num
    for p in list(basis):
        if _coprime_certificate(p, q):
            continue
        g = gcd(p, q)
        if g.is_const():
            continue
        ep = basis.pop(p)
        num = _insert(basis, g, ep + e, num)
        num = _insert(basis, p.exact_div(g), ep, num)
        return _insert(basis, q.exact_div(g), e, num)
    basis[q] = e
    return num


def _exponents_in(factors: Iterable[Tuple[MultiPoly, int]], basis: Dict[MultiPoly, int]) -> Dict[MultiPoly, int]:
    """Exponents of each basis element in prod(factors), which must be a basis product."""
    out: Dict[MultiPoly, int] = {}
    for q, e in factors:
        q = q.with_vars(next(iter(basis)).vars) if basis else q
        rem = q
        for p in basis:
            k = 0
            while not rem.is_const() and p.divides(rem):
                rem = rem.exact_div(p)
                k += 1
            if k:
                out[p] = out.get(p, 0) + k * e
        if not rem.is_const():
            raise ArithmeticError("factor not expressible in the coprime basis")
    return out


def _compose_poly(p: MultiPoly, values: Mapping[str, RatFunc]) -> RatFunc:
    keep = tuple(v for v in p.vars if v not in values)
    out = None
    powers: dict = {}
    for e, c in p.terms.items():
        rest = tuple(k if v not in values else 0 for v, k in zip(p.vars, e))
        term = RatFunc.poly(MultiPoly(p.vars, {rest: c}).with_vars(
            keep + tuple(v for v in p.vars if v in values)))
        for v, k in zip(p.vars, e):
            if k and v in values:
                if (v, k) not in powers:
                    powers[(v, k)] = values[v] ** k
                term = term * powers[(v, k)]
        out = term if out is None else out + term
    if out is None:
        return RatFunc.const(0, p.vars)
    return out
