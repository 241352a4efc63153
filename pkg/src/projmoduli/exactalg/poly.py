"""Sparse multivariate polynomials over Q(i).

Terms are a dict from exponent tuples to :class:`Scalar`.  The zero polynomial
is the empty dict.  Monomials are ordered graded-lexicographically over the
declared variable order; "leading" always refers to that order.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .scalar import ONE, Scalar, ScalarLike

Exponent = Tuple[int, ...]


class NotDivisibleError(ArithmeticError):
    pass


def _grlex_key(e: Exponent) -> tuple:
    return (sum(e), e)


class MultiPoly:
    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Sequence[str], terms: Mapping[Exponent, ScalarLike] | None = None):
        self.vars: Tuple[str, ...] = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"duplicate variable names in {self.vars}")
        clean: Dict[Exponent, Scalar] = {}
        n = len(self.vars)
        for e, c in (terms or {}).items():
            if len(e) != n or any(k < 0 for k in e):
                raise ValueError(f"bad exponent {e} for variables {self.vars}")
            c = Scalar.coerce(c)
            if not c.is_zero():
                clean[tuple(e)] = c
        self.terms: Dict[Exponent, Scalar] = clean
        self._hash = None

    @classmethod
    def _trusted(cls, vars: Tuple[str, ...], terms: Dict[Exponent, Scalar]) -> "MultiPoly":
        out = cls.__new__(cls)
        out.vars = vars
        out.terms = terms
        out._hash = None
        return out

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c: ScalarLike, vars: Sequence[str] = ()) -> "MultiPoly":
        return cls(vars, {(0,) * len(tuple(vars)): c})

    @classmethod
    def var(cls, name: str, vars: Sequence[str] | None = None) -> "MultiPoly":
        vars = tuple(vars) if vars is not None else (name,)
        if name not in vars:
            raise ValueError(f"{name!r} not among {vars}")
        e = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, {e: ONE})

    # -- variable bookkeeping ----------------------------------------------
    def with_vars(self, vars: Sequence[str]) -> "MultiPoly":
        """Re-express over ``vars`` (must contain every variable actually used)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        index = {v: k for k, v in enumerate(vars)}
        used = self.used_vars()
        missing = [v for v in used if v not in index]
        if missing:
            raise ValueError(f"variables {missing} not in target list {vars}")
        pos = [index.get(v) for v in self.vars]
        terms: Dict[Exponent, Scalar] = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for k, p in zip(e, pos):
                if k:
                    ne[p] = k
            terms[tuple(ne)] = c
        return MultiPoly._trusted(vars, terms)

    def used_vars(self) -> Tuple[str, ...]:
        used = [False] * len(self.vars)
        for e in self.terms:
            for k, x in enumerate(e):
                if x:
                    used[k] = True
        return tuple(v for v, u in zip(self.vars, used) if u)

    def _align(self, other: "MultiPoly") -> Tuple["MultiPoly", "MultiPoly"]:
        if self.vars == other.vars:
            return self, other
        vars = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return self.with_vars(vars), other.with_vars(vars)

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.const(other, self.vars)

    # -- predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(not any(e) for e in self.terms)

    def const_value(self) -> Scalar:
        if not self.is_const():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values())) if self.terms else Scalar(0)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var: str) -> int:
        if var not in self.vars:
            return 0 if self.terms else -1
        k = self.vars.index(var)
        return max((e[k] for e in self.terms), default=-1)

    def leading(self) -> Tuple[Exponent, Scalar]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def monic(self) -> "MultiPoly":
        if not self.terms:
            return self
        _, lc = self.leading()
        if lc.is_one():
            return self
        inv = lc.inverse()
        return MultiPoly._trusted(self.vars, {e: c * inv for e, c in self.terms.items()})

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other) -> "MultiPoly":
        a, b = self._align(self._coerce(other))
        if not b.terms:
            return a
        terms = dict(a.terms)
        for e, c in b.terms.items():
            s = terms.get(e)
            if s is None:
                terms[e] = c
            else:
                s = s + c
                if s.is_zero():
                    del terms[e]
                else:
                    terms[e] = s
        return MultiPoly._trusted(a.vars, terms)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._trusted(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def scale(self, c: ScalarLike) -> "MultiPoly":
        c = Scalar.coerce(c)
        if c.is_zero():
            return MultiPoly._trusted(self.vars, {})
        return MultiPoly._trusted(self.vars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        a, b = self._align(other)
        if len(a.terms) < len(b.terms):
            a, b = b, a
        terms: Dict[Exponent, Scalar] = {}
        for eb, cb in b.terms.items():
            for ea, ca in a.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = terms.get(e)
                terms[e] = ca * cb if s is None else s + ca * cb
        return MultiPoly._trusted(a.vars, {e: c for e, c in terms.items() if not c.is_zero()})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = MultiPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def mul_monomial(self, e: Exponent, c: Scalar) -> "MultiPoly":
        return MultiPoly._trusted(
            self.vars, {tuple(x + y for x, y in zip(k, e)): v * c for k, v in self.terms.items()}
        )

    def derivative(self, var: str) -> "MultiPoly":
        if var not in self.vars:
            return MultiPoly._trusted(self.vars, {})
        k = self.vars.index(var)
        terms: Dict[Exponent, Scalar] = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                terms[tuple(ne)] = c * e[k]
        return MultiPoly._trusted(self.vars, terms)

    def exact_div(self, other: "MultiPoly") -> "MultiPoly":
        """Quotient ``self / other``; raises NotDivisibleError if inexact."""
        a, b = self._align(other)
        if not b.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if not a.terms:
            return a
        if b.is_const():
            return a.scale(b.const_value().inverse())
        lb, cb = b.leading()
        inv = cb.inverse()
        rem = dict(a.terms)
        quot: Dict[Exponent, Scalar] = {}
        while rem:
            lr = max(rem, key=_grlex_key)
            m = tuple(x - y for x, y in zip(lr, lb))
            if any(k < 0 for k in m):
                raise NotDivisibleError("polynomial division is not exact")
            c = rem[lr] * inv
            quot[m] = c
            for eb, vb in b.terms.items():
                e = tuple(x + y for x, y in zip(eb, m))
                s = rem.get(e)
                s = -(vb * c) if s is None else s - vb * c
                if s.is_zero():
                    rem.pop(e, None)
                else:
                    rem[e] = s
        return MultiPoly._trusted(a.vars, quot)

    def divides(self, other: "MultiPoly") -> bool:
        try:
            other.exact_div(self)
        except NotDivisibleError:
            return False
        return True

    # -- univariate views -------------------------------------------------
    def coeffs_in(self, var: str) -> Dict[int, "MultiPoly"]:
        """Coefficients as a polynomial in ``var`` (same variable list, var-free)."""
        if var not in self.vars:
            return {0: self} if self.terms else {}
        k = self.vars.index(var)
        buckets: Dict[int, Dict[Exponent, Scalar]] = {}
        for e, c in self.terms.items():
            ne = e[:k] + (0,) + e[k + 1:]
            buckets.setdefault(e[k], {})[ne] = c
        return {d: MultiPoly._trusted(self.vars, t) for d, t in buckets.items()}

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[int, "MultiPoly"], var: str, vars: Sequence[str]) -> "MultiPoly":
        vars = tuple(vars)
        k = vars.index(var)
        terms: Dict[Exponent, Scalar] = {}
        for d, p in coeffs.items():
            for e, c in p.with_vars(vars).terms.items():
                terms[e[:k] + (e[k] + d,) + e[k + 1:]] = c
        return cls._trusted(vars, terms)

    # -- substitution / evaluation ------------------------------------------
    def substitute(self, values: Mapping[str, ScalarLike]) -> "MultiPoly":
        """Replace listed variables by exact constants (variables are kept)."""
        idx = [(k, Scalar.coerce(values[v])) for k, v in enumerate(self.vars) if v in values]
        if not idx:
            return self
        terms: Dict[Exponent, Scalar] = {}
        for e, c in self.terms.items():
            ne = list(e)
            for k, val in idx:
                if e[k]:
                    c = c * val ** e[k]
                    ne[k] = 0
            ne = tuple(ne)
            s = terms.get(ne)
            terms[ne] = c if s is None else s + c
        return MultiPoly._trusted(self.vars, {e: c for e, c in terms.items() if not c.is_zero()})

    def compose(self, values: Mapping[str, "MultiPoly"]) -> "MultiPoly":
        """Replace variables by polynomials."""
        out = None
        cache: Dict[Tuple[str, int], MultiPoly] = {}
        for e, c in self.terms.items():
            term = None
            rest = [0] * len(self.vars)
            for k, v in enumerate(self.vars):
                if not e[k]:
                    continue
                if v in values:
                    key = (v, e[k])
                    if key not in cache:
                        cache[key] = values[v] ** e[k]
                    term = cache[key] if term is None else term * cache[key]
                else:
                    rest[k] = e[k]
            mono = MultiPoly(self.vars, {tuple(rest): c})
            term = mono if term is None else term * mono
            out = term if out is None else out + term
        if out is None:
            vars = self.vars
            for p in values.values():
                vars = vars + tuple(v for v in p.vars if v not in vars)
            return MultiPoly(vars)
        return out

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        total = 0j
        for e, c in self.terms.items():
            term = complex(c)
            for v, k in zip(self.vars, e):
                if k:
                    term *= values[v] ** k
            total += term
        return total

    # -- comparison / text ------------------------------------------------
    def _canonical(self) -> frozenset:
        return frozenset(
            (tuple((v, k) for v, k in zip(self.vars, e) if k), c) for e, c in self.terms.items()
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            if self.vars == other.vars:
                return self.terms == other.terms
            return self._canonical() == other._canonical()
        try:
            return self == MultiPoly.const(Scalar.coerce(other), self.vars)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._canonical())
        return self._hash

    def sorted_terms(self) -> Iterable[Tuple[Exponent, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            negative = c.is_real() and c.re < 0
            mag = -c if negative else c
            if not mono:
                body = mag.to_text()
            elif mag.is_one():
                body = mono
            else:
                body = f"{mag.to_text()}*{mono}"
            if not parts:
                parts.append(f"-{body}" if negative else body)
            else:
                parts.append(f" - {body}" if negative else f" + {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"MultiPoly({self.to_text()!r}, vars={self.vars})"


# -- gcd ------------------------------------------------------------------

def _main_var(a: MultiPoly, b: MultiPoly) -> str | None:
    used = set(a.used_vars()) | set(b.used_vars())
    for v in a.vars:
        if v in used:
            return v
    return None


def content(p: MultiPoly, var: str) -> MultiPoly:
    g = None
    for c in p.coeffs_in(var).values():
        g = c.monic() if g is None else gcd(g, c)
        if g.is_const():
            break
    return g if g is not None else p


def primitive_part(p: MultiPoly, var: str) -> MultiPoly:
    if p.is_zero():
        return p
    return p.exact_div(content(p, var))


def prem(a: MultiPoly, b: MultiPoly, var: str) -> MultiPoly:
    """Pseudo-remainder of a by b as polynomials in ``var``."""
    db = b.degree(var)
    cb = b.coeffs_in(var)
    lc = cb[db]
    x = MultiPoly.var(var, a.vars)
    r = a
    e = a.degree(var) - db + 1
    while not r.is_zero() and r.degree(var) >= db:
        dr = r.degree(var)
        lcr = r.coeffs_in(var)[dr]
        r = r * lc - lcr * (x ** (dr - db)) * b
        e -= 1
    if e > 0:
        r = r * lc ** e
    return r


def _monomial_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    exps = [e for e in a.terms] + [e for e in b.terms]
    low = tuple(min(col) for col in zip(*exps))
    return MultiPoly._trusted(a.vars, {low: ONE})


def gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Monic (grlex) greatest common divisor via recursive primitive PRS."""
    a, b = a._align(b)
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_const() or b.is_const():
        return MultiPoly.const(1, a.vars)
    if a == b:
        return a.monic()
    if len(a.terms) == 1 or len(b.terms) == 1:
        return _monomial_gcd(a, b)
    if _coprime_certificate(a, b):
        return MultiPoly.const(1, a.vars)
    x = _main_var(a, b)
    if a.degree(x) <= 0:
        return gcd(a, content(b, x))
    if b.degree(x) <= 0:
        return gcd(content(a, x), b)
    # cheap exact-divisor shortcuts
    small, big = (a, b) if len(a.terms) <= len(b.terms) else (b, a)
    if small.divides(big):
        return small.monic()
    ca, cb = content(a, x), content(b, x)
    c = gcd(ca, cb)
    pa, pb = a.exact_div(ca), b.exact_div(cb)
    if pa.degree(x) < pb.degree(x):
        pa, pb = pb, pa
    while not pb.is_zero():
        if pb.degree(x) == 0:
            pa = MultiPoly.const(1, a.vars)
            break
        r = prem(pa, pb, x)
        pa, pb = pb, (primitive_part(r, x) if not r.is_zero() else r)
    return (c * primitive_part(pa, x)).monic()


# Coprimality certificate: a nonconstant common factor keeps its degree in some
# shared variable under any specialization of the other variables (mod a prime)
# that keeps both leading coefficients nonzero.  If every such univariate gcd is
# constant, the multivariate gcd is 1.
P_MOD = 4611686018427388073  # prime, 1 mod 4, so sqrt(-1) exists
_I_P = next(r for r in (pow(g, (P_MOD - 1) // 4, P_MOD) for g in range(2, 100)) if r * r % P_MOD == P_MOD - 1)
_SPECIALIZATIONS = (
    (3, 5, 7, 11, 13, 17, 19, 23), (1234567, 7654321, 1111111, 2222221, 99991, 31337, 4242421, 8675309),
)


def _scalar_mod_p(c: Scalar) -> int | None:
    if c._d % P_MOD == 0:
        return None
    return (c._a + c._b * _I_P) * pow(c._d, -1, P_MOD) % P_MOD


def eval_mod_p(p: MultiPoly, point: Mapping[str, int]) -> int:
    """Value of p mod P_MOD at an integer point (0 if a coefficient denominator vanishes)."""
    total = 0
    for e, c in p.terms.items():
        v = _scalar_mod_p(c)
        if v is None:
            return 0
        for name, k in zip(p.vars, e):
            if k:
                v = v * pow(point[name], k, P_MOD) % P_MOD
        total += v
    return total % P_MOD


def _specialize_mod_p(p: MultiPoly, var: str, point: Dict[str, int]) -> List[int] | None:
    k = p.vars.index(var)
    out: Dict[int, int] = {}
    for e, c in p.terms.items():
        v = _scalar_mod_p(c)
        if v is None:
            return None
        for j, name in enumerate(p.vars):
            if j != k and e[j]:
                v = v * pow(point[name], e[j], P_MOD) % P_MOD
        out[e[k]] = (out.get(e[k], 0) + v) % P_MOD
    deg = p.degree(var)
    coeffs = [out.get(i, 0) for i in range(deg + 1)]
    return coeffs if coeffs[-1] else None


def _gcd_degree_mod_p(f: List[int], g: List[int]) -> int:
    def trim(h):
        while h and h[-1] == 0:
            h.pop()
        return h

    f, g = trim(list(f)), trim(list(g))
    while g:
        inv = pow(g[-1], -1, P_MOD)
        while len(f) >= len(g) and f:
            q = f[-1] * inv % P_MOD
            shift = len(f) - len(g)
            for i, gi in enumerate(g):
                f[shift + i] = (f[shift + i] - q * gi) % P_MOD
            trim(f)
        f, g = g, f
    return len(f) - 1


def _coprime_certificate(a: MultiPoly, b: MultiPoly) -> bool:
    shared = set(a.used_vars()) & set(b.used_vars())
    if not shared:
        return True  # then any common factor would be constant
    for var in shared:
        for values in _SPECIALIZATIONS:
            point = {name: values[j % len(values)] for j, name in enumerate(a.vars)}
            fa = _specialize_mod_p(a, var, point)
            fb = _specialize_mod_p(b, var, point)
            if fa is not None and fb is not None:
                if _gcd_degree_mod_p(fa, fb) > 0:
                    return False
                break
        else:
            return False
    return True


# -- resultant ---------------------------------------------------------------

def resultant(p: MultiPoly, q: MultiPoly, var: str) -> MultiPoly:
    """Res_var(p, q) by fraction-free (Bareiss) elimination of the Sylvester matrix."""
    p, q = p._align(q)
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of a zero polynomial")
    if var not in p.used_vars() and var not in q.used_vars():
        raise ValueError(f"variable {var!r} absent from both polynomials")
    vars = p.vars
    m, n = p.degree(var), q.degree(var)
    zero = MultiPoly(vars)
    if m == 0:
        return p.coeffs_in(var)[0] ** n
    if n == 0:
        return q.coeffs_in(var)[0] ** m
    cp, cq = p.coeffs_in(var), q.coeffs_in(var)
    size = m + n
    rows = []
    for r in range(n):
        row = [zero] * size
        for k in range(m + 1):
            row[r + k] = cp.get(m - k, zero)
        rows.append(row)
    for r in range(m):
        row = [zero] * size
        for k in range(n + 1):
            row[r + k] = cq.get(n - k, zero)
        rows.append(row)
    return _bareiss_det(rows, vars)


def _bareiss_det(M, vars) -> MultiPoly:
    n = len(M)
    M = [list(r) for r in M]
    sign = 1
    prev = MultiPoly.const(1, vars)
    for k in range(n - 1):
        if M[k][k].is_zero():
            for r in range(k + 1, n):
                if not M[r][k].is_zero():
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return MultiPoly(vars)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]).exact_div(prev)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return -det if sign < 0 else det
