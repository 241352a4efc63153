"""Multiquadratic extensions of rational function fields.

An element is ``sum_S c_S * prod_{j in S} s_j`` where each ``s_j`` is a formal
square root with ``s_j^2 = D_j`` and each key ``S`` is a set of root symbols.
Squares are always rewritten, so keys never repeat a symbol.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, Iterable, Mapping, Sequence, Tuple

from .poly import MultiPoly
from .ratfunc import RatFunc
from .scalar import Scalar, ScalarLike

Key = FrozenSet[str]
EMPTY: Key = frozenset()


class RootExtElem:
    __slots__ = ("roots", "coeffs")

    def __init__(self, coeffs: Mapping[Iterable[str], RatFunc], roots: Mapping[str, MultiPoly] | None = None):
        roots = dict(roots or {})
        clean: Dict[Key, RatFunc] = {}
        for k, c in coeffs.items():
            k = frozenset(k)
            if not isinstance(c, RatFunc):
                c = RatFunc(c) if isinstance(c, MultiPoly) else RatFunc.const(Scalar.coerce(c))
            if c.is_zero():
                continue
            missing = k - roots.keys()
            if missing:
                raise ValueError(f"undeclared root symbols {sorted(missing)}")
            clean[k] = c
        used = set().union(*clean.keys()) if clean else set()
        self.roots: Dict[str, MultiPoly] = {s: roots[s] for s in sorted(used)}
        vars: Tuple[str, ...] = ()
        for c in clean.values():
            vars = vars + tuple(v for v in c.vars if v not in vars)
        for d in self.roots.values():
            vars = vars + tuple(v for v in d.vars if v not in vars)
        self.coeffs: Dict[Key, RatFunc] = {k: c.with_vars(vars) for k, c in clean.items()}

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_ratfunc(cls, r: RatFunc) -> "RootExtElem":
        return cls({EMPTY: r})

    @classmethod
    def const(cls, c: ScalarLike, vars: Sequence[str] = ()) -> "RootExtElem":
        return cls({EMPTY: RatFunc.const(Scalar.coerce(c), vars)})

    @classmethod
    def var(cls, name: str, vars: Sequence[str] | None = None) -> "RootExtElem":
        return cls({EMPTY: RatFunc.var(name, vars)})

    @classmethod
    def root(cls, symbol: str, D: MultiPoly) -> "RootExtElem":
        return cls({frozenset([symbol]): RatFunc.const(1, D.vars)}, {symbol: D})

    @classmethod
    def coerce(cls, x) -> "RootExtElem":
        if isinstance(x, RootExtElem):
            return x
        if isinstance(x, RatFunc):
            return cls.from_ratfunc(x)
        if isinstance(x, MultiPoly):
            return cls.from_ratfunc(RatFunc(x, reduced=True))
        return cls.const(x)

    # -- structure ------------------------------------------------------------
    @property
    def vars(self) -> Tuple[str, ...]:
        for c in self.coeffs.values():
            return c.vars
        return ()

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_root_free(self) -> bool:
        return all(not k for k in self.coeffs)

    def as_ratfunc(self) -> RatFunc:
        if not self.is_root_free():
            raise ValueError("element involves square roots")
        if not self.coeffs:
            return RatFunc(MultiPoly(self.vars))
        return self.coeffs[EMPTY]

    def coefficient(self, key: Iterable[str] = ()) -> RatFunc:
        k = frozenset(key)
        c = self.coeffs.get(k)
        return c if c is not None else RatFunc(MultiPoly(self.vars))

    def _merge_roots(self, other: "RootExtElem") -> Dict[str, MultiPoly]:
        out = dict(self.roots)
        for s, d in other.roots.items():
            if s in out and out[s] != d:
                raise ValueError(f"root symbol {s!r} declared with two different radicands")
            out[s] = d
        return out

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other) -> "RootExtElem":
        o = RootExtElem.coerce(other)
        roots = self._merge_roots(o)
        coeffs: Dict[Key, RatFunc] = dict(self.coeffs)
        for k, c in o.coeffs.items():
            coeffs[k] = coeffs[k] + c if k in coeffs else c
        return RootExtElem(coeffs, roots)

    __radd__ = __add__

    def __neg__(self) -> "RootExtElem":
        return RootExtElem({k: -c for k, c in self.coeffs.items()}, self.roots)

    def __sub__(self, other) -> "RootExtElem":
        return self + (-RootExtElem.coerce(other))

    def __rsub__(self, other) -> "RootExtElem":
        return RootExtElem.coerce(other) - self

    def __mul__(self, other) -> "RootExtElem":
        o = RootExtElem.coerce(other)
        roots = self._merge_roots(o)
        coeffs: Dict[Key, RatFunc] = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in o.coeffs.items():
                c = c1 * c2
                for s in sorted(k1 & k2):
                    c = c * RatFunc(roots[s], reduced=True)
                k = k1 ^ k2
                coeffs[k] = coeffs[k] + c if k in coeffs else c
        return RootExtElem(coeffs, roots)

    __rmul__ = __mul__

    def inverse(self) -> "RootExtElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero element")
        if self.is_root_free():
            return RootExtElem.from_ratfunc(self.coeffs[EMPTY].inverse())
        s = max(set().union(*self.coeffs.keys()))
        a = RootExtElem({k: c for k, c in self.coeffs.items() if s not in k}, self.roots)
        b = RootExtElem({k - {s}: c for k, c in self.coeffs.items() if s in k}, self.roots)
        d = RootExtElem.from_ratfunc(RatFunc(self.roots[s], reduced=True))
        root = RootExtElem.root(s, self.roots[s])
        # 1/(a + b s) = (a - b s) / (a^2 - b^2 D)
        norm = a * a - b * b * d
        if norm.is_zero():
            raise ZeroDivisionError("element is a zero divisor in the root extension")
        return (a - b * root) * norm.inverse()

    def __truediv__(self, other) -> "RootExtElem":
        return self * RootExtElem.coerce(other).inverse()

    def __rtruediv__(self, other) -> "RootExtElem":
        return RootExtElem.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "RootExtElem":
        if n < 0:
            return self.inverse() ** (-n)
        out = RootExtElem.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def derivative(self, var: str) -> "RootExtElem":
        """Exact partial derivative; d s_j = D_j' s_j / (2 D_j)."""
        log_d = {}
        for s, d in self.roots.items():
            dd = d.derivative(var)
            if not dd.is_zero():
                log_d[s] = RatFunc(dd, d * 2)
        coeffs: Dict[Key, RatFunc] = {}
        for k, c in self.coeffs.items():
            out = c.derivative(var)
            for s in k:
                if s in log_d:
                    out = out + c * log_d[s]
            coeffs[k] = out
        return RootExtElem(coeffs, self.roots)

    def substitute(self, values: Mapping[str, ScalarLike]) -> "RootExtElem":
        """Set variables to exact constants (radicands must not involve them)."""
        self._check_radicands(values)
        return RootExtElem({k: c.substitute(values) for k, c in self.coeffs.items()}, self.roots)

    def compose(self, values: Mapping[str, "RootExtElem"]) -> "RootExtElem":
        """Substitute root-free elements for variables."""
        self._check_radicands(values)
        rv = {v: RootExtElem.coerce(e).as_ratfunc() for v, e in values.items()}
        return RootExtElem({k: c.compose(rv) for k, c in self.coeffs.items()}, self.roots)

    def _check_radicands(self, values) -> None:
        for s, d in self.roots.items():
            hit = set(d.used_vars()) & set(values)
            if hit:
                raise ValueError(f"cannot substitute {sorted(hit)}: radicand of {s!r} depends on them")

    # -- comparison / text ----------------------------------------------------
    def __eq__(self, other) -> bool:
        try:
            o = RootExtElem.coerce(other)
        except TypeError:
            return NotImplemented
        if self.coeffs.keys() != o.coeffs.keys():
            return False
        for s in self.roots.keys() & o.roots.keys():
            if self.roots[s] != o.roots[s]:
                return False
        return all(self.coeffs[k] == o.coeffs[k] for k in self.coeffs)

    def __hash__(self) -> int:
        return hash(frozenset((k, c) for k, c in self.coeffs.items()))

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs, key=lambda k: (len(k), sorted(k))):
            c = self.coeffs[k]
            if not k:
                parts.append(f"({c.to_text()})")
                continue
            roots = "*".join(sorted(k))
            if c == RatFunc.const(1, c.vars):
                parts.append(roots)
            else:
                parts.append(f"({c.to_text()})*{roots}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"RootExtElem({self.to_text()!r})"
