"""Vectorized complex evaluation of exact elements with tracked square-root branches.

Each root symbol carries a :class:`BranchSpec`: a (possibly partial) base
assignment and the root's value there.  The value at a target point is obtained
by analytic continuation along the straight segment from the base (variables
the base does not fix are held at their target values) to the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence

import numpy as np

from .poly import MultiPoly
from .rootext import RootExtElem

POLE_TOL = 1e-14
BRANCH_TOL = 1e-12
MAX_STEPS = 1 << 16


class PoleError(ZeroDivisionError):
    """A reduced denominator vanished at an evaluation point."""


class BranchPointError(ArithmeticError):
    """A continuation path passed through (or too close to) a branch point."""


@dataclass(frozen=True)
class BranchSpec:
    base: Mapping[str, complex]
    value: object = 1.0  # complex constant or root-free RootExtElem

    def value_at(self, point: Mapping[str, np.ndarray]) -> np.ndarray:
        if isinstance(self.value, RootExtElem):
            return NumericElem(self.value)(point, {})
        return np.asarray(complex(self.value))


@dataclass(frozen=True)
class BranchContext:
    specs: Mapping[str, BranchSpec] = field(default_factory=dict)

    def __getitem__(self, symbol: str) -> BranchSpec:
        try:
            return self.specs[symbol]
        except KeyError:
            raise KeyError(f"no branch specification for root {symbol!r}") from None

    def merged(self, other: "BranchContext") -> "BranchContext":
        return BranchContext({**self.specs, **other.specs})

    def check_exact(self, roots: Mapping[str, MultiPoly]) -> None:
        """Exact check that each base value squares to its radicand at the base.

        Only applies to bases with exactly representable (rational) coordinates.
        """
        from .scalar import Scalar

        for s, d in roots.items():
            spec = self[s]
            try:
                base = {v: Scalar.coerce(_exact_number(x)) for v, x in spec.base.items()}
            except (TypeError, ValueError):
                continue
            val = spec.value if isinstance(spec.value, RootExtElem) else RootExtElem.const(_exact_number(spec.value))
            lhs = (val * val).substitute({v: x for v, x in base.items() if v in (val * val).vars})
            rhs = RootExtElem.coerce(d.substitute({v: x for v, x in base.items() if v in d.vars}))
            if lhs != rhs:
                raise ValueError(f"branch value for {s!r} does not square to its radicand at the base")


def _exact_number(x):
    from fractions import Fraction

    from .scalar import Scalar

    if isinstance(x, Scalar):
        return x
    if isinstance(x, complex):
        return Scalar(Fraction(x.real).limit_denominator(10**12), Fraction(x.imag).limit_denominator(10**12))
    return Scalar(Fraction(x).limit_denominator(10**12))


class NumPoly:
    """A MultiPoly compiled to numpy."""

    def __init__(self, p: MultiPoly):
        used = p.used_vars()
        p = p.with_vars(used) if used != p.vars else p
        self.vars = p.vars
        if p.terms:
            self.exps = np.array(list(p.terms.keys()), dtype=int).reshape(len(p.terms), len(self.vars))
            self.coefs = np.array([complex(c) for c in p.terms.values()])
        else:
            self.exps = np.zeros((0, len(self.vars)), dtype=int)
            self.coefs = np.zeros(0, dtype=complex)
        self.maxdeg = self.exps.max(axis=0) if len(self.coefs) and self.vars else np.zeros(len(self.vars), int)

    def terms(self, point: Mapping[str, np.ndarray]) -> np.ndarray:
        """Per-term values, shape (n_terms, *broadcast_shape)."""
        arrays = [np.asarray(point[v], dtype=complex) for v in self.vars]
        shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
        flat = [np.broadcast_to(a, shape).reshape(-1) for a in arrays]
        n = int(np.prod(shape)) if shape else 1
        out = np.broadcast_to(self.coefs[:, None], (len(self.coefs), n)).copy()
        for k, x in enumerate(flat):
            deg = int(self.maxdeg[k])
            if deg == 0:
                continue
            pw = np.empty((deg + 1, n), dtype=complex)
            pw[0] = 1.0
            for j in range(1, deg + 1):
                pw[j] = pw[j - 1] * x
            out *= pw[self.exps[:, k]]
        return out.reshape((len(self.coefs),) + shape)

    def __call__(self, point: Mapping[str, np.ndarray]) -> np.ndarray:
        return self.terms(point).sum(axis=0)

    def with_magnitude(self, point):
        t = self.terms(point)
        return t.sum(axis=0), np.abs(t).sum(axis=0)


class NumericElem:
    """A RootExtElem compiled for repeated numeric evaluation."""

    def __init__(self, e: RootExtElem):
        self.roots = dict(e.roots)
        self.parts = [
            (tuple(sorted(k)), NumPoly(c.num), [(NumPoly(p), m) for p, m in c.factors])
            for k, c in e.coeffs.items()
        ]
        self.vars = tuple(e.vars)

    def __call__(self, point: Mapping[str, np.ndarray], root_values: Mapping[str, np.ndarray]) -> np.ndarray:
        total = np.asarray(0j)
        for key, num, factors in self.parts:
            term = num(point)
            for p, m in factors:
                d, mag = p.with_magnitude(point)
                if np.any(np.abs(d) <= POLE_TOL * mag) or np.any(d == 0):
                    raise PoleError("evaluation at a pole of a reduced denominator")
                term = term / d ** m
            for s in key:
                term = term * root_values[s]
            total = total + term
        return total


def continue_root(
    radicand: MultiPoly | NumPoly,
    spec: BranchSpec,
    point: Mapping[str, np.ndarray],
    path: Sequence[Mapping[str, complex]] | None = None,
    branch_tol: float = BRANCH_TOL,
) -> np.ndarray:
    """Value of sqrt(radicand) at ``point`` continued from the branch base."""
    D = radicand if isinstance(radicand, NumPoly) else NumPoly(radicand)
    arrays = {v: np.asarray(point[v], dtype=complex) for v in D.vars}
    shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()
    target = {v: np.broadcast_to(a, shape) for v, a in arrays.items()}
    start = {v: np.broadcast_to(np.asarray(spec.base[v], dtype=complex), shape) if v in spec.base else target[v]
             for v in D.vars}
    value_point = {**{v: np.asarray(x) for v, x in point.items()}, **start}
    root = np.broadcast_to(spec.value_at(value_point), shape).astype(complex)
    d0, mag0 = D.with_magnitude(start)
    if np.any(np.abs(root * root - d0) > 1e-9 * (1 + mag0)):
        raise ValueError("branch base value does not square to the radicand")
    nodes = [start]
    for wp in path or ():
        nodes.append({v: np.broadcast_to(np.asarray(wp.get(v, 0), dtype=complex), shape) if v in wp else target[v]
                      for v in D.vars})
    nodes.append(target)
    for a, b in zip(nodes[:-1], nodes[1:]):
        root = _continue_segment(D, a, b, root, branch_tol)
    return root


def _continue_segment(D: NumPoly, a, b, root, branch_tol):
    if all(np.array_equal(a[v], b[v]) for v in D.vars):
        return root
    steps = 8
    while steps <= MAX_STEPS:
        current = root
        ok = True
        for k in range(1, steps + 1):
            s = k / steps
            pt = {v: a[v] + s * (b[v] - a[v]) for v in D.vars}
            d, mag = D.with_magnitude(pt)
            if np.any(np.abs(d) <= branch_tol * np.maximum(mag, 1.0)):
                raise BranchPointError("continuation path meets a branch point")
            r = np.sqrt(d)
            cand = np.where(np.abs(r - current) <= np.abs(r + current), r, -r)
            if np.any(np.abs(cand - current) >= np.abs(current)):
                ok = False
                break
            current = cand
        if ok:
            return current
        steps *= 2
    raise BranchPointError("continuation did not resolve; path too close to a branch point")


class Evaluator:
    """Evaluate several exact elements on one point set, continuing each root once."""

    def __init__(self, elems: Mapping[str, RootExtElem], branch: BranchContext | None = None):
        self.elems = {name: NumericElem(e) for name, e in elems.items()}
        self.branch = branch or BranchContext()
        self.radicands: Dict[str, NumPoly] = {}
        for ne in self.elems.values():
            for s, d in ne.roots.items():
                if s not in self.radicands:
                    self.radicands[s] = NumPoly(d)

    def root_values(self, point, path=None) -> Dict[str, np.ndarray]:
        return {s: continue_root(d, self.branch[s], point, path) for s, d in self.radicands.items()}

    def __call__(self, point: Mapping[str, np.ndarray], names: Sequence[str] | None = None, path=None):
        rv = self.root_values(point, path)
        names = list(self.elems) if names is None else names
        return {n: self.elems[n](point, rv) for n in names}


def eval_complex(
    e: RootExtElem,
    point: Mapping[str, complex | np.ndarray],
    ctx: BranchContext | None = None,
    path: Sequence[Mapping[str, complex]] | None = None,
) -> complex | np.ndarray:
    """Evaluate ``e`` at ``point`` (scalars or broadcastable arrays).

    ``path`` optionally lists waypoints the root continuation passes through
    on its way from the branch base to the target.
    """
    missing = [v for v in RootExtElem.coerce(e).vars if v not in point]
    if missing:
        raise KeyError(f"unassigned variables {missing}")
    out = Evaluator({"e": RootExtElem.coerce(e)}, ctx)(point, path=path)["e"]
    return complex(out) if np.ndim(out) == 0 else out
