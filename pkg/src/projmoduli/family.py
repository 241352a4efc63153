"""Two-chart families of rational curves in a surface.

Chart 1 has coordinates (w, z), chart 2 has (wh, zh), and the transition
(chart 2 <- chart 1) is ``wh = f(w, z)``, ``zh = g(w, z)`` with ``f(0, z) = 0``.
A family is given by ``w = phi1(z, t)`` and ``wh = phi2(zh, t)``; on the
overlap ``phi2(g(phi1, z), t) = f(phi1, z)``.

Everything numeric here is evaluated at chart-1 sample points ``z``; chart-2
quantities are taken at the matched points ``zh = g(phi1(z, t), z)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .exactalg import (
    BranchContext,
    BranchSpec,
    Evaluator,
    RootExtElem,
    parse_expr,
    parse_poly,
    resultant,
)

Z, ZH, W, WH = "z", "zh", "w", "wh"
DEFAULT_ANNULUS = (0.5, 2.0)
DEFAULT_RADIUS = 0.3
COMPAT_TOL = 1e-10


class FamilyInvariantError(ValueError):
    """A family (or its config) violates a named invariant."""

    def __init__(self, invariant: str, detail: str):
        super().__init__(f"{invariant}: {detail}")
        self.invariant = invariant
        self.detail = detail


class OutsideValidityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Transition:
    """Chart change wh = f(w, z), zh = g(w, z), with optional inverse in (wh, zh)."""

    f: RootExtElem
    g: RootExtElem
    branch: BranchContext = field(default_factory=BranchContext)
    inverse: Optional["Transition"] = None

    def normalization_residual(self, z: np.ndarray, params: Dict[str, complex] | None = None,
                               names: Tuple[str, str] = (W, Z)) -> float:
        """max |f(0, z)|; exact zero when f is root-free."""
        w, zname = names
        if self.f.is_root_free():
            at0 = self.f.as_ratfunc().num.substitute({w: 0}) if w in self.f.vars else self.f.as_ratfunc().num
            return 0.0 if at0.is_zero() else float("inf")
        point = {w: np.zeros_like(z), zname: z, **(params or {})}
        return float(np.max(np.abs(Evaluator({"f": self.f}, self.branch)(point)["f"])))


@dataclass
class Jets:
    """Numeric jets of a family at chart-1 samples ``z`` and parameter ``t``.

    Shapes: ``d1`` is (m, K), ``d2`` is (m, m, K); the ``_2`` arrays are chart-2
    quantities at the matched points ``zh``.
    """

    z: np.ndarray
    t: np.ndarray
    phi1: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    zh: np.ndarray
    phi2: np.ndarray
    d1_2: np.ndarray
    d2_2: np.ndarray
    f: np.ndarray
    F: np.ndarray
    E: np.ndarray
    G: np.ndarray

    @property
    def tau(self) -> np.ndarray:
        return 0.5 * self.E[None, :] * self.d1 - self.G

    @property
    def compatibility_residual(self) -> float:
        return float(np.max(np.abs(self.phi2 - self.f)))


@dataclass(frozen=True, eq=False)
class Family:
    name: str
    params: Tuple[str, ...]
    phi1: RootExtElem
    phi2: RootExtElem
    transition: Transition
    t0: Tuple[complex, ...]
    branch: BranchContext = field(default_factory=BranchContext)
    annulus: Tuple[float, float] = DEFAULT_ANNULUS
    radius: float = DEFAULT_RADIUS
    fiber: Tuple[str, str] = (Z, ZH)
    normal: Tuple[str, str] = (W, WH)

    @property
    def m(self) -> int:
        return len(self.params)

    def is_root_free(self) -> bool:
        return all(e.is_root_free() for e in (self.phi1, self.phi2, self.transition.f, self.transition.g))

    # -- exact derivative tables (computed once) ------------------------------
    @cached_property
    def _chart1(self) -> Evaluator:
        z = self.fiber[0]
        elems = {"phi": self.phi1}
        for a, pa in enumerate(self.params):
            da = self.phi1.derivative(pa)
            elems[f"d{a}"] = da
            for b in range(a, self.m):
                elems[f"d{a}{b}"] = da.derivative(self.params[b])
        elems["dz"] = self.phi1.derivative(z)
        return Evaluator(elems, self.branch)

    @cached_property
    def _chart2(self) -> Evaluator:
        zh = self.fiber[1]
        dz = self.phi2.derivative(zh)
        elems = {"phi": self.phi2, "dz": dz, "dzz": dz.derivative(zh)}
        for a, pa in enumerate(self.params):
            da = self.phi2.derivative(pa)
            elems[f"d{a}"] = da
            elems[f"dz{a}"] = dz.derivative(pa)
            for b in range(a, self.m):
                elems[f"d{a}{b}"] = da.derivative(self.params[b])
        return Evaluator(elems, self.branch)

    @cached_property
    def _trans(self) -> Evaluator:
        w = self.normal[0]
        f, g = self.transition.f, self.transition.g
        fw, gw = f.derivative(w), g.derivative(w)
        return Evaluator(
            {"f": f, "fw": fw, "fww": fw.derivative(w), "g": g, "gw": gw, "gww": gw.derivative(w)},
            self.transition.branch.merged(self.branch),
        )

    # -- numerics -------------------------------------------------------------
    def check_t(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=complex).reshape(-1)
        if t.shape != (self.m,):
            raise ValueError(f"expected {self.m} parameters, got {t.shape[0]}")
        dist = float(np.max(np.abs(t - np.asarray(self.t0, dtype=complex))))
        if dist > self.radius + 1e-12:
            raise OutsideValidityError(f"t={t} is {dist:.3g} from t0, beyond validity radius {self.radius}")
        return t

    def param_point(self, t) -> Dict[str, complex]:
        return {p: complex(v) for p, v in zip(self.params, t)}

    def chart1(self, z, t, names=None) -> Dict[str, np.ndarray]:
        t = self.check_t(t)
        return self._chart1({self.fiber[0]: np.asarray(z, dtype=complex), **self.param_point(t)}, names)

    def chart2(self, zh, t, names=None) -> Dict[str, np.ndarray]:
        t = self.check_t(t)
        return self._chart2({self.fiber[1]: np.asarray(zh, dtype=complex), **self.param_point(t)}, names)

    def transition_at(self, w, z, t) -> Dict[str, np.ndarray]:
        point = {self.normal[0]: np.asarray(w, dtype=complex), self.fiber[0]: np.asarray(z, dtype=complex),
                 **self.param_point(t)}
        return self._trans(point)

    def jets(self, z, t) -> Jets:
        z = np.asarray(z, dtype=complex).reshape(-1)
        t = self.check_t(t)
        m = self.m
        c1 = self.chart1(z, t)
        tr = self.transition_at(c1["phi"], z, t)
        zh = np.broadcast_to(tr["g"], z.shape).astype(complex)
        c2 = self.chart2(zh, t)
        d1 = np.array([_full(c1[f"d{a}"], z) for a in range(m)])
        d1_2 = np.array([_full(c2[f"d{a}"], z) for a in range(m)])
        d2 = np.empty((m, m, z.size), dtype=complex)
        d2_2 = np.empty_like(d2)
        for a in range(m):
            for b in range(a, m):
                d2[a, b] = d2[b, a] = _full(c1[f"d{a}{b}"], z)
                d2_2[a, b] = d2_2[b, a] = _full(c2[f"d{a}{b}"], z)
        fw, fww, gw, gww = (_full(tr[k], z) for k in ("fw", "fww", "gw", "gww"))
        dz2, dzz2 = _full(c2["dz"], z), _full(c2["dzz"], z)
        F = fw - dz2 * gw
        E = fww - dz2 * gww - dzz2 * gw ** 2
        G = np.array([_full(c2[f"dz{a}"], z) * gw for a in range(m)])
        return Jets(z=z, t=t, phi1=_full(c1["phi"], z), d1=d1, d2=d2, zh=zh, phi2=_full(c2["phi"], z),
                    d1_2=d1_2, d2_2=d2_2, f=_full(tr["f"], z), F=F, E=E, G=G)

    def sample_z(self, K: int = 32, r: float = 1.0, offset: float = 0.5) -> np.ndarray:
        return r * np.exp(2j * np.pi * (np.arange(K) + offset) / K)

    # -- validation -----------------------------------------------------------
    def validate(self, n_samples: int = 20, seed: int = 0) -> None:
        r_in, r_out = self.annulus
        if not (0 < r_in < 1 < r_out):
            raise FamilyInvariantError("annulus", f"need 0 < r_in < 1 < r_out, got {self.annulus}")
        z = self.sample_z(n_samples)
        p0 = self.param_point(self.t0)
        if self.transition.normalization_residual(z, p0, (self.normal[0], self.fiber[0])) > 1e-12:
            raise FamilyInvariantError("chart normalization", "f(0, z) is not identically zero")
        base1 = np.max(np.abs(self.chart1(z, self.t0, ["phi"])["phi"]))
        base2 = np.max(np.abs(self.chart2(1 / z, self.t0, ["phi"])["phi"]))
        if max(base1, base2) > 1e-12:
            raise FamilyInvariantError("base curve", f"phi_i(., t0) does not vanish (max {max(base1, base2):.3g})")
        rng = np.random.default_rng(seed)
        for _ in range(3):
            t = np.asarray(self.t0) + 0.5 * self.radius * (rng.uniform(-1, 1, self.m))
            res = self.jets(z, t).compatibility_residual
            if res > COMPAT_TOL:
                raise FamilyInvariantError("compatibility", f"phi2(g) - f(phi1) = {res:.3g} at t={t}")

    # -- chart swap -----------------------------------------------------------
    def reversed(self) -> "Family":
        """The same family with the chart roles exchanged (needs the inverse transition)."""
        inv = self.transition.inverse
        if inv is None:
            raise ValueError("family has no inverse transition")
        ren = {self.fiber[0]: self.fiber[1], self.fiber[1]: self.fiber[0]}
        back = Transition(inv.f, inv.g, inv.branch, self.transition)
        return replace(self, name=self.name + "-reversed", phi1=self.phi2, phi2=self.phi1, transition=back,
                       fiber=(self.fiber[1], self.fiber[0]), normal=(self.normal[1], self.normal[0]))


def _full(x, z) -> np.ndarray:
    return np.broadcast_to(np.asarray(x, dtype=complex), np.shape(z)).copy()


# -- Cech objects ---------------------------------------------------------------

def normal_transition(fam: Family, t, z=None) -> np.ndarray:
    """F(z, t) = f_w - phi2_zh * g_w at w = phi1, at chart-1 samples z."""
    z = fam.sample_z() if z is None else z
    return fam.jets(z, t).F


def winding_number(values: np.ndarray) -> int:
    """Winding of a closed sampled curve around 0 (samples ordered counter-clockwise)."""
    v = np.asarray(values)
    steps = np.angle(np.roll(v, -1) / v)
    return int(round(float(np.sum(steps)) / (2 * np.pi)))


def normal_bundle_degree(fam: Family, t, K: int = 512) -> int:
    """deg N from the transition F on |z| = 1.

    Sections transform as sigma2 = F sigma1, so a chart-1 polynomial of degree d
    needs F ~ z^{-d}: deg N = -winding(F).
    """
    return -winding_number(normal_transition(fam, t, fam.sample_z(K)))


@dataclass(frozen=True)
class SectionFn:
    """sigma_i = V^a d_a phi_i at parameter t; chart 2 is taken at matched points."""

    fam: Family
    t: np.ndarray
    V: np.ndarray

    def chart1(self, z) -> np.ndarray:
        d = self.fam.chart1(z, self.t, [f"d{a}" for a in range(self.fam.m)])
        return sum(self.V[a] * _full(d[f"d{a}"], z) for a in range(self.fam.m))

    def chart2(self, zh) -> np.ndarray:
        d = self.fam.chart2(zh, self.t, [f"d{a}" for a in range(self.fam.m)])
        return sum(self.V[a] * _full(d[f"d{a}"], zh) for a in range(self.fam.m))

    def transformation_residual(self, z) -> float:
        """max |sigma2(zh(z)) - F sigma1(z)|."""
        j = self.fam.jets(z, self.t)
        s1 = np.einsum("a,ak->k", self.V, j.d1)
        s2 = np.einsum("a,ak->k", self.V, j.d1_2)
        return float(np.max(np.abs(s2 - j.F * s1)))


def kodaira_section(fam: Family, V, t=None) -> SectionFn:
    V = np.asarray(V, dtype=complex).reshape(-1)
    if V.shape != (fam.m,):
        raise ValueError(f"tangent vector needs {fam.m} components")
    if not np.any(V):
        raise ValueError("tangent vector must be nonzero")
    t = fam.t0 if t is None else t
    return SectionFn(fam, fam.check_t(t), V)


@dataclass(frozen=True)
class Cocycle1Form:
    """tau_a for the chart pair (2 <- 1), evaluated at chart-1 samples."""

    fam: Family
    t: np.ndarray

    def __call__(self, z) -> np.ndarray:
        return self.fam.jets(z, self.t).tau

    def reverse_residual(self, z) -> float:
        """Antisymmetry under pair reversal: tau_(1<-2)(zh) = -tau_(2<-1)(z) / F^2.

        Also checks F_(1<-2)(zh) F_(2<-1)(z) = 1.  Scaled by max(1, |tau|).
        """
        j = self.fam.jets(z, self.t)
        rev = self.fam.reversed()
        jr = rev.jets(j.zh, self.t)
        back = np.max(np.abs(jr.zh - j.z))
        if back > 1e-9:
            raise ArithmeticError(f"inverse transition does not return to the start points ({back:.3g})")
        lhs = jr.tau
        rhs = -j.tau / j.F[None, :] ** 2
        scale = max(1.0, float(np.max(np.abs(rhs))))
        r_tau = float(np.max(np.abs(lhs - rhs))) / scale
        r_F = float(np.max(np.abs(jr.F * j.F - 1)))
        return max(r_tau, r_F)


@dataclass(frozen=True)
class TauData:
    E: np.ndarray
    G: np.ndarray
    tau: Cocycle1Form
    z: np.ndarray

    def values(self) -> np.ndarray:
        return self.tau(self.z)


def tau_cocycle(fam: Family, t, z=None) -> TauData:
    z = fam.sample_z() if z is None else np.asarray(z, dtype=complex)
    t = fam.check_t(t)
    j = fam.jets(z, t)
    return TauData(E=j.E, G=j.G, tau=Cocycle1Form(fam, t), z=z)


def verify_second_derivative_relation(fam: Family, t, theta, z=None) -> float:
    """max over samples and (a, b) of |Phi2(zh) - F Phi1(z)|.

    ``Phi_i = d_ab phi_i + theta_ia d_b phi_i + theta_ib d_a phi_i``; ``theta`` is
    anything with ``theta1(z)`` and ``theta2_matched(z)`` returning (m, K) arrays.
    """
    z = fam.sample_z(24, offset=0.25) if z is None else np.asarray(z, dtype=complex)
    j = fam.jets(z, t)
    th1, th2 = theta.theta1(z), theta.theta2_matched(z)
    P1 = section_matrix(j.d2, j.d1, th1)
    P2 = section_matrix(j.d2_2, j.d1_2, th2)
    return float(np.max(np.abs(P2 - j.F[None, None, :] * P1)))


def section_matrix(d2: np.ndarray, d1: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Phi_ab = d_ab phi + theta_a d_b phi + theta_b d_a phi, shape (m, m, K)."""
    return d2 + theta[:, None, :] * d1[None, :, :] + theta[None, :, :] * d1[:, None, :]


# -- exact objects for root-free families ---------------------------------------

@dataclass(frozen=True)
class ExactCech:
    F: RootExtElem
    E: RootExtElem
    G: Tuple[RootExtElem, ...]
    tau: Tuple[RootExtElem, ...]
    zh: RootExtElem


def exact_cech(fam: Family) -> ExactCech:
    """F, E, G, tau as exact functions of (z, t); root-free families only."""
    if not fam.is_root_free():
        raise NotImplementedError("exact composition needs a root-free family")
    w, zh = fam.normal[0], fam.fiber[1]
    f, g = fam.transition.f, fam.transition.g
    on = {w: fam.phi1}
    fw, gw = f.derivative(w), g.derivative(w)
    zh_of_z = g.compose(on)
    at = {zh: zh_of_z}
    dz2 = fam.phi2.derivative(zh)
    dzz2 = dz2.derivative(zh)
    gw_ = gw.compose(on)
    F = fw.compose(on) - dz2.compose(at) * gw_
    E = fw.derivative(w).compose(on) - dz2.compose(at) * gw.derivative(w).compose(on) - dzz2.compose(at) * gw_ * gw_
    G = tuple(dz2.derivative(p).compose(at) * gw_ for p in fam.params)
    half = RootExtElem.const(1) / 2
    tau = tuple(half * E * fam.phi1.derivative(p) - Ga for p, Ga in zip(fam.params, G))
    return ExactCech(F, E, G, tau, zh_of_z)


def exact_compatibility(fam: Family) -> RootExtElem:
    """phi2(g(phi1, z), t) - f(phi1, z) as an exact element (zero for a valid family)."""
    if not fam.is_root_free():
        raise NotImplementedError("exact composition needs a root-free family")
    on = {fam.normal[0]: fam.phi1}
    zh = fam.transition.g.compose(on)
    return fam.phi2.compose({fam.fiber[1]: zh}) - fam.transition.f.compose(on)


# -- builders -------------------------------------------------------------------

QUADRIC_PARAMS = ("a0", "a1", "b1")
COVER_PARAMS = ("t0", "t1", "t2")


def build_quadric_11() -> Family:
    """(1,1)-curves eta = (a1 zeta + a0)/(b1 zeta + 1) in CP1 x CP1, relative to eta = zeta."""
    p = QUADRIC_PARAMS
    v1, v2 = (Z,) + p, (ZH,) + p
    phi1 = parse_expr("(a1*z + a0)/(b1*z + 1) - z", v1)
    phi2 = parse_expr("(b1 + zh)/(a1 + a0*zh) - zh", v2)
    f = parse_expr("-w/(z*(w + z))", (W, Z))
    g = parse_expr("1/z", (W, Z))
    f_inv = parse_expr("-wh/(zh*(wh + zh))", (WH, ZH))
    g_inv = parse_expr("1/zh", (WH, ZH))
    tr = Transition(f, g, inverse=Transition(f_inv, g_inv))
    return Family("quadric-11", p, phi1, phi2, tr, (0j, 1 + 0j, 0j))


def cover_polynomials(vars: Sequence[str] = (Z,) + COVER_PARAMS) -> Dict[str, object]:
    """Exact R, P, Q, Delta of the (1,2) branched-cover family, over ``vars``."""
    return {
        "R": parse_poly("t2*z^2 + t1*z + t0", vars),
        "P": parse_poly("z^2 - 2*t0*t1*z - t0^2", vars),
        "Q": parse_poly("t2^2*z^2 + 2*t1*t2*z + 1 + 2*t0*t2 + t1^2", vars),
        "Delta": parse_poly("(1 + t0*t2)^2 + t1^2*(1 + 2*t0*t2)", vars),
    }


def build_branched_cover_12() -> Family:
    """Curves in the double cover of CP1 x CP1 branched along eta = zeta^2."""
    p = COVER_PARAMS
    v1, v2 = (Z,) + p, (ZH,) + p
    polys = cover_polynomials(v1)
    Ph = parse_poly("1 - 2*t0*t1*zh - t0^2*zh^2", v2)  # P(z)/z^2 in zh = 1/z
    phi1 = parse_expr("i*(t2*z^2 + t1*z + t0)/sQ", v1, {"sQ": polys["Q"]})
    phi2 = parse_expr("i*(t0*zh^2 + t1*zh + t2)/sP", v2, {"sP": Ph})
    zero = {q: 0 for q in p}
    branch = BranchContext({"sQ": BranchSpec(zero, 1), "sP": BranchSpec(zero, 1)})
    s = parse_poly("w^2 + z^2", (W, Z))
    f = parse_expr("w/(z*s)", (W, Z), {"s": s})
    g = parse_expr("1/z", (W, Z))
    si = parse_poly("zh^2 - wh^2", (WH, ZH))
    f_inv = parse_expr("wh/(zh*si)", (WH, ZH), {"si": si})
    g_inv = parse_expr("1/zh", (WH, ZH))
    tr = Transition(
        f, g, BranchContext({"s": BranchSpec({W: 0}, RootExtElem.var(Z, (Z,)))}),
        Transition(f_inv, g_inv, BranchContext({"si": BranchSpec({WH: 0}, RootExtElem.var(ZH, (ZH,)))})),
    )
    return Family("branched-cover-12", p, phi1, phi2, tr, (0j, 0j, 0j), branch)


def cover_identities() -> Tuple[object, object]:
    """(P - (z^2 Q - R^2), Delta^2 - Res_z(P, Q)), both exact polynomials."""
    c = cover_polynomials()
    z2 = parse_poly("z^2", (Z,) + COVER_PARAMS)
    first = c["P"] - (z2 * c["Q"] - c["R"] * c["R"])
    second = c["Delta"] * c["Delta"] - resultant(c["P"], c["Q"], Z).with_vars(c["Delta"].vars)
    return first, second


def branched_cover_obstruction(selfint: int, n: int) -> int:
    """Self-intersection of the branch curve mod n; an n-fold cover needs 0."""
    if n < 2:
        raise ValueError("cover degree n must be at least 2")
    return selfint % n


BUILDERS = {"quadric-11": build_quadric_11, "branched-cover-12": build_branched_cover_12}
