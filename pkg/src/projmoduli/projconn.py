"""Projective connections: extraction from a split family, projective algebra,
geodesics, and the totally-geodesic / fixed-intersection checks.

Christoffel arrays are indexed ``G[gamma, alpha, beta]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .cech import DEFAULT_K, Cochain0Form, GaugeOneForm, circle, split_cocycle
from .exactalg import Evaluator, RootExtElem
from .family import Family, Jets, section_matrix

EXTRACT_TOL = 1e-8


class ExtractionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Christoffel:
    G: np.ndarray
    residual: float = 0.0
    asymmetry: float = 0.0

    def __post_init__(self):
        G = np.asarray(self.G, dtype=complex)
        if G.ndim != 3 or len(set(G.shape)) != 1:
            raise ValueError("Christoffel array must be m x m x m")
        object.__setattr__(self, "G", 0.5 * (G + G.transpose(0, 2, 1)))

    @property
    def m(self) -> int:
        return self.G.shape[0]

    @classmethod
    def zero(cls, m: int) -> "Christoffel":
        return cls(np.zeros((m, m, m), dtype=complex))

    def contract(self, v: np.ndarray) -> np.ndarray:
        """Gamma(v, v)^gamma."""
        return np.einsum("gab,a,b->g", self.G, v, v)

    def entry(self, gamma: int, alpha: int, beta: int) -> complex:
        return complex(self.G[gamma, alpha, beta])


# -- extraction -------------------------------------------------------------------

def extract_from_jets(j: Jets, th1: np.ndarray, th2: np.ndarray, tol: float = EXTRACT_TOL) -> Christoffel:
    """Least-squares solve Phi_i,ab = Gamma^g_ab d_g phi_i over both charts' samples."""
    m = j.d1.shape[0]
    P1 = section_matrix(j.d2, j.d1, th1)
    P2 = section_matrix(j.d2_2, j.d1_2, th2)
    A = np.concatenate([j.d1.T, j.d1_2.T])                   # (2K, m)
    B = np.concatenate([P1.reshape(m * m, -1).T, P2.reshape(m * m, -1).T])  # (2K, m*m)
    if np.linalg.matrix_rank(A, tol=1e-10 * max(1.0, np.abs(A).max())) < m:
        raise ExtractionError("sample matrix is rank deficient (degenerate z-samples)")
    X, *_ = np.linalg.lstsq(A, B, rcond=None)
    scale = max(1.0, float(np.abs(B).max()))
    residual = float(np.abs(A @ X - B).max()) / scale
    G = X.reshape(m, m, m)  # [gamma, alpha, beta]
    asym = float(np.abs(G - G.transpose(0, 2, 1)).max())
    if not residual < tol:
        raise ExtractionError(f"extraction residual {residual:.3g} exceeds {tol:.3g}; Phi is not a global section")
    return Christoffel(G, residual, asym)


def extract_connection(fam: Family, theta: Cochain0Form, t, z=None, tol: float = EXTRACT_TOL) -> Christoffel:
    z = fam.sample_z(8 * fam.m, offset=0.5) if z is None else np.asarray(z, dtype=complex)
    if z.size < fam.m:
        raise ValueError("need at least m samples per chart")
    j = fam.jets(z, t)
    return extract_from_jets(j, theta.theta1(z), theta.theta2_matched(z), tol)


def pipeline_connection(fam: Family, t, K: int = DEFAULT_K, mode: str = "numeric",
                        constant: str = "plus") -> Christoffel:
    """Split tau at t and extract Gamma."""
    theta, _ = split_cocycle(fam, t, K=K, mode=mode, constant=constant)
    return extract_connection(fam, theta, t)


# -- fields -------------------------------------------------------------------------

class ChristoffelField:
    """Gamma as a function of t; subclasses implement ``at``."""

    m: int

    def at(self, t) -> Christoffel:
        raise NotImplementedError

    def __call__(self, t) -> np.ndarray:
        return self.at(t).G


class PipelineField(ChristoffelField):
    """Gamma(t) from splitting and extraction at each requested t (memoized)."""

    def __init__(self, fam: Family, K: int = DEFAULT_K, mode: str = "numeric", constant: str = "plus"):
        self.fam, self.K, self.mode, self.constant = fam, K, mode, constant
        self.m = fam.m
        self._cache: Dict[Tuple[complex, ...], Christoffel] = {}

    def at(self, t) -> Christoffel:
        key = tuple(np.round(np.asarray(t, dtype=complex), 15))
        out = self._cache.get(key)
        if out is None:
            out = pipeline_connection(self.fam, t, self.K, self.mode, self.constant)
            if len(self._cache) > 4096:
                self._cache.clear()
            self._cache[key] = out
        return out


class ExactField(ChristoffelField):
    """Closed-form Gamma from exact entries {(gamma, alpha, beta): element in params}."""

    def __init__(self, params: Sequence[str], entries: Mapping[Tuple[int, int, int], RootExtElem]):
        self.params = tuple(params)
        self.m = len(self.params)
        self.entries = dict(entries)
        names = {f"{g},{a},{b}": e for (g, a, b), e in self.entries.items()}
        self._ev = Evaluator(names) if names else None
        self._keys = list(self.entries)

    def at(self, t) -> Christoffel:
        G = np.zeros((self.m,) * 3, dtype=complex)
        if self._ev is not None:
            vals = self._ev({p: complex(v) for p, v in zip(self.params, np.asarray(t).reshape(-1))})
            for (g, a, b) in self._keys:
                G[g, a, b] = G[g, b, a] = complex(vals[f"{g},{a},{b}"])
        return Christoffel(G)

    def derivative(self, var: str) -> "ExactField":
        return ExactField(self.params, {k: e.derivative(var) for k, e in self.entries.items()})


class ConstantField(ChristoffelField):
    def __init__(self, G: np.ndarray | Christoffel):
        self.G = G if isinstance(G, Christoffel) else Christoffel(G)
        self.m = self.G.m

    def at(self, t) -> Christoffel:
        return self.G


class GaugedField(ChristoffelField):
    def __init__(self, base: ChristoffelField, xi: Callable[[np.ndarray], np.ndarray] | Sequence[complex]):
        self.base, self.m = base, base.m
        self.xi = xi if callable(xi) else (lambda t, _x=np.asarray(xi, dtype=complex): _x)

    def at(self, t) -> Christoffel:
        return gauge_connection(self.base.at(t), GaugeOneForm(self.xi(np.asarray(t))))


def ray_continuation(G: ChristoffelField, direction, s: complex, weight: Callable | None = None,
                     r: float = 0.25, N: int = 16, degree: int | None = None,
                     tail_tol: float = 1e-8) -> Christoffel:
    """Gamma at s*direction from samples on the small circle |s| = r.

    ``weight(t) * Gamma(t)`` must be polynomial in s along the ray (e.g. weight = the
    common denominator); its Taylor coefficients are read off by FFT and must vanish
    above ``degree`` (default N/2 - 1) up to ``tail_tol``, else ArithmeticError.
    """
    d = np.asarray(direction, dtype=complex)
    w = weight or (lambda t: 1.0)
    pts = r * np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.array([w(p * d) * G(p * d) for p in pts])
    c = np.fft.fft(vals, axis=0) / N * (r ** -np.arange(N, dtype=float))[:, None, None, None]
    deg = N // 2 - 1 if degree is None else degree
    scale = max(1.0, float(np.abs(c).max()))
    # tail judged on the sampled circle, where the noise level is uniform
    tail = float(np.max(np.abs(c[deg + 1:]) * (r ** np.arange(deg + 1, N, dtype=float))[:, None, None, None]))
    if tail > tail_tol * scale:
        raise ArithmeticError(f"weighted Gamma is not polynomial of degree <= {deg} along the ray "
                              f"(tail {tail:.3g})")
    poly = np.tensordot(complex(s) ** np.arange(deg + 1), c[:deg + 1], axes=(0, 0))
    return Christoffel(poly / w(complex(s) * d), residual=tail / scale)


# -- projective algebra ----------------------------------------------------------------

def _trace_form(xi: np.ndarray) -> np.ndarray:
    m = xi.shape[0]
    d = np.eye(m)
    # xi_a delta^g_b + xi_b delta^g_a, indexed [g, a, b]
    return np.einsum("a,gb->gab", xi, d) + np.einsum("b,ga->gab", xi, d)


def projective_difference(Ga: Christoffel, Gb: Christoffel) -> Tuple[GaugeOneForm, float]:
    """xi with Ga - Gb = xi_a delta^g_b + xi_b delta^g_a, and the residual of that fit."""
    if Ga.m != Gb.m:
        raise ValueError("connections of different dimension")
    D = Ga.G - Gb.G
    xi = np.einsum("bab->a", D) / (Ga.m + 1)
    residual = float(np.abs(D - _trace_form(xi)).max())
    return GaugeOneForm(xi), residual


def gauge_connection(G: Christoffel, xi: GaugeOneForm | Sequence[complex]) -> Christoffel:
    x = xi.xi if isinstance(xi, GaugeOneForm) else np.asarray(xi, dtype=complex)
    return Christoffel(G.G + _trace_form(x))


# -- coordinate changes ---------------------------------------------------------------

def transform_christoffel(G: np.ndarray, J: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Gamma in new coordinates t' = T(t), given J = dt'/dt and H^g'_{mn} = d2 t'^g / dt^m dt^n.

    Gamma'^g_ab = J^g_d Gamma^d_mn K^m_a K^n_b - H^g_mn K^m_a K^n_b, K = J^-1.
    """
    if abs(np.linalg.det(J)) < 1e-14:
        raise np.linalg.LinAlgError("singular Jacobian")
    K = np.linalg.inv(J)
    return (np.einsum("gd,dmn,ma,nb->gab", J, G, K, K) - np.einsum("gmn,ma,nb->gab", H, K, K))


class ParamMap:
    """A parameter change t' = T(t) with exact Jacobian and Hessian (and optional inverse)."""

    def __init__(self, params: Sequence[str], forward: Sequence[RootExtElem], inverse: "ParamMap | None" = None):
        self.params = tuple(params)
        self.forward = tuple(forward)
        self.inverse = inverse
        m = len(self.params)
        elems = {f"T{g}": e for g, e in enumerate(self.forward)}
        for g, e in enumerate(self.forward):
            for a, pa in enumerate(self.params):
                da = e.derivative(pa)
                elems[f"J{g}{a}"] = da
                for b in range(a, m):
                    elems[f"H{g}{a}{b}"] = da.derivative(self.params[b])
        self._ev = Evaluator(elems)
        self.m = m

    def jets(self, t) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        m = self.m
        v = self._ev({p: complex(x) for p, x in zip(self.params, np.asarray(t).reshape(-1))})
        T = np.array([complex(v[f"T{g}"]) for g in range(m)])
        J = np.array([[complex(v[f"J{g}{a}"]) for a in range(m)] for g in range(m)])
        H = np.zeros((m, m, m), dtype=complex)
        for g in range(m):
            for a in range(m):
                for b in range(a, m):
                    H[g, a, b] = H[g, b, a] = complex(v[f"H{g}{a}{b}"])
        return T, J, H


class TransformedField(ChristoffelField):
    """Gamma expressed in the coordinates t' of ``pmap`` (needs ``pmap.inverse``)."""

    def __init__(self, base: ChristoffelField, pmap: ParamMap):
        if pmap.inverse is None:
            raise ValueError("transforming a field needs the inverse map")
        self.base, self.pmap, self.m = base, pmap, base.m

    def at(self, t_new) -> Christoffel:
        t_old, _, _ = self.pmap.inverse.jets(t_new)
        _, J, H = self.pmap.jets(t_old)
        return Christoffel(transform_christoffel(self.base(t_old), J, H))


def transform_coordinates(G: ChristoffelField, pmap: ParamMap) -> TransformedField:
    return TransformedField(G, pmap)


# -- geodesics --------------------------------------------------------------------------

class GeodesicError(ArithmeticError):
    pass


@dataclass
class GeodesicPath:
    s: np.ndarray
    t: np.ndarray  # (N, m)
    v: np.ndarray  # (N, m)
    sol: object = field(repr=False, default=None)
    nfev: int = 0

    def at(self, s) -> Tuple[np.ndarray, np.ndarray]:
        y = self.sol.sol(s)
        m = self.t.shape[1]
        return y[:m].T, y[m:].T

    def dense(self, n: int = 801) -> np.ndarray:
        s = np.linspace(self.s[0], self.s[-1], n)
        return self.at(s)[0]


def geodesic_integrate(G: ChristoffelField, t_init, V_init, s_max: float = 1.0, rtol: float = 1e-10,
                       atol: float = 1e-12, center=None, radius: float | None = None,
                       max_step: float = np.inf) -> GeodesicPath:
    """Solve t'' + Gamma(t)(t', t') = 0 with adaptive RK45 (complex state).

    With ``center``/``radius`` the path must stay in that max-norm ball.
    """
    t_init = np.asarray(t_init, dtype=complex).reshape(-1)
    V_init = np.asarray(V_init, dtype=complex).reshape(-1)
    m = t_init.size
    if not np.any(V_init):
        raise ValueError("initial velocity must be nonzero")
    c = None if center is None else np.asarray(center, dtype=complex)

    def rhs(s, y):
        t, v = y[:m], y[m:]
        return np.concatenate([v, -G.at(t).contract(v)])

    events = []
    if c is not None and radius is not None:
        def leave(s, y):
            return radius - float(np.max(np.abs(y[:m] - c)))
        leave.terminal = True
        events.append(leave)
    try:
        sol = solve_ivp(rhs, (0.0, float(s_max)), np.concatenate([t_init, V_init]), method="RK45",
                        rtol=rtol, atol=atol, dense_output=True, events=events or None, max_step=max_step)
    except ArithmeticError as exc:
        raise GeodesicError(f"connection failed along the path: {exc}") from exc
    if sol.status == 1:
        raise GeodesicError(f"path leaves the validity region at s={sol.t_events[0][0]:.4g}")
    if sol.status < 0:
        raise GeodesicError(f"integration failed: {sol.message}")
    y = sol.y
    return GeodesicPath(sol.t, y[:m].T, y[m:].T, sol, sol.nfev)


def geodesic_residual(path: GeodesicPath, G: ChristoffelField, h: float = 1e-4, n: int = 11) -> float:
    """max |t'' + Gamma(t', t')| at interior samples, with t'' from the dense velocity."""
    s = np.linspace(path.s[0], path.s[-1], n + 2)[1:-1]
    out = 0.0
    for si in s:
        _, vp = path.at(np.array([si + h]))
        _, vm = path.at(np.array([si - h]))
        t, v = path.at(np.array([si]))
        acc = (vp[0] - vm[0]) / (2 * h)
        out = max(out, float(np.abs(acc + G.at(t[0]).contract(v[0])).max()))
    return out


def _segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point p[i] to the segments a[j]-b[j]; returns (len(p),) minima."""
    ab = b - a
    denom = np.maximum(np.sum(np.abs(ab) ** 2, axis=1), 1e-300)
    ap = p[:, None, :] - a[None, :, :]
    u = np.clip(np.real(np.sum(ap * np.conj(ab)[None], axis=2)) / denom[None], 0, 1)
    closest = a[None] + u[..., None] * ab[None]
    return np.min(np.linalg.norm(p[:, None, :] - closest, axis=2), axis=1)


def trace_deviation(path: GeodesicPath | np.ndarray, reference: GeodesicPath | np.ndarray, n: int = 801) -> float:
    """One-sided Hausdorff distance from the trace of ``path`` to the trace of ``reference``.

    An array reference is treated as a polyline; a GeodesicPath reference is refined
    on its dense output around the nearest polyline segment.
    """
    p = path.dense(n) if isinstance(path, GeodesicPath) else np.asarray(path)
    if not isinstance(reference, GeodesicPath):
        r = np.asarray(reference)
        return float(np.max(_segment_distance(p, r[:-1], r[1:])))
    N = 4 * n
    grid = np.linspace(reference.s[0], reference.s[-1], N)
    r = reference.dense(N)
    worst = 0.0
    for x in p:
        d = np.linalg.norm(r - x, axis=1)
        i = int(np.argmin(d))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, N - 1)]
        res = minimize_scalar(lambda s: np.linalg.norm(reference.sol.sol(s)[:len(x)] - x), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-13})
        worst = max(worst, min(float(res.fun), float(d[i])))
    return worst


def trace_distance(a: GeodesicPath, b: GeodesicPath, n: int = 801) -> float:
    """Symmetric Hausdorff distance between two traces."""
    return max(trace_deviation(a, b, n), trace_deviation(b, a, n))


# -- totally geodesic / fixed intersection ---------------------------------------------------

@dataclass(frozen=True)
class PointConstraint:
    chart: int
    z0: complex
    w0: complex = 0j


class NotTangentError(ValueError):
    pass


def constraint_row(fam: Family, y: PointConstraint, t) -> Tuple[complex, np.ndarray]:
    """(phi(z0, t), grad_t phi(z0, t)) in the constraint's chart."""
    names = ["phi"] + [f"d{a}" for a in range(fam.m)]
    ev = fam.chart1 if y.chart == 1 else fam.chart2
    v = ev(np.array([y.z0]), t, names)
    return complex(v["phi"].reshape(-1)[0]), np.array([complex(np.asarray(v[f"d{a}"]).reshape(-1)[0])
                                                       for a in range(fam.m)])


def tangent_basis(fam: Family, y: PointConstraint, t) -> np.ndarray:
    """Orthonormal basis (rows) of the kernel of grad_t phi(z0, t)."""
    _, row = constraint_row(fam, y, t)
    _, _, vh = np.linalg.svd(row.reshape(1, -1))
    return vh[1:].conj()


def totally_geodesic_check(fam: Family, G: ChristoffelField, y: PointConstraint, V, s_max: float = 1.0,
                           t_start=None, n_samples: int = 101, tangency_tol: float = 1e-10,
                           radius: float | None = None) -> float:
    """max_s |phi(z0, t(s)) - w0| along the geodesic from t_start with tangent V."""
    t_start = np.asarray(fam.t0 if t_start is None else t_start, dtype=complex)
    V = np.asarray(V, dtype=complex)
    val, row = constraint_row(fam, y, t_start)
    if abs(val - y.w0) > tangency_tol:
        raise NotTangentError(f"start point violates the constraint by {abs(val - y.w0):.3g}")
    slope = abs(complex(row @ V))
    if slope > tangency_tol * max(1.0, float(np.abs(row).max()) * float(np.abs(V).max())):
        raise NotTangentError(f"V is not tangent to P_y: V.d(phi) = {slope:.3g}")
    path = geodesic_integrate(G, t_start, V, s_max, center=fam.t0, radius=radius or fam.radius)
    ts, _ = path.at(np.linspace(0, s_max, n_samples))
    dev = 0.0
    for t in ts:
        dev = max(dev, abs(constraint_row(fam, y, t)[0] - y.w0))
    return dev


class ZeroCountError(ArithmeticError):
    pass


def contour_zeros(f: Callable[[np.ndarray], np.ndarray], df: Callable[[np.ndarray], np.ndarray],
                  r: float = 1.0, K: int = 256) -> np.ndarray:
    """Zeros of a holomorphic f inside |z| < r from contour moments (Delves-Lyness)."""
    z = circle(K, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = df(z) / f(z)
    if not np.all(np.isfinite(q)):
        raise ZeroCountError(f"zero on the contour |z|={r}")
    # s_p = (1/2 pi i) \oint z^p f'/f dz = mean(z^(p+1) f'/f) on the circle
    count = float(np.real(np.mean(z * q)))
    n = int(round(count))
    if abs(count - n) > 1e-6:
        raise ZeroCountError(f"zero count {count:.6g} not an integer (zero near |z|={r}?)")
    if n == 0:
        return np.zeros(0, dtype=complex)
    s = [np.mean(z ** (p + 1) * q) for p in range(1, n + 1)]
    # Newton identities -> monic polynomial e_k
    e = [1.0 + 0j]
    for k in range(1, n + 1):
        acc = sum((-1) ** (i - 1) * e[k - i] * s[i - 1] for i in range(1, k + 1))
        e.append(acc / k)
    coeffs = [(-1) ** k * e[k] for k in range(n + 1)]
    return np.roots(coeffs) if n > 0 else np.zeros(0, dtype=complex)


def zero_sets(fam: Family, t, r: float = 1.0, K: int = 256) -> Tuple[np.ndarray, np.ndarray]:
    """Zeros of z -> phi1(z, t) in |z| < r and of zh -> phi2(zh, t) in |zh| <= 1/r."""
    def chart(ev, rr):
        def f(x):
            return np.broadcast_to(ev(x, t, ["phi"])["phi"], x.shape)

        def df(x):
            return np.broadcast_to(ev(x, t, ["dz"])["dz"], x.shape)

        return contour_zeros(f, df, rr, K)

    return chart(fam.chart1, r), chart(fam.chart2, 1 / r)


def section_zero_sets(fam: Family, V, t=None, r: float = 1.0, K: int = 256) -> Tuple[np.ndarray, np.ndarray]:
    """Zeros of the section V^a d_a phi_i in both charts (the s -> 0+ limit of the intersection)."""
    t = fam.t0 if t is None else t
    V = np.asarray(V, dtype=complex)
    names = [f"d{a}" for a in range(fam.m)]
    dnames = [f"dz{a}" for a in range(fam.m)]

    def sec(ev, x):
        v = ev(x, t, names)
        return sum(V[a] * np.broadcast_to(v[f"d{a}"], x.shape) for a in range(fam.m))

    h = 1e-6

    def dsec(ev, x):
        return (sec(ev, x * (1 + h)) - sec(ev, x * (1 - h))) / (2 * h * x)

    z1 = contour_zeros(lambda x: sec(fam.chart1, x), lambda x: dsec(fam.chart1, x), r, K)
    z2 = contour_zeros(lambda x: sec(fam.chart2, x), lambda x: dsec(fam.chart2, x), 1 / r, K)
    return z1, z2


def multiset_distance(a: np.ndarray, b: np.ndarray) -> float:
    if len(a) != len(b):
        raise ZeroCountError(f"zero set changed cardinality ({len(b)} -> {len(a)})")
    if len(a) == 0:
        return 0.0
    best = min(max(abs(x - y) for x, y in zip(a, perm)) for perm in itertools.permutations(b))
    return float(best)


def _contour_radius(fam: Family, V, t) -> float:
    """A radius in the annulus whose circle stays far (in log scale) from the section's zeros."""
    r_in, r_out = fam.annulus
    cand = np.exp(np.linspace(0.9 * np.log(r_in), 0.9 * np.log(r_out), 41))
    for r in sorted(cand, key=lambda c: abs(np.log(c))):
        try:
            z1, z2 = section_zero_sets(fam, V, t, r)
            break
        except ZeroCountError:
            continue
    else:
        raise ZeroCountError("no circle in the annulus avoids the section's zeros")
    # the full zero set in the chart-1 coordinate; zh = 0 is z = infinity
    zs = np.concatenate([z1, 1 / z2[np.abs(z2) > 1e-12]])
    if zs.size == 0:
        return 1.0
    logs = np.log(np.abs(zs))
    gap = [float(np.min(np.abs(np.log(c) - logs))) for c in cand]
    return float(cand[int(np.argmax(gap))])


def same_intersection_check(fam: Family, G: ChristoffelField, V, s_max: float = 1.0, t_start=None,
                            n_samples: int = 6, r: float | None = None, radius: float | None = None) -> float:
    """Max drift of the zero set of phi(., t(s)) along the geodesic through t0.

    The reference is the zero set of the Kodaira section V^a d_a phi at t0,
    which is the s -> 0+ limit of the intersection with the base curve.  Zeros
    are counted inside |z| < r in chart 1 and |zh| <= 1/r in chart 2; by default
    r is chosen away from the reference zeros.
    """
    t_start = np.asarray(fam.t0 if t_start is None else t_start, dtype=complex)
    if np.max(np.abs(t_start - np.asarray(fam.t0))) > 1e-14:
        raise ValueError("same_intersection_check starts at t0")
    if r is None:
        r = _contour_radius(fam, V, t_start)
    ref1, ref2 = section_zero_sets(fam, V, t_start, r)
    path = geodesic_integrate(G, t_start, V, s_max, center=fam.t0, radius=radius or fam.radius)
    drift = 0.0
    for s in np.linspace(0, s_max, n_samples + 1)[1:]:
        t = path.at(np.array([s]))[0][0]
        z1, z2 = zero_sets(fam, t, r)
        drift = max(drift, multiset_distance(z1, ref1), multiset_distance(z2, ref2))
    return drift
