"""Conformal structure, Weyl connection and Einstein-Weyl residual on a 3-parameter family.

Index conventions: Christoffel arrays are ``G[gamma, alpha, beta]``; metric
derivatives ``dg[c, a, b] = d_c g_ab``; the covariant derivative of g puts the
derivative index first, ``N[a, b, c] = (nabla_a g)_bc``.  The Weyl connection
satisfies ``D g = +omega (x) g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Tuple

import numpy as np

from .cech import circle, laurent_split, laurent_window
from .exactalg import Evaluator, RootExtElem, parse_expr
from .family import Family, winding_number
from .projconn import Christoffel, ChristoffelField, ExactField, projective_difference

WEYL_SIGN = 1  # c in (D g)_{ab;c} = c * omega_c g_ab
AB_TOL = 1e-8
DEGENERATE_TOL = 1e-12


class WeylError(ArithmeticError):
    pass


class DegenerateMetricError(WeylError):
    pass


class MetricField:
    """A symmetric metric with exact entries in the parameters."""

    def __init__(self, params: Sequence[str], entries: Mapping[Tuple[int, int], RootExtElem | str]):
        self.params = tuple(params)
        self.m = len(self.params)
        self.entries = {}
        for (a, b), e in entries.items():
            e = parse_expr(e, self.params) if isinstance(e, str) else RootExtElem.coerce(e)
            key = (min(a, b), max(a, b))
            if key in self.entries and self.entries[key] != e:
                raise ValueError(f"conflicting entries for g{key}")
            self.entries[key] = e
        elems = {}
        for (a, b), e in self.entries.items():
            elems[f"g{a}{b}"] = e
            for c, p in enumerate(self.params):
                elems[f"d{c}g{a}{b}"] = e.derivative(p)
        self._ev = Evaluator(elems) if elems else None

    def at(self, t) -> Tuple[np.ndarray, np.ndarray]:
        """(g, dg) at t, dg[c, a, b] = d_c g_ab; raises if g is degenerate."""
        m = self.m
        g = np.zeros((m, m), dtype=complex)
        dg = np.zeros((m, m, m), dtype=complex)
        if self._ev is not None:
            v = self._ev({p: complex(x) for p, x in zip(self.params, np.asarray(t).reshape(-1))})
            for (a, b) in self.entries:
                g[a, b] = g[b, a] = complex(v[f"g{a}{b}"])
                for c in range(m):
                    dg[c, a, b] = dg[c, b, a] = complex(v[f"d{c}g{a}{b}"])
        scale = max(1.0, float(np.abs(g).max())) ** m
        if abs(np.linalg.det(g)) <= DEGENERATE_TOL * scale:
            raise DegenerateMetricError(f"metric is degenerate at t={np.asarray(t)}")
        return g, dg

    def __call__(self, t) -> np.ndarray:
        return self.at(t)[0]

    def scaled(self, lam) -> "MetricField":
        c = RootExtElem.coerce(parse_expr(str(lam), self.params)) if isinstance(lam, (int, str)) else lam
        return MetricField(self.params, {k: e * c for k, e in self.entries.items()})


def metric_closed_form() -> MetricField:
    """The metric of the (1,2) branched-cover moduli space, symmetric convention."""
    from .family import COVER_PARAMS
    from .reference import METRIC

    return MetricField(COVER_PARAMS, METRIC)


def sym_components(M: np.ndarray) -> np.ndarray:
    """Upper-triangular components (a <= b), row-major."""
    i, j = np.triu_indices(M.shape[0])
    return M[i, j]


# -- conformal structure from second-order tangency ----------------------------------

def conformal_from_family(fam: Family, t, K: int = 128) -> np.ndarray:
    """Discriminant quadratic form of V -> sigma_V, normalized to a unit top-left nonzero entry.

    The chart-1 sections are made polynomial by the normal-bundle factor
    exp(h+), where log(z^2 F) = h+ + h- is split on |z| = 1.
    """
    if fam.m != 3:
        raise ValueError("conformal structure needs a 3-parameter family")
    z = circle(K)
    j = fam.jets(z, t)
    u = z * z * j.F
    if winding_number(u) != 0:
        raise WeylError("section not quadratic: normal bundle degree is not 2")
    steps = np.angle(u[1:] / u[:-1])
    lg = np.log(np.abs(u)) + 1j * (np.angle(u[0]) + np.concatenate([[0.0], np.cumsum(steps)]))
    hp = laurent_split(lg, K=K).plus_at(z)
    win = laurent_window(np.exp(hp)[None, :] * j.d1)
    n = K // 2
    coeffs = win.coeffs
    scale = max(1e-300, float(np.abs(coeffs).max()))
    rest = np.concatenate([coeffs[:, :n], coeffs[:, n + 3:]], axis=1)
    if float(np.abs(rest).max()) > 1e-9 * scale:
        raise WeylError("section not quadratic: Laurent coefficients outside degrees 0..2")
    A, B, C = coeffs[:, n], coeffs[:, n + 1], coeffs[:, n + 2]
    M = np.outer(B, B) - 2 * (np.outer(A, C) + np.outer(C, A))
    flat = M.reshape(-1)
    lead = flat[np.argmax(np.abs(flat) > 1e-12 * np.abs(flat).max())]
    return M / lead


def proportionality_minors(A: np.ndarray, B: np.ndarray) -> float:
    """Max |2x2 minor| of the stacked (unique components of A, B), each scaled to unit max."""
    a = sym_components(A)
    b = sym_components(B)
    a = a / np.abs(a).max()
    b = b / np.abs(b).max()
    return float(np.abs(np.outer(a, b) - np.outer(b, a)).max())


# -- Levi-Civita and covariant derivatives ---------------------------------------------

def christoffel_from_metric(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    gi = np.linalg.inv(g)
    # lowered: G_dab = 1/2 (d_a g_db + d_b g_da - d_d g_ab)
    low = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)
    return np.einsum("gd,dab->gab", gi, low)


def levi_civita(g: MetricField, t) -> Christoffel:
    gm, dg = g.at(t)
    return Christoffel(christoffel_from_metric(gm, dg))


def covariant_derivative_metric(G: np.ndarray, g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """N[a, b, c] = d_a g_bc - G^d_ab g_dc - G^d_ac g_bd."""
    return dg - np.einsum("dab,dc->abc", G, g) - np.einsum("dac,bd->abc", G, g)


def metricity_residual(g: MetricField, t) -> float:
    gm, dg = g.at(t)
    return float(np.abs(covariant_derivative_metric(christoffel_from_metric(gm, dg), gm, dg)).max())


# -- a, b and the Weyl connection ------------------------------------------------------

@dataclass(frozen=True)
class ABSolution:
    a: np.ndarray
    b: np.ndarray
    residual: float

    @property
    def omega(self) -> np.ndarray:
        return self.a - 2 * self.b


def _ab_system(g: np.ndarray) -> Tuple[np.ndarray, list]:
    m = g.shape[0]
    rows, idx = [], []
    for al in range(m):
        for be in range(m):
            for ga in range(be, m):
                r = np.zeros(2 * m, dtype=complex)
                r[al] += g[be, ga]
                r[m + be] += g[al, ga]
                r[m + ga] += g[al, be]
                rows.append(r)
                idx.append((al, be, ga))
    return np.array(rows), idx


def solve_ab(G: Christoffel | ChristoffelField, g: MetricField, t, tol: float | None = AB_TOL) -> ABSolution:
    """Least-squares (a, b) with (nabla g)_abc = a_a g_bc + b_b g_ac + b_c g_ab."""
    Gt = G.at(t) if isinstance(G, ChristoffelField) else G
    gm, dg = g.at(t)
    N = covariant_derivative_metric(Gt.G, gm, dg)
    A, idx = _ab_system(gm)
    rhs = np.array([N[i] for i in idx])
    x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    residual = float(np.abs(A @ x - rhs).max()) / max(1.0, float(np.abs(rhs).max()))
    m = gm.shape[0]
    out = ABSolution(x[:m], x[m:], residual)
    if tol is not None and not residual < tol:
        raise WeylError(f"solve_ab residual {residual:.3g} exceeds {tol:.3g}: connection not projectively Weyl")
    return out


def weyl_christoffel(g: np.ndarray, dg: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """D = LC + 1/2 omega^# g - 1/2 (omega_a delta^g_b + omega_b delta^g_a)."""
    m = g.shape[0]
    up = np.linalg.solve(g, omega)
    d = np.eye(m)
    return (christoffel_from_metric(g, dg) + 0.5 * np.einsum("g,ab->gab", up, g)
            - 0.5 * (np.einsum("a,gb->gab", omega, d) + np.einsum("b,ga->gab", omega, d)))


class OneFormField:
    def __init__(self, fn: Callable[[np.ndarray], np.ndarray]):
        self.fn = fn

    def __call__(self, t) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(t, dtype=complex)), dtype=complex)

    @classmethod
    def constant(cls, v) -> "OneFormField":
        v = np.asarray(v, dtype=complex)
        return cls(lambda t: v)


class WeylStructure(ChristoffelField):
    """(g, omega) and the Weyl connection D they determine."""

    def __init__(self, g: MetricField, omega: OneFormField):
        self.g, self.omega, self.m = g, omega, g.m

    def at(self, t) -> Christoffel:
        gm, dg = self.g.at(t)
        return Christoffel(weyl_christoffel(gm, dg, self.omega(t)))

    def compatibility_residual(self, t) -> float:
        gm, dg = self.g.at(t)
        w = self.omega(t)
        N = covariant_derivative_metric(weyl_christoffel(gm, dg, w), gm, dg)
        return float(np.abs(N - WEYL_SIGN * np.einsum("c,ab->cab", w, gm)).max())


def assemble_weyl(g: MetricField, a: OneFormField, b: OneFormField, check_at=None,
                  tol: float = 1e-8) -> WeylStructure:
    W = WeylStructure(g, OneFormField(lambda t: a(t) - 2 * b(t)))
    for t in ([] if check_at is None else [check_at]):
        res = W.compatibility_residual(t)
        if not res < tol:
            raise WeylError(f"Weyl compatibility residual {res:.3g}: sign convention mismatch")
    return W


def weyl_from_connection(G: ChristoffelField, g: MetricField, tol: float = AB_TOL) -> WeylStructure:
    """omega(t) from solve_ab on G at each t."""
    cache = {}

    def ab(t):
        key = tuple(np.round(t, 15))
        if key not in cache:
            cache[key] = solve_ab(G, g, t, tol)
        return cache[key]

    return assemble_weyl(g, OneFormField(lambda t: ab(t).a), OneFormField(lambda t: ab(t).b))


# -- curvature ------------------------------------------------------------------------------

def _derivatives(D: ChristoffelField, t, h: float) -> np.ndarray:
    """dD[c, g, a, b] = d_c D^g_ab (exact for closed-form fields, else Richardson-extrapolated)."""
    t = np.asarray(t, dtype=complex)
    m = D.m
    if isinstance(D, ExactField):
        return np.array([D.derivative(p)(t) for p in D.params])
    out = np.zeros((m,) * 4, dtype=complex)
    for c in range(m):
        e = np.zeros(m)
        e[c] = 1.0

        def cd(step):
            return (D(t + step * e) - D(t - step * e)) / (2 * step)

        out[c] = (4 * cd(h / 2) - cd(h)) / 3
    return out


def riemann(D: ChristoffelField, t, h: float = 1e-3) -> np.ndarray:
    """R[r, s, mu, nu] = d_mu G^r_nu s - d_nu G^r_mu s + G^r_mu l G^l_nu s - G^r_nu l G^l_mu s."""
    G = D(t)
    dG = _derivatives(D, t, h)
    Rm = (np.einsum("mrns->rsmn", dG) - np.einsum("nrms->rsmn", dG)
          + np.einsum("rml,lns->rsmn", G, G) - np.einsum("rnl,lms->rsmn", G, G))
    return Rm


def ricci(D: ChristoffelField, t, h: float = 1e-3) -> np.ndarray:
    return np.einsum("rsrn->sn", riemann(D, t, h))


def einstein_weyl_residual(W: ChristoffelField, t, g: MetricField | None = None, h: float = 1e-3) -> float:
    """|trace-free part of Sym Ric(D)| / max(|Sym Ric(D)|, 1), the trace taken with g."""
    g = W.g if g is None else g
    Ric = ricci(W, t, h)
    S = 0.5 * (Ric + Ric.T)
    gm = g(t)
    tr = np.einsum("ab,ab->", np.linalg.inv(gm), S)
    S0 = S - tr / gm.shape[0] * gm
    return float(np.linalg.norm(S0) / max(np.linalg.norm(S), 1.0))


def weyl_projective_residual(W: WeylStructure, G: ChristoffelField | Christoffel, t) -> float:
    Gt = G.at(t) if isinstance(G, ChristoffelField) else G
    return projective_difference(W.at(t), Gt)[1]
