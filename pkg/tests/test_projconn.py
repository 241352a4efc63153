import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projmoduli import reference as ref
from projmoduli.cech import GaugeOneForm, apply_gauge, split_cocycle
from projmoduli.exactalg import parse_expr
from projmoduli.family import build_branched_cover_12, build_quadric_11
from projmoduli.projconn import (
    Christoffel, ConstantField, ExtractionError, GaugedField, GeodesicError, NotTangentError, ParamMap,
    PipelineField, PointConstraint, ZeroCountError, contour_zeros, extract_connection, gauge_connection,
    geodesic_integrate, geodesic_residual, multiset_distance, pipeline_connection, projective_difference,
    ray_continuation, same_intersection_check, tangent_basis, totally_geodesic_check, trace_deviation,
    transform_coordinates,
)

QUAD = build_quadric_11()
COVER = build_branched_cover_12()
FAMS = pytest.mark.parametrize("fam", [QUAD, COVER], ids=["quadric", "cover"])


def rand_t(fam, rng, scale=0.2):
    return np.asarray(fam.t0) + rng.uniform(-scale, scale, fam.m)


def rand_gamma(rng, m=3, scale=0.5):
    G = scale * (rng.normal(size=(m, m, m)) + 1j * rng.normal(size=(m, m, m)))
    return Christoffel(G)


# -- extraction -----------------------------------------------------------------------

def test_cover_base_gamma_zero():
    G = pipeline_connection(COVER, COVER.t0)
    assert np.abs(G.G).max() < 1e-13
    assert G.residual < 1e-13


def test_cover_table_values_at_111():
    # the closed-form table at Delta = 7
    G = ref.gamma_at([1, 1, 1])
    assert ref.delta([1, 1, 1]) == 7
    assert np.allclose([G[0, 0, 0], G[1, 0, 0], G[0, 0, 1], G[1, 0, 1]], [2 / 7, -1 / 7, 2 / 7, 5 / 14])


def test_cover_pipeline_continued_to_111():
    # (1, 1, 1) is outside any common annulus of the two charts; Delta * Gamma is
    # polynomial along the ray, so the pipeline is continued from |s| = 0.25
    G = ray_continuation(PipelineField(COVER), [1, 1, 1], 1.0, ref.delta, degree=3)
    assert G.residual < 1e-12
    assert np.allclose([G.G[0, 0, 0], G.G[1, 0, 0], G.G[0, 0, 1], G.G[1, 0, 1]], [2 / 7, -1 / 7, 2 / 7, 5 / 14],
                       atol=1e-10)


def test_ray_continuation_rejects_non_polynomial():
    with pytest.raises(ArithmeticError):
        ray_continuation(PipelineField(COVER), [1, 1, 1], 1.0)


@FAMS
def test_extraction_residual_random(fam):
    rng = np.random.default_rng(21)
    for _ in range(25):
        G = pipeline_connection(fam, rand_t(fam, rng, 0.25))
        assert G.residual < 1e-8
        assert G.asymmetry < 1e-8


def test_quadric_projectively_flat():
    rng = np.random.default_rng(5)
    for _ in range(10):
        _, res = projective_difference(pipeline_connection(QUAD, rand_t(QUAD, rng, 0.25)), Christoffel.zero(3))
        assert res < 1e-8


@FAMS
def test_sample_independence(fam):
    t = rand_t(fam, np.random.default_rng(2))
    theta, _ = split_cocycle(fam, t)
    a = extract_connection(fam, theta, t, fam.sample_z(24, offset=0.1))
    b = extract_connection(fam, theta, t, fam.sample_z(24, offset=0.6) * 1.1)
    assert np.abs(a.G - b.G).max() < 1e-8


def test_extraction_rejects_degenerate_samples():
    theta, _ = split_cocycle(COVER, [0.1, 0.05, 0.0])
    with pytest.raises(ExtractionError):
        extract_connection(COVER, theta, [0.1, 0.05, 0.0], np.full(8, 0.9 + 0j))
    with pytest.raises(ValueError):
        extract_connection(COVER, theta, [0.1, 0.05, 0.0], np.array([1.0, 1j]))


def test_extraction_rejects_non_section():
    t = np.array([0.1, 0.05, -0.1])
    theta, _ = split_cocycle(COVER, t)
    wrong = GaugeOneForm(np.zeros(3))
    from dataclasses import replace

    broken = replace(theta, chart1=lambda z: theta.chart1(z) + z)  # not a gauge
    with pytest.raises(ExtractionError):
        extract_connection(COVER, broken, t)
    assert extract_connection(COVER, apply_gauge(theta, wrong), t).residual < 1e-8


@FAMS
def test_gauge_covariance(fam):
    rng = np.random.default_rng(9)
    t = rand_t(fam, rng)
    theta, _ = split_cocycle(fam, t)
    G = extract_connection(fam, theta, t)
    for _ in range(10):
        xi = rng.normal(size=3) + 1j * rng.normal(size=3)
        moved = extract_connection(fam, apply_gauge(theta, xi), t)
        assert np.abs(moved.G - gauge_connection(G, xi).G).max() < 1e-9


def test_constant_flip_is_projective():
    t = [0.1, 0.2, 0.1]
    a = pipeline_connection(COVER, t, constant="plus")
    b = pipeline_connection(COVER, t, constant="minus")
    _, res = projective_difference(a, b)
    assert res < 1e-9


def test_pipeline_field_memo():
    f = PipelineField(COVER)
    assert f.at([0.1, 0, 0]) is f.at([0.1, 0, 0])


# -- projective algebra -------------------------------------------------------------

def test_projective_difference_examples():
    rng = np.random.default_rng(0)
    G = rand_gamma(rng)
    xi, res = projective_difference(G, G)
    assert np.all(xi.xi == 0) and res == 0
    xi, res = projective_difference(gauge_connection(G, [1, 0, 0]), G)
    assert np.allclose(xi.xi, [1, 0, 0], atol=1e-15) and res < 1e-15
    bumped = G.G.copy()
    bumped[0, 1, 1] += 1
    _, res = projective_difference(Christoffel(bumped), G)
    assert res >= 1 / 4 - 1e-12
    with pytest.raises(ValueError):
        projective_difference(G, Christoffel.zero(2))


cplx = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(cplx, min_size=3, max_size=3), st.integers(0, 2 ** 31))
def test_gauge_round_trip(xi, seed):
    G = rand_gamma(np.random.default_rng(seed))
    assert np.all(gauge_connection(G, [0, 0, 0]).G == G.G)
    rec, res = projective_difference(gauge_connection(G, xi), G)
    assert np.allclose(rec.xi, xi, atol=1e-12)
    assert res < 1e-12


def test_christoffel_symmetrized():
    G = np.zeros((2, 2, 2))
    G[0, 0, 1] = 1
    c = Christoffel(G)
    assert c.G[0, 0, 1] == c.G[0, 1, 0] == 0.5
    with pytest.raises(ValueError):
        Christoffel(np.zeros((2, 2, 3)))


# -- coordinate changes ----------------------------------------------------------------

P3 = ("t0", "t1", "t2")


def pmap(fwd, inv):
    return ParamMap(P3, [parse_expr(e, P3) for e in fwd], ParamMap(P3, [parse_expr(e, P3) for e in inv]))


def test_linear_map_flat():
    F = transform_coordinates(ConstantField(Christoffel.zero(3)), pmap(["2*t0", "2*t1", "2*t2"],
                                                                      ["t0/2", "t1/2", "t2/2"]))
    assert np.abs(F([0.3, -0.1, 0.2])).max() == 0


def test_quadratic_map_flat():
    F = transform_coordinates(ConstantField(Christoffel.zero(3)), pmap(["t0 + t1^2", "t1", "t2"],
                                                                      ["t0 - t1^2", "t1", "t2"]))
    G = F([0.3, -0.4, 0.2])
    expected = np.zeros((3, 3, 3))
    expected[0, 1, 1] = -2
    assert np.allclose(G, expected, atol=1e-15)


def test_transform_matches_mapped_geodesics():
    # independent oracle: straight lines t = p + s v map to t' = T(p + s v), so
    # Gamma'(J v, J v) = -H(v, v) must hold for every v
    pm = pmap(["t0 + t1*t2", "t1 + t0^2", "t2"], ["t0 - t1*t2 + t0^2*t2 - t2*t0^2", "t1", "t2"])
    rng = np.random.default_rng(4)
    p = rng.normal(size=3) * 0.2
    _, J, H = pm.jets(p)
    base = ConstantField(Christoffel.zero(3))
    from projmoduli.projconn import transform_christoffel

    G = transform_christoffel(base(p), J, H)
    for _ in range(5):
        v = rng.normal(size=3)
        lhs = np.einsum("gab,a,b->g", G, J @ v, J @ v)
        assert np.allclose(lhs, -np.einsum("gab,a,b->g", H, v, v))


def test_transform_round_trip():
    fwd = pmap(["t0 + t1^2", "t1", "t2 - t0*t1"], ["t0 - t1^2", "t1", "t2 + (t0 - t1^2)*t1"])
    inv = pmap(["t0 - t1^2", "t1", "t2 + (t0 - t1^2)*t1"], ["t0 + t1^2", "t1", "t2 - t0*t1"])
    G0 = ConstantField(rand_gamma(np.random.default_rng(1)))
    back = transform_coordinates(transform_coordinates(G0, fwd), inv)
    assert np.abs(back([0.1, 0.2, -0.1]) - G0([0, 0, 0])).max() < 1e-10


def test_singular_jacobian():
    pm = pmap(["t0^2", "t1", "t2"], ["t0", "t1", "t2"])
    with pytest.raises(np.linalg.LinAlgError):
        transform_coordinates(ConstantField(Christoffel.zero(3)), pm)([0, 0.1, 0.1])


# -- geodesics --------------------------------------------------------------------------

def test_flat_geodesic_is_line():
    path = geodesic_integrate(ConstantField(Christoffel.zero(3)), [0, 0, 0], [1, 2, 3], 1.0)
    s = np.linspace(0, 1, 11)
    ts, vs = path.at(s)
    assert np.allclose(ts, s[:, None] * np.array([1, 2, 3]), atol=1e-12)
    assert np.allclose(vs, [1, 2, 3], atol=1e-12)
    with pytest.raises(ValueError):
        geodesic_integrate(ConstantField(Christoffel.zero(3)), [0, 0, 0], [0, 0, 0])


def test_gauged_flat_traces_line():
    flat = ConstantField(Christoffel.zero(3))
    gauged = GaugedField(flat, [0.7, -0.3, 0.2])
    V = np.array([1, 2, 3]) * 0.2
    a = geodesic_integrate(flat, [0, 0, 0], V, 1.0)
    b = geodesic_integrate(gauged, [0, 0, 0], V, 1.0)
    # both cover the same segment of the line, at different speeds
    assert trace_deviation(b, a) < 1e-7
    assert trace_deviation(a, geodesic_integrate(gauged, [0, 0, 0], V, 3.0)) < 1e-7
    assert abs(b.at(np.array([1.0]))[0][0] - a.at(np.array([1.0]))[0][0]).max() > 1e-3


def test_unparameterized_invariance_random():
    # real data keeps the reparameterization real, so traces in s are comparable
    rng = np.random.default_rng(17)
    for _ in range(10):
        G = ConstantField(Christoffel(0.3 * rng.normal(size=(3, 3, 3))))
        xi = rng.normal(size=3) * 0.3
        start = rng.normal(size=3) * 0.1
        V = rng.normal(size=3) * 0.3
        a = geodesic_integrate(G, start, V, 1.0)
        b = geodesic_integrate(GaugedField(G, xi), start, V, 1.0)
        # same start and direction: the shorter trace lies on the longer one
        la = np.abs(np.diff(a.dense(), axis=0)).sum()
        lb = np.abs(np.diff(b.dense(), axis=0)).sum()
        short, long_ = (a, b) if la < lb else (b, a)
        assert trace_deviation(short, long_) < 1e-7


def test_geodesic_residual_small():
    G = ConstantField(rand_gamma(np.random.default_rng(8), scale=0.3))
    path = geodesic_integrate(G, [0, 0, 0], [0.3, -0.2, 0.1], 1.0)
    assert geodesic_residual(path, G) < 1e-6


def test_table_geodesic_stays_finite():
    table = ref.gamma_field("Gamma^0_02 sign flipped")
    path = geodesic_integrate(table, [0, 0, 0], [0.5, -0.4, 0.3], 1.0)
    ts, _ = path.at(np.linspace(0, 1, 21))
    assert np.all(np.isfinite(ts))
    assert min(abs(ref.delta(t)) for t in ts) > 0.5


def test_geodesic_leaves_validity():
    with pytest.raises(GeodesicError):
        geodesic_integrate(ConstantField(Christoffel.zero(3)), [0, 0, 0], [1, 0, 0], 1.0, center=[0, 0, 0],
                           radius=0.3)


# -- totally geodesic and fixed intersections -----------------------------------------------

def test_cover_totally_geodesic_example():
    y = PointConstraint(1, 0.5)
    V = np.array([1, -2, 0]) * 0.12
    dev = totally_geodesic_check(COVER, PipelineField(COVER), y, V, s_max=1.0, n_samples=21)
    assert dev < 1e-6


def test_cover_not_tangent():
    with pytest.raises(NotTangentError):
        totally_geodesic_check(COVER, PipelineField(COVER), PointConstraint(1, 0.5), [1, 0, 0])


def test_quadric_totally_geodesic_random():
    rng = np.random.default_rng(12)
    field_ = PipelineField(QUAD)
    for _ in range(2):
        z0 = 0.8 * np.exp(2j * np.pi * rng.uniform())
        y = PointConstraint(1, z0)
        basis = tangent_basis(QUAD, y, QUAD.t0)
        V = basis.T @ (rng.normal(size=basis.shape[0]))
        V = 0.2 * V / np.abs(V).max()
        assert totally_geodesic_check(QUAD, field_, y, V, n_samples=21) < 1e-9


def test_contour_zeros():
    roots = np.array([0.3, -0.2 + 0.4j, 0.5j])
    p = np.poly(roots)
    f = lambda z: np.polyval(p, z) * (z - 3)  # noqa: E731
    df = lambda z: np.polyval(np.polyder(p), z) * (z - 3) + np.polyval(p, z)  # noqa: E731
    got = contour_zeros(f, df)
    assert multiset_distance(got, roots) < 1e-10
    with pytest.raises(ZeroCountError):
        contour_zeros(lambda z: z - 1.0, lambda z: np.ones_like(z))
    with pytest.raises(ZeroCountError):
        multiset_distance(np.zeros(1), np.zeros(2))


def test_cover_same_intersection():
    V = np.array([1, -2, 0]) * 0.12
    assert same_intersection_check(COVER, PipelineField(COVER), V, n_samples=4) < 1e-5


def test_quadric_same_intersection():
    # section 0.1 + 0.2 z - 0.05 z^2 has zeros 2 -+ sqrt(6), one in each chart's disc
    V = np.array([0.1, 0.2, 0.05])
    assert same_intersection_check(QUAD, PipelineField(QUAD), V, n_samples=4) < 1e-9
