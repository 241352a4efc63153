import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projmoduli.cech import (
    GaugeOneForm, LaurentSplitError, apply_gauge, circle, exact_split, laurent_split, laurent_window,
    split_cocycle, zero_cochain,
)
from projmoduli.family import build_branched_cover_12, build_quadric_11, verify_second_derivative_relation

QUAD = build_quadric_11()
COVER = build_branched_cover_12()
Z = np.exp(0.37j) * np.array([0.8, 1.0, 1.25, 0.9j, -1.1])


def test_split_simple_laurent():
    sp = laurent_split(lambda z: 3 / z + 2 + z, K=32)
    assert np.allclose(sp.plus[:3], [2, 1, 0], atol=1e-15)
    assert np.allclose(sp.minus[:2], [3, 0], atol=1e-15)
    assert np.abs(sp.plus[3:]).max() < 1e-15
    assert np.allclose(sp.plus_at(Z), 2 + Z)
    assert np.allclose(sp.minus_at(Z), 3 / Z)


def test_split_pole_outside():
    sp = laurent_split(lambda z: 1 / (z - 3), K=64)
    assert np.abs(sp.minus).max() < 1e-15
    assert np.allclose(sp.plus[:5], [-(1 / 3) ** (k + 1) for k in range(5)], atol=1e-15)


def test_split_pole_on_circle_rejected():
    with pytest.raises(LaurentSplitError):
        laurent_split(lambda z: 1 / (z - 1.001), K=64)


def test_split_window_too_small():
    with pytest.raises(LaurentSplitError):
        laurent_split(lambda z: 1 / (z - 1.5), K=16)


def test_split_quadric_tau_over_F():
    def h(z):
        return np.array([-1 / z, -np.ones_like(z), z])

    sp = laurent_split(h, K=16)
    assert np.allclose(sp.minus_at(Z), [-1 / Z, 0 * Z, 0 * Z], atol=1e-15)
    assert np.allclose(sp.plus_at(Z), [0 * Z, -1 + 0 * Z, Z], atol=1e-15)


def test_constant_to_minus():
    sp = laurent_split(lambda z: 3 / z + 2 + z, K=32, constant="minus")
    assert abs(sp.plus[0]) == 0
    assert np.allclose(sp.minus_at(Z), 3 / Z + 2)
    with pytest.raises(ValueError):
        laurent_split(lambda z: z, K=8, constant="middle")


def test_mirrored_split():
    # h = k(1/z) - k(z): theta1 = -k(z) and theta2(zh) = -k(zh) up to the constant
    k = np.polynomial.Polynomial([0.3, -1.2, 0.5, 2.0])
    sp = laurent_split(lambda z: k(1 / z) - k(z), K=32)
    theta1 = sp.plus_at(Z)
    theta2 = -sp.minus_at(1 / Z)
    assert np.allclose(theta1 + k(Z), theta1[0] + k(Z[0]), atol=1e-13)
    assert np.allclose(theta2 + k(Z), theta2[0] + k(Z[0]), atol=1e-13)
    assert np.allclose(theta1 - theta2, (theta1 - theta2)[0], atol=1e-13)


laurent = st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                   min_size=1, max_size=15)


@settings(max_examples=100, deadline=None)
@given(laurent, st.integers(0, 7))
def test_split_reconstructs(coeffs, shift):
    c = np.array(coeffs)
    powers = np.arange(len(c)) - shift

    def h(z):
        return sum(ci * z ** int(p) for ci, p in zip(c, powers))

    K = 32
    sp = laurent_split(h, K=K)
    assert np.abs(sp.plus_at(Z) + sp.minus_at(Z) - h(Z)).max() < 1e-11 * max(1, np.abs(c).sum())
    # analyticity sorting: powers land on the side they belong to
    for ci, p in zip(c, powers):
        if p >= 0:
            assert abs(sp.plus[p] - ci) < 1e-12 * max(1, np.abs(c).sum())
        else:
            assert abs(sp.minus[-p - 1] - ci) < 1e-12 * max(1, np.abs(c).sum())


def test_window_radius_and_validity():
    win = laurent_window(circle(32, 0.7) ** -2 + 5, r=0.7)
    assert abs(win.coefficient(-2) - 1) < 1e-12
    assert abs(win.coefficient(0) - 5) < 1e-12
    assert win.valid
    with pytest.raises(ValueError):
        laurent_window(np.ones(7))


def test_cover_base_theta_zero():
    theta, diag = split_cocycle(COVER, COVER.t0)
    assert np.abs(theta.theta1(Z)).max() < 1e-15
    assert np.abs(theta.theta2_matched(Z)).max() < 1e-15
    assert diag.residual < 1e-12


def test_quadric_base_theta():
    theta, diag = split_cocycle(QUAD, QUAD.t0)
    assert diag.residual < 1e-12
    assert np.allclose(theta.theta1(Z), [0 * Z, -1 + 0 * Z, Z], atol=1e-13)
    # theta2 = -minus(z) at the matched point
    assert np.allclose(theta.theta2_matched(Z), [1 / Z, 0 * Z, 0 * Z], atol=1e-13)
    assert np.allclose(theta.theta2(1 / Z), [1 / Z, 0 * Z, 0 * Z], atol=1e-13)


@pytest.mark.parametrize("fam", [QUAD, COVER], ids=["quadric", "cover"])
def test_gauge_keeps_residual(fam):
    rng = np.random.default_rng(3)
    t = np.asarray(fam.t0) + rng.uniform(-0.15, 0.15, fam.m)
    theta, diag = split_cocycle(fam, t)
    assert apply_gauge(theta, np.zeros(fam.m)).theta1(Z).tolist() == theta.theta1(Z).tolist()
    for _ in range(5):
        xi = GaugeOneForm(rng.normal(size=fam.m) + 1j * rng.normal(size=fam.m))
        moved = apply_gauge(theta, xi)
        assert abs(verify_second_derivative_relation(fam, t, moved) - diag.residual) < 1e-12 + 1e-9
        assert np.allclose(moved.theta1(Z) - theta.theta1(Z), xi.xi[:, None])
    with pytest.raises(ValueError):
        apply_gauge(theta, np.zeros(fam.m + 1))


@pytest.mark.parametrize("fam", [QUAD, COVER], ids=["quadric", "cover"])
def test_constant_reassignment_is_gauge(fam):
    t = np.asarray(fam.t0) + np.array([0.1, -0.07, 0.05])
    a, _ = split_cocycle(fam, t, constant="plus")
    b, _ = split_cocycle(fam, t, constant="minus")
    d1 = a.theta1(Z) - b.theta1(Z)
    d2 = a.theta2_matched(Z) - b.theta2_matched(Z)
    assert np.abs(d1 - d1[:, :1]).max() < 1e-10
    assert np.abs(d1 - d2).max() < 1e-10


@pytest.mark.parametrize("fam", [QUAD, COVER], ids=["quadric", "cover"])
def test_gauge_completeness(fam):
    # two splittings from different circles differ by a fiber-constant form
    t = np.asarray(fam.t0) + np.array([-0.12, 0.08, 0.1])
    a, _ = split_cocycle(fam, t, r=1.0)
    b, _ = split_cocycle(fam, t, r=0.9, K=512, constant="minus")
    z = np.exp(2j * np.pi * np.arange(20) / 20) * 0.95
    d1 = a.theta1(z) - b.theta1(z)
    d2 = a.theta2_matched(z) - b.theta2_matched(z)
    assert np.abs(d1 - d1[:, :1]).max() < 1e-10
    assert np.abs(d1 - d2).max() < 1e-10


@pytest.mark.parametrize("fam", [QUAD, COVER], ids=["quadric", "cover"])
def test_K_doubling(fam):
    t = np.asarray(fam.t0) + np.array([0.2, 0.1, -0.15])
    a, _ = split_cocycle(fam, t, K=256)
    b, _ = split_cocycle(fam, t, K=512)
    assert np.abs(a.theta1(Z) - b.theta1(Z)).max() < 1e-10
    assert np.abs(a.theta2_matched(Z) - b.theta2_matched(Z)).max() < 1e-10


def test_exact_split_matches_numeric():
    ex = exact_split(QUAD)
    rng = np.random.default_rng(11)
    for _ in range(4):
        t = np.asarray(QUAD.t0) + rng.uniform(-0.2, 0.2, 3)
        num, _ = split_cocycle(QUAD, t)
        exa, diag = split_cocycle(QUAD, t, mode="exact")
        assert diag.mode == "exact"
        assert np.abs(num.theta1(Z) - exa.theta1(Z)).max() < 1e-10
        assert np.abs(num.theta2_matched(Z) - exa.theta2_matched(Z)).max() < 1e-10
        assert np.abs(ex.at(t).theta2(1 / Z) - num.theta2(1 / Z)).max() < 1e-10


def test_exact_split_needs_root_free():
    with pytest.raises(Exception):
        exact_split(COVER)
    with pytest.raises(ValueError):
        split_cocycle(QUAD, QUAD.t0, mode="bogus")


def test_zero_cochain_shape():
    th = zero_cochain(3, [0, 0, 0])
    assert th.theta1(Z).shape == (3, Z.size)
