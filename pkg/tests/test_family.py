import numpy as np
import pytest

from projmoduli.exactalg import RootExtElem, parse_expr
from projmoduli.family import (
    FamilyInvariantError, OutsideValidityError, Transition, branched_cover_obstruction, build_branched_cover_12,
    build_quadric_11, cover_identities, exact_cech, exact_compatibility, kodaira_section, normal_bundle_degree,
    normal_transition, tau_cocycle, verify_second_derivative_relation,
)
from projmoduli.cech import zero_cochain, apply_gauge, split_cocycle

QUAD = build_quadric_11()
COVER = build_branched_cover_12()
RNG = np.random.default_rng(7)


def near(fam, scale=0.2):
    return np.asarray(fam.t0) + RNG.uniform(-scale, scale, fam.m)


def test_quadric_base_and_normalization():
    z = QUAD.sample_z(16)
    assert np.abs(QUAD.chart1(z, QUAD.t0, ["phi"])["phi"]).max() == 0
    assert QUAD.transition.normalization_residual(z, names=(QUAD.normal[0], QUAD.fiber[0])) == 0.0
    assert exact_compatibility(QUAD).is_zero()


def test_validate_rejects_bad_normalization():
    from dataclasses import replace

    bad = replace(QUAD, transition=Transition(parse_expr("w + 1/z", ("w", "z")), QUAD.transition.g))
    with pytest.raises(FamilyInvariantError) as exc:
        bad.validate()
    assert exc.value.invariant == "chart normalization"


def test_validate_rejects_bad_annulus():
    from dataclasses import replace

    with pytest.raises(FamilyInvariantError) as exc:
        replace(QUAD, annulus=(1.2, 2.0)).validate()
    assert exc.value.invariant == "annulus"


def test_builders_validate():
    QUAD.validate()
    COVER.validate()


def test_outside_validity():
    with pytest.raises(OutsideValidityError):
        COVER.jets(COVER.sample_z(8), [0.5, 0, 0])


def test_normal_transition_at_base():
    z = COVER.sample_z(16)
    assert np.allclose(normal_transition(COVER, COVER.t0, z), 1 / z ** 2, atol=1e-15)
    assert np.allclose(normal_transition(QUAD, QUAD.t0, z), -1 / z ** 2, atol=1e-15)


@pytest.mark.parametrize("fam", [QUAD, COVER], ids=["quadric", "cover"])
def test_degree_two(fam):
    assert normal_bundle_degree(fam, fam.t0) == 2
    for _ in range(3):
        assert normal_bundle_degree(fam, near(fam)) == 2


def test_exact_cech_quadric():
    c = exact_cech(QUAD)
    z = RootExtElem.var("z", c.F.vars)
    at0 = {"a0": 0, "a1": 1, "b1": 0}
    assert c.F.substitute(at0) == -1 / (z * z)
    assert c.E.substitute(at0) == 2 / (z * z * z)
    expected = (1 / z ** 3, 1 / z ** 2, -1 / z)
    for got, want in zip(c.tau, expected):
        assert got.substitute(at0) == want


def test_cover_tau_vanishes_at_base():
    d = tau_cocycle(COVER, COVER.t0)
    assert np.abs(d.G).max() == 0
    assert np.abs(d.E).max() < 1e-15
    assert np.abs(d.values()).max() < 1e-15


def test_kodaira_section_cover_base():
    z = COVER.sample_z(12)
    for a in range(3):
        V = np.eye(3)[a]
        s = kodaira_section(COVER, V)
        assert np.allclose(s.chart1(z), 1j * z ** a, atol=1e-15)
        assert np.allclose(s.chart2(1 / z), 1j * (1 / z) ** (2 - a), atol=1e-15)
    with pytest.raises(ValueError):
        kodaira_section(COVER, [0, 0, 0])


@pytest.mark.parametrize("fam", [QUAD, COVER], ids=["quadric", "cover"])
def test_section_transformation(fam):
    z = fam.sample_z(20)
    for _ in range(20):
        V = RNG.normal(size=fam.m) + 1j * RNG.normal(size=fam.m)
        s = kodaira_section(fam, V, near(fam))
        assert s.transformation_residual(z) < 1e-10


@pytest.mark.parametrize("fam", [QUAD, COVER], ids=["quadric", "cover"])
def test_compatibility_samples(fam):
    for _ in range(10):
        z = fam.sample_z(10) * RNG.uniform(0.7, 1.4)
        assert fam.jets(z, near(fam)).compatibility_residual < 1e-10


@pytest.mark.parametrize("fam", [QUAD, COVER], ids=["quadric", "cover"])
def test_cocycle_antisymmetry(fam):
    z = fam.sample_z(20)
    for _ in range(3):
        assert tau_cocycle(fam, near(fam)).tau.reverse_residual(z) < 1e-10


def test_second_derivative_relation_needs_split():
    assert verify_second_derivative_relation(COVER, COVER.t0, zero_cochain(3, COVER.t0)) < 1e-12
    theta, _ = split_cocycle(QUAD, QUAD.t0)
    assert verify_second_derivative_relation(QUAD, QUAD.t0, theta) < 1e-12
    bumped = apply_gauge(theta, [1, 0, 0])
    # a constant shift of theta is a gauge move, still a valid split
    assert verify_second_derivative_relation(QUAD, QUAD.t0, bumped) < 1e-12


def test_perturbed_theta_breaks_relation():
    from projmoduli.cech import Cochain0Form

    th = zero_cochain(3, COVER.t0)
    z = COVER.sample_z(24, offset=0.25)

    def one_side(zz):
        out = np.zeros((3, np.size(zz)), dtype=complex)
        out[0] = 1
        return out

    broken = Cochain0Form(COVER.t0, one_side, th.chart2_matched, np.zeros(3, dtype=complex))
    # the (0, 0) entry picks up -2 F dphi1_0 = -2i/z^2
    assert verify_second_derivative_relation(COVER, COVER.t0, broken, z) > 1.0


def test_cover_identities_exact():
    first, second = cover_identities()
    assert first.is_zero()
    assert second.is_zero()


def test_branched_cover_obstruction():
    assert branched_cover_obstruction(4, 2) == 0
    assert branched_cover_obstruction(5, 2) == 1
    assert branched_cover_obstruction(6, 3) == 0
    with pytest.raises(ValueError):
        branched_cover_obstruction(3, 1)


def test_reversed_family_round_trip():
    rev = COVER.reversed()
    z = COVER.sample_z(16)
    t = near(COVER)
    j = COVER.jets(z, t)
    jr = rev.jets(j.zh, t)
    assert np.abs(jr.zh - z).max() < 1e-12
    assert np.abs(jr.F * j.F - 1).max() < 1e-12
