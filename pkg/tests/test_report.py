import json

import numpy as np
import pytest

from projmoduli.report import COMPUTED, DERIVED, CLOSED_FORM, Report, Row, grid_points, jsonable, reproduce_report

PROVENANCE = {COMPUTED, CLOSED_FORM, DERIVED}


@pytest.fixture(scope="module")
def cover_report():
    return reproduce_report("branched-cover-12", points=[(0.1, 0.05, -0.1), (-0.12, 0.1, 0.08)], ew=False)


def test_grid_points():
    pts = grid_points([0, 0, 0], 0.15, 3)
    assert len(pts) == 27
    assert np.allclose(pts[0], [-0.15] * 3) and np.allclose(pts[13], 0)
    assert len(grid_points([1, 2], 0.1, 1)) == 1


def test_jsonable():
    doc = jsonable({"z": 1 + 2j, "a": np.array([1.5, 2]), "b": np.bool_(True), 3: (np.int64(4),)})
    assert doc == {"z": [1.0, 2.0], "a": [1.5, 2.0], "b": True, "3": [4]}
    json.dumps(doc)


def test_rows_carry_provenance_and_tolerance(cover_report):
    for r in cover_report.rows:
        assert r.provenance in PROVENANCE
        if r.residual is not None and r.quantity != "normal bundle degree":
            assert r.tolerance is not None
        if r.quantity.startswith("Gamma vs table"):
            assert "gauge-invariant" in r.note


def test_identity_rows_pass(cover_report):
    ids = [r for r in cover_report.rows if r.quantity.startswith("identity")]
    assert len(ids) == 2 and all(r.passed for r in ids)


def test_cover_variant_groups(cover_report):
    groups = cover_report.groups()
    assert groups["Gamma"] == ["Gamma vs table [Gamma^0_02 sign flipped]"]
    assert groups["b_1"] == ["b_1 [(1+t0*t2)]"]
    assert groups["a_2"] == ["a_2 [a = -2b]"]
    assert groups["b_0"] == ["b_0 [printed]"] and groups["b_2"] == ["b_2 [printed]"]
    final = cover_report.rows[-1]
    assert final.quantity == "b_1 variant resolution" and final.passed


def test_cover_computed_rows_pass(cover_report):
    for r in cover_report.rows:
        if r.provenance == COMPUTED:
            assert r.passed, r


def test_cover_overall_reflects_printed_tables(cover_report):
    # the printed Gamma^0_02 and a_1, a_2 entries disagree with the pipeline
    failing = {r.quantity for r in cover_report.rows if r.role == "primary" and not r.passed}
    assert failing == {"Gamma vs table [printed]", "a_1 [printed]", "a_2 [printed]",
                       "omega = a - 2b [printed a, b]"}
    assert cover_report.passed is False


def test_singular_point_routed():
    rep = reproduce_report("branched-cover-12", points=[(1, 0, -1), (0.05, 0, 0)], ew=False)
    bad = [r for r in rep.rows if r.error]
    assert len(bad) == 1 and bad[0].quantity == "pipeline" and not bad[0].passed
    assert any(r.quantity == "extraction residual" and r.passed for r in rep.rows)
    assert "FAIL" in rep.table()


def test_quadric_report():
    rep = reproduce_report("quadric-11", n=2)
    assert rep.passed
    assert all(r.passed for r in rep.rows if r.quantity == "projectively flat")
    assert rep.grid["points"] == 8


def test_determinism():
    a = reproduce_report("quadric-11", n=2).to_json()
    b = reproduce_report("quadric-11", n=2).to_json()
    assert a == b
    doc = json.loads(a)
    assert set(doc) == {"family", "grid", "pass", "variant_groups", "rows"}


def test_unknown_builder():
    with pytest.raises(KeyError):
        reproduce_report("nope")


def test_variant_rows_do_not_decide():
    rep = Report("x", [Row("a", None, 1, 1, 0.0, 1.0, True, COMPUTED),
                       Row("b", None, 1, 2, 1.0, 0.5, False, DERIVED, role="variant", group="g")])
    assert rep.passed
    assert rep.groups() == {"g": []}
    assert json.loads(rep.to_json())["rows"][1]["pass"] is False
