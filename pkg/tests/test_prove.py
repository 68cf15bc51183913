"""Asymptopia proofs: class reports, scans, and dominance."""

from __future__ import annotations

import json

import pytest

from tiltbound import difference, negate, tilt
from tiltbound.prove import (
    STATUS_BUDGET,
    STATUS_PROVEN,
    STATUS_SYMMETRIC,
    dominance,
    prove_all,
    prove_class,
    report_json,
)


@pytest.fixture(scope="module")
def x_reports(die_x, analysis_x):
    return prove_all(die_x, analysis=analysis_x)


def test_prove_all_x_shape(x_reports):
    assert len(x_reports) == 4
    assert [r.residue for r in x_reports] == [0, 1, 2, 3]
    assert all(r.status == STATUS_PROVEN for r in x_reports)


def test_prove_all_x_values(x_reports):
    # Exact arrival indices; class 1 has T_1 = 0 and class 2 has T_2 = 0
    # exactly, so under strict sign agreement those zeros are flagged and
    # arrival starts at the next class index.
    by_class = {r.residue: r for r in x_reports}
    assert by_class[0].proven_n0 == 4
    assert by_class[1].proven_n0 == 5 and by_class[1].zero_tilt_indices == [1]
    assert by_class[2].proven_n0 == 6 and by_class[2].zero_tilt_indices == [2]
    assert by_class[3].proven_n0 == 3


def test_proven_region_has_no_gap(die_x, x_reports):
    # Exact signs agree on [proven_n0, scan_max]; beyond scan_max >= n2 the
    # certified bound takes over (test_bounds covers domination).
    for r in x_reports:
        assert r.scan_max >= r.n2_best()
        target = 1 if r.L_tilt > 0 else -1
        for n in range(r.proven_n0, r.scan_max + 1):
            if (n - r.residue) % 4 == 0:
                t = tilt(die_x, n).tilt
                assert (t > 0) - (t < 0) == target
        prev = r.proven_n0 - 4
        if prev >= 1:
            t = tilt(die_x, prev).tilt
            assert (t > 0) - (t < 0) != target


def test_prove_class_single(die_x, analysis_x):
    report = prove_class(die_x, 3, analysis=analysis_x)
    assert report.residue == 3 and report.proven_n0 == 3
    with pytest.raises(ValueError):
        prove_class(die_x, 4, analysis=analysis_x)


def test_tail_mode_override(die_x, analysis_x):
    forced = prove_all(die_x, analysis=analysis_x, tail_mode="cert")
    assert all(r.tail_mode == "cert" for r in forced)
    assert [r.scan_max for r in forced] == [r.n2_by_mode["cert"] for r in forced]
    assert [r.proven_n0 for r in forced] == [4, 5, 6, 3]
    with pytest.raises(ValueError):
        prove_all(die_x, analysis=analysis_x, tail_mode="bogus")


def test_symmetric_die_undetermined(coin):
    reports = prove_all(coin)
    assert [r.status for r in reports] == [STATUS_SYMMETRIC] * len(reports)
    assert all(r.proven_n0 is None for r in reports)


def test_scan_budget_exceeded(die_y, analysis_y):
    report = prove_class(die_y, 0, max_steps=50, analysis=analysis_y)
    assert report.status == STATUS_BUDGET
    assert report.n2_by_mode["cert"] == 182_024  # bound info survives
    assert report.scan_max <= 50


def test_negation_mirrors_reports(die_x, x_reports):
    neg = prove_all(negate(die_x))
    for r, rn in zip(x_reports, neg):
        assert rn.residue == r.residue
        assert rn.L_tilt == pytest.approx(-r.L_tilt, rel=1e-12)
        assert rn.proven_n0 == r.proven_n0
        assert rn.zero_tilt_indices == r.zero_tilt_indices


def test_gardner_difference_coincidence(gardner):
    assert gardner["AB"] == difference(gardner["B"], gardner["C"])


def test_dominance_self_symmetric(die_x):
    result = dominance(die_x, die_x)
    assert all(r.status == STATUS_SYMMETRIC for r in result.reports)
    assert set(result.dominant_by_class.values()) == {None}


def test_dominance_direction(gardner):
    result = dominance(gardner["C"], gardner["A"])
    assert result.difference == gardner["CA"]
    # L < 0: the second die (A) eventually wins
    assert result.dominant_by_class["0"] == "second"
    assert result.reports[0].proven_n0 == 5


def test_report_json_round_trip(x_reports):
    text = report_json(x_reports, "(2z^-3+z+z^5)/4")
    payload = json.loads(text)
    assert len(payload) == 4
    for item in payload:
        assert {"die", "class", "L", "n1", "n2", "proven_n0", "zero_tilts",
                "status", "bound_decomposition_at"} <= set(item)
    assert payload[2]["zero_tilts"] == [2]
    assert payload[0]["n2"]["cert"] % 4 == 0


def test_report_determinism(die_x, analysis_x):
    a = report_json(prove_all(die_x, analysis=analysis_x), "(2z^-3+z+z^5)/4")
    b = report_json(prove_all(die_x, analysis=analysis_x), "(2z^-3+z+z^5)/4")
    assert a == b
