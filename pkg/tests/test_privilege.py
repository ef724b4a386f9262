import numpy as np
import pytest

from hilmod.errors import ArgumentError, UnsupportedError
from hilmod.privilege import Domain, PolyMatrix, boundary_samples, privilege_verdict


def _row(*entries, m=2):
    return PolyMatrix.from_nested([list(entries)], m)


def test_polydisc_samples_cover_axis_strata():
    pts = boundary_samples(Domain.polydisc(2), 8)
    on_bd = np.isclose(np.abs(pts), 1, atol=1e-14).any(axis=1)
    assert on_bd.all() and np.all(np.abs(pts) <= 1 + 1e-14)
    axis = (np.abs(pts[:, 0]) == 0) & np.isclose(np.abs(pts[:, 1]), 1)
    assert axis.any()


def test_ball_samples_on_sphere():
    for m in (2, 3):
        pts = boundary_samples(Domain.ball(m), 8)
        assert np.abs(np.linalg.norm(pts, axis=1) - 1).max() <= 1e-14


def test_samples_deterministic_and_nested():
    for dom in (Domain.polydisc(2), Domain.ball(2), Domain.polydisc(3)):
        a = boundary_samples(dom, 8)
        assert np.array_equal(a, boundary_samples(dom, 8))
        b = boundary_samples(dom, 16)
        keys = {tuple(np.round(p, 12)) for p in b}
        assert all(tuple(np.round(p, 12)) in keys for p in a)


def test_domain_and_density_errors():
    with pytest.raises(UnsupportedError):
        Domain("annulus", 2)
    with pytest.raises(ArgumentError):
        boundary_samples(Domain.ball(2), 4)
    with pytest.raises(ArgumentError):
        PolyMatrix(())
    with pytest.raises(ArgumentError):
        privilege_verdict(_row("z1", m=3), Domain.polydisc(2))


def test_interior_common_zero_is_privileged():
    rep = privilege_verdict(_row("z1 - 0.2", "z2 - 0.3"), Domain.polydisc(2))
    assert rep.verdict == "privileged" and rep.observed_ranks == [1]
    assert "no rank jump" in rep.note and rep.domain.rests_on_remark


def test_single_coordinate_not_privileged():
    rep = privilege_verdict(_row("z1"), Domain.polydisc(2))
    assert rep.verdict == "not-privileged" and rep.observed_ranks == [0, 1]
    w = rep.witnesses[0]
    assert w[0] == 0 and abs(abs(w[1]) - 1) <= 1e-14


def test_ball_coordinates_privileged():
    rep = privilege_verdict(_row("z1", "z2"), Domain.ball(2))
    assert rep.verdict == "privileged" and not rep.domain.rests_on_remark


def test_verdict_invariant_under_invertible_factors():
    rng = np.random.default_rng(5)
    cases = [
        (PolyMatrix.from_nested([["z1", "z2"], ["z1*z2", "1"]], 2), Domain.polydisc(2)),
        (PolyMatrix.from_nested([["z1 - 0.2", "z2 - 0.3"]], 2), Domain.polydisc(2)),
        (PolyMatrix.from_nested([["z1", "0"], ["0", "z2"]], 2), Domain.ball(2)),
    ]
    for A, dom in cases:
        base = privilege_verdict(A, dom).verdict
        p, q = A.shape
        for _ in range(3):
            L = rng.normal(size=(p, p)) + 1j * rng.normal(size=(p, p))
            R = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
            assert privilege_verdict(A.transform(L, R), dom).verdict == base


def test_density_monotone():
    for A in (_row("z1"), _row("z1 - 0.5*z2"), _row("z1 - 0.2", "z2 - 0.3")):
        verdicts = [privilege_verdict(A, Domain.polydisc(2), d).verdict for d in (8, 16, 32)]
        seen_jump = False
        for v in verdicts:
            if seen_jump:
                assert v == "not-privileged"
            seen_jump |= v == "not-privileged"


def test_rows_privileged_iff_no_sampled_common_zero():
    dom = Domain.polydisc(2)
    pts = boundary_samples(dom, 16)
    for A in (_row("z1"), _row("z1 - 0.2", "z2 - 0.3"), _row("z1*z2"), _row("z1 - z2", "z1 + z2"), _row("1 - z1")):
        vals = np.array([A(z)[0] for z in pts])
        common_zero = (np.abs(vals).max(axis=1) <= 1e-9 * np.abs(vals).max()).any()
        assert (privilege_verdict(A, dom, 16).verdict == "privileged") == (not common_zero)


def test_inconclusive_near_threshold():
    rep = privilege_verdict(_row("z1", "1e-8"), Domain.polydisc(2))
    assert rep.verdict == "inconclusive" and rep.ambiguous > 0


def test_report_fields():
    rep = privilege_verdict(_row("z1"), Domain.polydisc(2), density=8)
    assert rep.sample_count == len(boundary_samples(Domain.polydisc(2), 8))
    assert sum(rep.ranks.values()) + rep.ambiguous == rep.sample_count
    assert rep.min_nonzero_singular > 0
