"""Numbered acceptance criteria; the terminal summary prints one line per criterion."""

import cmath
import json
import time

import numpy as np
import pytest

from oracles import reference_matrices

from hilmod.cli import main
from hilmod.curvature import compare_curvature, curvature_at, nk_curvature_closed, nk_curvature_numeric, random_unitary
from hilmod.frame import frame_annihilation_residual, frame_series, polar_parts, projected_kernel_dim, shift_operators
from hilmod.linop import joint_kernel, rrqr_kernel
from hilmod.privilege import Domain, PolyMatrix, privilege_verdict
from hilmod.rkhs import DiagonalKernelSpec, MonomialIdeal, build_truncated_module
from hilmod.stalk import gleason_report, minimal_generators, monomial_closure, parse_generators


def criterion(n):
    return pytest.mark.criterion(n)


def _power(lam, mu, N):
    return build_truncated_module(DiagonalKernelSpec.power(lam, mu), MonomialIdeal.vanish_at_origin(2), N)


# 1 ----------------------------------------------------------------------------------


@criterion(1)
@pytest.mark.parametrize("lam, mu", [(2.0, 3.0), (1.0, 1.0)])
def test_c1_lambda_mu_curvature(lam, mu):
    start = time.perf_counter()
    T = curvature_at(_power(lam, mu, 5), [0, 0])
    elapsed = time.perf_counter() - start
    B11, B12, B21, B22 = reference_matrices(lam, mu)
    assert np.abs(T.block(1, 1) - B11).max() <= 1e-8
    assert np.abs(T.block(1, 2) - B12).max() <= 1e-8
    assert np.abs(T.block(2, 1) - B21).max() <= 1e-8
    assert np.abs(T.block(2, 2) - B22).max() <= 1e-8
    assert elapsed < 5


@criterion(1)
def test_c1_literal_values():
    T = curvature_at(_power(2, 3, 5), [0, 0])
    assert np.abs(T.block(1, 1) - np.diag([3 / 2, 18 / 25])).max() <= 1e-8
    assert np.abs(T.block(2, 2) - np.diag([12 / 25, 2])).max() <= 1e-8
    assert np.abs(T.block(1, 2) - np.array([[0, 36 / (25 * np.sqrt(6))], [0, 0]])).max() <= 1e-8
    U = curvature_at(_power(1, 1, 5), [0, 0])
    assert np.abs(U.block(1, 1) - np.diag([1, 1 / 4])).max() <= 1e-8
    assert np.abs(U.block(1, 2) - np.array([[0, 1 / 4], [0, 0]])).max() <= 1e-8


# 2 ----------------------------------------------------------------------------------


@criterion(2)
def test_c2_dimension_grid():
    start = time.perf_counter()
    mod = build_truncated_module(DiagonalKernelSpec.hardy(2), MonomialIdeal.vanish_at_origin(2), 6)
    axis = [0.4 * (i / 2 - 1) for i in range(5)]
    dims = np.array([[joint_kernel(mod, [x, y], 1e-9).dim for y in axis] for x in axis])
    elapsed = time.perf_counter() - start
    expect = np.ones((5, 5), dtype=int)
    expect[2, 2] = 2
    assert np.array_equal(dims, expect)
    assert elapsed < 5
    # second null-space method agrees on every grid point
    assert all(rrqr_kernel(mod, [x, y], 1e-9).shape[1] == expect[i, j]
               for i, x in enumerate(axis) for j, y in enumerate(axis))


# 3 ----------------------------------------------------------------------------------

NK = [(2, 1), (3, 1), (3, 2), (5, 2)]
THETAS = [0.3, 0.7 * cmath.exp(1j * cmath.pi / 4), 1.1]


@criterion(3)
@pytest.mark.parametrize("n, k", NK)
@pytest.mark.parametrize("theta", THETAS, ids=["0.3", "0.7e^(i pi/4)", "1.1"])
def test_c3_nk_curvature(n, k, theta):
    closed = nk_curvature_closed(n, k, theta)
    e1 = abs(nk_curvature_numeric(n, k, theta, 1e-3) - closed)
    e2 = abs(nk_curvature_numeric(n, k, theta, 5e-4) - closed)
    assert e1 <= 1e-4
    assert 3.5 <= e1 / e2 <= 4.5


# 4 ----------------------------------------------------------------------------------


@criterion(4)
def test_c4_stalk_oracle():
    gens = parse_generators(
        [{"monomial": [1, 0], "unit": "1 + z1"}, {"monomial": [1, 0], "unit": "1 - z2"}, {"monomial": [0, 2]}], 2
    )
    assert minimal_generators(gens, [0, 0]).generators == ((1, 0), (0, 2))
    mod = build_truncated_module(DiagonalKernelSpec.hardy(2), monomial_closure(gens), 6)
    rep = gleason_report(mod, gens, [0, 0])
    assert rep.d_stalk == rep.d_kernel == 2


# 5 ----------------------------------------------------------------------------------

CATALOG = {
    "m0": MonomialIdeal.vanish_at_origin(2),
    "m0^2": MonomialIdeal.maximal_power(2, 2),
    "<z1^3,z2>": MonomialIdeal(2, ((3, 0), (0, 1))),
    "<z1^3,z1z2^2,z2^3>": MonomialIdeal(2, ((3, 0), (1, 2), (0, 3))),
    "<z1^2,z2^2>": MonomialIdeal(2, ((2, 0), (0, 2))),
}
OFF_VARIETY = [(0.3, 0.2), (-0.25, 0.1j), (0.15 + 0.1j, -0.3)]


@criterion(5)
@pytest.mark.parametrize("name", list(CATALOG))
def test_c5_gleason_sweep(name):
    ideal = CATALOG[name]
    mod = build_truncated_module(DiagonalKernelSpec.hardy(2), ideal, 7)
    checks = []
    for w in [(0, 0)] + OFF_VARIETY:
        rep = gleason_report(mod, ideal, w, 1e-9)
        checks.append(rep.d_kernel == rep.d_stalk)
        if w != (0, 0):
            checks.append(rep.d_kernel == 1)
    assert len(checks) == 7 and all(checks)


# 6 ----------------------------------------------------------------------------------


@criterion(6)
def test_c6_polar_identities():
    for mod in (_power(2, 3, 6), _power(1, 1, 6),
                build_truncated_module(DiagonalKernelSpec.hardy(2), MonomialIdeal.vanish_at_origin(2), 10)):
        pp = polar_parts(mod, [0, 0])
        assert pp.left_residual() <= 1e-10
        assert pp.right_residual() <= 1e-10


@criterion(6)
def test_c6_annihilation_residual():
    mod = build_truncated_module(DiagonalKernelSpec.hardy(2), MonomialIdeal.vanish_at_origin(2), 10)
    w = (0.05, 0.05)
    r4 = frame_annihilation_residual(mod, [0, 0], w, 4)
    r6 = frame_annihilation_residual(mod, [0, 0], w, 6)
    assert r4 <= 1e-5
    assert r6 < r4


@criterion(6)
def test_c6_local_constancy():
    mod = build_truncated_module(DiagonalKernelSpec.hardy(2), MonomialIdeal.vanish_at_origin(2), 10)
    pp = polar_parts(mod, [0, 0])
    rng = np.random.default_rng(6)
    dims = set()
    for _ in range(8):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        w = z / np.linalg.norm(z) * rng.uniform(0.05, 1.0) * 0.3 / pp.R_norm
        dims.add(projected_kernel_dim(mod, pp, w))
    assert dims == {2}


# 7 ----------------------------------------------------------------------------------


@criterion(7)
@pytest.mark.parametrize("lam, mu", [(1.0, 1.0), (2.0, 3.0), (0.5, 1.5), (3.5, 0.7)])
def test_c7_cross_order_orthogonality(lam, mu):
    mod = _power(lam, mu, 8)
    pp = polar_parts(mod, [0, 0])
    T = shift_operators(mod, pp)
    rng = np.random.default_rng(7)
    for _ in range(3):
        wb = 0.3 * (rng.normal(size=2) + 1j * rng.normal(size=2))
        terms = [pp.kernel.basis]
        for _ in range(3):
            terms.append(sum(wb[i] * T[i] @ terms[-1] for i in range(2)))
        for a in range(4):
            for b in range(4):
                if a != b:
                    assert np.abs(terms[b].conj().T @ terms[a]).max() <= 1e-13


# 8 ----------------------------------------------------------------------------------


@criterion(8)
def test_c8_conjugation_invariance():
    T = curvature_at(_power(2, 3, 5), [0, 0])
    rng = np.random.default_rng(8)
    for _ in range(10):
        U = random_unitary(2, rng)
        assert compare_curvature(T, T.conjugate(U)).verdict == "not-distinguished"


@criterion(8)
def test_c8_distinguished():
    a = curvature_at(_power(1, 1, 5), [0, 0])
    b = curvature_at(_power(2, 3, 5), [0, 0])
    assert compare_curvature(a, b).verdict == "distinguished"


# 9 ----------------------------------------------------------------------------------


@criterion(9)
def test_c9_privilege():
    dom = Domain.polydisc(2)
    ok = privilege_verdict(PolyMatrix.from_nested([["z1 - 0.2", "z2 - 0.3"]], 2), dom)
    assert ok.verdict == "privileged"
    bad = privilege_verdict(PolyMatrix.from_nested([["z1"]], 2), dom)
    assert bad.verdict == "not-privileged"
    assert bad.witnesses[0][0] == 0


@criterion(9)
def test_c9_density_monotone():
    dom = Domain.polydisc(2)
    for A in (PolyMatrix.from_nested([["z1"]], 2), PolyMatrix.from_nested([["z1 - 0.2", "z2 - 0.3"]], 2)):
        verdicts = [privilege_verdict(A, dom, d).verdict for d in (8, 16, 32)]
        for before, after in zip(verdicts, verdicts[1:]):
            assert not (before == "not-privileged" and after == "privileged")
    assert [privilege_verdict(PolyMatrix.from_nested([["z1"]], 2), dom, d).verdict for d in (8, 16, 32)] == ["not-privileged"] * 3


# 10 ---------------------------------------------------------------------------------


@criterion(10)
def test_c10_determinism(tmp_path):
    cfg = {
        "kernel": {"family": "power", "lambda": [2, 3]},
        "ideal": {"vanish_at_origin": True},
        "truncation": 6,
        "tolerances": {"rank": 1e-9},
        "tasks": [
            {"id": "grid", "type": "joint_kernel_grid", "extent": 0.4, "size": 5},
            {"id": "curv", "type": "curvature", "base_point": [0, 0]},
            {"id": "gl", "type": "gleason", "points": [[0, 0], [0.2, 0.1]]},
            {"id": "priv", "type": "privilege", "matrix": [["z1"]], "domain": "polydisc", "density": 8},
            {"id": "nk", "type": "nk_curvature", "n": 3, "k": 1, "thetas": [0.3, [0.4, 0.2]]},
        ],
    }
    path = tmp_path / "job.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    outs = [tmp_path / "first.json", tmp_path / "second.json"]
    for out in outs:
        assert main(["run", str(path), "--out", str(out)]) == 0
    assert outs[0].read_bytes() == outs[1].read_bytes()
    cmp_cfg = tmp_path / "cmp.json"
    cmp_cfg.write_text(json.dumps({"nk": {"first": [3, 1], "second": [3, 2], "theta": 0.5}}), encoding="utf-8")
    a, b = tmp_path / "c1.json", tmp_path / "c2.json"
    assert main(["compare", str(cmp_cfg), "--out", str(a)]) == 0
    assert main(["compare", str(cmp_cfg), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
