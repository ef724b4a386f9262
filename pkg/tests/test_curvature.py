import cmath
import warnings

import numpy as np
import pytest

from oracles import reference_matrices, solve_route_jet

from hilmod.curvature import (
    JET,
    LINE_BUNDLE,
    CurvatureTensor,
    NKSection,
    NonCanonicalWarning,
    compare_curvature,
    curvature_at,
    lambda_mu_oracle,
    nk_curvature_closed,
    nk_curvature_numeric,
    nk_curvature_tensor,
    nk_module,
    random_unitary,
    section_limit,
    tensor_from_jet,
)
from hilmod.errors import ArgumentError
from hilmod.frame import frame_series, metric_jet, normalize_jet
from hilmod.rkhs import DiagonalKernelSpec, MonomialIdeal, build_truncated_module

LAMBDA_MU = [(1.0, 1.0), (2.0, 3.0), (0.5, 1.5)]
NK = [(2, 1), (3, 1), (3, 2), (5, 2)]


def _power(lam, mu, N=5):
    return build_truncated_module(DiagonalKernelSpec.power(lam, mu), MonomialIdeal.vanish_at_origin(2), N)


@pytest.mark.parametrize("lam, mu", LAMBDA_MU)
def test_curvature_matches_typed_matrices(lam, mu):
    T = curvature_at(_power(lam, mu), [0, 0])
    B11, B12, B21, B22 = reference_matrices(lam, mu)
    for (i, j), ref in zip([(1, 1), (1, 2), (2, 1), (2, 2)], (B11, B12, B21, B22)):
        assert np.abs(T.block(i, j) - ref).max() <= 1e-8
    assert np.abs(lambda_mu_oracle(lam, mu) - T.B).max() <= 1e-12
    assert T.canonical and T.normal_frame


@pytest.mark.parametrize("lam, mu", LAMBDA_MU)
def test_curvature_matches_resolvent_route(lam, mu):
    mod = _power(lam, mu)
    V = np.column_stack([mod.coords({(1, 0): 1.0}), mod.coords({(0, 1): 1.0})])
    A = solve_route_jet(mod, V)
    assert np.abs(curvature_at(mod, [0, 0]).B - A).max() <= 1e-8


def test_two_three_fractions():
    T = curvature_at(_power(2, 3), [0, 0])
    assert np.abs(T.block(1, 1) - np.diag([3 / 2, 18 / 25])).max() <= 1e-8
    assert np.abs(T.block(2, 2) - np.diag([12 / 25, 2])).max() <= 1e-8
    assert T.block(1, 2)[0, 1] == pytest.approx(36 / (25 * np.sqrt(6)), abs=1e-8)
    assert T.block(1, 2)[0, 1].real == pytest.approx(0.587878, abs=1e-6)


def test_hermitian_symmetry():
    for mod, w in [
        (_power(2, 3), [0, 0]),
        (build_truncated_module(DiagonalKernelSpec.hardy(2), MonomialIdeal.maximal_power(2, 2), 6), [0, 0]),
        (build_truncated_module(DiagonalKernelSpec.hardy(2), MonomialIdeal.vanish_at_origin(2), 20), [0.1, 0.1j]),
    ]:
        assert curvature_at(mod, w).hermitian_defect() <= 1e-12


def test_conventions():
    mod = _power(2, 3)
    T = curvature_at(mod, [0, 0])
    L = curvature_at(mod, [0, 0], convention=LINE_BUNDLE)
    # normal frame at the origin: the two conventions differ by a sign only
    assert np.abs(L.B + T.B).max() <= 1e-14
    assert np.abs(T.to_convention(LINE_BUNDLE).B - L.B).max() == 0
    with pytest.raises(ArgumentError):
        curvature_at(mod, [0, 0], convention="other")


def test_non_canonical_warning():
    mod = _power(2, 3)
    with pytest.warns(NonCanonicalWarning):
        T = curvature_at(mod, [0, 0], ideal=MonomialIdeal.full(2))
    assert not T.canonical


def test_frame_basis_change_is_conjugation():
    mod = _power(2, 3)
    rng = np.random.default_rng(7)
    U = random_unitary(2, rng)
    fr = frame_series(mod, [0, 0])
    T = tensor_from_jet(normalize_jet(metric_jet(fr)))
    for basis in (fr.kernel_basis[:, ::-1], fr.kernel_basis @ U):
        T2 = tensor_from_jet(normalize_jet(metric_jet(frame_series(mod, [0, 0], basis=basis))))
        cmp = compare_curvature(T, T2)
        assert cmp.verdict == "not-distinguished" and cmp.exact
        for i in range(2):
            for j in range(2):
                assert np.abs(cmp.unitary @ T.B[i, j] @ cmp.unitary.conj().T - T2.B[i, j]).max() <= 1e-10


def test_nk_closed_examples():
    assert nk_curvature_closed(2, 1, 0) == -1
    assert nk_curvature_closed(3, 1, cmath.exp(0.4j)) == pytest.approx(-1.0, rel=1e-15)
    assert nk_curvature_closed(3, 2, 0) == -1
    for n, k in [(2, 2), (2, 0), (3, 4)]:
        with pytest.raises(ArgumentError):
            nk_curvature_closed(n, k, 0.5)


@pytest.mark.parametrize("n, k", NK)
def test_section_norm_from_gram(n, k):
    for theta in (0.3, 0.7 * cmath.exp(1j * cmath.pi / 4), 1.1, 0):
        s = NKSection(n, k, theta)
        assert s.norm_sq() == pytest.approx(s.closed_norm_sq(), abs=1e-14)


def test_nk_numeric_examples():
    assert abs(nk_curvature_numeric(2, 1, 0.3) - (-1 / 1.09**2)) <= 1e-4
    # theta = 0, n - k >= 2: error of the stencil is about 5 h^2 / 3, so h = 5e-4
    for n, k in [(3, 1), (5, 2), (5, 1)]:
        assert abs(nk_curvature_numeric(n, k, 0, h=5e-4)) <= 1e-6
    with pytest.raises(ArgumentError):
        nk_curvature_numeric(2, 1, 0.3, h=0.2)


@pytest.mark.parametrize("n, k", NK)
def test_nk_numeric_six_point_sample(n, k):
    thetas = [0.3, 0.7 * cmath.exp(1j * cmath.pi / 4), 1.1, -0.5j, 0.9 - 0.2j, 0.05]
    for t in thetas:
        assert abs(nk_curvature_numeric(n, k, t) - nk_curvature_closed(n, k, t)) <= 1e-4


def test_section_limit_examples():
    for n, k in NK:
        mod = nk_module(n, k)
        lim = section_limit(mod, n, 0)
        expect = np.zeros(mod.n)
        expect[mod.position((n, 0))] = 1
        assert np.abs(lim - expect).max() <= 1e-6
    mod = nk_module(2, 1)
    lim = section_limit(mod, 2, 1)
    expect = np.zeros(mod.n)
    expect[mod.position((2, 0))] = expect[mod.position((1, 1))] = 1
    assert np.abs(lim - expect).max() <= 1e-6


@pytest.mark.parametrize("n, k", NK)
def test_section_limit_matches_section(n, k):
    theta = 0.6 - 0.3j
    mod = nk_module(n, k)
    lim = section_limit(mod, n, theta)
    ref = mod.monomial_coefficients(NKSection(n, k, theta).vector(mod))
    assert np.abs(lim - ref).max() <= 1e-6
    doubled = section_limit(mod, n, theta, ts=(0.2, 0.1, 0.05))
    assert np.abs(doubled - lim).max() < 1e-8


def test_section_limit_ratio_violation():
    mod = nk_module(3, 1)
    with pytest.raises(ArgumentError):
        section_limit(mod, 3, 0.5, points=[[0.1, 0.1], [0.05, 0.025], [0.025, 0.0125]])


def test_compare_examples():
    a = curvature_at(_power(1, 1), [0, 0])
    b = curvature_at(_power(2, 3), [0, 0])
    assert compare_curvature(a, b).distinguished
    same = compare_curvature(b, curvature_at(_power(2, 3, 7), [0, 0]))
    assert same.verdict == "not-distinguished" and same.exact
    cmp = compare_curvature(nk_curvature_tensor(3, 1, 0.5), nk_curvature_tensor(3, 2, 0.5))
    assert cmp.distinguished
    assert nk_curvature_closed(3, 1, 0.5) != pytest.approx(nk_curvature_closed(3, 2, 0.5))


def test_compare_errors():
    a = curvature_at(_power(1, 1), [0, 0])
    with pytest.raises(ArgumentError):
        compare_curvature(a, nk_curvature_tensor(3, 1, 0.5))
    with pytest.raises(ArgumentError):
        compare_curvature(a, a.to_convention(LINE_BUNDLE))


def test_compare_three_dimensional_kernel():
    mod = build_truncated_module(DiagonalKernelSpec.power(2, 3), MonomialIdeal.maximal_power(2, 2), 6)
    T = curvature_at(mod, [0, 0])
    assert T.d == 3
    rng = np.random.default_rng(11)
    U = random_unitary(3, rng)
    assert compare_curvature(T, T.conjugate(U)).verdict == "not-distinguished"
    other = curvature_at(build_truncated_module(DiagonalKernelSpec.power(2, 2), MonomialIdeal.maximal_power(2, 2), 6), [0, 0])
    assert compare_curvature(T, other).distinguished


def test_tensor_validation():
    with pytest.raises(ArgumentError):
        CurvatureTensor(np.zeros(2), np.zeros((2, 2, 2)), JET)
    with pytest.raises(ArgumentError):
        CurvatureTensor(np.zeros(2), np.zeros((2, 2, 1, 1)), "wrong")
