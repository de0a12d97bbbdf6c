import math

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from qig.errors import DimMismatch
from qig.functions import CATALOG, KM, RLD, SLD, WY, evaluate, mean
from qig.linalg import commutator, commutator_i, hs_inner
from qig.metrics import (
    cov_symmetrized,
    gamma,
    j_apply,
    j_inv_apply,
    metric_context,
    qcov,
    skew_information,
    tilde_identity_residual,
)
from qig.states import make_rng, new_density, random_density, random_observable, random_unitary

from conftest import I2, SX, SZ, superoperator_J, vec

M_WY = ((math.sqrt(0.7) + math.sqrt(0.3)) / 2) ** 2


def wy_skew_oracle(D, A):
    """Tr D A^2 - Tr sqrt(D) A sqrt(D) A with scipy's matrix square root."""
    D = np.asarray(D)
    S = scipy.linalg.sqrtm(D)
    return float(np.real(np.trace(D @ A @ A) - np.trace(S @ A @ S @ A)))


# -- qubit closed forms ------------------------------------------------------


def test_qubit_gamma(qubit):
    assert gamma(metric_context(qubit, SLD), SX, SX) == pytest.approx(4.0, rel=1e-12)
    assert gamma(metric_context(qubit, WY), SX, SX) == pytest.approx(2 / M_WY, rel=1e-12)
    assert 2 / M_WY == pytest.approx(4.174243, abs=1e-6)


def test_qubit_qcov(qubit):
    assert qcov(metric_context(qubit, SLD), SX, SX) == pytest.approx(1.0, rel=1e-12)


def test_qubit_cov_symmetrized(qubit):
    assert cov_symmetrized(qubit, SX, SX) == pytest.approx(1.0, rel=1e-12)
    assert cov_symmetrized(qubit, SZ, SZ) == pytest.approx(0.84, rel=1e-12)
    assert cov_symmetrized(qubit, SX, I2) == pytest.approx(0.0, abs=1e-15)


def test_qubit_wy_skew(qubit):
    value = skew_information(metric_context(qubit, WY), SX, SX)
    assert value == pytest.approx(1 - 2 * math.sqrt(0.21), rel=1e-10)
    assert value == pytest.approx(wy_skew_oracle(qubit.matrix, SX), rel=1e-10)
    assert value == pytest.approx(0.0834849, abs=1e-7)


def test_skew_vanishes_for_commuting_and_rld(qubit):
    assert skew_information(metric_context(qubit, WY), SZ, SZ) == pytest.approx(0.0, abs=1e-15)
    rng = make_rng(0)
    D = random_density(3, rng)
    A, B = random_observable(3, rng), random_observable(3, rng)
    assert skew_information(metric_context(D, RLD), A, B) == 0.0


def test_wy_skew_oracle_random():
    rng = make_rng(9)
    for n in (2, 3, 5):
        D = random_density(n, rng)
        A = random_observable(n, rng)
        ctx = metric_context(D, WY)
        assert skew_information(ctx, A, A) == pytest.approx(wy_skew_oracle(D.matrix, A), rel=1e-9)


# -- J_D -----------------------------------------------------------------------


def test_j_apply_on_state_gives_square(qubit):
    for f in CATALOG:
        ctx = metric_context(qubit, f)
        np.testing.assert_allclose(j_apply(ctx, qubit.matrix), qubit.matrix @ qubit.matrix, atol=1e-15)


def test_j_sld_is_anticommutator():
    rng = make_rng(1)
    D = random_density(4, rng)
    X = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    ctx = metric_context(D, SLD)
    np.testing.assert_allclose(j_apply(ctx, X), (D.matrix @ X + X @ D.matrix) / 2, atol=1e-13)
    # inverse: solve the Lyapunov-type equation (DY + YD)/2 = X independently
    Y = scipy.linalg.solve_sylvester(D.matrix / 2, D.matrix / 2, X)
    np.testing.assert_allclose(j_inv_apply(ctx, X), Y, atol=1e-9 * np.max(np.abs(Y)))


def test_j_inverse_on_diagonal():
    D = new_density(np.diag([0.5, 0.3, 0.2]))
    ctx = metric_context(D, KM)
    X = np.diag([1.0, 2.0, 3.0])
    np.testing.assert_allclose(j_inv_apply(ctx, X), np.diag([2.0, 20 / 3, 15.0]), rtol=1e-13)


@pytest.mark.parametrize("f", CATALOG)
def test_j_roundtrip_and_superoperator_oracle(f):
    rng = make_rng(2)
    for n in (2, 3, 4):
        D = random_density(n, rng)
        ctx = metric_context(D, f)
        X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        np.testing.assert_allclose(j_inv_apply(ctx, j_apply(ctx, X)), X, atol=1e-10 * np.max(np.abs(X)))
        J = superoperator_J(D, lambda w: evaluate(f, w))
        expected = (J @ vec(X)).reshape(n, n)
        np.testing.assert_allclose(j_apply(ctx, X), expected, atol=1e-10 * np.max(np.abs(expected)))


@pytest.mark.parametrize("f", CATALOG)
def test_gamma_and_qcov_against_superoperator(f):
    rng = make_rng(3)
    n = 3
    D = random_density(n, rng)
    A, B = random_observable(n, rng), random_observable(n, rng)
    J = superoperator_J(D, lambda w: evaluate(f, w))
    ctx = metric_context(D, f)
    g_oracle = np.vdot(vec(A), np.linalg.solve(J, vec(B)))
    assert gamma(ctx, A, B) == pytest.approx(g_oracle.real, rel=1e-9)
    means = np.trace(D.matrix @ A) * np.trace(D.matrix @ B)
    q_oracle = np.vdot(vec(A), J @ vec(B)) - means
    assert qcov(ctx, A, B) == pytest.approx(q_oracle.real, rel=1e-9, abs=1e-12)


def test_km_gamma_by_quadrature():
    # Kubo-Mori metric: int_0^inf Tr A (D+t)^-1 B (D+t)^-1 dt
    rng = make_rng(4)
    D = random_density(3, rng)
    A = random_observable(3, rng)
    I = np.eye(3)

    def integrand(s):
        # t = s / (1 - s) maps [0, 1) onto [0, inf)
        t = s / (1 - s)
        R = np.linalg.inv(D.matrix + t * I)
        return np.real(np.trace(A @ R @ A @ R)) / (1 - s) ** 2

    oracle, _ = scipy.integrate.quad(integrand, 0, 1, epsabs=1e-13, epsrel=1e-12, limit=200)
    assert gamma(metric_context(D, KM), A, A) == pytest.approx(oracle, rel=1e-8)


def test_gamma_diagonal_is_classical_fisher():
    lam = np.array([0.5, 0.3, 0.2])
    D = new_density(np.diag(lam))
    a = np.array([1.0, -2.0, 0.5])
    for f in CATALOG:
        assert gamma(metric_context(D, f), np.diag(a), np.diag(a)) == pytest.approx(np.sum(a**2 / lam), rel=1e-13)


def test_qcov_of_identity_vanishes():
    rng = make_rng(5)
    D = random_density(4, rng)
    A = random_observable(4, rng)
    for f in CATALOG:
        assert qcov(metric_context(D, f), np.eye(4), A) == pytest.approx(0.0, abs=1e-14)


def test_qcov_diagonal_is_classical_variance():
    lam = np.array([0.5, 0.3, 0.2])
    D = new_density(np.diag(lam))
    a = np.array([1.0, -2.0, 0.5])
    var = np.sum(lam * a**2) - np.sum(lam * a) ** 2
    for f in CATALOG:
        assert qcov(metric_context(D, f), np.diag(a), np.diag(a)) == pytest.approx(var, rel=1e-13)


def test_dim_mismatch(qubit):
    ctx = metric_context(qubit, SLD)
    with pytest.raises(DimMismatch):
        gamma(ctx, np.eye(3), np.eye(3))
    with pytest.raises(DimMismatch):
        cov_symmetrized(qubit, np.eye(3), np.eye(3))


# -- invariants ----------------------------------------------------------------

seeds = st.integers(0, 2**32)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(2, 5), st.sampled_from(CATALOG))
def test_form_invariants(seed, n, f):
    rng = make_rng(seed)
    D = random_density(n, rng)
    ctx = metric_context(D, f)
    A, B = random_observable(n, rng), random_observable(n, rng)
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Y = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))

    assert isinstance(gamma(ctx, A, B), float)
    assert isinstance(qcov(ctx, A, B), float)
    for op in (gamma, qcov):
        xy, yx = op(ctx, X, Y), op(ctx, Y, X)
        assert abs(xy - np.conj(yx)) <= 1e-10 * max(abs(xy), 1e-300)

    # the two routes to qCov: Hadamard sum vs Tr A* J(B) minus the mean term
    means = np.conj(np.trace(D.matrix @ A)) * np.trace(D.matrix @ B)
    via_j = hs_inner(A, j_apply(ctx, B)) - means
    assert qcov(ctx, A, B) == pytest.approx(via_j.real, rel=1e-11, abs=1e-11)

    assert skew_information(ctx, A, A) >= -1e-12

    # i[D,A] and [D,A] give the same metric value
    plain = gamma(ctx, commutator(D, A), commutator(D, B))
    phased = gamma(ctx, commutator_i(D, A), commutator_i(D, B))
    assert abs(plain - phased) <= 1e-12 * max(abs(plain), 1e-300)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 5), st.sampled_from(CATALOG))
def test_unitary_covariance(seed, n, f):
    rng = make_rng(seed)
    D = random_density(n, rng)
    A, B = random_observable(n, rng), random_observable(n, rng)
    V = random_unitary(n, rng)
    rot = lambda M: V @ M @ V.conj().T
    Dv = new_density(rot(D.matrix))
    g0 = gamma(metric_context(D, f), A, B)
    g1 = gamma(metric_context(Dv, f), rot(A), rot(B))
    assert g1 == pytest.approx(g0, rel=1e-10, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 5))
def test_symmetrized_covariance_is_sld_qcov(seed, n):
    rng = make_rng(seed)
    D = random_density(n, rng)
    A, B = random_observable(n, rng), random_observable(n, rng)
    direct = cov_symmetrized(D, A, B)
    assert qcov(metric_context(D, SLD), A, B) == pytest.approx(direct, rel=1e-11, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 5))
def test_commuting_reduction(seed, n):
    rng = make_rng(seed)
    V = random_unitary(n, rng)
    lam = rng.dirichlet(np.ones(n)) * (1 - 1e-3 * n) + 1e-3
    a, b = rng.normal(size=n), rng.normal(size=n)
    rot = lambda d: V @ np.diag(d) @ V.conj().T
    D = new_density(rot(lam))
    classical = np.sum(lam * a * b) - np.sum(lam * a) * np.sum(lam * b)
    cov = cov_symmetrized(D, rot(a), rot(b))
    assert cov == pytest.approx(classical, rel=1e-10, abs=1e-11)
    for f in CATALOG:
        assert qcov(metric_context(D, f), rot(a), rot(b)) == pytest.approx(classical, rel=1e-10, abs=1e-11)


# -- the f -> f~ identity ----------------------------------------------------------


def test_tilde_identity_qubit_sld(qubit):
    res = tilde_identity_residual(qubit, SLD, SX, SX)
    # skew side: (1/4) * 2 * 0.16 / 0.5
    assert res.skew == pytest.approx(0.16, rel=1e-12)
    # covariance side: 1 - qCov_RLD = 1 - 2 * M_RLD(0.7, 0.3) = 1 - 2 * 0.42
    assert res.cov_gap == pytest.approx(1 - 2 * mean(RLD, 0.7, 0.3), rel=1e-12)
    assert res.residual <= 1e-11


def test_tilde_identity_commuting(qubit):
    for f in CATALOG:
        res = tilde_identity_residual(qubit, f, SZ, SZ)
        assert abs(res.skew) <= 1e-15
        assert abs(res.cov_gap) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(2, 6), st.sampled_from(CATALOG))
def test_tilde_identity_random(seed, n, f):
    rng = make_rng(seed)
    D = random_density(n, rng)
    res = tilde_identity_residual(D, f, random_observable(n, rng), random_observable(n, rng))
    assert res.residual <= 1e-9 * res.scale
