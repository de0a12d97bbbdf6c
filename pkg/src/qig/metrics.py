"""Monotone metrics and generalized covariances at a faithful state.

With ``D = U diag(lam) U*`` and ``X' = U* X U``, every quantity here is a
Hadamard-weighted sum in the eigenbasis of ``D`` with kernel
``K_ij = M_f(lam_i, lam_j)``:

    gamma_D^f(A, B) = sum_ij conj(A'_ij) B'_ij / K_ij
    qCov_D^f(A, B)  = sum_ij K_ij conj(A'_ij) B'_ij
                      - (sum_i lam_i conj(A'_ii)) (sum_i lam_i B'_ii)

so the superoperator ``J_D = f(L_D R_D^-1) R_D`` is applied as
``X -> U (K o X') U*`` and never built as an ``n^2 x n^2`` matrix. The first
argument is the conjugated one throughout.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimMismatch
from .functions import StandardFunction, at_zero, mean, tilde
from .linalg import as_array, center_observable, commutator_i, expectation, from_basis, is_hermitian, to_basis
from .states import DensityMatrix


@dataclass(frozen=True, eq=False)
class MetricContext:
    state: DensityMatrix
    function: StandardFunction
    kernel: np.ndarray

    @property
    def dim(self) -> int:
        return self.state.dim


def metric_context(D: DensityMatrix, f: StandardFunction) -> MetricContext:
    """Precompute the mean kernel ``M_f(lam_i, lam_j)`` for ``D``."""
    lam = D.eigenvalues
    K = np.asarray(mean(f, lam[:, None], lam[None, :]), dtype=float)
    K.setflags(write=False)
    return MetricContext(D, f, K)


def _eigbasis(ctx: MetricContext, X) -> np.ndarray:
    X = as_array(X)
    if X.shape != (ctx.dim, ctx.dim):
        raise DimMismatch(f"expected a {ctx.dim}x{ctx.dim} matrix, got {X.shape}")
    return to_basis(X, ctx.state.eigenvectors)


def _maybe_real(value: complex, A, B):
    """Drop the imaginary part of a form evaluated on two Hermitian matrices."""
    if is_hermitian(A) and is_hermitian(B):
        return float(value.real)
    return complex(value)


def j_apply(ctx: MetricContext, X) -> np.ndarray:
    Xp = _eigbasis(ctx, X)
    return from_basis(ctx.kernel * Xp, ctx.state.eigenvectors)


def j_inv_apply(ctx: MetricContext, X) -> np.ndarray:
    Xp = _eigbasis(ctx, X)
    return from_basis(Xp / ctx.kernel, ctx.state.eigenvectors)


def gamma(ctx: MetricContext, A, B):
    """Quantum Fisher information form ``gamma_D^f(A, B)``.

    Real (a ``float``) when both arguments are Hermitian.
    """
    Ap, Bp = _eigbasis(ctx, A), _eigbasis(ctx, B)
    value = complex(np.sum(Ap.conj() * Bp / ctx.kernel))
    return _maybe_real(value, A, B)


def qcov(ctx: MetricContext, A, B):
    """Generalized covariance ``qCov_D^f(A, B)``; zero whenever ``A`` is a multiple of ``I``."""
    Ap, Bp = _eigbasis(ctx, A), _eigbasis(ctx, B)
    lam = ctx.state.eigenvalues
    quad = np.sum(ctx.kernel * Ap.conj() * Bp)
    means = np.sum(lam * np.diag(Ap).conj()) * np.sum(lam * np.diag(Bp))
    return _maybe_real(complex(quad - means), A, B)


def cov_symmetrized(D: DensityMatrix, A, B):
    """``1/2 Tr D(A*B + BA*) - (Tr DA*)(Tr DB)`` computed directly, without the spectrum."""
    Dm, Am, Bm = as_array(D), as_array(A), as_array(B)
    if not (Dm.shape == Am.shape == Bm.shape):
        raise DimMismatch("state and observables must have the same shape")
    As = Am.conj().T
    value = 0.5 * expectation(Dm, As @ Bm + Bm @ As) - expectation(Dm, As) * expectation(Dm, Bm)
    return _maybe_real(complex(value), A, B)


def skew_information(ctx: MetricContext, A, B) -> float:
    """Metric adjusted skew information ``(f(0)/2) gamma_D^f(i[D,A], i[D,B])``."""
    D = ctx.state
    f0 = at_zero(ctx.function)
    value = gamma(ctx, commutator_i(D, A), commutator_i(D, B))
    return float(np.real(f0 / 2 * value))


class TildeResidual(NamedTuple):
    skew: float
    cov_gap: float
    residual: float
    scale: float


def tilde_identity_residual(D: DensityMatrix, f: StandardFunction, A, B) -> TildeResidual:
    """Compare skew information with ``Cov_D(A,B) - qCov_D^{f~}(A,B)``.

    ``A`` and ``B`` are centered against ``D`` first. The two sides are
    computed by unrelated routes: the left from ``gamma^f`` of commutators,
    the right from the symmetrized covariance (no spectrum) and ``qCov`` with
    the transformed function. ``scale`` is ``max(|Cov|, |qCov^{f~}|, 1e-30)``.
    """
    A = center_observable(A, D)
    B = center_observable(B, D)
    skew = skew_information(metric_context(D, f), A, B)
    cov = float(np.real(cov_symmetrized(D, A, B)))
    qc = float(np.real(qcov(metric_context(D, tilde(f)), A, B)))
    gap = cov - qc
    scale = max(abs(cov), abs(qc), 1e-30)
    return TildeResidual(skew, gap, abs(skew - gap), scale)
