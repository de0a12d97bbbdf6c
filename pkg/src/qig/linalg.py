"""Dense Hermitian linear algebra used by every other module.

Matrices are plain complex ``numpy`` arrays. Functions that take a state
also accept any object exposing a ``matrix`` attribute (``DensityMatrix``).
"""

from typing import Callable, NamedTuple

import numpy as np

from .errors import DimMismatch, NotHermitian

HERMITIAN_RTOL = 1e-12
ABS_FLOOR = 1e-14


class SpectralDecomposition(NamedTuple):
    """Eigenvalues in ascending order and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T


def as_array(M) -> np.ndarray:
    return np.asarray(getattr(M, "matrix", M))


def scale_of(M) -> float:
    """Max-abs-entry of ``M``, never below the absolute floor."""
    M = np.asarray(M)
    if M.size == 0:
        return ABS_FLOOR
    return max(float(np.max(np.abs(M))), ABS_FLOOR)


def _check_square(M: np.ndarray) -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {M.shape}")


def _check_same_shape(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise DimMismatch(f"shape mismatch: {A.shape} vs {B.shape}")


def hermiticity_defect(M) -> float:
    M = as_array(M)
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def is_hermitian(M, rtol: float = HERMITIAN_RTOL) -> bool:
    M = as_array(M)
    _check_square(M)
    return hermiticity_defect(M) <= rtol * scale_of(M)


def check_hermitian(M, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Return ``M`` as a complex array, raising ``NotHermitian`` if it is not."""
    M = np.asarray(as_array(M), dtype=complex)
    _check_square(M)
    defect = hermiticity_defect(M)
    if defect > rtol * scale_of(M):
        raise NotHermitian(
            f"hermiticity defect {defect:.3e} exceeds {rtol:g} * max-abs-entry"
        )
    return M


def hermitian_eig(M) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    The input is symmetrized (``(M + M*)/2``) after the tolerance check so
    that round-off in the lower triangle cannot leak into the result.

    Raises:
        NotHermitian: if ``M`` fails the hermiticity tolerance.
    """
    M = check_hermitian(M)
    w, U = np.linalg.eigh((M + M.conj().T) / 2)
    # eigh is ascending already; stable sort keeps degenerate blocks in place
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[order], U[:, order])


def determinant(M):
    """Determinant via LU with partial pivoting. Real input gives a real result."""
    M = np.asarray(M)
    _check_square(M)
    if M.shape[0] == 0:
        return 1.0
    d = np.linalg.det(M)
    return float(d) if np.isrealobj(M) else complex(d)


def real_symmetric_part(G, atol: float = 1e-12) -> np.ndarray:
    """Project a (numerically) real symmetric Gram matrix onto the reals.

    The imaginary residue is checked against ``atol * max-abs-entry``
    before it is discarded.
    """
    G = np.asarray(G)
    _check_square(G)
    if np.iscomplexobj(G):
        residue = float(np.max(np.abs(G.imag))) if G.size else 0.0
        if residue > atol * scale_of(G):
            raise ValueError(f"Gram matrix has imaginary residue {residue:.3e}")
        G = G.real
    return (G + G.T) / 2


def numerical_rank(G, rtol: float = 1e-10) -> int:
    """Rank of a PSD matrix: eigenvalues below ``rtol * leading`` count as zero."""
    G = real_symmetric_part(G)
    if G.size == 0:
        return 0
    w = np.linalg.eigvalsh(G)
    lead = float(np.max(np.abs(w)))
    if lead == 0.0:
        return 0
    return int(np.sum(w > rtol * lead))


def commutator(D, A) -> np.ndarray:
    D, A = as_array(D), as_array(A)
    _check_same_shape(D, A)
    return D @ A - A @ D


def commutator_i(D, A) -> np.ndarray:
    """``i(DA - AD)``, which is Hermitian for Hermitian ``D`` and ``A``."""
    return 1j * commutator(D, A)


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product ``Tr A* B`` (conjugate-linear in ``A``)."""
    A, B = as_array(A), as_array(B)
    _check_same_shape(A, B)
    return complex(np.vdot(A, B))


def expectation(D, A) -> complex:
    """``Tr D A``."""
    D, A = as_array(D), as_array(A)
    _check_same_shape(D, A)
    # Tr(DA) = sum_ij D_ij A_ji
    return complex(np.sum(D * A.T))


def center_observable(A, D) -> np.ndarray:
    """Shift ``A`` into the tangent space at ``D``: ``A - (Tr DA) I``.

    For Hermitian ``A`` the expectation is real and its imaginary part
    (pure round-off) is dropped.
    """
    A = np.asarray(as_array(A), dtype=complex)
    D = as_array(D)
    _check_same_shape(A, D)
    mean = expectation(D, A)
    if is_hermitian(A):
        mean = mean.real
    return A - mean * np.eye(A.shape[0])


def to_basis(X, U: np.ndarray) -> np.ndarray:
    """Matrix entries of ``X`` in the orthonormal basis given by the columns of ``U``."""
    X = as_array(X)
    _check_same_shape(X, U)
    return U.conj().T @ X @ U


def from_basis(Y: np.ndarray, U: np.ndarray) -> np.ndarray:
    return U @ Y @ U.conj().T


def matrix_function(M, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix by spectral calculus."""
    w, U = hermitian_eig(M)
    return (U * fn(w)) @ U.conj().T
