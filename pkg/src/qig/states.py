"""Faithful density matrices, observables and seeded random ensembles.

All randomness goes through ``numpy.random.Generator`` backed by PCG64, so
a seed fully determines every draw. Campaigns derive one independent stream
per trial with ``trial_seed``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NotFaithful, TraceNotOne
from .linalg import SpectralDecomposition, center_observable, check_hermitian, hermitian_eig

FAITHFUL_FLOOR = 1e-8
TRACE_ATOL = 1e-12

# 2**64 / golden ratio, odd
_SEED_STRIDE = 0x9E3779B97F4A7C15


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def trial_seed(seed: int, trial: int) -> int:
    """Seed of the substream used by trial ``trial`` of a campaign."""
    return (int(seed) + int(trial) * _SEED_STRIDE) % 2**64


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated faithful state with its spectrum cached.

    ``mixed_delta`` records the weight of ``I/n`` mixed in by a faithfulness
    repair (zero when the state was accepted as given).
    """

    matrix: np.ndarray
    spectrum: SpectralDecomposition
    mixed_delta: float = 0.0

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectrum.eigenvectors

    @property
    def lambda_min(self) -> float:
        return float(self.spectrum.eigenvalues[0])


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def new_density(M, eps: float = FAITHFUL_FLOOR, mixed_delta: float = 0.0) -> DensityMatrix:
    """Validate ``M`` as a faithful density matrix.

    Raises:
        NotHermitian: hermiticity tolerance violated.
        TraceNotOne: ``|Tr M - 1| > 1e-12``.
        NotFaithful: smallest eigenvalue below ``eps``.
    """
    M = check_hermitian(M)
    tr = np.trace(M).real
    if abs(tr - 1.0) > TRACE_ATOL:
        raise TraceNotOne(f"trace is {tr!r}, expected 1")
    spec = hermitian_eig(M)
    lam_min = float(spec.eigenvalues[0])
    if lam_min < eps:
        raise NotFaithful(f"smallest eigenvalue {lam_min:.3e} is below the floor {eps:g}")
    spec = SpectralDecomposition(_freeze(spec.eigenvalues), _freeze(spec.eigenvectors))
    return DensityMatrix(_freeze(M), spec, mixed_delta)


def make_faithful(M, eps: float = FAITHFUL_FLOOR):
    """Mix a trace-one PSD matrix with ``I/n`` if its spectrum dips below ``eps``.

    Returns ``(matrix, delta)`` where ``delta = 10 eps n`` if mixing happened
    and ``0`` otherwise.
    """
    M = np.asarray(M, dtype=complex)
    M = (M + M.conj().T) / 2
    n = M.shape[0]
    if np.linalg.eigvalsh(M)[0] >= eps:
        return M, 0.0
    delta = 10 * eps * n
    return (1 - delta) * M + delta * np.eye(n) / n, delta


def ginibre(n: int, rng: np.random.Generator, k: int = None) -> np.ndarray:
    """``n x k`` matrix of i.i.d. standard complex Gaussians (unit variance)."""
    k = n if k is None else k
    return (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / np.sqrt(2)


def random_density(n: int, rng: np.random.Generator) -> DensityMatrix:
    """Draw from the Hilbert-Schmidt (square Ginibre) ensemble, ``GG*/Tr GG*``."""
    if n < 2:
        raise DimMismatch("random states need n >= 2")
    G = ginibre(n, rng)
    rho = G @ G.conj().T
    rho = rho / np.trace(rho).real
    rho, delta = make_faithful(rho)
    # renormalize once more so the trace is 1 to round-off
    rho = rho / np.trace(rho).real
    return new_density(rho, mixed_delta=delta)


def random_observable(n: int, rng: np.random.Generator) -> np.ndarray:
    """Hermitian part ``(G + G*)/2`` of a complex Gaussian matrix."""
    if n < 2:
        raise DimMismatch("random observables need n >= 2")
    G = ginibre(n, rng)
    return (G + G.conj().T) / 2


def random_observable_tuple(n: int, m: int, rng: np.random.Generator, centered_against=None) -> list:
    """``m`` independent observables, optionally shifted into the tangent space at a state."""
    if m < 1:
        raise ValueError("need at least one observable")
    obs = [random_observable(n, rng) for _ in range(m)]
    if centered_against is not None:
        obs = [center_observable(A, centered_against) for A in obs]
    return obs


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix with the phase fix."""
    Q, R = np.linalg.qr(ginibre(n, rng))
    d = np.diag(R)
    return Q * (d / np.abs(d))
