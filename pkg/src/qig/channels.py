"""Completely positive trace-preserving maps in Kraus form and monotonicity checks.

A channel ``alpha: M_n -> M_k`` is stored as a stack of ``k x n`` Kraus
operators ``K_s`` with ``sum_s K_s* K_s = I_n``:

    alpha(X)   = sum_s K_s X K_s*
    alpha*(Y)  = sum_s K_s* Y K_s

When ``alpha(D)`` drops below the faithfulness floor, the checks replace
``alpha`` by ``(1 - delta) alpha + delta Tr(.) I/k``, which is again a channel,
and apply that same map to the observable, so the repaired comparison is
still an instance of the monotonicity inequality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadDims, DimMismatch, NotFaithful, NotTraceless
from .functions import StandardFunction
from .inequalities import INEQUALITY_RTOL, InequalityVerdict, make_verdict
from .linalg import as_array, hs_inner
from .metrics import gamma, j_apply, metric_context, qcov
from .states import DensityMatrix, FAITHFUL_FLOOR, ginibre, make_faithful, new_density

TP_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class KrausChannel:
    kraus: np.ndarray  # shape (s, k, n)
    name: str = "kraus"

    def __post_init__(self):
        K = np.asarray(self.kraus, dtype=complex)
        if K.ndim != 3:
            raise BadDims(f"Kraus stack must be 3-dimensional, got shape {K.shape}")
        defect = np.max(np.abs(np.einsum("ski,skj->ij", K.conj(), K) - np.eye(K.shape[2])))
        if defect > TP_ATOL:
            raise BadDims(f"not trace preserving: |sum K*K - I| = {defect:.3e}")
        K.setflags(write=False)
        object.__setattr__(self, "kraus", K)

    @property
    def in_dim(self) -> int:
        return self.kraus.shape[2]

    @property
    def out_dim(self) -> int:
        return self.kraus.shape[1]


def apply_matrix(ch: KrausChannel, X) -> np.ndarray:
    X = as_array(X)
    if X.shape != (ch.in_dim, ch.in_dim):
        raise DimMismatch(f"channel input is {ch.in_dim}x{ch.in_dim}, got {X.shape}")
    K = ch.kraus
    return np.einsum("sai,ij,sbj->ab", K, X, K.conj())


def adjoint_apply(ch: KrausChannel, Y) -> np.ndarray:
    """Hilbert-Schmidt adjoint ``sum_s K_s* Y K_s`` (unital)."""
    Y = as_array(Y)
    if Y.shape != (ch.out_dim, ch.out_dim):
        raise DimMismatch(f"adjoint input is {ch.out_dim}x{ch.out_dim}, got {Y.shape}")
    K = ch.kraus
    return np.einsum("sai,ab,sbj->ij", K.conj(), Y, K)


def depolarize_mix(ch: KrausChannel, delta: float) -> KrausChannel:
    """Kraus form of ``(1 - delta) ch + delta Tr(.) I/k``."""
    if delta == 0:
        return ch
    k, n = ch.out_dim, ch.in_dim
    extra = np.zeros((k * n, k, n), dtype=complex)
    for a in range(k):
        for i in range(n):
            extra[a * n + i, a, i] = np.sqrt(delta / k)
    return KrausChannel(np.concatenate([np.sqrt(1 - delta) * ch.kraus, extra]), f"{ch.name}+mix")


def faithful_image(ch: KrausChannel, D: DensityMatrix, eps: float = FAITHFUL_FLOOR):
    """Return ``(channel, alpha(D))``, where ``channel`` includes any faithfulness repair.

    The output state records the mixing weight in ``mixed_delta``.
    """
    out = apply_matrix(ch, D)
    out = out / np.trace(out).real
    _, delta = make_faithful(out, eps)
    used = depolarize_mix(ch, delta)
    if delta:
        out = apply_matrix(used, D)
        out = out / np.trace(out).real
    return used, new_density(out, eps, mixed_delta=delta)


def apply(ch: KrausChannel, D: DensityMatrix) -> DensityMatrix:
    """``alpha(D)`` as a faithful state (mixed with ``I/k`` if needed, see ``mixed_delta``)."""
    return faithful_image(ch, D)[1]


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def identity_channel(n: int) -> KrausChannel:
    return KrausChannel(np.eye(n, dtype=complex)[None], "identity")


def pinching_channel(n: int) -> KrausChannel:
    """Dephasing in the computational basis: Kraus operators ``|i><i|``."""
    K = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        K[i, i, i] = 1.0
    return KrausChannel(K, "pinching")


def partial_trace_channel(dims, keep: int = 0) -> KrausChannel:
    """Trace out one factor of a bipartite system ``C^d1 (x) C^d2``.

    ``keep`` selects the factor that survives (0 or 1).
    """
    d1, d2 = (int(d) for d in dims)
    if keep not in (0, 1) or d1 < 1 or d2 < 1:
        raise BadDims(f"bad partial trace request dims={dims} keep={keep}")
    if keep == 0:
        K = np.stack([np.kron(np.eye(d1), np.eye(d2)[j][None, :]) for j in range(d2)])
    else:
        K = np.stack([np.kron(np.eye(d1)[j][None, :], np.eye(d2)) for j in range(d1)])
    return KrausChannel(K.astype(complex), "partial-trace")


def random_channel(n: int, k: int, env_dim: int, rng: np.random.Generator) -> KrausChannel:
    """Stinespring-random channel from an isometry ``V: C^n -> C^k (x) C^e``.

    Raises:
        BadDims: if ``k * env_dim < n``.
    """
    if min(n, k, env_dim) < 1 or k * env_dim < n:
        raise BadDims(f"need k*e >= n, got n={n}, k={k}, e={env_dim}")
    Q, R = np.linalg.qr(ginibre(k * env_dim, rng, n))
    V = Q * (np.diag(R) / np.abs(np.diag(R)))
    K = V.reshape(k, env_dim, n).transpose(1, 0, 2)
    return KrausChannel(np.ascontiguousarray(K), "random")


# ---------------------------------------------------------------------------
# monotonicity
# ---------------------------------------------------------------------------


def _fisher_sides(f, ch, D, out, A):
    alpha_A = apply_matrix(ch, A)
    lhs = np.real(gamma(metric_context(D, f), A, A))
    return lhs, np.real(gamma(metric_context(out, f), alpha_A, alpha_A))


def _cov_sides(f, ch, D, out, A):
    pulled = adjoint_apply(ch, A)
    inner = np.real(qcov(metric_context(D, f), pulled, pulled))
    return np.real(qcov(metric_context(out, f), A, A)), inner


def _repair_note(sides, f, ch, D, out, A) -> str:
    """Describe the repair and, when the unrepaired output is still invertible, the raw margin."""
    note = f"output mixed with I/k, delta={out.mixed_delta:g}"
    raw = apply_matrix(ch, D)
    try:
        raw_state = new_density(raw / np.trace(raw).real, eps=1e-14)
    except NotFaithful:
        return note + "; raw margin undefined (output singular)"
    lhs, rhs = sides(f, ch, D, raw_state, A)
    return note + f"; raw margin={lhs - rhs:.6g}"


def check_fisher_monotonicity(f: StandardFunction, ch: KrausChannel, D: DensityMatrix, A,
                              tol: float = INEQUALITY_RTOL, seed=None) -> InequalityVerdict:
    """``gamma_D^f(A,A) >= gamma_{alpha(D)}^f(alpha(A), alpha(A))`` for a traceless tangent ``A``.

    Raises:
        NotTraceless: if ``|Tr A|`` exceeds round-off.
    """
    A = as_array(A)
    if A.shape != (ch.in_dim, ch.in_dim) or D.dim != ch.in_dim:
        raise DimMismatch("state, tangent and channel input dimensions differ")
    if abs(np.trace(A)) > 1e-12 * max(float(np.max(np.abs(A))), 1.0):
        raise NotTraceless(f"tangent direction has trace {np.trace(A):.3e}")
    used, out = faithful_image(ch, D)
    lhs, rhs = _fisher_sides(f, used, D, out, A)
    v = make_verdict("fisher-monotone", lhs, rhs, tol, f=f.spec, dim=D.dim, m=1, seed=seed)
    if out.mixed_delta:
        v.notes = _repair_note(_fisher_sides, f, ch, D, out, A)
    return v


def check_cov_monotonicity(f: StandardFunction, ch: KrausChannel, D: DensityMatrix, A,
                           tol: float = INEQUALITY_RTOL, seed=None) -> InequalityVerdict:
    """``qCov_{alpha(D)}^f(A,A) >= qCov_D^f(alpha*(A), alpha*(A))`` for ``A`` on the output space.

    The verdict's ``lhs`` is the output-side covariance, so ``margin >= 0``
    means the inequality holds.
    """
    A = as_array(A)
    if A.shape != (ch.out_dim, ch.out_dim) or D.dim != ch.in_dim:
        raise DimMismatch("observable must live on the channel output space")
    used, out = faithful_image(ch, D)
    outer, inner = _cov_sides(f, used, D, out, A)
    v = make_verdict("cov-monotone", outer, inner, tol, f=f.spec, dim=D.dim, m=1, seed=seed)
    if out.mixed_delta:
        v.notes = _repair_note(_cov_sides, f, ch, D, out, A)
    return v


def superoperator_gap(f: StandardFunction, ch: KrausChannel, D: DensityMatrix, X) -> tuple:
    """``<X, (J_{alpha(D)} - alpha J_D alpha*)(X)>`` and its scale.

    Nonnegative for every ``X`` exactly when the Fisher information is
    monotone under ``alpha``.
    """
    used, out = faithful_image(ch, D)
    X = as_array(X)
    outer = hs_inner(X, j_apply(metric_context(out, f), X)).real
    inner = hs_inner(X, apply_matrix(used, j_apply(metric_context(D, f), adjoint_apply(used, X)))).real
    return float(outer - inner), max(abs(outer), abs(inner), 1e-30)
