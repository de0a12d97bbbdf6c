"""Gram matrices and the determinant inequalities built on them.

Every check returns an ``InequalityVerdict`` whose ``margin`` is oriented so
that a valid inequality has ``margin >= 0``; ``holds`` allows round-off of
``tol * max(|lhs|, |rhs|, 1e-30)``.

Inequalities checked:

* ``theorem1``: ``qCov^g(A,A) >= c gamma^f([D,A],[D,A])`` given
  ``g(x) >= c (x-1)^2 / f(x)``.
* ``theorem3``: the same hypothesis gives
  ``det[qCov^g(A_i,A_j)] >= det[c gamma^f([D,A_i],[D,A_j])]``, with equality
  exactly when the centered ``A_i`` are linearly dependent.
* ``dyn-ucp``: the special case ``g = SLD``, ``c = f(0)/2`` with ``i[D, A]``.
* ``theorem4``: ``c g <= d f`` pointwise gives
  ``det[c gamma^f(...)] <= det[d gamma^g(...)]``.
* ``robertson``: ``det[Cov(A_i,A_j)] >= det[-(i/2) Tr D[A_i,A_j]]``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConditionViolated, DimMismatch
from .functions import SLD, StandardFunction, at_zero, default_grid, evaluate
from .linalg import (
    as_array,
    center_observable,
    commutator,
    commutator_i,
    determinant,
    expectation,
    hs_inner,
    numerical_rank,
    real_symmetric_part,
)
from .metrics import gamma, metric_context, qcov, tilde_identity_residual
from .states import DensityMatrix

INEQUALITY_RTOL = 1e-9
RANK_RTOL = 1e-10
CONDITION_RTOL = 1e-12


@dataclass(frozen=True)
class GramPair:
    G: np.ndarray
    H: np.ndarray
    detG: float
    detH: float


@dataclass
class InequalityVerdict:
    theorem: str
    lhs: float
    rhs: float
    margin: float
    holds: bool
    equality_case: bool = False
    notes: str = ""
    f: Optional[str] = None
    g: Optional[str] = None
    c: Optional[float] = None
    d: Optional[float] = None
    dim: Optional[int] = None
    m: Optional[int] = None
    seed: Optional[int] = None
    reference_scale: Optional[float] = None

    @property
    def scale(self) -> float:
        """Magnitude the margin is judged against."""
        if self.reference_scale is not None:
            return self.reference_scale
        return max(abs(self.lhs), abs(self.rhs), 1e-30)

    def to_json(self) -> dict:
        """Verdict record with the fixed key order of the JSON-lines output."""
        d = asdict(self)
        keys = ("theorem", "f", "g", "c", "d", "dim", "m", "seed",
                "lhs", "rhs", "margin", "holds", "equality_case")
        return {k: d[k] for k in keys}


def make_verdict(theorem: str, lhs: float, rhs: float, tol: float = INEQUALITY_RTOL, **meta) -> InequalityVerdict:
    lhs, rhs = float(lhs), float(rhs)
    margin = lhs - rhs
    scale = max(abs(lhs), abs(rhs), 1e-30)
    return InequalityVerdict(theorem, lhs, rhs, margin, bool(margin >= -tol * scale), **meta)


# ---------------------------------------------------------------------------
# hypotheses
# ---------------------------------------------------------------------------


def pointwise_condition_margin(f: StandardFunction, g: StandardFunction, c: float, grid=None) -> float:
    """``min_x g(x) - c (x-1)^2 / f(x)`` over the grid."""
    if c <= 0:
        raise ValueError("c must be positive")
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    return float(np.min(_condition_terms(f, g, c, x)[0]))


def _condition_terms(f, g, c, x):
    gx = np.asarray(evaluate(g, x))
    bound = c * (x - 1) ** 2 / np.asarray(evaluate(f, x))
    return gx - bound, np.maximum(np.abs(gx), np.abs(bound))


def eigenvalue_ratios(D: DensityMatrix) -> np.ndarray:
    lam = D.eigenvalues
    return np.unique((lam[:, None] / lam[None, :]).ravel())


def require_condition(f, g, c, D: DensityMatrix = None, grid=None) -> float:
    """Check ``g(x) >= c (x-1)^2 / f(x)`` on the grid and on the ratios ``lam_i/lam_j``.

    Returns the smallest relative margin.

    Raises:
        ConditionViolated: if any point fails beyond relative round-off.
    """
    if c == 0:
        return np.inf
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if D is not None:
        x = np.union1d(x, eigenvalue_ratios(D))
    diff, size = _condition_terms(f, g, c, x)
    rel = diff / np.where(size > 0, size, 1.0)
    worst = float(np.min(rel))
    if worst < -CONDITION_RTOL:
        x_bad = float(x[np.argmin(rel)])
        raise ConditionViolated(
            f"g(x) >= c (x-1)^2/f(x) fails at x={x_bad:.6g} for f={f}, g={g}, c={c:g}",
            margin=worst,
        )
    return worst


def require_order(f, g, c, d, D: DensityMatrix = None, grid=None) -> float:
    """Check ``c/f(x) <= d/g(x)`` (equivalently ``c g(x) <= d f(x)``)."""
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if D is not None:
        x = np.union1d(x, eigenvalue_ratios(D))
    lo = c / np.asarray(evaluate(f, x))
    hi = d / np.asarray(evaluate(g, x))
    rel = (hi - lo) / np.maximum(np.abs(hi), np.abs(lo))
    worst = float(np.min(rel))
    if worst < -CONDITION_RTOL:
        raise ConditionViolated(
            f"c/f(x) <= d/g(x) fails at x={float(x[np.argmin(rel)]):.6g} for f={f}, g={g}",
            margin=worst,
        )
    return worst


# ---------------------------------------------------------------------------
# Gram matrices
# ---------------------------------------------------------------------------


def _check_dims(D: DensityMatrix, A: Sequence) -> list:
    mats = [as_array(a) for a in A]
    if not mats:
        raise ValueError("need at least one observable")
    for a in mats:
        if a.shape != (D.dim, D.dim):
            raise DimMismatch(f"observable of shape {a.shape} for a state of dimension {D.dim}")
    return mats


def _form_gram(form, vectors) -> np.ndarray:
    m = len(vectors)
    G = np.empty((m, m), dtype=complex)
    for i in range(m):
        for j in range(i, m):
            G[i, j] = form(vectors[i], vectors[j])
            G[j, i] = np.conj(G[i, j])
    return real_symmetric_part(G)


def gram_qcov(g: StandardFunction, D: DensityMatrix, A: Sequence) -> np.ndarray:
    """``[qCov_D^g(A_i, A_j)]``."""
    mats = _check_dims(D, A)
    ctx = metric_context(D, g)
    return _form_gram(lambda a, b: qcov(ctx, a, b), mats)


def gram_metric_commutators(f: StandardFunction, c: float, D: DensityMatrix, A: Sequence, phase: bool = False) -> np.ndarray:
    """``[c gamma_D^f([D,A_i], [D,A_j])]``; with ``phase=True`` the commutators are ``i[D,A_i]``.

    Both variants agree because the weights depend on ``(lam_i - lam_j)^2`` only.
    """
    if c < 0:
        raise ValueError("c must be nonnegative")
    mats = _check_dims(D, A)
    ctx = metric_context(D, f)
    comm = commutator_i if phase else commutator
    tangents = [comm(D, a) for a in mats]
    return c * _form_gram(lambda x, y: gamma(ctx, x, y), tangents)


def robertson_matrix(D: DensityMatrix, A: Sequence) -> np.ndarray:
    """``[-(i/2) Tr D[A_i, A_j]]``, real antisymmetric for Hermitian ``A_i``."""
    mats = _check_dims(D, A)
    m = len(mats)
    R = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            v = (-0.5j * expectation(D, commutator(mats[i], mats[j]))).real
            R[i, j], R[j, i] = v, -v
    return R


def hs_gram_centered(D: DensityMatrix, A: Sequence) -> np.ndarray:
    """Hilbert-Schmidt Gram matrix of ``A_i - (Tr D A_i) I``."""
    mats = [center_observable(a, D) for a in _check_dims(D, A)]
    return _form_gram(hs_inner, mats)


def linearly_dependent(D: DensityMatrix, A: Sequence, rtol: float = RANK_RTOL) -> bool:
    return numerical_rank(hs_gram_centered(D, A), rtol) < len(A)


def classified_det(M: np.ndarray, reference: float, rtol: float = RANK_RTOL) -> float:
    """Determinant of a PSD Gram matrix, forced to ``0`` when it is numerically singular.

    An eigenvalue below ``rtol * reference`` counts as zero.
    """
    w = np.linalg.eigvalsh(M)
    if w.size and w[0] < rtol * reference:
        return 0.0
    return float(determinant(M))


def gram_pair(G: np.ndarray, H: np.ndarray) -> GramPair:
    """Package two Gram matrices with determinants classified against ``||G||``."""
    G = real_symmetric_part(G)
    H = real_symmetric_part(H)
    ref = max(float(np.max(np.abs(np.linalg.eigvalsh(G)))) if G.size else 0.0, 1e-300)
    return GramPair(G, H, classified_det(G, ref), classified_det(H, ref))


def check_gram_pair(G, H, tol: float = INEQUALITY_RTOL) -> InequalityVerdict:
    """``det G >= det H`` for PSD Gram matrices with ``G - H`` PSD."""
    pair = gram_pair(G, H)
    return make_verdict("gram", pair.detG, pair.detH, tol, m=pair.G.shape[0])


# ---------------------------------------------------------------------------
# theorems
# ---------------------------------------------------------------------------


def check_theorem1(f, g, c, D: DensityMatrix, A, tol: float = INEQUALITY_RTOL, seed=None) -> InequalityVerdict:
    """Scalar form: ``qCov_D^g(A,A) >= c gamma_D^f([D,A],[D,A])``.

    Raises:
        ConditionViolated: if ``g >= c (x-1)^2/f`` fails on the grid or the
            eigenvalue ratios of ``D``.
    """
    require_condition(f, g, c, D)
    (a,) = _check_dims(D, [A])
    lhs = qcov(metric_context(D, g), a, a)
    comm = commutator(D, a)
    rhs = c * gamma(metric_context(D, f), comm, comm) if c else 0.0
    return make_verdict(
        "theorem1", np.real(lhs), np.real(rhs), tol,
        f=f.spec, g=g.spec, c=float(c), dim=D.dim, m=1, seed=seed,
    )


def _determinant_verdict(theorem, G, H, D, A, tol, **meta) -> InequalityVerdict:
    pair = gram_pair(G, H)
    verdict = make_verdict(theorem, pair.detG, pair.detH, tol, dim=D.dim, m=len(A), **meta)
    if linearly_dependent(D, A):
        verdict.equality_case = True
        det_scale = max(float(np.prod(np.diag(pair.G))), 1e-30)
        both_zero = abs(pair.detG) <= RANK_RTOL * det_scale and abs(pair.detH) <= RANK_RTOL * det_scale
        verdict.notes = "centered observables linearly dependent"
        if not both_zero:
            verdict.holds = False
            verdict.notes += "; determinants not both zero"
    return verdict


def check_theorem3(f, g, c, D: DensityMatrix, A: Sequence, tol: float = INEQUALITY_RTOL, seed=None,
                   phase: bool = False, check_condition: bool = True) -> InequalityVerdict:
    """Determinant form: ``det[qCov^g(A_i,A_j)] >= det[c gamma^f([D,A_i],[D,A_j])]``.

    ``equality_case`` is set when the centered ``A_i`` are linearly
    dependent (rank test on their Hilbert-Schmidt Gram matrix); then both
    determinants must vanish for the verdict to hold.

    Raises:
        ConditionViolated: as in ``check_theorem1``.
    """
    if check_condition:
        require_condition(f, g, c, D)
    G = gram_qcov(g, D, A)
    H = gram_metric_commutators(f, c, D, A, phase=phase)
    return _determinant_verdict("theorem3", G, H, D, A, tol,
                                f=f.spec, g=g.spec, c=float(c), seed=seed)


def check_dynamical_ucp(f, D: DensityMatrix, A: Sequence, tol: float = INEQUALITY_RTOL, seed=None) -> InequalityVerdict:
    """``det[Cov_D(A_i,A_j)] >= det[(f(0)/2) gamma_D^f(i[D,A_i], i[D,A_j])]``."""
    c = at_zero(f) / 2
    with_i = gram_metric_commutators(f, c, D, A, phase=True)
    plain = gram_metric_commutators(f, c, D, A, phase=False)
    if np.max(np.abs(with_i - plain)) > 1e-12 * max(float(np.max(np.abs(plain))), 1e-300):
        raise RuntimeError("gamma of i[D,A] and [D,A] disagree")
    verdict = check_theorem3(f, SLD, c, D, A, tol, seed=seed, phase=True, check_condition=False)
    verdict.theorem = "dyn-ucp"
    return verdict


def check_theorem4(f, g, c, d, D: DensityMatrix, A: Sequence, tol: float = INEQUALITY_RTOL, seed=None) -> InequalityVerdict:
    """``det[c gamma^f([D,A_i],[D,A_j])] <= det[d gamma^g([D,A_i],[D,A_j])]`` when ``c/f <= d/g``.

    In the verdict ``lhs`` is the ``g`` side (the larger one) and ``rhs``
    the ``f`` side.

    Raises:
        ConditionViolated: if ``c/f <= d/g`` fails on the grid or the
            eigenvalue ratios of ``D``.
    """
    require_order(f, g, c, d, D)
    Hf = gram_metric_commutators(f, c, D, A)
    Hg = gram_metric_commutators(g, d, D, A)
    pair = gram_pair(Hg, Hf)
    return make_verdict("theorem4", pair.detG, pair.detH, tol, f=f.spec, g=g.spec,
                        c=float(c), d=float(d), dim=D.dim, m=len(A), seed=seed)


def check_tilde_identity(f, D: DensityMatrix, A, B, tol: float = 1e-8, seed=None) -> InequalityVerdict:
    """Skew information against ``Cov - qCov^{f~}``; ``margin`` is minus the residual."""
    res = tilde_identity_residual(D, f, A, B)
    return InequalityVerdict(
        "tilde-identity", res.skew, res.cov_gap, -res.residual,
        bool(res.residual <= tol * res.scale),
        f=f.spec, dim=D.dim, m=2, seed=seed, reference_scale=res.scale,
    )


def check_robertson(D: DensityMatrix, A: Sequence, tol: float = INEQUALITY_RTOL, seed=None) -> InequalityVerdict:
    """``det[Cov_D(A_i,A_j)] >= det[-(i/2) Tr D[A_i,A_j]]``."""
    G = gram_qcov(SLD, D, A)
    R = robertson_matrix(D, A)
    return make_verdict("robertson", determinant(G), determinant(R), tol,
                        g=SLD.spec, dim=D.dim, m=len(A), seed=seed)
