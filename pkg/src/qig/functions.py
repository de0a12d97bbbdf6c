"""Standard functions: operator monotone ``f`` on (0, inf) with ``f(1) = 1``
and ``f(t) = t f(1/t)``.

Each function is an immutable descriptor (``StandardFunction``) identified by
a tag and its parameters. The catalog holds

========  =====================================================  =========
tag       f(x)                                                   f(0)
========  =====================================================  =========
SLD       (1 + x) / 2                                            1/2
WY        ((1 + sqrt x) / 2)^2                                   1/4
RLD       2x / (1 + x)                                           0
KM        (x - 1) / log x                                        0
KOSAKI    b(1-b)(x-1)^2 / ((x^b - 1)(x^(1-b) - 1)),  0 < b < 1  b(1-b)
TILDE     ((x + 1) - (x - 1)^2 f0 / f(x)) / 2  for an inner f   see below
========  =====================================================  =========

The transform ``TILDE`` loses all precision in double arithmetic where
``(x + 1)`` and ``(x - 1)^2 f0 / f(x)`` nearly cancel (e.g. ``x -> 0`` when
``f0 > 0``), so it is evaluated with ``mpmath`` at extended precision and
rounded once.

Probe functions (``PROBE``) are non-standard test inputs such as ``x**2``;
they are never accepted by ``parse_function`` unless ``allow_probe=True``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np

from .errors import DomainError, ParseError
from .linalg import matrix_function

TAYLOR_RADIUS = 1e-8
MP_DPS = 40

BASE_TAGS = ("SLD", "WY", "RLD", "KM", "KOSAKI")


@dataclass(frozen=True)
class StandardFunction:
    tag: str
    beta: Optional[float] = None
    inner: Optional["StandardFunction"] = None
    probe: Optional[str] = field(default=None, compare=True)

    def __post_init__(self):
        if self.tag == "KOSAKI":
            if self.beta is None or not (0.0 < self.beta < 1.0):
                raise DomainError(f"Kosaki parameter must lie in (0, 1), got {self.beta}")
        elif self.tag == "TILDE":
            if self.inner is None:
                raise ValueError("TILDE needs an inner function")
        elif self.tag == "PROBE":
            if self.probe not in PROBES:
                raise ParseError(f"unknown probe {self.probe!r}")
        elif self.tag not in BASE_TAGS:
            raise ParseError(f"unknown function tag {self.tag!r}")

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def is_probe(self) -> bool:
        if self.tag == "PROBE":
            return True
        return self.inner is not None and self.inner.is_probe

    @property
    def spec(self) -> str:
        """Canonical spec string, parseable by ``parse_function``."""
        if self.tag == "KOSAKI":
            return f"kosaki:{self.beta:g}"
        if self.tag == "TILDE":
            return f"tilde({self.inner.spec})"
        if self.tag == "PROBE":
            return self.probe
        return self.tag.lower()

    def __str__(self):
        return self.spec


SLD = StandardFunction("SLD")
WY = StandardFunction("WY")
RLD = StandardFunction("RLD")
KM = StandardFunction("KM")


def kosaki(beta: float) -> StandardFunction:
    return StandardFunction("KOSAKI", beta=float(beta))


def tilde(f: StandardFunction) -> StandardFunction:
    """The transform ``f -> f~`` relating skew information to covariances."""
    return StandardFunction("TILDE", inner=f)


def probe(name: str) -> StandardFunction:
    return StandardFunction("PROBE", probe=name)


# name -> (float implementation, value at 0)
PROBES = {
    "xsq": (lambda x: x * x, 0.0),
}

CATALOG: tuple = (
    SLD,
    WY,
    RLD,
    KM,
    kosaki(0.3),
    kosaki(0.7),
    tilde(WY),
    tilde(kosaki(0.3)),
)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _kosaki_taylor(beta: float, u):
    # h_b(1+u) = 1 + u/2 + (1/4 - p2) u^2 + O(u^3)
    a1, b1 = (beta - 1) / 2, -beta / 2
    a2 = (beta - 1) * (beta - 2) / 6
    b2 = beta * (beta + 1) / 6
    p2 = a2 + b2 + a1 * b1
    return 1 + u / 2 + (0.25 - p2) * u * u


def _eval_float(f: StandardFunction, x: np.ndarray) -> np.ndarray:
    tag = f.tag
    if tag == "SLD":
        return (1 + x) / 2
    if tag == "WY":
        r = (1 + np.sqrt(x)) / 2
        return r * r
    if tag == "RLD":
        return 2 * x / (1 + x)
    if tag == "PROBE":
        return PROBES[f.probe][0](x)

    u = x - 1
    near = np.abs(u) < TAYLOR_RADIUS
    safe = np.where(near, 2.0, x)
    su = safe - 1
    if tag == "KM":
        direct = su / np.log(safe)
        series = 1 + u / 2 - u * u / 12
    else:  # KOSAKI
        b = f.beta
        lg = np.log(safe)
        direct = b * (1 - b) * su * su / (np.expm1(b * lg) * np.expm1((1 - b) * lg))
        series = _kosaki_taylor(b, u)
    return np.where(near, series, direct)


def _eval_mp(f: StandardFunction, x):
    """Evaluate at an ``mpmath.mpf`` point (extended precision path)."""
    tag = f.tag
    if tag == "SLD":
        return (1 + x) / 2
    if tag == "WY":
        return ((1 + mpmath.sqrt(x)) / 2) ** 2
    if tag == "RLD":
        return 2 * x / (1 + x)
    if tag == "KM":
        if x == 1:
            return mpmath.mpf(1)
        return (x - 1) / mpmath.log(x)
    if tag == "KOSAKI":
        if x == 1:
            return mpmath.mpf(1)
        b = mpmath.mpf(f.beta)
        lg = mpmath.log(x)
        return b * (1 - b) * (x - 1) ** 2 / (mpmath.expm1(b * lg) * mpmath.expm1((1 - b) * lg))
    if tag == "TILDE":
        f0 = _at_zero_mp(f.inner)
        if f0 == 0:
            return (x + 1) / 2
        return ((x + 1) - (x - 1) ** 2 * f0 / _eval_mp(f.inner, x)) / 2
    if tag == "PROBE":
        return PROBES[f.probe][0](x)
    raise ParseError(f"unknown function tag {tag!r}")


def _at_zero_mp(f: StandardFunction):
    if f.tag == "KOSAKI":
        b = mpmath.mpf(f.beta)
        return b * (1 - b)
    return mpmath.mpf(at_zero(f))


def _eval_tilde(f: StandardFunction, x: float) -> float:
    # the cancellation loses about |log10 x| digits
    with mpmath.workdps(MP_DPS + 2 * math.ceil(abs(math.log10(x)))):
        return float(_eval_mp(f, mpmath.mpf(x)))


def evaluate(f: StandardFunction, x):
    """Value of ``f`` at ``x > 0``; scalar in, float out; array in, array out.

    Raises:
        DomainError: if any ``x <= 0``.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("standard functions are defined on x > 0 only")
    if f.tag == "TILDE":
        flat = [_eval_tilde(f, float(v)) for v in arr.ravel()]
        out = np.array(flat, dtype=float).reshape(arr.shape)
    else:
        out = _eval_float(f, arr)
    return float(out) if out.ndim == 0 else out


def at_zero(f: StandardFunction) -> float:
    """``lim_{x -> 0+} f(x)``.

    For ``TILDE`` the limit of ``((x+1) - (x-1)^2 f0/f(x)) / 2`` is ``0``
    when the inner ``f0 > 0`` and ``1/2`` when ``f0 = 0``.
    """
    tag = f.tag
    if tag == "SLD":
        return 0.5
    if tag == "WY":
        return 0.25
    if tag in ("RLD", "KM"):
        return 0.0
    if tag == "KOSAKI":
        return f.beta * (1 - f.beta)
    if tag == "TILDE":
        return 0.0 if at_zero(f.inner) > 0 else 0.5
    if tag == "PROBE":
        return PROBES[f.probe][1]
    raise ParseError(f"unknown function tag {tag!r}")


def mean(f: StandardFunction, a, b):
    """Matrix mean ``M_f(a, b) = b f(a/b)``.

    Always evaluated as ``max * f(min/max)``, which equals ``b f(a/b)`` by the
    symmetry of ``f`` and makes the result exactly symmetric in ``(a, b)``.
    ``M_f(a, a) = a`` is returned without evaluating ``f``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(~(a > 0)) or np.any(~(b > 0)):
        raise DomainError("matrix means need positive arguments")
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    out = hi * np.asarray(evaluate(f, lo / hi))
    out = np.where(a == b, a, out)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# spec strings
# ---------------------------------------------------------------------------

_KOSAKI_RE = re.compile(r"^kosaki:([0-9eE.+\-]+)$")


def parse_function(spec: str, allow_probe: bool = False) -> StandardFunction:
    """Parse ``sld | wy | rld | km | kosaki:<beta> | tilde(<spec>)``.

    Raises:
        ParseError: on unknown names, bad parameters, or a probe when
            ``allow_probe`` is false.
    """
    s = spec.strip().lower()
    if s in ("sld", "wy", "rld", "km"):
        return StandardFunction(s.upper())
    m = _KOSAKI_RE.match(s)
    if m:
        try:
            beta = float(m.group(1))
        except ValueError:
            raise ParseError(f"bad Kosaki parameter in {spec!r}") from None
        if not (0.0 < beta < 1.0):
            raise ParseError(f"Kosaki parameter must lie in (0, 1): {spec!r}")
        return kosaki(beta)
    if s.startswith("tilde(") and s.endswith(")"):
        return tilde(parse_function(s[len("tilde("):-1], allow_probe=allow_probe))
    if s in PROBES:
        if not allow_probe:
            raise ParseError(f"{spec!r} is a probe, not a standard function")
        return probe(s)
    raise ParseError(f"unknown function spec {spec!r}")


def parse_function_list(specs: str, allow_probe: bool = False) -> list:
    """Split a comma list, respecting parentheses in ``tilde(...)``."""
    out, depth, cur = [], 0, ""
    for ch in specs:
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    out.append(cur)
    return [parse_function(s, allow_probe=allow_probe) for s in out if s.strip()]


# ---------------------------------------------------------------------------
# numerical checks
# ---------------------------------------------------------------------------


def default_grid(points: int = 200, lo: float = 1e-6, hi: float = 1e6) -> np.ndarray:
    """Log-spaced test points in ``[lo, hi]`` with ``1`` always included."""
    grid = np.union1d(np.logspace(math.log10(lo), math.log10(hi), points), [1.0])
    if np.any(grid <= 0):
        raise DomainError("grid points must be positive")
    return grid


@dataclass(frozen=True)
class StandardReport:
    function: str
    max_symmetry_defect: float
    monotone: bool
    normalized: bool
    positive: bool
    probe: bool = False

    @property
    def passes(self) -> bool:
        return (
            self.monotone
            and self.normalized
            and self.positive
            and self.max_symmetry_defect <= 1e-10
        )


def check_standard_grid(f: StandardFunction, grid=None) -> StandardReport:
    """Evaluate the three axioms of a standard function on ``grid``.

    The symmetry defect is ``max |f(x) - x f(1/x)| / f(x)``.
    """
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    x = np.sort(x)
    fx = np.asarray(evaluate(f, x))
    mirrored = x * np.asarray(evaluate(f, 1 / x))
    positive = bool(np.all(fx > 0))
    denom = np.where(np.abs(fx) > 0, np.abs(fx), 1.0)
    defect = float(np.max(np.abs(fx - mirrored) / denom))
    steps = np.diff(fx)
    monotone = bool(np.all(steps >= -1e-12 * np.abs(fx[1:])))
    normalized = abs(evaluate(f, 1.0) - 1.0) <= 1e-12
    return StandardReport(f.spec, defect, monotone, normalized, positive, f.is_probe)


@dataclass(frozen=True)
class MonotoneReport:
    function: str
    min_eigenvalue_of_gap: float
    trials: int
    seed: int


def _random_psd_2x2(rng: np.random.Generator) -> np.ndarray:
    G = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return G @ G.conj().T


def check_matrix_monotone_2x2(f: StandardFunction, trials: int, seed: int) -> MonotoneReport:
    """Spot-check operator monotonicity on random pairs ``A >= B > 0``.

    Reports the smallest eigenvalue of ``f(A) - f(B)`` seen over all trials;
    a negative value is a witness against operator monotonicity.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    fn = lambda w: np.asarray(evaluate(f, w))
    worst = math.inf
    for _ in range(trials):
        B = _random_psd_2x2(rng) + 1e-3 * np.eye(2)
        A = B + _random_psd_2x2(rng)
        gap = matrix_function(A, fn) - matrix_function(B, fn)
        worst = min(worst, float(np.linalg.eigvalsh((gap + gap.conj().T) / 2)[0]))
    return MonotoneReport(f.spec, worst, trials, seed)


def lemma4_margin(f: StandardFunction, grid=None) -> float:
    """``min_x f(x) - f(0)|x - 1|`` over the grid."""
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    return float(np.min(np.asarray(evaluate(f, x)) - at_zero(f) * np.abs(x - 1)))


def gibi_margin(f: StandardFunction, g: StandardFunction, grid=None) -> float:
    """``min_x f(x) g(x) - f(0) g(0) (x - 1)^2`` over the grid."""
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    fg = np.asarray(evaluate(f, x)) * np.asarray(evaluate(g, x))
    return float(np.min(fg - at_zero(f) * at_zero(g) * (x - 1) ** 2))

