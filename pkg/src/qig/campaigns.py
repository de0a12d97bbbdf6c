"""Seeded verification campaigns shared by the CLI and the acceptance tests.

Trial ``t`` of a campaign draws everything from its own PCG64 stream
seeded with ``trial_seed(seed, t)``, and cycles through the configured
dimensions and functions by trial index, so output depends only on the
configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

import numpy as np

from .channels import (
    check_cov_monotonicity,
    check_fisher_monotonicity,
    identity_channel,
    partial_trace_channel,
    pinching_channel,
    random_channel,
)
from .errors import ConditionViolated
from .functions import SLD, WY, StandardFunction, at_zero
from .inequalities import (
    check_dynamical_ucp,
    check_robertson,
    check_theorem1,
    check_theorem3,
    check_theorem4,
    check_tilde_identity,
)
from .states import make_rng, random_density, random_observable, random_observable_tuple, trial_seed

COMMANDS = ("dyn-ucp", "theorem1", "theorem3", "theorem4", "tilde-identity", "robertson", "monotone")
CHANNEL_KINDS = ("random", "pinching", "partial-trace", "identity")

CRule = Union[float, str]


@dataclass
class CampaignConfig:
    command: str
    dims: list = field(default_factory=lambda: [3])
    m: int = 2
    functions: list = field(default_factory=lambda: [WY])
    g: StandardFunction = SLD
    c: CRule = "auto"
    d: CRule = 1.0
    samples: int = 100
    seed: int = 0
    tol: Optional[float] = None
    channel_kind: str = "random"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.dims or min(self.dims) < 2:
            raise ValueError("dimensions must be >= 2")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.channel_kind not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind {self.channel_kind!r}")


def resolve_c(rule: CRule, f: StandardFunction, g: StandardFunction) -> float:
    """Numeric ``c`` from a rule.

    ``"f0/2"`` gives ``f(0)/2``, ``"f0g0"`` gives ``f(0) g(0)``, ``"auto"``
    picks ``f0/2`` when ``g`` is SLD and ``f0g0`` otherwise.
    """
    if isinstance(rule, (int, float)):
        return float(rule)
    if rule == "auto":
        rule = "f0/2" if g == SLD else "f0g0"
    if rule == "f0/2":
        return at_zero(f) / 2
    if rule == "f0g0":
        return at_zero(f) * at_zero(g)
    raise ValueError(f"unknown constant rule {rule!r}")


def _make_channel(kind: str, n: int, rng: np.random.Generator):
    if kind == "identity":
        return identity_channel(n), n
    if kind == "pinching":
        return pinching_channel(n), n
    if kind == "partial-trace":
        # C^n (x) C^2 -> C^n
        return partial_trace_channel((n, 2), keep=0), 2 * n
    k = int(rng.integers(2, n + 2))
    e = max(math.ceil(n / k), int(rng.integers(1, 4)))
    return random_channel(n, k, e, rng), n


def run_trial(cfg: CampaignConfig, t: int) -> list:
    """Verdicts of one trial (two for ``monotone``, one otherwise)."""
    s = trial_seed(cfg.seed, t)
    rng = make_rng(s)
    n = cfg.dims[t % len(cfg.dims)]
    f = cfg.functions[t % len(cfg.functions)]
    tol = {} if cfg.tol is None else {"tol": cfg.tol}
    cmd = cfg.command

    if cmd == "monotone":
        ch, n_in = _make_channel(cfg.channel_kind, n, rng)
        D = random_density(n_in, rng)
        A = random_observable(n_in, rng)
        A = A - np.trace(A).real / n_in * np.eye(n_in)
        B = random_observable(ch.out_dim, rng)
        return [
            check_fisher_monotonicity(f, ch, D, A, seed=s, **tol),
            check_cov_monotonicity(f, ch, D, B, seed=s, **tol),
        ]

    D = random_density(n, rng)
    if cmd == "tilde-identity":
        A, B = random_observable_tuple(n, 2, rng)
        return [check_tilde_identity(f, D, A, B, seed=s, **tol)]
    if cmd == "theorem1":
        A = random_observable(n, rng)
        return [check_theorem1(f, cfg.g, resolve_c(cfg.c, f, cfg.g), D, A, seed=s, **tol)]

    A = random_observable_tuple(n, cfg.m, rng)
    if cmd == "dyn-ucp":
        return [check_dynamical_ucp(f, D, A, seed=s, **tol)]
    if cmd == "theorem3":
        return [check_theorem3(f, cfg.g, resolve_c(cfg.c, f, cfg.g), D, A, seed=s, **tol)]
    if cmd == "theorem4":
        c = resolve_c(cfg.c if cfg.c != "auto" else 1.0, f, cfg.g)
        d = resolve_c(cfg.d, f, cfg.g)
        return [check_theorem4(f, cfg.g, c, d, D, A, seed=s, **tol)]
    return [check_robertson(D, A, seed=s, **tol)]


@dataclass
class CampaignSummary:
    command: str
    trials: int
    verdicts: int = 0
    violations: int = 0
    condition_violated: int = 0
    equality_cases: int = 0
    min_margin: float = math.inf
    min_relative_margin: float = math.inf

    def to_json(self) -> dict:
        out = {"summary": True}
        for k, v in self.__dict__.items():
            out[k] = None if isinstance(v, float) and math.isinf(v) else v
        return out


def iter_campaign(cfg: CampaignConfig) -> Iterator[dict]:
    """Yield one JSON-ready record per verdict (or per skipped trial) in trial order."""
    for t in range(cfg.samples):
        try:
            verdicts = run_trial(cfg, t)
        except ConditionViolated as exc:
            yield {"theorem": cfg.command, "seed": trial_seed(cfg.seed, t),
                   "condition_violated": True, "detail": str(exc)}
            continue
        for v in verdicts:
            yield v


def run_campaign(cfg: CampaignConfig, sink=None) -> CampaignSummary:
    """Run all trials, passing each verdict or skip record to ``sink`` if given."""
    summary = CampaignSummary(cfg.command, cfg.samples)
    for item in iter_campaign(cfg):
        if sink is not None:
            sink(item)
        if isinstance(item, dict):
            summary.condition_violated += 1
            continue
        summary.verdicts += 1
        summary.violations += not item.holds
        summary.equality_cases += item.equality_case
        summary.min_margin = min(summary.min_margin, item.margin)
        summary.min_relative_margin = min(summary.min_relative_margin, item.margin / item.scale)
    return summary
