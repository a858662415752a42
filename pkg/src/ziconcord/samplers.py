"""Seeded zero-inflated bivariate samples under Pi, M, W and Frechet couplings."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .margins import PairedSample, ZeroInflatedMargin, fit_margin

KINDS = ("Independence", "UpperFH", "LowerFH", "Frechet")


@dataclass(frozen=True)
class CouplingSpec:
    kind: str
    margin_x: ZeroInflatedMargin = field(default_factory=lambda: ZeroInflatedMargin.uniform(0.0))
    margin_y: ZeroInflatedMargin = field(default_factory=lambda: ZeroInflatedMargin.uniform(0.0))
    seed: object = 0  # int or tuple of ints, fed to SeedSequence
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown coupling kind {self.kind!r}")
        if self.kind == "Frechet" and not 0.0 <= self.alpha <= 1.0:
            raise InvalidInputError("Frechet alpha must lie in [0, 1]")

    @classmethod
    def frechet(cls, alpha, p1, p2, seed=0):
        return cls("Frechet", ZeroInflatedMargin.uniform(p1), ZeroInflatedMargin.uniform(p2), seed, float(alpha))

    @classmethod
    def uniform(cls, kind, p1, p2, seed=0):
        return cls(kind, ZeroInflatedMargin.uniform(p1), ZeroInflatedMargin.uniform(p2), seed)


def _rng(seed):
    return np.random.default_rng(np.random.SeedSequence(seed))


def sample(spec: CouplingSpec, n: int) -> PairedSample:
    """Inverse-CDF draw of n pairs; the same spec always gives the same sample.

    Draw order is u, then v, then the mixture coin, so Frechet(0) reproduces
    Independence and Frechet(1) reproduces UpperFH for the same seed.
    """
    if int(n) < 1:
        raise InvalidInputError("sample size must be at least 1")
    n = int(n)
    rng = _rng(spec.seed)
    u = rng.random(n)
    if spec.kind == "UpperFH":
        v = u
    elif spec.kind == "LowerFH":
        v = 1.0 - u
    else:
        v = rng.random(n)
        if spec.kind == "Frechet":
            coin = rng.random(n) < spec.alpha
            v = np.where(coin, u, v)
    return PairedSample(spec.margin_x.quantile(u), spec.margin_y.quantile(v))


def sample_partner(s: PairedSample, kind: str, m: int, seed=0) -> PairedSample:
    """m pairs from the requested coupling of the margins fitted to ``s``."""
    if kind not in ("UpperFH", "LowerFH", "Independence"):
        raise InvalidInputError(f"partner kind must be UpperFH, LowerFH or Independence, not {kind!r}")
    spec = CouplingSpec(kind, fit_margin(s.x), fit_margin(s.y), seed)
    return sample(spec, m)
