"""Exact bounds and reference concordance values for zero-inflated margins.

All functions take the zero masses ``p1`` (of x) and ``p2`` (of y).  Every
expression is written in terms of ``max``/``min`` of the pair or in commuting
products so results are bit-identical under swapping the arguments.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

from .errors import InvalidInputError


def _probs(*vals):
    out = []
    for v in vals:
        try:
            f = float(v)
        except (TypeError, ValueError):
            raise InvalidInputError(f"not a probability: {v!r}") from None
        if not 0.0 <= f <= 1.0:
            raise InvalidInputError(f"probability {f} outside [0, 1]")
        out.append(f)
    return out


@dataclass(frozen=True)
class BoundsSet:
    gamma_min: float
    gamma_max: float
    phi_min: float
    phi_max: float
    rho_min: float
    rho_max: float

    def as_dict(self):
        return asdict(self)

    def interval(self, measure):
        return getattr(self, f"{measure}_min"), getattr(self, f"{measure}_max")


@dataclass(frozen=True)
class QConstants:
    q_mm: float
    q_ww: float
    q_wm: float
    q_pim: float
    q_piw: float


@dataclass(frozen=True)
class MeasureValues:
    gamma: float
    phi: float
    rho: float


def _degenerate(p1, p2):
    return p1 == 1.0 or p2 == 1.0


# Closed forms per branch of p1 + p2 <= 1 ("low") and > 1 ("high").
# Both are defined everywhere so the boundary can be checked from either side.

def rho_branches(p1, p2):
    m, l = max(p1, p2), min(p1, p2)
    low = l**3 + m**3 - 1.0
    high = -3.0 * ((1.0 - p1) * (1.0 - p2))
    return low, high


def gamma_branches(p1, p2):
    """((min_low, max_low), (min_high, max_high))."""
    m, l = max(p1, p2), min(p1, p2)
    low = ((1.0 - l - m) ** 2 - 2.0 * ((1.0 - p1) * (1.0 - p2)) - l**3 / 3.0,
           1.0 - m**2 - l**3 / 3.0)
    high = ((l + m + l - 2.0) * (1.0 - m) - (1.0 - m**3) / 3.0,
            2.0 / 3.0 + m * (3.0 - 6.0 * m + m**2) / 3.0)
    return low, high


def rho_bounds(p1, p2):
    """Attainable (min, max) of Spearman's rho."""
    p1, p2 = _probs(p1, p2)
    if _degenerate(p1, p2):
        return 0.0, 0.0
    low, high = rho_branches(p1, p2)
    return (low if p1 + p2 <= 1.0 else high), 1.0 - max(p1, p2) ** 3


def gamma_bounds(p1, p2):
    """Attainable (min, max) of Gini's gamma."""
    p1, p2 = _probs(p1, p2)
    if _degenerate(p1, p2):
        return 0.0, 0.0
    low, high = gamma_branches(p1, p2)
    return low if p1 + p2 <= 1.0 else high


def phi_bounds(p1, p2):
    """Attainable (min, max) of Spearman's footrule."""
    p1, p2 = _probs(p1, p2)
    if _degenerate(p1, p2):
        return 0.0, 0.0
    m, l = max(p1, p2), min(p1, p2)
    phi_max = 1.0 - 1.5 * m**2 + 0.5 * m**3
    phi_min = 1.5 * max(0.0, l + m - 1.0) * (1.0 - m) - 0.5 * (1.0 - m**3)
    return phi_min, phi_max


def bounds(p1, p2) -> BoundsSet:
    g = gamma_bounds(p1, p2)
    f = phi_bounds(p1, p2)
    r = rho_bounds(p1, p2)
    return BoundsSet(g[0], g[1], f[0], f[1], r[0], r[1])


def q_constants(p1, p2) -> QConstants:
    """Concordance values between the reference couplings.

    ``q_mm`` = Q(M, M), ``q_ww`` = Q(W, W), ``q_wm`` = Q(W, M),
    ``q_pim`` = Q(Pi, M), ``q_piw`` = Q(Pi, W).
    """
    p1, p2 = _probs(p1, p2)
    m, l = max(p1, p2), min(p1, p2)
    q_mm = 1.0 - m**2
    q_ww = max(0.0, 1.0 - l - m) ** 2 - 2.0 * ((1.0 - p1) * (1.0 - p2))
    q_wm = 0.0 if l + m <= 1.0 else (l + m - 1.0) * (1.0 - m)
    # the Pi constants keep their closed forms even at p = 1 (both are 0 there)
    r_max = 1.0 - m**3
    low, high = rho_branches(p1, p2)
    r_min = low if l + m <= 1.0 else high
    return QConstants(q_mm, q_ww, q_wm, r_max / 3.0, r_min / 3.0)


def frechet_truth(alpha, p1, p2) -> MeasureValues:
    """True measures when the copula is (1 - alpha) * Pi + alpha * M."""
    (alpha,) = _probs(alpha)
    b = bounds(p1, p2)
    return MeasureValues(alpha * b.gamma_max, alpha * b.phi_max, alpha * b.rho_max)
