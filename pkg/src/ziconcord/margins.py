"""Zero-inflated margins, paired samples and the derived cell/region bookkeeping.

A zero-inflated margin puts mass ``p`` at zero and spreads ``1 - p`` over a
continuous law on (0, inf).  Margins are either analytic (a frozen scipy
distribution for the positive part) or empirical (sorted positive observations
plus the total sample size, so every CDF value is an exact ratio of counts).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DegenerateMarginError, InvalidInputError


def _as_coords(values, name="values"):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or infinite entries")
    if np.any(arr < 0):
        raise InvalidInputError(f"{name} contains negative entries")
    return arr


def _check_prob(u, name="u"):
    u = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(u)) or np.any(u < 0) or np.any(u > 1):
        raise InvalidInputError(f"{name} must lie in [0, 1]")
    return u


def _check_level(s):
    s = np.asarray(s, dtype=float)
    if np.any(np.isnan(s)) or np.any(s < 0):
        raise InvalidInputError("cdf argument must be a nonnegative number")
    return s


@dataclass(frozen=True, eq=False)
class ZeroInflatedMargin:
    """Point mass ``p`` at zero mixed with a continuous positive part.

    ``positive`` is either a frozen scipy distribution supported on (0, inf)
    or a sorted 1-d array of positive observations.  For empirical margins
    ``n_total`` is the size of the full sample (zeros included).
    """

    p: float
    positive: object = None
    n_total: int | None = None

    def __post_init__(self):
        if not (0.0 <= float(self.p) <= 1.0):
            raise InvalidInputError(f"zero mass p={self.p} outside [0, 1]")
        if self.is_empirical:
            pos = np.asarray(self.positive, dtype=float)
            if pos.size and (np.any(pos <= 0) or np.any(np.diff(pos) < 0)):
                raise InvalidInputError("empirical positive part must be sorted and > 0")
            object.__setattr__(self, "positive", pos)
            if self.n_total is not None and self.n_total - pos.size < 0:
                raise InvalidInputError("n_total smaller than the number of positive values")
        elif self.positive is None:
            object.__setattr__(self, "positive", stats.uniform(0.0, 1.0))

    @classmethod
    def uniform(cls, p):
        """Zero mass ``p`` with a uniform(0, 1) positive part."""
        return cls(p=float(p), positive=stats.uniform(0.0, 1.0))

    @property
    def is_empirical(self):
        return isinstance(self.positive, (np.ndarray, list, tuple))

    @property
    def n_positive(self):
        return int(np.asarray(self.positive).size) if self.is_empirical else None

    def _count_le(self, s, side):
        return np.searchsorted(self.positive, s, side=side)

    def _empirical_fraction(self, s, side):
        # F(s) for s > 0: exact count ratio when the full sample size is known
        k = self.n_positive
        c = np.searchsorted(self.positive, s, side=side)
        if self.n_total is not None:
            return (self.n_total - k + c) / self.n_total
        return self.p + (1.0 - self.p) * (c / k if k else 1.0)

    def cdf(self, s):
        s = _check_level(s)
        if self.is_empirical:
            out = np.where(s > 0, self._empirical_fraction(s, "right"), self.p)
        else:
            out = np.where(s > 0, self.p + (1.0 - self.p) * self.positive.cdf(s), self.p)
        return out if np.ndim(out) else float(out)

    def left_cdf(self, s):
        s = _check_level(s)
        if self.is_empirical:
            out = np.where(s > 0, self._empirical_fraction(s, "left"), 0.0)
        else:
            out = np.where(s > 0, self.p + (1.0 - self.p) * self.positive.cdf(s), 0.0)
        return out if np.ndim(out) else float(out)

    def quantile(self, u):
        """Left-continuous generalized inverse; 0 on ``u <= p``."""
        u = _check_prob(u)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        out = np.zeros_like(u)
        hit = u > self.p
        if self.is_empirical and self.n_total is not None:
            # rank in the full sample; rounding absorbs float noise in n*u
            n0 = self.n_total - self.n_positive
            j = np.ceil(np.round(self.n_total * u, 9)).astype(np.int64)
            hit = j > n0
        if not np.any(hit):
            return float(out[0]) if scalar else out
        if self.is_empirical:
            k = self.n_positive
            if k == 0:
                raise DegenerateMarginError("quantile above the zero mass of a margin with no positive part")
            if self.n_total is not None:
                idx = j[hit] - n0 - 1
            else:
                v = (u[hit] - self.p) / (1.0 - self.p)
                idx = np.ceil(np.round(k * v, 9)).astype(np.int64) - 1
            out[hit] = self.positive[np.clip(idx, 0, k - 1)]
        else:
            if self.p >= 1.0:
                raise DegenerateMarginError("quantile above the zero mass of a margin with no positive part")
            out[hit] = self.positive.ppf((u[hit] - self.p) / (1.0 - self.p))
        return float(out[0]) if scalar else out


def fit_margin(values) -> ZeroInflatedMargin:
    """Empirical margin: zero mass by counting, positive part by sorting."""
    arr = _as_coords(values)
    pos = np.sort(arr[arr > 0])
    n = arr.size
    return ZeroInflatedMargin(p=(n - pos.size) / n, positive=pos, n_total=n)


@dataclass(frozen=True, eq=False)
class PairedSample:
    """n observations of a nonnegative pair (x, y)."""

    x: np.ndarray
    y: np.ndarray
    tie_seed: int | None = None
    tie_counts: tuple = (0, 0)

    def __post_init__(self):
        x = _as_coords(self.x, "x").copy()
        y = _as_coords(self.y, "y").copy()
        if x.shape != y.shape:
            raise InvalidInputError("x and y must have the same length")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_pairs(cls, pairs):
        arr = np.asarray(pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
            raise InvalidInputError("pairs must be a nonempty sequence of (x, y)")
        return cls(arr[:, 0], arr[:, 1])

    @property
    def n(self):
        return int(self.x.size)

    def swap(self):
        return PairedSample(self.y, self.x, self.tie_seed, self.tie_counts[::-1])

    def transform(self, fx=None, fy=None):
        """Apply maps to the positive coordinates (zeros stay zero)."""
        x, y = self.x.copy(), self.y.copy()
        if fx is not None:
            x[x > 0] = fx(x[x > 0])
        if fy is not None:
            y[y > 0] = fy(y[y > 0])
        return PairedSample(x, y, self.tie_seed, self.tie_counts)


@dataclass(frozen=True)
class CellMasses:
    p00: float
    p01: float
    p10: float
    p11: float

    @property
    def p1(self):
        """Zero mass of x."""
        return self.p00 + self.p01

    @property
    def p2(self):
        return self.p00 + self.p10


def _cell_masks(s):
    x0, y0 = s.x == 0, s.y == 0
    return x0 & y0, x0 & ~y0, ~x0 & y0, ~x0 & ~y0


def cell_masses(s: PairedSample) -> CellMasses:
    n = s.n
    c00, c01, c10, c11 = (int(m.sum()) for m in _cell_masks(s))
    return CellMasses(c00 / n, c01 / n, c10 / n, c11 / n)


@dataclass(frozen=True, eq=False)
class RegionPartition:
    """Thresholds, region masks and their relative frequencies.

    Comonotone split of x > 0: region ``I`` is ``x <= threshold_x_I``, ``II`` the rest.
    Countermonotone splits: ``Ip``/``IIp`` on x at ``threshold_x_Iprime``,
    ``B``/``A`` on y at ``threshold_y_A`` (``A`` is the upper part).
    Masses prefixed ``p11_`` are restricted to the cell where both are positive,
    ``p10_`` to x > 0, y = 0.
    """

    threshold_x_I: float
    threshold_x_Iprime: float
    threshold_y_A: float
    p11_I: float
    p11_II: float
    p10_I: float
    p10_II: float
    p11_AIp: float
    p11_BIp: float
    p11_AIIp: float
    p11_BIIp: float
    p11_A: float
    p11_B: float
    p11_Ip: float
    p11_IIp: float
    masks: dict = field(repr=False, default_factory=dict)

    @property
    def empty(self):
        """Names of regions (within the both-positive cell) holding no observation."""
        return tuple(k for k, m in self.masks.items() if k.startswith("11") and not m.any())


def partition_regions(s: PairedSample, p1_hat, p2_hat) -> RegionPartition:
    """Split positive observations by the empirical full-sample quantile cuts."""
    p1_hat = float(_check_prob(p1_hat, "p1_hat"))
    p2_hat = float(_check_prob(p2_hat, "p2_hat"))
    fx, fy = fit_margin(s.x), fit_margin(s.y)

    def cut(m, u):
        # an all-zero margin has nothing above its zero mass
        return m.quantile(u) if m.n_positive else 0.0

    tx_i = cut(fx, p2_hat)
    tx_ip = cut(fx, 1.0 - p2_hat)
    ty_a = cut(fy, 1.0 - p1_hat)
    xpos, ypos = s.x > 0, s.y > 0
    c11, c10 = xpos & ypos, xpos & ~ypos
    reg_i, reg_ip, reg_b = s.x <= tx_i, s.x <= tx_ip, s.y <= ty_a
    masks = {
        "11I": c11 & reg_i, "11II": c11 & ~reg_i,
        "10I": c10 & reg_i, "10II": c10 & ~reg_i,
        "11AIp": c11 & ~reg_b & reg_ip, "11BIp": c11 & reg_b & reg_ip,
        "11AIIp": c11 & ~reg_b & ~reg_ip, "11BIIp": c11 & reg_b & ~reg_ip,
        "11A": c11 & ~reg_b, "11B": c11 & reg_b,
        "11Ip": c11 & reg_ip, "11IIp": c11 & ~reg_ip,
    }
    n = s.n
    fr = {k: int(m.sum()) / n for k, m in masks.items()}
    return RegionPartition(
        threshold_x_I=tx_i, threshold_x_Iprime=tx_ip, threshold_y_A=ty_a,
        p11_I=fr["11I"], p11_II=fr["11II"], p10_I=fr["10I"], p10_II=fr["10II"],
        p11_AIp=fr["11AIp"], p11_BIp=fr["11BIp"], p11_AIIp=fr["11AIIp"], p11_BIIp=fr["11BIIp"],
        p11_A=fr["11A"], p11_B=fr["11B"], p11_Ip=fr["11Ip"], p11_IIp=fr["11IIp"],
        masks=masks,
    )
