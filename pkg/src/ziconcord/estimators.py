"""Plug-in estimators of Q(J, M), Q(J, W), Spearman's rho, Gini's gamma and the footrule.

Every conditional average runs over an observed subset.  When the subset is
empty its mass coefficient is zero too, so the term is taken as 0.  Sums are
written as commuting pairs so that swapping x and y gives bit-identical
results.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .closedforms import BoundsSet, bounds, q_constants
from .concordance import _ecdf_at, cdf_values, clip_range, estimate_pis
from .margins import CellMasses, PairedSample, cell_masses, partition_regions

CONVENTIONS = ("right", "mid")


def _zero_masses(s):
    cm = cell_masses(s)
    return cm, cm.p1, cm.p2


def _degenerate(p1, p2):
    return p1 == 1.0 or p2 == 1.0


def _or0(v):
    return 0.0 if v is None else v


def _q_jm_parts(s: PairedSample, convention="right"):
    cm, p1, p2 = _zero_masses(s)
    if _degenerate(p1, p2):
        return 0.0, []
    if p1 > p2:
        # Q(J, M) is unchanged by swapping the coordinates
        s = s.swap()
        cm, p1, p2 = _zero_masses(s)
    reg = partition_regions(s, p1, p2)
    fx = cdf_values(s.x, convention)
    gy = cdf_values(s.y, convention)
    flags = []

    sel = reg.masks["11II"]
    if sel.any():
        c_m = float(np.mean(np.minimum(clip_range(fx[sel], p2, 1.0), clip_range(gy[sel], p2, 1.0))))
    else:
        c_m = 0.0
    pi4 = estimate_pis(s, "M", p1, p2, mask=reg.masks["11I"], convention=convention).pi4
    if p2 > p1 and pi4 is None:
        flags.append("empty both-positive region below the x cut despite p2_hat > p1_hat")

    q = ((1.0 - p2) * (reg.p11_II * (4.0 * c_m - 1.0) + reg.p10_I)
         + (p2 - p1) * (reg.p11_I * (2.0 * _or0(pi4) - 1.0) + reg.p11_II)
         + cm.p00 * (1.0 - p2) + cm.p11 * p1 - cm.p01 * (p2 - p1))
    return float(q), flags


def estimate_q_jm(s: PairedSample, convention="right") -> float:
    """Concordance of the sample's law with the comonotone law of its margins."""
    return _q_jm_parts(s, convention)[0]


def estimate_q_jw(s: PairedSample, convention="right") -> float:
    """Concordance of the sample's law with the countermonotone law of its margins."""
    cm, p1, p2 = _zero_masses(s)
    if _degenerate(p1, p2):
        return 0.0
    if p1 > p2:
        s = s.swap()
        cm, p1, p2 = _zero_masses(s)
    fx = cdf_values(s.x, convention)
    gy = cdf_values(s.y, convention)
    xpos, ypos = s.x > 0, s.y > 0

    if p1 + p2 > 1.0:
        pis = estimate_pis(s, "W", p1, p2, convention=convention)
        q = ((cm.p11 * (1.0 - p2) * (2.0 * _or0(pis.pi3) - 1.0)
              + cm.p11 * (1.0 - p1) * (2.0 * _or0(pis.pi4) - 1.0))
             + cm.p11 * ((p1 + p2) - 1.0)
             - (cm.p01 * (1.0 - p1) + cm.p10 * (1.0 - p2)))
        return float(q)

    reg = partition_regions(s, p1, p2)
    w = 1.0 - (p1 + p2)
    m = reg.masks
    c_w = 0.0
    pi1 = pi2 = None
    if w > 0.0:
        sel = m["11BIp"]
        if sel.any():
            f, g = fx[sel], gy[sel]
            # length of (max(1-G, p1), min(F, 1-p2)) written symmetrically in (F, p1) <-> (G, p2)
            span = np.minimum(np.minimum((f + g) - 1.0, w), np.minimum(f - p1, g - p2))
            c_w = float(np.mean(np.maximum(span, 0.0))) / w
        pi1 = estimate_pis(s, "W", p1, p2, mask=m["11AIp"], convention=convention).pi1
        pi2 = estimate_pis(s, "W", p1, p2, mask=m["11BIIp"], convention=convention).pi2
    pi3 = estimate_pis(s, "W", p1, p2, mask=m["11A"], convention=convention).pi3
    pi4 = estimate_pis(s, "W", p1, p2, mask=m["11IIp"], convention=convention).pi4

    q = (w * ((4.0 * reg.p11_BIp * c_w - 1.0 + 4.0 * reg.p11_AIIp)
              + (4.0 * reg.p11_AIp * _or0(pi1) + 4.0 * reg.p11_BIIp * _or0(pi2)))
         + (p1 * (2.0 * reg.p11_A * _or0(pi3) - (1.0 - p1))
            + p2 * (2.0 * reg.p11_IIp * _or0(pi4) - (1.0 - p2))))
    return float(q)


def classical_spearman(x, y):
    """Pearson correlation of average ranks; 0 when undefined."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    if x.size < 2:
        return 0.0
    a = stats.rankdata(x)
    b = stats.rankdata(y)
    a = a - a.mean()
    b = b - b.mean()
    den = np.sqrt(np.sum(a * a) * np.sum(b * b))
    if den == 0.0:
        return 0.0
    return float(np.sum(a * b) / den)


def estimate_rho(s: PairedSample, convention="right") -> float:
    """Spearman's rho for zero-inflated pairs from cell masses and within-cell ranks."""
    cm = cell_masses(s)
    if _degenerate(cm.p1, cm.p2):
        return 0.0
    xpos, ypos = s.x > 0, s.y > 0
    c11 = xpos & ypos
    x11, y11 = s.x[c11], s.y[c11]
    x10 = s.x[xpos & ~ypos]
    y01 = s.y[~xpos & ypos]
    if not x11.size:
        return float(3.0 * (cm.p11 * cm.p00 - cm.p10 * cm.p01))

    f10 = 2.0 * _ecdf_at(x10, x11, convention) - 1.0
    g01 = 2.0 * _ecdf_at(y01, y11, convention) - 1.0
    f11 = 2.0 * _ecdf_at(x11, x11, convention) - 1.0
    g11 = 2.0 * _ecdf_at(y11, y11, convention) - 1.0
    # empty reference cells carry zero mass; their factors are set to 0
    q10 = float(np.mean(f10 * g11)) if x10.size else 0.0
    q01 = float(np.mean(f11 * g01)) if y01.size else 0.0
    q00 = float(np.mean(f10 * g01)) if (x10.size and y01.size) else 0.0
    pi4 = float(np.mean(_ecdf_at(x10, x11, convention))) if x10.size else 0.0
    pi3 = float(np.mean(_ecdf_at(y01, y11, convention))) if y01.size else 0.0

    p11, p10, p01, p00 = cm.p11, cm.p10, cm.p01, cm.p00
    rho = (p11 * p11 * p11 * classical_spearman(x11, y11)
           + 3.0 * p11 * p11 * (p10 * q10 + p01 * q01)
           + 3.0 * p11 * (p10 * p01) * q00
           + 3.0 * (p11 * p00 - p10 * p01)
           + 3.0 * p11 * (p10 * (2.0 * pi4 - 1.0) + p01 * (2.0 * pi3 - 1.0)))
    return float(rho)


@dataclass(frozen=True)
class ConcordanceReport:
    gamma_hat: float
    phi_hat: float
    rho_hat: float
    q_jm_hat: float
    q_jw_hat: float
    bounds: BoundsSet
    cell_masses: CellMasses
    p1_hat: float
    p2_hat: float
    n: int
    seed: int | None = None
    flags: tuple = field(default_factory=tuple)

    def as_dict(self):
        d = asdict(self)
        d["flags"] = list(self.flags)
        return d


def estimate_bounds(s: PairedSample) -> BoundsSet:
    cm = cell_masses(s)
    return bounds(cm.p1, cm.p2)


def estimate_measures(s: PairedSample, convention="right") -> ConcordanceReport:
    """Gamma, footrule and rho estimates with plug-in bounds and diagnostics."""
    cm = cell_masses(s)
    p1, p2 = cm.p1, cm.p2
    b = bounds(p1, p2)
    flags = []
    if _degenerate(p1, p2):
        q_jm = q_jw = gamma = phi = rho = 0.0
    else:
        q_jm, flags = _q_jm_parts(s, convention)
        q_jw = estimate_q_jw(s, convention)
        rho = estimate_rho(s, convention)
        qc = q_constants(p1, p2)
        gamma = (q_jm + q_jw) - (qc.q_pim + qc.q_piw)
        phi = 1.5 * (q_jm - qc.q_pim)
        for name, est in (("gamma", gamma), ("phi", phi), ("rho", rho)):
            lo, hi = b.interval(name)
            if not lo <= est <= hi:
                flags.append(f"{name} estimate outside its plug-in bounds")
    return ConcordanceReport(
        gamma_hat=float(gamma), phi_hat=float(phi), rho_hat=float(rho),
        q_jm_hat=float(q_jm), q_jw_hat=float(q_jw), bounds=b, cell_masses=cm,
        p1_hat=p1, p2_hat=p2, n=s.n, seed=s.tie_seed, flags=tuple(flags),
    )
