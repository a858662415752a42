"""Concordance function Q between two bivariate laws, and its ingredients.

``brute_force_Q`` is the direct double-sum oracle.  ``q_via_cdf_expectation``
evaluates Q through the reference copula evaluated at the margins (right and
left limits), either averaged over a sample or integrated exactly for the
three reference couplings.  ``estimate_pis`` gives the conditional exceedance
probabilities used by the plug-in estimators.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import InvalidInputError
from .margins import PairedSample, fit_margin


@numba.njit(cache=True)
def _sign_means(ax, ay, bx, by):
    # for each partner point j: mean_i sign((ax_i - bx_j)(ay_i - by_j))
    n, m = ax.size, bx.size
    out = np.empty(m)
    for j in range(m):
        acc = 0
        for i in range(n):
            dx = ax[i] - bx[j]
            dy = ay[i] - by[j]
            if dx == 0.0 or dy == 0.0:
                continue
            if (dx > 0.0) == (dy > 0.0):
                acc += 1
            else:
                acc -= 1
        out[j] = acc / n
    return out


def _partner_terms(a: PairedSample, b: PairedSample):
    pts = np.column_stack([b.x, b.y])
    uniq, inverse = np.unique(pts, axis=0, return_inverse=True)
    h = _sign_means(np.ascontiguousarray(a.x), np.ascontiguousarray(a.y),
                    np.ascontiguousarray(uniq[:, 0]), np.ascontiguousarray(uniq[:, 1]))
    return h[inverse.ravel()]


def brute_force_Q(a: PairedSample, b: PairedSample) -> float:
    """(1 / (n_a n_b)) * sum over all cross pairs of sign((x - x')(y - y')).

    Integer counts per partner point keep the result independent of how the
    work is split.
    """
    return float(np.mean(_partner_terms(a, b)))


def brute_force_Q_se(a: PairedSample, b: PairedSample):
    """Brute-force Q plus its Monte Carlo standard error over partner points.

    The error treats ``a`` as fixed and ``b`` as an i.i.d. draw, which is the
    relevant noise when ``b`` is a sampled partner of ``a``.
    """
    h = _partner_terms(a, b)
    se = float(np.std(h, ddof=1) / np.sqrt(h.size)) if h.size > 1 else float("nan")
    return float(np.mean(h)), se


# ---------------------------------------------------------------------------
# Q through the copula of the reference law

def _copula(tag):
    if callable(tag):
        return tag
    if tag == "M":
        return np.minimum
    if tag == "W":
        return lambda u, v: np.maximum(u + v - 1.0, 0.0)
    if tag == "Pi":
        return lambda u, v: u * v
    raise InvalidInputError(f"unknown reference copula {tag!r}")


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _integrate(f, breaks):
    # Gauss-Legendre on each piece; exact for piecewise polynomials of degree <= 15
    b = np.unique(np.clip(np.asarray(breaks, dtype=float), 0.0, 1.0))
    lo, hi = b[:-1], b[1:]
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    nodes = mid[:, None] + half[:, None] * _GL_NODES
    vals = f(nodes)
    return float(np.sum(half[:, None] * _GL_WEIGHTS * vals))


def _copula_scale(p):
    # F(Q(u)) and F(Q(u)-) for a zero-inflated margin with continuous positive part
    right = lambda u: np.where(u <= p, p, u)
    left = lambda u: np.where(u <= p, 0.0, u)
    return right, left


def _four_terms(cop, fx, fy):
    (fr, fl), (gr, gl) = fx, fy
    return lambda u, v: cop(fr(u), gr(v)) + cop(fr(u), gl(v)) + cop(fl(u), gr(v)) + cop(fl(u), gl(v))


def _analytic_expectation(cop, kind, p1, p2):
    fx, fy = _copula_scale(p1), _copula_scale(p2)
    terms = _four_terms(cop, fx, fy)
    breaks = [0.0, 1.0, p1, p2, 1.0 - p1, 1.0 - p2, 0.5]
    if kind == "UpperFH":
        return _integrate(lambda u: terms(u, u), breaks) - 1.0
    if kind == "LowerFH":
        return _integrate(lambda u: terms(u, 1.0 - u), breaks) - 1.0
    if kind == "Independence":
        def inner(us):
            out = np.empty_like(us)
            for idx, u in np.ndenumerate(us):
                kinks = [fx[0](u), fx[1](u)]
                extra = breaks + kinks + [1.0 - k for k in kinks]
                out[idx] = _integrate(lambda v: terms(u, v), extra)
            return out
        return _integrate(inner, breaks) - 1.0
    raise InvalidInputError(f"unknown coupling kind {kind!r}")


def q_via_cdf_expectation(jstar, source, convention="right") -> float:
    """Q(J, J*) as E[C*(F, G)] summed over right/left limits, minus 1.

    ``jstar`` is "M", "W", "Pi" or a callable copula ``C(u, v)`` acting on arrays.
    ``source`` is either a PairedSample (the expectation becomes a sample
    average under the fitted margins) or a ``CouplingSpec`` whose zero masses
    and coupling kind define J analytically.  The analytic path integrates
    piecewise with breakpoints at every kink of the reference copulas, so it is
    exact for M, W and Pi; smooth user copulas are integrated to quadrature
    accuracy.
    """
    cop = _copula(jstar)
    if isinstance(source, PairedSample):
        mx, my = fit_margin(source.x), fit_margin(source.y)
        fr, fl = mx.cdf(source.x), mx.left_cdf(source.x)
        gr, gl = my.cdf(source.y), my.left_cdf(source.y)
        try:
            vals = cop(fr, gr) + cop(fr, gl) + cop(fl, gr) + cop(fl, gl)
        except Exception as exc:
            raise InvalidInputError(f"reference copula not evaluable: {exc}") from exc
        return float(np.mean(vals) - 1.0)
    kind = getattr(source, "kind", None)
    if kind is None:
        raise InvalidInputError("source must be a PairedSample or a CouplingSpec")
    p1, p2 = float(source.margin_x.p), float(source.margin_y.p)
    if kind == "Frechet":
        a = float(source.alpha)
        # Q is linear in the first law
        return ((1.0 - a) * _analytic_expectation(cop, "Independence", p1, p2)
                + a * _analytic_expectation(cop, "UpperFH", p1, p2))
    return _analytic_expectation(cop, kind, p1, p2)


# ---------------------------------------------------------------------------
# conditional exceedance probabilities

@dataclass(frozen=True)
class ConditionalPi:
    """Conditional exceedance probabilities; ``None`` where the conditioning set is empty.

    pi1/pi2: x (y) of a both-positive observation above the reference's
    both-positive x (y).  pi3: y of a both-positive observation above the
    reference y given reference x = 0.  pi4: x above the reference x given
    reference y = 0.  pi5/pi6: the reference's both-positive x (y) above an
    observation with y = 0 (x = 0).
    """

    pi1: float | None = None
    pi2: float | None = None
    pi3: float | None = None
    pi4: float | None = None
    pi5: float | None = None
    pi6: float | None = None


def reference_ranges(target, p1, p2):
    """Ranges (lo, hi] of F or G of the reference coordinate under a coupling.

    Keys: "x11", "y11" (reference both positive), "x10" (reference y = 0),
    "y01" (reference x = 0).  Missing keys mean the reference cell has no mass.
    """
    m = max(p1, p2)
    if target == "M":
        out = {"x11": (m, 1.0), "y11": (m, 1.0)}
        if p1 < p2:
            out["x10"] = (p1, p2)
        if p2 < p1:
            out["y01"] = (p2, p1)
    elif target == "W":
        if p1 + p2 <= 1.0:
            out = {"x11": (p1, 1.0 - p2), "y11": (p2, 1.0 - p1),
                   "x10": (1.0 - p2, 1.0), "y01": (1.0 - p1, 1.0)}
        else:
            out = {"x10": (p1, 1.0), "y01": (p2, 1.0)}
    elif target == "Pi":
        out = {"x11": (p1, 1.0), "y11": (p2, 1.0), "x10": (p1, 1.0), "y01": (p2, 1.0)}
    else:
        raise InvalidInputError(f"unknown coupling tag {target!r}")
    return {k: v for k, v in out.items() if v[1] > v[0] and (v[1] - v[0]) > 0}


def cdf_values(values, convention="right"):
    """Fitted CDF of each observation under the chosen ECDF convention."""
    m = fit_margin(values)
    if convention == "right":
        return m.cdf(values)
    if convention == "mid":
        return 0.5 * (m.cdf(values) + m.left_cdf(values))
    raise InvalidInputError(f"unknown cdf convention {convention!r}")


def clip_range(f, lo, hi):
    return np.clip((f - lo) / (hi - lo), 0.0, 1.0)


def _ecdf_at(reference, at, convention="right"):
    ref = np.sort(reference)
    if ref.size == 0:
        return np.zeros_like(at)
    r = np.searchsorted(ref, at, side="right")
    if convention == "mid":
        r = 0.5 * (r + np.searchsorted(ref, at, side="left"))
    return r / ref.size


def _mean_or_none(v):
    return float(np.mean(v)) if v.size else None


def estimate_pis(s: PairedSample, target, p1_hat, p2_hat, mask=None,
                 convention="right") -> ConditionalPi:
    """Average exceedance probabilities over the relevant observed cells.

    For tags M, W and Pi the reference coordinate's F (or G) value is uniform on
    a known range and each observation contributes clip((F(obs) - lo)/(hi - lo)).
    For tag "Data" the reference is an independent copy of the sample itself and
    the empirical conditional CDFs are used.  ``mask`` optionally restricts the
    observations (for instance to one region of the x axis).
    """
    p1_hat, p2_hat = float(p1_hat), float(p2_hat)
    keep = np.ones(s.n, bool) if mask is None else np.asarray(mask, bool)
    xpos, ypos = s.x > 0, s.y > 0
    c11, c10, c01 = xpos & ypos & keep, xpos & ~ypos & keep, ~xpos & ypos & keep
    fx = cdf_values(s.x, convention)
    gy = cdf_values(s.y, convention)

    if target == "Data":
        full11 = xpos & ypos
        x11, y11 = s.x[full11], s.y[full11]
        x10, y01 = s.x[xpos & ~ypos], s.y[~xpos & ypos]
        def ex(obs, ref):
            return _mean_or_none(_ecdf_at(ref, obs, convention)) if ref.size else None
        return ConditionalPi(
            pi1=ex(s.x[c11], x11), pi2=ex(s.y[c11], y11),
            pi3=ex(s.y[c11], y01), pi4=ex(s.x[c11], x10),
            pi5=None if not x11.size else _mean_or_none(1.0 - _ecdf_at(x11, s.x[c10], convention)),
            pi6=None if not y11.size else _mean_or_none(1.0 - _ecdf_at(y11, s.y[c01], convention)),
        )

    ranges = reference_ranges(target, p1_hat, p2_hat)

    def above(vals, key):
        if key not in ranges or not vals.size:
            return None
        return float(np.mean(clip_range(vals, *ranges[key])))

    def below(vals, key):
        if key not in ranges or not vals.size:
            return None
        return float(np.mean(1.0 - clip_range(vals, *ranges[key])))

    return ConditionalPi(
        pi1=above(fx[c11], "x11"), pi2=above(gy[c11], "y11"),
        pi3=above(gy[c11], "y01"), pi4=above(fx[c11], "x10"),
        pi5=below(fx[c10], "x11"), pi6=below(gy[c01], "y11"),
    )
