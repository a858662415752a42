import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from ziconcord import (CouplingSpec, PairedSample, bounds, cell_masses, estimate_bounds,
                       estimate_measures, estimate_q_jm, estimate_q_jw, estimate_rho,
                       q_via_cdf_expectation, rho_bounds, sample)
from ziconcord.estimators import classical_spearman


def _zi(seed, n, p1, p2, kind="Frechet", alpha=0.5):
    base = CouplingSpec.uniform("UpperFH", p1, p2)
    return sample(CouplingSpec(kind, base.margin_x, base.margin_y, seed, alpha), n)


def _ranks(v):
    return stats.rankdata(v, method="ordinal")


def test_all_y_zero_gives_zero():
    s = PairedSample([0.0, 1.0, 2.0, 3.0], [0.0, 0.0, 0.0, 0.0])
    assert estimate_q_jm(s) == 0.0
    assert estimate_rho(s) == 0.0


def test_all_x_zero_gives_zero():
    s = PairedSample([0.0, 0.0, 0.0], [0.0, 1.0, 2.0])
    assert estimate_q_jw(s) == 0.0


@pytest.mark.parametrize("seed", range(50))
def test_no_zero_footrule_identity(seed):
    # with no zeros Q(J, M) reduces to the rank footrule under the right-continuous
    # ECDF: 4 * mean(min(R, S)) / n - 1 = 1 + 2/n - 2 * sum|R - S| / n^2
    rng = np.random.default_rng(seed)
    n = 20
    s = PairedSample(rng.random(n) + 0.1, rng.random(n) + 0.1)
    r, q = _ranks(s.x), _ranks(s.y)
    d = np.abs(r - q).sum()
    assert estimate_q_jm(s) == pytest.approx(1 + 2 / n - 2 * d / n**2, abs=1e-12)
    phi_classical = 1 - 3 * d / (n**2 - 1)
    assert abs(estimate_q_jm(s) - (2 * phi_classical + 1) / 3) <= 3 / n


@pytest.mark.parametrize("seed", range(20))
def test_no_zero_gini_identity(seed):
    rng = np.random.default_rng(seed)
    n = 30
    s = PairedSample(rng.random(n) + 0.1, rng.random(n) + 0.1)
    r, q = _ranks(s.x), _ranks(s.y)
    assert estimate_q_jw(s) == pytest.approx(4 * np.mean(np.maximum(r + q - n, 0)) / n - 1, abs=1e-12)
    gamma_classical = np.sum(np.abs(r + q - n - 1) - np.abs(r - q)) / (n * n / 2)
    # Gini's rank gamma differs from the plug-in by an exact right-ECDF offset
    offset = 2 / n + 4 * np.sum(r + q > n) / n**2
    assert estimate_measures(s).gamma_hat == pytest.approx(gamma_classical + offset, abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_no_zero_rho_is_spearman(seed):
    rng = np.random.default_rng(seed)
    s = PairedSample(rng.random(50) + 0.1, rng.random(50) + 0.1)
    assert estimate_rho(s) == classical_spearman(s.x, s.y)
    assert estimate_rho(s) == pytest.approx(stats.spearmanr(s.x, s.y).statistic, abs=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("kind,target", [("UpperFH", "max"), ("LowerFH", "min"), ("Independence", None)])
def test_consistency_large_samples(kind, target):
    s = _zi(17, 100_000, 0.2, 0.2, kind)
    r = estimate_measures(s)
    b = bounds(0.2, 0.2)
    for m in ("gamma", "phi", "rho"):
        truth = 0.0 if target is None else getattr(b, f"{m}_{target}")
        assert abs(getattr(r, f"{m}_hat") - truth) <= 0.02, m
    if kind == "UpperFH":
        assert abs(r.q_jm_hat - 0.96) <= 0.01
    if kind == "LowerFH":
        assert abs(r.q_jw_hat + 0.92) <= 0.01
    if kind == "Independence":
        assert abs(r.q_jw_hat - rho_bounds(0.2, 0.2)[0] / 3) <= 0.01


@pytest.mark.parametrize("kind", ["Independence", "UpperFH", "LowerFH", "Frechet"])
@pytest.mark.parametrize("p1,p2", [(0.2, 0.2), (0.2, 0.8), (0.3, 0.6), (0.8, 0.8)])
def test_gap_to_exact_partner_expectation(kind, p1, p2):
    # the plug-in forms differ from the exact oracle expectation only through the
    # ECDF convention: O(1/n), and much smaller with the mid-point convention
    s = _zi(7, 2000, p1, p2, kind)
    n = s.n
    exact = {"M": q_via_cdf_expectation("M", s), "W": q_via_cdf_expectation("W", s),
             "Pi": q_via_cdf_expectation("Pi", s)}
    assert abs(estimate_q_jm(s) - exact["M"]) <= 3.0 / n
    assert abs(estimate_q_jw(s) - exact["W"]) <= 3.0 / n
    assert abs(estimate_rho(s) - 3 * exact["Pi"]) <= 3.0 / n
    assert abs(estimate_q_jm(s, "mid") - exact["M"]) <= 1.0 / n
    assert abs(estimate_q_jw(s, "mid") - exact["W"]) <= 1.0 / n


def test_flag_when_lower_region_empty():
    s = PairedSample.from_pairs([(0, 0), (1, 0), (2, 3), (3, 4)])
    r = estimate_measures(s)
    assert any("empty" in f for f in r.flags)
    assert np.isfinite(r.gamma_hat)


def test_estimate_bounds_examples():
    s = PairedSample([0.0, 0.0, 0.0], [1.0, 0.0, 2.0])
    assert all(v == 0.0 for v in estimate_bounds(s).as_dict().values())
    n = 1000
    x = np.r_[np.zeros(225), np.arange(1, n - 225 + 1.0)]
    y = np.r_[np.zeros(716), np.arange(1, n - 716 + 1.0)]
    b = estimate_bounds(PairedSample(x, y))
    assert (b.rho_min, b.rho_max) == pytest.approx((-0.622, 0.633), abs=5e-4)


def test_report_fields():
    s = _zi(2, 200, 0.3, 0.4)
    r = estimate_measures(s)
    cm = cell_masses(s)
    assert r.n == 200 and r.p1_hat == cm.p1 and r.p2_hat == cm.p2
    assert r.bounds == bounds(cm.p1, cm.p2)
    d = r.as_dict()
    assert set(d) >= {"gamma_hat", "phi_hat", "rho_hat", "bounds", "cell_masses", "seed"}


samples_st = st.builds(_zi, seed=st.integers(0, 2**32 - 1), n=st.integers(1, 80),
                       p1=st.sampled_from([0.0, 0.2, 0.5, 0.9, 1.0]),
                       p2=st.sampled_from([0.0, 0.2, 0.5, 0.9, 1.0]),
                       kind=st.sampled_from(["Independence", "UpperFH", "LowerFH", "Frechet"]))


@settings(max_examples=200, deadline=None)
@given(samples_st)
def test_swap_and_rank_invariance(s):
    r = estimate_measures(s)
    w = estimate_measures(s.swap())
    assert (w.gamma_hat, w.phi_hat, w.rho_hat, w.q_jm_hat, w.q_jw_hat) == \
        (r.gamma_hat, r.phi_hat, r.rho_hat, r.q_jm_hat, r.q_jw_hat)
    t = estimate_measures(s.transform(lambda v: 3.0 * v + 1.0, lambda v: v**2))
    assert t.as_dict() == r.as_dict()


@settings(max_examples=200, deadline=None)
@given(samples_st)
def test_reports_are_finite_and_bounded(s):
    r = estimate_measures(s)
    for v in (r.gamma_hat, r.phi_hat, r.rho_hat, r.q_jm_hat, r.q_jw_hat):
        assert np.isfinite(v)
    # right-ECDF plug-ins can exceed one by the 2/n offset at small n
    slack = 2 / s.n + 1e-12
    assert abs(r.q_jm_hat) <= 1 + slack and abs(r.q_jw_hat) <= 1 + slack
    if r.p1_hat == 0.0 and r.p2_hat == 0.0:
        assert abs(r.rho_hat) <= 1 + 1e-12
    if r.p1_hat == 1.0 or r.p2_hat == 1.0:
        assert r.gamma_hat == r.phi_hat == r.rho_hat == 0.0


@pytest.mark.parametrize("pairs", [
    [(1.0, 2.0)], [(0.0, 0.0)], [(0.0, 1.0), (2.0, 0.0)], [(1.0, 1.0), (0.0, 2.0), (3.0, 0.0)],
])
def test_tiny_samples(pairs):
    r = estimate_measures(PairedSample.from_pairs(pairs))
    assert np.all(np.isfinite([r.gamma_hat, r.phi_hat, r.rho_hat]))
