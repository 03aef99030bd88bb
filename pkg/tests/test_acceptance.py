"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test records a PASS/FAIL line that is printed in the terminal summary.
Known failures are left failing; the analysis lives in the decisions ledger.
"""
from __future__ import annotations

import math
import time

import numpy as np
import pytest

from regshrink._chain import SamplerConfig
from regshrink.diagnostics import (
    credible_interval,
    gaussian_negative_moment,
    gaussian_negative_moment_closed_form,
    neg_moment_upper_bound,
    posterior_precision_bound_holds,
    split_rhat,
)
from regshrink.gibbs_logistic import (
    beta_conditional_moments,
    run_chain_logistic,
    sample_beta_conditional,
)
from regshrink.gibbs_probit import run_chain_probit
from regshrink.model import (
    Bridge,
    Dataset,
    GlobalScalePrior,
    Horseshoe,
    PriorSpec,
    bridge_mean_abs_factor,
    log_local_prior,
    regularized_joint_logdensity,
)
from regshrink.polya_gamma import pg_mean, sample_pg1
from regshrink.scale_samplers.global_scale import sample_tau_bridge_collapsed
from regshrink.scale_samplers.horseshoe import (
    horseshoe_acceptance_closed_form,
    horseshoe_acceptance_rate,
    horseshoe_proposal_trial,
    sample_horseshoe_eta,
)
from regshrink.scale_samplers.oracles import (
    bridge_limit_tv,
    bridge_tau_logdensity,
    horseshoe_eta_cdf,
    ks_against_grid,
    local_scale_tail_prob,
    tau_grid_oracle,
)
from regshrink.simulation import SimConfig, generate_weak_signal_dataset

from conftest import (
    ks_distance,
    logistic_1d_posterior_cdf,
    probit_2d_posterior_moments,
    record_criterion,
)

pytestmark = pytest.mark.acceptance

REPORTED_MIN = 0.6975


def test_criterion_01_rejection_acceptance_curve():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    grid = np.geomspace(1e-6, 1e6, 25)
    n = 10_000
    quad = np.array([horseshoe_acceptance_rate(b) for b in grid])
    emp = np.array([horseshoe_proposal_trial(b, n, rng) / n for b in grid])
    se = np.sqrt(quad * (1 - quad) / n)
    agree = np.all(np.abs(emp - quad) <= 3 * se)
    extremes = [quad[0], quad[-1], emp[0], emp[-1]]
    high_at_ends = all(v >= 0.99 for v in extremes)
    k = int(np.argmin(quad))
    z = np.abs(emp - quad) / se
    # informational only: recheck flagged points with 400x the proposals
    recheck = []
    for i in np.flatnonzero(z > 3):
        big = 4_000_000
        e2 = horseshoe_proposal_trial(grid[i], big, rng) / big
        z2 = (e2 - quad[i]) / math.sqrt(quad[i] * (1 - quad[i]) / big)
        recheck.append(f"b={grid[i]:.3g} z={z[i]:.2f}, recheck z={z2:+.2f}")
    dt = time.perf_counter() - t0
    detail = (f"oracle agreement {'yes' if agree else 'no'}, worst z "
              f"{z.max():.2f}{' [' + '; '.join(recheck) + ']' if recheck else ''}; "
              f"quadrature at b=1e-6 {quad[0]:.4f}, "
              f"at b=1e6 {quad[-1]:.4f}; grid min {quad[k]:.4f} at b={grid[k]:.3g}, "
              f"closed form at b=1 {horseshoe_acceptance_closed_form(1.0):.4f}, "
              f"reported {REPORTED_MIN}")
    ok = record_criterion(1, "rejection-sampler acceptance curve", agree and high_at_ends,
                          detail, dt, 30)
    assert agree, detail
    assert high_at_ends, detail
    assert ok


def test_criterion_02_horseshoe_eta_ks():
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    ks = {}
    for b in (0.1, 1.0, 10.0):
        eta = sample_horseshoe_eta(np.full(100_000, b), rng)
        grid = np.unique(np.quantile(eta, np.linspace(0.0, 1.0, 3001)))
        cdf = horseshoe_eta_cdf(grid, b)
        ks[b] = ks_distance(eta, lambda v: np.interp(v, grid, cdf))
    dt = time.perf_counter() - t0
    passed = all(v < 0.01 for v in ks.values())
    detail = ", ".join(f"KS(b={b:g}) {v:.4f}" for b, v in ks.items())
    assert record_criterion(2, "horseshoe eta draws vs quadrature CDF", passed, detail, dt, 30)


def test_criterion_03_polya_gamma_means():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    parts, ok = [], True
    for c in (0.0, 0.5, 2.0, 8.0):
        w = sample_pg1(np.full(100_000, c), rng)
        se = w.std(ddof=1) / math.sqrt(w.size)
        z = (w.mean() - pg_mean(c)) / se
        ok &= abs(z) < 4 and w.mean() <= 0.25 + 3 * se
        parts.append(f"c={c:g} z {z:+.2f}")
    dt = time.perf_counter() - t0
    assert record_criterion(3, "Polya-Gamma sampler means", ok, ", ".join(parts), dt, 60)


def test_criterion_04_local_scale_tails():
    t0 = time.perf_counter()
    betas = [0.25, 0.5, 1.0, 2.0, 4.0]
    hs = [local_scale_tail_prob(1.0, b, 1.0, PriorSpec(Horseshoe())) for b in betas]
    br = [local_scale_tail_prob(1.0, b, 1.0, PriorSpec(Bridge(0.5))) for b in betas]
    dec_hs = all(x > y for x, y in zip(hs, hs[1:]))
    dec_br = all(x > y for x, y in zip(br, br[1:]))
    tiny = local_scale_tail_prob(1.0, 1e-8, 1.0, PriorSpec(Horseshoe()))
    tv = bridge_limit_tv(1e-6, 0.5)
    dt = time.perf_counter() - t0
    passed = dec_hs and dec_br and tiny < 1e-2 and tv < 1e-3
    detail = (f"horseshoe tails {['%.4f' % v for v in hs]} decreasing={dec_hs}; "
              f"bridge tails {['%.4f' % v for v in br]} decreasing={dec_br}; "
              f"horseshoe tail at 1e-8 {tiny:.4f} (<0.01: {tiny < 1e-2}); "
              f"bridge TV at 1e-6 {tv:.2e} (<1e-3: {tv < 1e-3})")
    ok = record_criterion(4, "local-scale tail probabilities", passed, detail, dt, 60)
    assert tv < 1e-3, detail
    assert dec_hs and dec_br, detail
    assert tiny < 1e-2, detail
    assert ok


def test_criterion_05_negative_moment_inequalities():
    t0 = time.perf_counter()
    bad1 = 0
    checked1 = 0
    for a in np.round(np.arange(0.1, 1.0, 0.1), 10):
        for t in np.linspace(0.0, 10.0, 201):
            for sigma in (0.25, 1.0, 4.0):
                mu = t * sigma
                # at mu = 0 the bound is an equality; use the exact value there
                v = (gaussian_negative_moment_closed_form(0.0, sigma, a) if t == 0
                     else gaussian_negative_moment(mu, sigma, a))
                bad1 += not (v <= neg_moment_upper_bound(mu, sigma, a))
                checked1 += 1
    rng = np.random.default_rng(505)
    bad2 = 0
    for i in range(100):
        n, p = int(rng.integers(1, 21)), int(rng.integers(1, 11))
        a = (0.3, 0.7)[i % 2]
        X = rng.standard_normal((n, p)) * rng.uniform(0.1, 3.0)
        ok = posterior_precision_bound_holds(X, rng.uniform(1e-3, 0.25, n),
                                             float(np.exp(rng.uniform(-5, 3))),
                                             np.exp(rng.normal(0, 2, p)),
                                             float(np.exp(rng.uniform(-1, 3))), a)
        bad2 += int(not ok.all())
    dt = time.perf_counter() - t0
    detail = f"Gaussian bound violations {bad1}/{checked1}; precision bound violations {bad2}/100"
    assert record_criterion(5, "negative-moment inequalities", bad1 == 0 and bad2 == 0,
                            detail, dt, 60)


def test_criterion_06_bridge_collapsed_tau():
    t0 = time.perf_counter()
    rng = np.random.default_rng(606)
    beta = np.array([1.0, -1.0, 2.0])
    wide = GlobalScalePrior(mean_abs_lo=1e-12, mean_abs_hi=1e12)
    tau = np.array([sample_tau_bridge_collapsed(beta, 0.5, wide, rng) for _ in range(100_000)])
    grid, cdf = tau_grid_oracle(bridge_tau_logdensity(beta, 0.5), 1e-4, 1e5, n=200_001)
    ks = ks_against_grid(tau, grid, cdf)
    g = GlobalScalePrior()
    m = bridge_mean_abs_factor(0.5)
    viol = 0
    for b in (beta, np.full(3, 1e-9), np.full(3, 100.0)):
        for _ in range(20_000):
            t = sample_tau_bridge_collapsed(b, 0.5, g, rng)
            viol += not (g.mean_abs_lo <= t * m <= g.mean_abs_hi)
    dt = time.perf_counter() - t0
    detail = f"KS {ks:.4f}; truncation violations {viol}/60000"
    assert record_criterion(6, "bridge collapsed tau update", ks < 0.01 and viol == 0,
                            detail, dt, 30)


def test_criterion_07_logistic_correctness():
    t0 = time.perf_counter()
    r = np.random.default_rng(707)
    x = r.standard_normal(25)
    y = (r.random(25) < 1 / (1 + np.exp(-0.8 * x))).astype(float)
    data = Dataset(x[:, None], y)
    tau, zeta = 1.0, 2.0
    cfg = SamplerConfig(n_iter=1000 + 5 * 20_000, n_burnin=1000, thin=5, seed=77,
                        fix_tau=tau, fix_lambda=1.0)
    out = run_chain_logistic(data, PriorSpec(Horseshoe(), slab_width=zeta), cfg)
    grid, cdf = logistic_1d_posterior_cdf(x, y, 1 / (zeta ** -2 + tau ** -2))
    ks = ks_distance(out.pooled_beta()[:, 0], lambda v: np.interp(v, grid, cdf))
    # conditional moment check, n = p = 2
    d2 = Dataset(np.array([[1.0, 0.5], [-0.3, 2.0]]), [1, 0])
    om, lam = np.array([0.2, 0.1]), np.array([1.5, 0.4])
    mean, cov = beta_conditional_moments(om, 0.8, lam, 1.0, d2)
    draws = np.array([sample_beta_conditional(om, 0.8, lam, 1.0, d2, r) for _ in range(100_000)])
    z = np.abs(draws.mean(0) - mean) / np.sqrt(np.diag(cov) / draws.shape[0])
    se_c = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov ** 2) / draws.shape[0])
    zc = np.abs(np.cov(draws.T) - cov) / se_c
    dt = time.perf_counter() - t0
    passed = out.n_kept == 20_000 and ks < 0.02 and z.max() < 4 and zc.max() < 4
    detail = (f"p=1 KS {ks:.4f} on {out.n_kept} draws; moment test max z mean {z.max():.2f}, "
              f"cov {zc.max():.2f}")
    assert record_criterion(7, "logistic chain correctness", passed, detail, dt, 120)


def _c8_run(data, zeta):
    cfg = SamplerConfig(n_iter=6000, n_burnin=1000, n_chains=2, init="prior_draw", seed=99)
    return run_chain_logistic(data, PriorSpec(Bridge(0.5), slab_width=zeta), cfg)


def test_criterion_08_scaled_replication():
    t0 = time.perf_counter()
    data, beta_true = generate_weak_signal_dataset(SimConfig(n=500, p=50, n_signals=5,
                                                             seed=2024))
    reg = _c8_run(data, 1.0)
    unreg = _c8_run(data, 1e6)
    rhat = max(split_rhat(reg.beta_draws[:, :, j]) for j in range(data.p))
    max_abs = float(np.max(np.abs(reg.beta_draws)))
    null = np.flatnonzero(beta_true == 0) + 1
    pooled = reg.pooled_beta()
    cover = np.mean([credible_interval(pooled[:, j], 0.95, 0.0).covers_truth for j in null])
    q_reg = np.quantile(np.max(np.abs(reg.pooled_beta()[:, 1:]), axis=1), 0.99)
    q_unreg = np.quantile(np.max(np.abs(unreg.pooled_beta()[:, 1:]), axis=1), 0.99)
    dt = time.perf_counter() - t0
    passed = (reg.n_kept == 5000 and rhat < 1.05 and max_abs < 8 and cover >= 0.9
              and q_reg < q_unreg)
    detail = (f"max R-hat {rhat:.3f}; max |beta| {max_abs:.2f}; null coverage {cover:.3f}; "
              f"p99 max|beta| {q_reg:.3f} (slab 1) vs {q_unreg:.3f} (slab 1e6)")
    assert record_criterion(8, "scaled simulation study", passed, detail, dt, 600)


def test_criterion_09_probit_sun():
    t0 = time.perf_counter()
    X = np.array([[1.0, 0.3], [-0.5, 1.2], [0.8, -0.7], [0.2, 0.9]])
    y = np.array([1, 0, 1, 1])
    data = Dataset(X, y)
    cfg = SamplerConfig(n_iter=100_001, n_burnin=1, seed=909, fix_tau=1.0, fix_lambda=1.0)
    out = run_chain_probit(data, PriorSpec(Horseshoe(), slab_width=1.0), cfg)
    draws = out.pooled_beta()
    mean, cov = probit_2d_posterior_moments(X, y, 0.5)
    dm = np.max(np.abs(draws.mean(0) - mean))
    dc = np.max(np.abs(np.cov(draws.T) - cov))
    dt = time.perf_counter() - t0
    detail = f"max mean error {dm:.4f}; max covariance error {dc:.4f}"
    assert record_criterion(9, "probit exact conditional draw", dm < 0.02 and dc < 0.02,
                            detail, dt, 120)


def test_criterion_10_joint_density_equivalence():
    t0 = time.perf_counter()
    spread = {}
    for fam in (Horseshoe(), Bridge(0.5)):
        pr = PriorSpec(fam)
        tau, zeta = 0.7, 1.3
        diffs = []
        for b in np.linspace(-4, 4, 60):
            for lam in np.geomspace(0.05, 20, 60):
                lhs = regularized_joint_logdensity(b, lam, tau, zeta, pr)
                rhs = (-b * b / (2 * zeta ** 2) - 0.5 * math.log(2 * math.pi)
                       - math.log(tau * lam) - b * b / (2 * (tau * lam) ** 2)
                       + float(log_local_prior(lam, fam)))
                diffs.append(lhs - rhs)
        spread[type(fam).__name__] = float(np.ptp(diffs))
    dt = time.perf_counter() - t0
    passed = all(v < 1e-10 for v in spread.values())
    detail = ", ".join(f"{k} spread {v:.1e}" for k, v in spread.items())
    assert record_criterion(10, "regularized joint density equivalence", passed, detail, dt, 5)


def test_criterion_11_dgp_statistics():
    t0 = time.perf_counter()
    inc, freqs = [], []
    for seed in range(20):
        data, _ = generate_weak_signal_dataset(SimConfig(n=2500, p=500, seed=seed))
        inc.append(float(data.y.mean()))
        freqs.append(data.X[:, 1:].mean(axis=0))
    f = np.concatenate(freqs)
    se = f.std(ddof=1) / math.sqrt(f.size)
    freq_ok = abs(f.mean() - 0.1) < 3 * se
    inc_ok = all(0.03 <= v <= 0.07 for v in inc)
    dt = time.perf_counter() - t0
    detail = (f"incidence range [{min(inc):.4f}, {max(inc):.4f}], mean {np.mean(inc):.4f}; "
              f"mean column frequency {f.mean():.4f} (z {(f.mean() - 0.1) / se:+.2f})")
    ok = record_criterion(11, "simulation design statistics", freq_ok and inc_ok, detail, dt, 60)
    assert freq_ok, detail
    assert inc_ok, detail
    assert ok
