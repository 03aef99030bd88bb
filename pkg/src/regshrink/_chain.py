"""Chain plumbing shared by the logistic and probit samplers."""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ChainDivergenceError, ConfigurationError
from .model import Bridge, Dataset, Horseshoe, ModelState, PriorSpec, regularized_conditional_variance, tau_support
from .scale_samplers.bridge import sample_bridge_local, sample_bridge_local_slice, sample_laplace_local
from .scale_samplers.global_scale import sample_tau_bridge_collapsed, sample_tau_conditional
from .scale_samplers.horseshoe import sample_horseshoe_local

THREADS_ENV = "REGSHRINK_NUM_THREADS"
_PREC_CAP = 1e300

InitSpec = Union[str, ModelState, Sequence[ModelState]]


@dataclass
class SamplerConfig:
    """Run settings.

    ``n_iter`` counts all sweeps including the ``n_burnin`` discarded ones;
    kept sweeps are every ``thin``-th after burn-in.  ``fix_tau`` and
    ``fix_lambda`` hold those blocks constant.  ``local_method`` picks the
    bridge local-scale algorithm ("auto", "double_rejection", "naive",
    "slice").  ``coordinate_streams`` gives every coordinate its own random
    substream so the sweep is equivariant under relabeling of predictors.
    """

    n_iter: int = 2000
    n_burnin: int = 1000
    thin: int = 1
    seed: int = 0
    n_chains: int = 1
    fix_tau: Optional[float] = None
    fix_lambda: Optional[Union[float, np.ndarray]] = None
    init: InitSpec = "zero_beta"
    store_lambda: bool = False
    local_method: str = "auto"
    coordinate_streams: bool = False
    n_threads: Optional[int] = None

    def __post_init__(self):
        if int(self.n_iter) < 1 or int(self.n_iter) <= int(self.n_burnin):
            raise ConfigurationError("need n_iter > n_burnin and n_iter >= 1")
        if int(self.n_burnin) < 0:
            raise ConfigurationError("n_burnin must be non-negative")
        if int(self.thin) < 1 or int(self.n_chains) < 1:
            raise ConfigurationError("thin and n_chains must be positive")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if self.fix_tau is not None and not (self.fix_tau > 0 and math.isfinite(self.fix_tau)):
            raise ConfigurationError("fix_tau must be positive and finite")
        if self.fix_lambda is not None and not np.all(np.asarray(self.fix_lambda) > 0):
            raise ConfigurationError("fix_lambda must be positive")
        if self.local_method not in ("auto", "double_rejection", "naive", "slice"):
            raise ConfigurationError(f"unknown local_method {self.local_method!r}")
        if isinstance(self.init, str) and self.init not in ("zero_beta", "prior_draw"):
            raise ConfigurationError(f"unknown init {self.init!r}")

    @property
    def n_kept(self) -> int:
        return len(range(int(self.n_burnin), int(self.n_iter), int(self.thin)))


@dataclass(frozen=True)
class ChainOutput:
    """Draws from one or more chains.

    Arrays carry a leading chain axis: ``beta_draws`` is
    (n_chains, n_kept, p), ``tau_draws`` is (n_chains, n_kept).
    """

    beta_draws: np.ndarray
    tau_draws: np.ndarray
    lambda_draws: Optional[np.ndarray]
    runtime_seconds: float
    counters: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("beta_draws", "tau_draws", "lambda_draws"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    @property
    def n_chains(self) -> int:
        return self.beta_draws.shape[0]

    @property
    def n_kept(self) -> int:
        return self.beta_draws.shape[1]

    def pooled_beta(self) -> np.ndarray:
        return self.beta_draws.reshape(-1, self.beta_draws.shape[-1])


class Counters(dict):
    def add(self, key, value):
        self[key] = self.get(key, 0) + int(value)


def prior_precision(tau, lam, zeta, data: Dataset, intercept_slab=10.0):
    """Diagonal prior precision zeta^-2 + tau^-2 lambda^-2, intercept slab-only."""
    lam = np.asarray(lam, dtype=float)
    with np.errstate(over="ignore", divide="ignore"):
        local = np.exp(-2.0 * math.log(tau) - 2.0 * np.log(lam))
    d = np.minimum(float(zeta) ** -2.0 + local, _PREC_CAP)
    if data.has_intercept:
        d[0] = 0.0 if math.isinf(intercept_slab) else float(intercept_slab) ** -2.0
    return d


def update_scales(state: ModelState, data: Dataset, prior: PriorSpec, rng, *,
                  fix_tau=None, fix_lambda=None, local_method="auto",
                  coord_rngs=None, counters: Optional[Counters] = None):
    """Steps 1 and 2 of the sweep: tau then the local scales.

    Returns (tau, lam) without modifying ``state``.
    """
    counters = counters if counters is not None else Counters()
    mask = data.penalized
    beta_pen = state.beta[mask]
    fam = prior.family
    if fix_tau is not None:
        tau = float(fix_tau)
    elif isinstance(fam, Bridge):
        tau, retries = sample_tau_bridge_collapsed(beta_pen, fam.alpha, prior.global_prior,
                                                   rng, return_counts=True)
        counters.add("tau_retries", retries)
    else:
        tau, used = sample_tau_conditional(beta_pen, state.lam[mask], prior, rng,
                                           current=state.tau, return_counts=True)
        counters.add("tau_slice_steps", used)
    lam = np.array(state.lam, dtype=float)
    if fix_lambda is not None:
        lam[:] = np.broadcast_to(np.asarray(fix_lambda, dtype=float), lam.shape)
        if data.has_intercept:
            lam[0] = 1.0
        return tau, lam
    x = beta_pen / tau
    idx = np.flatnonzero(mask)
    if coord_rngs is not None:
        for k, j in enumerate(idx):
            lam[j] = _draw_local(fam, x[k:k + 1], coord_rngs[j], local_method,
                                 lam[j:j + 1], counters)[0]
    else:
        lam[idx] = _draw_local(fam, x, rng, local_method, lam[idx], counters)
    if data.has_intercept:
        lam[0] = 1.0
    return tau, lam


def _draw_local(fam, x, rng, method, current, counters):
    if isinstance(fam, Horseshoe):
        lam, used = sample_horseshoe_local(x, 1.0, rng, return_proposals=True)
        counters.add("local_proposals", used)
        return np.atleast_1d(lam)
    if fam.alpha == 1.0:
        return np.atleast_1d(sample_laplace_local(x, rng))
    if method == "slice":
        lam, steps = sample_bridge_local_slice(x, fam.alpha, current, rng)
        counters.add("local_slice_steps", steps)
        return lam
    lam, rounds = sample_bridge_local(x, fam.alpha, rng, method=method, return_counts=True)
    counters.add("local_rounds", rounds)
    return np.atleast_1d(lam)


def initial_state(data: Dataset, prior: PriorSpec, config: SamplerConfig, chain: int,
                  rng, with_omega: bool) -> ModelState:
    init = config.init
    p = data.p
    if isinstance(init, ModelState):
        state = init.copy()
    elif not isinstance(init, str):
        state = list(init)[chain].copy()
    else:
        lo, hi = tau_support(prior)
        if config.fix_tau is not None:
            tau = float(config.fix_tau)
        elif math.isfinite(hi):
            tau = math.sqrt(lo * hi)
        else:
            tau = lo * 10.0
        lam = np.ones(p)
        beta = np.zeros(p)
        if init == "prior_draw":
            if config.fix_tau is None:
                tau = float(np.exp(rng.uniform(math.log(lo), math.log(hi if math.isfinite(hi) else lo * 1e6))))
            lam = _prior_local_draw(prior, p, rng)
            if config.fix_lambda is not None:
                lam = np.broadcast_to(np.asarray(config.fix_lambda, float), (p,)).copy()
            var = regularized_conditional_variance(tau, lam, prior.slab_width)
            beta = rng.standard_normal(p) * np.sqrt(var)
            if data.has_intercept:
                beta[0] = rng.standard_normal() * min(prior.intercept_slab, 10.0)
        elif config.fix_lambda is not None:
            lam = np.broadcast_to(np.asarray(config.fix_lambda, float), (p,)).copy()
        if data.has_intercept:
            lam[0] = 1.0
        state = ModelState(beta=beta, lam=lam, tau=tau)
    if config.fix_tau is not None:
        state.tau = float(config.fix_tau)
    if with_omega and state.omega is None:
        state.omega = np.full(data.n, 0.25)
    if not with_omega:
        state.omega = None
    bad = state.validate()
    if bad:
        raise ConfigurationError(f"initial state invalid in {bad}")
    return state


def _prior_local_draw(prior: PriorSpec, p, rng):
    fam = prior.family
    if isinstance(fam, Horseshoe):
        return np.abs(rng.standard_cauchy(p)) + np.finfo(float).tiny
    # beta / tau from the bridge marginal, then lambda from its conditional
    g = rng.standard_gamma(1.0 / fam.alpha, size=p) ** (1.0 / fam.alpha)
    x = g * rng.choice([-1.0, 1.0], size=p)
    if fam.alpha == 1.0:
        return np.atleast_1d(sample_laplace_local(x, rng))
    return np.atleast_1d(sample_bridge_local(x, fam.alpha, rng))


def n_threads(config: SamplerConfig) -> int:
    if config.n_threads is not None:
        return max(1, int(config.n_threads))
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_chains(step, data: Dataset, prior: PriorSpec, config: SamplerConfig, *,
               with_omega: bool) -> ChainOutput:
    """Run ``config.n_chains`` independent chains of the sweep ``step``."""
    root = np.random.SeedSequence(int(config.seed))
    children = root.spawn(config.n_chains)
    kept_idx = set(range(int(config.n_burnin), int(config.n_iter), int(config.thin)))
    n_kept = config.n_kept
    p = data.p

    def one_chain(c):
        ss = children[c]
        sweep_ss, coord_ss = ss.spawn(2)
        rng = np.random.Generator(np.random.PCG64(sweep_ss))
        coord_rngs = None
        if config.coordinate_streams:
            coord_rngs = [np.random.Generator(np.random.PCG64(s)) for s in coord_ss.spawn(p)]
        counters = Counters()
        state = initial_state(data, prior, config, c, rng, with_omega)
        betas = np.empty((n_kept, p))
        taus = np.empty(n_kept)
        lams = np.empty((n_kept, p)) if config.store_lambda else None
        k = 0
        for it in range(int(config.n_iter)):
            state = step(state, data, prior, rng, fix_tau=config.fix_tau,
                         fix_lambda=config.fix_lambda, local_method=config.local_method,
                         coord_rngs=coord_rngs, counters=counters)
            bad = state.validate()
            if bad:
                raise ChainDivergenceError(
                    f"chain {c} produced non-finite {bad} at iteration {it}",
                    snapshot={"chain": c, "iteration": it, "beta": state.beta.tolist(),
                              "lam": state.lam.tolist(), "tau": state.tau})
            if it in kept_idx:
                betas[k] = state.beta
                taus[k] = state.tau
                if lams is not None:
                    lams[k] = state.lam
                k += 1
        return betas, taus, lams, counters

    t0 = time.perf_counter()
    workers = min(n_threads(config), config.n_chains)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one_chain, range(config.n_chains)))
    else:
        results = [one_chain(c) for c in range(config.n_chains)]
    elapsed = time.perf_counter() - t0
    counters = Counters()
    for r in results:
        for key, val in r[3].items():
            counters.add(key, val)
    return ChainOutput(
        beta_draws=np.stack([r[0] for r in results]),
        tau_draws=np.stack([r[1] for r in results]),
        lambda_draws=np.stack([r[2] for r in results]) if config.store_lambda else None,
        runtime_seconds=elapsed,
        counters=dict(counters),
    )
