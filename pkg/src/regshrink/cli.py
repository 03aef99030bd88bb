"""Command-line interface: simulate, fit, diagnose, accept-curve.

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._chain import THREADS_ENV, SamplerConfig
from .diagnostics import (
    ESS_CAVEAT,
    autocorrelation,
    coverage_width_curve,
    credible_interval,
    effective_sample_size,
    split_rhat,
    widest_intervals,
)
from .errors import ChainDivergenceError, ComputationError, RegShrinkError
from .gibbs_logistic import run_chain_logistic
from .gibbs_probit import run_chain_probit
from .io import RunManifest, read_table, write_csv, write_json, write_matrix
from .model import Bridge, Dataset, GlobalScalePrior, Horseshoe, PriorSpec
from .scale_samplers.horseshoe import (
    horseshoe_acceptance_closed_form,
    horseshoe_acceptance_rate,
    horseshoe_proposal_trial,
)
from .simulation import SimConfig, generate_weak_signal_dataset, model_scale_truth

log = logging.getLogger("regshrink")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
REPORTED_MIN_ACCEPTANCE = 0.6975


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text}") from exc


def _outdir(path) -> Path:
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {p}: {exc}") from exc
    if not os.access(p, os.W_OK):
        raise UsageError(f"output directory {p} is not writable")
    return p


# simulate ---------------------------------------------------------------------


def cmd_simulate(args) -> int:
    out = _outdir(args.out)
    cfg = SimConfig(n=args.n, p=args.p, n_signals=args.signals, signal_value=args.signal_value,
                    intercept=args.intercept, beta_shape_a=args.beta_a,
                    beta_shape_b=args.beta_b, seed=args.seed,
                    add_intercept=not args.no_intercept_column)
    data, beta = generate_weak_signal_dataset(cfg)
    man = RunManifest("simulate", _echo(args), args.seed, __version__)
    p_all = data.p
    write_matrix(out / "X.csv", data.X, [f"x{j}" for j in range(p_all)])
    write_matrix(out / "y.csv", data.y[:, None], ["y"])
    dgp = np.concatenate([[cfg.intercept], beta]) if data.has_intercept else beta
    model = model_scale_truth(beta, cfg.intercept if data.has_intercept else None)
    write_csv(out / "beta_true.csv", ["coordinate", "dgp_value", "model_value"],
              [[j, dgp[j], model[j]] for j in range(p_all)])
    man.outputs += ["X.csv", "y.csv", "beta_true.csv"]
    man.counters = {"incidence": float(data.y.mean()), "has_intercept": data.has_intercept}
    man.finish(out)
    return EXIT_OK


# fit --------------------------------------------------------------------------


def _load_dataset(args) -> Dataset:
    xpath = Path(args.x) if args.x else Path(args.data) / "X.csv"
    ypath = Path(args.y) if args.y else Path(args.data) / "y.csv"
    try:
        _, X = read_table(xpath)
        _, y = read_table(ypath)
    except OSError as exc:
        raise UsageError(f"cannot read dataset: {exc}") from exc
    if y.shape[1] != 1:
        raise UsageError("y.csv must have exactly one column")
    if X.shape[0] != y.shape[0]:
        raise UsageError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if args.intercept == "auto":
        has_int = bool(np.all(X[:, 0] == 1.0))
    else:
        has_int = args.intercept == "yes"
    return Dataset(X=X, y=y[:, 0], has_intercept=has_int)


def _prior_from_args(args) -> PriorSpec:
    fam = Bridge(args.alpha) if args.prior == "bridge" else Horseshoe()
    g = GlobalScalePrior(shape=args.global_shape, rate=args.global_rate,
                         mean_abs_lo=args.mean_abs_lo, mean_abs_hi=args.mean_abs_hi,
                         tau_min=args.tau_min, tau_max=args.tau_max)
    return PriorSpec(family=fam, slab_width=args.slab, global_prior=g,
                     intercept_slab=args.intercept_slab)


def cmd_fit(args) -> int:
    out = _outdir(args.out)
    data = _load_dataset(args)
    prior = _prior_from_args(args)
    if args.iters <= args.burnin:
        raise UsageError("--iters must exceed --burnin")
    cfg = SamplerConfig(n_iter=args.iters, n_burnin=args.burnin, thin=args.thin, seed=args.seed,
                        n_chains=args.chains, fix_tau=args.fix_tau, init=args.init,
                        local_method=args.local_method, n_threads=args.threads)
    man = RunManifest("fit", _echo(args), args.seed, __version__)
    runner = run_chain_logistic if args.model == "logistic" else run_chain_probit
    try:
        res = runner(data, prior, cfg)
    except ChainDivergenceError as exc:
        write_json(out / "divergence.json", {"message": str(exc), "snapshot": exc.snapshot})
        print(f"error: {exc}; snapshot in {out / 'divergence.json'}", file=sys.stderr)
        return EXIT_NUMERIC
    iters = list(range(cfg.n_burnin, cfg.n_iter, cfg.thin))
    p = data.p
    rows = [[c, it, *res.beta_draws[c, k]] for c in range(res.n_chains)
            for k, it in enumerate(iters)]
    write_csv(out / "beta_draws.csv", ["chain", "iteration", *[f"beta{j}" for j in range(p)]], rows)
    write_csv(out / "tau_draws.csv", ["chain", "iteration", "tau"],
              [[c, it, res.tau_draws[c, k]] for c in range(res.n_chains)
               for k, it in enumerate(iters)])
    write_json(out / "summary.json", _summary(res, p, args.level))
    man.outputs += ["beta_draws.csv", "tau_draws.csv", "summary.json"]
    man.counters = dict(res.counters, runtime_seconds=res.runtime_seconds)
    man.finish(out)
    return EXIT_OK


def _summary(res, p, level):
    coords = []
    for j in range(p):
        chains = res.beta_draws[:, :, j]
        iv = credible_interval(chains.ravel(), level) if chains.size >= 100 else None
        ess = effective_sample_size(chains) if chains.shape[1] >= 10 else None
        coords.append({
            "coordinate": j,
            "mean": float(chains.mean()),
            "median": iv.median if iv else None,
            "lo": iv.lo if iv else None,
            "hi": iv.hi if iv else None,
            "ess": ess.ess if ess else None,
            "rhat": split_rhat(chains) if chains.shape[1] >= 4 else None,
        })
    tau = res.tau_draws
    return {
        "schema_version": 1,
        "level": level,
        "n_chains": res.n_chains,
        "n_kept": res.n_kept,
        "coefficients": coords,
        "tau": {"mean": float(tau.mean()),
                "rhat": split_rhat(tau) if tau.shape[1] >= 4 else None},
        "counters": res.counters,
        "runtime_seconds": res.runtime_seconds,
        "caveat": ESS_CAVEAT,
    }


# diagnose ---------------------------------------------------------------------


def _read_draws(path):
    try:
        header, data = read_table(path)
    except OSError as exc:
        raise UsageError(f"cannot read draws: {exc}") from exc
    if header[:2] == ["chain", "iteration"]:
        chain = data[:, 0].astype(int)
        it = data[:, 1].astype(int)
        return chain, it, data[:, 2:], header[2:]
    return np.zeros(data.shape[0], int), np.arange(data.shape[0]), data, header


def _read_truth(path, p):
    header, data = read_table(path)
    col = header.index("model_value") if "model_value" in header else data.shape[1] - 1
    truth = data[:, col]
    if truth.size != p:
        raise UsageError(f"truth has {truth.size} entries, draws have {p} coordinates")
    return truth


def cmd_diagnose(args) -> int:
    out = _outdir(args.out)
    chain, it, draws, names = _read_draws(args.draws)
    p = draws.shape[1]
    if draws.shape[0] < 100:
        raise UsageError("need at least 100 draws for interval summaries")
    man = RunManifest("diagnose", _echo(args), None, __version__)
    coords = list(range(p))
    if args.top_k:
        coords = [int(j) for j in widest_intervals(draws, args.top_k, args.level)]
    write_csv(out / "trace.csv", ["chain", "iteration", "coordinate", "value"],
              [[int(chain[r]), int(it[r]), j, draws[r, j]]
               for j in coords for r in range(draws.shape[0])])
    ids = np.unique(chain)
    max_lag = min(args.max_lag, min(int(np.sum(chain == c)) for c in ids) - 1)
    acf_rows = []
    for j in coords:
        acf = np.mean([autocorrelation(draws[chain == c, j], max_lag).values for c in ids], axis=0)
        acf_rows += [[j, lag, acf[lag]] for lag in range(max_lag + 1)]
    write_csv(out / "autocorrelation.csv", ["coordinate", "lag", "acf"], acf_rows)
    truth = _read_truth(args.truth, p) if args.truth else None
    iv_rows = []
    for j in range(p):
        iv = credible_interval(draws[:, j], args.level, None if truth is None else truth[j])
        iv_rows.append([j, iv.mean, iv.median, iv.lo, iv.hi, iv.width,
                        "" if iv.covers_truth is None else int(iv.covers_truth)])
    write_csv(out / "intervals.csv",
              ["coordinate", "mean", "median", "lo", "hi", "width", "covers_truth"], iv_rows)
    man.outputs += ["trace.csv", "autocorrelation.csv", "intervals.csv"]
    if truth is not None:
        rows = coverage_width_curve([draws[:, j] for j in range(p)], truth, args.levels,
                                    signal_mask=truth != 0)
        write_csv(out / "coverage_width.csv", ["level", "group", "mean_width", "coverage", "count"],
                  [[r["level"], r["group"], r["mean_width"], r["coverage"], r["count"]]
                   for r in rows])
        man.outputs.append("coverage_width.csv")
    man.counters = {"selected_coordinates": coords if args.top_k else None}
    man.finish(out)
    return EXIT_OK


# accept-curve -----------------------------------------------------------------


def cmd_accept_curve(args) -> int:
    out = _outdir(args.out)
    if not (0 < args.b_min < args.b_max) or args.points < 2 or args.proposals < 1:
        raise UsageError("need 0 < b-min < b-max, points >= 2, proposals >= 1")
    rng = np.random.default_rng(args.seed)
    grid = np.geomspace(args.b_min, args.b_max, args.points)
    rows = []
    for b in grid:
        a = horseshoe_acceptance_rate(float(b))
        acc = horseshoe_proposal_trial(float(b), args.proposals, rng)
        emp = acc / args.proposals
        se = math.sqrt(a * (1 - a) / args.proposals)
        rows.append([b, a, emp, args.proposals, int(abs(emp - a) <= 3 * se + 1e-12)])
    write_csv(out / "accept_curve.csv",
              ["b", "quadrature_acceptance", "empirical_acceptance", "proposals",
               "within_3se"], rows)
    quad_vals = np.array([r[1] for r in rows])
    k = int(np.argmin(quad_vals))
    meta = {
        "schema_version": 1,
        "grid_min": float(quad_vals[k]),
        "grid_argmin_b": float(grid[k]),
        "closed_form_at_b1": horseshoe_acceptance_closed_form(1.0),
        "reported_minimum": REPORTED_MIN_ACCEPTANCE,
        "discrepancy": float(quad_vals[k] - REPORTED_MIN_ACCEPTANCE),
        "discrepancy_flag": bool(abs(quad_vals[k] - REPORTED_MIN_ACCEPTANCE) > 0.01),
        "all_within_3se": all(r[4] for r in rows),
    }
    write_json(out / "accept_curve.json", meta)
    man = RunManifest("accept-curve", _echo(args), args.seed, __version__,
                      outputs=["accept_curve.csv", "accept_curve.json"], counters=meta)
    man.finish(out)
    return EXIT_OK


# parser -----------------------------------------------------------------------


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="regshrink", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--config", help="file of key = value lines; flags override it")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="generate a weak-signal dataset")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--signals", type=int, default=10)
    s.add_argument("--signal-value", type=float, default=1.0)
    s.add_argument("--intercept", type=float, default=1.5)
    s.add_argument("--beta-a", type=float, default=0.5)
    s.add_argument("--beta-b", type=float, default=2.0)
    s.add_argument("--no-intercept-column", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="run a Gibbs sampler")
    f.add_argument("--data", default=".", help="directory holding X.csv and y.csv")
    f.add_argument("--x")
    f.add_argument("--y")
    f.add_argument("--intercept", choices=["auto", "yes", "no"], default="auto")
    f.add_argument("--model", choices=["logistic", "probit"], default="logistic")
    f.add_argument("--prior", choices=["bridge", "horseshoe"], default="bridge")
    f.add_argument("--alpha", type=float, default=0.5)
    f.add_argument("--slab", type=float, default=1.0)
    f.add_argument("--intercept-slab", type=float, default=10.0)
    f.add_argument("--global-shape", type=float, default=0.0)
    f.add_argument("--global-rate", type=float, default=0.0)
    f.add_argument("--mean-abs-lo", type=float, default=1e-6)
    f.add_argument("--mean-abs-hi", type=float, default=1.0)
    f.add_argument("--tau-min", type=float, default=1e-6)
    f.add_argument("--tau-max", type=float, default=1e3)
    f.add_argument("--iters", type=int, default=2000)
    f.add_argument("--burnin", type=int, default=1000)
    f.add_argument("--thin", type=int, default=1)
    f.add_argument("--chains", type=int, default=1)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--fix-tau", type=float)
    f.add_argument("--init", choices=["zero_beta", "prior_draw"], default="zero_beta")
    f.add_argument("--local-method", choices=["auto", "double_rejection", "naive", "slice"],
                   default="auto")
    f.add_argument("--threads", type=int, help=f"defaults to ${THREADS_ENV} or 1")
    f.add_argument("--level", type=float, default=0.95)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_fit)

    d = sub.add_parser("diagnose", help="summaries and plot-ready tables from draws")
    d.add_argument("--draws", required=True)
    d.add_argument("--truth")
    d.add_argument("--levels", type=_float_list, default=[0.5, 0.8, 0.95])
    d.add_argument("--level", type=float, default=0.95)
    d.add_argument("--top-k", type=int, default=0)
    d.add_argument("--max-lag", type=int, default=50)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_diagnose)

    a = sub.add_parser("accept-curve", help="horseshoe rejection-sampler acceptance curve")
    a.add_argument("--b-min", type=float, default=1e-6)
    a.add_argument("--b-max", type=float, default=1e6)
    a.add_argument("--points", type=int, default=25)
    a.add_argument("--proposals", type=int, default=10_000)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_accept_curve)
    return ap


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            k, v = (t.strip() for t in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _apply_config(parser, argv, cfg):
    """Feed config values through the subcommand parser so flags override them."""
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    cmd = next((t for t in argv if t in sub_action.choices), None)
    if cmd is None:
        return argv
    sp = sub_action.choices[cmd]
    known = {a.dest: a for a in sp._actions if a.option_strings}
    extra = []
    given = {a.dest for a in sp._actions for t in argv
             if any(t == o or t.startswith(o + "=") for o in a.option_strings)}
    for key, val in cfg.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r} for {cmd}")
        if key in given:
            continue
        act = known[key]
        flag = max(act.option_strings, key=len)
        if act.nargs == 0:
            if val.lower() in ("1", "true", "yes", "on"):
                extra.append(flag)
        else:
            extra += [flag, val]
    i = argv.index(cmd) + 1
    return argv[:i] + extra + argv[i:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if "--config" in argv or any(t.startswith("--config=") for t in argv):
            cfg_parser = argparse.ArgumentParser(add_help=False)
            cfg_parser.add_argument("--config")
            known, _ = cfg_parser.parse_known_args(argv)
            argv = _apply_config(parser, argv, read_config(known.config))
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ComputationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (RegShrinkError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
