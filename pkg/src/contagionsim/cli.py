"""Command-line interface: network generation, simulation, fitting, experiments.

Every run is deterministic given --seed. Options can come from a plain
key=value config file via --config; explicit flags win over config values.
Each output file gets a JSON metadata sidecar (resolved config, seed,
versions) written before the data itself. Exit status is 0 only when all
requested outputs were written and validated.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import io
from .estimators import CfModelSpec, fit_cf_model, fit_logistic, fit_ols, qad_fit, sar_mle
from .experiments import (
    AsymmetryGridConfig,
    WaveAsymmetryConfig,
    generate_continuous_panel,
    run_asymmetry_grid,
    run_threshold_sweep,
    run_wave_asymmetry,
)
from .network import make_regular_network, rewire_receivers, rewire_senders
from .outcomes import PanelGenSpec, IsingParams, SarParams, generate_panel, ising_gibbs_sample, sar_generate
from .rng import substream


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip() != "")


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip() != "")


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip() != "")


def _float_pair(text: str) -> tuple[float, float]:
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return vals


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot interpret {text!r} as a boolean")


def _require(args, *dests):
    for dest in dests:
        if getattr(args, dest) is None:
            flag = "--" + dest.replace("_", "-")
            raise ValueError(f"{flag} is required (set it as a flag or in the config file)")


def _resolved_config(args) -> dict:
    skip = {"handler", "command", "config"}
    out = {}
    for key, val in sorted(vars(args).items()):
        if key.startswith("_") or key in skip:
            continue
        if isinstance(val, Path):
            val = str(val)
        elif isinstance(val, tuple):
            val = list(val)
        out[key] = val
    return out


def _meta(args) -> dict:
    return {"command": args._cmd_path, "seed": args.seed, "config": _resolved_config(args)}


def _out_path(args, default_name: str) -> Path:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.out is not None:
        path = Path(args.out)
        if not path.is_absolute() and path.parent == Path("."):
            path = out_dir / path
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
        return path
    return out_dir / default_name


def _read_net(args):
    return io.read_edgelist(args.net, n=args.net_nodes)


# ===== command handlers =====


def _cmd_gen_net(args):
    _require(args, "n", "outdegree")
    rng = substream(args.seed, "gen-net")
    net = make_regular_network(args.n, args.outdegree, rng)
    if args.receiver_rewires:
        net = rewire_receivers(net, args.receiver_rewires, rng)
    if args.sender_rewires:
        net = rewire_senders(net, args.sender_rewires, rng)
    path = _out_path(args, "network.csv")
    io.write_edgelist(net, path, meta=_meta(args))
    print(f"wrote {path} ({net.m} edges)")


def _cmd_simulate_sar(args):
    _require(args, "net", "rho1")
    net = _read_net(args)
    params = SarParams(args.rho1, args.rho2, args.noise_sd)
    z = sar_generate(net, params, substream(args.seed, "simulate-sar"))
    path = _out_path(args, "outcomes.csv")
    io.write_outcomes(z, path, binary=False, meta=_meta(args))
    print(f"wrote {path}")


def _cmd_simulate_ising(args):
    _require(args, "net", "alpha", "beta", "gamma")
    net = _read_net(args)
    params = IsingParams(args.alpha, args.beta, args.gamma)
    y = ising_gibbs_sample(net, params, args.sweeps, substream(args.seed, "simulate-ising"))
    path = _out_path(args, "outcomes.csv")
    io.write_outcomes(y, path, binary=True, meta=_meta(args))
    print(f"wrote {path}")


def _cmd_simulate_panel(args):
    _require(args, "net", "waves", "mu", "alpha", "beta", "gamma")
    net = _read_net(args)
    spec = PanelGenSpec(
        mu=args.mu,
        alpha_ego=args.alpha,
        beta_lag=args.beta,
        gamma_contemp=args.gamma,
        delta=np.asarray(args.delta, dtype=np.float64),
        initial_prevalence=args.prevalence,
        waves=args.waves,
    )
    panel = generate_panel(net, spec, substream(args.seed, "simulate-panel"))
    path = _out_path(args, "panel.csv")
    io.write_panel(panel, path, meta=_meta(args))
    print(f"wrote {path}")


def _read_design(args, y_len):
    frame = pd.read_csv(args.design)
    names = list(frame.columns)
    x = frame.to_numpy(np.float64)
    if x.shape[0] != y_len:
        raise ValueError(f"design has {x.shape[0]} rows but outcome has {y_len}")
    if args.intercept:
        x = np.column_stack([np.ones(x.shape[0]), x])
        names = ["intercept"] + names
    return x, names


def _cmd_fit_ols(args):
    _require(args, "design", "y")
    y, _ = io.read_outcomes(args.y)
    x, names = _read_design(args, y.shape[0])
    fit = fit_ols(x, y.astype(np.float64), names)
    path = _out_path(args, "fit.csv")
    io.write_fit_result(fit, path, meta=_meta(args))
    print(f"wrote {path}")


def _cmd_fit_logistic(args):
    _require(args, "design", "y")
    y, _ = io.read_outcomes(args.y)
    x, names = _read_design(args, y.shape[0])
    fit = fit_logistic(x, y.astype(np.float64), names, ridge=args.ridge)
    path = _out_path(args, "fit.csv")
    io.write_fit_result(fit, path, meta=_meta(args))
    print(f"wrote {path}")


def _cmd_fit_qad(args):
    _require(args, "net", "y")
    net = _read_net(args)
    y, _ = io.read_outcomes(args.y)
    result = qad_fit(net, y, args.family)
    path = _out_path(args, "qad.csv")
    io.write_qad_result(result, path, meta=_meta(args))
    print(f"wrote {path}")


def _cmd_fit_sar_mle(args):
    _require(args, "net", "z")
    net = _read_net(args)
    z, _ = io.read_outcomes(args.z)
    fit = sar_mle(net, z, mode=args.mode)
    path = _out_path(args, "fit.csv")
    io.write_fit_result(fit, path, meta=_meta(args))
    print(f"wrote {path}")


def _cmd_fit_cf(args):
    _require(args, "panel")
    if args.networks:
        nets = [io.read_edgelist(p) for p in args.networks]
    elif args.net:
        nets = io.read_edgelist(args.net, n=args.net_nodes)
    else:
        raise ValueError("--net or --networks is required")
    panel = io.read_panel(args.panel, nets)
    if args.covariates == "all":
        cov_cols = None
    elif args.covariates == "none":
        cov_cols = ()
    else:
        cov_cols = tuple(int(tok) for tok in _str_list(args.covariates))
    spec = CfModelSpec(
        alter_terms=tuple(args.alter_terms),
        include_ego_lag=args.ego_lag,
        covariate_columns=cov_cols,
        stratify_on_prior_state=args.stratify,
    )
    fit = fit_cf_model(panel, spec)
    path = _out_path(args, "fit.csv")
    io.write_fit_result(fit, path, meta=_meta(args))
    print(f"wrote {path}")


def _cmd_experiment_grid(args):
    config = AsymmetryGridConfig(
        n=args.n,
        outdegree=args.outdegree,
        sender_rewires=args.sender_rewires,
        receiver_rewires=args.receiver_rewires,
        networks_per_cell=args.networks_per_cell,
        outcomes_per_network=args.outcomes_per_network,
        sar_asymmetric=SarParams(*args.rho_asym, noise_sd=args.noise_sd),
        sar_symmetric=SarParams(*args.rho_sym, noise_sd=args.noise_sd),
        threshold=args.threshold,
        seed=args.seed,
    )
    frame = run_asymmetry_grid(config)
    path = _out_path(args, "asymmetry_grid.csv")
    io.write_table(frame, path, meta=_meta(args))
    print(f"wrote {path} ({len(frame)} rows)")


def _cmd_experiment_waves(args):
    _require(args, "networks")
    networks = [io.read_edgelist(p) for p in args.networks]
    config = WaveAsymmetryConfig(
        outcomes_per_network=args.outcomes,
        sar_asymmetric=SarParams(*args.rho_asym, noise_sd=args.noise_sd),
        sar_symmetric=SarParams(*args.rho_sym, noise_sd=args.noise_sd),
        threshold=args.threshold,
        seed=args.seed,
    )
    frame = run_wave_asymmetry(networks, config)
    path = _out_path(args, "wave_asymmetry.csv")
    io.write_table(frame, path, meta=_meta(args))
    print(f"wrote {path} ({len(frame)} rows)")


def _cmd_experiment_sweep(args):
    rng = substream(args.seed, "threshold-sweep")
    net = make_regular_network(args.n, args.outdegree, rng)
    if args.receiver_rewires:
        net = rewire_receivers(net, args.receiver_rewires, rng)
    if args.sender_rewires:
        net = rewire_senders(net, args.sender_rewires, rng)
    panel, values = generate_continuous_panel(
        net, args.waves, SarParams(args.rho, 0.0, args.noise_sd), args.persistence, rng
    )
    frame = run_threshold_sweep(panel, values, args.thresholds, args.models)
    path = _out_path(args, "threshold_sweep.csv")
    io.write_table(frame, path, meta=_meta(args))
    print(f"wrote {path} ({len(frame)} rows)")


# ===== parser construction =====


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="root seed for all randomness")
    common.add_argument("--out-dir", default=".", help="directory for default output paths")
    common.add_argument("--config", default=None, help="key=value config file; flags win")
    common.add_argument("--out", default=None, help="output file path")
    return common


def build_parser():
    """Returns (root parser, {command path: leaf parser})."""
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="contagionsim", description=__doc__)
    top = parser.add_subparsers(dest="command", required=True, metavar="command")
    leaves = {}

    def leaf(sub, name, handler, path, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        p.set_defaults(handler=handler, _cmd_path=path)
        leaves[path] = p
        return p

    p = leaf(top, "gen-net", _cmd_gen_net, "gen-net", help="generate a rewired regular network")
    p.add_argument("--n", type=int, help="node count")
    p.add_argument("--outdegree", type=int, help="outdegree of the regular base network")
    p.add_argument("--receiver-rewires", type=int, default=0)
    p.add_argument("--sender-rewires", type=int, default=0)

    sim = top.add_parser("simulate", help="draw outcomes from a generative model")
    sim_sub = sim.add_subparsers(dest="model", required=True, metavar="model")

    p = leaf(sim_sub, "sar", _cmd_simulate_sar, "simulate sar",
             help="continuous autoregressive outcomes")
    p.add_argument("--net", help="edge-list CSV")
    p.add_argument("--net-nodes", type=int, default=None, help="node count override")
    p.add_argument("--rho1", type=float)
    p.add_argument("--rho2", type=float, default=0.0)
    p.add_argument("--noise-sd", type=float, default=1.0)

    p = leaf(sim_sub, "ising", _cmd_simulate_ising, "simulate ising",
             help="binary outcomes from the pairwise-energy sampler")
    p.add_argument("--net", help="edge-list CSV")
    p.add_argument("--net-nodes", type=int, default=None)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--sweeps", type=int, default=1000)

    p = leaf(sim_sub, "panel", _cmd_simulate_panel, "simulate panel",
             help="binary longitudinal panel")
    p.add_argument("--net", help="edge-list CSV")
    p.add_argument("--net-nodes", type=int, default=None)
    p.add_argument("--waves", type=int)
    p.add_argument("--mu", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--delta", type=_float_list, default=())
    p.add_argument("--prevalence", type=float, default=0.5)

    fit = top.add_parser("fit", help="fit an estimator, writing term,estimate,std_error")
    fit_sub = fit.add_subparsers(dest="estimator", required=True, metavar="estimator")

    p = leaf(fit_sub, "ols", _cmd_fit_ols, "fit ols", help="least squares")
    p.add_argument("--design", help="CSV of predictor columns")
    p.add_argument("--y", help="outcome CSV")
    p.add_argument("--intercept", action=argparse.BooleanOptionalAction, default=True)

    p = leaf(fit_sub, "logistic", _cmd_fit_logistic, "fit logistic", help="logistic regression")
    p.add_argument("--design", help="CSV of predictor columns")
    p.add_argument("--y", help="outcome CSV")
    p.add_argument("--intercept", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--ridge", type=float, default=None,
                   help="penalty used only if separation is detected")

    p = leaf(fit_sub, "qad", _cmd_fit_qad, "fit qad",
             help="regression on forward and reverse exposure")
    p.add_argument("--net", help="edge-list CSV")
    p.add_argument("--net-nodes", type=int, default=None)
    p.add_argument("--y", help="outcome CSV")
    p.add_argument("--family", choices=("linear", "logistic"), default="linear")

    p = leaf(fit_sub, "sar-mle", _cmd_fit_sar_mle, "fit sar-mle",
             help="autoregressive maximum likelihood")
    p.add_argument("--net", help="edge-list CSV")
    p.add_argument("--net-nodes", type=int, default=None)
    p.add_argument("--z", help="continuous outcome CSV")
    p.add_argument("--mode", choices=("one-rho", "two-rho"), default="one-rho")

    p = leaf(fit_sub, "cf", _cmd_fit_cf, "fit cf", help="pooled transition logit")
    p.add_argument("--panel", help="panel CSV")
    p.add_argument("--net", default=None, help="edge-list CSV shared by all waves")
    p.add_argument("--net-nodes", type=int, default=None)
    p.add_argument("--networks", type=_str_list, default=None,
                   help="comma-separated per-wave edge-list CSVs")
    p.add_argument("--alter-terms", type=_str_list, default=("contemporaneous", "lag1"))
    p.add_argument("--ego-lag", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--stratify", choices=("none", "adopters", "non-adopters"), default="none")
    p.add_argument("--covariates", default="all", help="'all', 'none' or column indices")

    exp = top.add_parser("experiment", help="run a full experiment protocol")
    exp_sub = exp.add_subparsers(dest="experiment", required=True, metavar="experiment")

    p = leaf(exp_sub, "asymmetry-grid", _cmd_experiment_grid, "experiment asymmetry-grid",
             help="QAD differences over a rewiring grid")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--outdegree", type=int, default=1)
    p.add_argument("--sender-rewires", type=_int_list, default=(0, 50, 100, 150, 200))
    p.add_argument("--receiver-rewires", type=_int_list, default=(0, 50, 100, 150, 200))
    p.add_argument("--networks-per-cell", type=int, default=10)
    p.add_argument("--outcomes-per-network", type=int, default=100)
    p.add_argument("--rho-asym", type=_float_pair, default=(0.4, 0.0))
    p.add_argument("--rho-sym", type=_float_pair, default=(0.2, 0.2))
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.0)

    p = leaf(exp_sub, "wave-asymmetry", _cmd_experiment_waves, "experiment wave-asymmetry",
             help="fraction tables over observed networks")
    p.add_argument("--networks", type=_str_list, help="comma-separated edge-list CSVs")
    p.add_argument("--outcomes", type=int, default=1000)
    p.add_argument("--rho-asym", type=_float_pair, default=(0.4, 0.0))
    p.add_argument("--rho-sym", type=_float_pair, default=(0.2, 0.2))
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.0)

    p = leaf(exp_sub, "threshold-sweep", _cmd_experiment_sweep, "experiment threshold-sweep",
             help="transition models across dichotomization thresholds")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--outdegree", type=int, default=2)
    p.add_argument("--receiver-rewires", type=int, default=0)
    p.add_argument("--sender-rewires", type=int, default=0)
    p.add_argument("--waves", type=int, default=4)
    p.add_argument("--rho", type=float, default=0.2)
    p.add_argument("--persistence", type=float, default=0.85)
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--thresholds", type=_float_list,
                   default=(-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0),
                   help="comma-separated cut points; write --thresholds=-1,0,1 "
                        "when the first one is negative")
    p.add_argument("--models", type=_str_list, default=("M1", "M2", "M3"))

    return parser, leaves


def _load_config(path) -> dict:
    text = Path(path).read_text()
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        entries[key.strip().replace("-", "_")] = val.strip()
    return entries


def _apply_config(leaf_parser, entries: dict):
    actions = {
        a.dest: a
        for a in leaf_parser._actions
        if a.dest not in ("help", "config")
    }
    defaults = {}
    for key, raw in entries.items():
        if key == "config":
            raise ValueError("config files cannot set 'config'")
        if key not in actions:
            raise ValueError(f"unknown config key {key!r}; valid keys: {sorted(actions)}")
        action = actions[key]
        if isinstance(action, (argparse._StoreTrueAction, argparse.BooleanOptionalAction)):
            defaults[key] = _parse_bool(raw)
        elif action.type is not None:
            defaults[key] = action.type(raw)
        else:
            defaults[key] = raw
    leaf_parser.set_defaults(**defaults)


def main(argv=None) -> int:
    parser, leaves = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            _apply_config(leaves[args._cmd_path], _load_config(args.config))
            args = parser.parse_args(argv)
        args.handler(args)
    except (ValueError, KeyError, OSError, RuntimeError, np.linalg.LinAlgError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
