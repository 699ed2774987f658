"""Command-line interface.

Every option can also come from a flat ``key = value`` config file passed
with ``--config``; keys are the long option names (dashes or underscores).
Precedence is built-in default < config file < command-line flag.  Unknown
keys are rejected before anything runs.

Exit codes: 0 success, 2 configuration error, 3 data error,
4 non-convergence (outputs are still written).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .core import GridFunction, evaluate
from .dataio import (ConfigError, DataError, emit_results, load_dataset, read_draws,
                     read_grid_csv, svg_plot, write_grid_csv, write_inspections,
                     write_intervals, write_manifest, write_table)
from .evaluation import ise, pointwise_log_mse, summarize_replicates
from .frequentist import EMConfig, concave_mle, npmle
from .gibbs import ChainConfig, PriorConfig, quantile_bands, run_chain
from .simulate import EVENT_LAWS, SimConfig, event_cdf, generate

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NONCONVERGED = 0, 2, 3, 4


def _floats(text):
    return tuple(float(v) for v in str(text).split(",") if v.strip())


def _strings(text):
    if isinstance(text, (list, tuple)):
        return tuple(text)
    return tuple(v.strip() for v in str(text).split(",") if v.strip())


def _bool(text):
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_REQUIRED = object()

COMMON = {
    "seed": (int, 0),
    "out": (str, _REQUIRED),
    "format": (_strings, ("csv", "json", "svg")),
    "timings": (_bool, False),
}
GRID = {"grid_step": (float, 0.01), "grid_max": (float, 8.0)}
DATA = {"data": (str, _REQUIRED), "treat_as_inf": (float, None),
        "survival": (_bool, False), "truth": (str, None)}
SIM = {"n": (int, 100), "k_max": (int, 20), "k_fixed": (int, None),
       "inspection_law": (str, "gamma"), "inspection_params": (_floats, (2.0, 1.0)),
       "event_law": (str, "exponential")}
CHAIN = {"alpha": (float, 1.0), "base_shape": (float, 2.0), "base_rate": (float, 1.0),
         "n_iter": (int, 30000), "burn_in": (int, 15000), "thin": (int, 10),
         "trace_at": (float, 1.0), "lower_q": (float, 0.025), "upper_q": (float, 0.975)}
EM = {"tol": (float, 1e-8), "max_iter": (int, 50000), "method": (str, "cnm")}

SCHEMAS = {
    "simulate": {**COMMON, **SIM},
    "fit-bayes": {**COMMON, **GRID, **DATA, **CHAIN, "save_draws": (_bool, False)},
    "fit-npmle": {**COMMON, **GRID, **DATA, **EM},
    "fit-cmle": {**COMMON, **GRID, **DATA, **EM},
    "evaluate": {**COMMON, "estimates": (_strings, _REQUIRED), "truth": (str, _REQUIRED)},
    "compare": {**COMMON, **GRID, **SIM, **CHAIN, **EM, "n": (int, 200),
                "replicates": (int, 10)},
    "bands": {**COMMON, "draws": (str, _REQUIRED), "lower_q": (float, 0.025),
              "upper_q": (float, 0.975), "survival": (_bool, False)},
}

HELP = {
    "simulate": "simulate a mixed-case interval-censored dataset",
    "fit-bayes": "posterior mean and pointwise credible bands by Gibbs sampling",
    "fit-npmle": "unconstrained nonparametric MLE",
    "fit-cmle": "maximum likelihood estimate under concavity",
    "evaluate": "pointwise log-MSE and ISE of estimates against a truth",
    "compare": "replicated simulation comparing all three estimators",
    "bands": "quantile bands from stored posterior draws",
}


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def resolve_config(command: str, file_values: dict, flag_values: dict) -> dict:
    """Merge defaults, config file and flags; validate against the command schema."""
    schema = SCHEMAS[command]
    unknown = sorted((set(file_values) | set(flag_values)) - set(schema))
    if unknown:
        raise ConfigError(f"unknown keys for {command}: {', '.join(unknown)}")
    resolved = {}
    for key, (kind, default) in schema.items():
        if key in flag_values:
            raw = flag_values[key]
        elif key in file_values:
            raw = file_values[key]
        elif default is _REQUIRED:
            raise ConfigError(f"{command}: missing required option --{key.replace('_', '-')}")
        else:
            resolved[key] = default
            continue
        try:
            resolved[key] = kind(raw) if raw is not None else None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{command}: bad value for {key}: {exc}") from None
    return resolved


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="concavecdf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for command, schema in SCHEMAS.items():
        p = sub.add_parser(command, help=HELP[command], argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="flat key = value config file")
        for key, (kind, default) in schema.items():
            flag = "--" + key.replace("_", "-")
            shown = "required" if default is _REQUIRED else f"default {default}"
            if kind is _bool:
                p.add_argument(flag, dest=key, action="store_true", help=shown)
            elif key == "estimates":
                p.add_argument(flag, dest=key, nargs="+", help=shown)
            else:
                p.add_argument(flag, dest=key, help=shown)
    return parser


def make_grid(cfg) -> np.ndarray:
    step, top = cfg["grid_step"], cfg["grid_max"]
    if not (step > 0 and top >= step):
        raise ConfigError("need 0 < grid_step <= grid_max")
    return step * np.arange(1, int(round(top / step)) + 1)


def _sim_config(cfg, n=None) -> SimConfig:
    try:
        return SimConfig(n=cfg["n"] if n is None else n, k_max=cfg["k_max"],
                         k_fixed=cfg["k_fixed"], inspection_law=cfg["inspection_law"],
                         inspection_params=cfg["inspection_params"],
                         event_law=cfg["event_law"], seed=cfg["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _prior(cfg) -> PriorConfig:
    try:
        return PriorConfig(cfg["alpha"], cfg["base_shape"], cfg["base_rate"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _chain(cfg, grid, replicate=0) -> ChainConfig:
    try:
        return ChainConfig(n_iter=cfg["n_iter"], burn_in=cfg["burn_in"], grid=grid,
                           thin=cfg["thin"], seed=cfg["seed"], replicate=replicate,
                           record_trace_at=cfg["trace_at"],
                           quantiles=(cfg["lower_q"], cfg["upper_q"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _em(cfg) -> EMConfig:
    try:
        return EMConfig(tol=cfg["tol"], max_iter=cfg["max_iter"], method=cfg["method"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _truth(name):
    if name is None:
        return None
    if name not in EVENT_LAWS:
        raise ConfigError(f"unknown truth {name!r}; choose from {EVENT_LAWS}")
    return event_cdf(name)


def _manifest(command, cfg, started, **extra):
    out = {"command": command, "config": cfg, "seed": cfg["seed"], "version": __version__}
    if cfg.get("timings"):
        out["runtime_seconds"] = round(time.perf_counter() - started, 3)
    out.update(extra)
    return out


def cmd_simulate(cfg, started):
    config = _sim_config(cfg)
    records, events = generate(config)
    out = Path(cfg["out"])
    if "csv" in cfg["format"]:
        write_inspections(records, out / "data.txt")
        write_intervals(records, out / "intervals.csv")
        write_table(out / "true_events.csv", ["x"], ([x] for x in events))
    if "json" in cfg["format"]:
        write_manifest(out / "manifest.json", _manifest(
            "simulate", cfg, started, files=["data.txt", "intervals.csv", "true_events.csv"]))
    return EXIT_OK


def cmd_fit_bayes(cfg, started):
    records = load_dataset(cfg["data"], cfg["treat_as_inf"])
    summary = run_chain(records, _prior(cfg), _chain(cfg, make_grid(cfg)))
    emit_results(summary, cfg["out"], cfg["format"], survival=cfg["survival"],
                 truth=_truth(cfg["truth"]), save_draws=cfg["save_draws"],
                 manifest=_manifest("fit-bayes", cfg, started, n=len(records)))
    return EXIT_OK


def _cmd_fit_freq(command, estimator):
    def run(cfg, started):
        records = load_dataset(cfg["data"], cfg["treat_as_inf"])
        result = estimator(records, _em(cfg))
        emit_results(result, cfg["out"], cfg["format"], grid=make_grid(cfg),
                     survival=cfg["survival"], truth=_truth(cfg["truth"]),
                     manifest=_manifest(command, cfg, started, n=len(records)))
        return EXIT_OK if result.converged else EXIT_NONCONVERGED
    return run


def _truth_on(name_or_path, grid) -> GridFunction:
    if name_or_path in EVENT_LAWS:
        return GridFunction(grid, evaluate(event_cdf(name_or_path), grid))
    truth = read_grid_csv(name_or_path)
    if not np.array_equal(truth.grid, grid):
        raise DataError("truth grid differs from the estimate grid")
    return truth


def cmd_evaluate(cfg, started):
    estimates = [read_grid_csv(p) for p in cfg["estimates"]]
    grid = estimates[0].grid
    truth = _truth_on(cfg["truth"], grid)
    try:
        log_mse = pointwise_log_mse(estimates, truth)
        errors = [ise(e, truth) for e in estimates]
    except ValueError as exc:
        raise DataError(str(exc)) from None
    out = Path(cfg["out"])
    if "csv" in cfg["format"]:
        write_grid_csv(out / "log_mse.csv", grid, log_mse.values)
        write_table(out / "ise.csv", ["estimate", "ise"], zip(cfg["estimates"], errors))
    if "svg" in cfg["format"]:
        svg_plot(out / "plot.svg", [dict(x=grid, y=log_mse.values, label="log MSE")],
                 title="pointwise log MSE", ylabel="log MSE")
    if "json" in cfg["format"]:
        write_manifest(out / "manifest.json", _manifest(
            "evaluate", cfg, started, mean_ise=summarize_replicates(errors)))
    return EXIT_OK


ESTIMATORS = ("npmle", "cmle", "posterior_mean")


def cmd_compare(cfg, started):
    grid = make_grid(cfg)
    sim = _sim_config(cfg)
    truth = GridFunction(grid, evaluate(event_cdf(sim.event_law), grid))
    em, prior = _em(cfg), _prior(cfg)
    fits = {name: [] for name in ESTIMATORS}
    rows, converged = [], True
    for rep in range(cfg["replicates"]):
        records, _ = generate(sim, replicate=rep)
        np_fit = npmle(records, em)
        cm_fit = concave_mle(records, em)
        converged &= np_fit.converged and cm_fit.converged
        chain = run_chain(records, prior, _chain(cfg, grid, replicate=rep))
        values = {"npmle": np_fit.cdf(grid), "cmle": cm_fit.cdf(grid),
                  "posterior_mean": chain.mean_cdf}
        for name in ESTIMATORS:
            est = GridFunction(grid, values[name])
            fits[name].append(est)
            rows.append((rep, name, ise(est, truth)))
    log_mse = {name: pointwise_log_mse(fits[name], truth).values for name in ESTIMATORS}
    mise = {name: summarize_replicates(e for _, nm, e in rows if nm == name)
            for name in ESTIMATORS}
    out = Path(cfg["out"])
    if "csv" in cfg["format"]:
        write_table(out / "log_mse.csv", ["t", *ESTIMATORS],
                    zip(grid.tolist(), *(log_mse[n].tolist() for n in ESTIMATORS)))
        write_table(out / "ise.csv", ["replicate", "estimator", "ise"], rows)
        write_table(out / "mise.csv", ["estimator", "mean_ise"],
                    ((n, mise[n]) for n in ESTIMATORS))
    if "svg" in cfg["format"]:
        svg_plot(out / "plot.svg",
                 [dict(x=grid, y=log_mse[n], label=n) for n in ESTIMATORS],
                 title=f"log MSE, n={sim.n}, {cfg['replicates']} replicates", ylabel="log MSE")
    if "json" in cfg["format"]:
        write_manifest(out / "manifest.json", _manifest(
            "compare", cfg, started, mean_ise=mise, converged=converged))
    return EXIT_OK if converged else EXIT_NONCONVERGED


def cmd_bands(cfg, started):
    grid, draws = read_draws(cfg["draws"])
    try:
        lo, hi = quantile_bands(draws, (cfg["lower_q"], cfg["upper_q"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    mean = draws.mean(axis=0)
    if cfg["survival"]:
        mean, lo, hi = 1.0 - mean, 1.0 - hi, 1.0 - lo
    out = Path(cfg["out"])
    if "csv" in cfg["format"]:
        write_grid_csv(out / "bands.csv", grid, mean, lo, hi)
    if "svg" in cfg["format"]:
        svg_plot(out / "plot.svg", [dict(x=grid, y=mean, label="mean of draws"),
                                    dict(x=grid, y=lo, label="lower", dash=True),
                                    dict(x=grid, y=hi, label="upper", dash=True)],
                 title="pointwise bands", ylim=(0.0, 1.0))
    if "json" in cfg["format"]:
        write_manifest(out / "manifest.json", _manifest(
            "bands", cfg, started, n_draws=int(draws.shape[0])))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "fit-bayes": cmd_fit_bayes,
    "fit-npmle": _cmd_fit_freq("fit-npmle", npmle),
    "fit-cmle": _cmd_fit_freq("fit-cmle", concave_mle),
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "bands": cmd_bands,
}


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    started = time.perf_counter()
    try:
        file_values = read_config_file(args.pop("config")) if "config" in args else {}
        cfg = resolve_config(command, file_values, args)
        unknown = set(cfg["format"]) - {"csv", "json", "svg"}
        if unknown:
            raise ConfigError(f"unknown output formats {sorted(unknown)}")
        return COMMANDS[command](cfg, started)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
