"""Command-line front end: ``estimate``, ``simulate``, ``mise`` and ``tables``.

Configuration files hold one ``key = value`` per line (``#`` starts a
comment) with keys taken from :class:`~mellinsurv.risk.ExperimentSpec` plus
``out`` and ``threads``. A JSON sidecar written by this tool is accepted as a
configuration too, which makes every run reproducible from its metadata.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import fields

import numpy as np

from . import __version__
from .adaptive import PenaltyConfig, adaptive_estimate, estimate_from_path
from .errors import (
    DegenerateEstimate,
    DomainError,
    ExperimentFailure,
    G0Violation,
    UnsupportedConfiguration,
)
from .estimator import EstimatorConfig, SpectralPath, clip
from .mellin import TGrid
from .models import get_error
from .risk import ExperimentSpec, MiseResult, draw_sample, replication_rng, run_experiment, stderr_progress

MISE_HEADER = (
    "target", "error", "dependence", "n", "m", "rho", "chi", "variant",
    "reps", "mise_x100", "se_x100", "mean_k_hat", "excluded",
)
EXTRA_KEYS = ("out", "threads")
TABLE_N = (500, 1000, 2000)
TABLE1_TARGETS = ("gamma_4_05", "weibull_2", "beta_4_5_scaled", "loggamma_0_4_3")
TABLE2_M = (1, 4)
TABLE2_RHO = (0.1, 0.5, 0.9)


class UsageError(Exception):
    """Bad command line, configuration or input file (exit code 2)."""


# ---------------------------------------------------------------------------
# formatting

def fmt(value) -> str:
    """Shortest round-trip text for numbers; booleans and strings verbatim."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    _emit(path, buf.getvalue())


def _emit(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _write_json(path, payload) -> None:
    if path in (None, "-"):
        return
    with open(path + ".json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


# ---------------------------------------------------------------------------
# configuration

_SPEC_TYPES = {f.name: f.type for f in fields(ExperimentSpec)}


def _coerce(key: str, text: str):
    kind = _SPEC_TYPES.get(key, "str")
    try:
        if kind == "int" or key == "threads":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            low = text.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(text)
    except ValueError:
        raise UsageError(f"config key {key!r}: cannot parse {text!r} as {kind}") from None
    return text


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; unknown keys are rejected."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        out.update(_config_item(key, value, f"config line {lineno}"))
    return out


def _config_item(key: str, value, where: str) -> dict:
    if key == "k" and isinstance(value, str) and value.lower() == "adaptive":
        return {"k_mode": "adaptive"}
    if key not in _SPEC_TYPES and key not in EXTRA_KEYS:
        raise UsageError(f"{where}: unknown config key {key!r}")
    return {key: _coerce(key, value) if isinstance(value, str) else value}


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    if path.endswith(".json"):
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path}: invalid JSON ({exc.msg})") from None
        cfg = payload.get("config", payload)
        out = {}
        for key, value in cfg.items():
            if key in ("which", "version"):
                continue
            out.update(_config_item(key, value, f"config {path}"))
        return out
    return parse_config_text(text)


def _overrides(args) -> dict:
    out = {}
    for flag, key in (("seed", "seed"), ("chi", "chi"), ("variant", "variant"), ("error", "error"),
                      ("target", "target"), ("n", "n"), ("reps", "reps")):
        value = getattr(args, flag, None)
        if value is not None:
            out[key] = value
    k = getattr(args, "k", None)
    if k is not None:
        if k == "adaptive":
            out["k_mode"] = "adaptive"
        else:
            out["k_mode"], out["k"] = "fixed", _parse_k(k)
    for item in getattr(args, "set", None) or ():
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = (p.strip() for p in item.split("=", 1))
        out.update(_config_item(key, value, "--set"))
    return out


def _parse_k(text: str) -> float:
    try:
        k = float(text)
    except ValueError:
        raise UsageError(f"--k expects a positive number or 'adaptive', got {text!r}") from None
    if not k > 0:
        raise UsageError("--k must be positive")
    return k


def build_spec(settings: dict) -> ExperimentSpec:
    spec_kw = {k: v for k, v in settings.items() if k in _SPEC_TYPES}
    try:
        return ExperimentSpec(**spec_kw)
    except KeyError as exc:
        raise UsageError(str(exc.args[0]) if exc.args else str(exc)) from None
    except (DomainError, UnsupportedConfiguration, TypeError) as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# data files

def read_observations(path) -> np.ndarray:
    """One positive decimal number per line; blank lines are skipped."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise UsageError(f"{path}: not valid UTF-8") from None
    values = []
    for lineno, line in enumerate(text.split("\n"), 1):
        item = line.strip()
        if not item:
            continue
        try:
            v = float(item)
        except ValueError:
            raise UsageError(f"line {lineno}: not a number: {item!r}") from None
        if not (v > 0 and math.isfinite(v)):
            raise UsageError(f"line {lineno}: observation must be positive and finite, got {item!r}")
        values.append(v)
    if not values:
        raise UsageError("empty sample")
    return np.array(values)


# ---------------------------------------------------------------------------
# commands

def cmd_estimate(args) -> int:
    y = read_observations(args.data)
    settings = {"error": "unif_0_1", "variant": "clipped", "k_mode": "adaptive"}
    settings.update(load_config(args.config))
    settings.update(_overrides(args))
    try:
        err = get_error(settings["error"])
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    x_max = args.x_max if args.x_max is not None else 2.0 * float(np.max(y))
    ecfg_kw = dict(t_step=settings.get("t_step", 1.0 / 128), x_min=settings.get("x_min", 1e-3),
                   x_max=x_max, n_x=settings.get("n_x", 2000))
    try:
        pcfg = PenaltyConfig(settings.get("chi", 2.0), settings.get("use_theoretical_chi", False),
                             settings.get("kn_rule", "delta_le_n"))
        heuristic = settings.get("variant") == "heuristic"
        if settings.get("k_mode") == "fixed":
            k = float(settings["k"])
            ecfg = EstimatorConfig(**ecfg_kw, k_max=k)
            xs = ecfg.x_grid()
            path = SpectralPath(y, err, TGrid.for_cutoff(k, ecfg.t_step))
            k = path.grid.half_width
            raw = path.estimate(k, xs)
            sel = None
        else:
            ecfg = EstimatorConfig(**ecfg_kw)
            xs = ecfg.x_grid()
            raw, sel = adaptive_estimate(y, err, pcfg, ecfg, variant="raw")
            k = sel.k_hat
        columns = [xs, raw.values, clip(raw).values]
        header = ["x", "survival_raw", "survival_clipped"]
        if heuristic:
            if sel is not None:
                path = SpectralPath(y, err, TGrid(float(k), ecfg.t_step))
            columns.append(estimate_from_path(path, k, xs, "heuristic").values)
            header.append("survival_heuristic")
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    _write_csv(args.out, header, zip(*columns))
    echo = {key: settings.get(key) for key in ("error", "variant", "k_mode", "k", "chi",
                                               "use_theoretical_chi", "kn_rule") if key in settings}
    echo.update(chi=pcfg.effective_chi, use_theoretical_chi=pcfg.use_theoretical, kn_rule=pcfg.kn_rule,
                t_step=ecfg.t_step, x_min=ecfg.x_min, x_max=ecfg.x_max, n_x=ecfg.n_x)
    _write_json(args.out, {
        "version": __version__,
        "command": "estimate",
        "data": args.data,
        "n": int(y.size),
        "k_hat": k,
        "chi": pcfg.effective_chi,
        "sigma_y_hat": float(np.mean(y)),
        "config": echo,
    })
    return 0


def cmd_simulate(args) -> int:
    settings = load_config(args.config)
    settings.update(_overrides(args))
    spec = build_spec(settings)
    y = draw_sample(spec, replication_rng(spec.seed, 0))
    _emit(settings.get("out", args.out), "".join(repr(float(v)) + "\n" for v in y))
    _write_json(settings.get("out", args.out), {
        "version": __version__,
        "command": "simulate",
        "seed": spec.seed,
        "config": spec.as_dict(),
    })
    return 0


def _row(res: MiseResult):
    s = res.spec
    ar1 = s.dependence == "ar1_gamma"
    return (
        s.truth_label(), s.error, s.dependence, s.n,
        s.m if ar1 else "", s.rho if ar1 else "",
        s.penalty_config().effective_chi, s.variant, s.reps,
        100.0 * res.mean, 100.0 * res.se, res.mean_k_hat, res.excluded,
    )


def _result_json(res: MiseResult) -> dict:
    return {
        "config": res.spec.as_dict(),
        "mise": res.mean,
        "se": res.se,
        "mean_k_hat": res.mean_k_hat,
        "excluded": res.excluded,
        "failures": list(res.failures),
    }


def _threads(args, settings):
    return args.threads if args.threads is not None else settings.get("threads")


def cmd_mise(args) -> int:
    settings = load_config(args.config)
    settings.update(_overrides(args))
    spec = build_spec(settings)
    res = run_experiment(spec, _threads(args, settings), stderr_progress if args.progress else None)
    out = settings.get("out", args.out)
    _write_csv(out, MISE_HEADER, [_row(res)])
    payload = {"version": __version__, "command": "mise"}
    payload.update(_result_json(res))
    _write_json(out, payload)
    return 0


def table_specs(which: int, settings: dict) -> list[ExperimentSpec]:
    """The grid of a table, in row order, with ``settings`` applied to every cell."""
    base = {k: v for k, v in settings.items() if k in _SPEC_TYPES}
    base.setdefault("error", "unif_0_1")
    specs = []
    if which == 1:
        for target in TABLE1_TARGETS:
            for n in TABLE_N:
                specs.append(build_spec({**base, "dependence": "iid", "target": target, "n": n}))
    elif which == 2:
        for m in TABLE2_M:
            for rho in TABLE2_RHO:
                for n in TABLE_N:
                    specs.append(build_spec({**base, "dependence": "ar1_gamma", "m": m,
                                             "lam": base.get("lam", 1.0), "rho": rho, "n": n}))
    else:
        raise UsageError("table must be 1 or 2")
    return specs


def cmd_tables(args) -> int:
    settings = load_config(args.config)
    settings.update(_overrides(args))
    for fixed in ("target", "n", "dependence", "m", "rho"):
        if fixed in settings:
            raise UsageError(f"{fixed!r} is set by the table layout and cannot be overridden")
    specs = table_specs(args.which, settings)
    threads = _threads(args, settings)
    results = []
    for i, spec in enumerate(specs, 1):
        if args.progress:
            sys.stderr.write(f"cell {i}/{len(specs)}: {spec.truth_label()} n={spec.n}\n")
        results.append(run_experiment(spec, threads, stderr_progress if args.progress else None))
    out = settings.get("out", args.out)
    _write_csv(out, MISE_HEADER, [_row(r) for r in results])
    overrides = {k: v for k, v in settings.items() if k in _SPEC_TYPES}
    _write_json(out, {
        "version": __version__,
        "command": "tables",
        "config": {"which": args.which, **overrides},
        "cells": [_result_json(r) for r in results],
    })
    return 0


# ---------------------------------------------------------------------------
# entry point

def _common(p, *, simulation: bool) -> None:
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--seed", type=int, metavar="U64")
    p.add_argument("--chi", type=float, metavar="F")
    p.add_argument("--k", metavar="INT|adaptive")
    p.add_argument("--variant", choices=("raw", "clipped", "heuristic"))
    p.add_argument("--error", metavar="KEY")
    p.add_argument("--out", metavar="PATH", default=None)
    p.add_argument("--threads", type=int, metavar="N")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")
    if simulation:
        p.add_argument("--target", metavar="KEY")
        p.add_argument("--n", type=int)
        p.add_argument("--reps", type=int)
        p.add_argument("--progress", action="store_true", help="per-replication counter on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mellinsurv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate a survival function from observations")
    p.add_argument("data", help="file with one positive observation per line")
    p.add_argument("--x-max", type=float, default=None, help="right end of the x-grid (default 2*max)")
    _common(p, simulation=False)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="draw contaminated observations")
    _common(p, simulation=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mise", help="Monte Carlo MISE of one configuration")
    _common(p, simulation=True)
    p.set_defaults(func=cmd_mise)

    p = sub.add_parser("tables", help="reproduce a simulation table")
    p.add_argument("which", type=int, choices=(1, 2))
    _common(p, simulation=True)
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError, UnsupportedConfiguration) as exc:
        print(f"mellinsurv: error: {exc}", file=sys.stderr)
        return 2
    except (G0Violation, DegenerateEstimate, ExperimentFailure) as exc:
        print(f"mellinsurv: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
