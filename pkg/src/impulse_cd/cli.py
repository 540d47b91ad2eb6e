"""
Command-line front end.

    impulse-cd run    --model lz --mode impulse --tauq 5 --out results/
    impulse-cd sweep  --preset fig4 --out fig4.csv
    impulse-cd window --model tfim-momentum --tauq 10
    impulse-cd cost   --model lz --tauq 5

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import lz, tfim
from .kzm import impulse_window_generic
from .numerics import NumericsError
from .protocol import (
    ControlMode,
    LzModel,
    TfimMomentumModel,
    TfimSpinModel,
    energetics,
    mode_window,
    run_protocol,
)

MODELS = ("lz", "tfim-momentum", "tfim-spin")
MODES = ("none", "full", "impulse", "window")
DEFAULT_G0 = {"lz": -10.0, "tfim-momentum": 0.0, "tfim-spin": 0.01}
SWEEP_AXES = ("mode", "n", "trunc", "tauq", "eta")
RESULT_COLUMNS = ("final_fidelity", "C", "deltaE", "ratio")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str = "lz"
    mode: str = "impulse"
    tauq: float = 5.0
    g0: Optional[float] = None
    delta: float = 1.0
    omega: float = 1.0
    n: int = 16
    trunc: Optional[int] = None
    m: Optional[float] = None
    eta: Optional[float] = None
    steps: Optional[int] = None
    samples: int = 1000
    out: Optional[str] = None

    def resolved(self) -> "RunConfig":
        cfg = self
        if cfg.g0 is None:
            cfg = replace(cfg, g0=DEFAULT_G0.get(cfg.model, 0.0))
        if cfg.model == "tfim-spin" and cfg.trunc is None:
            cfg = replace(cfg, trunc=cfg.n // 2)
        return cfg

    def validate(self) -> "RunConfig":
        cfg = self.resolved()
        if cfg.model not in MODELS:
            raise ConfigError(f"unknown model {cfg.model!r}; choose from {', '.join(MODELS)}")
        if cfg.mode not in MODES:
            raise ConfigError(f"unknown mode {cfg.mode!r}; choose from {', '.join(MODES)}")
        if not (math.isfinite(cfg.tauq) and cfg.tauq > 0):
            raise ConfigError("--tauq must be positive")
        if cfg.mode == "window":
            if cfg.eta is None:
                raise ConfigError("--mode window requires --eta")
            if not 0 <= cfg.eta <= 0.5 * cfg.tauq:
                raise ConfigError("--eta must lie in [0, tauq/2]")
        if cfg.m is not None and not cfg.m > 0:
            raise ConfigError("--m must be positive")
        if cfg.steps is not None and cfg.steps < 1:
            raise ConfigError("--steps must be >= 1")
        if cfg.model == "lz":
            if cfg.delta <= 0:
                raise ConfigError("--delta must be positive")
            if cfg.g0 >= 0:
                raise ConfigError("Landau-Zener runs need g0 < 0")
        else:
            if cfg.omega <= 0:
                raise ConfigError("--omega must be positive")
            if cfg.n < 2 or cfg.n % 2:
                raise ConfigError("--n must be a positive even integer")
            if cfg.g0 >= 1 or cfg.g0 < 0:
                raise ConfigError("Ising runs need 0 <= g0 < 1")
        if cfg.model == "tfim-spin":
            if cfg.n > tfim.MAX_SPIN_SITES:
                raise ConfigError(f"--n must be <= {tfim.MAX_SPIN_SITES} for the spin basis")
            if not 1 <= cfg.trunc <= cfg.n // 2:
                raise ConfigError("--trunc must lie in [1, N/2]")
        return cfg


def build_model(cfg: RunConfig):
    if cfg.model == "lz":
        return LzModel(lz.LzParams.create(cfg.tauq, g0=cfg.g0, delta=cfg.delta))
    params = tfim.TfimParams.create(cfg.n, cfg.tauq, g0=cfg.g0, omega=cfg.omega)
    if cfg.model == "tfim-momentum":
        return TfimMomentumModel(params)
    return TfimSpinModel(params, cfg.trunc)


def build_mode(cfg: RunConfig) -> ControlMode:
    if cfg.mode == "window":
        return ControlMode.fixed_window(cfg.eta, m=cfg.m)
    if cfg.mode == "impulse":
        return ControlMode.impulse(m=cfg.m)
    return ControlMode(cfg.mode)


# --- formatting -------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".12g")


def _rounded(obj):
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(format(float(obj), ".12g"))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_rounded(obj), indent=2, sort_keys=True) + "\n"


def _write(path: str, text: str) -> None:
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# --- commands ---------------------------------------------------------------

def simulate(cfg: RunConfig) -> Dict:
    """Run one configuration; returns the summary plus trace columns."""
    model = build_model(cfg)
    mode = build_mode(cfg)
    trace, report = run_protocol(model, mode, steps=cfg.steps, samples=cfg.samples)
    window = trace.window if trace.window is not None else model.impulse_window()
    summary = {
        "config": {k: v for k, v in asdict(cfg).items() if k != "out"},
        "final_fidelity": trace.final_fidelity,
        "infidelity": trace.infidelity,
        "max_norm_drift": trace.max_norm_drift,
        "C": report.cost,
        "deltaE": report.delta_e,
        "ratio": report.ratio,
        "lower_bound": report.lower_bound,
        "window": window.as_dict(),
        "analytic": report.analytic,
    }
    return {"summary": summary, "trace": trace}


def trace_csv(trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "fidelity", "switching", "norm_drift"])
    for row in zip(trace.times, trace.fidelity, trace.switching, trace.norm_drift):
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def cmd_run(cfg: RunConfig) -> int:
    result = simulate(cfg)
    text = dumps(result["summary"])
    if cfg.out:
        _write(os.path.join(cfg.out, "trace.csv"), trace_csv(result["trace"]))
        _write(os.path.join(cfg.out, "summary.json"), text)
    sys.stdout.write(text)
    return 0


def window_info(cfg: RunConfig) -> Dict:
    model = build_model(cfg)
    w = model.impulse_window()
    out = {"t_minus": w.t_minus, "t_plus": w.t_plus, "mu": w.half_width}
    if cfg.model == "lz":
        p = model.params
        generic = impulse_window_generic(p.schedule, lambda g: lz.gap_of_field(p, g))
        out["t_minus_bisection"] = generic.t_minus
        out["t_plus_bisection"] = generic.t_plus
    return out


def cost_info(cfg: RunConfig) -> Dict:
    model = build_model(cfg)
    mode = build_mode(cfg)
    report = energetics(model, mode)
    w = mode_window(model, mode) or model.impulse_window()
    return {
        "C": report.cost,
        "deltaE": report.delta_e,
        "ratio": report.ratio,
        "lower_bound": report.lower_bound,
        "window": w.as_dict(),
        "analytic": report.analytic,
    }


# --- sweeps -----------------------------------------------------------------

def _fig1c_points() -> List[Dict]:
    points = []
    for tq in (0.5, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0, 15.0, 20.0, 25.0):
        mu = lz.lz_impulse_half_width(lz.LzParams.create(tq))
        etas = sorted({*(0.5 * tq * f for f in np.linspace(0.0, 1.0, 11)), mu})
        points += [{"mode": "window", "tauq": tq, "eta": eta} for eta in etas]
    return points


def _fig2cd_points() -> List[Dict]:
    return [{"mode": mode, "n": n, "tauq": tq}
            for mode in ("none", "impulse")
            for n in (4, 8, 12, 16, 20, 24)
            for tq in (1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 15.0, 20.0, 25.0, 30.0)]


def _fig3_points() -> List[Dict]:
    taus = [float(format(x, ".6g")) for x in np.logspace(-1, 2, 16)]
    return [{"mode": mode, "tauq": tq} for mode in ("none", "impulse") for tq in taus]


def _fig4_points() -> List[Dict]:
    points = []
    for mode in ("full", "impulse"):
        for trunc in (0, 1, 2, 3):
            for tq in (0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0):
                points.append({"mode": "none" if trunc == 0 else mode, "trunc": trunc, "tauq": tq,
                               "protocol": mode})
    return points


PRESETS = {
    "fig1c": ({"model": "lz"}, _fig1c_points),
    "fig2cd": ({"model": "tfim-momentum"}, _fig2cd_points),
    "fig3": ({"model": "lz"}, _fig3_points),
    "fig4": ({"model": "tfim-spin", "n": 6, "g0": 0.01}, _fig4_points),
}


def _split(value: str, cast):
    try:
        return [cast(v) for v in str(value).split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse list {value!r}: {exc}") from exc


def grid_points(raw: Dict) -> List[Dict]:
    """Cartesian product of comma-separated axis values in ``raw``."""
    casts = {"mode": str, "n": int, "trunc": int, "tauq": float, "eta": float}
    axes = {a: _split(raw[a], casts[a]) for a in SWEEP_AXES if raw.get(a) is not None}
    if not axes or any(len(v) == 0 for v in axes.values()):
        raise ConfigError("sweep grid is empty")
    names = list(axes)
    return [dict(zip(names, combo)) for combo in itertools.product(*(axes[n] for n in names))]


def _point_config(base: RunConfig, point: Dict) -> RunConfig:
    fields = {k: v for k, v in point.items() if k in SWEEP_AXES}
    if fields.get("trunc") == 0:
        fields["trunc"] = None
        fields["mode"] = "none"
    return replace(base, **fields).validate()


def _sweep_row(args) -> Dict:
    base, point = args
    cfg = _point_config(base, point)
    model = build_model(cfg)
    trace, report = run_protocol(model, build_mode(cfg), steps=cfg.steps, samples=min(cfg.samples, 10),
                                 lower_bound=False)
    return {"final_fidelity": trace.final_fidelity, "C": report.cost, "deltaE": report.delta_e,
            "ratio": report.ratio}


def _sort_key(point: Dict):
    return tuple((str(point[a]) if a in ("mode", "protocol") else float(point[a])) if a in point else ""
                 for a in ("protocol",) + SWEEP_AXES)


def sweep(base: RunConfig, points: Sequence[Dict], jobs: int = 1) -> str:
    if not points:
        raise ConfigError("sweep grid is empty")
    points = sorted(points, key=_sort_key)
    for pt in points:
        _point_config(base, pt)
    work = [(base, pt) for pt in points]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, work))
    else:
        rows = [_sweep_row(w) for w in work]
    axes = [a for a in ("protocol",) + SWEEP_AXES if any(a in p for p in points)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", *axes, *RESULT_COLUMNS])
    for pt, row in zip(points, rows):
        w.writerow([base.model, *(fmt(pt.get(a)) for a in axes), *(fmt(row[c]) for c in RESULT_COLUMNS)])
    return buf.getvalue()


# --- argument handling ------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="impulse-cd", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "sweep", "window", "cost"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with flat keys matching the flags")
        p.add_argument("--model")
        p.add_argument("--mode")
        p.add_argument("--g0", type=float)
        p.add_argument("--delta", type=float)
        p.add_argument("--omega", type=float)
        p.add_argument("--m", type=float)
        p.add_argument("--steps", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--out")
        if name == "sweep":
            # comma-separated lists
            p.add_argument("--tauq")
            p.add_argument("--n")
            p.add_argument("--trunc")
            p.add_argument("--eta")
            p.add_argument("--preset", choices=sorted(PRESETS))
            p.add_argument("--jobs", type=int, default=1)
        else:
            p.add_argument("--tauq", type=float)
            p.add_argument("--n", type=int)
            p.add_argument("--trunc", type=int)
            p.add_argument("--eta", type=float)
    return parser


def _load_config(path: Optional[str]) -> Dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data


def _merged(args: argparse.Namespace) -> Dict:
    raw = _load_config(args.config)
    unknown = set(raw) - set(RunConfig.__dataclass_fields__) - {"preset", "jobs"}
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key, value in vars(args).items():
        if key not in ("command", "config") and value is not None:
            raw[key] = value
    return raw


def _scalar_config(raw: Dict) -> RunConfig:
    fields = {k: v for k, v in raw.items() if k in RunConfig.__dataclass_fields__}
    try:
        return RunConfig(**fields).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        raw = _merged(args)
        if args.command == "sweep":
            preset = raw.pop("preset", None)
            jobs = int(raw.pop("jobs", 1))
            if preset:
                defaults, make_points = PRESETS[preset]
                raw = {**defaults, **{k: v for k, v in raw.items() if k not in SWEEP_AXES}}
                points = make_points()
            else:
                points = grid_points(raw)
            scalars = {k: v for k, v in raw.items() if k not in SWEEP_AXES and k in RunConfig.__dataclass_fields__}
            base = RunConfig(**scalars).resolved()
            text = sweep(base, points, jobs=jobs)
            if base.out:
                _write(base.out, text)
            else:
                sys.stdout.write(text)
            return 0
        cfg = _scalar_config(raw)
        if args.command == "run":
            return cmd_run(cfg)
        info = window_info(cfg) if args.command == "window" else cost_info(cfg)
        sys.stdout.write(dumps(info))
        return 0
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericsError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
