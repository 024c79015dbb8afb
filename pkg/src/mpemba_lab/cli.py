"""Experiment runner: configs in, deterministic CSV artifacts out.

Five experiment families are dispatched from one entry point::

    mpemba-lab <experiment> [--config FILE] [--out DIR] [--seed N]
               [--threads N] [--set KEY=VALUE ...]

Each run writes one CSV (schemas below) plus a manifest.json recording the
resolved parameters, seed and code version. Identical config and seed give
byte-identical CSV output; floats are written with 12 significant digits.

CSV schemas:
    dicke-therm, sho-therm : label,t,delta
    speedup-sweep          : model,N,seed,eta,epsilon,t_eq,speedup_pct
    ruc-ea                 : theta,epsilon,depth,ea_mean,ea_stderr,realizations
    ruc-dimension          : theta,epsilon,ed_mean,ed_stderr
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .liouville import build_liouvillian, decompose, overlap_coefficients
from .metrics import distance_profile, run_epsilon_sweep
from .models import DickeParams, OscillatorParams, dicke_model, oscillator_model
from .ruc import dimension_sweep, run_ruc_experiment
from .stateprep import (
    PreparationError,
    apply_rotation,
    build_rotation,
    diagonalizing_unitary,
    perturb_unitary,
    random_state_vector,
)

__all__ = ["ConfigError", "ExperimentConfig", "run", "main"]

EXPERIMENTS = ("dicke-therm", "sho-therm", "speedup-sweep", "ruc-ea", "ruc-dimension")

_LOG_EPS = [float(f"{e:.6g}") for e in np.geomspace(1e-4, 1.0, 25)]
_DIM_EPS = [float(f"{e:.6g}") for e in np.geomspace(1e-4, 10.0, 21)]

DEFAULTS = {
    "dicke-therm": {
        "n": 40,
        "omega": 1.0,
        "kappa": 1.0,
        "g": 1.0,
        "epsilons": [0.0, 1e-3, 1e-2, 1e-1],
        "t_max": 200.0,
        "t_points": 601,
    },
    "sho-therm": {
        "n_max": 20,
        "pad": 4,
        "omega0": 1.0,
        "gamma": 1.0,
        "nbar": 1.0,
        "epsilons": [0.0, 1e-3, 1e-2, 1e-1],
        "t_max": 30.0,
        "t_points": 601,
    },
    "speedup-sweep": {
        "model": "dicke",
        "n": 40,
        "omega": 1.0,
        "kappa": 1.0,
        "g": 1.0,
        "pad": 4,
        "omega0": 1.0,
        "gamma": 1.0,
        "nbar": 1.0,
        "epsilons": [0.0] + _LOG_EPS,
        "etas": [1e-3, 1e-4, 1e-5],
        "n_seeds": 10,
    },
    "ruc-ea": {
        "n": 16,
        "subsystem": 4,
        "thetas": [0.2 * np.pi, 0.5 * np.pi],
        "epsilons": [0.0, 1.0],
        "depth": 20,
        "realizations": 100,
    },
    "ruc-dimension": {
        "subsystem": 4,
        "thetas": [0.1 * np.pi, 0.2 * np.pi, 0.3 * np.pi, 0.4 * np.pi, 0.5 * np.pi],
        "epsilons": [0.0] + _DIM_EPS,
        "preparations": 1000,
    },
}

DEFAULT_SEEDS = {
    "dicke-therm": 1,
    "sho-therm": 1,
    "speedup-sweep": 0,
    "ruc-ea": 7,
    "ruc-dimension": 7,
}


class ConfigError(ValueError):
    """Unusable experiment configuration."""


class ExperimentConfig:
    """Resolved parameters for one experiment run."""

    def __init__(self, experiment, params, seed, out_dir, threads=1):
        if experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")
        self.experiment = experiment
        self.params = params
        self.seed = int(seed)
        self.out_dir = Path(out_dir)
        self.threads = max(1, int(threads))
        for key in ("epsilons", "etas", "thetas"):
            if key in params and len(params[key]) == 0:
                raise ConfigError(f"grid {key!r} must not be empty")


def _parse_scalar(text: str, like, where: str):
    text = text.strip()
    try:
        if isinstance(like, bool):
            return text.lower() in ("1", "true", "yes")
        if isinstance(like, int):
            return int(text)
        if isinstance(like, float):
            if text.endswith("pi"):  # allow e.g. 0.2pi for angles
                return float(text[:-2] or 1.0) * np.pi
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {text!r}: {exc}") from None


def _parse_value(text: str, default, where: str):
    if isinstance(default, list):
        like = default[0] if default else 0.0
        items = [t for t in text.split(",") if t.strip()]
        return [_parse_scalar(t, like, where) for t in items]
    return _parse_scalar(text, default, where)


def load_config(path: Path, experiment: str) -> dict:
    """Parse a key = value config file against the experiment's defaults."""
    defaults = DEFAULTS[experiment]
    params = dict(defaults)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected KEY = VALUE, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in defaults:
            raise ConfigError(
                f"{path}:{lineno}: unknown key {key!r} for {experiment} "
                f"(valid: {sorted(defaults)})"
            )
        params[key] = _parse_value(value, defaults[key], f"{path}:{lineno}")
    return params


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _therm_rows(dec, labelled_states, times):
    rows = []
    for label, rho in labelled_states:
        dist = distance_profile(dec, overlap_coefficients(dec, rho), times)
        rows.extend((label, float(t), float(d)) for t, d in zip(times, dist))
    return rows


def _run_dicke_therm(p, seed, threads):
    model = dicke_model(DickeParams(n_spins=p["n"], omega=p["omega"], kappa=p["kappa"], g=p["g"]))
    dec = decompose(build_liouvillian(model))
    psi = random_state_vector(model.dim, np.random.SeedSequence(seed))
    rho0 = np.outer(psi, psi.conj())
    rot = build_rotation(dec, psi)
    states = [("original", rho0)]
    for eps in p["epsilons"]:
        states.append(
            (f"epsilon={eps:g}", apply_rotation(rot, rho0, PreparationError(eps, "angle-relative")))
        )
    times = np.linspace(0.0, p["t_max"], p["t_points"])
    return [("label", "t", "delta")], _therm_rows(dec, states, times)


def _run_sho_therm(p, seed, threads):
    dim = p["n_max"] + 1 + p["pad"]
    model = oscillator_model(
        OscillatorParams(dim=dim, omega0=p["omega0"], gamma=p["gamma"], nbar=p["nbar"])
    )
    dec = decompose(build_liouvillian(model))
    root = np.random.SeedSequence(seed)
    state_seed, noise_seed = root.spawn(2)
    psi = random_state_vector(dim, state_seed, support=p["n_max"] + 1)
    rho0 = np.outer(psi, psi.conj())
    u_target = diagonalizing_unitary(rho0)
    states = [("original", rho0)]
    for eps in p["epsilons"]:
        if eps == 0.0:
            u = u_target
        else:
            u = perturb_unitary(u_target, eps, np.random.default_rng(noise_seed))
        states.append((f"epsilon={eps:g}", u.conj().T @ rho0 @ u))
    times = np.linspace(0.0, p["t_max"], p["t_points"])
    return [("label", "t", "delta")], _therm_rows(dec, states, times)


def _run_speedup_sweep(p, seed, threads):
    if p["model"] == "dicke":
        model = dicke_model(
            DickeParams(n_spins=p["n"], omega=p["omega"], kappa=p["kappa"], g=p["g"])
        )
        prep, support, size = "angle", None, p["n"]
    elif p["model"] == "sho":
        dim = p["n"] + 1 + p["pad"]
        model = oscillator_model(
            OscillatorParams(dim=dim, omega0=p["omega0"], gamma=p["gamma"], nbar=p["nbar"])
        )
        prep, support, size = "qr", p["n"] + 1, p["n"]
    else:
        raise ConfigError(f"unknown model {p['model']!r}; choose dicke or sho")

    dec = decompose(build_liouvillian(model))
    seeds = [seed + k for k in range(p["n_seeds"])]

    def one(s):
        return run_epsilon_sweep(
            model, prep, p["epsilons"], p["etas"], [s],
            state_support=support, label=p["model"], size=size, dec=dec,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]

    rows = []
    for res in results:
        rows.extend(
            (p["model"], size, s, eta, eps, t_eq, pct)
            for s, eta, eps, t_eq, pct in res.rows
        )
    return [("model", "N", "seed", "eta", "epsilon", "t_eq", "speedup_pct")], rows


def _run_ruc_ea(p, seed, threads):
    combos = [
        (ti, ei, theta, eps)
        for ti, theta in enumerate(p["thetas"])
        for ei, eps in enumerate(p["epsilons"])
    ]

    def one(combo):
        ti, ei, theta, eps = combo
        cell_seed = np.random.SeedSequence(seed, spawn_key=(ti, ei))
        return run_ruc_experiment(
            p["n"], p["subsystem"], theta, eps, p["depth"], p["realizations"], cell_seed
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trajs = list(pool.map(one, combos))
    else:
        trajs = [one(c) for c in combos]

    rows = []
    for traj in trajs:
        for d in traj.depths:
            rows.append(
                (
                    traj.theta,
                    traj.epsilon,
                    int(d),
                    float(traj.ea_mean[d]),
                    float(traj.ea_stderr[d]),
                    traj.realizations,
                )
            )
    header = [("theta", "epsilon", "depth", "ea_mean", "ea_stderr", "realizations")]
    return header, rows


def _run_ruc_dimension(p, seed, threads):
    rows = dimension_sweep(
        p["thetas"], p["epsilons"], p["preparations"], seed, subsystem=p["subsystem"]
    )
    return [("theta", "epsilon", "ed_mean", "ed_stderr")], rows


_RUNNERS = {
    "dicke-therm": _run_dicke_therm,
    "sho-therm": _run_sho_therm,
    "speedup-sweep": _run_speedup_sweep,
    "ruc-ea": _run_ruc_ea,
    "ruc-dimension": _run_ruc_dimension,
}


def run(config: ExperimentConfig) -> Path:
    """Execute one experiment; returns the CSV path it wrote."""
    t0 = time.perf_counter()
    config.out_dir.mkdir(parents=True, exist_ok=True)
    header, rows = _RUNNERS[config.experiment](config.params, config.seed, config.threads)
    csv_path = config.out_dir / f"{config.experiment}.csv"
    write_csv(csv_path, header[0], rows)
    manifest = {
        "experiment": config.experiment,
        "parameters": {
            k: (list(v) if isinstance(v, (list, tuple)) else v)
            for k, v in config.params.items()
        },
        "seed": config.seed,
        "threads": config.threads,
        "code_version": __version__,
        "outputs": [csv_path.name],
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }
    with open(config.out_dir / f"{config.experiment}.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpemba-lab",
        description="Relaxation-speedup and symmetry-restoration experiments.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    parser.add_argument("--seed", type=int, help="root random seed (explicit in the manifest)")
    parser.add_argument("--threads", type=int, default=1, help="parallel grid evaluation")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one config key (repeatable)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params = (
            load_config(args.config, args.experiment)
            if args.config
            else dict(DEFAULTS[args.experiment])
        )
        for item in args.overrides:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            key = key.strip()
            if key not in DEFAULTS[args.experiment]:
                raise ConfigError(
                    f"--set: unknown key {key!r} for {args.experiment} "
                    f"(valid: {sorted(DEFAULTS[args.experiment])})"
                )
            params[key] = _parse_value(value, DEFAULTS[args.experiment][key], "--set")
        seed = args.seed if args.seed is not None else DEFAULT_SEEDS[args.experiment]
        config = ExperimentConfig(args.experiment, params, seed, args.out, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        csv_path = run(config)
    except Exception as exc:  # numerical failures exit nonzero, naming the stage
        print(f"{config.experiment} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(csv_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
