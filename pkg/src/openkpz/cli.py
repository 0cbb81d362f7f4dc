"""Unified command line: verify-algebra | kernel | constant-a | simulate |
sample-stationary | experiment.

Configuration comes from an INI file (section per subcommand) overridden by
explicit flags; every artifact embeds the fully resolved configuration and
seed and contains no timestamps, so a rerun with the same seed and workers=1
is byte-identical.  Exit codes: 0 success, 1 verification mismatch, 2
configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_CONFIG = 2


class ConfigError(Exception):
    pass


def _resolve(args: argparse.Namespace, section: str, defaults: Dict) -> Dict:
    """defaults < config-file section < explicit flags; unknown keys rejected."""
    resolved = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        parser = configparser.ConfigParser()
        read = parser.read(config_path)
        if not read:
            raise ConfigError(f"cannot read config file {config_path!r}")
        if parser.has_section(section):
            for key, raw in parser.items(section):
                key = key.replace("-", "_")
                if key not in defaults:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                resolved[key] = type(defaults[key])(raw) if defaults[key] is not None else raw
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    seed = getattr(args, "seed", None)
    resolved["seed"] = seed if seed is not None else resolved.get("seed", 0)
    resolved["workers"] = getattr(args, "workers", None) or 1
    return resolved


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(getattr(args, "out_dir", None) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: Dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _csv_header_comment(resolved: Dict) -> List[str]:
    return ["# config: " + json.dumps(resolved, sort_keys=True)]


def _write_csv(path: Path, resolved: Dict, columns: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        for line in _csv_header_comment(resolved):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


# --- subcommands -------------------------------------------------------------


def cmd_verify_algebra(args) -> int:
    from openkpz.treealg import (
        check_structure_group,
        generic_character,
        renorm_constants,
        verify_golden_tables,
    )
    from openkpz.treealg.combination import SYMBOLS

    report = verify_golden_tables()
    print(report)
    group = check_structure_group(generic_character())
    print(f"structure group: {'all properties hold' if group.all_passed else group}")
    c1, c2, c3 = renorm_constants()
    import sympy

    expected = (
        SYMBOLS["C0"],
        2 * SYMBOLS["C0"],
        sympy.Rational(1, 4) * SYMBOLS["C2"]
        + sympy.Rational(1, 2) * SYMBOLS["C3"]
        + 2 * SYMBOLS["a10"] * SYMBOLS["C0"]
        + SYMBOLS["C1"],
    )
    constants_ok = all(
        sympy.expand(got - want) == 0 for got, want in zip((c1, c2, c3), expected)
    )
    print(f"renormalization constants: ({c1}, {c2}, {c3})"
          + ("" if constants_ok else "  MISMATCH"))
    ok = report.all_passed and group.all_passed and constants_ok
    return EXIT_OK if ok else EXIT_VERIFICATION


def cmd_kernel(args) -> int:
    from openkpz import kernels

    defaults = {
        "kind": "neumann",
        "t": 0.1,
        "grid": 32,
        "images": 20,
        "u": 0.5,
        "v": 0.5,
        "seed": 0,
    }
    resolved = _resolve(args, "kernel", defaults)
    kind = resolved["kind"]
    t = float(resolved["t"])
    n = int(resolved["grid"])
    xs = np.linspace(0.0, 1.0, n + 1)
    rows = []
    if kind == "neumann":
        values, tail = kernels.neumann_kernel(
            t, xs[:, None], xs[None, :], M=int(resolved["images"])
        )
        for i, x in enumerate(xs):
            for j, y in enumerate(xs):
                rows.append((t, x, y, values[i, j], tail))
    elif kind == "robin":
        matrix = kernels.robin_kernel(t, float(resolved["u"]), float(resolved["v"]), n=n)
        for i, x in enumerate(xs):
            for j, y in enumerate(xs):
                rows.append((t, x, y, matrix[i, j], ""))
    elif kind == "gauss":
        for x in xs:
            rows.append((t, x, 0.0, float(kernels.gauss_kernel(t, x)), 0.0))
    else:
        raise ConfigError(f"unknown kernel kind {kind!r}")
    path = _out_dir(args) / f"kernel_{kind}.csv"
    _write_csv(path, resolved, ("t", "x", "y", "value", "error_bound"), rows)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_constant_a(args) -> int:
    from openkpz import kernels

    defaults = {"time_radius": 1.0, "space_radius": 1.0, "cells": 256, "seed": 0}
    resolved = _resolve(args, "constant-a", defaults)
    rho = kernels.Mollifier(float(resolved["time_radius"]), float(resolved["space_radius"]))
    value, error = kernels.constant_a(rho, n=int(resolved["cells"]))
    payload = {
        "value": value,
        "error_estimate": error,
        "mollifier": {
            "time_radius": rho.time_radius,
            "space_radius": rho.space_radius,
            "profile": "(35/32)(1-z^2)^3 per dimension",
        },
        "config": resolved,
    }
    path = _out_dir(args) / "constant_a.json"
    _write_json(path, payload)
    print(f"a = {value:.12f} (error estimate {error:.2e}); wrote {path}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from openkpz import shesolver

    defaults = {
        "u": 0.0,
        "v": 0.0,
        "dx": 1.0 / 64,
        "dt": 0.0,  # 0 means the stability default dx^2/2
        "t_final": 1.0,
        "paths": 100,
        "save_times": "",
        "seed": 0,
    }
    resolved = _resolve(args, "simulate", defaults)
    dx = float(resolved["dx"])
    dt = float(resolved["dt"]) or 0.5 * dx**2
    if dt > 0.5 * dx**2 + 1e-15:
        raise ConfigError(
            f"dt={dt} violates the stability bound dt <= dx^2/2 = {0.5 * dx**2}"
        )
    snap = lambda t: max(1, round(t / dt)) * dt  # noqa: E731
    t_final = snap(float(resolved["t_final"]))
    saves = (
        tuple(snap(float(s)) for s in str(resolved["save_times"]).split(",") if s.strip())
        or (t_final,)
    )
    cfg = shesolver.SimConfig(
        dx=dx,
        dt=dt,
        t_final=t_final,
        n_paths=int(resolved["paths"]),
        seed=int(resolved["seed"]),
        save_times=saves,
    )
    params = shesolver.BoundaryParams(float(resolved["u"]), float(resolved["v"]))
    result = shesolver.simulate_she(np.ones(cfg.n + 1), params, cfg)
    xs = np.linspace(0.0, 1.0, cfg.n + 1)
    rows = []
    for t in sorted(result.snapshots):
        z = result.valid(t)
        mean = z.mean(axis=0)
        var = z.var(axis=0, ddof=1)
        for j, x in enumerate(xs):
            rows.append((t, x, mean[j], var[j], len(z)))
    path = _out_dir(args) / "simulate.csv"
    _write_csv(path, resolved, ("t", "x", "mean", "variance", "n_effective"), rows)
    print(f"wrote {path} (positivity exclusion rate {result.exclusion_rate:.4f})")
    return EXIT_OK


def cmd_sample_stationary(args) -> int:
    from openkpz import stationary

    defaults = {
        "u": 1.0,
        "v": 1.0,
        "dx": 1.0 / 64,
        "n_samples": 1000,
        "rho": 0.5,
        "burn_in": 2000,
        "thinning": 10,
        "normalization_samples": 20000,
        "seed": 0,
    }
    resolved = _resolve(args, "sample-stationary", defaults)
    u, v, dx = float(resolved["u"]), float(resolved["v"]), float(resolved["dx"])
    seed = int(resolved["seed"])
    if abs(u + v) < 1e-12:
        samples = stationary.sample_bm_drift(u, dx, int(resolved["n_samples"]), seed)
        sidecar = {"sampler": "brownian-with-drift", "config": resolved}
    else:
        cfg = stationary.McmcConfig(
            rho=float(resolved["rho"]),
            burn_in=int(resolved["burn_in"]),
            thinning=int(resolved["thinning"]),
            n_samples=int(resolved["n_samples"]),
            seed=seed,
        )
        result = stationary.sample_stationary_mcmc(u, v, cfg, dx)
        z_est, z_se = stationary.estimate_normalization(
            u, v, dx, int(resolved["normalization_samples"]), seed + 1
        )
        samples = result.samples
        sidecar = {
            "sampler": "pcn-mcmc",
            "acceptance_rate": result.acceptance_rate,
            "autocorr_time": result.autocorr_time,
            "normalization": {"estimate": z_est, "se": z_se},
            "warnings": list(result.warnings()),
            "config": resolved,
        }
    out = _out_dir(args)
    xs = np.linspace(0.0, 1.0, samples.shape[1])
    rows = [tuple(row) for row in samples]
    _write_csv(out / "stationary_samples.csv", resolved, [f"x={x:.6g}" for x in xs], rows)
    _write_json(out / "stationary_meta.json", sidecar)
    print(f"wrote {out / 'stationary_samples.csv'} and sidecar")
    return EXIT_OK


def cmd_experiment(args) -> int:
    from openkpz import harness

    defaults = {
        "u": 0.5,
        "v": -0.5,
        "n_samples": 1000,
        "t_final": 1.0,
        "dx": 1.0 / 64,
        "functional": "endpoint",
        "seed": 0,
    }
    resolved = _resolve(args, f"experiment.{args.name}", defaults)
    u, v = float(resolved["u"]), float(resolved["v"])
    dx = float(resolved["dx"])
    seed = int(resolved["seed"])
    t_final = float(resolved["t_final"])
    if args.name == "stationarity":
        report = harness.stationarity_experiment(
            u, v, n_samples=int(resolved["n_samples"]), t_final=t_final, dx=dx, seed=seed
        )
    elif args.name == "ergodic":
        report = harness.ergodic_average(
            u, v, functional=str(resolved["functional"]), t_final=t_final, dx=dx, seed=seed
        )
    elif args.name == "coupling":
        n = round(1.0 / dx)
        x = np.linspace(0.0, 1.0, n + 1)
        report = harness.coupling_experiment(
            u, v, np.zeros(n + 1), np.sin(np.pi * x), t_final=t_final, dx=dx, seed=seed
        )
    else:
        raise ConfigError(f"unknown experiment {args.name!r}")
    out = _out_dir(args)
    payload = report.to_dict()
    payload["config"] = resolved
    _write_json(out / f"experiment_{args.name}.json", payload)
    stats = payload["statistics"]
    flat = []
    for key, value in sorted(stats.items()):
        if isinstance(value, dict):
            flat.extend((f"{key}.{k}", v) for k, v in sorted(value.items()))
        else:
            flat.append((key, value))
    _write_csv(out / f"experiment_{args.name}.csv", resolved, ("statistic", "value"), flat)
    verdict = {None: "exploratory", True: "pass", False: "fail"}[report.passed]
    print(f"experiment {args.name}: {verdict}; wrote {out / f'experiment_{args.name}.json'}")
    return EXIT_OK if report.passed in (True, None) else EXIT_VERIFICATION


def build_parser() -> argparse.ArgumentParser:
    # Shared flags are accepted both before and after the subcommand.
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="INI config file (section per subcommand)")
    common.add_argument("--seed", type=int, help="master seed (overrides config)")
    common.add_argument("--workers", type=int, help="worker count (1 = bit-reproducible)")
    common.add_argument("--out-dir", help="artifact output directory")

    parser = argparse.ArgumentParser(
        prog="openkpz",
        description="Desk-scale laboratory for the open KPZ equation on [0,1].",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify-algebra", parents=[common],
                   help="recompute and check the four golden tables")

    p = sub.add_parser("kernel", parents=[common], help="emit kernel values as CSV")
    p.add_argument("--kind", choices=("neumann", "robin", "gauss"))
    p.add_argument("--t", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--images", type=int)
    p.add_argument("--u", type=float)
    p.add_argument("--v", type=float)

    p = sub.add_parser("constant-a", parents=[common], help="quadrature of the boundary constant a")
    p.add_argument("--time-radius", dest="time_radius", type=float)
    p.add_argument("--space-radius", dest="space_radius", type=float)
    p.add_argument("--cells", type=int)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo SHE ensemble statistics")
    p.add_argument("--u", type=float)
    p.add_argument("--v", type=float)
    p.add_argument("--dx", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--paths", type=int)
    p.add_argument("--save-times", dest="save_times")

    p = sub.add_parser("sample-stationary", parents=[common], help="stationary-measure samples")
    p.add_argument("--u", type=float)
    p.add_argument("--v", type=float)
    p.add_argument("--dx", type=float)
    p.add_argument("--n-samples", dest="n_samples", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--thinning", type=int)

    p = sub.add_parser("experiment", parents=[common], help="statistical experiment with JSON report")
    p.add_argument("name", choices=("stationarity", "ergodic", "coupling"))
    p.add_argument("--u", type=float)
    p.add_argument("--v", type=float)
    p.add_argument("--n-samples", dest="n_samples", type=int)
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--dx", type=float)
    p.add_argument("--functional")
    return parser


COMMANDS = {
    "verify-algebra": cmd_verify_algebra,
    "kernel": cmd_kernel,
    "constant-a": cmd_constant_a,
    "simulate": cmd_simulate,
    "sample-stationary": cmd_sample_stationary,
    "experiment": cmd_experiment,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
