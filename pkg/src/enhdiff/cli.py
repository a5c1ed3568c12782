"""Command-line entry point: ``run`` one simulation, ``sweep`` a kappa
ladder into a scaling fit, or ``validate`` the built-in oracle suite.

Exit codes: 0 success, 1 check failure, 2 config error, 3 insufficient
data.  Artifacts carry no timestamps, so a config re-run with the same
seed is byte-identical regardless of ``--threads``.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import feynman_kac as fk
from . import validate as validate_mod
from .config import RunConfig, build_flow, load_config, output_dir
from .errors import ConfigError, EnhdiffError, FitError
from .experiments import (
    ExperimentSpec,
    fit_power_law,
    initial_data_for,
    measure_mixing_time,
    sweep_and_fit,
    synthetic_sweep,
)
from .flows import AnisotropicRadial, Circular, Isotropic, Zero
from .grid import CartesianGrid, EnergyLedger, field_from_function, step_strang
from .ibm import RegularizedDelta, interface_sample, load_interface_csv
from .polar import PolarGrid, PolarStepper, polar_field_from_function
from .snapshots import save_field_binary, save_field_csv
from .stochastic import SdeConfig, simulate_ensemble
from . import rng
from .svgplot import sweep_plot

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_INSUFFICIENT_DATA = 3


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _write_summary(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_threads(flag_value) -> int:
    if flag_value is None:
        flag_value = int(os.environ.get("ENHDIFF_THREADS", "0"))
    if flag_value == 0:
        return min(os.cpu_count() or 1, 8)
    return max(1, int(flag_value))


def _diffusivity(cfg: RunConfig, kappa: float):
    gamma = cfg.get("diffusivity", "gamma", 0.0)
    if gamma:
        return AnisotropicRadial(kappa=kappa, gamma=gamma)
    return Isotropic(kappa)


def _run_grid_cartesian(cfg, flow, kappa, data, outdir, formats):
    nx = cfg.get("solver", "nx", 256)
    ny = cfg.get("solver", "ny", 256)
    ly = math.pi if data.kind == "sine-x" else max(8.0 * kappa ** data.beta, 1.0)
    grid = CartesianGrid(nx, ny, ly)
    field = field_from_function(grid, lambda x, y: data.eval_xy(x, y))
    dt = cfg.get("solver", "dt", 0.01)
    horizon = cfg.get("solver", "horizon", 1.0)
    ledger = EnergyLedger.start(field, kappa)
    n = int(math.ceil(horizon / dt - 1e-12))
    for k in range(n):
        h = dt if k < n - 1 else horizon - (n - 1) * dt
        field = step_strang(field, flow, kappa, h, ledger=ledger)
    return field, ledger


def _run_grid_polar(cfg, flow, kappa, data, outdir, formats):
    nr = cfg.get("solver", "nr", 256)
    ntheta = cfg.get("solver", "ntheta", 256)
    half = kappa ** data.beta
    grid = PolarGrid(nr, ntheta, r_min=0.25 * half, r_max=8.0 * half)
    field = polar_field_from_function(grid, lambda r, th: data.eval_polar(r, th))
    gamma = cfg.get("diffusivity", "gamma", 0.0)
    diff = AnisotropicRadial(kappa=kappa, gamma=gamma) if gamma else Isotropic(kappa)
    dt = cfg.get("solver", "dt", 0.01)
    horizon = cfg.get("solver", "horizon", 1.0)
    ledger = EnergyLedger(gamma=gamma)
    ledger.record(field, kappa)
    stepper = PolarStepper(grid, flow.q, diff, dt)
    n = int(math.ceil(horizon / dt - 1e-12))
    for k in range(n):
        if k == n - 1:
            h = horizon - (n - 1) * dt
            field = PolarStepper(grid, flow.q, diff, h).step(field)
        else:
            field = stepper.step(field)
        ledger.record(field, kappa)
    return field, ledger


def cmd_run(cfg_path, outdir_flag=None, seed_flag=None, threads_flag=None) -> int:
    cfg = load_config(cfg_path)
    flow = build_flow(cfg)
    kappa = cfg.require("diffusivity", "kappa")
    data_kind = cfg.require("initial_data", "kind")
    data = initial_data_for(flow, data_kind, kappa)
    seed = seed_flag if seed_flag is not None else cfg.get("run", "seed", 0)
    backend = cfg.get("solver", "backend", "grid")
    outdir = output_dir(cfg, outdir_flag)
    formats = cfg.get("output", "formats", ("csv", "svg"))
    summary = {
        "command": "run",
        "backend": backend,
        "kappa": kappa,
        "seed": seed,
        "flow": type(flow).__name__,
        "initial_data": data_kind,
        "version": __version__,
    }
    if backend == "grid":
        if isinstance(flow, Circular):
            field, ledger = _run_grid_polar(cfg, flow, kappa, data, outdir, formats)
        else:
            field, ledger = _run_grid_cartesian(cfg, flow, kappa, data, outdir, formats)
        header, rows = ledger.rows()
        if "csv" in formats:
            _write_csv(outdir / "energy.csv", header, rows)
            save_field_csv(field, outdir / "snapshot.csv")
        if "binary" in formats:
            save_field_binary(field, outdir / "snapshot.enhd")
        norm_ratio = math.sqrt(ledger.l2sq[-1] / ledger.l2sq[0])
        summary.update(
            {
                "time": field.time,
                "norm_ratio": norm_ratio,
                "dissipation": ledger.dissipation[-1],
                "residual": ledger.residual[-1],
            }
        )
        iface_path = cfg.get("interface", "file")
        if iface_path and not isinstance(flow, Circular):
            iface = load_interface_csv(iface_path)
            delta = RegularizedDelta(epsilon=2.0 * field.grid.dx)
            vals = interface_sample(field, iface, delta)
            _write_csv(
                outdir / "interface_rho.csv",
                ("x", "y", "dS", "value"),
                [
                    (float(m[0]), float(m[1]), float(w), float(v))
                    for m, w, v in zip(iface.markers, iface.weights, vals)
                ],
            )
            summary["interface_markers"] = iface.n_markers
    else:
        horizon = cfg.get("solver", "horizon", 1.0)
        dt = cfg.get("solver", "dt", 0.01)
        n_samples = cfg.get("solver", "n_samples", 100_000)
        cfg_sde = SdeConfig(dt=dt, t_final=horizon)
        diff = _diffusivity(cfg, kappa)
        probes = []
        for i in range(8):
            x = 2.0 * math.pi * i / 8.0
            ens = simulate_ensemble(
                flow, diff, (x, 0.0), cfg_sde, rng.mix(seed, i), n_samples,
                reverse_drift=True,
            )
            est = fk.estimate_density(data.mc_callable(), ens)
            probes.append((x, est.mean, est.standard_error, est.n_samples))
        if "csv" in formats:
            _write_csv(outdir / "probes.csv", ("x", "mean", "standard_error", "n_samples"), probes)
        summary.update({"time": horizon, "n_probes": len(probes), "n_samples": n_samples})
    _write_summary(outdir / "summary.json", summary)
    return EXIT_OK


def cmd_sweep(cfg_path, outdir_flag=None, seed_flag=None, threads_flag=None) -> int:
    cfg = load_config(cfg_path)
    outdir = output_dir(cfg, outdir_flag)
    seed = seed_flag if seed_flag is not None else cfg.get("run", "seed", 0)
    threshold = cfg.get("experiment", "threshold", 1.0 / math.e)
    synthetic_slope = cfg.get("experiment", "synthetic_slope")
    if synthetic_slope is not None:
        kappas = cfg.require("experiment", "kappa_values")
        log_q = cfg.get("experiment", "synthetic_log_q")
        rows = synthetic_sweep(synthetic_slope, kappas, log_q=log_q)
        fit = fit_power_law(
            [r.kappa for r in rows], [r.T for r in rows], correction_q=log_q
        )
        predicted = synthetic_slope
    else:
        flow = build_flow(cfg)
        spec = ExperimentSpec(
            flow=flow,
            kappas=cfg.require("experiment", "kappa_values"),
            initial_data=cfg.require("initial_data", "kind"),
            backend=cfg.get("solver", "backend", "grid"),
            gamma=cfg.get("diffusivity", "gamma", 0.0),
            theta_mix=threshold,
            nx=cfg.get("solver", "nx", 256),
            ny=cfg.get("solver", "ny", 256),
            nr=cfg.get("solver", "nr", 256),
            ntheta=cfg.get("solver", "ntheta", 256),
            steps_per_scale=cfg.get("solver", "steps_per_scale", 200),
            horizon_factor=cfg.get("solver", "horizon_factor", 60.0),
            base_seed=seed,
            log_correction=cfg.get("experiment", "log_correction", "auto"),
            mc_samples=cfg.get("solver", "n_samples", 2000),
        )
        threads = _resolve_threads(threads_flag)
        try:
            if threads > 1 and len(spec.kappas) > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    result = sweep_and_fit(spec, executor=pool)
            else:
                result = sweep_and_fit(spec)
        except FitError as exc:
            print(
                f"sweep failed: {exc}; censored kappas: {list(exc.censored)}",
                file=sys.stderr,
            )
            return EXIT_INSUFFICIENT_DATA
        rows = result.rows
        fit = result.fit
        predicted = result.predicted_slope
    csv_rows = [
        (r.kappa, r.T, int(r.censored), predicted, fit.slope, fit.ci_halfwidth)
        for r in rows
    ]
    formats = cfg.get("output", "formats", ("csv", "svg"))
    if "csv" in formats:
        _write_csv(
            outdir / "sweep.csv",
            ("kappa", "T", "censored", "slope_pred", "slope_fit", "ci_halfwidth"),
            csv_rows,
        )
    if "svg" in formats:
        svg = sweep_plot(
            [(r.kappa, r.T, r.censored) for r in rows], fit, predicted,
            title="mixing time sweep",
        )
        (outdir / "sweep.svg").write_text(svg + "\n")
    print(
        f"slope_fit={fit.slope:+.6f} slope_pred={predicted:+.6f} "
        f"|gap|={abs(fit.slope - predicted):.6f} ci={fit.ci_halfwidth:.6f}"
    )
    _write_summary(
        outdir / "summary.json",
        {
            "command": "sweep",
            "slope_fit": fit.slope,
            "slope_pred": predicted,
            "ci_halfwidth": fit.ci_halfwidth,
            "residual_rms": fit.residual_rms,
            "log_correction_applied": fit.log_correction_applied,
            "n_points": fit.n_points,
            "seed": seed,
            "version": __version__,
        },
    )
    return EXIT_OK


def cmd_validate(list_only=False) -> int:
    if list_only:
        for name in validate_mod.ALL_CHECKS:
            print(name)
        return EXIT_OK
    results = validate_mod.run_all()
    all_ok = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: {res.detail}")
        all_ok &= res.passed
    return EXIT_OK if all_ok else EXIT_CHECK_FAILURE


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="enhdiff",
        description="Mixing-time laboratory for advection-diffusion flows",
    )
    parser.add_argument("--version", action="version", version=f"enhdiff {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single simulation from a config file")
    p_run.add_argument("config")
    p_sweep = sub.add_parser("sweep", help="run a kappa sweep and fit the scaling exponent")
    p_sweep.add_argument("config")
    for p in (p_run, p_sweep):
        p.add_argument("--output-dir", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
    p_val = sub.add_parser("validate", help="run the built-in oracle suite")
    p_val.add_argument("--list", action="store_true", dest="list_only")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.config, args.output_dir, args.seed, args.threads)
        if args.command == "sweep":
            return cmd_sweep(args.config, args.output_dir, args.seed, args.threads)
        return cmd_validate(args.list_only)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except FitError as exc:
        print(f"insufficient data: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT_DATA
    except EnhdiffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILURE


if __name__ == "__main__":
    sys.exit(main())
