"""Command-line front end: simulate <scenario> --config <file> --out <dir>.

Every run writes a frozen-schema table (CSV or JSON), a metadata record
carrying the fully resolved configuration, the package and schema versions,
the seed and the wall time, and a scenario-specific summary.  For a fixed
seed everything except the wall-time stamp is byte-identical between runs.

Time is serialized in ns and rates in kHz/2pi; everything internal stays in
seconds and rad/s, converted exactly once at this boundary.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunInput, config_text, parse_config
from .dynamics import IntegratorSettings, TimeSeries
from .experiments import (
    NoTurningPointError,
    PumpSpec,
    absorption_accounting,
    absorption_window,
    find_turning_point,
    fit_power_law,
    reversal_check,
    run_aperture_scan,
    run_ordinary_absorption,
    run_pump_off,
    run_superabsorption,
    run_superradiance,
    scaling_sweep,
)

SCHEMA_VERSION = "1"
SERIES_COLUMNS = ("t_ns", "mean_n", "mean_Jz", "re_mean_a", "im_mean_a", "trace", "tail")

FAST = IntegratorSettings(method="expm-action")


def _f(x) -> str:
    return f"{float(x):.17g}"


def series_table(series: TimeSeries) -> tuple[tuple[str, ...], list[list[str]]]:
    rows = []
    for i in range(len(series)):
        rows.append([
            _f(series.times[i] * 1e9),
            _f(series.mean_n[i]),
            _f(series.mean_jz[i]),
            _f(np.real(series.mean_a[i])),
            _f(np.imag(series.mean_a[i])),
            _f(series.trace_or_norm[i]),
            _f(series.tail[i]),
        ])
    return SERIES_COLUMNS, rows


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _json_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _accounting_summary(series, spec):
    params = spec.params
    t_ab = absorption_window(series, params, t_cap=spec.duration)
    acct = absorption_accounting(series, t_ab, params)
    summary = {("%s" % k): v for k, v in asdict(acct).items()}
    summary["t_ab_ns"] = acct.t_ab * 1e9
    try:
        tp = find_turning_point(series)
        summary["turning_time_ns"] = tp.time * 1e9
        summary["turning_mean_n"] = tp.mean_n
    except NoTurningPointError:
        summary["turning_time_ns"] = None
        summary["turning_mean_n"] = None
    return summary


def dispatch(run: RunInput) -> tuple[tuple, list, dict, int]:
    """Execute one scenario; returns (header, rows, summary, exit_status)."""
    spec = run.spec
    scenario = run.scenario
    settings = FAST if not spec.params.dissipation.lossless else None

    if scenario == "superradiance":
        series = run_superradiance(spec, settings)
        header, rows = series_table(series)
        summary = {"peak_mean_n": float(np.max(series.mean_n))}
        return header, rows, summary, 0

    if scenario in ("superabsorb", "ordinary", "pump-off"):
        if scenario == "ordinary":
            # ground-state absorption by definition; the shared presets keep
            # their pump setting for the companion scenarios
            spec = replace(spec, pump=PumpSpec(0.0, spec.pump.phase), pump_off_at=None)
        runner = {
            "superabsorb": run_superabsorption,
            "ordinary": run_ordinary_absorption,
            "pump-off": run_pump_off,
        }[scenario]
        series = runner(spec, settings)
        header, rows = series_table(series)
        return header, rows, _accounting_summary(series, spec), 0

    if scenario == "aperture-scan":
        lam = run.extras["wavelength"]
        npts = run.extras["offset_points"]
        offsets = np.linspace(-lam / 2, lam / 2, npts)
        result = run_aperture_scan(spec, offsets, lam, settings)
        header = ("dz_nm", "norm_n_superposition", "norm_n_fully_excited")
        rows = [
            [_f(result.offsets[i] * 1e9), _f(result.superposition[i]), _f(result.fully_excited[i])]
            for i in range(len(result.offsets))
        ]
        summary = {"reference_peak_mean_n": result.reference_peak}
        return header, rows, summary, 0

    if scenario == "scaling":
        points = scaling_sweep(spec, run.extras["atom_numbers"], run.extras["t_window"], FAST)
        fit = fit_power_law([(p.n_atoms, p.n_absorbed) for p in points])
        header = ("n_atoms", "n_input", "turning_time_ns", "n_absorbed", "ratio")
        rows = [
            [str(p.n_atoms), _f(p.n_input), _f(p.turning_time * 1e9), _f(p.n_absorbed), _f(p.ratio)]
            for p in points
        ]
        summary = {
            "exponent": fit.exponent,
            "stderr_q": fit.stderr_q,
            "prefactor": fit.prefactor,
            "r_squared": fit.r_squared,
        }
        return header, rows, summary, 0

    if scenario == "reversal-check":
        params = replace(spec.params, cavity_rate=0.0, atomic_rate=0.0,
                         enable_atomic_decay=False)
        t = run.extras["reversal_time"]
        results = [reversal_check(params, spec.pump, t, variant=v)
                   for v in ("exact", "coherent")]
        header = ("variant", "final_mean_n", "atomic_fidelity")
        rows = [[r["variant"], _f(r["final_mean_n"]), _f(r["atomic_fidelity"])] for r in results]
        exact = results[0]
        ok = exact["final_mean_n"] < 1e-6 and exact["atomic_fidelity"] > 1 - 1e-6
        summary = {
            "lossless": True,
            "exact_final_mean_n": exact["final_mean_n"],
            "exact_atomic_fidelity": exact["atomic_fidelity"],
            "passed": bool(ok),
        }
        return header, rows, summary, 0 if ok else 1

    if scenario == "oracle-check":
        from .dynamics import evolve_unitary
        from .hilbert import tc_hamiltonian
        from .oracle import brute_force_evolve
        from .states import (
            coherent_state,
            joint_product_state,
            superposition_atomic_state,
            vacuum_state,
        )

        params = spec.params
        basis = params.basis
        fld = (coherent_state(np.sqrt(spec.initial_photons), basis)
               if spec.initial_photons else vacuum_state(basis))
        psi0 = joint_product_state(superposition_atomic_state(params.n_atoms, spec.pump), fld)
        grid = spec.time_grid()
        reduced, _ = evolve_unitary(psi0, tc_hamiltonian(basis, params.effective_coupling),
                                    grid, basis)
        product = brute_force_evolve(params.n_atoms, spec.pump, fld,
                                     params.effective_coupling, grid)
        dev_n = float(np.max(np.abs(reduced.mean_n - product.mean_n)))
        dev_jz = float(np.max(np.abs(reduced.mean_jz - product.mean_jz)))
        header = ("t_ns", "mean_n_reduced", "mean_n_product", "mean_jz_reduced", "mean_jz_product")
        rows = [
            [_f(grid[i] * 1e9), _f(reduced.mean_n[i]), _f(product.mean_n[i]),
             _f(reduced.mean_jz[i]), _f(product.mean_jz[i])]
            for i in range(len(grid))
        ]
        ok = dev_n < 1e-10 and dev_jz < 1e-10
        summary = {"max_dev_mean_n": dev_n, "max_dev_mean_jz": dev_jz, "passed": bool(ok)}
        return header, rows, summary, 0 if ok else 1

    raise ConfigError(f"unhandled scenario {scenario!r}")


def run_and_serialize(run: RunInput, outdir: Path, seed: int, fmt: str) -> int:
    """Execute and write table + metadata + summary; deterministic per seed."""
    outdir.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()
    run = replace(run, spec=replace(run.spec, seed=seed))
    try:
        header, rows, summary, status = dispatch(run)
    except Exception as exc:  # noqa: BLE001 - converted into the error record
        record = {"error_type": type(exc).__name__, "message": str(exc)}
        (outdir / "error.json").write_text(_json_dump(record), encoding="utf-8")
        print(f"error: {record['error_type']}: {record['message']}", file=sys.stderr)
        return 1

    meta = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "scenario": run.scenario,
        "seed": seed,
        "format": fmt,
        "columns": list(header),
        "config": run.resolved,
        "wall_time_s": time.perf_counter() - t_start,
    }
    if fmt == "csv":
        _write_csv(outdir / "series.csv", header, rows)
        (outdir / "summary.json").write_text(_json_dump(summary), encoding="utf-8")
        (outdir / "meta.json").write_text(_json_dump(meta), encoding="utf-8")
    else:
        payload = {
            "meta": meta,
            "series": {name: [row[i] for row in rows] for i, name in enumerate(header)},
            "summary": summary,
        }
        (outdir / "run.json").write_text(_json_dump(payload), encoding="utf-8")
    return status


def spec_from_meta(meta: dict) -> RunInput:
    """Re-parse a metadata record into an equivalent run input."""
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as fh:
        fh.write(config_text(meta["config"]))
        path = fh.name
    return parse_config(path, meta["scenario"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Collective emission and absorption scenarios for "
                    "N two-level atoms in a damped cavity.",
    )
    parser.add_argument("scenario", help="one of: superradiance, superabsorb, ordinary, "
                                         "pump-off, aperture-scan, scaling, reversal-check, "
                                         "oracle-check")
    parser.add_argument("--config", required=True, help="path to a key = value config file")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = parse_config(args.config, args.scenario)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run_and_serialize(run, Path(args.out), args.seed, args.format)


if __name__ == "__main__":
    sys.exit(main())
