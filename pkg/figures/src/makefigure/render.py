"""Figure renderers: time traces, fixed-window scaling, aperture scans.

Rendering is read-only over its inputs and pixel-deterministic for a given
style version: fixed canvas, fixed fonts, no timestamps.
"""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .io import (
    DataError,
    RunData,
    SCAN_COLUMNS,
    SWEEP_COLUMNS,
    SchemaError,
    TIMESERIES_COLUMNS,
    config_rate_khz,
)

STYLE_VERSION = "1"
KINDS = ("timeseries", "scaling", "scan")

_COLORS = ("#1f5fbf", "#c23b22", "#2e8b57", "#8a5acb", "#b8860b")


def _require_columns(run: RunData, expected, kind):
    if run.columns != expected:
        raise SchemaError(
            f"{kind} figure needs columns {expected}, got {run.columns} "
            f"(scenario {run.scenario!r})"
        )


def _shade(ax, t_turn, t_max):
    ax.axvspan(0.0, t_turn, color="#d9ead9", zorder=0)
    ax.axvspan(t_turn, t_max, color="#eeeeee", zorder=0)


def render_timeseries(runs, out_path, shade_regions=True):
    """Photon-number traces on shared axes with turning points marked.

    Overlays the bare cavity-decay exponential when the run's constants are
    available, matching how absorbed and leaked photons are told apart.
    """
    for run in runs:
        _require_columns(run, TIMESERIES_COLUMNS, "timeseries")
    fig, ax = plt.subplots(figsize=(6.4, 4.0), dpi=160)

    t_max = max(float(run.column("t_ns")[-1]) for run in runs)
    shaded = False
    for i, run in enumerate(runs):
        t = run.column("t_ns")
        n = run.column("mean_n")
        label = run.scenario
        ax.plot(t, n, color=_COLORS[i % len(_COLORS)], lw=1.8, label=label)

        t_turn = run.summary.get("turning_time_ns")
        if t_turn is not None:
            ax.axvline(t_turn, color=_COLORS[i % len(_COLORS)], ls=":", lw=1.0)
            ax.annotate("turning point", xy=(t_turn, run.summary.get("turning_mean_n", 0.0)),
                        xytext=(t_turn + 0.03 * t_max, 0.12 * np.max(n)),
                        fontsize=8, color=_COLORS[i % len(_COLORS)])
            if shade_regions and not shaded:
                _shade(ax, t_turn, t_max)
                shaded = True

        gc_khz = config_rate_khz(run.meta, "cavity_rate")
        if gc_khz and n[0] > 0:
            decay = n[0] * np.exp(-2 * (2 * np.pi * gc_khz * 1e3) * t * 1e-9)
            ax.plot(t, decay, color="#777777", ls="--", lw=1.0,
                    label="bare cavity decay" if i == 0 else None)

    ax.set_xlabel("time (ns)")
    ax.set_ylabel("intracavity photon number")
    ax.set_xlim(0, t_max)
    ax.set_ylim(bottom=0)
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def render_scaling(runs, out_path):
    """Absorbed photons versus atom number with the fitted power law and a
    log-log inset."""
    if len(runs) != 1:
        raise DataError("scaling figure takes exactly one sweep run")
    run = runs[0]
    _require_columns(run, SWEEP_COLUMNS, "scaling")
    n_atoms = run.column("n_atoms")
    absorbed = run.column("n_absorbed")
    q = run.summary.get("exponent")
    pref = run.summary.get("prefactor")

    fig, ax = plt.subplots(figsize=(5.4, 4.2), dpi=160)
    ax.plot(n_atoms, absorbed, "o", color=_COLORS[1], ms=6, zorder=3, label="sweep")
    if q is not None and pref is not None:
        grid = np.linspace(n_atoms.min(), n_atoms.max(), 200)
        stderr = run.summary.get("stderr_q", 0.0)
        ax.plot(grid, pref * grid**q, color=_COLORS[1], lw=1.5,
                label=f"fit: N^{q:.2f} (+- {stderr:.2f})")
    ax.set_xlabel("mean atom number")
    ax.set_ylabel("completely absorbed photons")
    ax.legend(frameon=False, fontsize=9, loc="upper left")

    inset = fig.add_axes([0.62, 0.22, 0.30, 0.30])
    inset.loglog(n_atoms, absorbed, "o", color=_COLORS[1], ms=4)
    if q is not None and pref is not None:
        inset.loglog(grid, pref * grid**q, color=_COLORS[1], lw=1.0)
    inset.set_title("log-log", fontsize=8)
    inset.tick_params(labelsize=7)

    fig.savefig(out_path)
    plt.close(fig)


def render_scan(runs, out_path):
    """Normalized photon yields versus aperture offset for the pumped
    superposition and the fully excited ensembles."""
    if len(runs) != 1:
        raise DataError("scan figure takes exactly one scan run")
    run = runs[0]
    _require_columns(run, SCAN_COLUMNS, "scan")
    dz = run.column("dz_nm")

    fig, ax = plt.subplots(figsize=(6.0, 3.8), dpi=160)
    ax.plot(dz, run.column("norm_n_superposition"), "o-", color=_COLORS[0],
            ms=4, lw=1.2, label="superposition pump")
    ax.plot(dz, run.column("norm_n_fully_excited"), "s-", color=_COLORS[1],
            ms=4, lw=1.2, label="fully excited")
    ax.axhline(1.0, color="#999999", lw=0.8, ls=":")
    ax.set_xlabel("aperture offset (nm)")
    ax.set_ylabel("normalized photon yield")
    ax.set_ylim(bottom=0)
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def render(kind, runs, out_path, **options):
    if kind == "timeseries":
        return render_timeseries(runs, out_path, **options)
    if kind == "scaling":
        return render_scaling(runs, out_path)
    if kind == "scan":
        return render_scan(runs, out_path)
    raise DataError(f"unknown figure kind {kind!r}; choose one of {', '.join(KINDS)}")
