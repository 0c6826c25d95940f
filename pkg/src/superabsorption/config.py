"""Run configuration files: a small key = value schema with tagged units.

Physical rates must carry an explicit unit tag, either angular-frequency
form like "2pi*256kHz" or plain "1.609e6rad/s"; times take ns/us/ms/s,
lengths nm/um/m and angles are radians, optionally as multiples of pi
("0.5pi").  Untagged rates are rejected rather than guessed.

The parsed result is a ScenarioSpec plus scenario extras; resolve() echoes
every default back, so serialized metadata always re-parses into an
equivalent configuration.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .experiments import ImperfectionModel, ScenarioSpec, SystemParams, atomic_coherence
from .states import PumpSpec, cutoff_for_amplitude

TWO_PI = 2.0 * np.pi

SCENARIOS = (
    "superradiance",
    "superabsorb",
    "ordinary",
    "pump-off",
    "aperture-scan",
    "scaling",
    "reversal-check",
    "oracle-check",
)

_RATE_RE = re.compile(r"^(2pi\*)?([-+0-9.eE]+)\s*(Hz|kHz|MHz|rad/s)$")
_TIME_RE = re.compile(r"^([-+0-9.eE]+)\s*(ns|us|ms|s)$")
_LENGTH_RE = re.compile(r"^([-+0-9.eE]+)\s*(nm|um|mm|m)$")
_ANGLE_RE = re.compile(r"^([-+0-9.eE]*)\s*pi$")

_TIME_SCALE = {"ns": 1e-9, "us": 1e-6, "ms": 1e-3, "s": 1.0}
_LENGTH_SCALE = {"nm": 1e-9, "um": 1e-6, "mm": 1e-3, "m": 1.0}
_RATE_SCALE = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6}


class ConfigError(ValueError):
    pass


def parse_rate(text: str, key: str) -> float:
    """Angular rate in rad/s from '2pi*256kHz' or '8.2e5rad/s' forms."""
    m = _RATE_RE.match(text.strip())
    if not m:
        raise ConfigError(
            f"{key}: rate {text!r} needs an explicit unit tag "
            "(e.g. 2pi*256kHz or 1.61e6rad/s)"
        )
    prefix, value, unit = m.groups()
    value = float(value)
    if unit == "rad/s":
        if prefix:
            raise ConfigError(f"{key}: the 2pi* prefix applies to Hz units, not rad/s")
        return value
    return value * _RATE_SCALE[unit] * (TWO_PI if prefix else 1.0)


def parse_time(text: str, key: str) -> float:
    m = _TIME_RE.match(text.strip())
    if not m:
        raise ConfigError(f"{key}: time {text!r} needs a unit tag (ns, us, ms or s)")
    return float(m.group(1)) * _TIME_SCALE[m.group(2)]


def parse_length(text: str, key: str) -> float:
    m = _LENGTH_RE.match(text.strip())
    if not m:
        raise ConfigError(f"{key}: length {text!r} needs a unit tag (nm, um, mm or m)")
    return float(m.group(1)) * _LENGTH_SCALE[m.group(2)]


def parse_angle(text: str, key: str) -> float:
    """Radians, either plain or as a multiple of pi ('0.5pi', 'pi')."""
    text = text.strip()
    m = _ANGLE_RE.match(text)
    if m:
        factor = m.group(1)
        return (float(factor) if factor not in ("", "+", "-") else float(factor + "1")) * np.pi
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: angle {text!r} is neither a number nor a pi multiple") from None


def parse_flag(text: str, key: str) -> bool:
    low = text.strip().lower()
    if low in ("on", "true", "yes", "1"):
        return True
    if low in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"{key}: flag {text!r} must be on/off")


def read_pairs(path) -> dict:
    pairs = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in pairs:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            pairs[key] = value
    return pairs


REQUIRED_COMMON = ("n_atoms", "coupling", "pulse_area", "duration")
REQUIRED_EXTRA = {
    "superabsorb": ("initial_photons",),
    "ordinary": ("initial_photons",),
    "pump-off": ("initial_photons", "pump_off_at"),
    "aperture-scan": ("wavelength",),
    "scaling": ("atom_numbers", "t_window"),
    "reversal-check": ("reversal_time",),
}

KNOWN_KEYS = {
    "n_atoms", "mean_atoms", "coupling", "cavity_rate", "atomic_rate",
    "atomic_decay", "fock_cutoff", "pulse_area", "pump_phase",
    "initial_photons", "duration", "samples", "pump_off_at",
    "t_window", "atom_numbers", "wavelength", "offset_points",
    "reversal_time", "coupling_spread", "phase_spread", "atom_statistics",
    "mc_samples", "transit_time",
}


@dataclass
class RunInput:
    """A fully resolved run: the spec plus scenario extras and echoes."""

    scenario: str
    spec: ScenarioSpec
    extras: dict
    resolved: dict  # every key echoed in canonical config syntax


def _auto_cutoff(n_atoms, pump, coupling, duration, initial_photons):
    """Cutoff covering the larger of the input field and the emission estimate."""
    rho = abs(atomic_coherence(pump))
    emitted = (rho * n_atoms * coupling * duration) ** 2
    n_est = max(initial_photons, min(emitted, n_atoms), 0.25)
    return cutoff_for_amplitude(np.sqrt(n_est))


def parse_config(path, scenario: str) -> RunInput:
    """Validate a config file for one scenario and build the run input.

    Missing keys, untagged units and out-of-range values are all rejected
    with the offending field named; an empty file reports the full
    required-key list.
    """
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose one of {', '.join(SCENARIOS)}")
    pairs = read_pairs(path)

    unknown = set(pairs) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    required = list(REQUIRED_COMMON) + list(REQUIRED_EXTRA.get(scenario, ()))
    if scenario == "scaling":
        required.remove("duration")
    missing = [k for k in required if k not in pairs]
    if missing:
        raise ConfigError(
            f"missing required keys for scenario {scenario!r}: {', '.join(missing)}"
        )

    n_atoms = int(pairs["n_atoms"])
    if n_atoms < 1:
        raise ConfigError(f"n_atoms: must be a positive integer, got {n_atoms}")
    coupling = parse_rate(pairs["coupling"], "coupling")
    if coupling < 0:
        raise ConfigError("coupling: must be nonnegative")
    cavity_rate = parse_rate(pairs.get("cavity_rate", "0rad/s"), "cavity_rate")
    atomic_rate = parse_rate(pairs.get("atomic_rate", "0rad/s"), "atomic_rate")
    if cavity_rate < 0:
        raise ConfigError(f"cavity_rate: must be nonnegative, got {cavity_rate} rad/s")
    if atomic_rate < 0:
        raise ConfigError(f"atomic_rate: must be nonnegative, got {atomic_rate} rad/s")
    atomic_decay = parse_flag(pairs.get("atomic_decay", "off"), "atomic_decay")
    mean_atoms = float(pairs["mean_atoms"]) if "mean_atoms" in pairs else None

    pulse_area = parse_angle(pairs["pulse_area"], "pulse_area")
    if not 0.0 <= pulse_area <= np.pi:
        raise ConfigError(f"pulse_area: must lie in [0, pi], got {pulse_area}")
    pump = PumpSpec(pulse_area, parse_angle(pairs.get("pump_phase", "0"), "pump_phase"))

    initial_photons = float(pairs.get("initial_photons", "0"))
    if initial_photons < 0:
        raise ConfigError("initial_photons: must be nonnegative")
    if scenario in ("superradiance", "aperture-scan") and initial_photons != 0:
        raise ConfigError(f"initial_photons: scenario {scenario!r} starts from vacuum")

    if scenario == "scaling":
        duration = parse_time(pairs.get("duration", pairs["t_window"]), "duration")
    else:
        duration = parse_time(pairs["duration"], "duration")
    if duration <= 0:
        raise ConfigError("duration: must be positive")
    samples = int(pairs.get("samples", "201"))
    pump_off_at = parse_time(pairs["pump_off_at"], "pump_off_at") if "pump_off_at" in pairs else None

    cutoff_text = pairs.get("fock_cutoff", "auto")
    if cutoff_text == "auto":
        fock_cutoff = _auto_cutoff(n_atoms, pump, coupling, duration, initial_photons)
    else:
        fock_cutoff = int(cutoff_text)
        need = cutoff_for_amplitude(np.sqrt(initial_photons)) if initial_photons else 1
        if fock_cutoff < need:
            raise ConfigError(
                f"fock_cutoff: {fock_cutoff} is below the tail-safety minimum {need} "
                f"for initial_photons = {initial_photons}"
            )

    imperfections = None
    if any(k in pairs for k in ("coupling_spread", "phase_spread", "atom_statistics", "mc_samples")):
        imperfections = ImperfectionModel(
            coupling_spread=float(pairs.get("coupling_spread", "0")),
            phase_spread=parse_angle(pairs.get("phase_spread", "0"), "phase_spread"),
            atom_number_distribution=pairs.get("atom_statistics", "fixed"),
            transit_time=parse_time(pairs.get("transit_time", "100ns"), "transit_time"),
            monte_carlo_samples=int(pairs.get("mc_samples", "1")),
        )

    params = SystemParams(
        n_atoms=n_atoms,
        coupling=coupling,
        fock_cutoff=fock_cutoff,
        cavity_rate=cavity_rate,
        atomic_rate=atomic_rate,
        enable_atomic_decay=atomic_decay,
        mean_atoms=mean_atoms,
    )
    spec = ScenarioSpec(
        params=params,
        pump=pump,
        duration=duration,
        samples=samples,
        initial_photons=initial_photons,
        pump_off_at=pump_off_at,
        imperfections=imperfections,
    )

    extras = {}
    if scenario == "aperture-scan":
        extras["wavelength"] = parse_length(pairs["wavelength"], "wavelength")
        extras["offset_points"] = int(pairs.get("offset_points", "41"))
        if extras["offset_points"] < 3:
            raise ConfigError("offset_points: need at least 3 scan positions")
    if scenario == "scaling":
        try:
            extras["atom_numbers"] = [int(v) for v in pairs["atom_numbers"].split(",")]
        except ValueError:
            raise ConfigError(f"atom_numbers: expected comma-separated integers") from None
        if not extras["atom_numbers"]:
            raise ConfigError("atom_numbers: list is empty")
        extras["t_window"] = parse_time(pairs["t_window"], "t_window")
    if scenario == "reversal-check":
        extras["reversal_time"] = parse_time(pairs["reversal_time"], "reversal_time")
    if scenario == "oracle-check" and n_atoms > 3:
        raise ConfigError("n_atoms: the oracle check is limited to n_atoms <= 3")

    return RunInput(scenario=scenario, spec=spec, extras=extras,
                    resolved=resolve(scenario, spec, extras))


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def resolve(scenario: str, spec: ScenarioSpec, extras: dict) -> dict:
    """Echo a spec back into canonical config syntax (kHz and ns facing out)."""
    p = spec.params
    out = {
        "n_atoms": str(p.n_atoms),
        "coupling": f"2pi*{_fmt(p.coupling / TWO_PI / 1e3)}kHz",
        "cavity_rate": f"2pi*{_fmt(p.cavity_rate / TWO_PI / 1e3)}kHz",
        "atomic_rate": f"2pi*{_fmt(p.atomic_rate / TWO_PI / 1e3)}kHz",
        "atomic_decay": "on" if p.enable_atomic_decay else "off",
        "fock_cutoff": str(p.fock_cutoff),
        "pulse_area": _fmt(spec.pump.pulse_area),
        "pump_phase": _fmt(spec.pump.phase),
        "initial_photons": _fmt(spec.initial_photons),
        "duration": f"{_fmt(spec.duration * 1e9)}ns",
        "samples": str(spec.samples),
    }
    if p.mean_atoms is not None:
        out["mean_atoms"] = _fmt(p.mean_atoms)
    if spec.pump_off_at is not None:
        out["pump_off_at"] = f"{_fmt(spec.pump_off_at * 1e9)}ns"
    if spec.imperfections is not None:
        imp = spec.imperfections
        out.update(
            coupling_spread=_fmt(imp.coupling_spread),
            phase_spread=_fmt(imp.phase_spread),
            atom_statistics=imp.atom_number_distribution,
            transit_time=f"{_fmt(imp.transit_time * 1e9)}ns",
            mc_samples=str(imp.monte_carlo_samples),
        )
    if scenario == "aperture-scan":
        out["wavelength"] = f"{_fmt(extras['wavelength'] * 1e9)}nm"
        out["offset_points"] = str(extras["offset_points"])
    if scenario == "scaling":
        out["atom_numbers"] = ",".join(str(n) for n in extras["atom_numbers"])
        out["t_window"] = f"{_fmt(extras['t_window'] * 1e9)}ns"
    if scenario == "reversal-check":
        out["reversal_time"] = f"{_fmt(extras['reversal_time'] * 1e9)}ns"
    return out


def config_text(resolved: dict) -> str:
    return "".join(f"{k} = {v}\n" for k, v in sorted(resolved.items()))
