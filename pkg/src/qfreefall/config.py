"""Scenario configuration loading and validation.

Configs are YAML mappings with one required top-level key, scenario,
naming what to run; the other sections depend on the scenario.  Every
field is checked here with a dotted-path diagnostic, and the domain
objects (grid, states, spectrum) are constructed eagerly so that module
preconditions surface as configuration errors rather than mid-run
failures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from .composite import InternalSpectrum, make_spectrum
from .dynamics import EvolutionParams
from .errors import ConfigError, QFreefallError
from .lattice import Grid1D, make_grid
from .states import PacketSpec, WaveFunction, cat_state, gaussian_packet

SCENARIOS = ("ep-a", "ep-b", "dephase", "echo", "qubit-phase", "wigner", "evolve")


@dataclass(frozen=True)
class LoadedScenario:
    """A validated scenario with its domain objects already built."""

    kind: str
    si: bool
    basename: str
    grid: Grid1D | None = None
    state: WaveFunction | None = None
    params: EvolutionParams | None = None
    spectrum: InternalSpectrum | None = None
    values: dict[str, Any] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)


def _type_name(value: Any) -> str:
    return type(value).__name__


def _as_mapping(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping, got {_type_name(value)}")
    return value


def _check_known(section: dict, known: tuple[str, ...], path: str) -> None:
    for key in section:
        if key not in known:
            raise ConfigError(
                f"{path}.{key}: unknown field (expected one of {', '.join(known)})"
            )


def _get(section: dict, key: str, path: str, default: Any = ...) -> Any:
    if key in section:
        return section[key]
    if default is ...:
        raise ConfigError(f"{path}.{key}: missing required field")
    return default


def _as_float(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {_type_name(value)}")
    out = float(value)
    if not np.isfinite(out):
        raise ConfigError(f"{path}: must be finite, got {out!r}")
    return out


def _get_float(section: dict, key: str, path: str, default: Any = ...) -> float:
    value = _get(section, key, path, default)
    return _as_float(value, f"{path}.{key}")


def _get_int(section: dict, key: str, path: str, default: Any = ...) -> int:
    value = _get(section, key, path, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}: expected an integer, got {_type_name(value)}")
    return value


def _get_bool(section: dict, key: str, path: str, default: Any = ...) -> bool:
    value = _get(section, key, path, default)
    if not isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected true or false, got {_type_name(value)}")
    return value


def _get_str(section: dict, key: str, path: str, default: Any = ...) -> str:
    value = _get(section, key, path, default)
    if not isinstance(value, str):
        raise ConfigError(f"{path}.{key}: expected a string, got {_type_name(value)}")
    return value


def _build(path: str, factory, *args, **kwargs):
    """Run a module constructor, converting its rejection into a ConfigError."""
    try:
        return factory(*args, **kwargs)
    except (QFreefallError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _load_grid(config: dict, path: str = "grid") -> Grid1D:
    section = _as_mapping(_get(config, "grid", ""), path)
    _check_known(section, ("x_min", "x_max", "n"), path)
    x_min = _get_float(section, "x_min", path)
    x_max = _get_float(section, "x_max", path)
    n = _get_int(section, "n", path)
    return _build(path, make_grid, x_min, x_max, n)


def _load_packet(section: dict, path: str) -> PacketSpec:
    _check_known(section, ("mean_x", "mean_v", "sigma_x", "weight"), path)
    return _build(
        path,
        PacketSpec,
        mean_x=_get_float(section, "mean_x", path, 0.0),
        mean_v=_get_float(section, "mean_v", path, 0.0),
        sigma_x=_get_float(section, "sigma_x", path, 1.0),
        weight=_get_float(section, "weight", path, 1.0),
    )


def _load_state(config: dict, grid: Grid1D, path: str = "state") -> WaveFunction:
    section = _as_mapping(_get(config, "state", ""), path)
    _check_known(section, ("kind", "mass", "packets"), path)
    kind = _get_str(section, "kind", path)
    mass = _get_float(section, "mass", path)
    packets = _get(section, "packets", path)
    if not isinstance(packets, list) or not packets:
        raise ConfigError(f"{path}.packets: expected a nonempty list")
    specs = [
        _load_packet(_as_mapping(p, f"{path}.packets[{i}]"), f"{path}.packets[{i}]")
        for i, p in enumerate(packets)
    ]
    if kind == "gaussian":
        if len(specs) != 1:
            raise ConfigError(f"{path}.packets: a gaussian state takes exactly one packet")
        return _build(path, gaussian_packet, grid, mass, specs[0])
    if kind == "cat":
        if len(specs) < 2:
            raise ConfigError(f"{path}.packets: a cat state takes at least two packets")
        return _build(path, cat_state, grid, mass, specs)
    raise ConfigError(f"{path}.kind: expected gaussian or cat, got {kind!r}")


def _load_evolution(config: dict, path: str = "evolution") -> EvolutionParams:
    section = _as_mapping(_get(config, "evolution", ""), path)
    _check_known(
        section, ("g", "t", "inertial_mass", "gravitational_mass"), path
    )
    kwargs: dict[str, float] = {
        "g": _get_float(section, "g", path),
        "t": _get_float(section, "t", path),
    }
    for key in ("inertial_mass", "gravitational_mass"):
        if key in section:
            kwargs[key] = _get_float(section, key, path)
    return _build(path, EvolutionParams, **kwargs)


def _load_spectrum(config: dict, path: str = "spectrum") -> InternalSpectrum:
    section = _as_mapping(_get(config, "spectrum", ""), path)
    _check_known(
        section, ("kind", "base_mass", "omega1", "omega_bar", "levels", "omegas"), path
    )
    kind = _get_str(section, "kind", path)
    base_mass = _get_float(section, "base_mass", path)
    kwargs: dict[str, Any] = {}
    if "omega1" in section:
        kwargs["omega1"] = _get_float(section, "omega1", path)
    if "omega_bar" in section:
        kwargs["omega_bar"] = _get_float(section, "omega_bar", path)
    if "levels" in section:
        kwargs["levels"] = _get_int(section, "levels", path)
    if "omegas" in section:
        raw = _get(section, "omegas", path)
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{path}.omegas: expected a nonempty list of numbers")
        kwargs["omegas"] = [
            _as_float(v, f"{path}.omegas[{i}]") for i, v in enumerate(raw)
        ]
    return _build(path, make_spectrum, kind, base_mass, **kwargs)


def _load_tolerances(
    config: dict, defaults: dict[str, float], path: str = "tolerances"
) -> dict[str, float]:
    out = dict(defaults)
    if "tolerances" not in config:
        return out
    section = _as_mapping(config["tolerances"], path)
    _check_known(section, tuple(defaults), path)
    for key in section:
        value = _get_float(section, key, path)
        if not value > 0.0:
            raise ConfigError(f"{path}.{key}: must be positive, got {value!r}")
        out[key] = value
    return out


def _load_times(config: dict, path: str = "times") -> list[float]:
    raw = _get(config, "times", "")
    if isinstance(raw, list):
        if not raw:
            raise ConfigError(f"{path}: expected a nonempty list")
        return [_as_float(v, f"{path}[{i}]") for i, v in enumerate(raw)]
    section = _as_mapping(raw, path)
    _check_known(section, ("start", "stop", "count"), path)
    start = _get_float(section, "start", path)
    stop = _get_float(section, "stop", path)
    count = _get_int(section, "count", path)
    if count < 2:
        raise ConfigError(f"{path}.count: need at least 2 points, got {count}")
    if not stop > start:
        raise ConfigError(f"{path}: stop must exceed start")
    return [float(v) for v in np.linspace(start, stop, count)]


_COMMON_KEYS = ("scenario", "si", "output")

_SCENARIO_KEYS: dict[str, tuple[str, ...]] = {
    "ep-a": ("grid", "state", "evolution", "oracle_steps", "tolerances"),
    "ep-b": ("grid", "state", "second_mass", "evolution", "violation", "tolerances"),
    "dephase": ("spectrum", "beta", "g", "delta_x", "times", "tolerances"),
    "echo": (
        "grid",
        "sigma_x",
        "spectrum",
        "beta",
        "g",
        "period",
        "separation",
        "tolerances",
    ),
    "qubit-phase": (
        "omegas",
        "g",
        "length",
        "sigma_x",
        "proper_time_samples",
        "tolerances",
    ),
    "wigner": ("grid", "state", "evolution", "tolerances"),
    "evolve": ("grid", "state", "evolution", "steps", "tolerances"),
}


def _positive(value: float, path: str) -> float:
    if not value > 0.0:
        raise ConfigError(f"{path}: must be positive, got {value!r}")
    return value


def load_config(path: str, si_override: bool = False) -> LoadedScenario:
    """Parse and validate a scenario config file.

    Raises ConfigError with a field path (or the YAML line and column)
    on any problem.  si_override forces SI units regardless of the file.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"{path}: {where}{problem}") from exc
    if raw is None:
        raise ConfigError(f"{path}: the file is empty")
    config = _as_mapping(raw, "top level")

    kind = _get_str(config, "scenario", "")
    if kind not in SCENARIOS:
        raise ConfigError(
            f"scenario: unknown scenario {kind!r} (expected one of {', '.join(SCENARIOS)})"
        )
    _check_known(config, _COMMON_KEYS + _SCENARIO_KEYS[kind], "top level")

    si = _get_bool(config, "si", "", False) or si_override
    basename = kind
    if "output" in config:
        out_section = _as_mapping(config["output"], "output")
        _check_known(out_section, ("basename",), "output")
        basename = _get_str(out_section, "basename", "output")
        if not basename or "/" in basename or basename != basename.strip():
            raise ConfigError(f"output.basename: not a usable file stem: {basename!r}")

    loader = _SCENARIO_LOADERS[kind]
    return loader(config, kind, si, basename)


def _load_ep_a(config: dict, kind: str, si: bool, basename: str) -> LoadedScenario:
    grid = _load_grid(config)
    state = _load_state(config, grid)
    params = _load_evolution(config)
    steps = _get_int(config, "oracle_steps", "", 1024)
    if steps < 0:
        raise ConfigError(f"oracle_steps: must be 0 (disabled) or positive, got {steps}")
    tolerances = _load_tolerances(config, {"density": 1e-10, "oracle": 1e-6})
    return LoadedScenario(
        kind, si, basename, grid, state, params,
        values={"oracle_steps": steps}, tolerances=tolerances,
    )


def _load_ep_b(config: dict, kind: str, si: bool, basename: str) -> LoadedScenario:
    grid = _load_grid(config)
    state = _load_state(config, grid)
    params = _load_evolution(config)
    second_mass = _positive(_get_float(config, "second_mass", ""), "second_mass")
    values: dict[str, Any] = {"second_mass": second_mass}
    if "violation" in config:
        section = _as_mapping(config["violation"], "violation")
        _check_known(section, ("inertial_mass", "gravitational_mass"), "violation")
        values["violation"] = _build(
            "violation",
            EvolutionParams,
            g=params.g,
            t=params.t,
            inertial_mass=_get_float(section, "inertial_mass", "violation"),
            gravitational_mass=_get_float(section, "gravitational_mass", "violation"),
        )
    tolerances = _load_tolerances(config, {"velocity_map": 1e-8})
    return LoadedScenario(
        kind, si, basename, grid, state, params, values=values, tolerances=tolerances
    )


def _load_dephase(config: dict, kind: str, si: bool, basename: str) -> LoadedScenario:
    spectrum = _load_spectrum(config)
    beta = _positive(_get_float(config, "beta", ""), "beta")
    g = _positive(_get_float(config, "g", ""), "g")
    delta_x = _positive(_get_float(config, "delta_x", ""), "delta_x")
    times = _load_times(config)
    if any(t < 0.0 for t in times):
        raise ConfigError("times: all sweep times must be nonnegative")
    tolerances = _load_tolerances(config, {"identity": 1e-12})
    return LoadedScenario(
        kind, si, basename, spectrum=spectrum,
        values={"beta": beta, "g": g, "delta_x": delta_x, "times": times},
        tolerances=tolerances,
    )


def _load_echo(config: dict, kind: str, si: bool, basename: str) -> LoadedScenario:
    grid = _load_grid(config)
    spectrum = _load_spectrum(config)
    sigma_x = _positive(_get_float(config, "sigma_x", ""), "sigma_x")
    beta = _positive(_get_float(config, "beta", ""), "beta")
    g = _get_float(config, "g", "")
    period = _positive(_get_float(config, "period", ""), "period")
    separation = _positive(_get_float(config, "separation", ""), "separation")
    state = _build(
        "sigma_x", gaussian_packet, grid, spectrum.base_mass, PacketSpec(sigma_x=sigma_x)
    )
    tolerances = _load_tolerances(config, {"revival": 1e-8, "dephased_below": 0.5})
    return LoadedScenario(
        kind, si, basename, grid, state, spectrum=spectrum,
        values={"beta": beta, "g": g, "period": period, "separation": separation},
        tolerances=tolerances,
    )


def _load_qubit_phase(config: dict, kind: str, si: bool, basename: str) -> LoadedScenario:
    raw = _get(config, "omegas", "")
    if not isinstance(raw, list) or not raw:
        raise ConfigError("omegas: expected a nonempty list of frequencies")
    omegas = [
        _positive(_as_float(v, f"omegas[{i}]"), f"omegas[{i}]")
        for i, v in enumerate(raw)
    ]
    g = _positive(_get_float(config, "g", ""), "g")
    length = _positive(_get_float(config, "length", ""), "length")
    sigma_x = _positive(_get_float(config, "sigma_x", ""), "sigma_x")
    samples = _get_int(config, "proper_time_samples", "", 10001)
    if samples < 3:
        raise ConfigError(f"proper_time_samples: need at least 3, got {samples}")
    tolerances = _load_tolerances(config, {"proper_time": 1e-9})
    return LoadedScenario(
        kind, si, basename,
        values={
            "omegas": omegas, "g": g, "length": length,
            "sigma_x": sigma_x, "proper_time_samples": samples,
        },
        tolerances=tolerances,
    )


def _load_wigner(config: dict, kind: str, si: bool, basename: str) -> LoadedScenario:
    grid = _load_grid(config)
    state = _load_state(config, grid)
    params = _load_evolution(config) if "evolution" in config else None
    tolerances = _load_tolerances(config, {"marginal": 1e-8, "flow": 1e-6})
    return LoadedScenario(kind, si, basename, grid, state, params, tolerances=tolerances)


def _load_evolve(config: dict, kind: str, si: bool, basename: str) -> LoadedScenario:
    grid = _load_grid(config)
    state = _load_state(config, grid)
    params = _load_evolution(config)
    steps = _get_int(config, "steps", "", 256)
    if steps < 1:
        raise ConfigError(f"steps: must be positive, got {steps}")
    tolerances = _load_tolerances(
        config, {"oracle": 1e-6, "norm": 1e-12, "dispersion": 1e-10}
    )
    return LoadedScenario(
        kind, si, basename, grid, state, params,
        values={"steps": steps}, tolerances=tolerances,
    )


_SCENARIO_LOADERS = {
    "ep-a": _load_ep_a,
    "ep-b": _load_ep_b,
    "dephase": _load_dephase,
    "echo": _load_echo,
    "qubit-phase": _load_qubit_phase,
    "wigner": _load_wigner,
    "evolve": _load_evolve,
}
