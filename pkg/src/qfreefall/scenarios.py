"""Scenario runners behind the command line.

Each runner turns a LoadedScenario into a ScenarioResult: a summary of
named scalars, zero or more tables destined for CSV files, and a set of
named pass/fail checks.  Runners hold no I/O; writing files and choosing
exit codes is the caller's job.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .composite import (
    dephasing_factor,
    dephasing_factor_gaussian,
    dephasing_factor_thermal,
    dephasing_time,
    echo_protocol,
    factorized_composite,
    mean_energy_and_heat_capacity,
    thermal_weights,
)
from .config import LoadedScenario
from .dynamics import (
    check_ep_density_shift,
    free_evolve,
    gravity_evolve,
    split_step_evolve,
)
from .errors import ApproximationWarning
from .lattice import quad
from .phasespace import check_ep_velocity_universality, liouville_shift, wigner
from .qubitphase import (
    SPEED_OF_LIGHT,
    classical_phase,
    free_fall_path,
    phase_blur_parameter,
    phase_shift,
    phase_shift_t,
    proper_time,
    relative_shift,
)
from .states import WaveFunction, dispersion, moments

Table = tuple[tuple[str, ...], list[list[Any]]]


@dataclass(frozen=True)
class ScenarioResult:
    """What a scenario produced: scalars, tables, and pass/fail checks."""

    kind: str
    summary: dict[str, Any]
    tables: dict[str, Table] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(self.checks.values())


def _density_table(grid, columns: dict[str, np.ndarray]) -> Table:
    header = ("x",) + tuple(columns)
    rows = [
        [float(x)] + [float(col[i]) for col in columns.values()]
        for i, x in enumerate(grid.x)
    ]
    return header, rows


def _run_ep_a(loaded: LoadedScenario, threads: int) -> ScenarioResult:
    state, params = loaded.state, loaded.params
    report = check_ep_density_shift(state, params, tolerance=loaded.tolerances["density"])

    fallen = gravity_evolve(state, params)
    free = free_evolve(state, params.t)
    shifted = np.roll(free.density, -int(report.details["shift_cells"]))

    summary: dict[str, Any] = {
        "shift_applied": report.shift_applied,
        "nominal_shift": report.details["nominal_shift"],
        "max_density_mismatch": report.max_density_mismatch,
        "moment_mismatch": {str(k): v for k, v in report.moment_table.items()},
        "ep_violating": report.ep_violating,
    }
    checks = {
        "density_shift": report.passed,
        "no_violation": not report.ep_violating,
    }

    steps = loaded.values["oracle_steps"]
    if steps:
        m_i, g_eff = params.resolve(state.mass)
        template = state if m_i == state.mass else WaveFunction(
            state.grid, state.amplitudes, m_i
        )
        oracle = split_step_evolve(template, m_i * g_eff, params.t, steps)
        mismatch = float(np.max(np.abs(oracle.density - fallen.density)))
        summary["oracle_steps"] = steps
        summary["oracle_density_mismatch"] = mismatch
        checks["oracle"] = mismatch < loaded.tolerances["oracle"]

    tables = {
        "density": _density_table(
            state.grid,
            {"initial": state.density, "fallen": fallen.density, "free_shifted": shifted},
        )
    }
    return ScenarioResult(loaded.kind, summary, tables, checks)


def _run_ep_b(loaded: LoadedScenario, threads: int) -> ScenarioResult:
    violation = loaded.values.get("violation")
    report = check_ep_velocity_universality(
        loaded.state,
        loaded.values["second_mass"],
        loaded.params,
        tolerance=loaded.tolerances["velocity_map"],
        params_second=violation,
    )
    summary: dict[str, Any] = {
        "first_mass": loaded.state.mass,
        "second_mass": loaded.values["second_mass"],
        "max_flow_residual": report.max_density_mismatch,
        "ep_violating": report.ep_violating,
    }
    summary.update(report.details)
    if violation is None:
        checks = {
            "velocity_flow": report.passed,
            "no_violation": not report.ep_violating,
        }
    else:
        summary["violation_inertial_mass"] = violation.inertial_mass
        summary["violation_gravitational_mass"] = violation.gravitational_mass
        checks = {"violation_detected": report.ep_violating}
    tables = {
        "moments": (
            ("order", "mismatch"),
            [[int(k), float(v)] for k, v in sorted(report.moment_table.items())],
        )
    }
    return ScenarioResult(loaded.kind, summary, tables, checks)


def _run_dephase(loaded: LoadedScenario, threads: int) -> ScenarioResult:
    spectrum = loaded.spectrum
    beta = loaded.values["beta"]
    g = loaded.values["g"]
    delta_x = loaded.values["delta_x"]
    times = loaded.values["times"]

    mean, c_v = mean_energy_and_heat_capacity(spectrum, beta)
    tau = dephasing_time(beta, g, delta_x, c_v)
    weights = thermal_weights(spectrum, beta)

    def row(t: float) -> tuple[list[float], float, int]:
        gamma = dephasing_factor_thermal(spectrum, beta, g, t, delta_x)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ApproximationWarning)
            gauss = dephasing_factor_gaussian(spectrum, beta, g, t, delta_x)
        drift = abs(dephasing_factor(weights, spectrum, g, t, delta_x) - gamma)
        return (
            [t, delta_x, gamma.real, gamma.imag, abs(gamma), gauss],
            drift,
            len(caught),
        )

    # map() hands results back in input order, keeping files deterministic
    # for any thread count.
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            computed = list(pool.map(row, times))
    else:
        computed = [row(t) for t in times]

    rows = [entry[0] for entry in computed]
    worst_drift = max(entry[1] for entry in computed)
    stretched = sum(entry[2] for entry in computed)

    summary = {
        "levels": spectrum.levels,
        "beta": beta,
        "g": g,
        "delta_x": delta_x,
        "mean_energy": mean,
        "heat_capacity": c_v,
        "dephasing_time": tau,
        "max_weight_identity_drift": worst_drift,
        "u_max": g * max(times) * delta_x / beta,
        "approximation_warnings": stretched,
    }
    checks = {"weight_identity": worst_drift < loaded.tolerances["identity"]}
    tables = {
        "sweep": (
            ("t", "delta_x", "re_gamma", "im_gamma", "abs_gamma", "gaussian_approx"),
            rows,
        )
    }
    return ScenarioResult(loaded.kind, summary, tables, checks)


def _run_echo(loaded: LoadedScenario, threads: int) -> ScenarioResult:
    spectrum = loaded.spectrum
    beta = loaded.values["beta"]
    g = loaded.values["g"]
    period = loaded.values["period"]
    amplitudes = np.sqrt(thermal_weights(spectrum, beta))
    composite = factorized_composite(spectrum, amplitudes, loaded.state)

    result = echo_protocol(composite, g, period, loaded.values["separation"])

    predicted_mid = abs(
        dephasing_factor_thermal(spectrum, beta, g, period, result.separation)
    )
    summary = {
        "separation": result.separation,
        "period": period,
        "g": g,
        "beta": beta,
        "visibility_before": result.visibility_before,
        "visibility_mid": result.visibility_mid,
        "visibility_after": result.visibility_after,
        "purity_before": result.purity_before,
        "purity_mid": result.purity_mid,
        "purity_after": result.purity_after,
        "thermal_prediction_mid": predicted_mid,
        "thermal_prediction_mismatch": abs(result.visibility_mid - predicted_mid),
    }
    tol = loaded.tolerances
    checks = {
        "dephased_mid": result.visibility_mid < tol["dephased_below"],
        "revived": result.visibility_after > 1.0 - tol["revival"],
        "purity_restored": result.purity_after > 1.0 - tol["revival"],
    }
    tables = {
        "stages": (
            ("stage", "time", "visibility", "purity"),
            [
                ["before", 0.0, result.visibility_before, result.purity_before],
                ["mid", period, result.visibility_mid, result.purity_mid],
                ["after", 2.0 * period, result.visibility_after, result.purity_after],
            ],
        )
    }
    return ScenarioResult(loaded.kind, summary, tables, checks)


def _run_qubit_phase(loaded: LoadedScenario, threads: int) -> ScenarioResult:
    g = loaded.values["g"]
    length = loaded.values["length"]
    sigma_x = loaded.values["sigma_x"]
    samples = loaded.values["proper_time_samples"]
    si = loaded.si

    u = relative_shift(g, length, si=si)
    fall_time = float(np.sqrt(2.0 * length / g))
    # In SI the path integrals run in geometric units so that the weak
    # field correction terms carry the same 1/c^2 as the phase formulas.
    g_geo = g / SPEED_OF_LIGHT if si else g
    path = free_fall_path(g_geo, fall_time, samples)
    tau = proper_time(path, g_geo)

    rows: list[list[float]] = []
    worst = 0.0
    for omega in loaded.values["omegas"]:
        phi = phase_shift_t(omega, g, fall_time, si=si)
        blur = phase_blur_parameter(omega, g, length, sigma_x, si=si)
        classical = classical_phase(omega, path, g_geo)
        residual = abs(classical - phi) / max(abs(phi), 1.0)
        worst = max(worst, residual)
        rows.append([omega, phi, blur, classical, residual])

    summary = {
        "u": u,
        "g": g,
        "length": length,
        "fall_time": fall_time,
        "sigma_x": sigma_x,
        "si": si,
        "proper_time_samples": samples,
        "proper_time_gravitational_term": tau.term_gravitational,
        "proper_time_kinematic_term": tau.term_kinematic,
        "max_path_residual": worst,
    }
    checks = {"classical_phase_match": worst < loaded.tolerances["proper_time"]}
    tables = {
        "phases": (
            ("omega", "phi_g", "blur_b", "classical_phase", "residual"),
            rows,
        )
    }
    return ScenarioResult(loaded.kind, summary, tables, checks)


def _run_wigner(loaded: LoadedScenario, threads: int) -> ScenarioResult:
    state = loaded.state
    wmap = wigner(state)

    marginal = wmap.values.sum(axis=1) * wmap.d_axis
    marginal_err = float(np.max(np.abs(marginal - state.density)))
    integral_err = abs(wmap.integral() - 1.0)
    minimum = float(wmap.values.min())

    tol = loaded.tolerances
    summary: dict[str, Any] = {
        "grid_n": state.grid.n,
        "axis_points": int(wmap.axis.size),
        "marginal_mismatch": marginal_err,
        "integral_error": integral_err,
        "min_value": minimum,
        "imag_residue": wmap.imag_residue,
        "negative_region": minimum < -1e-6,
    }
    checks = {
        "position_marginal": marginal_err < tol["marginal"],
        "normalized": integral_err < tol["marginal"],
    }
    tables: dict[str, Table] = {
        "marginals": _density_table(
            state.grid, {"density": state.density, "wigner_marginal": marginal}
        ),
        "slice": (
            ("p", "value"),
            [
                [float(p), float(v)]
                for p, v in zip(wmap.axis, wmap.values[state.grid.n // 2])
            ],
        ),
    }

    if loaded.params is not None:
        evolved = gravity_evolve(state, loaded.params)
        predicted = liouville_shift(wmap, loaded.params)
        flow = float(np.max(np.abs(wigner(evolved).values - predicted.values)))
        summary["flow_residual"] = flow
        checks["flow"] = flow < tol["flow"]

    return ScenarioResult(loaded.kind, summary, tables, checks)


def _run_evolve(loaded: LoadedScenario, threads: int) -> ScenarioResult:
    state, params = loaded.state, loaded.params
    steps = loaded.values["steps"]
    m_i, g_eff = params.resolve(state.mass)
    template = state if m_i == state.mass else WaveFunction(
        state.grid, state.amplitudes, m_i
    )

    analytic = gravity_evolve(template, params)
    numeric = split_step_evolve(template, m_i * g_eff, params.t, steps)
    free = free_evolve(template, params.t)

    norm_err = abs(float(quad(numeric.density, state.grid.dx).real) - 1.0)
    oracle_err = float(np.max(np.abs(numeric.density - analytic.density)))
    dispersion_err = abs(dispersion(analytic) - dispersion(free))

    tol = loaded.tolerances
    summary = {
        "steps": steps,
        "fall_distance": moments(template, 1) - moments(analytic, 1),
        "norm_error": norm_err,
        "oracle_density_mismatch": oracle_err,
        "dispersion_vs_free": dispersion_err,
    }
    checks = {
        "norm": norm_err < tol["norm"],
        "oracle": oracle_err < tol["oracle"],
        "dispersion": dispersion_err < tol["dispersion"],
    }
    tables = {
        "density": _density_table(
            state.grid,
            {
                "initial": state.density,
                "analytic": analytic.density,
                "split_step": numeric.density,
            },
        )
    }
    return ScenarioResult(loaded.kind, summary, tables, checks)


_RUNNERS = {
    "ep-a": _run_ep_a,
    "ep-b": _run_ep_b,
    "dephase": _run_dephase,
    "echo": _run_echo,
    "qubit-phase": _run_qubit_phase,
    "wigner": _run_wigner,
    "evolve": _run_evolve,
}


def run_scenario(loaded: LoadedScenario, threads: int = 1) -> ScenarioResult:
    """Execute a loaded scenario and collect its results."""
    if threads < 1:
        raise ValueError(f"threads must be positive, got {threads}")
    return _RUNNERS[loaded.kind](loaded, threads)
