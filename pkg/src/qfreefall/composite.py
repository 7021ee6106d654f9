"""Particles with internal structure: mass superpositions and dephasing.

A composite particle with internal level n has total mass
m_n = m_0 + omega_n (natural units), so each branch of a factorized
state falls with its own mass.  While the branches stay spatially
indistinguishable, tracing out the internal state leaves the
translational coherence multiplied by the dephasing factor

    Gamma(t, dx) = sum_n w_n exp(-i omega_n g t dx)

whose thermal form is a ratio of partition functions at shifted
arguments, Z(beta + i g t dx) / Z(beta).  Reversing the field after a
period undoes the dephasing: the package's echo protocol checks that
the visibility lost at the midpoint is recovered at the end.

Validity of the shared-envelope picture requires every level spacing to
be small against the base mass; that regime is guarded at construction
time and its residual packet-width mismatch is reported by
dispersion_regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import EvolutionParams, gravity_evolve
from .errors import MemoryGuardError, RegimeError
from .lattice import Grid1D
from .states import WaveFunction, dispersion

# largest allowed omega_max / base_mass for the shared-envelope regime
REGIME_RATIO = 0.01
# dense reduced matrices above this lattice size are refused
DENSE_MATRIX_MAX_N = 4096


@dataclass(frozen=True)
class InternalSpectrum:
    """Internal energy offsets omega_n above a base mass.

    omegas must start at zero and be nondecreasing; every offset must be
    small against base_mass (ratio below REGIME_RATIO) so that all
    branches share one envelope to good accuracy.
    """

    omegas: np.ndarray
    base_mass: float

    def __post_init__(self) -> None:
        omegas = np.asarray(self.omegas, dtype=float)
        object.__setattr__(self, "omegas", omegas)
        if omegas.ndim != 1 or omegas.size < 1:
            raise ValueError("need a 1d spectrum with at least one level")
        if omegas[0] != 0.0:
            raise ValueError(f"the lowest offset must be zero, got {omegas[0]!r}")
        if np.any(np.diff(omegas) < 0.0):
            raise ValueError("offsets must be nondecreasing")
        if not (self.base_mass > 0.0 and np.isfinite(self.base_mass)):
            raise ValueError(f"base_mass must be positive, got {self.base_mass!r}")
        ratio = float(omegas[-1]) / self.base_mass
        if ratio >= REGIME_RATIO:
            raise RegimeError(
                f"omega_max/base_mass = {ratio:.3g} is outside the "
                f"shared-envelope regime (< {REGIME_RATIO:g})"
            )

    @property
    def levels(self) -> int:
        return int(self.omegas.size)

    @property
    def masses(self) -> np.ndarray:
        """Total mass per level, base_mass + omega_n."""
        return self.base_mass + self.omegas


def make_spectrum(
    kind: str,
    base_mass: float,
    *,
    omega1: float | None = None,
    omega_bar: float | None = None,
    levels: int | None = None,
    omegas=None,
) -> InternalSpectrum:
    """Build an internal spectrum of one of three kinds.

    "two_level" takes omega1, "harmonic" takes omega_bar and levels (an
    equally spaced ladder 0, omega_bar, ..., (levels-1)*omega_bar), and
    "explicit" takes the offsets directly.
    """
    if kind == "two_level":
        if omega1 is None or not omega1 > 0.0:
            raise ValueError(f"two_level needs omega1 > 0, got {omega1!r}")
        values = np.array([0.0, float(omega1)])
    elif kind == "harmonic":
        if omega_bar is None or not omega_bar > 0.0:
            raise ValueError(f"harmonic needs omega_bar > 0, got {omega_bar!r}")
        if levels is None or not isinstance(levels, (int, np.integer)) or levels < 2:
            raise ValueError(f"harmonic needs an integer levels >= 2, got {levels!r}")
        values = float(omega_bar) * np.arange(int(levels), dtype=float)
    elif kind == "explicit":
        if omegas is None:
            raise ValueError("explicit needs the offsets")
        values = np.asarray(omegas, dtype=float)
    else:
        raise ValueError(f"unknown spectrum kind {kind!r}")
    return InternalSpectrum(values, float(base_mass))


def partition_function(spectrum: InternalSpectrum, beta: complex) -> complex:
    """Z(beta) = sum_n exp(-beta * omega_n), defined for complex beta."""
    return complex(np.exp(-complex(beta) * spectrum.omegas).sum())


def thermal_weights(spectrum: InternalSpectrum, beta: float) -> np.ndarray:
    """Boltzmann weights exp(-beta omega_n) / Z for beta >= 0."""
    if not (beta >= 0.0):
        raise ValueError(f"beta must be nonnegative, got {beta!r}")
    if math.isinf(beta):
        weights = (spectrum.omegas == 0.0).astype(float)
        return weights / weights.sum()
    unnorm = np.exp(-beta * spectrum.omegas)
    return unnorm / unnorm.sum()


def mean_energy_and_heat_capacity(
    spectrum: InternalSpectrum, beta: float
) -> tuple[float, float]:
    """Thermal internal energy and heat capacity beta^2 * Var(omega)."""
    if not (beta > 0.0 and np.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta!r}")
    weights = thermal_weights(spectrum, beta)
    mean = float(weights @ spectrum.omegas)
    variance = float(weights @ (spectrum.omegas - mean) ** 2)
    return mean, beta**2 * variance


def dephasing_factor(
    weights: np.ndarray, spectrum: InternalSpectrum, g: float, t: float, delta_x: float
) -> complex:
    """Gamma = sum_n w_n exp(-i omega_n g t delta_x) for given level weights."""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != spectrum.omegas.shape:
        raise ValueError(
            f"weights shape {weights.shape} does not match the spectrum "
            f"({spectrum.omegas.shape})"
        )
    if np.any(weights < 0.0) or abs(weights.sum() - 1.0) > 1e-10:
        raise ValueError("weights must be nonnegative and sum to one")
    phases = np.exp(-1j * spectrum.omegas * g * t * delta_x)
    return complex(weights @ phases)


def dephasing_factor_thermal(
    spectrum: InternalSpectrum, beta: float, g: float, t: float, delta_x: float
) -> complex:
    """Thermal dephasing factor Z(beta + i g t delta_x) / Z(beta)."""
    if not (beta > 0.0 and np.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta!r}")
    shifted = partition_function(spectrum, beta + 1j * g * t * delta_x)
    return shifted / partition_function(spectrum, beta)


def dephasing_factor_gaussian(
    spectrum: InternalSpectrum, beta: float, g: float, t: float, delta_x: float
) -> float:
    """Gaussian magnitude estimate exp(-C_v (g t delta_x / beta)^2 / 2).

    Valid for |g t delta_x / beta| well below one; beyond 0.3 a warning
    is emitted (never an error, because the estimate stays a useful
    envelope even there).
    """
    import warnings

    from .errors import ApproximationWarning

    _, heat_capacity = mean_energy_and_heat_capacity(spectrum, beta)
    u = g * t * delta_x / beta
    if abs(u) > 0.3:
        warnings.warn(
            f"|g t delta_x / beta| = {abs(u):.3g} stretches the quadratic "
            "expansion of log Z",
            ApproximationWarning,
            stacklevel=2,
        )
    return float(np.exp(-0.5 * heat_capacity * u * u))


def dephasing_time(beta: float, g: float, delta_x: float, heat_capacity: float) -> float:
    """Time at which the Gaussian estimate falls to exp(-1/2).

    Returns beta / (g delta_x sqrt(C_v)); a vanishing heat capacity
    means no dephasing and yields inf.
    """
    if not (beta > 0.0 and np.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta!r}")
    if not (g > 0.0 and delta_x > 0.0):
        raise ValueError("g and delta_x must be positive")
    if heat_capacity < 0.0:
        raise ValueError(f"heat_capacity must be nonnegative, got {heat_capacity!r}")
    if heat_capacity == 0.0:
        return math.inf
    return beta / (g * delta_x * math.sqrt(heat_capacity))


@dataclass(frozen=True)
class RegimeReport:
    """Shared-envelope regime margin and per-level width mismatches.

    margin is max_n t / (sqrt(m0/omega_n) m0 sigma0^2), small when the
    branch packets stay mutually indistinguishable up to time t.
    delta_exact and delta_expansion give the per-level relative spread
    mismatch exactly and in its small-offset expansion.
    """

    margin: float
    delta_exact: np.ndarray
    delta_expansion: np.ndarray


def dispersion_regime(
    spectrum: InternalSpectrum, sigma_x0: float, t: float
) -> RegimeReport:
    """Quantify how distinguishable the branch envelopes become by time t."""
    if not (sigma_x0 > 0.0 and np.isfinite(sigma_x0)):
        raise ValueError(f"sigma_x0 must be positive, got {sigma_x0!r}")
    if not (t >= 0.0 and np.isfinite(t)):
        raise ValueError(f"t must be nonnegative, got {t!r}")
    m0 = spectrum.base_mass
    omegas = spectrum.omegas
    masses = spectrum.masses
    sigma_sq = sigma_x0**2

    with np.errstate(divide="ignore"):
        margins = np.where(
            omegas > 0.0, t / (np.sqrt(m0 / np.maximum(omegas, 1e-300)) * m0 * sigma_sq), 0.0
        )
    exact = 0.5 * (t / sigma_x0) * np.sqrt(np.maximum(1.0 / m0**2 - 1.0 / masses**2, 0.0))
    expansion = (t / sigma_x0) * np.sqrt(omegas / (2.0 * m0**3))
    return RegimeReport(float(margins.max()), exact, expansion)


@dataclass(frozen=True)
class CompositeState:
    """Internal superposition sum_n c_n |branch_n> x |n>.

    Each branch is a translational wavefunction carrying the total mass
    of its level; branches share one grid and the internal amplitudes
    are normalized.
    """

    spectrum: InternalSpectrum
    internal_amplitudes: np.ndarray
    branches: tuple[WaveFunction, ...]

    def __post_init__(self) -> None:
        c = np.asarray(self.internal_amplitudes, dtype=complex)
        object.__setattr__(self, "internal_amplitudes", c)
        object.__setattr__(self, "branches", tuple(self.branches))
        if c.ndim != 1 or c.size != self.spectrum.levels:
            raise ValueError(
                f"need {self.spectrum.levels} internal amplitudes, got shape {c.shape}"
            )
        if abs(float((np.abs(c) ** 2).sum()) - 1.0) > 1e-10:
            raise ValueError("internal amplitudes are not normalized")
        if len(self.branches) != self.spectrum.levels:
            raise ValueError(
                f"need {self.spectrum.levels} branches, got {len(self.branches)}"
            )
        grid = self.branches[0].grid
        for branch, mass in zip(self.branches, self.spectrum.masses):
            if branch.grid != grid:
                raise ValueError("branches live on different grids")
            if abs(branch.mass - mass) > 1e-9 * mass:
                raise ValueError(
                    f"branch mass {branch.mass!r} does not match its level mass {mass!r}"
                )

    @property
    def grid(self) -> Grid1D:
        return self.branches[0].grid

    @property
    def weights(self) -> np.ndarray:
        """Level populations |c_n|^2."""
        return np.abs(self.internal_amplitudes) ** 2


def factorized_composite(
    spectrum: InternalSpectrum, internal_amplitudes, template: WaveFunction
) -> CompositeState:
    """Composite state with every branch sharing the template's amplitudes."""
    branches = tuple(
        WaveFunction(template.grid, template.amplitudes.copy(), float(mass))
        for mass in spectrum.masses
    )
    return CompositeState(spectrum, np.asarray(internal_amplitudes, dtype=complex), branches)


def composite_evolve(state: CompositeState, params: EvolutionParams) -> CompositeState:
    """Evolve every branch with its own level mass."""
    branches = tuple(gravity_evolve(branch, params) for branch in state.branches)
    return CompositeState(state.spectrum, state.internal_amplitudes.copy(), branches)


def branch_overlaps(state: CompositeState) -> np.ndarray:
    """Gram matrix G[n, m] = <branch_n | branch_m>."""
    stacked = np.stack([branch.amplitudes for branch in state.branches])
    return (stacked.conj() @ stacked.T) * state.grid.dx


def reduced_position_density(state: CompositeState) -> np.ndarray:
    """Position density after tracing out the internal state."""
    out = np.zeros(state.grid.n)
    for w, branch in zip(state.weights, state.branches):
        out += w * branch.density
    return out


def reduced_translational_matrix(state: CompositeState) -> np.ndarray:
    """Dense translational density matrix rho[j, k] = sum_n w_n psi_n(x_j) psi_n*(x_k).

    Refused for grids beyond DENSE_MATRIX_MAX_N sites; purity and
    coherence ratios are available without materializing the matrix.
    """
    n = state.grid.n
    if n > DENSE_MATRIX_MAX_N:
        raise MemoryGuardError(
            f"dense {n} x {n} reduced matrix refused (limit {DENSE_MATRIX_MAX_N}); "
            "use reduced_purity or coherence_ratio instead"
        )
    weighted = np.stack(
        [np.sqrt(w) * b.amplitudes for w, b in zip(state.weights, state.branches)]
    )
    return weighted.T @ weighted.conj()


def reduced_internal_matrix(state: CompositeState) -> np.ndarray:
    """Internal density matrix c_n c_m* <branch_m | branch_n> after tracing position."""
    c = state.internal_amplitudes
    gram = branch_overlaps(state)
    return np.outer(c, c.conj()) * gram.T


def reduced_purity(state: CompositeState) -> float:
    """Purity of the reduced translational state, via branch overlaps only."""
    weights = state.weights
    gram = branch_overlaps(state)
    return float(np.real(weights @ (np.abs(gram) ** 2) @ weights))


def coherence_ratio(state: CompositeState, separation_cells: int) -> float:
    """Reduced coherence between points separated by a fixed cell count.

    Evaluates |rho(x, x - s)| / sqrt(rho(x, x) rho(x - s, x - s)) at the
    position where the geometric-mean denominator peaks.  For a
    factorized-envelope state this is exactly the magnitude of the
    dephasing factor at separation s, independent of the envelope.
    """
    k = int(separation_cells)
    if not 1 <= k < state.grid.n:
        raise ValueError(f"separation_cells must be in 1..{state.grid.n - 1}, got {k}")
    weights = state.weights
    off = np.zeros(state.grid.n - k, dtype=complex)
    diag = np.zeros(state.grid.n)
    for w, branch in zip(weights, state.branches):
        amps = branch.amplitudes
        off += w * amps[k:] * np.conj(amps[:-k])
        diag += w * np.abs(amps) ** 2
    denom = np.sqrt(diag[k:] * diag[:-k])
    j = int(np.argmax(denom))
    if denom[j] <= 0.0:
        raise ValueError("reduced density vanishes at every separated pair")
    return float(np.abs(off[j]) / denom[j])


@dataclass(frozen=True)
class EchoResult:
    """States and coherence figures around a field-reversal echo."""

    state_mid: CompositeState
    state_final: CompositeState
    visibility_before: float
    visibility_mid: float
    visibility_after: float
    purity_before: float
    purity_mid: float
    purity_after: float
    separation: float


def echo_protocol(
    state: CompositeState, g: float, period: float, separation: float | None = None
) -> EchoResult:
    """Fall for one period, reverse the field, fall for another.

    The input must be factorized (all branches sharing one envelope).
    Visibility is read from the coherence ratio at the given separation
    (default four standard deviations of the envelope); the midpoint
    visibility shows gravitational dephasing and the final one shows its
    reversal.  Requires the shared-envelope regime to hold through 2T.
    """
    if not (period > 0.0 and np.isfinite(period)):
        raise ValueError(f"period must be positive, got {period!r}")
    first = state.branches[0].amplitudes
    worst = max(
        float(np.max(np.abs(branch.amplitudes - first))) for branch in state.branches
    )
    if worst > 1e-12:
        raise ValueError(
            f"echo needs a factorized input; branch envelopes differ by {worst:.3e}"
        )
    sigma = float(np.sqrt(dispersion(state.branches[0])))
    if separation is None:
        separation = 4.0 * sigma
    cells = max(1, int(round(separation / state.grid.dx)))

    margin = dispersion_regime(state.spectrum, sigma, 2.0 * period).margin
    if margin >= 0.1:
        raise RegimeError(
            f"shared-envelope margin {margin:.3g} at 2T is too large for an echo "
            "(needs < 0.1)"
        )

    vis_before = coherence_ratio(state, cells)
    purity_before = reduced_purity(state)
    mid = composite_evolve(state, EvolutionParams(g=g, t=period))
    vis_mid = coherence_ratio(mid, cells)
    purity_mid = reduced_purity(mid)
    final = composite_evolve(mid, EvolutionParams(g=-g, t=period))
    vis_after = coherence_ratio(final, cells)
    purity_after = reduced_purity(final)
    return EchoResult(
        state_mid=mid,
        state_final=final,
        visibility_before=vis_before,
        visibility_mid=vis_mid,
        visibility_after=vis_after,
        purity_before=purity_before,
        purity_mid=purity_mid,
        purity_after=purity_after,
        separation=cells * state.grid.dx,
    )
