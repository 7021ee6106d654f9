"""Wave packets on the lattice: construction, moments, and mass rebasing.

The package convention for a Gaussian packet of width sigma_x centered
at mean_x with mean velocity mean_v is

    psi(x) ~ exp(-(x - mean_x)^2 / (4 sigma_x^2) + i m mean_v (x - mean_x))

normalized exactly on the lattice, so <p> = m * mean_v and the position
uncertainty is sigma_x with Delta_x * Delta_p = 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AliasingError, GridError, SupportError
from .lattice import Grid1D, check_leakage, dft_forward, dft_inverse, quad

_TWO_PI = 2.0 * np.pi

# sigma multiple that must fit inside the lattice in both representations
SUPPORT_SIGMAS = 6.0
# momentum-space tail weight tolerated outside the usable band when rebasing
REBASE_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class PacketSpec:
    """Parameters of one Gaussian component.

    weight only matters for superpositions; single-packet constructors
    normalize it away.
    """

    mean_x: float = 0.0
    mean_v: float = 0.0
    sigma_x: float = 1.0
    weight: complex = 1.0

    def __post_init__(self) -> None:
        if not (self.sigma_x > 0.0 and np.isfinite(self.sigma_x)):
            raise ValueError(f"sigma_x must be positive, got {self.sigma_x!r}")


@dataclass(frozen=True)
class WaveFunction:
    """Normalized position amplitudes on a grid, tagged with a mass."""

    grid: Grid1D
    amplitudes: np.ndarray
    mass: float

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n,):
            raise GridError(f"amplitudes shape {amps.shape} does not match grid n={self.grid.n}")
        object.__setattr__(self, "amplitudes", amps)
        if not (self.mass > 0.0 and np.isfinite(self.mass)):
            raise ValueError(f"mass must be positive, got {self.mass!r}")
        total = norm_squared_amplitudes(amps, self.grid.dx)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"amplitudes are not normalized: |psi|^2 integrates to {total!r}")

    @property
    def density(self) -> np.ndarray:
        """Position probability density |psi|^2, shape (n,)."""
        return np.abs(self.amplitudes) ** 2


def norm_squared_amplitudes(values: np.ndarray, dx: float) -> float:
    return float(quad(np.abs(values) ** 2, dx).real)


def _component_amplitudes(grid: Grid1D, mass: float, spec: PacketSpec) -> np.ndarray:
    # analytic unit-norm component; overall lattice normalization happens later
    x = grid.x
    lo = spec.mean_x - SUPPORT_SIGMAS * spec.sigma_x
    hi = spec.mean_x + SUPPORT_SIGMAS * spec.sigma_x
    if lo < grid.x_min or hi > grid.x_max:
        raise SupportError(
            f"packet support [{lo:.4g}, {hi:.4g}] "
            f"(mean_x +/- {SUPPORT_SIGMAS:g} sigma) leaves the grid "
            f"[{grid.x_min:.4g}, {grid.x_max:.4g})"
        )
    p_mean = mass * spec.mean_v
    p_spread = 0.5 / spec.sigma_x
    if abs(p_mean) + SUPPORT_SIGMAS * p_spread > grid.p_edge:
        raise SupportError(
            f"momentum support |{p_mean:.4g}| + {SUPPORT_SIGMAS:g}*{p_spread:.4g} "
            f"exceeds the representable band +/-{grid.p_edge:.4g}"
        )
    envelope = (_TWO_PI * spec.sigma_x**2) ** -0.25 * np.exp(
        -((x - spec.mean_x) ** 2) / (4.0 * spec.sigma_x**2)
    )
    return envelope * np.exp(1j * p_mean * (x - spec.mean_x))


def gaussian_packet(grid: Grid1D, mass: float, spec: PacketSpec) -> WaveFunction:
    """Minimum-uncertainty Gaussian packet, normalized exactly on the lattice.

    Raises SupportError unless mean_x +/- 6 sigma_x lies inside the grid
    and the corresponding momentum support fits the representable band.
    """
    amps = _component_amplitudes(grid, mass, spec)
    amps = amps / np.sqrt(norm_squared_amplitudes(amps, grid.dx))
    return WaveFunction(grid, amps, float(mass))


def cat_state(grid: Grid1D, mass: float, specs: Sequence[PacketSpec]) -> WaveFunction:
    """Superposition of Gaussian components with the given weights.

    Normalization divides by the exact lattice norm of the sum, which
    includes any cross terms between overlapping components; for well
    separated components this coincides with dividing by
    sqrt(sum |weight|^2).
    """
    if len(specs) < 1:
        raise ValueError("need at least one component")
    amps = np.zeros(grid.n, dtype=complex)
    for spec in specs:
        amps += complex(spec.weight) * _component_amplitudes(grid, mass, spec)
    total = norm_squared_amplitudes(amps, grid.dx)
    if total <= 0.0:
        raise ValueError("components cancel; the superposition has zero norm")
    return WaveFunction(grid, amps / np.sqrt(total), float(mass))


def moments(psi: WaveFunction, order: int) -> float:
    """Raw position moment <x^order> for order 0..4.

    Checks the edge-band leakage guard first so that wrapped probability
    cannot silently corrupt the moment.
    """
    if not isinstance(order, (int, np.integer)) or not 0 <= order <= 4:
        raise ValueError(f"order must be an integer in 0..4, got {order!r}")
    check_leakage(psi.amplitudes, psi.grid, "moments")
    return float(quad(psi.grid.x**order * psi.density, psi.grid.dx).real)


def central_moment(psi: WaveFunction, order: int) -> float:
    """Central position moment <(x - <x>)^order> for order 0..4."""
    if not isinstance(order, (int, np.integer)) or not 0 <= order <= 4:
        raise ValueError(f"order must be an integer in 0..4, got {order!r}")
    mean = moments(psi, 1)
    return float(quad((psi.grid.x - mean) ** order * psi.density, psi.grid.dx).real)


def dispersion(psi: WaveFunction) -> float:
    """Position variance <x^2> - <x>^2."""
    return central_moment(psi, 2)


def velocity_wavefunction(psi: WaveFunction) -> tuple[np.ndarray, np.ndarray]:
    """Velocity amplitudes phi(v) = sqrt(m) * psi_tilde(m v).

    Returns (v_lattice, phi) with v_k = p_k / m, so phi is just the
    momentum amplitude rescaled; sum |phi|^2 dv = 1 exactly whenever
    psi is normalized.
    """
    tilde = dft_forward(psi.amplitudes, psi.grid)
    root_m = np.sqrt(psi.mass)
    return psi.grid.p / psi.mass, root_m * tilde


def _sample_momentum_amplitudes(
    amps: np.ndarray, x: np.ndarray, q: np.ndarray, dx: float
) -> np.ndarray:
    # direct evaluation of the transform at off-lattice momenta q;
    # chunked so the phase matrix stays a few megabytes
    out = np.empty(q.size, dtype=complex)
    step = max(1, (1 << 21) // x.size)
    for i in range(0, q.size, step):
        block = np.exp(-1j * np.outer(q[i : i + step], x))
        out[i : i + step] = block @ amps
    return (dx / np.sqrt(_TWO_PI)) * out


def rebase_mass(psi: WaveFunction, new_mass: float) -> WaveFunction:
    """State of a different mass with the same velocity wavefunction.

    The momentum amplitudes are resampled as
    psi_tilde_new(p) = sqrt(m_old/m_new) * psi_tilde_old(p * m_old/m_new),
    which preserves phi(v) exactly; in position space this is the scaling
    psi_new(x) = sqrt(m_new/m_old) * psi_old(x * m_new/m_old).

    Raises AliasingError when the momentum support is too wide for the
    rescaled state (or its sampling points) to stay on the representable
    band.
    """
    if not (new_mass > 0.0 and np.isfinite(new_mass)):
        raise ValueError(f"new_mass must be positive, got {new_mass!r}")
    grid = psi.grid
    ratio = psi.mass / new_mass
    if ratio == 1.0:
        return WaveFunction(grid, psi.amplitudes.copy(), float(new_mass))

    tilde = dft_forward(psi.amplitudes, grid)
    band = min(ratio, 1.0 / ratio) * grid.p_edge
    outside = np.abs(grid.p) >= band
    tail = float((np.abs(tilde[outside]) ** 2).sum() * grid.dp)
    if tail >= REBASE_TAIL_TOL:
        raise AliasingError(
            f"momentum tail weight {tail:.3e} outside +/-{band:.4g} would alias "
            f"under mass rebase {psi.mass:g} -> {new_mass:g}"
        )

    q = ratio * grid.p
    tilde_new = np.sqrt(ratio) * _sample_momentum_amplitudes(psi.amplitudes, grid.x, q, grid.dx)
    tilde_new[np.abs(q) > grid.p_edge] = 0.0
    amps = dft_inverse(tilde_new, grid)
    amps = amps / np.sqrt(norm_squared_amplitudes(amps, grid.dx))
    check_leakage(amps, grid, "rebase_mass")
    return WaveFunction(grid, amps, float(new_mass))
