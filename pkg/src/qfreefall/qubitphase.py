"""Gravitational phase observables of a two-level composite particle.

For a qubit of level splitting omega riding on a falling packet, the
reduced internal state keeps its populations while the off-diagonal
element acquires the factor

    exp(i omega t - i omega g^2 t^3 / 3) * zeta(t)

where zeta is the characteristic function of the freely evolving
position density evaluated at wavenumber omega g t.  The cubic term is
the detectable gravitational phase; the closed forms below express it
through the drop height, and the proper-time integrals recover the same
phase as omega times the special-relativistic and gravitational time
deficits along the classical path.

Natural units hbar = c = 1 are the default; pass si=True to the phase
functions to work in SI units, where the phases divide by c^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson

from .errors import UndersampledRampError
from .lattice import quad
from .states import WaveFunction

SPEED_OF_LIGHT = 2.99792458e8
STANDARD_GRAVITY = 9.81

# a phase ramp needs at least this many lattice cells per radian-pi
_RAMP_MIN_CELLS_PER_HALF_WAVE = 2.0


def _c_squared(si: bool) -> float:
    return SPEED_OF_LIGHT**2 if si else 1.0


def visibility_factor(psi_free: WaveFunction, omega: float, g: float, t: float) -> complex:
    """Characteristic function zeta = integral |psi|^2 exp(-i omega g t x) dx.

    psi_free is the state freely evolved to time t; the factor multiplies
    the qubit's off-diagonal element.  At t = 0 the ramp vanishes and
    zeta is exactly one.  Raises UndersampledRampError when the ramp
    oscillates faster than the lattice can represent (wavelength below
    four cells).
    """
    if not (t >= 0.0 and np.isfinite(t)):
        raise ValueError(f"t must be nonnegative, got {t!r}")
    wavenumber = omega * g * t
    grid = psi_free.grid
    if abs(wavenumber) * grid.dx > np.pi / _RAMP_MIN_CELLS_PER_HALF_WAVE:
        raise UndersampledRampError(
            f"ramp wavenumber {wavenumber:.4g} needs a wavelength of at least "
            f"4 cells, but the lattice spacing is {grid.dx:.4g}"
        )
    return complex(quad(psi_free.density * np.exp(-1j * wavenumber * grid.x), grid.dx))


@dataclass(frozen=True)
class QubitState:
    """Reduced 2x2 internal state with the drive parameters that built it."""

    matrix: np.ndarray
    omega: float
    g: float
    t: float

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", matrix)
        if matrix.shape != (2, 2):
            raise ValueError(f"need a 2x2 matrix, got shape {matrix.shape}")
        if np.max(np.abs(matrix - matrix.conj().T)) > 1e-12:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(matrix).real - 1.0) > 1e-12:
            raise ValueError(f"trace must be one, got {np.trace(matrix)!r}")
        if np.min(np.linalg.eigvalsh(matrix)) < -1e-12:
            raise ValueError("matrix has a negative eigenvalue")

    @property
    def off_diagonal(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def off_diagonal_magnitude(self) -> float:
        return abs(self.matrix[0, 1])

    @property
    def off_diagonal_phase(self) -> float:
        return float(np.angle(self.matrix[0, 1]))


def qubit_reduced_state(
    c0: complex, c1: complex, omega: float, g: float, t: float, zeta: complex
) -> QubitState:
    """Assemble the reduced qubit state from the dephasing data.

    Populations stay |c0|^2 and |c1|^2; the off-diagonal element is
    c0 c1* exp(i omega t - i omega g^2 t^3 / 3) * zeta.
    """
    c0 = complex(c0)
    c1 = complex(c1)
    norm = abs(c0) ** 2 + abs(c1) ** 2
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"|c0|^2 + |c1|^2 must be one, got {norm!r}")
    if abs(zeta) > 1.0 + 1e-10:
        raise ValueError(f"|zeta| cannot exceed one, got {abs(zeta)!r}")
    phase = np.exp(1j * (omega * t - omega * g**2 * t**3 / 3.0))
    off = c0 * np.conj(c1) * phase * zeta
    matrix = np.array(
        [[abs(c0) ** 2, off], [np.conj(off), abs(c1) ** 2]], dtype=complex
    )
    return QubitState(matrix, float(omega), float(g), float(t))


def phase_shift(omega: float, g: float, length: float, si: bool = False) -> float:
    """Gravitational phase (2 sqrt(2) / 3) omega sqrt(g) L^(3/2) after a drop of L."""
    if not (omega > 0.0 and g > 0.0 and length > 0.0):
        raise ValueError("omega, g, and length must be positive")
    return (2.0 * np.sqrt(2.0) / 3.0) * omega * np.sqrt(g) * length**1.5 / _c_squared(si)


def phase_shift_t(omega: float, g: float, fall_time: float, si: bool = False) -> float:
    """Gravitational phase omega g^2 t^3 / 3 after falling for time t."""
    if not (omega > 0.0 and g > 0.0 and fall_time >= 0.0):
        raise ValueError("omega and g must be positive and fall_time nonnegative")
    return omega * g**2 * fall_time**3 / (3.0 * _c_squared(si))


def relative_shift(g: float, length: float, si: bool = False) -> float:
    """Dimensionless shift (2/3) g L of the qubit frequency integrated over a drop.

    This is the gravitational phase divided by omega times the fall
    time, a clock-rate style figure of merit.
    """
    if not (g > 0.0 and length >= 0.0):
        raise ValueError("g must be positive and length nonnegative")
    return (2.0 / 3.0) * g * length / _c_squared(si)


def phase_blur_parameter(
    omega: float, g: float, length: float, sigma_x: float, si: bool = False
) -> float:
    """Phase spread b = omega g sqrt(2 L / g) sigma_x across a packet of width sigma_x.

    Small b means the packet width does not blur the gravitational
    phase; b relates to the phase itself by b / phase = 1.5 sigma_x / L.
    """
    if not (omega > 0.0 and g > 0.0 and length > 0.0 and sigma_x >= 0.0):
        raise ValueError("omega, g, and length must be positive; sigma_x nonnegative")
    return omega * g * np.sqrt(2.0 * length / g) * sigma_x / _c_squared(si)


@dataclass(frozen=True)
class PathSample:
    """Classical trajectory samples with the weak-field potential context.

    times must be strictly increasing; gm over radius is the
    dimensionless surface potential and must stay well below one.
    """

    times: np.ndarray
    positions: np.ndarray
    gm: float = 0.0
    radius: float = 1.0

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        positions = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", positions)
        if times.ndim != 1 or times.size < 3:
            raise ValueError("need at least 3 samples")
        if positions.shape != times.shape:
            raise ValueError(
                f"positions shape {positions.shape} does not match times {times.shape}"
            )
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if not (self.radius > 0.0):
            raise ValueError(f"radius must be positive, got {self.radius!r}")
        if not (0.0 <= self.gm / self.radius < 1e-3):
            raise ValueError(
                f"gm/radius = {self.gm / self.radius!r} must be in [0, 1e-3)"
            )

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])


class ProperTimeResult(NamedTuple):
    tau_total: float
    term_gravitational: float
    term_kinematic: float


def proper_time(path: PathSample, g_local: float) -> ProperTimeResult:
    """Weak-field proper time along a sampled path.

    tau = (1 - gm/radius) t - term_gravitational - term_kinematic with
    term_gravitational = -g integral x dt (the potential grows along +x,
    so time spent below the origin slows the clock) and term_kinematic =
    (1/2) integral xdot^2 dt.  Velocities come from second-order finite
    differences and the integrals from composite Simpson quadrature.
    For a free-fall path both correction terms equal g^2 t^3 / 6.
    """
    velocities = np.gradient(path.positions, path.times, edge_order=2)
    term_grav = -g_local * float(simpson(path.positions, x=path.times))
    term_kin = 0.5 * float(simpson(velocities**2, x=path.times))
    tau = (1.0 - path.gm / path.radius) * path.duration - term_grav - term_kin
    return ProperTimeResult(tau, term_grav, term_kin)


def classical_phase(omega: float, path: PathSample, g_local: float) -> float:
    """Phase omega (tau_static - tau_path) accumulated relative to a held clock.

    The static-potential contribution cancels in the difference, leaving
    omega times the gravitational and kinematic terms of proper_time.
    For a parabolic free-fall path this reproduces phase_shift_t.
    """
    if not (omega > 0.0):
        raise ValueError(f"omega must be positive, got {omega!r}")
    result = proper_time(path, g_local)
    return omega * (result.term_gravitational + result.term_kinematic)


def free_fall_path(
    g: float, duration: float, samples: int, gm: float = 0.0, radius: float = 1.0
) -> PathSample:
    """Parabolic drop x(s) = -g s^2 / 2 released from the origin at rest."""
    if not (duration > 0.0 and np.isfinite(duration)):
        raise ValueError(f"duration must be positive, got {duration!r}")
    if not isinstance(samples, (int, np.integer)) or samples < 3:
        raise ValueError(f"samples must be an integer >= 3, got {samples!r}")
    times = np.linspace(0.0, duration, int(samples))
    return PathSample(times, -0.5 * g * times**2, gm, radius)


def cat_visibility_factor(
    omega: float, g: float, t: float, separation: float, v1: float = 0.0, v2: float = 0.0
) -> complex:
    """Visibility factor of a two-packet cat in the point-packet limit.

    For narrow packets launched from -separation/2 and +separation/2
    with velocities v1 and v2,

        zeta(t) = exp(-i g omega (v1 + v2) t^2 / 2)
                  * cos(g omega t (separation + (v2 - v1) t) / 2).

    The magnitude beats as |cos|, vanishing periodically: gravity marks
    which arm the particle took.
    """
    envelope = np.cos(0.5 * g * omega * t * (separation + (v2 - v1) * t))
    return complex(np.exp(-0.5j * g * omega * (v1 + v2) * t**2) * envelope)


class CatPhaseTerms(NamedTuple):
    fall_term: float
    velocity_term: float
    recoil_term: float
    detection_time: float
    drop_height: float


def cat_phase_terms(
    omega: float, g: float, separation: float, v1: float, v2: float
) -> CatPhaseTerms:
    """Phase budget of a cat whose arms merge after a differential launch.

    The arms start separation apart with velocities v1 < v2 and meet at
    the detection time t_d = separation / (v2 - v1), having dropped

        L = g t_d^2 / 2 - (separation / 2) (v2 + v1) / (v2 - v1).

    The accumulated phase splits into the free-fall cubic term
    omega g^2 t_d^3 / 3, a launch term omega L (v1 + v2), and a recoil
    term omega separation (v1 + v2)^2 / (2 (v2 - v1)); the three sum to
    omega g^2 t_d^3 / 3 + omega g (v1 + v2) t_d^2 / 2 identically.
    """
    if not (v2 > v1):
        raise ValueError(f"need v2 > v1 for the arms to merge, got {v1!r}, {v2!r}")
    if not (separation > 0.0):
        raise ValueError(f"separation must be positive, got {separation!r}")
    t_d = separation / (v2 - v1)
    height = 0.5 * g * t_d**2 - 0.5 * separation * (v2 + v1) / (v2 - v1)
    fall = omega * g**2 * t_d**3 / 3.0
    velocity = omega * height * (v1 + v2)
    recoil = 0.5 * omega * separation * (v1 + v2) ** 2 / (v2 - v1)
    return CatPhaseTerms(fall, velocity, recoil, t_d, height)
