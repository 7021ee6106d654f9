"""Wigner quasiprobability maps and their classical transport.

The discrete Wigner transform pairs lattice points symmetrically, so
its separation variable steps by 2*dx and the map resolves momenta on
the central half of the momentum lattice: shape (n, n/2) with the
native resolutions dx and dp.  Two identities hold exactly at machine
precision by construction:

    sum_k W[j, k] * dp = |psi(x_j)|^2
    sum_jk W[j, k] * dx * dp = 1

The momentum marginal reproduces |psi_tilde|^2 once the state is
confined to the central half band, which is guarded.

Under a uniform field the map is transported rigidly along classical
characteristics; reading the transported map at (x, p) means sampling
the initial one at the trajectory start point

    p_src = p + m g t,   x_src = x - p_src t / m + g t^2 / 2.

On a velocity axis the same flow is mass-free: v_src = v + g t and
x_src = x - v_src t + g t^2 / 2, which is what makes free fall
universal across species in velocity phase space.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dynamics import EPReport, EvolutionParams, gravity_evolve
from .errors import AliasingError, GridError, SupportError
from .lattice import Grid1D, check_leakage, dft_forward
from .states import WaveFunction, moments, rebase_mass

HALF_BAND_TAIL_TOL = 1e-10
CORRELATION_REACH_TOL = 1e-10
_CHUNK_ROWS = 256


@dataclass(frozen=True)
class WignerMap:
    """Real phase-space map on the x lattice and half the conjugate lattice.

    axis_kind is "momentum" or "velocity"; imag_residue records the
    largest imaginary part discarded when the transform was taken.
    """

    x: np.ndarray
    axis: np.ndarray
    values: np.ndarray
    mass: float
    axis_kind: str
    imag_residue: float = 0.0

    def __post_init__(self) -> None:
        if self.axis_kind not in ("momentum", "velocity"):
            raise ValueError(f"axis_kind must be momentum or velocity, got {self.axis_kind!r}")
        if self.values.shape != (self.x.size, self.axis.size):
            raise GridError(
                f"values shape {self.values.shape} does not match axes "
                f"({self.x.size}, {self.axis.size})"
            )

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def d_axis(self) -> float:
        return float(self.axis[1] - self.axis[0])

    def integral(self) -> float:
        """Total weight sum(values) * dx * d_axis."""
        return float(self.values.sum() * self.dx * self.d_axis)


def wigner(psi: WaveFunction) -> WignerMap:
    """Discrete Wigner transform of a wavefunction.

    Guards: the usual edge-band leakage check in position, plus a
    momentum half-band check, because separations stepping by 2*dx can
    only resolve the central half of the momentum lattice; content
    outside it would alias onto the map.  A third guard bounds the
    two-point correlation at the largest representable separation
    (half the domain span): truncating a correlation that has not yet
    decayed there leaves ringing in the map well above round-off.
    """
    grid = psi.grid
    check_leakage(psi.amplitudes, grid, "wigner")
    tilde = dft_forward(psi.amplitudes, grid)
    outside = np.abs(grid.p) >= 0.5 * grid.p_edge
    tail = float((np.abs(tilde[outside]) ** 2).sum() * grid.dp)
    if tail >= HALF_BAND_TAIL_TOL:
        raise AliasingError(
            f"momentum weight {tail:.3e} outside the central half band "
            f"+/-{0.5 * grid.p_edge:.4g} would alias in the Wigner map"
        )

    n = grid.n
    m = n // 2
    amps = psi.amplitudes
    lam = np.arange(m) - m // 2
    signs_lam = np.where(lam % 2 == 0, 1.0, -1.0)
    signs_k = np.where(np.arange(m) % 2 == 0, 1.0, -1.0)
    values = np.empty((n, m))
    residue = 0.0
    reach = 0.0
    peak_density = float(np.max(np.abs(amps)) ** 2)
    for start in range(0, n, _CHUNK_ROWS):
        rows = np.arange(start, min(start + _CHUNK_ROWS, n))
        plus = rows[:, None] + lam[None, :]
        minus = rows[:, None] - lam[None, :]
        valid = (plus >= 0) & (plus < n) & (minus >= 0) & (minus < n)
        corr = np.where(
            valid,
            amps[np.clip(plus, 0, n - 1)] * np.conj(amps[np.clip(minus, 0, n - 1)]),
            0.0,
        )
        reach = max(reach, float(np.max(np.abs(corr[:, 0]))))
        spectrum = np.fft.fft(corr * signs_lam[None, :], axis=1) * signs_k[None, :]
        residue = max(residue, float(np.max(np.abs(spectrum.imag))) * grid.dx / np.pi)
        values[rows] = (grid.dx / np.pi) * spectrum.real
    if reach > CORRELATION_REACH_TOL * peak_density:
        raise SupportError(
            f"correlation magnitude {reach:.3e} at the widest separation "
            f"{0.5 * n * grid.dx:.4g} has not decayed below "
            f"{CORRELATION_REACH_TOL:g} of the peak density; truncating it "
            "would distort the map.  Enlarge the domain or narrow the state"
        )
    axis = (np.arange(m) - m // 2) * grid.dp
    return WignerMap(grid.x.copy(), axis, values, psi.mass, "momentum", residue)


def to_velocity(wmap: WignerMap) -> WignerMap:
    """Relabel the momentum axis as velocity v = p/m, rescaling the values by m.

    The rescaling keeps every integral unchanged: W_v(x, v) dv equals
    W(x, p) dp cell for cell.
    """
    if wmap.axis_kind != "momentum":
        raise ValueError("map already uses a velocity axis")
    return replace(
        wmap,
        axis=wmap.axis / wmap.mass,
        values=wmap.values * wmap.mass,
        axis_kind="velocity",
    )


def wigner_moment(wmap: WignerMap, order_x: int, order_axis: int) -> float:
    """Phase-space moment <x^a axis^b> of the map."""
    weights = np.outer(wmap.x**order_x, wmap.axis**order_axis)
    return float((weights * wmap.values).sum() * wmap.dx * wmap.d_axis)


def _column_positions(axis: np.ndarray, shifted: np.ndarray) -> np.ndarray:
    return (shifted - axis[0]) / float(axis[1] - axis[0])


def liouville_shift(wmap: WignerMap, params: EvolutionParams) -> WignerMap:
    """Transport a map along the classical free-fall characteristics.

    On a momentum axis the flow uses the map's own mass (or the inertial
    override in params); on a velocity axis it is mass-free.  When every
    source point lands on the lattice the transport is a pure gather and
    exact; otherwise bilinear interpolation is used.  Weight carried off
    the lattice support raises SupportError.
    """
    m_i, g_eff = params.resolve(wmap.mass)
    t = params.t
    mu = m_i if wmap.axis_kind == "momentum" else 1.0

    axis_src = wmap.axis + mu * g_eff * t
    x_shift = (axis_src / mu) * t - 0.5 * g_eff * t * t
    cols = _column_positions(wmap.axis, axis_src)
    dx = wmap.dx
    x_cells = x_shift / dx

    n, m = wmap.values.shape
    out = np.zeros_like(wmap.values)
    aligned = bool(
        np.all(np.abs(cols - np.round(cols)) < 1e-9)
        and np.all(np.abs(x_cells - np.round(x_cells)) < 1e-9)
    )
    if aligned:
        for k in range(m):
            c = int(round(cols[k]))
            if not 0 <= c < m:
                continue
            s = int(round(x_cells[k]))
            if abs(s) >= n:
                continue
            src = wmap.values[:, c]
            # out(x_j) samples the source at x_j - x_shift
            if s >= 0:
                out[s:, k] = src[: n - s]
            else:
                out[: n + s, k] = src[-s:]
    else:
        x = wmap.x
        for k in range(m):
            c = cols[k]
            lo = int(np.floor(c))
            frac = c - lo
            col = np.zeros(n)
            if 0 <= lo < m:
                col += (1.0 - frac) * wmap.values[:, lo]
            if 0 <= lo + 1 < m:
                col += frac * wmap.values[:, lo + 1]
            out[:, k] = np.interp(x - x_shift[k], x, col, left=0.0, right=0.0)

    deficit = abs(out.sum() - wmap.values.sum()) * dx * wmap.d_axis
    if deficit > 1e-8:
        raise SupportError(
            f"transport moved weight {deficit:.3e} off the lattice support; "
            "enlarge the grid or shorten t"
        )
    return replace(wmap, values=out, imag_residue=wmap.imag_residue)


def check_ep_velocity_universality(
    psi_first: WaveFunction,
    second_mass: float,
    params: EvolutionParams,
    tolerance: float = 1e-8,
    params_second: EvolutionParams | None = None,
) -> EPReport:
    """Verify that free fall acts identically in velocity phase space.

    A partner state of second_mass is prepared with the same velocity
    wavefunction via rebase_mass.  Both particles are evolved and each
    velocity-axis Wigner map is compared against the transport of its
    own initial map by the mass-free characteristics of the nominal g:
    the same universal flow must describe both species.  Cross-particle
    observables close the loop: mean fall displacement and the first
    two velocity moments must coincide.  params_second substitutes a
    different parameter set (for example an inertial/gravitational mass
    split) for the partner, which the displacement comparison flags.
    """
    psi_second = rebase_mass(psi_first, second_mass)
    second_params = params if params_second is None else params_second
    universal = EvolutionParams(g=params.g, t=params.t)

    residuals: list[float] = []
    displacements: list[float] = []
    v_means: list[float] = []
    v_squares: list[float] = []
    for psi, own in ((psi_first, params), (psi_second, second_params)):
        before = to_velocity(wigner(psi))
        evolved = gravity_evolve(psi, own)
        after = to_velocity(wigner(evolved))
        predicted = liouville_shift(before, universal)
        residuals.append(float(np.max(np.abs(after.values - predicted.values))))
        v0 = wigner_moment(before, 0, 1)
        displacements.append(moments(evolved, 1) - moments(psi, 1) - v0 * params.t)
        v_means.append(wigner_moment(after, 0, 1))
        v_squares.append(wigner_moment(after, 0, 2))

    cross_shift = abs(displacements[0] - displacements[1])
    table = {1: abs(v_means[0] - v_means[1]), 2: abs(v_squares[0] - v_squares[1])}
    nominal = -0.5 * params.g * params.t**2
    violating = cross_shift > 1e-6 * (1.0 + abs(nominal))
    mismatch = max(residuals)
    passed = (
        mismatch < tolerance
        and cross_shift < tolerance
        and all(v < tolerance for v in table.values())
    )
    return EPReport(
        max_density_mismatch=mismatch,
        shift_applied=displacements[0],
        moment_table=table,
        passed=passed,
        ep_violating=violating,
        details={
            "residual_first": residuals[0],
            "residual_second": residuals[1],
            "displacement_first": displacements[0],
            "displacement_second": displacements[1],
            "nominal_displacement": nominal,
        },
    )
