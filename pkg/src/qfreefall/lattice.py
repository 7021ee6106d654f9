"""Uniform lattices, the unitary position-momentum transform, and quadrature.

Every state in this package lives on a Grid1D: n equally spaced samples
x_j = x_min + j*dx with the right endpoint excluded, together with the
conjugate momentum lattice p_k = (k - n/2)*dp where dp = 2*pi/(n*dx).
The transform pair below is unitary with respect to the discrete
measures dx and dp, so position and momentum amplitudes are both
normalized probability amplitudes for the same state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError, LeakageError

# fraction of lattice sites counted as the edge band (split between ends)
EDGE_FRACTION = 0.05
# probability allowed in the edge band before wrap-around is suspected
LEAKAGE_TOL = 1e-10

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Grid1D:
    """Uniform spatial lattice with its conjugate momentum lattice.

    Parameters
    ----------
    x_min : float
        Left edge of the position lattice.
    dx : float
        Lattice spacing, strictly positive.
    n : int
        Number of sites, a power of two and at least 16.

    Notes
    -----
    The position samples are x_j = x_min + j*dx for j = 0..n-1; the
    right endpoint x_min + n*dx is excluded.  The momentum lattice is
    centered on zero, p_k = (k - n/2)*dp with dp = 2*pi/(n*dx), so
    n*dx*dp = 2*pi holds exactly.
    """

    x_min: float
    dx: float
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 16 or self.n & (self.n - 1):
            raise GridError(f"n must be a power of two >= 16, got {self.n!r}")
        if not (self.dx > 0.0 and np.isfinite(self.dx)):
            raise GridError(f"dx must be positive and finite, got {self.dx!r}")
        if not np.isfinite(self.x_min):
            raise GridError(f"x_min must be finite, got {self.x_min!r}")

    @property
    def dp(self) -> float:
        """Momentum lattice spacing 2*pi/(n*dx)."""
        return _TWO_PI / (self.n * self.dx)

    @property
    def x_max(self) -> float:
        """Excluded right endpoint x_min + n*dx."""
        return self.x_min + self.n * self.dx

    @property
    def p_edge(self) -> float:
        """Largest representable momentum magnitude (n/2)*dp."""
        return 0.5 * self.n * self.dp

    @property
    def x(self) -> np.ndarray:
        """Position samples, shape (n,)."""
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def p(self) -> np.ndarray:
        """Momentum samples centered on zero, shape (n,)."""
        return (np.arange(self.n) - self.n // 2) * self.dp


def make_grid(x_min: float, x_max: float, n: int) -> Grid1D:
    """Build the lattice covering [x_min, x_max) with n sites.

    The interval must be non-degenerate and n a power of two >= 16.
    """
    if not (np.isfinite(x_min) and np.isfinite(x_max)) or not x_max > x_min:
        raise GridError(f"degenerate interval [{x_min!r}, {x_max!r})")
    if not isinstance(n, (int, np.integer)):
        raise GridError(f"n must be an integer, got {type(n).__name__}")
    return Grid1D(float(x_min), (float(x_max) - float(x_min)) / int(n), int(n))


def _signs(n: int) -> np.ndarray:
    # (-1)^j carries the half-band offset of the zero-centered p lattice
    s = np.ones(n)
    s[1::2] = -1.0
    return s


def _as_amplitudes(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if values.shape != (grid.n,):
        raise GridError(f"expected shape ({grid.n},), got {values.shape}")
    return values


def dft_forward(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Momentum amplitudes (1/sqrt(2*pi)) * integral dx e^{-ipx} psi(x).

    The Riemann sum over the lattice is evaluated with a single FFT;
    the result is sampled on grid.p.  Together with dft_inverse this is
    an exactly unitary pair: round trips reproduce the input to machine
    precision and the discrete Parseval identity
    sum |psi|^2 dx = sum |psi_tilde|^2 dp holds.
    """
    values = _as_amplitudes(values, grid)
    spun = np.fft.fft(values * _signs(grid.n))
    pref = grid.dx / np.sqrt(_TWO_PI)
    return pref * np.exp(-1j * grid.p * grid.x_min) * spun


def dft_inverse(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Position amplitudes (1/sqrt(2*pi)) * integral dp e^{+ipx} psi_tilde(p)."""
    values = _as_amplitudes(values, grid)
    spun = np.fft.ifft(values * np.exp(1j * grid.p * grid.x_min))
    pref = grid.dp * grid.n / np.sqrt(_TWO_PI)
    return pref * _signs(grid.n) * spun


def quad(values: np.ndarray, dx: float) -> complex:
    """Integrate lattice samples: the uniform Riemann sum values.sum()*dx.

    Because the right endpoint is excluded this coincides with the
    trapezoidal rule for integrands that continue periodically across
    the lattice, which is the natural reading for states whose support
    is kept away from the edges.
    """
    values = np.asarray(values)
    if values.ndim != 1 or values.size < 2:
        raise ValueError(f"need a 1d array with at least 2 samples, got shape {values.shape}")
    if not dx > 0.0:
        raise ValueError(f"dx must be positive, got {dx!r}")
    return values.sum() * dx


def edge_probability(values: np.ndarray, grid: Grid1D) -> float:
    """Probability carried by the outer edge band of the lattice.

    The band is the outermost EDGE_FRACTION of sites, split between the
    two ends of the grid.
    """
    values = _as_amplitudes(values, grid)
    m = max(1, int(np.ceil(0.5 * EDGE_FRACTION * grid.n)))
    density = np.abs(values) ** 2
    return float((density[:m].sum() + density[grid.n - m:].sum()) * grid.dx)


def check_leakage(values: np.ndarray, grid: Grid1D, context: str = "state") -> None:
    """Raise LeakageError when the edge band holds more than LEAKAGE_TOL."""
    weight = edge_probability(values, grid)
    if weight > LEAKAGE_TOL:
        raise LeakageError(
            f"{context}: edge-band probability {weight:.3e} exceeds {LEAKAGE_TOL:.1e}; "
            "the lattice is too small for this state"
        )
