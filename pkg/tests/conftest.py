"""Shared helpers for the test suite."""

from qfreefall import Grid1D


def aligned_fall_params(
    grid: Grid1D, mass: float, cells_per_column: int = 1, kick_columns: int = 2
) -> tuple[float, float]:
    """Fall duration and acceleration whose lattice motions are all exact.

    Returns (t, g) such that the momentum kick mass*g*t spans
    kick_columns whole momentum cells, free streaming moves each
    momentum column by cells_per_column whole position cells, and the
    fall distance g*t^2/2 equals kick_columns*cells_per_column/2 cells.
    Keep kick_columns*cells_per_column even so the fall distance lands
    on the position lattice.
    """
    t = cells_per_column * mass * grid.dx / grid.dp
    g = kick_columns * grid.dp / (mass * t)
    return t, g
