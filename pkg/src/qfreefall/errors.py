"""Exception types shared across the package.

Numerical guards (everything below NumericalGuardError) signal that a
computation left the regime where the discretization is trustworthy.
They are distinct from plain ValueError misuse so that callers, in
particular the command line runner, can map them to a dedicated exit
status.
"""


class QFreefallError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(QFreefallError):
    """Scenario configuration failed to parse or validate."""


class GridError(QFreefallError):
    """Invalid lattice construction or mismatched lattice sizes."""


class NumericalGuardError(QFreefallError):
    """A runtime guard on numerical validity tripped."""


class LeakageError(NumericalGuardError):
    """Probability in the outer edge band exceeds the leakage budget."""


class SupportError(NumericalGuardError):
    """State support falls outside the usable part of the lattice."""


class AliasingError(NumericalGuardError):
    """Momentum-space content would wrap around the representable band."""


class ShiftAlignmentError(NumericalGuardError):
    """A displacement that must land on the lattice does not."""


class RegimeError(NumericalGuardError):
    """Parameters violate a validity condition of an approximation."""


class UndersampledRampError(NumericalGuardError):
    """A phase ramp oscillates too fast for the lattice spacing."""


class MemoryGuardError(NumericalGuardError):
    """A requested dense object would be unreasonably large."""


class ApproximationWarning(UserWarning):
    """An approximate formula is being used outside its comfort zone."""
