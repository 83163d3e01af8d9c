"""All constants for tsvar."""

from typing import Final

ROOT_LOGGER_NAME: Final[str] = "tsvar"

# Relative tolerance for comparing scale points.
POINT_TOLERANCE: Final[float] = 1e-12

EL_TOLERANCE: Final[float] = 1e-8
DENSE_EL_TOLERANCE: Final[float] = 1e-4
LEGENDRE_TOLERANCE: Final[float] = 1e-10

NEWTON_MAX_ITER: Final[int] = 200
NEWTON_GRADIENT_TOLERANCE: Final[float] = 1e-12
NEWTON_MAX_HALVINGS: Final[int] = 30

DEFAULT_MULTISTART: Final[int] = 8
TIE_TOLERANCE: Final[float] = 1e-12
CONSTRAINT_TOLERANCE: Final[float] = 1e-10
# Starts that end farther than this many amplitudes from the data have escaped to infinity.
START_ESCAPE_FACTOR: Final[float] = 1e4

HELMHOLTZ_CERTIFY_TOLERANCE: Final[float] = 1e-10
HELMHOLTZ_REJECT_THRESHOLD: Final[float] = 1e-6
HELMHOLTZ_STRUCTURE_TOLERANCE: Final[float] = 1e-12
DEFAULT_HELMHOLTZ_TRIALS: Final[int] = 16

SYNTHESIS_PROBES: Final[int] = 64
SYNTHESIS_PROBE_MAGNITUDE: Final[float] = 1e-3
SYNTHESIS_DECREASE_TOLERANCE: Final[float] = 1e-12
