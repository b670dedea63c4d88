# config.py
import os

# Default physical parameters (natural units, hbar = c = 1)
DEFAULT_MASS = 1.0
DEFAULT_OMEGA = 0.1
DEFAULT_ZETA = 0.0
DEFAULT_K_AXIAL = 0.0

# Default level table
DEFAULT_L_MIN = 0
DEFAULT_L_MAX = 0
DEFAULT_N_MAX = 0
DEFAULT_SPINS = (1, -1)

# Grids
RADIAL_GRID_SIZE = 4096
MIN_RADIAL_GRID_SIZE = 64
ORACLE_POINTS = 8192
ORACLE_POINTS_QUICK = 2048
MIN_ORACLE_POINTS = 128
LOG_GRID_LOW = 1e-3   # fraction of rho0
LOG_GRID_HIGH = 0.999

# Bessel evaluation switchovers (see services/specfun.py)
SERIES_MAX_X = 5.0    # series also while x^2 <= 8 (nu + 1)
HANKEL_MIN_X = 25.0
ZERO_TOLERANCE = 1e-13

# Tolerances used by the verification suite
TETRAD_TOLERANCE = 1e-14
STRUCTURE_TOLERANCE = 1e-12
DETERMINANT_TOLERANCE = 1e-14
METRIC_PULLBACK_TOLERANCE = 1e-14
GTT_WALL_TOLERANCE = 1e-14
RECURRENCE_TOLERANCE = 1e-11
OVERLAP_TOLERANCE = 1e-11
WALL_TOLERANCE = 1e-9
NORM_TOLERANCE = 1e-8
HAMILTONIAN_TOLERANCE = 1e-5
HAMILTONIAN_MAX_RESIDUAL = 0.1
ENERGY_REASSEMBLY_TOLERANCE = 1e-12
ORACLE_RELATIVE_TOLERANCE = 1e-5
ORDER_BAND = (1.9, 2.1)
ORDER_HARD_BAND = (1.5, 2.5)
INVARIANCE_TOLERANCE = 1e-12

# eta*rho0 below this marks the large-argument spectrum as unreliable
ASYMPTOTIC_RELIABLE_ETA_RHO0 = 5.0

# Output
FLOAT_DIGITS = 17
FLOAT_FORMAT = f"%.{FLOAT_DIGITS}g"
OUTPUT_FORMATS = ("csv", "json")


def worker_count() -> int:
    """Worker cap from DSPEC_THREADS, hardware parallelism when unset or invalid."""
    raw = os.environ.get("DSPEC_THREADS", "").strip()
    if raw:
        try:
            value = int(raw)
            if value > 0:
                return value
        except ValueError:
            pass
    return os.cpu_count() or 1
