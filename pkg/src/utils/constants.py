"""
Constants used throughout the sl-solvability package.
"""

# Quadrature (absolute tolerances)
QUAD_TOL_FINITE = 1e-10
QUAD_TOL_IMPROPER = 1e-8
QUAD_LIMIT = 500

# Root finding
ROOT_TOL = 1e-10
ROOT_RTOL = 1e-14
MAX_BRACKET_DOUBLINGS = 200
X0_TOL = 1e-10

# Expanding-grid trend policy, shared by every supremum/infimum over the line
TREND_STABLE_REL = 0.005
TREND_GROWTH_REL = 0.05
TREND_SHELL_POINTS = 8
TREND_CORE_POINTS = 9
TREND_K_MAX = 20
TREND_FIT_SHELLS = 4
SERIES_K_MAX = 40
L1_K_MAX = 12
OTELBAEV_K_MAX = 10

# PFSS construction
MATCH_TOL = 1e-8
MATCH_EXTENT = 1e3
MATCH_FACTOR = 10.0
TRUNCATION_X_MAX = 1e6
CLASSIFY_PROBE_X = 1e3
ODE_RTOL = 1e-10
ODE_ATOL = 1e-14
ODE_METHOD = 'DOP853'
RICCATI_METHOD = 'LSODA'
RICCATI_DOMAIN = 1e5
RICCATI_START = 1e12

# Verification thresholds
WRONSKIAN_TOL = 1e-6
RHO_DERIV_SLACK = 1e-6
FD_STEP_REL = 1e-4
LIPSCHITZ_SLACK = 1e-9
KERNEL_MASS_SLACK = 1e-6
DH_TOL_EXPLICIT = 1e-6
DH_TOL_NUMERIC = 1e-3
COVERING_TOL = 1e-8
NORM_REALIZATION_CAP = 1e3

# Empirical probes
PROBE_GRID_POINTS = 1201
PROBE_MARGIN = 30.0
PROBE_WIDTH_RANGE = (0.3, 1.5)
PROBE_CENTER_RANGE = (-5.0, 5.0)

# CLI / output
DEFAULT_P = 2.0
DEFAULT_SEED = 0
CSV_FLOAT_FORMAT = '.17g'
THREADS_ENV_VAR = 'SL_SOLV_THREADS'
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# Exit codes
EXIT_SOLVABLE = 0
EXIT_NOT_SOLVABLE = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT_ERROR = 3
EXIT_NUMERIC_ERROR = 4
