"""Constants for the degeneration and certificate kernels."""

from fractions import Fraction

import tordeg

APP_NAME = tordeg.__name__

# series truncation order used when a variety file does not name one
DEFAULT_TRUNC = 24

# largest max-norm searched when looking for a separating weight
DEFAULT_GAMMA_BOUND = 32

# entry bound for the unimodular matrices of the simplex search
DEFAULT_SIMPLEX_BOUND = 1

# exact hulls and volumes are only offered up to this ambient dimension
MAX_EXACT_DIM = 4

# the simplex search enumerates matrices, keep it to small dimensions
MAX_SIMPLEX_DIM = 3

DEFAULT_TOL = 1e-8
FD_OFFSET = 1e-5

# the flow uses the degenerating chart for |t| <= CHART_SWITCH
CHART_SWITCH = 0.5
HANDOVER_BAND = (0.4, 0.6)
HANDOVER_TOL = 1e-6

COMPAT_TOL = 1e-8
AREA_DRIFT_TOL = 1e-3
REAL_PART_TOL = 1e-6

# relative shrink that turns a limiting simplex into a strictly embedded one
STRICT_SHRINK = Fraction(1, 10**12)

# denominators allowed when rationalizing a floating point LP optimum
LP_DENOMINATOR = 10**6

ORACLE_TRIALS = 7
ORACLE_DENOMINATOR = 10**6

MOMENT_SAMPLES = 10_000
MOMENT_LOG_RANGE = (-3.0, 3.0)
MOMENT_COVERAGE_SCALE = 0.95

JACOBIAN_SAMPLES = 8

# products that cancel to zero are taken as relations only at this multiple
# of the order their valuations need
RELATION_MARGIN = 2

DEFAULT_SEED = 0

# integration window for the fiber area quadrature in log-radius
FIBER_LOG_RADIUS = 40.0

CERTIFICATE_VERSION = 1

# exit codes of the command line interface
EXIT_FLOW_ERROR = 1
EXIT_PRECONDITION = 2
EXIT_TRUNCATION = 3
EXIT_CERTIFICATE_INVALID = 4
