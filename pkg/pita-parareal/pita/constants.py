"""
Constants used across the solver, the accelerator and the experiment harness.
"""

import os

# Relative tolerance when checking that an interval holds a whole number of steps.
STEP_COUNT_RTOL = 1e-9

# Small-denominator guard of the epsilon table, relative to 1 + |entry|.
DENOM_GUARD = 1e-12

# |det(I - hA)| below this times ||I - hA||^d is treated as singular.
SINGULAR_TOL = 1e-12

# Full round-trip precision for every float written to CSV.
CSV_FLOAT_FORMAT = '.17g'

# Order and starting index used for the final acceleration.
DEFAULT_ACCEL_K = 4
DEFAULT_ACCEL_N = 2

# Simulated annealing over q.
DEFAULT_COOLING = 0.95
DEFAULT_ANNEAL_STEPS = 2000
DEFAULT_PROPOSAL_SCALE = 0.5  # log10 units
DEFAULT_Q_MIN = 1e-10
DEFAULT_Q_MAX = 1.0

# Step of the fine explicit run that manufactures the reference limits.
DEFAULT_H_TINY = 1e-5

DEFAULT_THREADS = os.cpu_count() or 1

# Exit codes of the command-line tool.
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4
