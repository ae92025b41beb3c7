"""
Monetary-policy threshold calibration and simulation.
Econometric calibration of labor-market and wage-growth thresholds, a reduced-form
macro model with threshold-based forward guidance, and an optimal-control solver.
"""

import os
import sys

__version__ = "0.1.0"

_THREADS_VAR = "SIM_THREADS"
_sim_threads = os.environ.get(_THREADS_VAR)

if not _sim_threads:
    # resolved lazily by the suite runner
    SIM_THREADS = None

else:
    try:
        SIM_THREADS = int(_sim_threads)
        assert SIM_THREADS > 0
    except (AssertionError, ValueError):
        sys.exit(
            f"Error: Invalid value of environment variable {_THREADS_VAR}: '{_sim_threads}'"
        )
