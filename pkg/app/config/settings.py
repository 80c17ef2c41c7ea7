"""Numerical defaults read from the environment."""

import os

from dotenv import load_dotenv

load_dotenv()

# Relative rank/nullity tolerance used by every kernel computation
DEFAULT_TOL = float(os.getenv("LGKS_TOL", "1e-9"))

# Random-combination search (Theorem 1/2 checkers) and probes
DEFAULT_SEED = int(os.getenv("LGKS_SEED", "0"))
DEFAULT_SEARCH_DRAWS = int(os.getenv("LGKS_SEARCH_DRAWS", "32"))

# Dense d^2 x d^2 oracle is only built up to this Hilbert dimension
MAX_MODEL_DIM = int(os.getenv("LGKS_MAX_DIM", "64"))
MAX_LATTICE_DIM = int(os.getenv("LGKS_MAX_LATTICE_DIM", "4096"))

# Thread pool width for audit checkers and relaxation probe samples
WORKERS = int(os.getenv("LGKS_WORKERS", "4"))

LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING").upper()

TOOL_VERSION = "1.0.0"
