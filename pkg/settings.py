# settings.py
"""
Project-wide configuration for the perturbed-hamiltonicity toolkit.

Values can be overridden through environment variables (or a local .env file).
"""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# --- Directory layout ---
PROJECT_DIR = Path(__file__).resolve().parent
DATA_DIR = Path(os.getenv("PHL_DATA_DIR", PROJECT_DIR / "data"))
RESULTS_DIR = DATA_DIR / "results"
LOG_DIR = DATA_DIR / "logs"
LOG_FILE = LOG_DIR / "perturbed.log"

# --- Logging ---
LOG_LEVEL = os.getenv("PHL_LOG_LEVEL", "INFO").upper()

# --- Reproducibility ---
_seed = os.getenv("PHL_SEED")
if _seed is not None and _seed.strip() != "":
    try:
        PHL_SEED = int(_seed, 0)
    except ValueError:
        raise ValueError(f"PHL_SEED must be an integer, got {_seed!r}")
    if not 0 <= PHL_SEED < 2**64:
        raise ValueError(f"PHL_SEED must fit in 64 bits, got {PHL_SEED}")
else:
    PHL_SEED = None

# --- Resource guards for exact oracles ---
QDEGREE_MAX_N = 40               # min_q_degree with q >= 2
HAMILTON_EXACT_MAX_N = 24
PANCYCLIC_EXACT_MAX_N = 18
EXPANSION_EXACT_MAX_N = 22
HYPER_MATCHING_MAX_N_PER_K = 7   # perfect matching oracle refuses n > 7k
LOOSE_CYCLE_MAX_N_PER_K1 = 8     # loose cycle oracle refuses n > 8(k-1)
ARC_DISJOINT_MAX_N = 14

# --- Algorithm defaults ---
DEFAULT_EPSILON = 0.1
DEFAULT_SAMPLE_BUDGET = 2000
DEFAULT_WITNESS_BUDGET = 200_000
