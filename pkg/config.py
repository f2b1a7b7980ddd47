"""Centralized configuration for the loop shortening workbench.

All settings are configurable via environment variables (a `.env` file in
the working directory is loaded first).
"""
import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# =============================================================================
# PATHS
# =============================================================================

# Presentation library - one <name>.pres file per group
GROUPS_DIR = Path(os.environ.get(
    "WORKBENCH_GROUPS_DIR",
    str(Path(__file__).parent / "groups")
))

# Where JSON verdicts and CSV summaries land
OUTPUT_DIR = Path(os.environ.get(
    "WORKBENCH_OUTPUT_DIR",
    os.path.expanduser("~/.loop-shortening/reports")
))

# =============================================================================
# SEARCH LIMITS
# =============================================================================

# Cap on ball entries; accepts plain integers or K/M/G suffixes
MEMORY_BUDGET_RAW = os.environ.get("WORKBENCH_MEMORY_BUDGET", "50M")

# Worker threads for the outer enumeration of property checks
WORKERS = int(os.environ.get("WORKBENCH_WORKERS", "1"))

# Seed for every randomized sampler
SEED = int(os.environ.get("WORKBENCH_SEED", "20030101"))

# =============================================================================
# LOGGING
# =============================================================================

LOG_LEVEL = os.environ.get("WORKBENCH_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_SUFFIXES = {"K": 1_000, "M": 1_000_000, "G": 1_000_000_000}


def parse_memory_budget(text: str) -> int:
    """Parse a ball-entry budget such as "50M", "200K" or "1500".

    Raises:
        ValueError: If the text is not a positive count.
    """
    value = text.strip().upper()
    if not value:
        raise ValueError("empty memory budget")
    multiplier = 1
    if value[-1] in _SUFFIXES:
        multiplier = _SUFFIXES[value[-1]]
        value = value[:-1]
    try:
        count = int(float(value) * multiplier)
    except ValueError:
        raise ValueError(f"bad memory budget {text!r}") from None
    if count <= 0:
        raise ValueError(f"memory budget must be positive, got {text!r}")
    return count


MEMORY_BUDGET = parse_memory_budget(MEMORY_BUDGET_RAW)


def ensure_dirs():
    """Create necessary directories if they don't exist."""
    GROUPS_DIR.mkdir(parents=True, exist_ok=True)
    OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
