"""Per-group search budgets - oracle radii, ball caps, search limits.

Each group grows at a different rate. This module provides profiles
used by the checkers to size distance oracles and bound searches.
"""
from config import MEMORY_BUDGET

BUDGET_PROFILES = {
    "default": {
        "oracle_radius": 3,
        "ball_entries": MEMORY_BUDGET,
        "search_states": 5_000_000,
        "astar_expansions": 2_000_000,
    },
    "f2": {
        "oracle_radius": 5,
        "ball_entries": MEMORY_BUDGET,
        "search_states": 5_000_000,
        "astar_expansions": 2_000_000,
    },
    "z2-wise-base": {
        "oracle_radius": 8,
        "ball_entries": MEMORY_BUDGET,
        "search_states": 5_000_000,
        "astar_expansions": 2_000_000,
    },
    "z2-gersten-base": {
        "oracle_radius": 8,
        "ball_entries": MEMORY_BUDGET,
        "search_states": 5_000_000,
        "astar_expansions": 2_000_000,
    },
    "f2c-bridson-base": {
        "oracle_radius": 5,
        "ball_entries": MEMORY_BUDGET,
        "search_states": 5_000_000,
        "astar_expansions": 2_000_000,
    },
    "wise": {
        "oracle_radius": 4,
        "ball_entries": MEMORY_BUDGET,
        "search_states": 5_000_000,
        "astar_expansions": 2_000_000,
    },
    "gersten": {
        "oracle_radius": 4,
        "ball_entries": MEMORY_BUDGET,
        "search_states": 5_000_000,
        "astar_expansions": 2_000_000,
    },
    "bridson": {
        "oracle_radius": 3,
        "ball_entries": MEMORY_BUDGET,
        "search_states": 5_000_000,
        "astar_expansions": 2_000_000,
    },
    "stallings": {
        "oracle_radius": 3,  # 24 letters; radius 3 keeps the ball near 10^4
        "ball_entries": MEMORY_BUDGET,
        "search_states": 5_000_000,
        "astar_expansions": 5_000_000,
    },
}


def get_profile(group: str) -> dict:
    """Get budget profile by group name, fallback to the default profile."""
    profile = dict(BUDGET_PROFILES["default"])
    profile.update(BUDGET_PROFILES.get(group, {}))
    return profile


def oracle_radius(group: str) -> int:
    return get_profile(group)["oracle_radius"]
