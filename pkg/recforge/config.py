"""
Runtime configuration.

Limits are read from environment variables (a local .env file is honoured)
and can be overridden per call or per CLI invocation.
"""

import logging
import os
from dataclasses import dataclass, fields, replace
from typing import Any, Optional

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

DEFAULT_MAX_CELLS = 2**26
DEFAULT_MAX_DIMENSION = 24
DEFAULT_MAX_MODULUS = 10**7
DEFAULT_MAX_SET_SIZE = 10**4
DEFAULT_NODE_BUDGET = 10**7
DEFAULT_HORIZON = 10**5
DEFAULT_SEED = 20240531
DEFAULT_LOG_LEVEL = "INFO"


def _get_int(name: str, default: int) -> int:
    """Read an integer environment variable, falling back to the default."""
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logging.getLogger(__name__).warning(f"Ignoring non-integer {name}={raw!r}")
        return default


def get_max_cells() -> int:
    """Cap on materialised cells (2^d bitsets, Q^d grids, orbit periods)."""
    return _get_int("RECFORGE_MAX_CELLS", DEFAULT_MAX_CELLS)


def get_max_dimension() -> int:
    """Largest dimension tried by the dimension search."""
    return _get_int("RECFORGE_MAX_DIMENSION", DEFAULT_MAX_DIMENSION)


def get_max_modulus() -> int:
    return _get_int("RECFORGE_MAX_MODULUS", DEFAULT_MAX_MODULUS)


def get_max_set_size() -> int:
    return _get_int("RECFORGE_MAX_SET_SIZE", DEFAULT_MAX_SET_SIZE)


def get_node_budget() -> int:
    """Node-expansion budget for the exact colouring solver."""
    return _get_int("RECFORGE_NODE_BUDGET", DEFAULT_NODE_BUDGET)


def get_horizon() -> int:
    return _get_int("RECFORGE_HORIZON", DEFAULT_HORIZON)


def get_seed() -> int:
    return _get_int("RECFORGE_SEED", DEFAULT_SEED)


def get_log_level() -> str:
    return os.environ.get("LOG_LEVEL", DEFAULT_LOG_LEVEL).upper()


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging once for command-line use."""
    name = (level or get_log_level()).upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@dataclass(frozen=True)
class Caps:
    """Resource limits threaded through every construction."""

    max_cells: int = DEFAULT_MAX_CELLS
    max_dimension: int = DEFAULT_MAX_DIMENSION
    max_modulus: int = DEFAULT_MAX_MODULUS
    max_set_size: int = DEFAULT_MAX_SET_SIZE
    node_budget: int = DEFAULT_NODE_BUDGET
    horizon: int = DEFAULT_HORIZON
    seed: int = DEFAULT_SEED

    @classmethod
    def from_env(cls) -> "Caps":
        return cls(
            max_cells=get_max_cells(),
            max_dimension=get_max_dimension(),
            max_modulus=get_max_modulus(),
            max_set_size=get_max_set_size(),
            node_budget=get_node_budget(),
            horizon=get_horizon(),
            seed=get_seed(),
        )

    def with_overrides(self, **overrides: Any) -> "Caps":
        """Return a copy with every non-None override applied."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise TypeError(f"Unknown cap(s): {sorted(unknown)}")
        return replace(self, **{key: value for key, value in overrides.items() if value is not None})

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
