from __future__ import annotations

import os
import random
from dataclasses import dataclass

from effectree.lambda_y import DEFAULT_BUDGET

SEED_ENV = "EFFECTREE_SEED"


@dataclass(frozen=True)
class RunConfig:
    depth: int = 6
    budget: int = DEFAULT_BUDGET
    max_states: int = 4096
    continuation: str = "canonical"  # "identity", "canonical" or a path to a .ly file

    def __post_init__(self) -> None:
        for name in ("depth", "budget", "max_states"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def seed(default: int = 0) -> int:
    """The seed for randomized suites, from ``EFFECTREE_SEED`` if set."""
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw not in (None, "") else default


def rng(default: int = 0) -> random.Random:
    return random.Random(seed(default))
