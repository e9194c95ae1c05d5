"""Data-driven finite abstractions with scenario-based certificates."""

from ._lcv import (
    LcvError,
    Slca,
    epsilon,
    gamma_bar,
    greedy_complexity,
    hybrid_oracle,
    kbar,
    phi_affine,
    run,
    sample,
)

__all__ = [
    "LcvError",
    "Slca",
    "epsilon",
    "gamma_bar",
    "greedy_complexity",
    "hybrid_oracle",
    "kbar",
    "phi_affine",
    "run",
    "sample",
]
