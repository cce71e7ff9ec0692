"""Discrete-time quantum walks on joined half lines and trees.

Modules
-------
coin_params
    Coins, derived scalars and initial states.
walker
    Direct simulation on joined half lines and on trees.
reduced
    Two-channel reduction of the joined walk.
series, genfun
    Truncated power series and the closed-form generating functions.
theory
    Localisation and weak-limit formulas.
harness, cli
    Experiment runners and the command line.
"""

from .coin_params import CoinU2, InitialState, derive_params, make_coin, make_phased_hadamard
from .errors import (BranchError, CapacityError, RegimeError, SingularSeriesError,
                     ValidationError)

__version__ = "0.1.0"

__all__ = [
    "CoinU2",
    "InitialState",
    "derive_params",
    "make_coin",
    "make_phased_hadamard",
    "BranchError",
    "CapacityError",
    "RegimeError",
    "SingularSeriesError",
    "ValidationError",
]
