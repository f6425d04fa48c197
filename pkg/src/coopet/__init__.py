"""Exact coopetition indices for cooperative TU-games."""

from .errors import CoopetError
from .families import (
    P_PERMUTATION,
    P_UNIFORM,
    PRESETS,
    Q_PERMUTATION,
    Q_UNIFORM,
    CustomExternal,
    CustomInternal,
    TabulatedSemivalue,
    has_charac_property,
    validate_family,
)
from .game import (
    Game,
    PlayerSet,
    add_null_player,
    enumerate_two_partitions,
    random_monotone_game,
    unanimity_game,
    weighted_majority_game,
)
from .indices import (
    absolute_coopetition,
    attitude,
    banzhaf_coopetition,
    coopetition,
    generalized_value,
    shapley_owen_coopetition,
    uniform_shapley_coopetition,
)

__version__ = "0.1.0"

__all__ = [
    "CoopetError",
    "CustomExternal",
    "CustomInternal",
    "Game",
    "PRESETS",
    "P_PERMUTATION",
    "P_UNIFORM",
    "PlayerSet",
    "Q_PERMUTATION",
    "Q_UNIFORM",
    "TabulatedSemivalue",
    "absolute_coopetition",
    "add_null_player",
    "attitude",
    "banzhaf_coopetition",
    "coopetition",
    "enumerate_two_partitions",
    "generalized_value",
    "has_charac_property",
    "random_monotone_game",
    "shapley_owen_coopetition",
    "unanimity_game",
    "uniform_shapley_coopetition",
    "validate_family",
    "weighted_majority_game",
]
