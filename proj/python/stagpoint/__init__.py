"""Lagrangian solver for the stagnation-point Euler equation."""

from ._core import (
    Datum,
    Solution,
    StagpointError,
    c2_constant,
    c3_constant,
    datum_from_dict,
    kbar,
    preset,
    preset_names,
    validate,
)

__all__ = [
    "Datum",
    "Solution",
    "StagpointError",
    "c2_constant",
    "c3_constant",
    "datum_from_dict",
    "kbar",
    "preset",
    "preset_names",
    "validate",
]
