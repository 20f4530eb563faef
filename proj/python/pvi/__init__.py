"""Reflection coefficients, tau functions and applications of generalized Jacobi weights.

Scalar arguments accept numbers or strings; strings ("0.3", "pi/3", "inf") are parsed at the
working precision, so they avoid the binary rounding of Python floats. Results come back as
Python complex numbers; `run` returns the full-precision CLI text instead.
"""

from ._pvi import (
    PviError,
    cue_charpoly,
    cue_gap,
    gauss_2f1,
    identity_residuals,
    ising,
    moments,
    reflection_table,
    routes,
    run,
)

__all__ = [
    "PviError",
    "cue_charpoly",
    "cue_gap",
    "gauss_2f1",
    "identity_residuals",
    "ising",
    "moments",
    "reflection_table",
    "routes",
    "run",
]
