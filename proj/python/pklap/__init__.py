"""Periodic solutions of anisotropic discrete p(k)-Laplacian problems.

Sequences are passed as flat float arrays of length m*n, ordered k-major.
"""

from ._pklap import (
    Builtin,
    Problem,
    SolverConfig,
    action,
    anticoercivity_probe,
    builtin,
    cli,
    find_multiple,
    gradient,
    gradient_check,
    inequality_suite,
    lambda_sweep,
    newton_solve,
    power,
    residual,
    residual_norm,
    xi_constant,
)

__all__ = [
    "Builtin",
    "Problem",
    "SolverConfig",
    "action",
    "anticoercivity_probe",
    "builtin",
    "cli",
    "find_multiple",
    "gradient",
    "gradient_check",
    "inequality_suite",
    "lambda_sweep",
    "newton_solve",
    "power",
    "residual",
    "residual_norm",
    "xi_constant",
]
