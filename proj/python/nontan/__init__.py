"""Python bindings for the nontan C++ core."""
from ._nontan import (
    NumericalRefusal,
    Schedule,
    ValidationError,
    build_schedule,
    choose_B,
    choose_B_split,
    choose_N,
    convergence_contrast,
    diag_closed_form,
    divergence_certificate,
    fl_norm,
    load_schedule,
    partial_sum,
    run,
    verify_schedule,
)

__all__ = [
    "NumericalRefusal",
    "Schedule",
    "ValidationError",
    "build_schedule",
    "choose_B",
    "choose_B_split",
    "choose_N",
    "convergence_contrast",
    "diag_closed_form",
    "divergence_certificate",
    "fl_norm",
    "load_schedule",
    "partial_sum",
    "run",
    "verify_schedule",
]
