"""Closed-form group integrals over the unitary orthosymplectic supergroup
UOSp(k1/2k2) together with independent numerical checks."""

from .cartan import (CartanPoint, SuperDims, embed_diag, make_cartan_point,
                     random_regular_point, supertrace, supertrace_square)
from .closed_form import (berezinian_B, calibration_constant, chi_closed_form,
                          chi_normalized, omega)
from .errors import (AlgebraMismatch, CapacityExceeded, DimensionMismatch, NonConvergent,
                     RankTooLarge, SingularPoint, SingularZeroRoot, SuperHCError, UnknownSuite)
from .harness import Report, SuiteConfig, emit_report, run_suite

__version__ = "0.1.0"

__all__ = [
    "CartanPoint", "SuperDims", "embed_diag", "make_cartan_point", "random_regular_point",
    "supertrace", "supertrace_square", "berezinian_B", "calibration_constant",
    "chi_closed_form", "chi_normalized", "omega", "AlgebraMismatch", "CapacityExceeded",
    "DimensionMismatch", "NonConvergent", "RankTooLarge", "SingularPoint", "SingularZeroRoot",
    "SuperHCError", "UnknownSuite", "Report", "SuiteConfig", "emit_report", "run_suite",
]
