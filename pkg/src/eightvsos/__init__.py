"""Domain-wall partition function of the elliptic solid-on-solid model:
brute-force enumeration, two determinant representations and a harness that
checks the functional equations relating them."""

from .coeffs import (BAR, CoeffRole, EquationType, VariableTuple, modified_coeff,
                     original_coeff, permute_eval, transposition, unfolded_coeff)
from .determinant import (RepConstants, build_omega, build_W, det, fundamental_H,
                          rep_partition)
from .closed_forms import golden_check
from .errors import *  # noqa: F401,F403
from .lattice import ModelParams, enumerate_heights, face_weight, partition_enum
from .theta import ThetaContext, theta_eval
from .verification import CheckId, VerificationReport, residual, run_suite, sample_params

__version__ = "0.1.0"
