"""Concentrated non-negative matrix-exponential functions.

Exponential cosine-square functions ``e^{-t} prod_i cos^2((w t - phi_i)/2)`` are
non-negative by construction.  This package computes their squared
coefficient of variation exactly through the hyper-trigonometric
representation and minimizes it over ``(w, phi)``.
"""

from .analysis import (DegenerateFormError, MomentSet, compute_scv, laplace_transform,
                       moments, scv_at)
from .core import (MACHINE, CosineSquareForm, HyperTrigForm, PrecisionContext, eval_hypertrig,
                   eval_product, normalize_angles)
from .heuristic import HeuristicLayout, heuristic_objective, layout_phis, optimize_heuristic
from .hypertrig import to_hypertrig
from .optimize import OptConfig, OptResult, Strategy, objective, optimize_full
from .precision import DEFAULT_POLICY, PrecisionError, PrecisionPolicy, predicted_loss, required_digits
from .reps import (MatrixForm, SpectralForm, eval_matrix, eval_spectral, matrix_form,
                   similarity_check, spectral_form)

__version__ = "0.1.0"
