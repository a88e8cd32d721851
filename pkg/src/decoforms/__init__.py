"""Decomposable forms: factorization, invariants, lattice counts and volumes."""

__version__ = "0.1.0"

from .errors import (DecoformsError, DivergenceError, FormError, FormSyntaxError,
                     HomogeneityError, InsufficientDataError, InvariantUndefinedError,
                     PrecisionError, PreconditionError, ResourceError, UnsupportedInputError,
                     ZeroFormError)
from .forms import Form, UnimodularMap, ZeroForm, apply_unimodular, evaluate, restrict_to_subspace
from .parser import parse_form, render_form
from .linalg import RationalSubspace
from .factorization import (FactorSystem, NormForm, NumberFieldSpec, build_norm_form,
                            factor_form, rational_factorization, vanishing_subspace)
from .invariants import (InvariantReport, QuadraticPower, analyze, classify_type, compute_dF,
                         discriminant, form_height, minimize_height_heuristic, tuple_families)
from .volume import VolumeEstimate, is_region_bounded, volume_box, volume_region, volume_VF
from .counting import (CountResult, count_box, count_quadratic_power, count_total,
                       count_total_bounded, count_total_thue, reduce_definite_quadratic)
from .ratios import RatioSample, estimate_lemma_constants, min_product_ratio
from .harness import FitResult, SweepRecord, cmd_sweep, cmd_verify, fit_exponent
