"""Star-products, star-exponentials and star-logarithms of slice-regular functions.

The package implements a calculus of quaternion-valued slice functions given
through their stem components on axially symmetric domains: the star algebra
(product, conjugate, symmetrization), the closed-form star-exponential, branch
families of scalar logarithms and trigonometric inverses, the vectorial
classification of the non-scalar part, and the case analysis producing
star-logarithms with explicit branch bookkeeping.
"""

from .algebra import (
    reg_conj,
    scalar_part,
    split_form,
    star_mul,
    symmetrization,
    vect_part,
)
from .branches import arccos_k, log_branch, log_k, mu, mu_inv, mu_prime, nu
from .domain import BasicDomainSpec, validate_domain
from .errors import (
    BranchDomainViolation,
    BranchPointHit,
    ClassificationError,
    ConditionFailed,
    DomainError,
    ExprError,
    ExprSyntaxError,
    NoGlobalLogWitness,
    ResidualRejected,
    SlicePreservingRequired,
    StarlogError,
    Vanishing,
)
from .expr import (
    Q,
    UNIT,
    SliceExpr,
    const,
    eval_many,
    eval_stem,
    evaluate,
    is_slice_preserving,
    stem_complex,
)
from .logarithm import (
    BranchSpec,
    ConditionSummary,
    LogResult,
    check_conditions,
    log_star,
    residual_sup,
)
from .parse import parse_expr, to_source
from .quaternion import (
    Quaternion,
    exp_q,
    format_quaternion,
    is_imaginary_unit,
    parse_quaternion,
    split,
)
from .starexp import cos_star, exp_star, exp_star_series, real_power, sin_star
from .vectorial import (
    classify_vectorial,
    factor_minimal,
    find_zeros_sp,
    linearly_dependent,
    normalize,
)

__all__ = [
    "BasicDomainSpec",
    "BranchDomainViolation",
    "BranchPointHit",
    "BranchSpec",
    "ClassificationError",
    "ConditionFailed",
    "ConditionSummary",
    "DomainError",
    "ExprError",
    "ExprSyntaxError",
    "LogResult",
    "NoGlobalLogWitness",
    "Q",
    "Quaternion",
    "ResidualRejected",
    "SliceExpr",
    "SlicePreservingRequired",
    "StarlogError",
    "UNIT",
    "Vanishing",
    "arccos_k",
    "check_conditions",
    "classify_vectorial",
    "const",
    "cos_star",
    "eval_many",
    "eval_stem",
    "evaluate",
    "exp_q",
    "exp_star",
    "exp_star_series",
    "factor_minimal",
    "find_zeros_sp",
    "format_quaternion",
    "is_imaginary_unit",
    "is_slice_preserving",
    "linearly_dependent",
    "log_branch",
    "log_k",
    "log_star",
    "mu",
    "mu_inv",
    "mu_prime",
    "normalize",
    "nu",
    "parse_expr",
    "parse_quaternion",
    "real_power",
    "reg_conj",
    "residual_sup",
    "scalar_part",
    "sin_star",
    "split",
    "split_form",
    "star_mul",
    "stem_complex",
    "symmetrization",
    "to_source",
    "validate_domain",
    "vect_part",
]

__version__ = "0.1.0"
