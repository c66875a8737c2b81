"""Expression trees for slice functions and their stem evaluation.

A node evaluates to a stem (A, B) of quaternion values over complex leaf
points z = x + iy; the slice function value at x + Jy is A + J B.  Stems obey
the reflection symmetry A(conj z) = A(z), B(conj z) = -B(z), which the
evaluator applies globally: batches are normalized to the upper half plane
and the B sign restored afterwards, so contours may dip below the axis.

Nodes carry a structural slice-preserving flag (real stem components, exact
zeros in the vector part); scalar branch functions may only be applied to
structurally slice-preserving children.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .branches import SCALAR_FUNCTIONS
from .errors import (
    DomainError,
    ExprError,
    NoConvergence,
    RealInput,
    SlicePreservingRequired,
    UnitFnOnRealAxis,
)
from .quaternion import Quaternion, qconj, qmul, qscalar, split

logger = logging.getLogger(__name__)

REAL_AXIS_TOL = 1e-10
SP_GRID_TOL = 1e-10
SERIES_TOL = 1e-15
MAX_SERIES_TERMS = 200
PATCH_POINTS = 32


@dataclass(frozen=True)
class StemValue:
    """Stem components at one leaf point: the value at x + Jy is a + J*b."""

    a: Quaternion
    b: Quaternion

    def value(self, unit: Quaternion) -> Quaternion:
        return self.a + unit * self.b

    def as_complex(self) -> complex:
        """Leaf form a + ib for slice-preserving stems."""
        return complex(self.a.w, self.b.w)


class SliceExpr:
    """Base class providing operator sugar; subclasses are frozen dataclasses."""

    slice_preserving: bool

    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Add(self, Neg(as_expr(other)))

    def __rsub__(self, other):
        return Add(as_expr(other), Neg(self))

    def __neg__(self):
        return Neg(self)

    def __mul__(self, other):
        return StarMul(self, as_expr(other))

    def __rmul__(self, other):
        return StarMul(as_expr(other), self)

    def __pow__(self, n: int):
        return IntPow(self, n)

    def _set_sp(self, value: bool) -> None:
        object.__setattr__(self, "slice_preserving", value)


def as_expr(value) -> SliceExpr:
    if isinstance(value, SliceExpr):
        return value
    if isinstance(value, (int, float, Quaternion)):
        return Const(Quaternion.coerce(value))
    raise ExprError(f"cannot interpret {value!r} as an expression")


@dataclass(frozen=True)
class Const(SliceExpr):
    value: Quaternion

    def __post_init__(self):
        self._set_sp(self.value.vec_norm() == 0.0)


@dataclass(frozen=True)
class VarQ(SliceExpr):
    def __post_init__(self):
        self._set_sp(True)


@dataclass(frozen=True)
class UnitFn(SliceExpr):
    """The unit slice function with stem (0, 1); undefined on the real axis."""

    def __post_init__(self):
        self._set_sp(True)


@dataclass(frozen=True)
class Add(SliceExpr):
    left: SliceExpr
    right: SliceExpr

    def __post_init__(self):
        self._set_sp(self.left.slice_preserving and self.right.slice_preserving)


@dataclass(frozen=True)
class Neg(SliceExpr):
    child: SliceExpr

    def __post_init__(self):
        self._set_sp(self.child.slice_preserving)


@dataclass(frozen=True)
class StarMul(SliceExpr):
    left: SliceExpr
    right: SliceExpr

    def __post_init__(self):
        self._set_sp(self.left.slice_preserving and self.right.slice_preserving)


@dataclass(frozen=True)
class IntPow(SliceExpr):
    child: SliceExpr
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise ExprError(f"star power needs an integer exponent >= 0, got {self.n!r}")
        self._set_sp(self.child.slice_preserving)


@dataclass(frozen=True)
class RegConj(SliceExpr):
    """Regular conjugate: both stem components conjugated quaternionically."""

    child: SliceExpr

    def __post_init__(self):
        self._set_sp(self.child.slice_preserving)


@dataclass(frozen=True)
class Component(SliceExpr):
    """Coefficient function f_l of the split f = f0 + f1 i + f2 j + f3 k."""

    child: SliceExpr
    index: int

    def __post_init__(self):
        if self.index not in (0, 1, 2, 3):
            raise ExprError("component index must be 0..3")
        self._set_sp(True)


@dataclass(frozen=True)
class VectPart(SliceExpr):
    """f - f0: stem components with the real (coefficient of 1) part removed."""

    child: SliceExpr

    def __post_init__(self):
        self._set_sp(self.child.slice_preserving)


@dataclass(frozen=True)
class Symm(SliceExpr):
    """Symmetrization f0^2 + f1^2 + f2^2 + f3^2, slice preserving by construction."""

    child: SliceExpr

    def __post_init__(self):
        self._set_sp(True)


@dataclass(frozen=True)
class ScalarApply(SliceExpr):
    """A scalar branch function applied leafwise to a slice-preserving child."""

    fn: str
    child: SliceExpr
    k: int = 0

    def __post_init__(self):
        if self.fn not in SCALAR_FUNCTIONS:
            raise ExprError(f"unknown scalar function {self.fn!r}")
        if not self.child.slice_preserving:
            raise SlicePreservingRequired(
                f"{self.fn} needs a slice-preserving argument"
            )
        self._set_sp(True)


@dataclass(frozen=True)
class StarSeries(SliceExpr):
    """exp/cos/sin evaluated as a series in star powers of the child."""

    kind: str
    child: SliceExpr
    max_terms: int = MAX_SERIES_TERMS

    def __post_init__(self):
        if self.kind not in ("exp", "cos", "sin"):
            raise ExprError(f"unknown series kind {self.kind!r}")
        self._set_sp(self.child.slice_preserving)


@dataclass(frozen=True, eq=False)
class GridFieldExpr(SliceExpr):
    """A slice-preserving function known through a lifted field on a grid."""

    fld: object  # lifts.LiftedScalarField
    name: str = "field"

    def __post_init__(self):
        self._set_sp(True)


@dataclass(frozen=True, eq=False)
class QuotientBySP(SliceExpr):
    """Stem of the child divided by a real-coefficient polynomial in z.

    The polynomial zeros (all real or paired) are removable for the quotient;
    nodes within ``patch_radius`` of a zero are evaluated as a mean over a
    small circle, which reproduces the holomorphic quotient there.
    """

    child: SliceExpr
    coeffs: tuple  # highest degree first, np.polyval order
    zeros: tuple  # complex roots being divided out (upper representatives and real)
    patch_radius: float

    def __post_init__(self):
        self._set_sp(self.child.slice_preserving)


# ---------------------------------------------------------------------------
# evaluation


def eval_stem_many(expr: SliceExpr, zs) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the stem over complex points; returns (A, B) with shape (n, 4)."""
    flat = np.asarray(zs, dtype=complex).ravel()
    sign = np.where(flat.imag < 0, -1.0, 1.0)
    zhat = flat.real + 1j * np.abs(flat.imag)
    A, B = _eval(expr, zhat, {})
    return A, B * sign[:, None]


def eval_stem(expr: SliceExpr, z: complex) -> StemValue:
    A, B = eval_stem_many(expr, [z])
    return StemValue(Quaternion.from_array(A[0]), Quaternion.from_array(B[0]))


def evaluate(expr: SliceExpr, q) -> Quaternion:
    """Value of the slice function at a quaternion point.

    Real points use the slice-domain rule f(x) = A(x), valid only when the
    stem has B(x) = 0 within tolerance.
    """
    q = Quaternion.coerce(q)
    try:
        x, y, unit = split(q)
    except RealInput:
        stem = eval_stem(expr, complex(q.w, 0.0))
        if abs(stem.b) > REAL_AXIS_TOL * (1.0 + abs(stem.a)):
            raise DomainError(
                f"no well-defined value at the real point {q.w}: stem B = {stem.b!r}"
            ) from None
        return stem.a
    return eval_stem(expr, complex(x, y)).value(unit)


def eval_many(expr: SliceExpr, zs, unit: Quaternion) -> np.ndarray:
    """Values A + unit*B over a batch of leaf points, as an (n, 4) array."""
    A, B = eval_stem_many(expr, zs)
    return A + qmul(unit.to_array()[None, :], B)


def stem_complex(expr: SliceExpr, zs) -> np.ndarray:
    """Leaf form a + ib of a slice-preserving expression over a batch."""
    if not expr.slice_preserving:
        raise SlicePreservingRequired("leaf form exists only for slice-preserving expressions")
    A, B = eval_stem_many(expr, zs)
    return A[:, 0] + 1j * B[:, 0]


def is_slice_preserving(expr: SliceExpr, domain=None) -> bool:
    """Structural flag, optionally cross-checked numerically on a domain grid.

    On disagreement the structural answer wins and the discrepancy is logged:
    numerically vanishing vector parts do not make an expression structurally
    slice preserving.
    """
    structural = expr.slice_preserving
    if domain is not None and domain.n_nodes:
        A, B = eval_stem_many(expr, domain.node_z)
        vec = max(np.abs(A[:, 1:]).max(), np.abs(B[:, 1:]).max())
        scale = 1.0 + max(np.abs(A).max(), np.abs(B).max())
        numeric = vec <= SP_GRID_TOL * scale
        if numeric != structural:
            logger.warning(
                "slice-preserving flag %s disagrees with grid check %s (sup vec %.2e)",
                structural,
                numeric,
                vec,
            )
    return structural


# stem pairs behave like complex numbers over the quaternions:
# (A1 + iB1)(A2 + iB2) with i central


def _cmul(p, q):
    A1, B1 = p
    A2, B2 = q
    return qmul(A1, A2) - qmul(B1, B2), qmul(A1, B2) + qmul(B1, A2)


def _stem_norm(p) -> np.ndarray:
    A, B = p
    return np.sqrt(np.sum(A * A, axis=-1) + np.sum(B * B, axis=-1))


def _eval(expr: SliceExpr, z: np.ndarray, cache: dict) -> tuple[np.ndarray, np.ndarray]:
    key = id(expr)
    hit = cache.get(key)
    if hit is not None:
        return hit
    n = z.size
    zeros = np.zeros((n, 4))

    if isinstance(expr, Const):
        A = np.repeat(expr.value.to_array()[None, :], n, axis=0)
        out = (A, zeros.copy())
    elif isinstance(expr, VarQ):
        out = (qscalar(z.real), qscalar(z.imag))
    elif isinstance(expr, UnitFn):
        if (z.imag == 0).any():
            raise UnitFnOnRealAxis("the unit function I has no value on the real axis")
        out = (zeros.copy(), qscalar(np.ones(n)))
    elif isinstance(expr, Add):
        A1, B1 = _eval(expr.left, z, cache)
        A2, B2 = _eval(expr.right, z, cache)
        out = (A1 + A2, B1 + B2)
    elif isinstance(expr, Neg):
        A, B = _eval(expr.child, z, cache)
        out = (-A, -B)
    elif isinstance(expr, StarMul):
        out = _cmul(_eval(expr.left, z, cache), _eval(expr.right, z, cache))
    elif isinstance(expr, IntPow):
        base = _eval(expr.child, z, cache)
        acc = (qscalar(np.ones(n)), zeros.copy())
        m = expr.n
        while m:
            if m & 1:
                acc = _cmul(acc, base)
            m >>= 1
            if m:
                base = _cmul(base, base)
        out = acc
    elif isinstance(expr, RegConj):
        A, B = _eval(expr.child, z, cache)
        out = (qconj(A), qconj(B))
    elif isinstance(expr, Component):
        A, B = _eval(expr.child, z, cache)
        out = (qscalar(A[:, expr.index]), qscalar(B[:, expr.index]))
    elif isinstance(expr, VectPart):
        A, B = _eval(expr.child, z, cache)
        A = A.copy()
        B = B.copy()
        A[:, 0] = 0.0
        B[:, 0] = 0.0
        out = (A, B)
    elif isinstance(expr, Symm):
        A, B = _eval(expr.child, z, cache)
        c = A + 1j * B
        s = np.sum(c * c, axis=-1)
        out = (qscalar(s.real), qscalar(s.imag))
    elif isinstance(expr, ScalarApply):
        A, B = _eval(expr.child, z, cache)
        w = SCALAR_FUNCTIONS[expr.fn](A[:, 0] + 1j * B[:, 0], expr.k)
        w = np.asarray(w, dtype=complex)
        out = (qscalar(w.real), qscalar(w.imag))
    elif isinstance(expr, StarSeries):
        out = _star_series(expr, _eval(expr.child, z, cache))
    elif isinstance(expr, GridFieldExpr):
        w = np.asarray(expr.fld.sample(z), dtype=complex)
        out = (qscalar(w.real), qscalar(w.imag))
    elif isinstance(expr, QuotientBySP):
        out = _eval_quotient(expr, z, cache)
    else:
        raise ExprError(f"cannot evaluate node {type(expr).__name__}")

    cache[key] = out
    return out


def _star_series(expr: StarSeries, F) -> tuple[np.ndarray, np.ndarray]:
    n = F[0].shape[0]
    one = (qscalar(np.ones(n)), np.zeros((n, 4)))
    if expr.kind == "exp":
        total = one
        term = one
        for m in range(1, expr.max_terms):
            term = _cmul(term, F)
            term = (term[0] / m, term[1] / m)
            total = (total[0] + term[0], total[1] + term[1])
            if np.max(_stem_norm(term)) <= SERIES_TOL * (1.0 + np.max(_stem_norm(total))):
                return total
        raise NoConvergence("exp star series did not converge")
    F2 = _cmul(F, F)
    term = one if expr.kind == "cos" else F
    total = term
    for m in range(1, expr.max_terms):
        lo = 2 * m - 1 if expr.kind == "cos" else 2 * m
        term = _cmul(term, F2)
        term = (-term[0] / (lo * (lo + 1)), -term[1] / (lo * (lo + 1)))
        total = (total[0] + term[0], total[1] + term[1])
        if np.max(_stem_norm(term)) <= SERIES_TOL * (1.0 + np.max(_stem_norm(total))):
            return total
    raise NoConvergence(f"{expr.kind} star series did not converge")


def _eval_quotient(expr: QuotientBySP, z: np.ndarray, cache: dict):
    coeffs = np.asarray(expr.coeffs, dtype=float)
    denom = np.polyval(coeffs, z)
    dist = np.full(z.shape, np.inf)
    for r in expr.zeros:
        dist = np.minimum(dist, np.abs(z - r))
        if abs(complex(r).imag) > 1e-14:
            dist = np.minimum(dist, np.abs(z - np.conj(complex(r))))
    near = dist < expr.patch_radius

    A, B = _eval(expr.child, z, cache)
    safe_d = np.where(near, 1.0, denom)
    inv = 1.0 / safe_d
    alpha, beta = inv.real[:, None], inv.imag[:, None]
    A_out = alpha * A - beta * B
    B_out = alpha * B + beta * A

    if near.any():
        # removable singularity: mean over a circle avoiding every zero
        idx = np.nonzero(near)[0]
        R = 2.0 * expr.patch_radius
        theta = 2.0 * np.pi * (np.arange(PATCH_POINTS) + 0.37) / PATCH_POINTS
        ring = np.exp(1j * theta)
        for i in idx:
            pts = z[i] + R * ring
            Ar, Br = eval_stem_many(expr.child, pts)
            dr = np.polyval(coeffs, pts)
            invr = 1.0 / dr
            ar, br = invr.real[:, None], invr.imag[:, None]
            A_out[i] = np.mean(ar * Ar - br * Br, axis=0)
            B_out[i] = np.mean(ar * Br + br * Ar, axis=0)
    return A_out, B_out


# convenient singletons for building expressions
Q = VarQ()
UNIT = UnitFn()


def const(value) -> Const:
    return Const(Quaternion.coerce(value))
