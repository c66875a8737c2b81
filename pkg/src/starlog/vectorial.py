"""Zero sets and structure of the vectorial part of a slice function.

Scalar coefficients of slice functions have holomorphic stem components, so
zeros are located by the argument principle: winding counts over rectangles
with adaptive boundary sampling, subdivided until each zero sits alone in a
negligibly small cell, then polished by multiplicity-aware Newton steps.

Zeros of the symmetrized vectorial part split into three kinds.  At a real
point or along a whole sphere every component vanishes and a real-coefficient
polynomial factors out; at an isolated point the components stay nonzero and
the zero direction is carried by a single quaternion on the sphere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import symmetrization, vect_part
from .domain import BasicDomainSpec
from .errors import (
    BoundaryZero,
    ClassificationError,
    FactorResidual,
    NoConvergence,
    SlicePreservingRequired,
    Vanishing,
)
from .expr import GridFieldExpr, QuotientBySP, SliceExpr, StarMul, eval_stem_many, stem_complex
from .lifts import derived_field, lift_log
from .quaternion import Quaternion

ZERO_REL = 1e-10  # identically-zero threshold, relative to the function scale
BOUNDARY_MARGIN = 1e-8  # zeros this close to the domain boundary are ambiguous
PATCH_CELLS = 4  # removable-singularity patch radius, in grid cells

_CELL_STOP = 1e-6  # subdivision stops at this fraction of the search box
_WIND_START = 32  # boundary samples per cell edge, doubled on demand
_WIND_CAP = 1 << 14
_CUT_RATIOS = (0.5, 0.53, 0.47, 0.57, 0.43, 0.61, 0.39)
_MERGE_TOL = 3e-6  # evaluation noise splits an m-fold zero about this far apart


@dataclass(frozen=True)
class SphereZero:
    """A zero of a slice-preserving function, as an upper-leaf stem point."""

    z: complex
    multiplicity: int


@dataclass(frozen=True)
class ClassifiedZero:
    z: complex
    multiplicity: int  # winding of the symmetrized vectorial part
    kind: str  # "real" | "spherical" | "isolated"
    common_order: int  # common vanishing order of the components (0 when isolated)
    location: Quaternion | None  # the zero point for real / isolated kinds

    def to_json(self) -> dict:
        loc = None if self.location is None else list(self.location.to_array())
        return {
            "z": [self.z.real, self.z.imag],
            "multiplicity": self.multiplicity,
            "kind": self.kind,
            "common_order": self.common_order,
            "location": loc,
        }


@dataclass
class VectorialClassReport:
    """Structure of the vectorial part over a domain."""

    kind: str  # "zero" | "null-symmetrization" | "no-zeros" | "discrete-zeros"
    zeros: list
    vect_scale: float
    sym_scale: float

    def factor_zeros(self) -> list:
        return [zc for zc in self.zeros if zc.kind != "isolated"]

    def residual_zeros(self) -> list:
        """Zeros surviving after the polynomial factor is divided out."""
        out = []
        for zc in self.zeros:
            if zc.kind == "isolated" or zc.multiplicity > 2 * zc.common_order:
                out.append(zc)
        return out

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "zeros": [zc.to_json() for zc in self.zeros],
            "vect_scale": self.vect_scale,
            "sym_scale": self.sym_scale,
        }


# ---------------------------------------------------------------------------
# argument-principle zero finder


class _EdgeZero(Exception):
    """A boundary sample got too close to a zero; the cut must move."""


def _winding(F, x0: float, x1: float, y0: float, y1: float, ftol: float) -> int:
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    n = _WIND_START
    while True:
        ts = np.arange(n) / n
        pts = np.concatenate(
            [a + (b - a) * ts for a, b in zip(corners, corners[1:] + corners[:1])]
        )
        vals = np.asarray(F(pts), dtype=complex)
        mags = np.abs(vals)
        # a zero sits on the contour only if some sample is small against the
        # contour's own range; near a high-order zero the whole contour is
        # small against the global scale, which must not count
        if mags.min() < min(ftol, 1e-9 * mags.max()):
            raise _EdgeZero
        dargs = np.angle(np.roll(vals, -1) / vals)
        if np.max(np.abs(dargs)) < 1.5:
            total = dargs.sum() / (2.0 * np.pi)
            k = round(total)
            if abs(total - k) < 1e-6:
                return k
        if n >= _WIND_CAP:
            raise NoConvergence(
                f"winding count on [{x0},{x1}]x[{y0},{y1}] did not stabilize"
            )
        n *= 2


def _split(F, x0, x1, y0, y1, count, ftol, stop, found):
    if count == 0:
        return
    size = max(x1 - x0, y1 - y0)
    if size <= stop:
        found.append((complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)), count))
        return
    for rx in _CUT_RATIOS:
        xm = x0 + rx * (x1 - x0)
        ym = y0 + rx * (y1 - y0)
        quads = (
            (x0, xm, y0, ym),
            (xm, x1, y0, ym),
            (x0, xm, ym, y1),
            (xm, x1, ym, y1),
        )
        try:
            counts = [_winding(F, *qd, ftol) for qd in quads]
        except (_EdgeZero, NoConvergence):
            continue
        if sum(counts) != count:
            continue
        for qd, c in zip(quads, counts):
            _split(F, *qd, c, ftol, stop, found)
        return
    if size <= 1e4 * stop:
        # a multiple zero flattens the function below the edge tolerance on
        # every candidate cut; the cell is one cluster, Newton refines it
        found.append((complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)), count))
        return
    raise NoConvergence("zeros could not be separated from the subdivision cuts")


def _polish(F, z: complex, mult: int, scale: float) -> complex:
    for _ in range(80):
        delta = 1e-7 * (1.0 + abs(z))
        f0 = complex(np.asarray(F([z]))[0])
        if f0 == 0:
            break
        fp = (complex(np.asarray(F([z + delta]))[0]) - complex(np.asarray(F([z - delta]))[0]))
        fp /= 2.0 * delta
        if fp == 0:
            break
        step = mult * f0 / fp
        z -= step
        if abs(step) <= 1e-15 * (1.0 + abs(z)):
            break
    if abs(complex(np.asarray(F([z]))[0])) > 1e-11 * scale:
        raise NoConvergence(f"zero near {z} did not polish below tolerance")
    return z


def find_zeros_sp(expr: SliceExpr, domain: BasicDomainSpec) -> list[SphereZero]:
    """Zeros of a slice-preserving function over the domain, as upper stem points.

    Raises Vanishing when the function is identically zero, BoundaryZero when
    a zero falls inside the ambiguity band around the domain boundary.
    """
    if not expr.slice_preserving:
        raise SlicePreservingRequired("zero search expects a slice-preserving function")

    def F(zs):
        return stem_complex(expr, np.asarray(zs, dtype=complex))

    scale = float(np.abs(F(domain.node_z)).max())
    if scale <= 1e-300:
        raise Vanishing("cannot locate zeros of the zero function")
    ftol = 1e-12 * scale

    if domain.kind == "slice":
        box = (domain.xmin, domain.xmax, -domain.ymax, domain.ymax)
    else:
        box = (domain.xmin, domain.xmax, domain.ymin, domain.ymax)
    stop = _CELL_STOP * max(box[1] - box[0], box[3] - box[2])

    found: list[tuple[complex, int]] = []
    for attempt in range(6):
        pad = (1e-3 + 2.3e-3 * attempt) * domain.h
        cell = (box[0] - pad, box[1] + pad, box[2] - pad, box[3] + pad)
        try:
            total = _winding(F, *cell, ftol)
            found = []
            _split(F, *cell, total, ftol, stop, found)
            break
        except (_EdgeZero, NoConvergence):
            continue
    else:
        raise BoundaryZero("a zero sits persistently on the search boundary")

    merged: list[tuple[complex, int]] = []
    for z, m in ((_polish(F, z, m, scale), m) for z, m in found):
        for idx, (zp, mp) in enumerate(merged):
            if abs(z - zp) <= _MERGE_TOL * (1.0 + abs(z)):
                merged[idx] = ((zp * mp + z * m) / (mp + m), mp + m)
                break
        else:
            merged.append((z, m))

    zeros: list[SphereZero] = []
    for z, m in merged:
        if abs(z.imag) <= 1e-9 * (1.0 + abs(z)):
            z = complex(z.real, 0.0)
        if z.imag < 0.0:
            continue  # the conjugate stem point carries the same sphere
        dist = float(domain.boundary_dist(z))
        if dist <= -BOUNDARY_MARGIN:
            continue
        if dist < BOUNDARY_MARGIN:
            raise BoundaryZero(f"zero at {z} lies within {dist:.2e} of the domain boundary")
        zeros.append(SphereZero(z, m))
    return zeros


# ---------------------------------------------------------------------------
# classification of the vectorial part


def _component_values(expr: SliceExpr, zs) -> np.ndarray:
    A, B = eval_stem_many(expr, np.asarray(zs, dtype=complex))
    return A[:, 1:] + 1j * B[:, 1:]


def _component_order(expr: SliceExpr, comp: int, z: complex, ftol: float) -> int:
    def F(zs):
        A, B = eval_stem_many(expr, np.asarray(zs, dtype=complex))
        return A[:, comp] + 1j * B[:, comp]

    half = 1e-4 * (1.0 + abs(z))
    for shrink in (1.0, 0.37, 0.11, 2.9):
        r = half * shrink
        try:
            return _winding(F, z.real - r, z.real + r, z.imag - r, z.imag + r, ftol)
        except (_EdgeZero, NoConvergence):
            continue
    raise NoConvergence(f"vanishing order at {z} could not be counted")


def classify_vectorial(g: SliceExpr, domain: BasicDomainSpec) -> VectorialClassReport:
    """Describe the vectorial part of ``g``: identically zero, null
    symmetrization, or a zero set split into real, spherical and isolated kinds."""
    gv = vect_part(g)
    A, B = eval_stem_many(g, domain.node_z)
    full_scale = float(max(np.abs(A).max(), np.abs(B).max()))
    comps = _component_values(gv, domain.node_z)
    comp_sup = np.abs(comps).max(axis=0)
    vect_scale = float(comp_sup.max())

    if vect_scale <= ZERO_REL * (1.0 + full_scale):
        return VectorialClassReport("zero", [], vect_scale, 0.0)

    sym = symmetrization(gv)
    sym_vals = stem_complex(sym, domain.node_z)
    sym_scale = float(np.abs(sym_vals).max())
    if sym_scale <= 1e-12 * (1.0 + vect_scale ** 2):
        if domain.kind == "slice":
            raise ClassificationError(
                "the symmetrized vectorial part cannot vanish identically on a "
                "slice-type domain unless the vectorial part does"
            )
        return VectorialClassReport("null-symmetrization", [], vect_scale, sym_scale)

    live = [i for i in range(3) if comp_sup[i] > ZERO_REL * (1.0 + vect_scale)]
    ftol = 1e-12 * vect_scale
    classified: list[ClassifiedZero] = []
    for sz in find_zeros_sp(sym, domain):
        A1, B1 = eval_stem_many(gv, [sz.z])
        av, bv = A1[0, 1:], B1[0, 1:]
        point_tol = 1e-9 * (1.0 + vect_scale)
        if sz.z.imag == 0.0:
            order = min(_component_order(gv, 1 + i, sz.z, ftol) for i in live)
            classified.append(
                ClassifiedZero(sz.z, sz.multiplicity, "real", order, Quaternion.coerce(sz.z.real))
            )
        elif max(np.abs(av).max(), np.abs(bv).max()) <= point_tol:
            order = min(_component_order(gv, 1 + i, sz.z, ftol) for i in live)
            classified.append(ClassifiedZero(sz.z, sz.multiplicity, "spherical", order, None))
        else:
            qa = Quaternion(0.0, float(av[0]), float(av[1]), float(av[2]))
            qb = Quaternion(0.0, float(bv[0]), float(bv[1]), float(bv[2]))
            axis = -(qa * qb.inverse())
            if abs(axis.w) > 1e-6 or abs(abs(axis) - 1.0) > 1e-6:
                raise ClassificationError(
                    f"zero direction at {sz.z} is not an imaginary unit: {axis}"
                )
            loc = Quaternion.coerce(sz.z.real) + axis * sz.z.imag
            val = Quaternion.from_array(A1[0]) + axis * Quaternion.from_array(B1[0])
            if abs(val) > 1e-8 * (1.0 + vect_scale):
                raise ClassificationError(
                    f"predicted zero point {loc} does not annihilate the vectorial part"
                )
            classified.append(ClassifiedZero(sz.z, sz.multiplicity, "isolated", 0, loc))

    kind = "no-zeros"
    for zc in classified:
        if zc.kind == "isolated" or zc.multiplicity > 2 * zc.common_order:
            kind = "discrete-zeros"
    return VectorialClassReport(kind, classified, vect_scale, sym_scale)


# ---------------------------------------------------------------------------
# polynomial factor and normalization


def factor_minimal(gv: SliceExpr, report: VectorialClassReport, domain: BasicDomainSpec):
    """Divide the maximal real-coefficient polynomial out of the vectorial part.

    Returns (coefficients highest degree first, quotient expression).  The
    quotient is exact at grid nodes away from the factored zeros and patched
    by circle means near them; the product is verified against the input.
    """
    roots: list[complex] = []
    patch: list[complex] = []
    for zc in report.factor_zeros():
        patch.append(zc.z)
        if zc.kind == "real":
            roots += [zc.z] * zc.common_order
        else:
            roots += [zc.z, np.conj(zc.z)] * zc.common_order
    if not roots:
        return np.array([1.0]), gv

    coeffs = np.poly(np.array(roots))
    if np.abs(coeffs.imag).max() > 1e-12 * np.abs(coeffs).max():
        raise FactorResidual("polynomial factor coefficients are not real")
    coeffs = coeffs.real
    quotient = QuotientBySP(gv, tuple(coeffs), tuple(patch), PATCH_CELLS * domain.h)

    lam = np.polyval(coeffs, domain.node_z)
    want = _component_values(gv, domain.node_z)
    got = _component_values(quotient, domain.node_z) * lam[:, None]
    err = np.abs(got - want).max()
    if err > 1e-9 * (1.0 + report.vect_scale):
        raise FactorResidual(f"factored product deviates by {err:.3e}")
    return coeffs, quotient


def normalize(w_tilde: SliceExpr, domain: BasicDomainSpec):
    """Scale a vectorial function to unit symmetrization.

    Requires the symmetrization of ``w_tilde`` to be zero-free on the domain.
    Returns (normalized expression, log field of the symmetrization).
    """
    ws = symmetrization(w_tilde)

    def F(zs):
        return stem_complex(ws, np.asarray(zs, dtype=complex))

    log_field = lift_log(F, domain, name="vector normalizer")
    inv_root = derived_field(log_field, np.exp(-0.5 * log_field.values), "inverse length")
    w = StarMul(w_tilde, GridFieldExpr(inv_root, "inverse length"))

    unit_vals = stem_complex(symmetrization(w), domain.node_z)
    err = np.abs(unit_vals - 1.0).max()
    if err > 1e-10:
        raise FactorResidual(f"normalized vector has symmetrization 1 + O({err:.3e})")
    return w, log_field


def linearly_dependent(
    e1: SliceExpr, e2: SliceExpr, domain: BasicDomainSpec, tol: float = 1e-9
) -> bool:
    """Whether two vectorial functions are pointwise proportional on the domain.

    Proportionality of the holomorphic component triples is tested through
    their two-by-two minors on the grid, so a varying slice-preserving ratio
    still counts as dependent.
    """
    c1 = _component_values(vect_part(e1), domain.node_z)
    c2 = _component_values(vect_part(e2), domain.node_z)
    s1 = float(np.abs(c1).max())
    s2 = float(np.abs(c2).max())
    if s1 <= 1e-300 or s2 <= 1e-300:
        return True
    worst = 0.0
    for a, b in ((0, 1), (0, 2), (1, 2)):
        minor = c1[:, a] * c2[:, b] - c1[:, b] * c2[:, a]
        worst = max(worst, float(np.abs(minor).max()))
    return worst <= tol * s1 * s2
