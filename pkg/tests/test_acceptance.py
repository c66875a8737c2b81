"""Acceptance gate: one pass/fail line per criterion, printed unbuffered.

Each test covers one numbered criterion of the package contract and prints
ACCEPTANCE <n>: PASS/FAIL even under pytest output capture.
"""

from __future__ import annotations

import contextlib
import math
import time

import numpy as np
import pytest

from starlog.algebra import scalar_part, symmetrization, vect_part
from starlog.branches import mu, mu_inv
from starlog.cli import EXP_CORPUS
from starlog.domain import BasicDomainSpec
from starlog.errors import BranchPointHit, ConditionFailed
from starlog.expr import (
    Neg,
    ScalarApply,
    StarMul,
    StarSeries,
    const,
    eval_many,
    evaluate,
    stem_complex,
)
from starlog.logarithm import log_star
from starlog.parse import parse_expr, to_source
from starlog.quaternion import VERIFY_UNITS, Quaternion
from starlog.starexp import exp_star
from starlog.vectorial import classify_vectorial, factor_minimal, find_zeros_sp, linearly_dependent

ISOLATED = "-1 + q^2*i + 1.4142135623730951*q*j + k"


@pytest.fixture(scope="module")
def slice_rect():
    return BasicDomainSpec(rects=[(-1.2, 1.2, 0.0, 1.0)], kind="slice")


@pytest.fixture(scope="module")
def product_rect():
    return BasicDomainSpec(rects=[(0.5, 1.5, 0.3, 1.0)], kind="product")


@pytest.fixture(scope="module")
def ball_leaf():
    return BasicDomainSpec(discs=[(0.0, 0.0, 1.1)], kind="slice")


@pytest.fixture(scope="module")
def product_disc():
    return BasicDomainSpec(discs=[(0.0, 1.0, 0.3)], kind="product")


@pytest.fixture
def announce(capsys):
    def emit(line: str) -> None:
        with capsys.disabled():
            print(line)

    return emit


@contextlib.contextmanager
def criterion(announce, number: int, label: str):
    try:
        yield
    except BaseException:
        announce(f"ACCEPTANCE {number}: FAIL - {label}")
        raise
    announce(f"ACCEPTANCE {number}: PASS - {label}")


def sup_rel(got: np.ndarray, want: np.ndarray) -> float:
    num = np.linalg.norm(got - want, axis=-1)
    den = 1.0 + np.linalg.norm(want, axis=-1)
    return float((num / den).max())


def sup_diff(f, g, domain) -> float:
    worst = 0.0
    for unit in VERIFY_UNITS:
        a = eval_many(f, domain.node_z, unit)
        b = eval_many(g, domain.node_z, unit)
        worst = max(worst, float(np.linalg.norm(a - b, axis=1).max()))
    return worst


def test_acceptance_1_exp_identities(announce, slice_rect, product_rect, ball_leaf):
    with criterion(announce, 1, "exp identity suite on 3 domains x 3 slices"):
        for domain in (slice_rect, product_rect, ball_leaf):
            zs = domain.node_z
            assert zs.size >= 1000
            for src in EXP_CORPUS:
                f = parse_expr(src)
                closed = exp_star(f)
                series = StarSeries("exp", f)
                inverse = StarMul(closed, exp_star(Neg(f)))
                for unit in VERIFY_UNITS:
                    want = eval_many(closed, zs, unit)
                    assert sup_rel(eval_many(series, zs, unit), want) <= 1e-10
                    got = eval_many(inverse, zs, unit)
                    one = np.zeros_like(got)
                    one[:, 0] = 1.0
                    assert sup_rel(got, one) <= 1e-10
                sym = stem_complex(symmetrization(closed), zs)
                target = np.exp(2.0 * stem_complex(scalar_part(f), zs))
                assert float((np.abs(sym - target) / (1.0 + np.abs(target))).max()) <= 1e-10


def test_acceptance_2_nilpotent_example(announce, product_rect):
    with criterion(announce, 2, "exp of the nilpotent vector is 1 + itself; log round trip"):
        psi = parse_expr("I*i + j")
        image = exp_star(psi)
        affine = parse_expr("1 + I*i + j")
        assert sup_diff(image, affine, product_rect) <= 1e-12

        g = parse_expr("q + I*i + j")
        result = log_star(g, product_rect)
        assert result.case == "null-vector"
        assert result.residual <= 1e-9
        closed = parse_expr("log0(q)") + StarMul(psi, ScalarApply("recip", parse_expr("q")))
        assert sup_diff(result.f, closed, product_rect) <= 1e-9


def test_acceptance_3_mu_branches(announce):
    with criterion(announce, 3, "mu covering inverses on branches -2..2"):
        rng = np.random.default_rng(11)
        n = 1000
        for k in range(-2, 3):
            radius = rng.uniform(0.2, 3.0, n)
            theta = rng.uniform(0.05, math.pi - 0.05, n) * rng.choice([-1.0, 1.0], n)
            ws = radius * np.exp(1j * theta)
            back = mu(mu_inv(ws, k))
            assert float((np.abs(back - ws) / (1.0 + np.abs(ws))).max()) <= 1e-11
        assert abs(complex(mu(0.0)) - 1.0) <= 1e-14
        step = 1e-6
        slope = (complex(mu(step)) - 1.0) / step
        assert abs(slope + 0.5) <= 1e-6


def test_acceptance_4_constants(announce, product_rect):
    with criterion(announce, 4, "constant logs across branches with parity"):
        ci = parse_expr("i")
        one = parse_expr("1")
        minus = parse_expr("-1")
        for n in (0, 1, 2):
            result = log_star(one, product_rect, (0, 2 * n), rep=ci)
            expected = np.zeros(4)
            expected[1] = 2.0 * math.pi * n
            for unit in VERIFY_UNITS:
                vals = eval_many(result.f, product_rect.node_z, unit)
                assert float(np.abs(vals - expected).max()) <= 1e-12
        for n in (-1, 0, 1):
            result = log_star(minus, product_rect, (0, 2 * n), rep=ci)
            expected = np.zeros(4)
            expected[1] = (2.0 * n + 1.0) * math.pi
            for unit in VERIFY_UNITS:
                vals = eval_many(result.f, product_rect.node_z, unit)
                assert float(np.abs(vals - expected).max()) <= 1e-12
        with pytest.raises(ConditionFailed):
            log_star(one, product_rect, (0, 1), rep=ci)
        with pytest.raises(ConditionFailed):
            log_star(minus, product_rect, (1, 2), rep=ci)


def test_acceptance_5_positive_trace(announce, slice_rect):
    with criterion(announce, 5, "slice-preserving log under the positive trace condition"):
        g = parse_expr("2.0 + q^2")
        result = log_star(g, slice_rect)
        assert result.case == "scalar"
        assert result.residual <= 1e-9
        assert result.f.slice_preserving
        want = np.log(stem_complex(g, slice_rect.node_z))
        got = stem_complex(result.f, slice_rect.node_z)
        assert float(np.abs(got - want).max()) <= 1e-9

        with pytest.raises(ConditionFailed) as err:
            log_star(parse_expr("-2.0 - q^2"), slice_rect)
        assert err.value.condition == "cond1"


def test_acceptance_6_angle_roundtrip(announce, product_rect):
    with criterion(announce, 6, "angle-lift round trips recover the exponent"):
        for src in ("q*i", "(2.0 + q^2)*j"):
            f = parse_expr(src)
            result = log_star(exp_star(f), product_rect)
            assert result.case == "angle"
            assert result.residual <= 1e-9
            assert sup_diff(result.f, f, product_rect) <= 1e-9
            assert result.diagnostics["lift_validity"] <= 1e-10


def test_acceptance_7_branch_point_obstruction(announce, ball_leaf, product_disc):
    with criterion(announce, 7, "fold obstruction on the ball, local fold log near the zero"):
        start = time.monotonic()
        g = parse_expr(ISOLATED)

        lo = min(
            float(np.linalg.norm(eval_many(g, ball_leaf.node_z, unit), axis=1).min())
            for unit in VERIFY_UNITS
        )
        assert lo > 0.0

        wide = BasicDomainSpec(rects=[(-1.3, 1.3, 0.0, 1.3)], kind="slice")
        spheres = find_zeros_sp(symmetrization(g), wide)
        assert len(spheres) == 2
        for sphere in spheres:
            assert abs(abs(sphere.z) - 2.0 ** 0.25) <= 1e-8

        z0 = Quaternion(0.0, -1.0, 0.0, -1.0) / math.sqrt(2.0)
        assert abs(evaluate(vect_part(g), z0)) <= 1e-9

        with pytest.raises(BranchPointHit):
            log_star(g, ball_leaf)

        result = log_star(g, product_disc)
        assert result.case == "fold"
        assert result.residual <= 1e-8
        assert result.diagnostics["sqrt_sign"] == -1.0
        assert time.monotonic() - start < 300.0


def poly_expr(coeffs):
    q = parse_expr("q")
    tree = const(float(coeffs[0]))
    for c in coeffs[1:]:
        tree = tree * q + const(float(c))
    return tree


def test_acceptance_8_vectorial_analysis(announce, product_disc):
    tall = BasicDomainSpec(rects=[(-1.2, 1.2, 0.0, 1.25)], kind="slice")
    with criterion(announce, 8, "vectorial factorization and dependence tests"):
        # factor out spherical and real zeros, exactly and idempotently
        for src, factor_degree in (
            ("(1.0 + q^2)*i", 2),
            ("q*j", 1),
            ("(q + q^3)*k", 3),
        ):
            gv = parse_expr(src)
            shape = classify_vectorial(gv, tall)
            coeffs, quotient = factor_minimal(gv, shape, tall)
            assert len(coeffs) - 1 == factor_degree
            rebuilt = StarMul(poly_expr(coeffs), quotient)
            assert sup_diff(rebuilt, gv, tall) <= 1e-10 * (1.0 + shape.vect_scale)
            shape2 = classify_vectorial(quotient, tall)
            coeffs2, quotient2 = factor_minimal(quotient, shape2, tall)
            assert list(coeffs2) == [1.0]
            assert quotient2 is quotient

        # the vectorial part of the counterexample has no common factor
        gv = vect_part(parse_expr(ISOLATED))
        shape = classify_vectorial(gv, product_disc)
        assert shape.kind == "discrete-zeros"
        assert all(z.kind == "isolated" for z in shape.zeros)
        assert all(z.common_order == 0 for z in shape.zeros)
        coeffs, quotient = factor_minimal(gv, shape, product_disc)
        assert list(coeffs) == [1.0] and quotient is gv

        # spherical-vs-isolated on constructed cases
        cases = [
            ("(1.0 + q^2)*i", "spherical"),
            ("((1.0 + q^2)^2)*k", "spherical"),
            ("q*i", "real"),
            ("(q + q^3)*j", "spherical"),  # also has the real zero
            ("q^2*i + 1.4142135623730951*q*j + k", "isolated"),
            ("(2.0 + q^2)*i", None),  # stays clear of the domain
        ]
        for src, kind in cases:
            shape = classify_vectorial(parse_expr(src), tall)
            kinds = {z.kind for z in shape.zeros}
            if kind is None:
                assert not shape.zeros
            else:
                assert kind in kinds

        # linear dependence over the slice-preserving ring, 20 labeled pairs
        pairs = [
            ("i", "2.0*i", True),
            ("j", "q*j", True),
            ("q*i", "q^2*i", True),
            ("q*i + j", "(2.0 + q^2)*(q*i + j)", True),
            ("i + j", "3.0*i + 3.0*j", True),
            ("q^2*k", "0.5*q^4*k", True),
            ("(1.0 + q^2)*i", "i", True),
            ("q*i - j", "(q^3)*i - q^2*j", True),
            ("k", "k", True),
            ("(0.1 + q)*j", "(0.2 + 2.0*q)*j", True),
            ("i", "j", False),
            ("q*i", "j", False),
            ("i + j", "i - j", False),
            ("q*i", "q*j", False),
            ("q*i + j", "q*j + i", False),
            ("i + q*j", "i + q*k", False),
            ("q^2*i + k", "q^2*i + j", False),
            ("i + j + k", "i + j - k", False),
            ("q*i + q^2*j", "q^2*i + q*j", False),
            ("q^2*i + 1.4142135623730951*q*j + k", "q*i", False),
        ]
        assert len(pairs) == 20
        for left, right, expected in pairs:
            got = linearly_dependent(parse_expr(left), parse_expr(right), tall)
            assert got is expected, (left, right)


PARSE_CORPUS = [
    "q",
    "I",
    "i",
    "j",
    "k",
    "2.0",
    "0.5",
    "-q",
    "q + i",
    "q - i",
    "q*i",
    "q^2",
    "q^0",
    "-q^2",
    "(q + 1.0)^3",
    "q^2*i + 1.5*j",
    "-1.0 + q^2*i + 1.4142135623730951*q*j + k",
    "I*i + j",
    "q + I*i + j",
    "q*i - i*q",
    "i*j - j*i",
    "-(q*i)",
    "-q*i",
    "(1.0 + q)*(1.0 - q)",
    "q - -q",
    "conj(q)",
    "conj(q + i)",
    "scalar(q*i + 1.0)",
    "vect(q*i + 1.0)",
    "symm(q*i)",
    "exp(q)",
    "exp(0.5*q^2 + 1.0)",
    "log0(2.0 + q^2)",
    "sqrt(2.0 + q^2)",
    "mu(q^2)",
    "nu(q^2)",
    "cos(q)",
    "sin(q)",
    "mu(q^2)*nu(q^2)",
    "exp(scalar(q*i + 0.5))",
    "2.0*I*i",
    "q^2 - 2.0*q + 1.0",
    "(q - i)*(q + i)",
    "1.4142135623730951*q*j",
    "symm(vect(q*i + j))",
    "-(q + 1.0)^2",
    "q*(q*(q*i))",
    "0.25*q^2*i - 0.5*q*j",
    "conj(0.3*q)*i + 0.1",
    "exp(q)*exp(-q)",
]


def test_acceptance_9_parser_roundtrip(announce):
    with criterion(announce, 9, "parser corpus round trips byte-identically"):
        assert len(PARSE_CORPUS) == 50
        for src in PARSE_CORPUS:
            tree = parse_expr(src)
            printed = to_source(tree)
            again = parse_expr(printed)
            assert again == tree, src
            assert to_source(again) == printed, src
