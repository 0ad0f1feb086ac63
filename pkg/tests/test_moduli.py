import json
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from portrait_lab.combinat import PairClass, Portrait, admissible_portraits, canonical_pair
from portrait_lab.exact import rational
from portrait_lab.gb import Ideal, buchberger, dimension, saturate_many
from portrait_lab.interp import MODULI_NORMALIZATION, diagonal_factors, two_image_ideal
from portrait_lab.moduli import (
    ModuliReport,
    analyze_pair,
    analyze_single,
    moduli_ideal,
    two_image_analyze,
    two_image_portraits,
)

P = Portrait((1, 2, 2, 1))
Q1 = Portrait((1, 2, 1, 2))
Q2 = Portrait((1, 1, 2, 4))
Q3 = Portrait((2, 1, 1, 2))


def test_worked_example_dimensions():
    assert analyze_pair(P, Q1, 2).dim == -1
    r2 = analyze_pair(P, Q2, 2)
    assert (r2.dim, r2.degree) == (0, 1)
    r3 = analyze_pair(P, Q3, 2)
    assert r3.dim == 1 and r3.degree is None


def test_worked_example_point():
    gb = moduli_ideal(P, Q2, 2).groebner()
    R = gb.ring
    assert gb.basis == buchberger(Ideal(R, [R.parse("q3 - 2"), R.parse("q4 - 3")])).basis


def test_empty_example_is_unit():
    assert moduli_ideal(P, Q1, 2).groebner().is_unit()


def test_moduli_ideal_errors():
    with pytest.raises(ValueError):
        moduli_ideal(Portrait((1, 1)), None, 2)
    with pytest.raises(ValueError):
        moduli_ideal(P, Portrait((1, 1, 1)), 2)
    with pytest.raises(ValueError):
        moduli_ideal(P, Q2, -1)


def test_exact_degree_variant_is_contained():
    # inverting the leading coefficients can only shrink the space
    for q in (Q2, Q3):
        loose = analyze_pair(P, q, 2)
        strict = analyze_pair(P, q, 2, exact_degree=True)
        assert strict.dim <= loose.dim


# -- two-image -------------------------------------------------------------------------


@pytest.mark.parametrize("d,expected_dim", [(1, 0), (2, 1), (3, 2)])
def test_two_image_dimension_and_count(d, expected_dim):
    partition = [list(range(1, d + 1)), list(range(d + 1, 2 * d + 1))]
    report, count = two_image_analyze(partition)
    assert report.dim == expected_dim
    assert count == 2 * d * (2 * d - 1)


@pytest.mark.parametrize("d", [2, 3])
def test_two_image_coherence(d):
    partition = [list(range(1, d + 1)), list(range(d + 1, 2 * d + 1))]
    portraits = two_image_portraits(partition)
    assert len(portraits) == len(set(portraits)) == 2 * d * (2 * d - 1)
    n = 2 * d
    reference = saturate_many(
        Ideal(moduli_ideal(portraits[0], None, d).ring, two_image_ideal(partition, MODULI_NORMALIZATION)),
        diagonal_factors(n, MODULI_NORMALIZATION),
    ).groebner()
    for p in portraits:
        assert moduli_ideal(p, None, d).groebner() == reference


def test_two_image_quadratic_example():
    gb = moduli_ideal(Portrait((3, 3, 4, 4)), None, 2).groebner()
    assert gb.lines() == ["q3 + q4 - 1"]
    assert dimension(gb) == 1


def test_two_image_rejects_bad_partition():
    with pytest.raises(ValueError):
        two_image_analyze([[1, 2], [3]])


# -- admissibility bound --------------------------------------------------------------


@pytest.mark.parametrize("n,d", [(3, 2), (4, 2)])
def test_single_portrait_dimension_bound(n, d):
    for p in admissible_portraits(n, d):
        if p == Portrait.identity(n):
            continue
        assert analyze_single(p, d).dim == d - 1


def test_single_portrait_dimension_bound_cubic_sample():
    rng = random.Random(2)
    ps = [p for p in admissible_portraits(5, 3) if p != Portrait.identity(5)]
    for p in rng.sample(ps, 300):
        assert analyze_single(p, 3).dim == 2


# -- survey-wide properties -------------------------------------------------------------


def test_obstruction_soundness(quadratic_survey):
    _, reports = quadratic_survey
    assert len(reports) == 780
    flagged = [r for r in reports if r.obstruction is not None]
    assert flagged
    assert all(r.dim == -1 for r in flagged)


def test_report_invariants(quadratic_survey):
    _, reports = quadratic_survey
    for r in reports:
        assert r.status == "ok"
        assert -1 <= r.dim <= 1
        assert (r.degree is not None) == (r.dim == 0)
        if r.degree is not None:
            assert r.degree >= 1


def test_fast_mode_agrees(quadratic_survey):
    _, reports = quadratic_survey
    for r in reports[:200]:
        if r.obstruction is None:
            continue
        pc = PairClass.from_key(r.key)
        fast = analyze_pair(pc.p, pc.q, 2, fast=True)
        assert (fast.dim, fast.fingerprint) == (r.dim, r.fingerprint)


def _interpolant_degree(xs, ys):
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        # Lagrange basis polynomial for node i, expanded
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xs[j] * basis[k + 1]
            denom *= xs[i] - xs[j]
        for k in range(n):
            coeffs[k] += ys[i] * basis[k] / denom
    nz = [k for k, c in enumerate(coeffs) if c != 0]
    return max(nz) if nz else 0


def _rational_points(gb):
    """Rational points of a zero-dimensional ideal in (q3, q4), found numerically then checked exactly."""
    lex = buchberger(gb.ideal(), "lex")
    univ = [g for g in lex.basis if all(ex[0] == 0 for ex, _ in g.items())]
    assert univ, "lex basis of a zero-dimensional ideal has a univariate element"

    def roots(poly, var):
        deg = max(ex[var] for ex, _ in poly.items())
        coeffs = [0.0] * (deg + 1)
        for ex, c in poly.items():
            coeffs[deg - ex[var]] += float(c)
        if deg == 0:
            return []
        return [Fraction(complex(r).real).limit_denominator(1000) for r in np.roots(coeffs) if abs(complex(r).imag) < 1e-7]

    pts = set()
    for b in roots(univ[0], 1):
        for g in lex.basis:
            sub = g.substitute({"q4": str(b.numerator) + "/" + str(b.denominator)})
            if sub.is_zero() or sub.is_constant():
                continue
            for a in roots(sub, 0):
                val = {"q3": f"{a.numerator}/{a.denominator}", "q4": f"{b.numerator}/{b.denominator}"}
                if all(h.evaluate({k: rational(v) for k, v in val.items()}) == 0 for h in lex.basis):
                    pts.add((a, b))
            break
    return pts


def test_point_verification_oracle(quadratic_survey):
    _, reports = quadratic_survey
    verified = 0
    for r in reports:
        if r.dim != 0:
            continue
        pc = PairClass.from_key(r.key)
        gb = moduli_ideal(pc.p, pc.q, 2).groebner()
        for a, b in _rational_points(gb):
            xs = [Fraction(0), Fraction(1), a, b]
            assert len(set(xs)) == 4
            for portrait in (pc.p, pc.q):
                ys = [xs[v - 1] for v in portrait.map]
                assert _interpolant_degree(xs, ys) <= 2
            verified += 1
    assert verified >= 50


def test_relabeling_invariance_random_samples():
    rng = random.Random(17)
    adm = admissible_portraits(4, 2)
    for _ in range(100):
        p, q = rng.sample(adm, 2)
        sigma = list(range(1, 5))
        rng.shuffle(sigma)
        a = analyze_pair(p, q, 2)
        b = analyze_pair(p.conjugate(sigma), q.conjugate(sigma), 2)
        assert (a.dim, a.degree, a.obstruction, a.key) == (b.dim, b.degree, b.obstruction, b.key)


def test_report_json_round_trip():
    r = analyze_pair(P, Q2, 2)
    line = r.to_line()
    back = ModuliReport.from_json(json.loads(line))
    assert back == r
    assert set(json.loads(line)) == {"key", "d", "obstruction", "dim", "degree", "fingerprint", "ms", "status"}
    assert r.key == canonical_pair(P, Q2).canonical_key


def test_budget_timeout_is_flagged():
    r = analyze_pair(Portrait((1, 3, 4, 5, 6, 2)), Portrait((2, 5, 3, 1, 6, 4)), 3, budget_ms=50)
    assert r.timed_out and r.dim is None and r.status == "timeout"


def test_budget_overrun_is_small():
    # a pair whose reductions carry very large coefficients
    pc = PairClass.from_key("1,1,2,2,3,3|5,5,4,4,2,2")
    t = time.perf_counter()
    r = analyze_pair(pc.p, pc.q, 3, budget_ms=3000)
    assert r.timed_out
    assert time.perf_counter() - t < 6
