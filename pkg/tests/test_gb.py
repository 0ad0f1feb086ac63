import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from portrait_lab.combinat import enumerate_admissible_pairs
from portrait_lab.gb import (
    Budget,
    BudgetExceeded,
    GroebnerBasis,
    Ideal,
    buchberger,
    degree_zero_dimensional,
    dimension,
    normal_form,
    s_polynomial,
    saturate,
    saturate_many,
)
from portrait_lab.moduli import moduli_ideal
from portrait_lab.poly import Ring

R2 = Ring(["x", "y"])
R3 = Ring(["x", "y", "z"])


def assert_reduced_groebner(gb: GroebnerBasis):
    basis = gb.basis
    for g in basis:
        assert g.lc() == 1
    for i, f in enumerate(basis):
        for j, g in enumerate(basis):
            if j > i:
                assert normal_form(s_polynomial(f, g), gb).is_zero()
    leads = gb.leading_exponents()
    for i, f in enumerate(basis):
        others = [le for j, le in enumerate(leads) if j != i]
        # no term of f (leading or tail) is divisible by another leading monomial
        for ex, _ in f.items():
            assert not any(all(a >= b for a, b in zip(ex, le)) for le in others)


# -- examples ------------------------------------------------------------------


def test_buchberger_examples():
    x, y = R2.gens()
    gb = buchberger(Ideal(R2, [x**2 - 1, y - x]))
    assert set(gb.lines()) == {"x - y", "y^2 - 1"} or set(gb.lines()) == {"y - x", "x^2 - 1"}
    assert dimension(gb) == 0 and degree_zero_dimensional(gb) == 2
    assert_reduced_groebner(gb)
    unit = buchberger(Ideal(R2, [x, x - 1]))
    assert unit.is_unit() and dimension(unit) == -1


def test_buchberger_requires_variables():
    with pytest.raises(ValueError):
        buchberger(Ideal(Ring([]), []))


def test_normal_form_examples():
    x, y = R2.gens()
    gb = buchberger(Ideal(R2, [x]))
    assert normal_form(x + y, gb) == y
    assert normal_form(R2.one(), buchberger(Ideal(R2, [R2.one()]))).is_zero()
    gens = [x**2 * y - 1, x * y**2 - x]
    gb = buchberger(Ideal(R2, gens))
    assert all(gb.contains(g) for g in gens)


def test_dimension_and_degree_examples():
    x, y, z = R3.gens()
    assert dimension(buchberger(Ideal(R3, []))) == 3
    R1 = Ring(["x"])
    (t,) = R1.gens()
    assert degree_zero_dimensional(buchberger(Ideal(R1, [t - 5]))) == 1
    assert degree_zero_dimensional(buchberger(Ideal(R1, [t**2]))) == 2
    assert dimension(buchberger(Ideal(R3, [x * y, z]))) == 1
    with pytest.raises(ValueError):
        degree_zero_dimensional(buchberger(Ideal(R3, [x])))


def test_saturation_examples():
    x, y = R2.gens()
    sat = saturate(Ideal(R2, [x * y]), x)
    assert sat.groebner() == buchberger(Ideal(R2, [y]))
    assert saturate(Ideal(R2, [x**2]), x).groebner().is_unit()
    base = Ideal(R2, [x**2 - y, x * y - 1])
    assert saturate(base, R2.one()).groebner() == base.groebner()
    with pytest.raises(ValueError):
        saturate(base, R2.zero())


def test_saturation_removes_component():
    x, y = R2.gens()
    # V = {x = 0} union {(1, 1)}; saturating by x keeps only the point
    ideal = Ideal(R2, [x * (x - 1), x * (y - 1)])
    sat = saturate(ideal, x).groebner()
    assert sat == buchberger(Ideal(R2, [x - 1, y - 1]))


def test_ideal_content_stripping_and_mismatch():
    x, y = R2.gens()
    ideal = Ideal(R2, [x.scale(6) - y.scale(4), R2.zero(), x.scale(3) - y.scale(2)])
    assert len(ideal.generators) == 1
    assert str(ideal.generators[0]) == "3*x - 2*y"
    with pytest.raises(ValueError):
        Ideal(R2, [R3.gen("x")])


def test_budget_exceeded():
    rng = Ring([f"x{i}" for i in range(5)])
    v = rng.gens()
    # cyclic-5, far beyond a microsecond budget
    gens = []
    for k in range(1, 5):
        acc = rng.zero()
        for i in range(5):
            term = rng.one()
            for j in range(k):
                term = term * v[(i + j) % 5]
            acc = acc + term
        gens.append(acc)
    gens.append(v[0] * v[1] * v[2] * v[3] * v[4] - 1)
    with pytest.raises(BudgetExceeded):
        buchberger(Ideal(rng, gens), budget=Budget(1e-6))


def test_budget_reads_environment(monkeypatch):
    monkeypatch.setenv("PORTRAIT_LAB_BUDGET_MS", "250")
    assert Budget().deadline is not None
    monkeypatch.setenv("PORTRAIT_LAB_BUDGET_MS", "")
    assert Budget().deadline is None


# -- properties ------------------------------------------------------------------


def small_polys(ring, max_deg=2):
    monos = [e for e in product(range(max_deg + 1), repeat=ring.nvars) if sum(e) <= max_deg]
    return st.dictionaries(st.sampled_from(monos), st.integers(-3, 3), min_size=1, max_size=4).map(
        lambda d: ring.from_terms({m: c for m, c in d.items() if c})
    )


@settings(max_examples=40)
@given(st.lists(small_polys(R3), min_size=1, max_size=3))
def test_random_bases_are_reduced_groebner(gens):
    ideal = Ideal(R3, gens)
    gb = buchberger(ideal)
    assert_reduced_groebner(gb)
    for g in ideal.generators:
        assert gb.contains(g)


@settings(max_examples=25)
@given(st.lists(small_polys(R2), min_size=1, max_size=3), small_polys(R2, 1))
def test_saturation_idempotent(gens, f):
    if f.is_zero():
        return
    once = saturate(Ideal(R2, gens), f)
    twice = saturate(once, f)
    assert once.groebner() == twice.groebner()
    assert_reduced_groebner(once.groebner())
    # the saturation contains the ideal
    assert all(once.groebner().contains(g) for g in Ideal(R2, gens).generators)


@pytest.mark.parametrize("seed", range(8))
def test_finite_point_set_degree(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 4)
    pts = set()
    while len(pts) < k:
        pts.add((rng.randint(-4, 4), rng.randint(-4, 4)))
    pts = sorted(pts)
    x, y = R2.gens()
    # product of the maximal ideals of the points: all products choosing one linear form per point
    gens = []
    for choice in product((0, 1), repeat=k):
        g = R2.one()
        for (a, b), c in zip(pts, choice):
            g = g * (x - a if c == 0 else y - b)
        gens.append(g)
    gb = buchberger(Ideal(R2, gens))
    assert_reduced_groebner(gb)
    assert dimension(gb) == 0
    assert degree_zero_dimensional(gb) == k


def test_grid_point_set_degree():
    x, y, z = R3.gens()
    gens = [(x - 1) * (x - 2), y * (y + 1) * (y - 3), z - x - y]
    gb = buchberger(Ideal(R3, gens))
    assert degree_zero_dimensional(gb) == 6


def _corpus():
    pairs = list(enumerate_admissible_pairs(4, 2))
    return pairs[::15][:50]


def test_order_independence_on_quadratic_corpus():
    corpus = _corpus()
    assert len(corpus) == 50
    seen_dims = set()
    for pc in corpus:
        ideal = moduli_ideal(pc.p, pc.q, 2)
        g1 = buchberger(ideal, "degrevlex")
        g2 = buchberger(ideal, "lex")
        assert_reduced_groebner(g1)
        assert_reduced_groebner(g2)
        assert dimension(g1) == dimension(g2)
        if dimension(g1) == 0:
            assert degree_zero_dimensional(g1) == degree_zero_dimensional(g2)
        seen_dims.add(dimension(g1))
    assert {-1, 0} <= seen_dims


def test_sequential_saturation_matches_product():
    ring = Ring(["q3", "q4"])
    q3, q4 = ring.gens()
    gens = [q3 * (q3 - 1) * (q4 - 2), q4 * (q4 - q3) * (q3 - 2)]
    factors = [q3, q3 - 1, q4, q4 - 1, q4 - q3]
    prod = ring.one()
    for f in factors:
        prod = prod * f
    seq = saturate_many(Ideal(ring, gens), factors).groebner()
    whole = saturate(Ideal(ring, gens), prod).groebner()
    assert seq == whole
