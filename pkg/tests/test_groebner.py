"""Buchberger engine against brute-force and independent oracles."""

from itertools import combinations

import pytest

from lmverify.groebner import (Budget, BudgetExceeded, Ideal, MonomialIdeal, dimension, eliminate,
                               failing_s_pairs, format_ideal, groebner, ideal_equal, ideal_intersect,
                               initial_ideal, interreduce, is_groebner, is_squarefree, parse_ideal,
                               reduce, s_polynomial)
from lmverify.poly_core import GF, PolyRing, var

V = [var("x", i) for i in range(1, 5)]


def ring(order="grevlex", field=None):
    return PolyRing(V, order) if field is None else PolyRing(V, order, field)


def test_cyclic_like_system_matches_sympy():
    sympy = pytest.importorskip("sympy")
    R = ring("grevlex")
    gens = [R("x_1 + x_2 + x_3"), R("x_1*x_2 + x_2*x_3 + x_3*x_1"), R("x_1*x_2*x_3 - 1")]
    G = groebner(gens, R)
    s = sympy.symbols("x_1 x_2 x_3 x_4")
    ref = sympy.groebner([sympy.sympify(str(g).replace("^", "**")) for g in gens], *s, order="grevlex")
    mine = sorted(str(g).replace("^", "**").replace(" ", "") for g in G)
    theirs = sorted(str(sympy.expand(p / sympy.Poly(p, *s).LC(order="grevlex"))).replace(" ", "")
                    for p in ref.exprs)
    assert len(mine) == len(theirs)
    for a, b in zip(mine, theirs):
        assert sympy.expand(sympy.sympify(a) - sympy.sympify(b)) == 0


def test_reduced_basis_properties(rng):
    R = ring("lex")
    for _ in range(5):
        gens = [sum((R.var(V[rng.randrange(3)]) * R.var(V[rng.randrange(3)]) * rng.randint(-2, 2)
                     for _ in range(3)), R.zero()) + rng.randint(0, 1) for _ in range(3)]
        G = groebner(gens, R)
        assert is_groebner(G)
        assert all(g.lc() == 1 for g in G)
        for g, h in combinations(G, 2):       # no LM divides another
            assert not R.divides(g.lm(), h.lm()) and not R.divides(h.lm(), g.lm())
        I = Ideal(gens, R)
        assert all(I.contains(f) for f in gens)


def test_membership_oracle_by_explicit_cofactors(rng):
    R = ring()
    g = [R("x_1^2 - x_2"), R("x_2*x_3 - x_4")]
    I = Ideal(g, R)
    for _ in range(10):
        h = [R(f"{rng.randint(-3, 3)}*x_{rng.randint(1, 4)} + {rng.randint(-2, 2)}") for _ in g]
        assert I.contains(h[0] * g[0] + h[1] * g[1])
    # x_1 - 1 vanishes at (1,1,1,1) but not on the whole variety: (−1, 1, 1, 1) is also a point
    assert not I.contains(R("x_1 - 1"))


def test_unit_ideal_and_empty_list():
    R = ring()
    assert groebner([R("x_1"), R("x_1 + 1")], R) == [R.one()]
    assert Ideal([R("x_1 - 1"), R("x_1 + 1")], R).is_unit()
    assert groebner([], R) == []


def test_s_polynomial_and_reduce():
    R = ring("lex")
    f, g = R("x_1^2 - x_2"), R("x_1*x_2 - 1")
    s = s_polynomial(f, g)
    assert s == R("-x_2^2 + x_1")
    assert reduce(s, [f, g]) == s - R("x_1") + R("x_1")   # nothing reduces the pure-x_2 tail
    assert failing_s_pairs([f, g])


def test_interreduce_agrees_with_groebner_on_a_basis():
    R = ring("lex")
    G = groebner([R("x_1^2 - x_2"), R("x_1*x_2 - x_3")], R)
    noisy = G + [G[0] * R("x_4") + G[-1]]
    assert interreduce(noisy) == G


def test_ideal_equality_requires_same_ring():
    R = ring()
    assert ideal_equal(Ideal([R("x_1"), R("x_2")], R), Ideal([R("x_1 + x_2"), R("x_2")], R))
    with pytest.raises(ValueError):
        ideal_equal(Ideal([R("x_1")], R), Ideal([ring("lex")("x_1")], ring("lex")))


def test_intersection_of_monomial_ideals_is_lcm():
    R = ring()
    I = Ideal([R("x_1^2"), R("x_2")], R)
    J = Ideal([R("x_1*x_3"), R("x_2^3")], R)
    K = ideal_intersect(I, J)
    expected = Ideal([R("x_1^2*x_3"), R("x_1*x_2*x_3"), R("x_2^3")], R)
    assert ideal_equal(K, expected)


def test_elimination_recovers_implicit_equation():
    # twisted cubic: (t, t^2, t^3) -> x_2 - x_1^2, x_3 - x_1 x_2, ...
    T = var("t")
    R = PolyRing([T] + V[:3], "grevlex")
    I = Ideal([R("x_1 - t"), R("x_2 - t^2"), R("x_3 - t^3")], R)
    E = eliminate(I, [T])
    S = E.ring
    ref = Ideal([S("x_2 - x_1^2"), S("x_3 - x_1*x_2"), S("x_2^2 - x_1*x_3")], S)
    assert ideal_equal(E, ref)


def _brute_dim(M: MonomialIdeal, n: int) -> int:
    supports = [M.ring.support(m) for m in M.gens]
    best = 0
    for k in range(n + 1):
        for U in combinations(range(n), k):
            mask = sum(1 << i for i in U)
            if all(s & ~mask for s in supports):
                best = max(best, k)
    return best


def test_dimension_matches_subset_search(rng):
    R = ring()
    for _ in range(25):
        monos = [R.pack([rng.randint(0, 2) for _ in V]) for _ in range(rng.randint(1, 4))]
        M = MonomialIdeal.from_monomials(R, [m for m in monos if m] or [R.pack((1, 0, 0, 0))])
        assert dimension(M) == _brute_dim(M, 4)


def test_initial_ideal_and_squarefree():
    R = ring("lex")
    I = Ideal([R("x_1*x_2 - x_3"), R("x_1^2 - x_4")], R)
    M = initial_ideal(I)
    assert not is_squarefree(M)
    assert dimension(M) == 2


def test_budget_overrun_raises():
    R = ring()
    # cyclic-4
    gens = [R("x_1 + x_2 + x_3 + x_4"), R("x_1*x_2 + x_2*x_3 + x_3*x_4 + x_4*x_1"),
            R("x_1*x_2*x_3 + x_2*x_3*x_4 + x_3*x_4*x_1 + x_4*x_1*x_2"), R("x_1*x_2*x_3*x_4 - 1")]
    with pytest.raises(BudgetExceeded) as exc:
        groebner(gens, R, Budget(max_pairs=2))
    assert exc.value.kind == "pairs"


def test_budget_reads_environment(monkeypatch):
    monkeypatch.setenv("LMVERIFY_BUDGET_PAIRS", "17")
    assert Budget.from_env().max_pairs == 17
    assert Budget.from_env(max_pairs=5).max_pairs == 5


def test_prime_field_basis():
    R = ring("grevlex", GF(5))
    G = groebner([R("x_1^2 - 1"), R("x_1 - 6")], R)   # 6 = 1 mod 5
    assert G == [R("x_1 - 1")]


def test_ideal_text_round_trip():
    R = ring()
    I = Ideal([R("x_1^2 - 1/2*x_2"), R("x_3*x_4")], R, provenance=["first", "second"])
    text = format_ideal(I, labels=True)
    assert "# first" in text
    J = parse_ideal(text)
    assert J.ring.same(R) and [g.terms for g in J.gens] == [g.terms for g in I.gens]
