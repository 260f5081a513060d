"""Chart matrices, the naive/spin ideals and their simplifications."""

from fractions import Fraction
from itertools import permutations

import pytest

from lmverify import model_ideals as mi
from lmverify.exterior_wedge import ChartSpec
from lmverify.groebner import Ideal, ideal_equal
from lmverify.model_ideals import INTEGRAL, SPECIAL, PolyMatrix
from lmverify.poly_core import PolyRing, var


@pytest.fixture
def R3():
    return PolyRing([var("m", i, j) for i in range(1, 4) for j in range(1, 4)], "grevlex")


class TestPolyMatrix:
    def test_det_matches_leibniz(self, R3):
        M = PolyMatrix.symbolic(R3, "m", 3, 3)
        ref = R3.zero()
        for p in permutations(range(3)):
            sign = -1 if sum(p[a] > p[b] for a in range(3) for b in range(a + 1, 3)) % 2 else 1
            ref = ref + M[0, p[0]] * M[1, p[1]] * M[2, p[2]] * sign
        assert M.det() == ref

    def test_minors_count_and_rank_one(self, R3):
        M = PolyMatrix.symbolic(R3, "m", 3, 3)
        assert len(M.minors(2)) == 9 and M.minors(2) == M.minors2()
        u = PolyMatrix(R3, [[1], [2], [3]])
        v = PolyMatrix(R3, [[4, 5, 6]])
        assert all(not m for m in (u * v).minors2())

    def test_J_squares_to_minus_identity(self, R3):
        """J_{2l} = (0 H; −H 0) satisfies J² = −I (not +I)."""
        for l in (1, 2, 3):
            J = PolyMatrix.J(R3, 2 * l)
            assert J * J == -PolyMatrix.identity(R3, 2 * l)
            assert J.T == -J

    def test_adjoint_is_an_involution_and_antimultiplicative(self, R3):
        M = PolyMatrix.symbolic(R3, "m", 2, 3)
        N = PolyMatrix.symbolic(R3, "m", 3, 2)
        assert M.ad().ad() == M
        assert (M * N).ad() == N.ad() * M.ad()

    def test_zero_extent_blocks(self, R3):
        Z = PolyMatrix.zeros(R3, 3, 0)
        W = PolyMatrix.zeros(R3, 0, 2)
        assert (Z * W).shape == (3, 2) and (Z * W).is_zero()
        assert PolyMatrix.hstack(Z, PolyMatrix.identity(R3, 3)).shape == (3, 3)

    def test_shape_errors(self, R3):
        with pytest.raises(ValueError):
            PolyMatrix.identity(R3, 2) * PolyMatrix.identity(R3, 3)
        with pytest.raises(ValueError):
            PolyMatrix.J(R3, 3)


def test_structure_matrices():
    st = mi.build_structure_matrices(ChartSpec(5, 1))
    for key in ("A_kappa", "A_n_minus_kappa", "M_pair"):
        assert st[key].shape == (10, 10)
    pi = st["A_kappa"].ring.var(var("pi"))
    # lattice indices: π₀ appears on an s-block, resp. a 2κ-block
    assert st["A_kappa"].det() in (pi ** 6, -pi ** 6)
    assert st["A_n_minus_kappa"].det() in (pi ** 4, -pi ** 4)
    assert st["M_pair"].det() in (st["M_pair"].ring.one(), -st["M_pair"].ring.one())


@pytest.mark.parametrize("fiber", [SPECIAL, INTEGRAL])
@pytest.mark.parametrize("nk", [(5, 1), (6, 1), (7, 2), (4, 0)])
def test_dual_chart_matrix_certificate(nk, fiber):
    """Y² − π₀ = diag(−J,H)(X² − π₀)ᵗ diag(J,H) holds identically."""
    assert mi.y_relation_certificate(ChartSpec(*nk), fiber)


def test_generator_provenance_is_tracked():
    I = mi.build_full_ideal(ChartSpec(5, 1))
    assert len(I.gens) == len(I.provenance)
    families = {p.split(":")[0] for p in I.provenance}
    assert families == {"LM1", "LM2-1", "LM2-2", "LM8-1", "LM8-2"}


def test_naive_ideal_is_smaller_than_full():
    ch = ChartSpec(5, 1)
    naive, full = mi.build_naive_wedge_ideal(ch), mi.build_full_ideal(ch)
    assert naive.ring.same(full.ring)
    assert full.contains_ideal(naive)
    assert not naive.contains_ideal(full)      # spin relations cut the naive model down


@pytest.mark.parametrize("nk", [(5, 1), (6, 1)])
def test_simplification_chain(nk):
    rep = mi.verify_simplification_chain(ChartSpec(*nk))
    assert rep.ok, rep.summary()
    assert len(rep.checks) == 9


def test_simplification_detects_a_broken_step():
    """Dropping tr X4 from step 2 must break the equality."""
    ch = ChartSpec(5, 1)
    full = mi.build_full_ideal(ch)
    step2 = mi.build_step2_ideal(ch)
    keep = [(g, p) for g, p in zip(step2.gens, step2.provenance) if "tr(X4)" not in p]
    broken = Ideal([g for g, _ in keep], step2.ring, "broken", [p for _, p in keep])
    assert not ideal_equal(full, broken)


@pytest.mark.parametrize("nk", [(5, 1), (6, 1), (7, 2)])
def test_component_substitution(nk):
    assert mi.verify_component_substitution(ChartSpec(*nk)).ok


def test_component_ideal_generators():
    comps = mi.build_component_ideals(ChartSpec(5, 1))
    assert set(comps) == {"R_s", "R_s1", "R_s2", "R_s12"}
    I = comps["R_s"]
    # 2-minors of a 3×5 matrix, 3 symmetry relations, one trace
    assert len(I.gens) == 30 + 3 + 1


def test_integral_model_on_smallest_chart():
    rep = mi.verify_integral(ChartSpec(5, 1))
    assert rep.ok, rep.summary()
    by_id = {c.check_id: c for c in rep.checks}
    assert by_id["5.1/derived/kottwitz"].details == {"printed_form_holds": False}
    lm6 = by_id["5.1/integral/lm6-redundancy"].details
    # [DERIVED] over Q[π]: det(X−π) follows from LM1+LM2+LM8, ∧²(X+π) does not
    assert lm6 == {"wedge2_redundant": False, "wedgen_redundant": True}


def test_kottwitz_targets():
    R = PolyRing([var("pi")])
    pi = R.var(var("pi"))
    # (T − π)(T + π)² = T³ + πT² − π²T − π³ → e1 = −π, e2 = −π², e3 = π³ ... with signs (−1)^k e_k
    assert mi.kottwitz_targets(R, 3) == [-pi, -pi**2, pi**3]
    assert mi.kottwitz_targets_printed(R, 3) == [pi, -pi**2, -pi**3]


def test_charpoly_by_newton_matches_determinant(R3):
    M = PolyMatrix(R3, [[1, 2, 0], [0, 3, 1], [4, 0, 5]])
    e = mi.charpoly_coefficients_mod(M, lambda f: f)
    assert e[0] == M.trace() and e[2] == M.det()


def test_integral_substitution_typo_fails():
    """𝐀 = H(X4+π), 𝐁 = X4 (as printed) does not identify the ideals; 𝐀 = (X4+π)H, 𝐁 = X3 does."""
    ch = ChartSpec(4, 1)         # the only shape where 𝐁 = X4 even type-checks
    final, target = mi.build_integral_final(ch), mi.build_step3_target(ch, INTEGRAL)
    good, R = mi.ab_to_x34(ch, INTEGRAL)
    assert ideal_equal(mi._pushforward(final, good, R, "good"), target)
    bad, R = mi.ab_to_x34_printed(ch)
    assert not ideal_equal(mi._pushforward(final, bad, R, "printed"), target)
    with pytest.raises(ValueError):
        mi.ab_to_x34_printed(ChartSpec(5, 1))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_kappa_zero_reduces_to_symmetric_rank_one(n):
    full, ref = mi.pappas_shape(n)
    assert ideal_equal(full, ref)


@pytest.mark.parametrize("m", [2, 3])
def test_almost_modular_shape(m):
    """X4 = (0 x2; x1 0): x1 pairs with the first row of X3, x2 with the second."""
    d = mi.yu_shape(m)
    assert ideal_equal(d["target"], d["corrected"])
    assert not ideal_equal(d["target"], d["printed"])


def test_named_ideals_and_errors():
    ch = ChartSpec(5, 1)
    for which in mi.IDEAL_NAMES:
        assert mi.build_named_ideal(ch, which).gens
    with pytest.raises(ValueError):
        mi.build_named_ideal(ch, "nope")
    with pytest.raises(ValueError):
        mi.build_full_ideal(ch, "generic")


def test_phi_is_half_integral():
    b = mi.Blocks(ChartSpec(5, 1), mi.x34_ring(ChartSpec(5, 1)))
    coeffs = {c for e in mi.phi_X1(b).entries() for c in e.terms.values()}
    assert coeffs <= {Fraction(1, 2), Fraction(-1, 2), Fraction(1), Fraction(-1)}
