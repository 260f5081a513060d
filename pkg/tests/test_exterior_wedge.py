"""Exterior-algebra expansion, case tables and the spin lattice basis."""

from fractions import Fraction
from itertools import combinations, permutations

import pytest

from lmverify import exterior_wedge as ew
from lmverify.exterior_wedge import ChartSpec, IndexSet
from lmverify.poly_core import LaurentPi

CI_CHARTS = [(5, 1), (6, 1), (7, 1), (7, 2)]


def _leibniz(rows, cols):
    """Brute-force minor: sum over permutations."""
    total = LaurentPi()
    for perm in permutations(range(len(cols))):
        inv = sum(1 for a, b in combinations(range(len(perm)), 2) if perm[a] > perm[b])
        term = LaurentPi.const(-1 if inv % 2 else 1)
        for r, c in enumerate(perm):
            term = term * rows[r][cols[c]]
        total = total + term
    return total


def test_index_set_operations():
    S = IndexSet.of(3, [1, 2, 6])
    assert S.star().members == (1, 5, 6)
    assert S.perp().members == (2, 3, 4)
    assert S.type() == (2, 1)
    assert S.weight() == (1, 1, 1)
    assert ew.ij_of(ew.S_ij(5, 2, 4)) == (2, 4)
    with pytest.raises(ValueError):
        IndexSet.of(3, [1, 1, 2])


@pytest.mark.parametrize("n", range(1, 7))
def test_sign_oracle(n):
    """sgn(σ_S) = (−1)^{ΣS + ⌈n/2⌉} on every n-subset of {1..2n}."""
    for S in ew.all_subsets(n):
        assert ew.permutation_parity(ew.sigma_permutation(S)) == ew.sign_formula(S)


def test_wedge_expand_matches_leibniz(rng):
    n = 3
    rows = [[LaurentPi({rng.randint(-1, 1): rng.randint(-2, 2)}) for _ in range(2 * n)]
            for _ in range(n)]
    w = ew.wedge_expand(rows)
    for S in ew.all_subsets(n):
        assert w.coeff(S) == _leibniz(rows, [i - 1 for i in S.members])


def test_wedge_is_alternating():
    n = 3
    rows = [[LaurentPi.const(i + j) for j in range(6)] for i in range(3)]
    assert not ew.wedge_expand([rows[0], rows[0], rows[1]])
    swapped = ew.wedge_expand([rows[1], rows[0], rows[2]])
    assert swapped == -ew.wedge_expand(rows)


def test_balanced_sets_pick_one_of_each_perp_pair():
    for n in range(3, 8):
        sets = ew.type_n1_sets(n)
        bal = set(ew.balanced_sets(n))
        assert len(sets) == n * n
        for S in sets:
            assert S in bal or S.perp() in bal


@pytest.mark.parametrize("nk", CI_CHARTS, ids=str)
def test_g_table_reproduced(nk):
    checks = ew.check_g_table(ChartSpec(*nk))
    assert checks and all(c.ok for c in checks), [str(c.S) for c in checks if not c.ok]


@pytest.mark.parametrize("nk", CI_CHARTS, ids=str)
def test_dual_table_reproduced(nk):
    checks = ew.check_dual_table(ChartSpec(*nk))
    assert all(c.ok for c in checks), [(str(c.S), c.case_id) for c in checks if not c.ok]


@pytest.mark.parametrize("nk", CI_CHARTS, ids=str)
def test_dual_ii_printed_sign_is_off(nk):
    """The displayed 2(−1)^{κ+1} coefficient of case (ii) has the wrong sign."""
    checks = ew.check_dual_table(ChartSpec(*nk))
    wrong = {c.case_id for c in checks if not c.printed_ok}
    assert wrong == {"dual(ii)"}


def test_worst_term_report_format():
    lines = ew.worst_term_report(ChartSpec(5, 1))
    assert len(lines) == len(ew.balanced_sets(5))
    assert lines[0] == "{1,2,3,4,6}; dual(i); -2; -2*e{1,6,7,8,9}"


def test_lattice_x_threshold_is_one_lower():
    """Case (x) elements already become integral at valuation n−κ−1."""
    ch = ChartSpec(7, 2)
    S = next(S for S in ew.balanced_sets(7) if ew.dual_case(ch, S).case_id == "dual(iv)")
    t = ew.lattice_threshold_corrected(ch, "lat(x)")
    assert t == ew.lattice_threshold_printed(ch, "lat(x)") - 1
    assert ew.is_integral(ew.dual_element(ch, S).scale(LaurentPi.mono(t)))
    assert not ew.is_integral(ew.dual_element(ch, S).scale(LaurentPi.mono(t - 1)))


@pytest.mark.parametrize("nk", CI_CHARTS, ids=str)
def test_membership_prediction_matches_brute_force(nk, rng):
    ch = ChartSpec(*nk)
    n, k = nk
    bs, grp = ew.balanced_sets(n), ew.trace_group(ch)
    for _ in range(60):
        co = {S: LaurentPi({rng.randint(n - k - 3, n - k + 1): rng.choice([-2, -1, 1, 2])})
              for S in rng.sample(bs, 3) + (grp if rng.random() < 0.5 else [])}
        assert ew.predicted_membership(ch, co) == ew.is_integral(ew.combination(ch, co))


def test_trace_cancellation_lowers_threshold():
    ch = ChartSpec(7, 1)
    grp = ew.trace_group(ch)
    v = 7 - 1 - 1
    # alternating coefficients with Σ(−1)^i a_i = 0
    a, b = grp[0], grp[1]
    sa = 1 if ew.ij_of(a)[0] % 2 == 0 else -1
    sb = 1 if ew.ij_of(b)[0] % 2 == 0 else -1
    co = {a: LaurentPi.mono(v, sa), b: LaurentPi.mono(v, -sb)}
    assert ew.predicted_membership(ch, co)
    assert ew.is_integral(ew.combination(ch, co))
    co[b] = LaurentPi.mono(v, sb)
    assert not ew.is_integral(ew.combination(ch, co))


@pytest.mark.parametrize("nk", CI_CHARTS, ids=str)
def test_spin_basis_is_a_basis_of_the_image(nk):
    ch = ChartSpec(*nk)
    img = ew.lattice_image(ch)
    sb = [e.as_vector() for e in ew.spin_basis(ch)]
    assert ew.rank(sb) == len(sb) == ew.rank(img)
    assert all(ew.in_span(v, img) for v in sb)


def test_spin_basis_sizes_frozen():
    # [DERIVED] rank of the special-fiber image = number of balanced sets
    sizes = {nk: len(ew.spin_basis(ChartSpec(*nk))) for nk in CI_CHARTS}
    assert sizes == {(5, 1): 15, (6, 1): 21, (7, 1): 28, (7, 2): 28}


@pytest.mark.parametrize("nk", CI_CHARTS, ids=str)
def test_printed_trace_items_leave_the_image(nk):
    ch = ChartSpec(*nk)
    img = ew.lattice_image(ch)
    items = [v for v in (e.as_vector() for e in ew.printed_cor_x(ch)) if v]  # middle item is 0 for odd n
    assert items and not any(ew.in_span(v, img) for v in items)


def test_trace_constraint_starts_after_kappa():
    tc = ew.trace_constraint(ChartSpec(7, 2))
    assert tc.first == 3 and [i for i, _ in tc.weights] == [3, 4]
    assert tc.weights[-1][1] == Fraction(1, 2)


def test_chart_admissibility():
    assert ChartSpec(5, 1).strongly_non_special
    assert not ChartSpec(5, 0).strongly_non_special
    assert not ChartSpec(6, 2).strongly_non_special
    assert not ChartSpec(7, 3).strongly_non_special
    with pytest.raises(ValueError):
        ChartSpec(5, 3)
