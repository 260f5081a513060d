"""
Index-set combinatorics and exterior algebra over Laurent coefficients.

Coordinates: ``eps_1..eps_2n`` is the standard O_F-basis of Λ_κ ⊗ O_F.  In
terms of V = F^n ⊗_{F0} F,

    eps_l     = π^{-1} e_l ⊗ 1,  eps_{n+l} = e_l ⊗ 1        (l ≤ κ)
    eps_l     = e_l ⊗ 1,         eps_{n+l} = π e_l ⊗ 1      (l > κ)

so W(Λ_κ) = ∧^n Λ_κ is the set of wedge elements whose ε-coefficients
all have non-negative π-valuation.  Wedge basis elements are written
e_S for sorted S ⊆ {1..2n} (the ε_S of the lattice).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from .poly_core import INF, LaurentPi

HALF = Fraction(1, 2)


class SignMismatch(AssertionError):
    pass


# ---------------------------------------------------------------- index sets

def _bits(members: Iterable[int]) -> int:
    b = 0
    for i in members:
        b |= 1 << (i - 1)
    return b


@dataclass(frozen=True, order=True)
class IndexSet:
    """An n-element subset of {1..2n}, stored as a bit set."""
    n: int
    bits: int

    @staticmethod
    def of(n: int, members: Iterable[int]) -> "IndexSet":
        members = list(members)
        if len(set(members)) != len(members) or any(not 1 <= i <= 2 * n for i in members):
            raise ValueError(f"bad members {members} for n={n}")
        return IndexSet(n, _bits(members))

    def __post_init__(self):
        if self.bits >> (2 * self.n):
            raise ValueError("member out of range")

    @property
    def members(self) -> tuple:
        return tuple(i + 1 for i in range(2 * self.n) if self.bits >> i & 1)

    def __len__(self):
        return bin(self.bits).count("1")

    def __contains__(self, i: int) -> bool:
        return bool(self.bits >> (i - 1) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def star(self) -> "IndexSet":
        return IndexSet.of(self.n, [2 * self.n + 1 - i for i in self.members])

    def perp(self) -> "IndexSet":
        full = (1 << (2 * self.n)) - 1
        return IndexSet(self.n, full & ~self.star().bits)

    def total(self) -> int:
        return sum(self.members)

    def type(self) -> tuple[int, int]:
        r = bin(self.bits & ((1 << self.n) - 1)).count("1")
        return r, len(self) - r

    def weight(self) -> tuple:
        n = self.n
        return tuple((self.bits >> (i - 1) & 1) + (self.bits >> (n + i - 1) & 1)
                     for i in range(1, n + 1))

    def top_index(self) -> int:
        """i_S: the unique element of S ∩ {n+1..2n}, minus n (type (n−1,1) only)."""
        if self.type() != (self.n - 1, 1):
            raise ValueError("i_S is defined for type (n-1,1) sets only")
        return next(i - self.n for i in self.members if i > self.n)

    def is_balanced(self) -> bool:
        return self.top_index() <= self.perp().top_index()

    def __str__(self):
        return "{" + ",".join(map(str, self.members)) + "}"


def from_weight(n: int, w: Sequence[int]) -> IndexSet:
    """Recover S from a weight vector with entries in {0,1,2} (type (n−1,1) case)."""
    w = list(w)
    if len(w) != n or w.count(2) != 1 or w.count(0) != 1 or any(x not in (0, 1, 2) for x in w):
        raise ValueError("weight does not determine a unique type-(n-1,1) set")
    i = w.index(2) + 1
    j = w.index(0) + 1
    return S_ij(n, i, j)


def S_ij(n: int, i: int, j: int) -> IndexSet:
    """{1,…,ĵ,…,n} ∪ {n+i}."""
    return IndexSet.of(n, [k for k in range(1, n + 1) if k != j] + [n + i])


def e_bracket(n: int, i: int, j: int) -> IndexSet:
    """e_{[i, n+j hat]}: {i} ∪ {n+1..2n} ∖ {n+j}."""
    return IndexSet.of(n, [i] + [n + k for k in range(1, n + 1) if k != j])


def top_set(n: int) -> IndexSet:
    return IndexSet.of(n, range(n + 1, 2 * n + 1))


def all_subsets(n: int) -> Iterator[IndexSet]:
    for c in combinations(range(1, 2 * n + 1), n):
        yield IndexSet.of(n, c)


def type_n1_sets(n: int) -> list[IndexSet]:
    return [S_ij(n, i, j) for i in range(1, n + 1) for j in range(1, n + 1)]


def balanced_sets(n: int) -> list[IndexSet]:
    return sorted((S for S in type_n1_sets(n) if S.is_balanced()), key=_set_sort_key)


def _set_sort_key(S: IndexSet):
    return S.members


def ij_of(S: IndexSet) -> tuple[int, int]:
    """(i, j) with S = {1..ĵ..n, n+i}."""
    i = S.top_index()
    j = next(k for k in range(1, S.n + 1) if k not in S)
    return i, j


# ---------------------------------------------------------------- signs

def sigma_permutation(S: IndexSet) -> list[int]:
    """σ_S: 1..n ↦ S increasing, n+1..2n ↦ complement increasing (one-line form)."""
    comp = [i for i in range(1, 2 * S.n + 1) if i not in S]
    return list(S.members) + comp


def permutation_parity(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def sign_formula(S: IndexSet) -> int:
    n = S.n
    return -1 if (S.total() + (n + 1) // 2) % 2 else 1


def sign_sigma(S: IndexSet) -> int:
    """sgn(σ_S), computed two ways; a disagreement is a hard failure."""
    a = permutation_parity(sigma_permutation(S))
    b = sign_formula(S)
    if a != b:
        raise SignMismatch(f"parity {a} != formula {b} for {S}")
    return a


def set_ops(S: IndexSet, op: str):
    if op == "star":
        return S.star()
    if op == "perp":
        return S.perp()
    if op == "sum":
        return S.total()
    if op == "check_balanced":
        return S.is_balanced()
    raise ValueError(op)


def type_and_weight(S: IndexSet):
    return S.type(), S.weight()


# ---------------------------------------------------------------- charts

@dataclass(frozen=True)
class ChartSpec:
    n: int
    kappa: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.kappa <= self.n // 2:
            raise ValueError(f"need 0 <= kappa <= n/2, got n={self.n}, kappa={self.kappa}")

    @property
    def m(self) -> int:
        return self.n // 2

    @property
    def M(self) -> int:
        return (self.n + 1) // 2

    @property
    def s(self) -> int:
        """Size n − 2κ of the X₄ block."""
        return self.n - 2 * self.kappa

    @property
    def t(self) -> int:
        return 2 * self.kappa

    def non_special_reason(self) -> str | None:
        """None when strongly non-special; otherwise why not."""
        n, k, m = self.n, self.kappa, self.m
        if n < 3:
            return "n < 3"
        if k == 0:
            return "kappa = 0 is special"
        if n % 2 == 0 and k in (m - 1, m):
            return f"kappa in {{m-1, m}} for n = 2m = {n}"
        if n % 2 == 1 and k == m:
            return f"kappa = m for n = 2m+1 = {n}"
        return None

    @property
    def strongly_non_special(self) -> bool:
        return self.non_special_reason() is None

    def __str__(self):
        return f"(n={self.n}, kappa={self.kappa})"


# ---------------------------------------------------------------- vectors

BasisVector = tuple  # length-2n tuple of LaurentPi


def _vec(n: int, entries: Mapping[int, LaurentPi]) -> BasisVector:
    zero = LaurentPi()
    return tuple(entries.get(k, zero) for k in range(1, 2 * n + 1))


def g_vector(chart: ChartSpec, l: int) -> BasisVector:
    """g_l in ε-coordinates (1 ≤ l ≤ 2n)."""
    n, k = chart.n, chart.kappa
    lo = l if l <= n else l - n
    mono = LaurentPi.mono
    if lo <= k:
        if l <= n:   # e⊗1 − πe⊗π⁻¹ = ε_{n+l} − π ε_l
            return _vec(n, {n + lo: mono(0), lo: mono(1, -1)})
        return _vec(n, {n + lo: mono(0, HALF), lo: mono(1, HALF)})
    if l <= n:       # ε_l − π⁻¹ ε_{n+l}
        return _vec(n, {lo: mono(0), n + lo: mono(-1, -1)})
    return _vec(n, {lo: mono(0, HALF), n + lo: mono(-1, HALF)})


def g_basis(chart: ChartSpec) -> list[BasisVector]:
    return [g_vector(chart, l) for l in range(1, 2 * chart.n + 1)]


# V-coordinates (u_j = e_j⊗1, v_j = πe_j⊗1) used for the form checks
def to_uv(chart: ChartSpec, vec: BasisVector) -> BasisVector:
    """ε-coordinates -> (u_1..u_n, v_1..v_n) coordinates."""
    n, k = chart.n, chart.kappa
    zero = LaurentPi()
    out = [zero] * (2 * n)
    for l in range(1, n + 1):
        a, b = vec[l - 1], vec[n + l - 1]
        if l <= k:   # ε_l = π⁻² v_l, ε_{n+l} = u_l
            out[l - 1] = out[l - 1] + b
            out[n + l - 1] = out[n + l - 1] + a.shift(-2)
        else:        # ε_l = u_l, ε_{n+l} = v_l
            out[l - 1] = out[l - 1] + a
            out[n + l - 1] = out[n + l - 1] + b
    return tuple(out)


def symmetric_form(n: int, x: BasisVector, y: BasisVector) -> LaurentPi:
    """(x, y) on V in (u, v) coordinates: (u_i, u_{i∨}) = 1, (v_i, v_{i∨}) = −π²."""
    total = LaurentPi()
    for i in range(1, n + 1):
        iv = n + 1 - i
        total = total + x[i - 1] * y[iv - 1]
        total = total - (x[n + i - 1] * y[n + iv - 1]).shift(2)
    return total


def split_basis_uv(chart: ChartSpec) -> list[BasisVector]:
    """The f-basis of V (odd n: with the middle pair; even n: image of the split basis)."""
    n = chart.n
    m = n // 2
    mono = LaurentPi.mono
    zero = LaurentPi()

    def uv(d):
        return tuple(d.get(k, zero) for k in range(1, 2 * n + 1))

    out = []
    if n % 2 == 1:
        for j in range(1, n + 1):
            if j <= m:
                out.append(uv({n + j: mono(-2, -1)}))          # −π⁻¹e_j⊗1
            elif j == m + 1:
                out.append(uv({j: mono(0), n + j: mono(-1, -1)}))
            else:
                out.append(uv({j: mono(0)}))
        for j in range(1, n + 1):
            if j <= m:
                out.append(uv({j: mono(0)}))
            elif j == m + 1:
                out.append(uv({j: mono(0, HALF), n + j: mono(-1, HALF)}))
            else:
                out.append(uv({n + j: mono(0)}))
    else:
        for j in range(1, n + 1):
            out.append(uv({n + j: mono(-2, -1)}) if j <= m else uv({j: mono(0)}))
        for j in range(1, n + 1):
            out.append(uv({j: mono(0)}) if j <= m else uv({n + j: mono(0)}))
    return out


# ---------------------------------------------------------------- wedge elements

class WedgeElement:
    """Σ c_S e_S with LaurentPi coefficients; keys are IndexSet bit masks."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[int, LaurentPi] | None = None):
        self.n = n
        self.terms = {b: c for b, c in (terms or {}).items() if c}

    @staticmethod
    def basis(S: IndexSet, c=1) -> "WedgeElement":
        return WedgeElement(S.n, {S.bits: c if isinstance(c, LaurentPi) else LaurentPi.const(c)})

    def __add__(self, o: "WedgeElement") -> "WedgeElement":
        d = dict(self.terms)
        for b, c in o.terms.items():
            d[b] = d[b] + c if b in d else c
        return WedgeElement(self.n, d)

    def __neg__(self):
        return WedgeElement(self.n, {b: -c for b, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def scale(self, c) -> "WedgeElement":
        c = c if isinstance(c, LaurentPi) else LaurentPi.const(c)
        return WedgeElement(self.n, {b: v * c for b, v in self.terms.items()})

    def shift(self, k: int) -> "WedgeElement":
        return WedgeElement(self.n, {b: v.shift(k) for b, v in self.terms.items()})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, o):
        return isinstance(o, WedgeElement) and self.n == o.n and self.terms == o.terms

    def valuation(self):
        if not self.terms:
            return INF
        return min(c.valuation() for c in self.terms.values())

    def items(self) -> list[tuple[IndexSet, LaurentPi]]:
        return sorted(((IndexSet(self.n, b), c) for b, c in self.terms.items()),
                      key=lambda sc: sc[0].members)

    def coeff(self, S: IndexSet) -> LaurentPi:
        return self.terms.get(S.bits, LaurentPi())

    def reduction(self) -> dict[int, Fraction]:
        """Image mod π of an integral element: {S bits: constant coefficient}."""
        if self.valuation() < 0:
            raise ValueError("element is not integral")
        return {b: c.coeff(0) for b, c in self.terms.items() if c.coeff(0)}

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*e{S}" for S, c in self.items())


def wedge_expand(rows: Sequence[BasisVector]) -> WedgeElement:
    """v_1 ∧ … ∧ v_n in the e-basis: coefficient of e_S is the minor on columns S.

    Row-by-row Laplace expansion with memoized partial minors: after k rows
    the table maps each k-subset T of columns to the k×k minor on T.
    """
    n = len(rows)
    if any(len(r) != 2 * n for r in rows):
        raise ValueError("expected n vectors of length 2n")
    partial: dict[int, LaurentPi] = {0: LaurentPi.const(1)}
    for row in rows:
        nxt: dict[int, LaurentPi] = {}
        nz = [(c, v) for c, v in enumerate(row) if v]
        for T, val in partial.items():
            for c, v in nz:
                bit = 1 << c
                if T & bit:
                    continue
                # e_T ∧ e_c: move e_c left past the members of T above c
                sign = -1 if bin(T >> (c + 1)).count("1") % 2 else 1
                prod = val * v
                if sign < 0:
                    prod = -prod
                key = T | bit
                nxt[key] = nxt[key] + prod if key in nxt else prod
        partial = {k: v for k, v in nxt.items() if v}
    return WedgeElement(n, partial)


@lru_cache(maxsize=None)
def g_wedge(chart: ChartSpec, S: IndexSet) -> WedgeElement:
    """g_S = g_{s_1} ∧ … ∧ g_{s_n} (increasing order)."""
    g = g_basis(chart)
    return wedge_expand([g[l - 1] for l in S.members])


@lru_cache(maxsize=None)
def dual_element(chart: ChartSpec, S: IndexSet) -> WedgeElement:
    """g_S − sgn(σ_S)·g_{S⊥}."""
    P = S.perp()
    sgn = sign_sigma(S)
    return g_wedge(chart, S) - g_wedge(chart, P).scale(sgn)


def worst_term(w: WedgeElement) -> WedgeElement:
    """Terms of w whose coefficient valuation is minimal, truncated to that π-power."""
    if not w:
        raise ValueError("worst term of zero")
    v = w.valuation()
    return WedgeElement(w.n, {b: LaurentPi.mono(v, c.coeff(v)) for b, c in w.terms.items()
                              if c.coeff(v)})


def is_integral(w: WedgeElement) -> bool:
    """w ∈ W(Λ_κ): every ε-coefficient has non-negative valuation."""
    return not w or w.valuation() >= 0


def lattice_threshold(w: WedgeElement) -> int:
    """Least ord(a) such that a·w is integral (a single-element scaling)."""
    return -w.valuation()


def hodge_a(S: IndexSet) -> tuple[int, IndexSet]:
    """a(f_S) = sgn(σ_S) f_{S⊥}."""
    return sign_sigma(S), S.perp()


def transition_determinant(chart: ChartSpec) -> LaurentPi:
    """det of the matrix expressing the split f-basis in the g-basis (both in V)."""
    from fractions import Fraction as Fr
    n = chart.n
    G = [to_uv(chart, v) for v in g_basis(chart)]
    Fb = split_basis_uv(chart)
    # det(F)/det(G) computed as the unique coefficient of the top wedge
    dg = wedge_expand_square(G)
    df = wedge_expand_square(Fb)
    q = _laurent_div_exact(df, dg)
    return q


def wedge_expand_square(rows: Sequence[BasisVector]) -> LaurentPi:
    """Determinant of a 2n×2n Laurent matrix via the same memoized expansion."""
    N = len(rows)
    partial: dict[int, LaurentPi] = {0: LaurentPi.const(1)}
    for row in rows:
        nxt: dict[int, LaurentPi] = {}
        nz = [(c, v) for c, v in enumerate(row) if v]
        for T, val in partial.items():
            for c, v in nz:
                bit = 1 << c
                if T & bit:
                    continue
                sign = -1 if bin(T >> (c + 1)).count("1") % 2 else 1
                prod = val * v if sign > 0 else -(val * v)
                key = T | bit
                nxt[key] = nxt[key] + prod if key in nxt else prod
        partial = {k: v for k, v in nxt.items() if v}
    return partial.get((1 << N) - 1, LaurentPi())


def _laurent_div_exact(a: LaurentPi, b: LaurentPi) -> LaurentPi:
    """a / b when b is a monomial (the determinants here are)."""
    if len(b.c) != 1:
        raise ValueError("exact division only by Laurent monomials")
    (k, c), = b.c.items()
    return LaurentPi({e - k: v / c for e, v in a.c.items()})


# ---------------------------------------------------------------- case tables

@dataclass(frozen=True)
class CasePrediction:
    """Predicted worst term (and optionally the next π-order) of an element.

    ``worst``/``next_order`` map IndexSet -> rational coefficient at
    π^valuation / π^(valuation+1).  ``printed_worst`` is set when the
    printed statement differs from the corrected one.
    """
    case_id: str
    valuation: int
    worst: tuple
    next_order: tuple | None = None
    printed_worst: tuple | None = None
    erratum: str = ""

    def worst_dict(self) -> dict:
        return dict(self.worst)


def _acc(d: dict, S: IndexSet, c) -> None:
    d[S] = d.get(S, Fraction(0)) + Fraction(c)
    if not d[S]:
        del d[S]


def _frozen(d: dict) -> tuple:
    return tuple(sorted(d.items(), key=lambda sc: sc[0].members))


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


def g_case(chart: ChartSpec, S: IndexSet) -> CasePrediction:
    """Worst term of g_S for S of type (n−1,1) (cases (i)–(vi))."""
    n, k = chart.n, chart.kappa
    i, j = ij_of(S)
    eb = lambda a, b: e_bracket(n, a, b)
    if i == j:
        pref = HALF * (_sgn(k + i) if i <= k else _sgn(k + i + 1))
        nxt: dict = {}
        for s in range(1, n + 1):
            _acc(nxt, eb(s, s), pref * _sgn(s))
        _acc(nxt, eb(i, i), pref * 2 * _sgn(i + 1))
        return CasePrediction("g(i)" if i <= k else "g(ii)", -(n - k),
                              _frozen({top_set(n): pref}), _frozen(nxt))
    if i <= k and j <= k:
        cid, c, v = "g(iii)", _sgn(k + 1), -(n - k - 1)
    elif i <= k < j:
        cid, c, v = "g(iv)", _sgn(k), -(n - k - 2)
    elif j <= k < i:
        cid, c, v = "g(v)", _sgn(k + 1), -(n - k)
    else:
        cid, c, v = "g(vi)", _sgn(k), -(n - k - 1)
    return CasePrediction(cid, v, _frozen({eb(i, j): Fraction(c)}))


def dual_case(chart: ChartSpec, S: IndexSet) -> CasePrediction:
    """Worst term of g_S − sgn(σ_S) g_{S⊥} for balanced S (cases (i)–(xii))."""
    n, k, m = chart.n, chart.kappa, chart.m
    i, j = ij_of(S)
    if not S.is_balanced():
        raise ValueError(f"{S} is not balanced")
    iv, jv = n + 1 - i, n + 1 - j
    eb = lambda a, b: e_bracket(n, a, b)
    sij = _sgn(n + i + j)
    if i != j and jv == i:                       # Case 1: S = S⊥
        if i <= k:
            return CasePrediction("dual(i)", -(n - k - 2), _frozen({eb(i, j): Fraction(2 * _sgn(k))}))
        if i <= n - k:
            return CasePrediction(
                "dual(ii)", -(n - k - 1), _frozen({eb(i, j): Fraction(2 * _sgn(k))}),
                printed_worst=_frozen({eb(i, j): Fraction(2 * _sgn(k + 1))}),
                erratum="printed sign 2(-1)^(kappa+1); g_S case (vi) with sgn = -1 gives 2(-1)^kappa")
        return CasePrediction("dual(iii)", -(n - k), _frozen({eb(i, j): Fraction(2 * _sgn(k + 1))}))
    if i == j:                                   # Case 2
        if i <= k:
            c = Fraction(_sgn(k + 1))
            return CasePrediction("dual(iv)", -(n - k - 1),
                                  _frozen({eb(i, i): c, eb(iv, iv): c * _sgn(n)}))
        if i <= m:
            pref = Fraction(_sgn(k + i + 1))
            nxt: dict = {}
            for s in range(1, n + 1):
                _acc(nxt, eb(s, s), pref * _sgn(s))
            _acc(nxt, eb(i, i), pref * _sgn(i + 1))
            _acc(nxt, eb(iv, iv), pref * _sgn(iv + 1))
            return CasePrediction("dual(v)", -(n - k), _frozen({top_set(n): pref}), _frozen(nxt))
        pref = Fraction(_sgn(k + m))
        nxt = {}
        for s in range(1, n + 1):
            _acc(nxt, eb(s, s), pref * _sgn(s))
        _acc(nxt, eb(m + 1, m + 1), pref * -2 * _sgn(m + 1))
        return CasePrediction("dual(vi)", -(n - k), _frozen({top_set(n): pref}), _frozen(nxt))
    # Case 3: S ≠ S⊥, i < j∨
    if jv <= k:
        c = Fraction(_sgn(k))
        return CasePrediction("dual(vii)", -(n - k - 2), _frozen({eb(i, j): c, eb(jv, iv): -c * sij}))
    if i <= k:
        if jv < n - k + 1:
            return CasePrediction("dual(viii)", -(n - k - 1),
                                  _frozen({eb(jv, iv): Fraction(_sgn(n + k + 1 + i + j))}))
        c = Fraction(_sgn(k + 1))
        return CasePrediction("dual(ix)", -(n - k - 1), _frozen({eb(i, j): c, eb(jv, iv): c * sij}))
    if jv < n - k + 1:
        c = Fraction(_sgn(k))
        return CasePrediction("dual(x)", -(n - k - 1), _frozen({eb(i, j): c, eb(jv, iv): -c * sij}))
    if i < n - k + 1:
        return CasePrediction("dual(xi)", -(n - k), _frozen({eb(i, j): Fraction(_sgn(k + 1))}))
    c = Fraction(_sgn(k + 1))
    return CasePrediction("dual(xii)", -(n - k), _frozen({eb(i, j): c, eb(jv, iv): -c * sij}))


@dataclass(frozen=True)
class CaseCheck:
    S: IndexSet
    case_id: str
    valuation_ok: bool
    worst_ok: bool
    next_ok: bool | None
    printed_ok: bool
    observed_valuation: int
    observed_worst: tuple
    erratum: str = ""

    @property
    def ok(self) -> bool:
        return self.valuation_ok and self.worst_ok and self.next_ok is not False


def _observed(w: WedgeElement, v: int, depth: int) -> dict:
    return {IndexSet(w.n, b): c.coeff(v + depth) for b, c in w.terms.items() if c.coeff(v + depth)}


def compare_case(w: WedgeElement, pred: CasePrediction, S: IndexSet) -> CaseCheck:
    v = w.valuation()
    obs = _observed(w, v, 0)
    worst_ok = v == pred.valuation and obs == pred.worst_dict()
    next_ok = None
    if pred.next_order is not None:
        next_ok = _observed(w, pred.valuation, 1) == dict(pred.next_order)
    printed = pred.printed_worst if pred.printed_worst is not None else pred.worst
    printed_ok = v == pred.valuation and obs == dict(printed)
    return CaseCheck(S, pred.case_id, v == pred.valuation, worst_ok, next_ok, printed_ok,
                     v, _frozen(obs), pred.erratum)


def check_g_table(chart: ChartSpec) -> list[CaseCheck]:
    return [compare_case(g_wedge(chart, S), g_case(chart, S), S) for S in type_n1_sets(chart.n)]


def check_dual_table(chart: ChartSpec) -> list[CaseCheck]:
    return [compare_case(dual_element(chart, S), dual_case(chart, S), S)
            for S in balanced_sets(chart.n)]


def format_terms(terms: Iterable[tuple[IndexSet, Fraction]], valuation: int | None = None) -> str:
    parts = []
    for S, c in terms:
        pi = "" if valuation is None else (f"*pi^{valuation}" if valuation else "")
        parts.append(f"{c}{pi}*e{S}")
    return " + ".join(parts) if parts else "0"


def worst_term_report(chart: ChartSpec) -> list[str]:
    """One line per balanced S: ``S; case-id; valuation; leading-terms``."""
    lines = []
    for S in balanced_sets(chart.n):
        w = dual_element(chart, S)
        pred = dual_case(chart, S)
        wt = worst_term(w)
        v = wt.valuation()
        terms = [(T, c.coeff(v)) for T, c in wt.items()]
        lines.append(f"{S}; {pred.case_id}; {v}; {format_terms(terms)}")
    return lines


# ---------------------------------------------------------------- lattice criterion

LATTICE_OF_DUAL = {
    "dual(i)": "lat(i)", "dual(ii)": "lat(ii)", "dual(iii)": "lat(iii)",
    "dual(vii)": "lat(iv)", "dual(viii)": "lat(v)", "dual(ix)": "lat(vi)",
    "dual(x)": "lat(vii)", "dual(xi)": "lat(viii)", "dual(xii)": "lat(ix)",
    "dual(iv)": "lat(x)", "dual(v)": "lat(xi/xii)", "dual(vi)": "lat(xi/xii)",
}


def lattice_threshold_printed(chart: ChartSpec, lat_id: str) -> int:
    n, k = chart.n, chart.kappa
    return {"lat(i)": n - k - 2, "lat(ii)": n - k - 1, "lat(iii)": n - k,
            "lat(iv)": n - k - 2, "lat(v)": n - k - 1, "lat(vi)": n - k - 1,
            "lat(vii)": n - k - 1, "lat(viii)": n - k, "lat(ix)": n - k,
            "lat(x)": n - k}[lat_id]


def lattice_threshold_corrected(chart: ChartSpec, lat_id: str) -> int:
    if lat_id == "lat(x)":
        return chart.n - chart.kappa - 1
    return lattice_threshold_printed(chart, lat_id)


def trace_group(chart: ChartSpec) -> list[IndexSet]:
    """S_{κ+1}, …, S_M: the balanced weight-(1,…,1) sets sharing the worst term e_top."""
    return [S_ij(chart.n, i, i) for i in range(chart.kappa + 1, chart.M + 1)]


def predicted_membership(chart: ChartSpec, coeffs: Mapping[IndexSet, LaurentPi]) -> bool:
    """Lattice membership of Σ a_S (g_S − sgn g_{S⊥}) from the valuation conditions."""
    n, k = chart.n, chart.kappa
    group = set(trace_group(chart))
    for S, a in coeffs.items():
        if S in group or not a:
            continue
        lat = LATTICE_OF_DUAL[dual_case(chart, S).case_id]
        if a.valuation() < lattice_threshold_corrected(chart, lat):
            return False
    gs = [S for S in trace_group(chart) if coeffs.get(S)]
    if not gs:
        return True
    total = LaurentPi()
    for S in trace_group(chart):
        a = coeffs.get(S)
        if a:
            total = total + (a if ij_of(S)[0] % 2 == 0 else -a)
    mn = min(coeffs[S].valuation() for S in gs)
    if not total:
        return mn >= n - k - 1
    if total.valuation() == mn:
        return mn >= n - k
    return mn >= n - k - 1


def combination(chart: ChartSpec, coeffs: Mapping[IndexSet, LaurentPi]) -> WedgeElement:
    w = WedgeElement(chart.n)
    for S, a in sorted(coeffs.items(), key=lambda sa: sa[0].members):
        if a:
            w = w + dual_element(chart, S).scale(a)
    return w


def fp_boundary_flag(chart: ChartSpec, coeffs: Mapping[IndexSet, LaurentPi], p: int) -> bool:
    """True when Σ(−1)^i a_i over the trace group has a different leading
    valuation after reducing coefficients mod p (the (xii) boundary case)."""
    total = LaurentPi()
    for S in trace_group(chart):
        a = coeffs.get(S)
        if a:
            total = total + (a if ij_of(S)[0] % 2 == 0 else -a)
    modp = {e: c for e, c in total.c.items()
            if (c.numerator * pow(c.denominator, -1, p)) % p}
    vq = total.valuation()
    vp = min(modp) if modp else INF
    return vq != vp


# ---------------------------------------------------------------- special-fiber image

Vector = dict  # IndexSet bits -> Fraction


def _relation(vecs: Sequence[Vector]) -> dict | None:
    """A rational linear relation among ``vecs`` or None if independent."""
    pivots: list = []
    for idx, v in enumerate(vecs):
        v = dict(v)
        comb = {idx: Fraction(1)}
        for pk, pv, pc in pivots:
            f = v.get(pk)
            if f:
                f = f / pv[pk]
                for key, x in pv.items():
                    y = v.get(key, 0) - f * x
                    if y:
                        v[key] = y
                    else:
                        v.pop(key, None)
                for key, x in pc.items():
                    y = comb.get(key, 0) - f * x
                    if y:
                        comb[key] = y
                    else:
                        comb.pop(key, None)
        if not v:
            return comb
        pivots.append((min(v), v, comb))
    return None


def rank(vecs: Sequence[Vector]) -> int:
    pivots: list = []
    for v in vecs:
        v = dict(v)
        for pk, pv in pivots:
            f = v.get(pk)
            if f:
                f = f / pv[pk]
                for key, x in pv.items():
                    y = v.get(key, 0) - f * x
                    if y:
                        v[key] = y
                    else:
                        v.pop(key, None)
        if v:
            pivots.append((min(v), v))
    return len(pivots)


def in_span(v: Vector, basis: Sequence[Vector]) -> bool:
    return rank(list(basis) + [v]) == rank(basis)


def saturate(elems: Sequence[WedgeElement]) -> list[WedgeElement]:
    """O_F-basis of (F-span of elems) ∩ W(Λ_κ): integral rows with independent reductions."""
    rows = [e.shift(-e.valuation()) for e in elems if e]
    while True:
        rel = _relation([r.reduction() for r in rows])
        if rel is None:
            return rows
        idx = max(key for key, x in rel.items() if x)
        w = WedgeElement(rows[0].n)
        for key, x in sorted(rel.items()):
            w = w + rows[key].scale(x)
        rows[idx] = w.shift(-w.valuation())


def lattice_image(chart: ChartSpec) -> list[Vector]:
    """Basis of L^{n−1,1}_{−1}(Λ_κ)(k): reductions of a saturated lattice basis."""
    by_weight: dict = {}
    for S in balanced_sets(chart.n):
        by_weight.setdefault(S.weight(), []).append(dual_element(chart, S))
    out = []
    for wt in sorted(by_weight):
        out += [r.reduction() for r in saturate(by_weight[wt])]
    return out


# ---------------------------------------------------------------- spin basis

@dataclass(frozen=True)
class SpinBasisElement:
    case_id: str
    vector: tuple   # ((IndexSet, Fraction), ...)

    def as_vector(self) -> Vector:
        return {S.bits: c for S, c in self.vector}

    def __str__(self):
        return format_terms(self.vector)


@dataclass(frozen=True)
class TraceConstraint:
    """Σ_{i=κ+1}^{m} (−1)^i c_i [+ ½(−1)^{m+1} c_{m+1} for odd n] = 0 on
    w = Σ c_i E_i, E_i = e_{[i,î]} − (−1)^n e_{[i∨,î∨]} (E_{m+1} = e_{[m+1,·]})."""
    first: int
    last: int
    weights: tuple     # ((i, weight), ...)

    def __str__(self):
        terms = " + ".join(f"({w})*c_{i}" for i, w in self.weights)
        return f"{terms} = 0" if terms else "(empty)"


def _E(n: int, i: int) -> dict:
    iv = n + 1 - i
    if i == iv:
        return {e_bracket(n, i, i): Fraction(1)}
    return {e_bracket(n, i, i): Fraction(1), e_bracket(n, iv, iv): Fraction(-_sgn(n))}


def trace_constraint(chart: ChartSpec) -> TraceConstraint:
    n, k, m = chart.n, chart.kappa, chart.m
    ws = [(i, Fraction(_sgn(i))) for i in range(k + 1, m + 1)]
    if n % 2 == 1 and k + 1 <= m + 1:
        ws.append((m + 1, Fraction(_sgn(m + 1), 2)))
    return TraceConstraint(k + 1, chart.M, tuple(ws))


def spin_basis(chart: ChartSpec) -> list[SpinBasisElement]:
    """Basis (i)–(xi) of L^{n−1,1}_{−1}(Λ_κ) over the special fiber (corrected form)."""
    n, k = chart.n, chart.kappa
    eb = lambda a, b: e_bracket(n, a, b)
    out: list[SpinBasisElement] = [SpinBasisElement("cor(i)", _frozen({top_set(n): Fraction(1)}))]
    for i in range(1, n + 1):
        if i != n + 1 - i:
            out.append(SpinBasisElement("cor(ii)", _frozen({eb(i, n + 1 - i): Fraction(1)})))
    for S in balanced_sets(n):
        i, j = ij_of(S)
        iv, jv = n + 1 - i, n + 1 - j
        if i == j or jv == i:
            continue
        sij = _sgn(n + i + j)
        if jv <= k:
            cid, d = "cor(iii)", {eb(i, j): Fraction(1), eb(jv, iv): Fraction(-sij)}
        elif i <= k and jv < n - k + 1:
            cid, d = "cor(iv)", {eb(jv, iv): Fraction(1)}
        elif i <= k:
            cid, d = "cor(v)", {eb(i, j): Fraction(1), eb(jv, iv): Fraction(sij)}
        elif jv < n - k + 1:
            cid, d = "cor(vi)", {eb(i, j): Fraction(1), eb(jv, iv): Fraction(-sij)}
        elif i < n - k + 1:
            cid, d = "cor(vii)", {eb(i, j): Fraction(1)}
        else:
            cid, d = "cor(viii)", {eb(i, j): Fraction(1), eb(jv, iv): Fraction(-sij)}
        out.append(SpinBasisElement(cid, _frozen(d)))
    for i in range(1, min(k, chart.M) + 1):
        out.append(SpinBasisElement("cor(ix)", _frozen({eb(i, i): Fraction(1),
                                                       eb(n + 1 - i, n + 1 - i): Fraction(_sgn(n))})))
    out += trace_span_generators(chart)
    return out


def trace_span_generators(chart: ChartSpec) -> list[SpinBasisElement]:
    """Basis of the trace-constrained span (x)/(xi): E_i − (φ_i/φ_r) E_r, r = κ+1."""
    tc = trace_constraint(chart)
    if len(tc.weights) < 2:
        return []
    (r, wr), rest = tc.weights[0], tc.weights[1:]
    n = chart.n
    out = []
    for i, wi in rest:
        d: dict = {}
        for S, c in _E(n, i).items():
            _acc(d, S, c)
        for S, c in _E(n, r).items():
            _acc(d, S, -c * wi / wr)
        out.append(SpinBasisElement("cor(x-xi)", _frozen(d)))
    return out


def printed_cor_x(chart: ChartSpec) -> list[SpinBasisElement]:
    """Elements e_{[i,î]} + (−1)^n e_{[i∨,î∨]} for κ < i ≤ M, as printed in item (x)."""
    n = chart.n
    out = []
    for i in range(chart.kappa + 1, chart.M + 1):
        d: dict = {}
        _acc(d, e_bracket(n, i, i), 1)
        _acc(d, e_bracket(n, n + 1 - i, n + 1 - i), _sgn(n))
        out.append(SpinBasisElement("printed cor(x)", _frozen(d)))
    return out
