"""
Buchberger's algorithm with the Gebauer-Moeller pair criteria, reduced
(canonical) bases, membership/equality/intersection, initial ideals and
Krull dimension of monomial ideals.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .poly_core import MonomialOrder, Poly, PolyRing, Var, W, _FMASK, dump_ideal_text, load_ideal_text


class BudgetExceeded(RuntimeError):
    """A Groebner computation hit a configured resource cap."""

    def __init__(self, kind: str, limit: int, value: int):
        super().__init__(f"budget exceeded: {kind} {value} > {limit}")
        self.kind = kind
        self.limit = limit
        self.value = value


@dataclass
class Budget:
    max_pairs: int = 400_000
    max_degree: int = 24
    max_terms: int = 200_000

    @classmethod
    def from_env(cls, **overrides) -> "Budget":
        b = cls()
        for attr, env in (("max_pairs", "LMVERIFY_BUDGET_PAIRS"),
                          ("max_degree", "LMVERIFY_BUDGET_DEGREE"),
                          ("max_terms", "LMVERIFY_BUDGET_TERMS")):
            if os.environ.get(env):
                setattr(b, attr, int(os.environ[env]))
        for k, v in overrides.items():
            if v is not None:
                setattr(b, k, v)
        return b


@dataclass
class GBStats:
    pairs: int = 0
    zero_reductions: int = 0
    max_degree: int = 0
    basis_size: int = 0


# ---------------------------------------------------------------- internals

class _Elt:
    """Monic polynomial prepared for reduction: terms sorted by descending key."""

    __slots__ = ("lm", "lkey", "supp", "deg", "tail", "nterms")

    def __init__(self, ring: PolyRing, terms: dict):
        key = ring.key
        items = sorted(((key(m), m, c) for m, c in terms.items()), reverse=True)
        lk, lm, lc = items[0]
        f = ring.field
        inv = f.inv(lc)
        self.lm = lm
        self.lkey = lk
        self.supp = ring.support(lm)
        self.deg = ring.mdeg(lm)
        self.tail = [(k, m, f.norm(c * inv)) for k, m, c in items[1:]]
        self.nterms = len(items)

    def as_dict(self, ring: PolyRing) -> dict:
        d = {self.lm: ring._one}
        for _, m, c in self.tail:
            d[m] = c
        return d


def _nf(ring: PolyRing, terms: dict, G: Sequence[_Elt], full: bool = True) -> dict:
    """Normal form of ``terms`` (dict m -> c) w.r.t. monic elements G."""
    if not terms or not G:
        return dict(terms)
    key = ring.key
    guard = ring.guard
    norm = ring.field.norm
    work = {}
    for m, c in terms.items():
        work[key(m)] = [m, c]
    heap = [-k for k in work]
    heapq.heapify(heap)
    rem = {}
    pop, push = heapq.heappop, heapq.heappush
    while heap:
        k = -pop(heap)
        t = work.pop(k, None)
        if t is None:
            continue
        m, c = t
        mg = m | guard
        for g in G:
            if (mg - g.lm) & guard == guard:
                break
        else:
            rem[m] = c
            if not full:
                for m2, c2 in work.values():
                    rem[m2] = c2
                return rem
            continue
        q = m - g.lm
        qk = k - g.lkey
        for gk, gm, gc in g.tail:
            nk = qk + gk
            e = work.get(nk)
            if e is None:
                work[nk] = [q + gm, norm(-c * gc)]
                push(heap, -nk)
            else:
                v = norm(e[1] - c * gc)
                if v:
                    e[1] = v
                else:
                    del work[nk]
    return rem


def _lcm(a: int, b: int) -> int:
    out, shift = 0, 0
    while a or b:
        x, y = a & _FMASK, b & _FMASK
        out |= (x if x > y else y) << shift
        a >>= W
        b >>= W
        shift += W
    return out


def _spoly_terms(ring: PolyRing, f: _Elt, g: _Elt, L: int) -> dict:
    norm = ring.field.norm
    qf, qg = L - f.lm, L - g.lm
    out: dict = {}
    for _, m, c in f.tail:
        out[qf + m] = c
    for _, m, c in g.tail:
        mm = qg + m
        v = out.get(mm)
        if v is None:
            out[mm] = norm(-c)
        else:
            v = norm(v - c)
            if v:
                out[mm] = v
            else:
                del out[mm]
    return out


# ---------------------------------------------------------------- public API

def reduce(f: Poly, G: Sequence[Poly], order: MonomialOrder | None = None) -> Poly:
    """Division remainder of f by G (first eligible divisor in list order)."""
    ring = f.ring
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
        f = ring.convert(f)
        G = [ring.convert(g) for g in G]
    if any(not g for g in G):
        raise ValueError("divisors must be nonzero")
    elts = [_Elt(ring, g.terms) for g in G]
    return Poly(ring, _nf(ring, f.terms, elts, full=True))


def s_polynomial(f: Poly, g: Poly) -> Poly:
    """(L/lt f)·f − (L/lt g)·g with L = lcm of leading monomials."""
    ring = f.ring
    L = _lcm(f.lm(), g.lm())
    a = Poly(ring, {L - f.lm(): ring.field.inv(f.lc())})
    b = Poly(ring, {L - g.lm(): ring.field.inv(g.lc())})
    return a * f - b * g


def groebner(gens: Iterable[Poly], ring: PolyRing | None = None,
             budget: Budget | None = None, stats: GBStats | None = None) -> list[Poly]:
    """Reduced Groebner basis, monic, sorted by ascending leading monomial."""
    gens = [g for g in gens if g]
    if ring is None:
        if not gens:
            raise ValueError("ring required for an empty generator list")
        ring = gens[0].ring
    gens = [ring.convert(g) if g.ring is not ring else g for g in gens]
    budget = budget or Budget.from_env()
    stats = stats if stats is not None else GBStats()
    if not gens:
        return []
    key = ring.key

    elts: list[_Elt] = []
    active: list[int] = []
    pairs: list = []   # heap of (deg, key, i, j, L)

    def add(terms: dict):
        h = _Elt(ring, terms)
        if h.deg > budget.max_degree:
            raise BudgetExceeded("degree", budget.max_degree, h.deg)
        if h.nterms > budget.max_terms:
            raise BudgetExceeded("terms", budget.max_terms, h.nterms)
        stats.max_degree = max(stats.max_degree, h.deg)
        hi = len(elts)
        elts.append(h)
        # Gebauer-Moeller
        C = [(g, _lcm(h.lm, elts[g].lm)) for g in active]
        D = []
        for idx, (g, L) in enumerate(C):
            if h.supp & elts[g].supp == 0:
                D.append((g, L))
                continue
            Lg = L | ring.guard
            if any((Lg - L2) & ring.guard == ring.guard for _, L2 in C[idx + 1:]) or \
                    any((Lg - L2) & ring.guard == ring.guard for _, L2 in D):
                continue
            D.append((g, L))
        E = [(g, L) for g, L in D if h.supp & elts[g].supp]
        hm = h.lm
        keep = []
        for p in pairs:
            _, _, i, j, L = p
            if (((L | ring.guard) - hm) & ring.guard == ring.guard
                    and _lcm(elts[i].lm, hm) != L and _lcm(elts[j].lm, hm) != L):
                continue
            keep.append(p)
        for g, L in E:
            keep.append((ring.mdeg(L), key(L), g, hi, L))
        heapq.heapify(keep)
        pairs[:] = keep
        active[:] = [g for g in active
                     if not ((elts[g].lm | ring.guard) - hm) & ring.guard == ring.guard] + [hi]

    for g in sorted(gens, key=lambda p: (p.degree(), key(p.lm()))):
        r = _nf(ring, g.terms, [elts[i] for i in active])
        if r:
            if len(r) == 1 and 0 in r:
                return [ring.one()]
            add(r)

    while pairs:
        _, _, i, j, L = heapq.heappop(pairs)
        stats.pairs += 1
        if stats.pairs > budget.max_pairs:
            raise BudgetExceeded("pairs", budget.max_pairs, stats.pairs)
        s = _spoly_terms(ring, elts[i], elts[j], L)
        r = _nf(ring, s, [elts[k] for k in active])
        if not r:
            stats.zero_reductions += 1
            continue
        if len(r) == 1 and 0 in r:
            stats.basis_size = 1
            return [ring.one()]
        add(r)

    G = sorted((elts[i] for i in active), key=lambda e: e.lkey)
    out = []
    for idx, g in enumerate(G):
        others = G[:idx] + G[idx + 1:]
        tail = {m: c for _, m, c in g.tail}
        red = _nf(ring, tail, others)
        red[g.lm] = ring._one
        out.append(Poly(ring, red))
    stats.basis_size = len(out)
    return out


def interreduce(gens: Iterable[Poly]) -> list[Poly]:
    """Reduced form of a set that is already a Groebner basis (no S-pairs)."""
    gens = [g for g in gens if g]
    if not gens:
        return []
    ring = gens[0].ring
    elts = sorted((_Elt(ring, g.terms) for g in gens), key=lambda e: e.lkey)
    minimal: list[_Elt] = []
    for e in elts:
        if any(((e.lm | ring.guard) - o.lm) & ring.guard == ring.guard for o in minimal):
            continue
        minimal.append(e)
    out = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        red = _nf(ring, {m: c for _, m, c in g.tail}, others)
        red[g.lm] = ring._one
        out.append(Poly(ring, red))
    return out


def failing_s_pairs(G: Sequence[Poly], limit: int | None = None) -> list[tuple[int, int, Poly]]:
    """Pairs whose S-polynomial does not reduce to zero modulo G."""
    if not G:
        return []
    ring = G[0].ring
    elts = [_Elt(ring, g.terms) for g in G]
    bad = []
    for i in range(len(elts)):
        for j in range(i + 1, len(elts)):
            L = _lcm(elts[i].lm, elts[j].lm)
            r = _nf(ring, _spoly_terms(ring, elts[i], elts[j], L), elts)
            if r:
                bad.append((i, j, Poly(ring, r)))
                if limit and len(bad) >= limit:
                    return bad
    return bad


def is_groebner(G: Sequence[Poly]) -> bool:
    return not failing_s_pairs(G, limit=1)


# ---------------------------------------------------------------- ideals

class Ideal:
    """Generators in a fixed ring; the reduced Groebner basis is cached."""

    def __init__(self, gens: Iterable[Poly], ring: PolyRing | None = None,
                 name: str = "", provenance: Sequence[str] | None = None):
        gens = list(gens)
        if ring is None:
            if not gens:
                raise ValueError("ring required for an empty ideal")
            ring = gens[0].ring
        self.ring = ring
        self.gens = [ring.convert(g) for g in gens]
        self.name = name
        self.provenance = list(provenance) if provenance is not None else [""] * len(self.gens)
        self._basis: list[Poly] | None = None
        self.stats = GBStats()

    def basis(self, budget: Budget | None = None) -> list[Poly]:
        if self._basis is None:
            self._basis = groebner(self.gens, self.ring, budget, self.stats)
        return self._basis

    def in_ring(self, ring: PolyRing) -> "Ideal":
        return Ideal([ring.convert(g) for g in self.gens], ring, self.name, self.provenance)

    def reduce(self, f: Poly, budget: Budget | None = None) -> Poly:
        G = self.basis(budget)
        f = self.ring.convert(f)
        if not G:
            return f
        return Poly(self.ring, _nf(self.ring, f.terms, [_Elt(self.ring, g.terms) for g in G]))

    def _elts(self, budget=None) -> list[_Elt]:
        return [_Elt(self.ring, g.terms) for g in self.basis(budget)]

    def contains(self, f: Poly, budget: Budget | None = None) -> bool:
        return not self.reduce(f, budget)

    def non_members(self, fs: Iterable[Poly], budget: Budget | None = None) -> list[Poly]:
        elts = self._elts(budget)
        out = []
        for f in fs:
            f = self.ring.convert(f)
            if _nf(self.ring, f.terms, elts) if elts else f.terms:
                out.append(f)
        return out

    def contains_ideal(self, other: "Ideal", budget: Budget | None = None) -> bool:
        return not self.non_members(other.gens, budget)

    def is_unit(self, budget: Budget | None = None) -> bool:
        G = self.basis(budget)
        return len(G) == 1 and G[0].lm() == 0

    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.gens + [self.ring.convert(g) for g in other.gens], self.ring,
                     f"({self.name})+({other.name})", self.provenance + other.provenance)

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal([f * self.ring.convert(g) for f in self.gens for g in other.gens], self.ring,
                     f"({self.name})*({other.name})")

    def __repr__(self):
        return f"Ideal({self.name or '?'}, {len(self.gens)} generators)"


def ideal_membership(f: Poly, I: Ideal, budget: Budget | None = None) -> bool:
    return I.contains(f, budget)


def ideal_equal(I: Ideal, J: Ideal, budget: Budget | None = None) -> bool:
    if not I.ring.same(J.ring):
        raise ValueError("ideals live in different rings/orders")
    A, B = I.basis(budget), J.basis(budget)
    return len(A) == len(B) and all(a.terms == b.terms for a, b in zip(A, B))


def eliminate(I: Ideal, drop: Sequence[Var], budget: Budget | None = None,
              keep_order: str = "grevlex") -> Ideal:
    """I ∩ k[remaining variables], via a block order with ``drop`` on top."""
    drop = list(drop)
    rest = [v for v in I.ring.gens if v not in set(drop)]
    big = PolyRing(drop + rest, MonomialOrder.block(("grevlex", len(drop)), (keep_order, len(rest))),
                   I.ring.field)
    G = groebner([big.convert(g) for g in I.gens], big, budget)
    dmask = (1 << len(drop)) - 1
    small = PolyRing(rest, keep_order, I.ring.field)
    kept = []
    for g in G:
        s = 0
        for m in g.terms:
            s |= big.support(m)
        if not s & dmask:
            kept.append(small.convert(g))
    return Ideal(kept, small, f"elim({I.name})")


def ideal_intersect(I: Ideal, J: Ideal, budget: Budget | None = None) -> Ideal:
    """I ∩ J = (t·I + (1−t)·J) ∩ k[x] with t in a dominating block."""
    ring = I.ring
    t = Var("t_aux")
    big = PolyRing((t,) + ring.gens, MonomialOrder(((("grevlex", 1),) + ring.order.blocks)), ring.field)
    tv = big.var(t)
    gens = [tv * big.convert(f) for f in I.gens] + [(1 - tv) * big.convert(g) for g in J.gens]
    G = groebner(gens, big, budget)
    out = [ring.convert(g) for g in G if all(not (m & _FMASK) for m in g.terms)]
    return Ideal(out, ring, f"({I.name})∩({J.name})")


# ---------------------------------------------------------------- monomial ideals

@dataclass
class MonomialIdeal:
    ring: PolyRing
    gens: list = field(default_factory=list)    # packed monomials, minimal

    @staticmethod
    def from_monomials(ring: PolyRing, monos: Iterable[int]) -> "MonomialIdeal":
        ms = sorted(set(monos), key=lambda m: (ring.mdeg(m), ring.key(m)))
        minimal: list[int] = []
        g = ring.guard
        for m in ms:
            if any(((m | g) - o) & g == g for o in minimal):
                continue
            minimal.append(m)
        return MonomialIdeal(ring, minimal)

    def is_proper(self) -> bool:
        return 0 not in self.gens

    def strings(self) -> list[str]:
        return [self.ring.mstr(m) for m in self.gens]


def initial_ideal(I: Ideal, budget: Budget | None = None) -> MonomialIdeal:
    return MonomialIdeal.from_monomials(I.ring, [g.lm() for g in I.basis(budget)])


def is_squarefree(M: MonomialIdeal) -> bool:
    return all(max(M.ring.unpack(m)) <= 1 for m in M.gens)


def dimension(M: MonomialIdeal, num_vars: int | None = None) -> int:
    """Krull dimension of k[x]/M = nvars − minimum size of a set hitting every support."""
    if not M.is_proper():
        raise ValueError("the unit ideal has no dimension")
    n = M.ring.nvars if num_vars is None else num_vars
    supports = sorted({M.ring.support(m) for m in M.gens}, key=lambda s: bin(s).count("1"))
    # drop supports that contain another support (hitting the smaller suffices)
    minimal: list[int] = []
    for s in supports:
        if not any(o & s == o for o in minimal):
            minimal.append(s)
    best = [n + 1]
    memo: dict = {}

    def search(chosen: int, size: int):
        if size >= best[0]:
            return
        for s in minimal:
            if not s & chosen:
                break
        else:
            best[0] = size
            return
        sig = chosen
        if memo.get(sig, n + 2) <= size:
            return
        memo[sig] = size
        bits = s
        while bits:
            low = bits & -bits
            search(chosen | low, size + 1)
            bits ^= low

    search(0, 0)
    return n - best[0]


# ---------------------------------------------------------------- text I/O

def format_ideal(I: Ideal, labels: bool = False) -> str:
    """Header ``order: <kind> v1 > v2 > …`` then one generator per line."""
    text = dump_ideal_text(I.gens, I.ring)
    if not labels:
        return text
    lines = text.splitlines()
    out = lines[:1] + [f"{g}    # {lab}" if lab else g for g, lab in zip(lines[1:], I.provenance)]
    return "\n".join(out) + "\n"


def parse_ideal(text: str, name: str = "") -> Ideal:
    """Inverse of :func:`format_ideal`; ``#`` starts a comment."""
    text = "\n".join(ln.split("#", 1)[0] for ln in text.splitlines())
    ring, gens = load_ideal_text(text)
    return Ideal(gens, ring, name)
