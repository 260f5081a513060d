"""
Exact sparse multivariate polynomials over Q or F_p, plus Laurent
polynomials in a uniformizer pi.

Monomials are packed into a single Python int (16-bit field per variable,
top bit of each field kept as a guard).  Every supported monomial order is
a linear weight function on exponent vectors, so the order key of a product
is the sum of the keys, and divisibility is one subtraction and a mask.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

try:  # gmpy2 rationals are an order of magnitude faster than Fraction
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = Fraction

W = 16                      # bits per exponent field
_FMASK = (1 << W) - 1
MAX_EXP = (1 << (W - 1)) - 1


class FieldMismatch(TypeError):
    pass


# ---------------------------------------------------------------- fields

class Field:
    """Coefficient field: ``QQ`` or ``GF(p)`` for odd p."""

    char = 0

    def __call__(self, x):
        return self.convert(x)


class RationalField(Field):
    name = "QQ"
    char = 0

    def convert(self, x):
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fraction):
            return _mpq(x.numerator, x.denominator)
        return _mpq(x)

    def norm(self, x):
        return x

    def inv(self, x):
        return 1 / x

    def fmt(self, x) -> str:
        return str(Fraction(int(x.numerator), int(x.denominator)))

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class PrimeField(Field):

    def __init__(self, p: int):
        if p == 2:
            raise ValueError("characteristic 2 is not supported")
        if p < 3 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not an odd prime")
        self.p = p
        self.char = p
        self.name = f"GF({p})"

    def convert(self, x):
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fraction) or hasattr(x, "denominator"):
            num, den = int(x.numerator), int(x.denominator)
            if den % self.p == 0:
                raise ZeroDivisionError(f"denominator {den} vanishes mod {self.p}")
            return num * pow(den, -1, self.p) % self.p
        return int(x) % self.p

    def norm(self, x):
        return x % self.p

    def inv(self, x):
        return pow(x, -1, self.p)

    def fmt(self, x) -> str:
        return str(x)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return self.name


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


# ---------------------------------------------------------------- variables

@dataclass(frozen=True, order=True)
class Var:
    """Structured variable id: family tag plus integer indices."""
    family: str
    idx: tuple = ()

    @property
    def name(self) -> str:
        return self.family + "".join(f"_{i}" for i in self.idx)

    def __str__(self):
        return self.name

    @staticmethod
    def parse(name: str) -> "Var":
        parts = name.split("_")
        idx = []
        while len(parts) > 1 and parts[-1].isdigit():
            idx.insert(0, int(parts.pop()))
        return Var("_".join(parts), tuple(idx))


def var(family: str, *idx: int) -> Var:
    return Var(family, tuple(idx))


# ---------------------------------------------------------------- orders

@dataclass(frozen=True)
class MonomialOrder:
    """Order on monomials of a fixed, ranked variable list.

    ``blocks`` is a tuple of (kind, size) with kind in {"lex", "grevlex"};
    a single block is a plain order, several blocks an elimination order
    (earlier blocks dominate).  Within a block the first variable ranks
    highest.
    """
    blocks: tuple

    @property
    def kind(self) -> str:
        if len(self.blocks) > 1:
            return "block"
        return self.blocks[0][0]

    @staticmethod
    def lex(nvars: int) -> "MonomialOrder":
        return MonomialOrder((("lex", nvars),))

    @staticmethod
    def grevlex(nvars: int) -> "MonomialOrder":
        return MonomialOrder((("grevlex", nvars),))

    @staticmethod
    def block(*blocks) -> "MonomialOrder":
        return MonomialOrder(tuple((k, s) for k, s in blocks if s > 0))

    def weights(self) -> list[int]:
        out: list[int] = []
        for kind, size in self.blocks:
            if kind == "lex":
                w = [1 << (W * (size - 1 - i)) for i in range(size)]
                span = W * size
            elif kind == "grevlex":
                top = 1 << (W * size)
                w = [top - (1 << (W * i)) for i in range(size)]
                span = W * (size + 1)
            else:
                raise ValueError(f"unknown order kind {kind!r}")
            out = [c << span for c in out] + w
        return out

    def describe(self, names: Sequence[str]) -> str:
        if len(self.blocks) == 1:
            return f"{self.blocks[0][0]} " + " > ".join(names)
        parts, k = [], 0
        for kind, size in self.blocks:
            parts.append(f"{kind}(" + " > ".join(names[k:k + size]) + ")")
            k += size
        return "block " + " >> ".join(parts)


# ---------------------------------------------------------------- rings

class PolyRing:
    """Polynomial ring over ``field`` in ranked variables ``gens``."""

    def __init__(self, gens: Sequence[Var], order: MonomialOrder | str = "grevlex",
                 field: Field = QQ):
        gens = tuple(gens)
        if len(set(gens)) != len(gens):
            raise ValueError("duplicate variables")
        self.gens = gens
        self.nvars = len(gens)
        if isinstance(order, str):
            order = MonomialOrder(((order, self.nvars),))
        if sum(s for _, s in order.blocks) != self.nvars:
            raise ValueError("order blocks do not cover the variables")
        self.order = order
        self.field = field
        self.index = {v: i for i, v in enumerate(gens)}
        self._w = order.weights()
        self.guard = sum(1 << (W * i + W - 1) for i in range(self.nvars))
        self._keys: dict[int, int] = {0: 0}
        self._zero = field.convert(0)
        self._one = field.convert(1)

    # -- monomials
    def pack(self, exps: Sequence[int]) -> int:
        m = 0
        for i, e in enumerate(exps):
            if e < 0 or e > MAX_EXP:
                raise OverflowError("exponent out of range")
            m |= e << (W * i)
        return m

    def unpack(self, m: int) -> tuple:
        return tuple((m >> (W * i)) & _FMASK for i in range(self.nvars))

    def key(self, m: int) -> int:
        k = self._keys.get(m)
        if k is None:
            k = 0
            i = 0
            x = m
            w = self._w
            while x:
                e = x & _FMASK
                if e:
                    k += e * w[i]
                x >>= W
                i += 1
            self._keys[m] = k
        return k

    def divides(self, a: int, b: int) -> bool:
        """Monomial a divides monomial b."""
        g = self.guard
        return ((b | g) - a) & g == g

    def mdeg(self, m: int) -> int:
        d = 0
        while m:
            d += m & _FMASK
            m >>= W
        return d

    def support(self, m: int) -> int:
        """Bit mask of variables occurring in m."""
        s, i = 0, 0
        while m:
            if m & _FMASK:
                s |= 1 << i
            m >>= W
            i += 1
        return s

    def mlcm(self, a: int, b: int) -> int:
        ea, eb = self.unpack(a), self.unpack(b)
        return self.pack([max(x, y) for x, y in zip(ea, eb)])

    def mstr(self, m: int) -> str:
        parts = []
        for v, e in zip(self.gens, self.unpack(m)):
            if e == 1:
                parts.append(v.name)
            elif e > 1:
                parts.append(f"{v.name}^{e}")
        return "*".join(parts) if parts else "1"

    # -- elements
    def __call__(self, x) -> "Poly":
        if isinstance(x, Poly):
            return self.convert(x)
        if isinstance(x, str):
            return parse_poly(x, self)
        if isinstance(x, Var):
            return self.var(x)
        c = self.field.convert(x)
        return Poly(self, {0: c} if c else {})

    def var(self, v: Var | str) -> "Poly":
        if isinstance(v, str):
            v = Var.parse(v)
        i = self.index[v]
        return Poly(self, {1 << (W * i): self._one})

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {0: self._one})

    def monomial(self, exps: Mapping[Var, int] | Sequence[int], coeff=1) -> "Poly":
        if isinstance(exps, Mapping):
            e = [0] * self.nvars
            for v, k in exps.items():
                e[self.index[v]] += k
            exps = e
        c = self.field.convert(coeff)
        return Poly(self, {self.pack(exps): c} if c else {})

    def convert(self, f: "Poly") -> "Poly":
        """Move f into this ring (variables matched by id)."""
        if f.ring is self:
            return f
        src = f.ring
        perm = [self.index.get(v) for v in src.gens]
        terms: dict[int, object] = {}
        same_field = src.field == self.field
        for m, c in f.terms.items():
            e = src.unpack(m)
            nm = 0
            for i, k in enumerate(e):
                if k:
                    if perm[i] is None:
                        raise KeyError(f"{src.gens[i]} is not a variable of the target ring")
                    nm |= k << (W * perm[i])
            c2 = c if same_field else self.field.convert(
                Fraction(int(c.numerator), int(c.denominator)) if hasattr(c, "denominator") else c)
            if c2:
                terms[nm] = c2
        return Poly(self, terms)

    def with_order(self, order: MonomialOrder | str, gens: Sequence[Var] | None = None) -> "PolyRing":
        return PolyRing(gens if gens is not None else self.gens, order, self.field)

    def same(self, other: "PolyRing") -> bool:
        return (self is other or (self.gens == other.gens and self.order == other.order
                                  and self.field == other.field))

    def __repr__(self):
        return f"PolyRing({self.field}, {self.order.describe([v.name for v in self.gens])})"


class Poly:
    """Immutable polynomial: dict packed-monomial -> nonzero coefficient."""

    __slots__ = ("ring", "terms", "_lm")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._lm = None

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring is self.ring:
                return other
            if other.ring.field != self.ring.field:
                raise FieldMismatch(f"{other.ring.field} vs {self.ring.field}")
            if other.ring.gens != self.ring.gens:
                raise FieldMismatch("different variable universes")
            return Poly(self.ring, other.terms)
        return self.ring(other)

    # -- arithmetic
    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        norm = self.ring.field.norm
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = t.get(m)
            if v is None:
                t[m] = c
            else:
                v = norm(v + c)
                if v:
                    t[m] = v
                else:
                    del t[m]
        return Poly(self.ring, t)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        norm = self.ring.field.norm
        return Poly(self.ring, {m: norm(-c) for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        other = self._coerce(other)
        norm = self.ring.field.norm
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 + m2
                v = t.get(m)
                t[m] = c1 * c2 if v is None else v + c1 * c2
        return Poly(self.ring, {m: norm(c) for m, c in t.items() if norm(c)})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        out, base = self.ring.one(), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "Poly":
        c = self.ring.field.convert(c)
        norm = self.ring.field.norm
        if not c:
            return self.ring.zero()
        return Poly(self.ring, {m: norm(v * c) for m, v in self.terms.items()})

    def __truediv__(self, c) -> "Poly":
        f = self.ring.field
        return self.scale(f.inv(f.convert(c)))

    # -- structure
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring.gens == other.ring.gens and self.terms == other.terms
        try:
            return self == self.ring(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def lm(self) -> int:
        """Leading (packed) monomial."""
        if self._lm is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading monomial")
            key = self.ring.key
            self._lm = max(self.terms, key=key)
        return self._lm

    def lc(self):
        return self.terms[self.lm()]

    def lt(self) -> "Poly":
        m = self.lm()
        return Poly(self.ring, {m: self.terms[m]})

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.lc()))

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(self.ring.mdeg(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        return len({self.ring.mdeg(m) for m in self.terms}) <= 1

    def sorted_terms(self) -> list:
        key = self.ring.key
        return sorted(self.terms.items(), key=lambda mc: key(mc[0]), reverse=True)

    def variables(self) -> list[Var]:
        s = 0
        for m in self.terms:
            s |= self.ring.support(m)
        return [v for i, v in enumerate(self.ring.gens) if s >> i & 1]

    def constant(self):
        return self.terms.get(0, self.ring._zero)

    def diff(self, v: Var | str) -> "Poly":
        """Formal partial derivative."""
        if isinstance(v, str):
            v = Var.parse(v)
        i = self.ring.index[v]
        shift = W * i
        unit = 1 << shift
        norm = self.ring.field.norm
        t = {}
        for m, c in self.terms.items():
            e = (m >> shift) & _FMASK
            if e:
                c2 = norm(c * e)
                if c2:
                    t[m - unit] = c2
        return Poly(self.ring, t)

    def evaluate(self, point: Mapping[Var, object]):
        """Evaluate at a full assignment of variables to field elements."""
        f = self.ring.field
        vals = [f.convert(point[v]) if v in point else None for v in self.ring.gens]
        total = f.convert(0)
        for m, c in self.terms.items():
            e = self.ring.unpack(m)
            term = c
            for i, k in enumerate(e):
                if k:
                    if vals[i] is None:
                        raise KeyError(f"no value for {self.ring.gens[i]}")
                    term = term * vals[i] ** k
            total = f.norm(total + term)
        return total

    def substitute(self, mapping: Mapping[Var, "Poly"], target: PolyRing | None = None) -> "Poly":
        """Ring map: variables in ``mapping`` replaced, others kept (must exist in target)."""
        target = target or self.ring
        images = []
        for v in self.ring.gens:
            if v in mapping:
                g = mapping[v]
                images.append(target(g) if not isinstance(g, Poly) else target.convert(g) if g.ring is not target else g)
            else:
                images.append(target.var(v) if v in target.index else None)
        powers: dict = {}
        out = target.zero()
        for m, c in self.terms.items():
            term = Poly(target, {0: c})
            for i, k in enumerate(self.ring.unpack(m)):
                if k:
                    if images[i] is None:
                        raise KeyError(f"{self.ring.gens[i]} has no image")
                    p = powers.get((i, k))
                    if p is None:
                        p = powers[(i, k)] = images[i] ** k
                    term = term * p
            out = out + term
        return out

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)})"


# ---------------------------------------------------------------- text format

def format_poly(f: Poly) -> str:
    if not f.terms:
        return "0"
    ring = f.ring
    out = []
    for m, c in f.sorted_terms():
        cs = ring.field.fmt(c)
        neg = cs.startswith("-")
        if neg:
            cs = cs[1:]
        body = ring.mstr(m)
        if m == 0:
            piece = cs
        elif cs == "1":
            piece = body
        else:
            piece = f"{cs}*{body}"
        if not out:
            out.append(("-" if neg else "") + piece)
        else:
            out.append((" - " if neg else " + ") + piece)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S))")


def _tokenize(s: str) -> list:
    toks, pos = [], 0
    s = s.strip()
    while pos < len(s):
        mt = _TOKEN.match(s, pos)
        if not mt:
            break
        pos = mt.end()
        if mt.group(1):
            toks.append(("num", int(mt.group(1))))
        elif mt.group(2):
            toks.append(("name", mt.group(2)))
        elif mt.group(3):
            toks.append(("op", mt.group(3)))
    return toks


def parse_poly(s: str, ring: PolyRing) -> Poly:
    """Parse ``+ - * / ^`` expressions with integer/rational literals."""
    toks = _tokenize(s)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def take():
        nonlocal pos
        t = toks[pos]
        pos += 1
        return t

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        acc = term()
        if sign < 0:
            acc = -acc
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        acc = power()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            rhs = power()
            if op == "*":
                acc = acc * rhs
            else:
                if len(rhs.terms) != 1 or 0 not in rhs.terms:
                    raise ValueError("division only by constants")
                acc = acc / rhs.terms[0]
        return acc

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, k = take()
            if kind != "num":
                raise ValueError("exponent must be an integer literal")
            base = base ** k
        return base

    def atom():
        kind, val = take()
        if kind == "num":
            return ring(val)
        if kind == "name":
            return ring.var(Var.parse(val))
        if val == "(":
            e = expr()
            if take() != ("op", ")"):
                raise ValueError("unbalanced parentheses")
            return e
        if val == "-":
            return -power()
        raise ValueError(f"unexpected token {val!r}")

    if not toks:
        raise ValueError("empty polynomial")
    out = expr()
    if pos != len(toks):
        raise ValueError(f"trailing input in {s!r}")
    return out


def parse_order_header(line: str) -> tuple[str, list[Var]]:
    """``order: lex a_1_1 > a_1_2 > ...`` -> (kind, ranked vars)."""
    body = line.split(":", 1)[1].strip()
    kind, _, rest = body.partition(" ")
    names = [t.strip() for t in rest.split(">") if t.strip()]
    return kind, [Var.parse(nm) for nm in names]


def dump_ideal_text(gens: Iterable[Poly], ring: PolyRing) -> str:
    names = [v.name for v in ring.gens]
    lines = ["order: " + ring.order.describe(names)]
    lines += [format_poly(g) for g in gens]
    return "\n".join(lines) + "\n"


def load_ideal_text(text: str, field: Field = QQ) -> tuple[PolyRing, list[Poly]]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    kind, gens = parse_order_header(lines[0])
    if kind not in ("lex", "grevlex"):
        raise ValueError("only plain lex/grevlex headers can be loaded")
    ring = PolyRing(gens, kind, field)
    return ring, [parse_poly(ln, ring) for ln in lines[1:]]


# ---------------------------------------------------------------- Laurent

class _Infinity:
    """Valuation of zero."""

    def __repr__(self):
        return "+inf"

    def __eq__(self, other):
        return isinstance(other, _Infinity)

    def __hash__(self):
        return hash("+inf")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return not isinstance(other, _Infinity)

    def __le__(self, other):
        return isinstance(other, _Infinity)

    def __ge__(self, other):
        return True


INF = _Infinity()


class LaurentPi:
    """Finite Laurent polynomial sum c_k pi^k with rational c_k."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        self.c = {k: Fraction(v) for k, v in (coeffs or {}).items() if v}

    @staticmethod
    def mono(k: int, c=1) -> "LaurentPi":
        return LaurentPi({k: c})

    @staticmethod
    def const(c) -> "LaurentPi":
        return LaurentPi({0: c})

    def valuation(self):
        return min(self.c) if self.c else INF

    def lead(self) -> Fraction:
        """Coefficient at the valuation."""
        return self.c[min(self.c)] if self.c else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        return self.c.get(k, Fraction(0))

    def __bool__(self):
        return bool(self.c)

    def __add__(self, o) -> "LaurentPi":
        o = _lp(o)
        d = dict(self.c)
        for k, v in o.c.items():
            d[k] = d.get(k, 0) + v
        return LaurentPi(d)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPi({k: -v for k, v in self.c.items()})

    def __sub__(self, o):
        return self + (-_lp(o))

    def __rsub__(self, o):
        return _lp(o) - self

    def __mul__(self, o) -> "LaurentPi":
        o = _lp(o)
        d: dict = {}
        for k1, v1 in self.c.items():
            for k2, v2 in o.c.items():
                d[k1 + k2] = d.get(k1 + k2, 0) + v1 * v2
        return LaurentPi(d)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentPi":
        """Multiply by pi^k."""
        return LaurentPi({e + k: v for e, v in self.c.items()})

    def truncate_above(self, k: int) -> "LaurentPi":
        return LaurentPi({e: v for e, v in self.c.items() if e <= k})

    def __eq__(self, o):
        try:
            return self.c == _lp(o).c
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for k in sorted(self.c):
            v = self.c[k]
            parts.append(f"{v}" if k == 0 else f"{v}*pi^{k}")
        return " + ".join(parts)

    __repr__ = __str__


def _lp(x) -> LaurentPi:
    if isinstance(x, LaurentPi):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPi.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to LaurentPi")


def laurent_ops(a: LaurentPi, b: LaurentPi | None, op: str):
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "valuation":
        return a.valuation()
    raise ValueError(op)


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if a.ring.field != b.ring.field:
        raise FieldMismatch(f"{a.ring.field} vs {b.ring.field}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(op)
