"""PBW-ordered enveloping algebras on the generators K, H, P, M.

An :class:`Algebra` is fixed by a commutation table ``[G_i, G_j]`` for
``i < j`` in the order K < H < P < M.  Elements are finite sums of ordered
monomials ``K^a H^b P^c M^d`` with :class:`~qgalilei.scalars.Series`
coefficients; products are normal-ordered by adjacent transpositions
``G_j G_i -> G_i G_j - [G_i, G_j]``.

Tensors of rank 2 and 3 over the same algebra carry coproducts,
r-matrices, universal R-matrices and Schouten brackets.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .scalars import DEFAULT_ORDER, Series

GENERATORS = ("K", "H", "P", "M")
GEN_INDEX = {g: i for i, g in enumerate(GENERATORS)}
UNIT = (0, 0, 0, 0)
_UNIT_TERMS = {(): 1}

Mono = tuple  # (a, b, c, d) exponents of K, H, P, M


class CapExceededError(ValueError):
    """A normal-ordered monomial exceeded the configured degree cap."""


class RankMismatchError(ValueError):
    pass


class SkewnessError(ValueError):
    pass


def _unit_mono(i: int) -> Mono:
    m = [0, 0, 0, 0]
    m[i] = 1
    return tuple(m)


def mono_str(m: Mono) -> str:
    parts = [g + (f"^{e}" if e > 1 else "") for g, e in zip(GENERATORS, m) if e]
    return " ".join(parts) if parts else "1"


def _coeff_str(c: Series) -> tuple[str, str]:
    """Sign and body of a coefficient in a product ``coeff * monomial``."""
    text = str(c)
    if len(c.terms) == 1:
        if text.startswith("-"):
            return "-", text[1:]
        return "+", text
    return "+", f"({text})"


def _render(items: Iterable[tuple[str, Series]]) -> str:
    out = []
    for basis, c in items:
        sign, body = _coeff_str(c)
        if basis == "1":
            piece = body
        elif body == "1":
            piece = basis
        else:
            piece = f"{body} * {basis}"
        out.append((sign, piece))
    if not out:
        return "0"
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, piece in out[1:]:
        text += f" {sign} {piece}"
    return text


def _add_into(target: dict, key, value: Series) -> None:
    cur = target.get(key)
    if cur is None:
        if value:
            target[key] = value
        return
    s = cur + value
    if s:
        target[key] = s
    else:
        del target[key]


class Algebra:
    """Enveloping algebra defined by a Jacobi-consistent commutation table.

    ``brackets`` maps generator pairs to the value of their commutator.  Any
    ordering of a pair is accepted; ``[G_j, G_i] = -[G_i, G_j]`` is implied
    and missing pairs commute.  Values may be Elements (of any algebra),
    raw ``{mono: Series}`` dicts or zero.
    """

    def __init__(self, brackets: Mapping | None = None, order: int = DEFAULT_ORDER,
                 degree_cap: int = 12, name: str = "algebra"):
        self.order = order
        self.degree_cap = degree_cap
        self.name = name
        self._table: dict[tuple[int, int], dict] = {}
        for (a, b), value in (brackets or {}).items():
            i, j = GEN_INDEX[a], GEN_INDEX[b]
            if i == j:
                raise ValueError(f"bracket of {a} with itself must vanish")
            terms = self._coerce_terms(value)
            if i > j:
                i, j = j, i
                terms = {m: -c for m, c in terms.items()}
            if terms:
                self._table[(i, j)] = terms
        self._gen_cache: dict = {}
        self._mono_cache: dict = {}

    @classmethod
    def undeformed(cls, order: int = DEFAULT_ORDER, degree_cap: int = 12) -> "Algebra":
        return cls({("K", "H"): {_unit_mono(2): 1}, ("K", "P"): {_unit_mono(3): 1}},
                   order=order, degree_cap=degree_cap, name="undeformed")

    def _coerce_terms(self, value) -> dict:
        if isinstance(value, Element):
            value = value.terms
        if not value:
            return {}
        out = {}
        for m, c in value.items():
            if not isinstance(c, Series):
                c = Series.constant(c, self.order)
            elif c.order != self.order:
                c = c.with_order(self.order)
            if c:
                out[tuple(m)] = c
        return out

    # -- element constructors -------------------------------------------------
    def element(self, terms: Mapping | None = None) -> "Element":
        return Element(self, self._coerce_terms(terms or {}))

    def one(self) -> "Element":
        return self.element({UNIT: 1})

    def zero(self) -> "Element":
        return Element(self, {})

    def scalar(self, c) -> "Element":
        return self.element({UNIT: c})

    def gen(self, name: str) -> "Element":
        return self.element({_unit_mono(GEN_INDEX[name]): 1})

    def gens(self) -> tuple["Element", ...]:
        return tuple(self.gen(g) for g in GENERATORS)

    def series(self, c) -> Series:
        return c if isinstance(c, Series) else Series.constant(c, self.order)

    def bracket_table(self) -> dict[tuple[str, str], "Element"]:
        return {(GENERATORS[i], GENERATORS[j]): Element(self, dict(t))
                for (i, j), t in sorted(self._table.items())}

    def bracket(self, a: str, b: str) -> "Element":
        i, j = GEN_INDEX[a], GEN_INDEX[b]
        if i == j:
            return self.zero()
        if i < j:
            return Element(self, dict(self._table.get((i, j), {})))
        return -Element(self, dict(self._table.get((j, i), {})))

    # -- rewriting core -------------------------------------------------------
    def _check_cap(self, m: Mono) -> Mono:
        if sum(m) > self.degree_cap:
            raise CapExceededError(
                f"monomial {mono_str(m)} exceeds degree cap {self.degree_cap}")
        return m

    def mono_times_gen(self, m: Mono, g: int, budget: int | None = None) -> dict:
        """Normal form of ``m * G_g``.

        Terms whose coefficient has valuation above ``budget`` are dropped;
        the caller multiplies the result by a coefficient of valuation at
        least ``order - budget``, which would truncate them anyway.
        """
        if budget is None:
            budget = self.order
        if budget < 0:
            return {}
        key = (m, g, budget)
        hit = self._gen_cache.get(key)
        if hit is not None:
            return hit
        last = max((i for i in range(4) if m[i]), default=-1)
        if last <= g:
            mm = list(m)
            mm[g] += 1
            out = {self._check_cap(tuple(mm)): Series.constant(1, self.order)}
        else:
            # m g = m' X g = (m' g) X - m' [g, X]
            mp = list(m)
            mp[last] -= 1
            mp = tuple(mp)
            out: dict = {}
            for m1, c1 in self.mono_times_gen(mp, g, budget).items():
                for m2, c2 in self.mono_times_gen(m1, last, budget - c1.valuation()).items():
                    _add_into(out, m2, c1 * c2)
            for m1, c1 in self._table.get((g, last), {}).items():
                v1 = c1.valuation()
                if v1 > budget:
                    continue
                for m2, c2 in self.mono_mul(mp, m1, budget - v1).items():
                    _add_into(out, m2, -(c1 * c2))
        out = {k: v for k, v in out.items() if v.valuation() <= budget}
        self._gen_cache[key] = out
        return out

    def mono_mul(self, m1: Mono, m2: Mono, budget: int | None = None) -> dict:
        if budget is None:
            budget = self.order
        if budget < 0:
            return {}
        if not any(m2):
            return {m1: Series.constant(1, self.order)}
        key = (m1, m2, budget)
        hit = self._mono_cache.get(key)
        if hit is not None:
            return hit
        last = max((i for i in range(4) if m1[i]), default=-1)
        first = min(i for i in range(4) if m2[i])
        if last <= first:
            out = {self._check_cap(tuple(a + b for a, b in zip(m1, m2))):
                   Series.constant(1, self.order)}
        else:
            rest = list(m2)
            rest[first] -= 1
            rest = tuple(rest)
            out = {}
            for ma, ca in self.mono_times_gen(m1, first, budget).items():
                for mb, cb in self.mono_mul(ma, rest, budget - ca.valuation()).items():
                    _add_into(out, mb, ca * cb)
            out = {k: v for k, v in out.items() if v.valuation() <= budget}
        self._mono_cache[key] = out
        return out

    def normal_order(self, word: Sequence[str], scalar=1) -> "Element":
        """PBW normal form of ``scalar * G_1 G_2 ... G_n``."""
        if len(word) > self.degree_cap:
            raise CapExceededError(f"word of length {len(word)} exceeds cap {self.degree_cap}")
        result = self.scalar(scalar)
        for g in word:
            result = result * self.gen(g)
        return result

    # -- checks ---------------------------------------------------------------
    def verify_jacobi(self) -> dict:
        residuals = {}
        for i, j, k in itertools.combinations(range(4), 3):
            x, y, z = (self.gen(GENERATORS[t]) for t in (i, j, k))
            r = (commutator(commutator(x, y), z) + commutator(commutator(y, z), x)
                 + commutator(commutator(z, x), y))
            residuals[",".join(GENERATORS[t] for t in (i, j, k))] = r
        return {
            "ok": all(r.is_zero() for r in residuals.values()),
            "residuals": {k: str(v) for k, v in residuals.items()},
        }

    # -- tensors --------------------------------------------------------------
    def tensor(self, *elements: "Element") -> "Tensor":
        terms: dict = {}
        for combo in itertools.product(*(e.terms.items() for e in elements)):
            key = tuple(m for m, _ in combo)
            coeff = combo[0][1]
            for _, c in combo[1:]:
                coeff = coeff * c
            _add_into(terms, key, coeff)
        return Tensor(self, len(elements), terms)

    def tensor_one(self, rank: int) -> "Tensor":
        return Tensor(self, rank, {(UNIT,) * rank: Series.constant(1, self.order)})

    def tensor_zero(self, rank: int) -> "Tensor":
        return Tensor(self, rank, {})

    def primitive(self, x: "Element | str", rank: int = 2) -> "Tensor":
        """x (x) 1 (x) ... + ... + 1 (x) ... (x) x."""
        if isinstance(x, str):
            x = self.gen(x)
        one = self.one()
        total = self.tensor_zero(rank)
        for pos in range(rank):
            total = total + self.tensor(*[x if p == pos else one for p in range(rank)])
        return total


class Element:
    """Element of an enveloping algebra in PBW normal form."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: Algebra, terms: dict):
        self.alg = alg
        self.terms = terms

    # -- arithmetic -----------------------------------------------------------
    def _lift(self, other) -> "Element":
        if isinstance(other, Element):
            return other
        return self.alg.scalar(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(out, m, c)
        return Element(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "Element":
        if isinstance(c, Series):
            out = {}
            for m, v in self.terms.items():
                p = v * c
                if p:
                    out[m] = p
            return Element(self.alg, out)
        c = Fraction(c)
        if not c:
            return self.alg.zero()
        return Element(self.alg, {m: v.scale(c) for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Series)):
            return self.scale(other)
        if not isinstance(other, Element):
            return NotImplemented
        alg = self.alg
        n = alg.order
        out: dict = {}
        for m1, c1 in self.terms.items():
            v1 = c1.valuation()
            for m2, c2 in other.terms.items():
                if v1 + c2.valuation() > n:
                    continue
                c = c1 * c2
                if not c:
                    continue
                for m, cm in alg.mono_mul(m1, m2, n - c.valuation()).items():
                    _add_into(out, m, c * cm)
        return Element(alg, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Series)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        result = self.alg.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.alg.scalar(other)
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- inspection -----------------------------------------------------------
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def valuation(self) -> int:
        return min((c.valuation() for c in self.terms.values()), default=self.alg.order + 1)

    def homogeneous(self, d: int) -> "Element":
        out = {}
        for m, c in self.terms.items():
            h = c.homogeneous(d)
            if h:
                out[m] = h
        return Element(self.alg, out)

    def map_coefficients(self, fn: Callable[[Series], Series]) -> "Element":
        out = {}
        for m, c in self.terms.items():
            v = fn(c)
            if v:
                out[m] = v
        return Element(self.alg, out)

    def subs(self, mapping) -> "Element":
        return self.map_coefficients(lambda c: c.subs(mapping))

    def rebase(self, alg: Algebra) -> "Element":
        """Same terms, viewed in another algebra."""
        return alg.element(self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), [-e for e in t[0]]))

    def __str__(self):
        return _render((mono_str(m), c) for m, c in self.sorted_terms())

    def __repr__(self):
        return f"Element({self})"


class Tensor:
    """Element of U (x) U or U (x) U (x) U, each leg in normal order."""

    __slots__ = ("alg", "rank", "terms")

    def __init__(self, alg: Algebra, rank: int, terms: dict):
        self.alg = alg
        self.rank = rank
        self.terms = terms

    def _check(self, other: "Tensor") -> None:
        if not isinstance(other, Tensor):
            raise TypeError("tensor arithmetic needs Tensor operands")
        if other.rank != self.rank:
            raise RankMismatchError(f"rank {self.rank} vs rank {other.rank}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Series)):
            other = self.alg.tensor_one(self.rank) * other
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(out, k, c)
        return Tensor(self.alg, self.rank, out)

    __radd__ = __add__

    def __neg__(self):
        return Tensor(self.alg, self.rank, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Series)):
            other = self.alg.tensor_one(self.rank) * other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Tensor":
        if isinstance(c, Series):
            out = {}
            for k, v in self.terms.items():
                p = v * c
                if p:
                    out[k] = p
            return Tensor(self.alg, self.rank, out)
        c = Fraction(c)
        if not c:
            return self.alg.tensor_zero(self.rank)
        return Tensor(self.alg, self.rank, {k: v.scale(c) for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Series)):
            return self.scale(other)
        self._check(other)
        alg = self.alg
        n = alg.order
        acc: dict = {}
        other_items = sorted(((k, c, c.valuation()) for k, c in other.terms.items()),
                             key=lambda t: t[2])
        for k1, c1 in self.terms.items():
            v1 = c1.valuation()
            for k2, c2, v2 in other_items:
                if v1 + v2 > n:
                    break
                budget = n - v1 - v2
                legs = [alg.mono_mul(a, b, budget) for a, b in zip(k1, k2)]
                if all(len(leg) == 1 for leg in legs):
                    key = tuple(next(iter(leg)) for leg in legs)
                    extra = [lc for leg in legs for lc in leg.values() if lc.terms != _UNIT_TERMS]
                    bucket = acc.setdefault(key, {})
                    if not extra:
                        c1.mul_into(c2, bucket)
                    else:
                        coeff = c1 * c2
                        for lc in extra:
                            coeff = coeff * lc
                        coeff.add_into(bucket)
                    continue
                if any(not leg for leg in legs):
                    continue
                c = c1 * c2
                if not c:
                    continue
                for combo in itertools.product(*(leg.items() for leg in legs)):
                    coeff = c
                    for _, lc in combo:
                        if lc.terms != _UNIT_TERMS:
                            coeff = coeff * lc
                            if not coeff:
                                break
                    if coeff:
                        coeff.add_into(acc.setdefault(tuple(m for m, _ in combo), {}))
        out = {}
        for key, bucket in acc.items():
            sr = Series.from_accumulator(bucket, n)
            if sr:
                out[key] = sr
        return Tensor(alg, self.rank, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Series)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        result = self.alg.tensor_one(self.rank)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Tensor):
            return self.rank == other.rank and self.terms == other.terms
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- structure maps -------------------------------------------------------
    def permute(self, perm: Sequence[int]) -> "Tensor":
        """Leg ``i`` of the result is leg ``perm[i]`` of ``self``."""
        return Tensor(self.alg, self.rank,
                      {tuple(k[p] for p in perm): c for k, c in self.terms.items()})

    def flip(self) -> "Tensor":
        if self.rank != 2:
            raise RankMismatchError("flip is defined on rank-2 tensors")
        return self.permute((1, 0))

    def embed(self, legs: Sequence[int], rank: int) -> "Tensor":
        """Place the legs of ``self`` at positions ``legs`` of a rank-``rank`` tensor."""
        out = {}
        for k, c in self.terms.items():
            key = [UNIT] * rank
            for pos, m in zip(legs, k):
                key[pos] = m
            out[tuple(key)] = c
        return Tensor(self.alg, rank, out)

    def apply_leg(self, leg: int, fn: Callable[[Mono], "Tensor | Element"]) -> "Tensor":
        """Replace leg ``leg`` by the image of its monomial under ``fn``.

        ``fn`` returns a Tensor (the leg is expanded into its legs) or an
        Element (rank preserved).  ``fn`` must be linear-multiplicative
        where that matters; it is applied monomial by monomial.
        """
        out: dict = {}
        new_rank = None
        for k, c in self.terms.items():
            img = fn(k[leg])
            if isinstance(img, Element):
                items = [((m,), v) for m, v in img.terms.items()]
                width = 1
            else:
                items = list(img.terms.items())
                width = img.rank
            new_rank = self.rank - 1 + width
            for sub, v in items:
                coeff = c * v
                if coeff:
                    _add_into(out, k[:leg] + tuple(sub) + k[leg + 1:], coeff)
        if new_rank is None:
            new_rank = self.rank
        return Tensor(self.alg, new_rank, out)

    def contract_leg(self, leg: int, fn: Callable[[Mono], Series]) -> "Tensor | Element":
        """Apply a scalar-valued linear map on one leg (e.g. the counit)."""
        out: dict = {}
        for k, c in self.terms.items():
            s = fn(k[leg])
            if s:
                _add_into(out, k[:leg] + k[leg + 1:], c * s)
        if self.rank == 2:
            return Element(self.alg, {k[0]: c for k, c in out.items()})
        return Tensor(self.alg, self.rank - 1, out)

    def multiply_legs(self, order: Sequence[int] | None = None) -> Element:
        """m(a (x) b) = a b for rank 2 (legs multiplied in ``order``)."""
        order = order or tuple(range(self.rank))
        total = self.alg.zero()
        for k, c in self.terms.items():
            prod = self.alg.element({k[order[0]]: c})
            for i in order[1:]:
                prod = prod * self.alg.element({k[i]: 1})
            total = total + prod
        return total

    # -- inspection -----------------------------------------------------------
    def valuation(self) -> int:
        return min((c.valuation() for c in self.terms.values()), default=self.alg.order + 1)

    def homogeneous(self, d: int) -> "Tensor":
        out = {}
        for k, c in self.terms.items():
            h = c.homogeneous(d)
            if h:
                out[k] = h
        return Tensor(self.alg, self.rank, out)

    def map_coefficients(self, fn: Callable[[Series], Series]) -> "Tensor":
        out = {}
        for k, c in self.terms.items():
            v = fn(c)
            if v:
                out[k] = v
        return Tensor(self.alg, self.rank, out)

    def subs(self, mapping) -> "Tensor":
        return self.map_coefficients(lambda c: c.subs(mapping))

    def rebase(self, alg: Algebra) -> "Tensor":
        return Tensor(alg, self.rank, {k: (c if c.order == alg.order else c.with_order(alg.order))
                                       for k, c in self.terms.items()})

    def is_skew(self) -> bool:
        return self.rank == 2 and (self + self.flip()).is_zero()

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda t: ([sum(m) for m in t[0]], [[-e for e in m] for m in t[0]]))

    def __str__(self):
        return _render((" ⊗ ".join(mono_str(m) for m in k), c)
                       for k, c in self.sorted_terms())

    def __repr__(self):
        return f"Tensor[{self.rank}]({self})"


# ---------------------------------------------------------------------------

def multiply(a, b):
    return a * b


def commutator(a, b):
    return a * b - b * a


def tensor_multiply(a: Tensor, b: Tensor) -> Tensor:
    return a * b


def tensor_commutator(a: Tensor, b: Tensor) -> Tensor:
    return a * b - b * a


def wedge(x: Element, y: Element) -> Tensor:
    """x ^ y = x (x) y - y (x) x  (no 1/2)."""
    alg = x.alg
    return alg.tensor(x, y) - alg.tensor(y, x)


_PERMS3 = ((0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (1, 0, 2, -1), (0, 2, 1, -1), (2, 1, 0, -1))


def wedge3(x: Element, y: Element, z: Element) -> Tensor:
    """Full antisymmetrization over the six leg orderings (no 1/6)."""
    alg = x.alg
    items = (x, y, z)
    total = alg.tensor_zero(3)
    for a, b, c, sign in _PERMS3:
        t = alg.tensor(items[a], items[b], items[c])
        total = total + (t if sign > 0 else -t)
    return total


def schouten(r: Tensor) -> Tensor:
    """[[r, r]] = [r12, r13] + [r12, r23] + [r13, r23]."""
    if r.rank != 2:
        raise RankMismatchError("Schouten bracket takes a rank-2 tensor")
    if not r.is_skew():
        raise SkewnessError("Schouten bracket requires a skew-symmetric r")
    r12 = r.embed((0, 1), 3)
    r13 = r.embed((0, 2), 3)
    r23 = r.embed((1, 2), 3)
    return (tensor_commutator(r12, r13) + tensor_commutator(r12, r23)
            + tensor_commutator(r13, r23))


def function_of(x: Element | Tensor, coefficients: Sequence, one=None):
    """sum_k coefficients[k] x^k for a nilpotent-in-parameters ``x``."""
    from .scalars import compose

    if one is None:
        one = x.alg.one() if isinstance(x, Element) else x.alg.tensor_one(x.rank)
    return compose(list(coefficients), x, one)
