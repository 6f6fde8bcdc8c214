"""Truncated multivariate power series with exact rational coefficients.

Every symbolic object in the package carries its scalars in this ring: the
coefficients are :class:`fractions.Fraction` and all products are cut back to
a fixed total degree ``order`` in the deformation parameters.

Parameters are identified by a small integer index.  The nine deformation
parameters of the extended Galilei bialgebras are registered up front; any
other symbol (r-matrix coefficients, automorphism coefficients, ratios such
as ``beta1/nu``) can be registered on demand with :func:`symbol`.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, TypeVar

DEFAULT_ORDER = 6

CORE_PARAMETERS = (
    "xi", "nu", "alpha", "beta1", "beta2", "beta3", "beta4", "beta5", "beta6",
)

_DISPLAY = {
    "xi": "ξ", "nu": "ν", "alpha": "α",
    "beta1": "β₁", "beta2": "β₂", "beta3": "β₃",
    "beta4": "β₄", "beta5": "β₅", "beta6": "β₆",
}


class OrderMismatchError(ValueError):
    pass


class NonNilpotentError(ValueError):
    """Exponential or composition applied to a series with a constant term."""


class _Registry:
    def __init__(self, names: Iterable[str]):
        self._lock = threading.Lock()
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        self.display: dict[str, str] = {}
        for n in names:
            self.register(n, _DISPLAY.get(n))

    def register(self, name: str, display: str | None = None) -> int:
        with self._lock:
            if name in self.index:
                return self.index[name]
            self.index[name] = len(self.names)
            self.names.append(name)
            self.display[name] = display or name
            return self.index[name]


REGISTRY = _Registry(CORE_PARAMETERS)

Key = tuple  # sorted tuple of (parameter index, exponent) pairs
ONE_KEY: Key = ()


def _deg(key: Key) -> int:
    return sum(e for _, e in key)


def _merge(k1: Key, k2: Key) -> Key:
    if not k1:
        return k2
    if not k2:
        return k1
    d = dict(k1)
    for i, e in k2:
        d[i] = d.get(i, 0) + e
    return tuple(sorted(d.items()))


def _dense(key: Key, width: int) -> list[int]:
    v = [0] * width
    for i, e in key:
        v[i] = e
    return v


def _to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


class Series:
    """Element of Q[[params]] truncated at total degree ``order``.

    Instances are immutable values; ``terms`` maps exponent keys to nonzero
    Fractions and is never mutated after construction.
    """

    __slots__ = ("order", "terms", "_val")

    def __init__(self, terms: Mapping[Key, Fraction] | None = None,
                 order: int = DEFAULT_ORDER):
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        self.order = order
        clean = {}
        if terms:
            for k, c in terms.items():
                if c and _deg(k) <= order:
                    clean[k] = _to_fraction(c)
        self.terms: dict[Key, Fraction] = clean
        self._val = None

    @classmethod
    def _raw(cls, terms: dict, order: int) -> "Series":
        s = object.__new__(cls)
        s.order = order
        s.terms = terms
        s._val = None
        return s

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c, order: int = DEFAULT_ORDER) -> "Series":
        return cls({ONE_KEY: _to_fraction(c)} if c else {}, order)

    @classmethod
    def param(cls, name: str, order: int = DEFAULT_ORDER) -> "Series":
        if name not in REGISTRY.index:
            raise KeyError(f"unknown parameter {name!r}; register it with symbol()")
        if order == 0:
            return cls({}, 0)
        return cls({((REGISTRY.index[name], 1),): Fraction(1)}, order)

    # -- inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def valuation(self) -> int:
        """Lowest total degree present (``order + 1`` for zero)."""
        if self._val is None:
            self._val = min((_deg(k) for k in self.terms), default=self.order + 1)
        return self._val

    def constant_term(self) -> Fraction:
        return self.terms.get(ONE_KEY, Fraction(0))

    def variables(self) -> set[str]:
        return {REGISTRY.names[i] for k in self.terms for i, _ in k}

    def homogeneous(self, degree: int) -> "Series":
        return Series._raw({k: c for k, c in self.terms.items() if _deg(k) == degree},
                           self.order)

    def coefficient(self, monomial: Mapping[str, int] | None = None) -> Fraction:
        key = tuple(sorted((REGISTRY.index[n], e) for n, e in (monomial or {}).items() if e))
        return self.terms.get(key, Fraction(0))

    # -- ring operations ----------------------------------------------------
    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            if other.order != self.order:
                raise OrderMismatchError(
                    f"truncation orders differ: {self.order} vs {other.order}")
            return other
        return Series.constant(other, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Series._raw(out, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Series._raw({k: -c for k, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Series":
        c = _to_fraction(c)
        if not c:
            return Series._raw({}, self.order)
        return Series._raw({k: v * c for k, v in self.terms.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, Series):
            if isinstance(other, (int, Fraction)):
                return self.scale(other)
            return NotImplemented
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return Series._raw({}, self.order)
        n = self.order
        if self.valuation() + other.valuation() > n:
            return Series._raw({}, n)
        out: dict = {}
        b_items = [(k, _deg(k), c) for k, c in other.terms.items()]
        for k1, c1 in self.terms.items():
            d1 = _deg(k1)
            for k2, d2, c2 in b_items:
                if d1 + d2 > n:
                    continue
                k = _merge(k1, k2)
                v = out.get(k, 0) + c1 * c2
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return Series._raw(out, n)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def mul_into(self, other: "Series", acc: dict) -> None:
        """Accumulate the truncated product into a raw ``{key: Fraction}`` dict."""
        n = self.order
        b_items = [(k, _deg(k), c) for k, c in other.terms.items()]
        for k1, c1 in self.terms.items():
            d1 = _deg(k1)
            for k2, d2, c2 in b_items:
                if d1 + d2 > n:
                    continue
                k = _merge(k1, k2)
                acc[k] = acc.get(k, 0) + c1 * c2

    def add_into(self, acc: dict) -> None:
        for k, c in self.terms.items():
            acc[k] = acc.get(k, 0) + c

    @classmethod
    def from_accumulator(cls, acc: dict, order: int) -> "Series":
        return cls._raw({k: c for k, c in acc.items() if c}, order)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / _to_fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = Series.constant(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Series):
            return self.order == other.order and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Series.constant(other, self.order)
        return NotImplemented

    def __hash__(self):
        return hash((self.order, frozenset(self.terms.items())))

    # -- truncation / substitution ------------------------------------------
    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise OrderMismatchError("cannot raise the truncation order of a series")
        return Series({k: c for k, c in self.terms.items() if _deg(k) <= order}, order)

    def with_order(self, order: int) -> "Series":
        """Reinterpret at a different order (drops terms above it)."""
        return Series(self.terms, order)

    def subs(self, mapping: Mapping[str, "Series | int | Fraction"]) -> "Series":
        idx = {REGISTRY.index[n]: (v if isinstance(v, Series) else Series.constant(v, self.order))
               for n, v in mapping.items()}
        result = Series._raw({}, self.order)
        for k, c in self.terms.items():
            rest = []
            factor = Series.constant(c, self.order)
            for i, e in k:
                if i in idx:
                    factor = factor * idx[i] ** e
                else:
                    rest.append((i, e))
            result = result + factor * Series._raw({tuple(rest): Fraction(1)}, self.order)
        return result

    def evaluate(self, values: Mapping[str, float]) -> float:
        total = 0.0
        for k, c in self.terms.items():
            t = float(c)
            for i, e in k:
                t *= values[REGISTRY.names[i]] ** e
            total += t
        return total

    # -- rendering ----------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Key, Fraction]]:
        width = len(REGISTRY.names)

        def sort_key(item):
            k = item[0]
            return (_deg(k), [-e for e in _dense(k, width)])

        return sorted(self.terms.items(), key=sort_key)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.sorted_terms():
            mono = " ".join(
                REGISTRY.display[REGISTRY.names[i]] + (f"^{e}" if e > 1 else "")
                for i, e in k)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag} * {mono}"
            parts.append(("-" if c < 0 else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"Series({self}, order={self.order})"


def symbol(name: str, display: str | None = None, order: int = DEFAULT_ORDER) -> Series:
    """Register (if needed) and return an ad-hoc parameter symbol."""
    REGISTRY.register(name, display)
    return Series.param(name, order)


def param(name: str, order: int = DEFAULT_ORDER) -> Series:
    return Series.param(name, order)


# ---------------------------------------------------------------------------
# univariate coefficient sequences and composition

def exp_coefficients(n: int) -> list[Fraction]:
    return [Fraction(1, math.factorial(k)) for k in range(n + 1)]


def expm1_over_x_coefficients(n: int) -> list[Fraction]:
    """(e^z - 1)/z."""
    return [Fraction(1, math.factorial(k + 1)) for k in range(n + 1)]


def sin_coefficients(n: int) -> list[Fraction]:
    return [Fraction((-1) ** (k // 2), math.factorial(k)) if k % 2 else Fraction(0)
            for k in range(n + 1)]


def sinh_coefficients(n: int) -> list[Fraction]:
    return [Fraction(1, math.factorial(k)) if k % 2 else Fraction(0) for k in range(n + 1)]


def cosh_coefficients(n: int) -> list[Fraction]:
    return [Fraction(0) if k % 2 else Fraction(1, math.factorial(k)) for k in range(n + 1)]


def arcsin_coefficients(n: int) -> list[Fraction]:
    out = [Fraction(0)] * (n + 1)
    for j in range((n - 1) // 2 + 1):
        k = 2 * j + 1
        if k <= n:
            out[k] = Fraction(math.comb(2 * j, j), 4 ** j * k)
    return out


def arcsin_sqrt_ratio_coefficients(n: int) -> list[Fraction]:
    """arcsin(sqrt(u))/sqrt(u) as a power series in u."""
    return [Fraction(math.comb(2 * j, j), 4 ** j * (2 * j + 1)) for j in range(n + 1)]


def binomial_coefficients(power, n: int) -> list[Fraction]:
    """(1 + u)^power for rational ``power``."""
    p = _to_fraction(power)
    out = [Fraction(1)]
    c = Fraction(1)
    for k in range(1, n + 1):
        c = c * (p - k + 1) / k
        out.append(c)
    return out


T = TypeVar("T")


def compose(outer: Sequence, inner: T, one: T) -> T:
    """Evaluate sum_k outer[k] * inner**k.

    ``inner`` may be any ring element (series, algebra element, tensor) that
    supports ``+`` and ``*`` with itself and scaling by Fractions; the sum
    stops as soon as a power truncates to zero.
    """
    result = one * _to_fraction(outer[0]) if outer else one * 0
    power = one
    for c in outer[1:]:
        power = power * inner
        if not power:
            break
        c = _to_fraction(c)
        if c:
            result = result + power * c
    return result


def series_compose(outer: Sequence, inner: Series) -> Series:
    if inner.constant_term():
        raise NonNilpotentError("composition requires an inner series without constant term")
    return compose(list(outer)[: inner.order + 1], inner, Series.constant(1, inner.order))


def series_exp(a: Series) -> Series:
    if a.constant_term():
        raise NonNilpotentError("exponential of a series with nonzero constant term")
    return compose(exp_coefficients(a.order), a, Series.constant(1, a.order))


def series_inverse(a: Series) -> Series:
    """1/a for a series with constant term 1 ... or any unit constant."""
    c0 = a.constant_term()
    if not c0:
        raise NonNilpotentError("series without constant term is not invertible")
    u = a.scale(1 / c0) - 1
    return compose(binomial_coefficients(-1, a.order), u,
                   Series.constant(1, a.order)).scale(1 / c0)


def apply_univariate(fn: Callable[[Series], Series], order: int) -> list[Fraction]:
    """Taylor coefficients of ``fn`` by evaluating it on a probe variable."""
    z = symbol("_z", "z", order)
    s = fn(z)
    zi = REGISTRY.index["_z"]
    out = [Fraction(0)] * (order + 1)
    for k, c in s.terms.items():
        if any(i != zi for i, _ in k):
            raise ValueError("univariate function leaked other parameters")
        out[_deg(k)] = c
    return out
