"""Lie bialgebra structures on the (1+1) extended Galilei algebra.

A cocommutator is stored as a map generator -> skew rank-2 tensor over the
undeformed enveloping algebra, with coefficients linear in the deformation
parameters.  The functions here check the 1-cocycle condition, extract the
co-Jacobi obstructions of the dual bracket, push cocommutators and
r-matrices through automorphisms, and classify candidate r-matrices by
their Schouten bracket.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Mapping, Sequence

from .algebra import GENERATORS, GEN_INDEX, UNIT, Algebra, Element, Tensor, schouten, wedge
from .scalars import DEFAULT_ORDER, REGISTRY, Series, param, symbol

PAIRS = tuple(itertools.combinations(GENERATORS, 2))

Cocommutator = dict  # generator name -> rank-2 Tensor


class PreconditionError(ValueError):
    pass


def undeformed(order: int = DEFAULT_ORDER) -> Algebra:
    return Algebra.undeformed(order)


def cocommutator(alg: Algebra, spec: Mapping[str, Sequence[tuple]]) -> Cocommutator:
    """Build delta from ``{gen: [(coeff, X, Y), ...]}`` meaning sum coeff X^Y."""
    out = {}
    for g in GENERATORS:
        t = alg.tensor_zero(2)
        for coeff, a, b in spec.get(g, ()):
            c = coeff if isinstance(coeff, Series) else Series.constant(coeff, alg.order)
            t = t + wedge(alg.gen(a), alg.gen(b)).scale(c)
        out[g] = t
    return out


def zero_cocommutator(alg: Algebra) -> Cocommutator:
    return {g: alg.tensor_zero(2) for g in GENERATORS}


def nine_parameter_cocommutator(alg: Algebra | None = None) -> Cocommutator:
    """General solution of the cocycle condition (before co-Jacobi)."""
    alg = alg or undeformed()
    p = {n: param(n, alg.order) for n in
         ("alpha", "xi", "nu", "beta1", "beta2", "beta3", "beta4", "beta5", "beta6")}
    return cocommutator(alg, {
        "K": [(p["beta6"], "K", "P"), (p["xi"], "K", "M"), (p["nu"], "P", "H"),
              (p["beta1"], "P", "M"), (p["beta2"], "H", "M")],
        "H": [(p["beta5"], "K", "M"), (-(p["beta6"] + p["alpha"]), "P", "H"),
              (p["beta3"], "P", "M"), (p["beta4"] - p["xi"], "H", "M")],
        "P": [(p["beta4"], "P", "M"), (p["beta6"] + p["alpha"], "H", "M")],
        "M": [(p["alpha"], "P", "M")],
    })


def skew_coefficient(t: Tensor, a: str, b: str) -> Series:
    """Coefficient of a (x) b in a rank-2 tensor of degree-one legs."""
    key = (_unit(a), _unit(b))
    return t.terms.get(key, Series.constant(0, t.alg.order))


def _unit(g: str):
    m = [0, 0, 0, 0]
    m[GEN_INDEX[g]] = 1
    return tuple(m)


def linear_apply(delta: Cocommutator, x: Element) -> Tensor:
    """Extend delta linearly to a degree-one element (delta(1) = 0)."""
    alg = next(iter(delta.values())).alg
    total = alg.tensor_zero(2)
    for m, c in x.terms.items():
        if m == UNIT:
            continue
        if sum(m) != 1:
            raise PreconditionError("cocommutator applies to Lie algebra elements only")
        g = GENERATORS[m.index(1)]
        total = total + delta[g].scale(c)
    return total


def is_skew(delta: Cocommutator) -> bool:
    return all(t.is_skew() for t in delta.values())


# ---------------------------------------------------------------------------
# cocycle condition

def cocycle_residual(delta: Cocommutator, alg: Algebra | None = None) -> dict[str, Tensor]:
    """delta([X,Y]) - [delta X, Delta0 Y] - [Delta0 X, delta Y] for all pairs."""
    alg = alg or next(iter(delta.values())).alg
    out = {}
    for a, b in PAIRS:
        da, db = delta[a].rebase(alg), delta[b].rebase(alg)
        pa, pb = alg.primitive(a), alg.primitive(b)
        lhs = linear_apply({g: t.rebase(alg) for g, t in delta.items()}, alg.bracket(a, b))
        out[f"{a},{b}"] = lhs - (da * pb - pb * da) - (pa * db - db * pa)
    return out


def is_cocycle(delta: Cocommutator, alg: Algebra | None = None) -> bool:
    return all(r.is_zero() for r in cocycle_residual(delta, alg).values())


def generic_ansatz(alg: Algebra | None = None) -> tuple[Cocommutator, list[str]]:
    """delta(X_i) = sum_{j<k} f_i^{jk} X_j ^ X_k with one symbol per coefficient."""
    alg = alg or undeformed()
    names = []
    spec = {}
    for g in GENERATORS:
        spec[g] = []
        for a, b in PAIRS:
            name = f"f_{g}_{a}{b}"
            names.append(name)
            spec[g].append((symbol(name, order=alg.order), a, b))
    return cocommutator(alg, spec), names


def _linear_rows(polys: Sequence[Series], names: Sequence[str]) -> list[list[Fraction]]:
    idx = [REGISTRY.index[n] for n in names]
    rows = []
    for p in polys:
        row = [Fraction(0)] * len(names)
        for k, c in p.terms.items():
            if len(k) != 1 or k[0][1] != 1 or k[0][0] not in idx:
                raise PreconditionError("residual is not linear in the ansatz symbols")
            row[idx.index(k[0][0])] = c
        rows.append(row)
    return rows


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    m = [r[:] for r in rows if any(r)]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][col]
        m[r] = [v / lead for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve_cocycle_ansatz(alg: Algebra | None = None) -> dict:
    """Solve the cocycle condition for the generic skew ansatz.

    Returns the solution-space basis over the coefficient symbols together
    with its dimension.
    """
    alg = alg or undeformed()
    delta, names = generic_ansatz(alg)
    polys = [c for r in cocycle_residual(delta, alg).values() for c in r.terms.values()]
    rows = _linear_rows(polys, names)
    basis = nullspace(rows, len(names))
    return {"unknowns": names, "equations": rows, "basis": basis, "dimension": len(basis)}


def coefficient_vector(delta: Cocommutator, names: Sequence[str]) -> dict[str, Series]:
    """Read a cocommutator as values for the generic ansatz symbols."""
    out = {}
    for name in names:
        _, g, pair = name.split("_")
        out[name] = skew_coefficient(delta[g], pair[0], pair[1])
    return out


# ---------------------------------------------------------------------------
# co-Jacobi

def dual_structure_constants(delta: Cocommutator) -> dict[tuple[str, str], dict[str, Series]]:
    """[x^a, x^b]_* = sum_i (coefficient of X_a (x) X_b in delta(X_i)) x^i."""
    out = {}
    for a, b in PAIRS:
        out[(a, b)] = {}
        for g in GENERATORS:
            c = skew_coefficient(delta[g], a, b)
            if c:
                out[(a, b)][g] = c
    return out


def _dual_bracket(consts, u: Mapping[str, Series], v: Mapping[str, Series], order: int):
    out: dict[str, Series] = {}
    for a, ca in u.items():
        for b, cb in v.items():
            if a == b:
                continue
            if GEN_INDEX[a] < GEN_INDEX[b]:
                vals, sign = consts[(a, b)], 1
            else:
                vals, sign = consts[(b, a)], -1
            for g, c in vals.items():
                term = ca * cb * c
                out[g] = out.get(g, Series.constant(0, order)) + (term if sign > 0 else -term)
    return {g: c for g, c in out.items() if c}


def dual_jacobi_residuals(delta: Cocommutator) -> dict[str, dict[str, Series]]:
    order = next(iter(delta.values())).alg.order
    consts = dual_structure_constants(delta)
    one = Series.constant(1, order)
    out = {}
    for a, b, c in itertools.combinations(GENERATORS, 3):
        xa, xb, xc = {a: one}, {b: one}, {c: one}
        total: dict[str, Series] = {}
        for u, v, w in ((xa, xb, xc), (xb, xc, xa), (xc, xa, xb)):
            for g, s in _dual_bracket(consts, _dual_bracket(consts, u, v, order), w, order).items():
                total[g] = total.get(g, Series.constant(0, order)) + s
        out[f"{a.lower()},{b.lower()},{c.lower()}"] = {g: s for g, s in total.items() if s}
    return out


def normalize_polynomial(p: Series) -> Series:
    """Content-free with positive leading coefficient (graded-lex order)."""
    if not p:
        return p
    nums = [c.numerator for c in p.terms.values()]
    dens = [c.denominator for c in p.terms.values()]
    scale = Fraction(lcm(*dens), gcd(*nums))
    q = p.scale(scale)
    lead = q.sorted_terms()[-1][1]
    return q if lead > 0 else -q


# Variable priority for the reduced basis: xi leads, then the betas
# (highest first), nu, alpha; later-registered symbols follow by index.
_LEX_PRIORITY = ("xi", "beta6", "beta5", "beta4", "beta3", "beta2", "beta1", "nu", "alpha")


def _lex_key(key) -> tuple:
    names = REGISTRY.names
    rank = {n: i for i, n in enumerate(_LEX_PRIORITY)}
    order = sorted(range(len(names)), key=lambda i: (rank.get(names[i], len(rank)), i))
    exps = dict(key)
    return (-sum(e for _, e in key),) + tuple(-exps.get(i, 0) for i in order)


def canonical_generators(polys: Sequence[Series]) -> list[Series]:
    """Reduced echelon basis of the span, content-free and sorted.

    Monomials are ordered graded-lex under ``_LEX_PRIORITY`` and the basis
    is reduced on its leading monomials, so two lists spanning the same
    space produce identical output.
    """
    polys = [p for p in polys if p]
    if not polys:
        return []
    order = polys[0].order
    keys = sorted({k for p in polys for k in p.terms}, key=_lex_key)
    red, _ = rref([[p.terms.get(k, Fraction(0)) for k in keys] for p in polys])
    out = [normalize_polynomial(Series(dict(zip(keys, row)), order)) for row in red]
    return sorted(out, key=str)


def cojacobi_constraints(delta: Cocommutator, check_cocycle: bool = True) -> list[Series]:
    if check_cocycle and not is_cocycle(delta):
        raise PreconditionError("co-Jacobi constraints require a 1-cocycle")
    polys = [s for res in dual_jacobi_residuals(delta).values() for s in res.values()]
    return canonical_generators(polys)


def nine_parameter_constraints(order: int = DEFAULT_ORDER) -> list[Series]:
    """The five quadratic co-Jacobi conditions on the nine parameters."""
    p = {n: param(n, order) for n in ("alpha", "xi", "nu", "beta4", "beta5", "beta6")}
    return canonical_generators([
        p["alpha"] * p["beta5"],
        p["beta6"] * (p["beta6"] + p["alpha"]),
        p["beta4"] * (p["beta6"] + p["alpha"]),
        p["nu"] * (p["xi"] - p["beta4"]),
        p["alpha"] * (p["xi"] - p["beta4"]) - p["nu"] * p["beta5"],
    ])


def violated_constraints(constraints: Sequence[Series], values: Mapping[str, float]) -> list[str]:
    return [str(c) for c in constraints if c.evaluate(_complete(values)) != 0]


def _complete(values: Mapping[str, float]) -> dict[str, float]:
    out = {n: 0 for n in REGISTRY.names}
    out.update(values)
    return out


def dual_brackets(delta: Cocommutator) -> dict[tuple[str, str], dict[str, Series]]:
    """Structure constants of the dual Lie algebra on {k, h, p, m}."""
    bad = {k: v for k, v in dual_jacobi_residuals(delta).items() if v}
    if bad:
        raise PreconditionError(f"dual map violates Jacobi: {sorted(bad)}")
    return {(a.lower(), b.lower()): {g.lower(): c for g, c in vals.items()}
            for (a, b), vals in dual_structure_constants(delta).items() if vals}


def format_dual_brackets(table) -> dict[str, str]:
    out = {}
    for (a, b), vals in table.items():
        parts = []
        for g, c in vals.items():
            parts.append(f"({c}) {g}")
        out[f"[{a},{b}]"] = " + ".join(parts)
    return out


# ---------------------------------------------------------------------------
# automorphisms

@dataclass
class Automorphism:
    """K' = K + l1 H + l2 P + l3 M, H' = H + l4 P + l5 M, P' = P + l4 M, M' = M."""

    l1: Series | int = 0
    l2: Series | int = 0
    l3: Series | int = 0
    l4: Series | int = 0
    l5: Series | int = 0
    order: int = DEFAULT_ORDER

    def matrix(self) -> list[list[Series]]:
        s = lambda v: v if isinstance(v, Series) else Series.constant(v, self.order)
        z, one = s(0), s(1)
        return [[one, s(self.l1), s(self.l2), s(self.l3)],
                [z, one, s(self.l4), s(self.l5)],
                [z, z, one, s(self.l4)],
                [z, z, z, one]]

    def inverse_matrix(self) -> list[list[Series]]:
        a = self.matrix()
        n = 4
        nil = [[a[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
        ident = [[Series.constant(1 if i == j else 0, self.order) for j in range(n)]
                 for i in range(n)]
        inv = [row[:] for row in ident]
        power = [row[:] for row in ident]
        for k in range(1, n):
            power = [[sum((power[i][l] * nil[l][j] for l in range(n)),
                          Series.constant(0, self.order)) for j in range(n)] for i in range(n)]
            sign = -1 if k % 2 else 1
            inv = [[inv[i][j] + power[i][j].scale(sign) for j in range(n)] for i in range(n)]
        return inv

    def images(self, alg: Algebra) -> dict[str, Element]:
        gens = alg.gens()
        out = {}
        for i, g in enumerate(GENERATORS):
            out[g] = sum((gens[j].scale(c) for j, c in enumerate(self.matrix()[i]) if c),
                         alg.zero())
        return out


def is_automorphism(phi: Automorphism, alg: Algebra | None = None) -> bool:
    alg = alg or undeformed(phi.order)
    img = phi.images(alg)
    for a, b in PAIRS:
        lhs = img[a] * img[b] - img[b] * img[a]
        target = alg.bracket(a, b)
        rhs = alg.zero()
        for m, c in target.terms.items():
            g = GENERATORS[m.index(1)]
            rhs = rhs + img[g].scale(c)
        if not (lhs - rhs).is_zero():
            return False
    return True


def _rewrite_in_primed(t: Tensor, inv: list[list[Series]]) -> Tensor:
    """Substitute X_j = sum_k inv[j][k] X'_k on every degree-one leg."""
    alg = t.alg

    def leg(m):
        if m == UNIT:
            return alg.element({UNIT: 1})
        if sum(m) != 1:
            raise PreconditionError("automorphism acts on Lie elements only")
        j = m.index(1)
        return sum((alg.gen(GENERATORS[k]).scale(c) for k, c in enumerate(inv[j]) if c),
                   alg.zero())

    out = t
    for i in range(t.rank):
        out = out.apply_leg(i, leg)
    return out


def apply_automorphism(obj: Cocommutator | Tensor, phi: Automorphism,
                       alg: Algebra | None = None) -> Cocommutator | Tensor:
    """Express a cocommutator or r-matrix in the primed generators X' = phi(X)."""
    if isinstance(obj, Tensor):
        alg = alg or obj.alg
    else:
        alg = alg or next(iter(obj.values())).alg
    if not is_automorphism(phi, alg):
        raise PreconditionError("map does not preserve the Galilei commutation table")
    inv = phi.inverse_matrix()
    if isinstance(obj, Tensor):
        return _rewrite_in_primed(obj, inv)
    mat = phi.matrix()
    out = {}
    for i, g in enumerate(GENERATORS):
        image = alg.tensor_zero(2)
        for j, c in enumerate(mat[i]):
            if c:
                image = image + obj[GENERATORS[j]].scale(c)
        out[g] = _rewrite_in_primed(image, inv)
    return out


def cocommutators_equal(a: Cocommutator, b: Cocommutator) -> bool:
    return all((a[g] - b[g].rebase(a[g].alg)).is_zero() for g in GENERATORS)


def format_cocommutator(delta: Cocommutator) -> dict[str, str]:
    """Render each image as a combination of wedges X^Y (X before Y in PBW order)."""
    out = {}
    for g in GENERATORS:
        parts = []
        for a, b in PAIRS:
            c = skew_coefficient(delta[g], a, b)
            if c:
                parts.append(f"({c}) {a}∧{b}")
        out[g] = " + ".join(parts) if parts else "0"
    return out


# ---------------------------------------------------------------------------
# coboundaries and r-matrices

R_BASIS = (("K", "P"), ("K", "M"), ("K", "H"), ("P", "M"), ("P", "H"), ("M", "H"))


@dataclass
class RMatrixCandidate:
    """r = a1 K^P + a2 K^M + a3 K^H + a4 P^M + a5 P^H + a6 M^H (+ eta)."""

    a: tuple = (0, 0, 0, 0, 0, 0)
    tau: tuple = (0, 0, 0)
    order: int = DEFAULT_ORDER

    def _s(self, v) -> Series:
        return v if isinstance(v, Series) else Series.constant(v, self.order)

    def skew_part(self, alg: Algebra) -> Tensor:
        t = alg.tensor_zero(2)
        for coeff, (x, y) in zip(self.a, R_BASIS):
            c = self._s(coeff)
            if c:
                t = t + wedge(alg.gen(x), alg.gen(y)).scale(c)
        return t

    def to_tensor(self, alg: Algebra) -> Tensor:
        return self.skew_part(alg) + invariant_element(alg, *(self._s(t) for t in self.tau))


def invariant_element(alg: Algebra, tau1, tau2, tau3) -> Tensor:
    """tau1 (P(x)P - M(x)H - H(x)M) + tau2 M(x)M + tau3 P^M."""
    k, h, p, m = alg.gens()
    t = (alg.tensor(p, p) - alg.tensor(m, h) - alg.tensor(h, m)).scale(tau1)
    t = t + alg.tensor(m, m).scale(tau2)
    return t + wedge(p, m).scale(tau3)


def is_ad_invariant(t: Tensor) -> bool:
    alg = t.alg
    return all((alg.primitive(g, t.rank) * t - t * alg.primitive(g, t.rank)).is_zero()
               for g in GENERATORS)


def coboundary_delta(r: RMatrixCandidate | Tensor, alg: Algebra | None = None) -> Cocommutator:
    """delta(X) = [1 (x) X + X (x) 1, r]."""
    if isinstance(r, RMatrixCandidate):
        alg = alg or undeformed(r.order)
        r = r.to_tensor(alg)
    alg = alg or r.alg
    return {g: alg.primitive(g) * r - r * alg.primitive(g) for g in GENERATORS}


def mcybe_check(r: RMatrixCandidate | Tensor, alg: Algebra | None = None) -> dict:
    """triangular if [[r,r]] = 0, quasi-triangular if Ad-invariant, else fails."""
    if isinstance(r, RMatrixCandidate):
        alg = alg or undeformed(r.order)
        r = r.skew_part(alg)
    s = schouten(r)
    if s.is_zero():
        kind = "triangular"
    elif is_ad_invariant(s):
        kind = "quasi-triangular"
    else:
        kind = "fails"
    return {"type": kind, "schouten": str(s)}


def standard_r(alg: Algebra | None = None, with_beta1: bool = True) -> Tensor:
    alg = alg or undeformed()
    xi = param("xi", alg.order)
    k, h, p, m = alg.gens()
    r = wedge(k, p).scale(xi)
    if with_beta1:
        r = r + wedge(h, m).scale(param("beta1", alg.order))
    return r


def nonstandard_r(alg: Algebra | None = None) -> Tensor:
    alg = alg or undeformed()
    b1, b2, b3 = (param(n, alg.order) for n in ("beta1", "beta2", "beta3"))
    k, h, p, m = alg.gens()
    return wedge(h, m).scale(b1) + wedge(h, p).scale(b2) + wedge(m, k).scale(b3)


# ---------------------------------------------------------------------------
# families

@dataclass
class BialgebraSpec:
    family: str
    free_parameters: tuple[str, ...]
    conditions: dict[str, object]
    delta: Cocommutator
    r: Tensor | None = None
    nonzero: tuple[str, ...] = ()
    notes: list[str] = field(default_factory=list)

    def check(self) -> dict:
        res = cocycle_residual(self.delta)
        constraints = cojacobi_constraints(self.delta, check_cocycle=False)
        return {
            "cocycle": all(r.is_zero() for r in res.values()),
            "cojacobi": [str(c) for c in constraints],
            "cojacobi_ok": not constraints,
        }


def family_spec(tag: str, order: int = DEFAULT_ORDER) -> BialgebraSpec:
    """Cocommutator rows of the four families (and coboundary subcases)."""
    alg = undeformed(order)
    p = {n: param(n, order) for n in
         ("alpha", "xi", "nu", "beta1", "beta2", "beta3", "beta4", "beta5")}
    if tag == "Ia":
        delta = cocommutator(alg, {
            "K": [(p["xi"], "K", "M"), (p["beta1"], "P", "M"), (p["beta2"], "H", "M")],
            "H": [(p["beta5"], "K", "M"), (p["beta3"], "P", "M"),
                  (p["beta4"] - p["xi"], "H", "M")],
            "P": [(p["beta4"], "P", "M")],
        })
        return BialgebraSpec("Ia", ("xi", "beta1", "beta2", "beta3", "beta4", "beta5"),
                             {"alpha": 0, "beta6": 0, "nu": 0}, delta)
    if tag == "Ia-standard":
        delta = cocommutator(alg, {
            "K": [(p["xi"], "K", "M"), (p["beta1"], "P", "M")],
            "P": [(p["xi"], "P", "M")],
        })
        return BialgebraSpec("Ia-standard", ("xi", "beta1"),
                             {"beta4": "xi", "beta2": 0, "beta3": 0, "beta5": 0}, delta,
                             r=standard_r(alg), nonzero=("xi",))
    if tag == "Ia-nonstandard":
        delta = cocommutator(alg, {
            "K": [(p["beta1"], "P", "M"), (p["beta2"], "H", "M")],
            "H": [(p["beta3"], "P", "M")],
        })
        return BialgebraSpec("Ia-nonstandard", ("beta1", "beta2", "beta3"),
                             {"xi": 0, "beta4": 0, "beta5": 0}, delta, r=nonstandard_r(alg))
    if tag == "Ib":
        delta = cocommutator(alg, {
            "K": [(p["xi"], "K", "M"), (p["nu"], "P", "H")],
            "H": [(p["beta3"], "P", "M")],
            "P": [(p["xi"], "P", "M")],
        })
        return BialgebraSpec("Ib", ("nu", "xi", "beta3"), {"beta4": "xi"}, delta, nonzero=("nu",))
    if tag == "IIa":
        a = p["alpha"]
        delta = cocommutator(alg, {
            "H": [(-a, "P", "H")], "P": [(a, "H", "M")], "M": [(a, "P", "M")],
        })
        return BialgebraSpec("IIa", ("alpha",), {}, delta, nonzero=("alpha",))
    if tag == "IIb":
        a = p["alpha"]
        delta = cocommutator(alg, {
            "K": [(-a, "K", "P"), (p["beta1"], "P", "M"), (p["beta2"], "H", "M")],
            "M": [(a, "P", "M")],
        })
        return BialgebraSpec("IIb", ("alpha", "beta1", "beta2"), {"beta6": "-alpha"}, delta,
                             nonzero=("alpha",))
    raise ValueError(f"unknown family {tag!r}")


FAMILY_TAGS = ("Ia", "Ia-standard", "Ia-nonstandard", "Ib", "IIa", "IIb")


def classify_parameters(values: Mapping[str, float]) -> dict:
    """Place a numeric nine-parameter assignment into the families.

    Membership is decided by the defining conditions of each family; the
    coboundary subcases of Ia are reported when beta5 = 0 and beta4 = xi.
    """
    v = _complete(values)
    order = DEFAULT_ORDER
    violated = violated_constraints(nine_parameter_constraints(order), v)
    if violated:
        return {"family": None, "cojacobi_violations": violated}
    al, b4, b5, b6, xi, nu = (v[n] for n in ("alpha", "beta4", "beta5", "beta6", "xi", "nu"))
    if all(x == 0 for x in v.values()):
        return {"family": "trivial", "cojacobi_violations": []}
    if al == 0:
        fam = "Ia" if nu == 0 else "Ib"
    else:
        fam = "IIb" if b6 == -al else "IIa"
    out = {"family": fam, "cojacobi_violations": []}
    if fam == "Ia" and b5 == 0 and b4 == xi:
        out["coboundary"] = "standard" if xi != 0 else "non-standard"
        out["r"] = {"a1": xi, "a2": -v["beta3"], "a5": -v["beta2"], "a6": -v["beta1"]}
    return out


def numeric_r_candidate(values: Mapping[str, float], order: int = DEFAULT_ORDER) -> RMatrixCandidate:
    a = tuple(Fraction(str(values.get(f"a{i}", 0))) for i in range(1, 7))
    tau = tuple(Fraction(str(values.get(f"tau{i}", 0))) for i in range(1, 4))
    return RMatrixCandidate(a, tau, order)


def same_span(a: Sequence[Series], b: Sequence[Series]) -> bool:
    """True when two lists of polynomials span the same Q-vector space."""
    keys = sorted({k for p in list(a) + list(b) for k in p.terms})
    vec = lambda p: [p.terms.get(k, Fraction(0)) for k in keys]
    ra, _ = rref([vec(p) for p in a]) if a else ([], [])
    rb, _ = rref([vec(p) for p in b]) if b else ([], [])
    return ra == rb


# ---------------------------------------------------------------------------
# reductions to the canonical rows
#
# Parameters that appear divided by a nonzero one (beta1/nu, nu/alpha, ...)
# are carried by ratio symbols so no series inverse is ever needed.

def _ratio(name: str, display: str, order: int) -> Series:
    return symbol(name, display, order)


@dataclass
class Reduction:
    family: str
    general: Cocommutator
    automorphism: Automorphism
    expected: Cocommutator
    renamed: dict[str, str]

    def apply(self) -> Cocommutator:
        return apply_automorphism(self.general, self.automorphism)

    def residual(self) -> dict[str, Tensor]:
        got = self.apply()
        return {g: got[g] - self.expected[g] for g in GENERATORS}

    def ok(self) -> bool:
        return all(t.is_zero() for t in self.residual().values())


def reduction(tag: str, order: int = DEFAULT_ORDER) -> Reduction:
    alg = undeformed(order)
    p = {n: param(n, order) for n in
         ("alpha", "xi", "nu", "beta1", "beta2", "beta3")}
    al, xi, nu, b1, b2, b3 = (p[n] for n in ("alpha", "xi", "nu", "beta1", "beta2", "beta3"))
    if tag == "Ib":
        r1, r2 = _ratio("rho1", "β₁/ν", order), _ratio("rho2", "β₂/ν", order)
        general = cocommutator(alg, {
            "K": [(xi, "K", "M"), (nu, "P", "H"), (nu * r1, "P", "M"), (nu * r2, "H", "M")],
            "H": [(b3, "P", "M")],
            "P": [(xi, "P", "M")],
        })
        phi = Automorphism(l4=-r2, l5=r1 + r2 * r2, order=order)
        expected = cocommutator(alg, {
            "K": [(xi, "K", "M"), (nu, "P", "H")],
            "H": [(b3 - r2 * xi, "P", "M")],
            "P": [(xi, "P", "M")],
        })
        return Reduction("Ib", general, phi, expected, {"beta3": "beta3 - xi beta2/nu"})
    if tag == "IIa":
        n = _ratio("rhon", "ν/α", order)
        c1, c2, c3 = (_ratio(f"rhoc{i}", f"β{'₁₂₃'[i - 1]}/α", order) for i in (1, 2, 3))
        general = cocommutator(alg, {
            "K": [(al * n, "P", "H"), (al * c1, "P", "M"), (al * c2, "H", "M")],
            "H": [(-al, "P", "H"), (al * c3, "P", "M")],
            "P": [(al, "H", "M")],
            "M": [(al, "P", "M")],
        })
        phi = Automorphism(l1=n, l2=-c2, l3=-(c1 + n * c3), l5=c3.scale(Fraction(-1, 2)),
                           order=order)
        expected = family_spec("IIa", order).delta
        return Reduction("IIa", general, phi, expected, {})
    if tag == "IIb":
        n, x, c3 = (_ratio("rhon", "ν/α", order), _ratio("rhox", "ξ/α", order),
                    _ratio("rhoc3", "β₃/α", order))
        general = cocommutator(alg, {
            "K": [(-al, "K", "P"), (al * x, "K", "M"), (al * n, "P", "H"),
                  (b1, "P", "M"), (b2, "H", "M")],
            "H": [(al * c3, "P", "M")],
            "P": [(al * x, "P", "M")],
            "M": [(al, "P", "M")],
        })
        phi = Automorphism(l1=n, l4=-x, l5=x * x - c3, order=order)
        nb1 = b1 + b2 * x + al * c3 * n - al * n * x * x
        nb2 = b2 - al * n * x
        expected = cocommutator(alg, {
            "K": [(-al, "K", "P"), (nb1, "P", "M"), (nb2, "H", "M")],
            "M": [(al, "P", "M")],
        })
        return Reduction("IIb", general, phi, expected,
                         {"beta1": "beta1 + beta2 xi/alpha + beta3 nu/alpha - nu xi^2/alpha^2",
                          "beta2": "beta2 - nu xi/alpha"})
    raise ValueError(f"no reduction for {tag!r}")
