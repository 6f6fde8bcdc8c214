"""Quantum extended Galilei algebras: coproducts, Casimirs and R-matrices.

Each implemented family is a :class:`QuantumFamily` holding its deformed
commutation table, the coproduct on generators and the two Casimirs.  All
checks (homomorphism, coassociativity, counit, antipode, Casimir
centrality, intertwining) are exact identities in the truncated series
ring, so a passing check means literal zero residuals at the chosen order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .algebra import (
    GENERATORS, GEN_INDEX, UNIT, Algebra, Element, Tensor, commutator,
    function_of, wedge,
)
from .scalars import (
    DEFAULT_ORDER, Series, arcsin_sqrt_ratio_coefficients, binomial_coefficients,
    cosh_coefficients, exp_coefficients, expm1_over_x_coefficients, param,
    sinh_coefficients,
)

IMPLEMENTED_FAMILIES = ("undeformed", "Ia-standard", "Ia-nonstandard", "Ib", "IIb")


class CompletionError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


def exp_of(x):
    """e^x for x with positive valuation in the deformation parameters."""
    return function_of(x, exp_coefficients(x.alg.order))


def expm1_over(x_gen, scale: Series):
    """(e^{scale*x} - 1)/scale, expanded with no division by ``scale``."""
    return x_gen * function_of(x_gen * scale, expm1_over_x_coefficients(x_gen.alg.order))


def _residual_report(residuals: Mapping[str, Element | Tensor]) -> dict:
    return {
        "ok": all(r.is_zero() for r in residuals.values()),
        "residuals": {k: str(v) for k, v in residuals.items()},
        "lowest_nonzero_order": {k: (None if r.is_zero() else r.valuation())
                                 for k, r in residuals.items()},
    }


@dataclass
class QuantumFamily:
    tag: str
    alg: Algebra
    delta: dict[str, Tensor]
    casimirs: tuple[Element, Element]
    parameters: tuple[str, ...]
    cocommutator: dict[str, Tensor] = field(default_factory=dict)
    _mono_cache: dict = field(default_factory=dict, repr=False)
    _antipode: dict | None = field(default=None, repr=False)

    # -- coproduct as an algebra map ----------------------------------------
    def coproduct_mono(self, m) -> Tensor:
        hit = self._mono_cache.get(m)
        if hit is not None:
            return hit
        result = self.alg.tensor_one(2)
        for g, e in zip(GENERATORS, m):
            for _ in range(e):
                result = result * self.delta[g]
        self._mono_cache[m] = result
        return result

    def coproduct(self, x: Element | str) -> Tensor:
        if isinstance(x, str):
            return self.delta[x]
        total = self.alg.tensor_zero(2)
        for m, c in x.terms.items():
            total = total + self.coproduct_mono(m).scale(c)
        return total

    def flipped(self, x: Element | str) -> Tensor:
        return self.coproduct(x).flip()

    def iterated_coproduct(self, x: Element | str, legs: int) -> Tensor:
        t = self.coproduct(x)
        while t.rank < legs:
            t = t.apply_leg(0, self.coproduct_mono)
        return t

    # -- Hopf axioms -------------------------------------------------------
    def verify_homomorphism(self) -> dict:
        res = {}
        for i in range(4):
            for j in range(i + 1, 4):
                a, b = GENERATORS[i], GENERATORS[j]
                lhs = self.coproduct(self.alg.bracket(a, b))
                rhs = self.delta[a] * self.delta[b] - self.delta[b] * self.delta[a]
                res[f"{a},{b}"] = lhs - rhs
        return _residual_report(res)

    def verify_coassociativity(self) -> dict:
        res = {}
        for g in GENERATORS:
            d = self.delta[g]
            res[g] = d.apply_leg(0, self.coproduct_mono) - d.apply_leg(1, self.coproduct_mono)
        return _residual_report(res)

    def verify_counit(self) -> dict:
        res = {}
        for g in GENERATORS:
            d = self.delta[g]
            x = self.alg.gen(g)
            res[f"(e x id) {g}"] = d.contract_leg(0, _counit) - x
            res[f"(id x e) {g}"] = d.contract_leg(1, _counit) - x
        return _residual_report(res)

    def verify_casimirs(self) -> dict:
        res = {}
        for name, c in zip(("C1", "C2"), self.casimirs):
            for g in GENERATORS:
                res[f"[{name},{g}]"] = commutator(c, self.alg.gen(g))
        return _residual_report(res)

    # -- antipode ------------------------------------------------------------
    def antipode_generators(self) -> dict[str, Element]:
        """Solve sum X1 S(X2) = 0 generator by generator."""
        if self._antipode is not None:
            return self._antipode
        known: dict[str, Element] = {}
        pending = list(GENERATORS)
        while pending:
            progressed = False
            for g in list(pending):
                unit_key = (UNIT, _unit(g))
                d = self.delta[g]
                if d.terms.get(unit_key) != Series.constant(1, self.alg.order):
                    raise PreconditionError(f"coproduct of {g} lacks the 1 (x) {g} term")
                needed = {GENERATORS[i] for k in d.terms if k != unit_key
                          for i, e in enumerate(k[1]) if e}
                if not needed <= set(known):
                    continue
                total = self.alg.zero()
                for (m1, m2), c in d.terms.items():
                    if (m1, m2) == unit_key:
                        continue
                    total = total + (self.alg.element({m1: c})
                                     * _antipode_mono(m2, known, self.alg))
                known[g] = -total
                pending.remove(g)
                progressed = True
            if not progressed:
                raise PreconditionError("antipode recursion did not close: " + ",".join(pending))
        self._antipode = known
        return known

    def antipode(self, x: Element) -> Element:
        s = self.antipode_generators()
        total = self.alg.zero()
        for m, c in x.terms.items():
            total = total + _antipode_mono(m, s, self.alg).scale(c)
        return total

    def verify_antipode(self) -> dict:
        s = self.antipode_generators()
        res = {}
        for g in GENERATORS:
            d = self.delta[g]
            left = self.alg.zero()
            right = self.alg.zero()
            for (m1, m2), c in d.terms.items():
                e1, e2 = self.alg.element({m1: c}), self.alg.element({m2: c})
                left = left + _antipode_mono(m1, s, self.alg) * e2
                right = right + e1 * _antipode_mono(m2, s, self.alg)
            res[f"S(X1)X2 {g}"] = left
            res[f"X1S(X2) {g}"] = right
        return _residual_report(res)

    # -- limits --------------------------------------------------------------
    def semiclassical_residual(self) -> dict:
        """First order of (Delta - sigma Delta) minus the cocommutator."""
        res = {}
        for g in GENERATORS:
            d = self.delta[g]
            first = (d - d.flip()).homogeneous(1)
            target = self.cocommutator.get(g, self.alg.tensor_zero(2)).rebase(self.alg)
            res[g] = first - target
        return _residual_report(res)

    def undeformed_limit(self) -> dict:
        zero = {p: 0 for p in self.parameters}
        res = {}
        for g in GENERATORS:
            res[f"Delta({g})"] = self.delta[g].subs(zero) - self.alg.primitive(g)
        ref = Algebra.undeformed(self.alg.order)
        for i in range(4):
            for j in range(i + 1, 4):
                a, b = GENERATORS[i], GENERATORS[j]
                res[f"[{a},{b}]"] = (self.alg.bracket(a, b).subs(zero).rebase(ref)
                                     - ref.bracket(a, b))
        c2 = self.casimirs[1].subs(zero).rebase(ref)
        p, m, h = ref.gen("P"), ref.gen("M"), ref.gen("H")
        res["C2"] = c2 - (p * p - (m * h).scale(2))
        return _residual_report(res)

    def verify_all(self) -> dict:
        return {
            "homomorphism": self.verify_homomorphism(),
            "coassociativity": self.verify_coassociativity(),
            "counit": self.verify_counit(),
            "antipode": self.verify_antipode(),
            "casimirs": self.verify_casimirs(),
            "semiclassical": self.semiclassical_residual(),
            "undeformed_limit": self.undeformed_limit(),
        }


def _unit(g: str):
    m = [0, 0, 0, 0]
    m[GEN_INDEX[g]] = 1
    return tuple(m)


def _counit(m) -> Series | int:
    return 1 if not any(m) else 0


def _antipode_mono(m, s: Mapping[str, Element], alg: Algebra) -> Element:
    result = alg.one()
    for g, e in reversed(list(zip(GENERATORS, m))):
        for _ in range(e):
            result = result * s[g]
    return result


# ---------------------------------------------------------------------------
# Lyakhovsky-Mudrov construction

def matrix_exp(matrix: Sequence[Sequence[Element]]) -> list[list[Element]]:
    """exp of a square matrix of pairwise commuting, parameter-nilpotent entries."""
    n = len(matrix)
    alg = matrix[0][0].alg
    for a in (x for row in matrix for x in row):
        for b in (x for row in matrix for x in row):
            if not commutator(a, b).is_zero():
                raise PreconditionError("LM matrix entries must commute pairwise")
    ident = [[alg.one() if i == j else alg.zero() for j in range(n)] for i in range(n)]
    result = [row[:] for row in ident]
    power = [row[:] for row in ident]
    for k in range(1, alg.order + 1):
        power = [[sum((power[i][l] * matrix[l][j] for l in range(n)), alg.zero())
                  for j in range(n)] for i in range(n)]
        if all(x.is_zero() for row in power for x in row):
            break
        inv = Fraction(1, math.factorial(k))
        result = [[result[i][j] + power[i][j].scale(inv) for j in range(n)] for i in range(n)]
    return result


def lm_coproduct(matrix: Sequence[Sequence[Element]], generators: Sequence[str]) -> dict[str, Tensor]:
    """Delta(X_i) = 1 (x) X_i + sum_j X_j (x) E_ij with E = exp(matrix)."""
    alg = matrix[0][0].alg
    e = matrix_exp(matrix)
    out = {}
    for i, g in enumerate(generators):
        d = alg.tensor(alg.one(), alg.gen(g))
        for j, h in enumerate(generators):
            if not e[i][j].is_zero():
                d = d + alg.tensor(alg.gen(h), e[i][j])
        out[g] = d
    return out


def ia_lm_matrix(alg: Algebra, xi, beta1, beta2, beta3, beta4, beta5) -> list[list[Element]]:
    m = alg.gen("M")
    z = alg.zero()
    return [[m * xi, m * beta2, m * beta1],
            [m * beta5, m * (beta4 - xi), m * beta3],
            [z, z, m * beta4]]


def ib_lm_matrix(alg: Algebra, xi, beta3) -> list[list[Element]]:
    m = alg.gen("M")
    z = alg.zero()
    return [[m * xi, z, z], [z, z, m * beta3], [z, z, m * xi]]


def iib_lm_matrix(alg: Algebra, alpha, beta1, beta2) -> list[list[Element]]:
    p, h = alg.gen("P"), alg.gen("H")
    return [[-(p * alpha), -(p * beta1) - h * beta2], [alg.zero(), -(p * alpha)]]


def ia_general_coproduct(order: int = DEFAULT_ORDER) -> dict[str, Tensor]:
    """LM coproduct of the six-parameter family Ia (entries by exponentiation)."""
    alg = Algebra.undeformed(order)
    ps = [param(n, order) for n in ("xi", "beta1", "beta2", "beta3", "beta4", "beta5")]
    d = lm_coproduct(ia_lm_matrix(alg, *ps), ("K", "H", "P"))
    d["M"] = alg.primitive("M")
    return d


def ib_coproduct_completion(partial: Mapping[str, Tensor], nu: Series, xi: Series,
                            beta3: Series) -> dict[str, Tensor]:
    """Add the nu-dependent terms to the LM part of the family Ib coproduct."""
    alg = partial["K"].alg
    p, h, m = alg.gen("P"), alg.gen("H"), alg.gen("M")
    e = exp_of(m * xi)
    full = dict(partial)
    full["K"] = (partial["K"] + alg.tensor(p, h * e).scale(nu)
                 + alg.tensor(p * p, expm1_over(m, xi) * e).scale(nu * beta3 / 2))
    probe = QuantumFamily("Ib-completion", alg, full, (alg.one(), alg.one()), ())
    report = probe.verify_coassociativity()
    if not report["ok"]:
        raise CompletionError("completed coproduct is not coassociative: "
                              + str(report["residuals"]))
    return full


# ---------------------------------------------------------------------------
# families

def _cocommutator(alg: Algebra, spec: Mapping[str, Sequence[tuple]]) -> dict[str, Tensor]:
    out = {}
    for g in GENERATORS:
        t = alg.tensor_zero(2)
        for coeff, a, b in spec.get(g, ()):
            t = t + wedge(alg.gen(a), alg.gen(b)).scale(coeff)
        out[g] = t
    return out


def undeformed_family(order: int = DEFAULT_ORDER) -> QuantumFamily:
    alg = Algebra.undeformed(order)
    k, h, p, m = alg.gens()
    delta = {g: alg.primitive(g) for g in GENERATORS}
    return QuantumFamily("undeformed", alg, delta, (m, p * p - (m * h).scale(2)), ())


def standard_family(order: int = DEFAULT_ORDER, beta1: bool = True) -> QuantumFamily:
    """Two-parameter standard coboundary family (beta1 optional)."""
    xi = param("xi", order)
    b1 = param("beta1", order) if beta1 else Series.constant(0, order)
    base = Algebra.undeformed(order)
    m0 = base.gen("M")
    alg = Algebra({("K", "H"): base.gen("P"), ("K", "P"): expm1_over(m0, xi * 2)},
                  order=order, name="Ia-standard")
    k, h, p, m = alg.gens()
    delta = lm_coproduct(ia_lm_matrix(alg, xi, b1, 0, 0, xi, 0), ("K", "H", "P"))
    delta["M"] = alg.primitive("M")
    c2 = p * p - (expm1_over(m, xi * 2) * h).scale(2)
    cocom = _cocommutator(alg, {"K": [(xi, "K", "M"), (b1, "P", "M")],
                                "P": [(xi, "P", "M")]})
    params = ("xi", "beta1") if beta1 else ("xi",)
    return QuantumFamily("Ia-standard", alg, delta, (m, c2), params, cocom)


def nonstandard_family(order: int = DEFAULT_ORDER) -> QuantumFamily:
    b1, b2, b3 = (param(n, order) for n in ("beta1", "beta2", "beta3"))
    base = Algebra.undeformed(order)
    p0, m0 = base.gen("P"), base.gen("M")
    alg = Algebra({("K", "H"): p0 + (m0 * m0).scale(b3 / 2), ("K", "P"): m0},
                  order=order, name="Ia-nonstandard")
    k, h, p, m = alg.gens()
    delta = lm_coproduct(ia_lm_matrix(alg, 0, b1, b2, b3, 0, 0), ("K", "H", "P"))
    delta["M"] = alg.primitive("M")
    shifted = p + (m * m).scale(b3 / 2)
    c2 = shifted * shifted - (m * h).scale(2)
    cocom = _cocommutator(alg, {"K": [(b1, "P", "M"), (b2, "H", "M")],
                                "H": [(b3, "P", "M")]})
    return QuantumFamily("Ia-nonstandard", alg, delta, (m, c2), ("beta1", "beta2", "beta3"), cocom)


def family_ib(order: int = DEFAULT_ORDER) -> QuantumFamily:
    nu, xi, b3 = (param(n, order) for n in ("nu", "xi", "beta3"))
    base = Algebra.undeformed(order)
    p0, m0 = base.gen("P"), base.gen("M")
    g0 = expm1_over(m0, xi)
    alg = Algebra({("K", "H"): p0 + (g0 * g0).scale(b3 / 2),
                   ("K", "P"): expm1_over(m0, xi * 2)},
                  order=order, name="Ib")
    k, h, p, m = alg.gens()
    partial = lm_coproduct(ib_lm_matrix(alg, xi, b3), ("K", "H", "P"))
    partial["M"] = alg.primitive("M")
    delta = ib_coproduct_completion(partial, nu, xi, b3)
    g = expm1_over(m, xi)
    shifted = p + (g * g).scale(b3 / 2)
    c2 = shifted * shifted - (expm1_over(m, xi * 2) * h).scale(2)
    cocom = _cocommutator(alg, {"K": [(xi, "K", "M"), (nu, "P", "H")],
                                "H": [(b3, "P", "M")], "P": [(xi, "P", "M")]})
    return QuantumFamily("Ib", alg, delta, (m, c2), ("nu", "xi", "beta3"), cocom)


def family_iib(order: int = DEFAULT_ORDER) -> QuantumFamily:
    alpha, b1, b2 = (param(n, order) for n in ("alpha", "beta1", "beta2"))
    base = Algebra.undeformed(order)
    p0, m0 = base.gen("P"), base.gen("M")
    # (1 - e^{-alpha P})/alpha == (e^{-alpha P} - 1)/(-alpha)
    alg = Algebra({("K", "H"): expm1_over(p0, -alpha),
                   ("K", "P"): m0,
                   ("K", "M"): (m0 * m0).scale(-alpha / 2)},
                  order=order, name="IIb")
    k, h, p, m = alg.gens()
    delta = lm_coproduct(iib_lm_matrix(alg, alpha, b1, b2), ("K", "M"))
    delta["H"] = alg.primitive("H")
    delta["P"] = alg.primitive("P")
    c1 = exp_of(p * (alpha / 2)) * m
    c2 = (sinh_over_quarter(p, alpha) - (exp_of(p * (alpha / 2)) * m * h).scale(2))
    cocom = _cocommutator(alg, {"K": [(-alpha, "K", "P"), (b1, "P", "M"), (b2, "H", "M")],
                                "M": [(alpha, "P", "M")]})
    return QuantumFamily("IIb", alg, delta, (c1, c2), ("alpha", "beta1", "beta2"), cocom)


def sinh_over_quarter(x: Element, alpha: Series) -> Element:
    """(sinh(alpha x/4)/(alpha/4))^2 = x^2 (sinh(y)/y)^2 with y = alpha x/4."""
    n = x.alg.order
    s = [sinh_coefficients(n + 1)[k + 1] for k in range(n + 1)]  # sinh(y)/y
    sq = [sum(s[i] * s[k - i] for i in range(k + 1)) for k in range(n + 1)]
    return x * x * function_of(x * (alpha / 4), sq)


FAMILY_BUILDERS: dict[str, Callable[..., QuantumFamily]] = {
    "undeformed": undeformed_family,
    "Ia-standard": standard_family,
    "Ia-nonstandard": nonstandard_family,
    "Ib": family_ib,
    "IIb": family_iib,
}


def build_family(tag: str, order: int = DEFAULT_ORDER) -> QuantumFamily:
    if tag == "IIa":
        raise NotImplementedError(
            "family IIa: only the Lie bialgebra (cocommutator and dual brackets) is "
            "implemented; its quantum Hopf structure is not constructed")
    try:
        return FAMILY_BUILDERS[tag](order)
    except KeyError:
        raise ValueError(f"unknown family {tag!r}; choose from {IMPLEMENTED_FAMILIES}") from None


# ---------------------------------------------------------------------------
# universal R-matrices

@dataclass
class UniversalR:
    kind: str
    tensor: Tensor
    factors: tuple[Tensor, ...] = ()  # exponents A_1, A_2, ... with R = ... e^{A2} e^{A1}

    @property
    def alg(self) -> Algebra:
        return self.tensor.alg


def tensor_exp(a: Tensor) -> Tensor:
    if a.valuation() < 1:
        raise PreconditionError("tensor exponential needs a parameter-nilpotent exponent")
    return function_of(a, exp_coefficients(a.alg.order))


def _central_function(fam_alg: Algebra, order: int, xi: Series) -> Tensor:
    """f(M, xi) of the standard R-matrix in the subring generated by M (x) 1, 1 (x) M."""
    alg = fam_alg
    m = alg.gen("M")
    one = alg.one()
    m1 = alg.tensor(m, one)
    m2 = alg.tensor(one, m)
    n = order
    # sinh(xi M) (x) sinh(xi M)
    sh = function_of(m * xi, sinh_coefficients(n))
    s = alg.tensor(sh, sh)
    c = function_of((m1 + m2) * (xi / 2), cosh_coefficients(n))
    inv_c = function_of(c - 1, binomial_coefficients(-1, n), alg.tensor_one(2))
    u = s * inv_c * inv_c
    h = function_of(u, arcsin_sqrt_ratio_coefficients(n), alg.tensor_one(2))
    e = exp_of(m * (-xi / 2))
    return alg.tensor(e, e) * inv_c * h


def build_standard_R(order: int = DEFAULT_ORDER, family: QuantumFamily | None = None) -> UniversalR:
    """R = exp(xi K^P f(M, xi)) for the beta1 = 0 standard algebra."""
    if order < 2:
        raise ValueError("R-matrix construction needs order >= 2")
    fam = family or standard_family(order, beta1=False)
    alg = fam.alg
    xi = param("xi", order)
    k, h, p, m = alg.gens()
    f = _central_function(alg, order, xi)
    exponent = (wedge(k, p) * f).scale(xi)
    return UniversalR("standard", tensor_exp(exponent), (exponent,))


def build_nonstandard_R(order: int = DEFAULT_ORDER, family: QuantumFamily | None = None) -> UniversalR:
    """R = e^{A3} e^{A2} e^{A1}."""
    if order < 2:
        raise ValueError("R-matrix construction needs order >= 2")
    fam = family or nonstandard_family(order)
    alg = fam.alg
    b1, b2, b3 = (param(n, order) for n in ("beta1", "beta2", "beta3"))
    k, h, p, m = alg.gens()
    a1 = alg.tensor(h, m).scale(b1) - alg.tensor(k, m).scale(b3)
    a2 = wedge(h, p).scale(b2)
    a3 = -alg.tensor(m, h).scale(b1) + alg.tensor(m, k).scale(b3)
    r = tensor_exp(a3) * tensor_exp(a2) * tensor_exp(a1)
    return UniversalR("nonstandard", r, (a1, a2, a3))


def verify_intertwining(R: UniversalR, family: QuantumFamily) -> dict:
    res = {}
    for g in GENERATORS:
        d = family.delta[g]
        res[g] = R.tensor * d - d.flip() * R.tensor
    return _residual_report(res)


def conjugate(exponent: Tensor, x: Tensor) -> Tensor:
    """e^{A} x e^{-A}."""
    return tensor_exp(exponent) * x * tensor_exp(-exponent)


def nonstandard_stages(R: UniversalR, family: QuantumFamily) -> dict[str, dict[str, Tensor]]:
    """Intermediate conjugations e^{A1} D e^{-A1}, then by A2, then by A3."""
    a1, a2, a3 = R.factors
    out = {}
    for g in ("P", "H", "K"):
        s1 = conjugate(a1, family.delta[g])
        s2 = conjugate(a2, s1)
        s3 = conjugate(a3, s2)
        out[g] = {"A1": s1, "A2": s2, "A3": s3}
    return out


def qybe_residual(R: UniversalR) -> Tensor:
    r = R.tensor
    r12, r13, r23 = r.embed((0, 1), 3), r.embed((0, 2), 3), r.embed((1, 2), 3)
    return r12 * r13 * r23 - r23 * r13 * r12


def qybe_report(R: UniversalR) -> dict:
    res = qybe_residual(R)
    by_order = {}
    for d in range(1, R.alg.order + 1):
        part = res.homogeneous(d)
        if not part.is_zero():
            by_order[str(d)] = len(part.terms)
    return {
        "order": R.alg.order,
        "lowest_nonzero_order": None if res.is_zero() else res.valuation(),
        "nonzero_terms_by_order": by_order,
    }


def nonstandard_stage_targets(alg: Algebra) -> dict[str, dict[str, Tensor]]:
    """Closed forms of the intermediate conjugations of the non-standard R."""
    b1, b2, b3 = (param(n, alg.order) for n in ("beta1", "beta2", "beta3"))
    k, h, p, m = alg.gens()
    one = alg.one()
    t = alg.tensor
    m2 = m * m
    sym = t(m2, m) + t(m, m2)
    hh = t(one, p) + t(p, one) - t(m, m).scale(b3)
    ff = t(one, h) + t(h, one) - sym.scale(b3 * b3 / 2)
    tail = -sym.scale(b1 * b3 / 2) - t(m2, m2).scale(b2 * b3 * b3 / 2)
    g1 = (t(one, k) + t(k, one) + t(h, m).scale(b2) - t(p, m2).scale(b2 * b3 / 2) + tail)
    g2 = (t(one, k) + t(k, one) + t(m, h).scale(b2) - t(m2, p).scale(b2 * b3 / 2) + tail)
    return {"P": {"A1": hh, "A2": hh}, "H": {"A1": ff, "A2": ff}, "K": {"A1": g1, "A2": g2}}


def verify_nonstandard_stages(R: UniversalR, family: QuantumFamily) -> dict:
    stages = nonstandard_stages(R, family)
    targets = nonstandard_stage_targets(family.alg)
    res = {}
    for g, st in stages.items():
        for name in ("A1", "A2"):
            res[f"{g} after {name}"] = st[name] - targets[g][name]
        res[f"{g} after A3"] = st["A3"] - family.delta[g].flip()
    return _residual_report(res)
