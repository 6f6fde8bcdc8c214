from fractions import Fraction

import pytest

from qgalilei.algebra import Algebra, commutator, wedge
from qgalilei.hopf import (
    IMPLEMENTED_FAMILIES, CompletionError, PreconditionError, QuantumFamily,
    build_family, build_nonstandard_R, build_standard_R, family_ib, family_iib,
    ia_general_coproduct, ia_lm_matrix, ib_coproduct_completion, ib_lm_matrix,
    lm_coproduct, nonstandard_family, qybe_report, standard_family, tensor_exp,
    verify_intertwining, verify_nonstandard_stages)
from qgalilei.scalars import Series, param

import closed_forms
from closed_forms import ex


def params(order, *names):
    return [param(n, order) for n in names]


@pytest.mark.parametrize("tag", IMPLEMENTED_FAMILIES)
@pytest.mark.parametrize("order", [2, 4, 6])
def test_family_passes_all_checks(tag, order):
    report = build_family(tag, order).verify_all()
    failed = [k for k, v in report.items() if not v["ok"]]
    assert failed == []


def test_iia_not_implemented():
    with pytest.raises(NotImplementedError):
        build_family("IIa", 2)


@pytest.mark.parametrize("build, form", [
    (standard_family, closed_forms.standard),
    (nonstandard_family, closed_forms.nonstandard),
    (family_iib, closed_forms.iib),
    (family_ib, closed_forms.ib_full),
])
def test_coproduct_matches_closed_form(build, form):
    fam = build(5)
    expect = form(fam.alg)
    assert all(fam.delta[g] == expect[g] for g in "KHPM")


def test_ib_lm_part():
    a = family_ib(5).alg
    xi, b3 = params(5, "xi", "beta3")
    part = lm_coproduct(ib_lm_matrix(a, xi, b3), ("K", "H", "P"))
    expect = closed_forms.ib_lm_part(a)
    assert all(part[g] == expect[g] for g in "KHP")


def test_iib_mass_bracket():
    fam = family_iib(4)
    k, m = fam.alg.gen("K"), fam.alg.gen("M")
    assert commutator(m, k) == (m * m).scale(param("alpha", 4) / 2)


def test_ib_completion_limits():
    n = 4
    fam = family_ib(n)
    a = fam.alg
    zero = {"xi": 0, "beta3": 0}
    dk = fam.delta["K"].subs(zero)
    nu = param("nu", n)
    assert dk == a.primitive("K") + a.tensor(a.gen("P"), a.gen("H")).scale(nu)
    # nu = 0 leaves the LM output untouched
    xi, b3 = params(n, "xi", "beta3")
    part = lm_coproduct(ib_lm_matrix(a, xi, b3), ("K", "H", "P"))
    part["M"] = a.primitive("M")
    done = ib_coproduct_completion(part, Series.constant(0, n), xi, b3)
    assert done["K"] == part["K"]


def test_ib_completion_rejects_wrong_partial():
    n = 3
    a = family_ib(n).alg
    xi, b3, nu = params(n, "xi", "beta3", "nu")
    part = {g: a.primitive(g) for g in "KHPM"}
    with pytest.raises(CompletionError):
        ib_coproduct_completion(part, nu, xi, b3)


def test_lm_zero_matrix_is_primitive():
    a = Algebra.undeformed(3)
    z = Series.constant(0, 3)
    d = lm_coproduct(ia_lm_matrix(a, z, z, z, z, z, z), ("K", "H", "P"))
    assert all(d[g] == a.primitive(g) for g in "KHP")


def test_lm_rejects_noncommuting_entries():
    a = Algebra.undeformed(3)
    k, h, p, m = a.gens()
    z = a.zero()
    with pytest.raises(PreconditionError):
        lm_coproduct([[k * param("xi", 3), z], [z, p * param("xi", 3)]], ("K", "P"))


def test_general_ia_reduces_to_subfamilies():
    n = 4
    d = ia_general_coproduct(n)
    std = d["K"].subs({"beta2": 0, "beta3": 0, "beta5": 0, "beta4": param("xi", n)})
    ref = standard_family(n).delta["K"].rebase(d["K"].alg)
    assert std == ref
    ns = d["K"].subs({"xi": 0, "beta4": 0, "beta5": 0})
    assert ns == nonstandard_family(n).delta["K"].rebase(d["K"].alg)


def _tampered(fam, g, delta_g):
    delta = dict(fam.delta)
    delta[g] = delta_g
    return QuantumFamily("tampered", fam.alg, delta, fam.casimirs, fam.parameters)


def test_dropped_beta1_term():
    fam = standard_family(4)
    a = fam.alg
    k, h, p, m = a.gens()
    xi = param("xi", 4)
    bad = _tampered(fam, "K", a.tensor(a.one(), k) + a.tensor(k, ex(m * xi)))
    # the table does not involve beta1, so the truncated coproduct is still
    # an algebra map; it no longer reproduces the beta1 P^M cocommutator
    assert bad.verify_homomorphism()["ok"]
    bad.cocommutator = fam.cocommutator
    report = bad.semiclassical_residual()
    assert report["lowest_nonzero_order"]["K"] == 1


def test_wrong_exponent_breaks_homomorphism():
    fam = standard_family(4)
    a = fam.alg
    k, h, p, m = a.gens()
    xi = param("xi", 4)
    bad = _tampered(fam, "P", a.tensor(a.one(), p) + a.tensor(p, ex(m * xi.scale(2))))
    report = bad.verify_homomorphism()
    assert report["lowest_nonzero_order"]["K,P"] is not None


def test_dropped_cross_term_breaks_coassociativity():
    fam = nonstandard_family(4)
    a = fam.alg
    k, h, p, m = a.gens()
    b1, b2 = params(4, "beta1", "beta2")
    dk = a.primitive("K") + a.tensor(p, m).scale(b1) + a.tensor(h, m).scale(b2)
    assert not _tampered(fam, "K", dk).verify_coassociativity()["ok"]


def test_casimir_with_undeformed_mass_factor_fails():
    fam = standard_family(4)
    k, h, p, m = fam.alg.gens()
    wrong = p * p - (m * h).scale(2)
    assert not commutator(wrong, k).is_zero()
    assert commutator(fam.casimirs[1], k).is_zero()


def test_iib_casimirs_central():
    fam = family_iib(6)
    assert fam.verify_casimirs()["ok"]


def test_undeformed_casimir():
    fam = build_family("undeformed", 3)
    k, h, p, m = fam.alg.gens()
    assert commutator(p * p - (m * h).scale(2), k).is_zero()


def test_standard_r_first_order():
    R = build_standard_R(2)
    a = R.alg
    k, p = a.gen("K"), a.gen("P")
    xi = param("xi", 2)
    assert R.tensor.homogeneous(0) == a.tensor_one(2)
    assert R.tensor.homogeneous(1) == wedge(k, p).scale(xi)


def test_nonstandard_r_two_parameters_off():
    n = 4
    R = build_nonstandard_R(n)
    a = R.alg
    k, m = a.gen("K"), a.gen("M")
    b3 = param("beta3", n)
    got = R.tensor.subs({"beta1": 0, "beta2": 0})
    expect = tensor_exp(a.tensor(m, k).scale(b3)) * tensor_exp(-a.tensor(k, m).scale(b3))
    assert got == expect
    zero = R.tensor.subs({"beta1": 0, "beta2": 0, "beta3": 0})
    assert zero == a.tensor_one(2)


@pytest.mark.parametrize("order", [2, 4])
def test_intertwining(order):
    assert verify_intertwining(build_standard_R(order), standard_family(order, beta1=False))["ok"]
    assert verify_intertwining(build_nonstandard_R(order), nonstandard_family(order))["ok"]


def test_nonstandard_stages():
    n = 4
    fam = nonstandard_family(n)
    assert verify_nonstandard_stages(build_nonstandard_R(n, fam), fam)["ok"]


def test_qybe_probe():
    std = qybe_report(build_standard_R(4))
    assert std["lowest_nonzero_order"] == 2
    ns = qybe_report(build_nonstandard_R(4))
    assert ns["lowest_nonzero_order"] is None


def test_r_needs_order_two():
    with pytest.raises(ValueError):
        build_standard_R(1)
