import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qgalilei.poisson import (
    DEFAULT_PARAMS, FAMILIES, GENERATORS, SWITCHOVER, BlowUpError, Dual,
    EvaluationError, build_hamiltonian, casimir_functions, composed_two_particle,
    coproduct_compose, deformed_mass, family, integrate, involution_certificate,
    poisson_bracket, random_points, relative_bracket, resolve_potential,
    sinh_quarter, table_two_particle, value)

FAMS = [family(t, **DEFAULT_PARAMS[t]) for t in FAMILIES]
IDS = list(FAMILIES)


def comp_fn(fam, masses, g):
    c = coproduct_compose(fam, masses)
    return lambda x: c(x)[g]


def test_undeformed_two_particle():
    f = coproduct_compose(family("none"), (1.5, 2.0))
    X = f([0.3, -0.4, 1.1, 0.7])
    assert X["P"] == pytest.approx(1.8)
    assert X["K"] == pytest.approx(1.5 * 0.3 + 2.0 * -0.4)
    assert X["H"] == pytest.approx(1.1 ** 2 / 3 + 0.7 ** 2 / 4)


def test_standard_two_particle_boost():
    xi, b1, m1, m2 = 0.3, 0.2, 1.2, 0.8
    q1, q2, p1, p2 = 0.4, -0.1, 0.9, 0.5
    K = coproduct_compose(family("standard", xi=xi, beta1=b1), (m1, m2))([q1, q2, p1, p2])["K"]
    M = lambda m: (math.exp(2 * xi * m) - 1) / (2 * xi)
    e = math.exp(xi * m2)
    assert K == pytest.approx(e * M(m1) * q1 + M(m2) * q2 + b1 * e * m2 * p1, rel=1e-14)


def test_iib_two_particle_mass():
    a, m1, m2, p1, p2 = 0.3, 1.2, 0.8, 0.9, -0.5
    X = coproduct_compose(family("IIb", alpha=a), (m1, m2))([0.0, 0.0, p1, p2])
    expect = m1 * math.exp(-a * p1 / 2) * math.exp(-a * p2) + m2 * math.exp(-a * p2 / 2)
    assert X["M"] == pytest.approx(expect, rel=1e-14)
    c1, _ = casimir_functions(family("IIb", alpha=a), (m1, m2))([0.0, 0.0, p1, p2])
    assert c1 == pytest.approx(m1 * math.exp(-a * p2 / 2) + m2 * math.exp(a * p1 / 2))


def test_canonical_bracket():
    assert poisson_bracket(lambda x: x[0], lambda x: x[1], [0.2, 0.5]) == 1.0


def test_iib_one_particle_bracket():
    a, m = 0.3, 1.4
    fam = family("IIb", alpha=a)
    x = [0.7, 0.45]
    val = poisson_bracket(comp_fn(fam, (m,), "K"), comp_fn(fam, (m,), "P"), x)
    assert val == pytest.approx(math.exp(-a * x[1] / 2) * m, rel=1e-14)


def test_undeformed_casimir_value():
    _, c2 = casimir_functions(family("none"), (1.0, 2.0))([0.0, 0.0, 3.0, 1.0])
    assert c2 == pytest.approx(-12.5)


@pytest.mark.parametrize("fam", FAMS, ids=IDS)
def test_one_particle_casimirs(fam):
    c1, c2 = casimir_functions(fam, (1.3,))([0.4, 0.6])
    # only IIb carries a momentum-dependent C1; its one-particle value is still m
    assert value(c1) == pytest.approx(1.3, rel=1e-14)
    assert abs(value(c2)) < 1e-13


@pytest.mark.parametrize("fam", FAMS, ids=IDS)
def test_table_matches_composition(fam):
    rng = np.random.default_rng(1)
    table = table_two_particle(fam, 1.1, 0.7)
    composed = composed_two_particle(fam, 1.1, 0.7)
    for x in random_points(rng, 2, 20):
        a, b = table(list(x)), composed(list(x))
        for key in GENERATORS + ("C1", "C2"):
            assert a[key] == pytest.approx(b[key], rel=1e-12, abs=1e-12), key


@pytest.mark.parametrize("fam", FAMS, ids=IDS)
def test_closure(fam):
    rng = np.random.default_rng(2)
    masses = (1.1, 0.7)
    comp = coproduct_compose(fam, masses)
    for x in random_points(rng, 2, 10):
        rel = fam.brackets({g: value(v) for g, v in comp(list(x)).items()})
        for (a, b), expect in rel.items():
            got, scale = poisson_bracket(comp_fn(fam, masses, a), comp_fn(fam, masses, b),
                                         list(x), relative=True)
            assert abs(got - value(expect)) <= 1e-10 * max(scale, 1.0), (a, b)


@pytest.mark.parametrize("fam", FAMS, ids=IDS)
def test_two_particle_involution(fam):
    rng = np.random.default_rng(3)
    c2 = lambda x: casimir_functions(fam, (1.1, 0.7))(x)[1]
    H = comp_fn(fam, (1.1, 0.7), "H")
    for x in random_points(rng, 2, 20):
        assert relative_bracket(H, c2, list(x)) < 1e-10


@settings(max_examples=8)
@given(tag=st.sampled_from(FAMILIES), n=st.integers(2, 4),
       potential=st.sampled_from(["harmonic", "exponential", "quartic", "zero"]),
       seed=st.integers(0, 2**31))
def test_involution_property(tag, n, potential, seed):
    rng = np.random.default_rng(seed)
    masses = rng.uniform(0.5, 2.0, size=n)
    system = build_hamiltonian(family(tag, **DEFAULT_PARAMS[tag]), masses, potential)
    cert = involution_certificate(system, random_points(rng, n, 20, scale=0.8))
    assert cert["ok"], cert["max_relative"]


@pytest.mark.parametrize("x", [0.9 * SWITCHOVER, SWITCHOVER, 1.1 * SWITCHOVER])
def test_deformed_mass_switchover(x):
    m = 1.0
    closed = math.expm1(x * m) / x
    assert deformed_mass(m, x) == pytest.approx(closed, rel=1e-14)
    assert deformed_mass(m, 0.0) == m
    assert sinh_quarter(0.7, 0.0) == 0.7


def test_limit_rate_is_linear():
    x = [0.3, -0.2, 0.8, 0.4]
    masses = (1.2, 0.9)
    base = casimir_functions(family("none"), masses)(x)[1]

    def dev(xi):
        return abs(casimir_functions(family("standard", xi=xi, beta1=xi), masses)(x)[1] - base)

    ratios = [dev(h) / dev(h / 2) for h in (1e-2, 5e-3, 2.5e-3)]
    assert all(abs(r - 2) < 0.05 for r in ratios)


def test_standard_harmonic_hamiltonian():
    xi, b1, m1, m2 = 0.3, 0.2, 1.0, 2.0
    sys_ = build_hamiltonian(family("standard", xi=xi, beta1=b1), (m1, m2), "harmonic")
    q1, q2, p1, p2 = 0.3, -0.2, 0.5, 0.1
    M = lambda m: math.expm1(2 * xi * m) / (2 * xi)
    e = math.exp(xi * m2)
    k = e * M(m1) * q1 + M(m2) * q2 + b1 * e * m2 * p1
    expect = p1 ** 2 / (2 * M(m1)) + p2 ** 2 / (2 * M(m2)) + k * k / 2
    assert value(sys_.hamiltonian([q1, q2, p1, p2])) == pytest.approx(expect, rel=1e-14)


def test_iib_kinetic_terms():
    a, m1, m2 = 0.4, 1.0, 1.5
    sys_ = build_hamiltonian(family("IIb", alpha=a), (m1, m2), "zero")
    p1, p2 = 0.8, -0.6
    kin = lambda p, m: (math.sinh(a * p / 4) / (a / 4)) ** 2 / (2 * m)
    got = sys_.energy_parts([0.1, 0.2, p1, p2])["kinetic"]
    assert got == pytest.approx(kin(p1, m1) + kin(p2, m2), rel=1e-14)


def test_free_motion_is_ballistic():
    sys_ = build_hamiltonian(family("none"), (1.0, 2.0), "zero")
    x0 = [0.1, -0.3, 0.5, 0.4]
    tr = integrate(sys_, x0, 2.0, 0.01)
    q = tr.states[-1][:2]
    assert q == pytest.approx([0.1 + 0.5 * 2.0, -0.3 + 0.4 / 2.0 * 2.0], abs=1e-12)


@pytest.mark.parametrize("tag", FAMILIES)
def test_free_motion_conserves_momentum(tag):
    fam = family(tag, **DEFAULT_PARAMS[tag])
    sys_ = build_hamiltonian(fam, (1.0, 1.5, 0.8), "zero")
    P = comp_fn(fam, (1.0, 1.5, 0.8), "P")
    tr = integrate(sys_, [0.1, 0.2, -0.1, 0.3, -0.2, 0.4], 1.0, 0.01)
    ps = [value(P(list(s))) for s in tr.states]
    assert max(ps) - min(ps) < 1e-12
    assert max(tr.drift().values()) < 1e-10


def test_short_run_conserves_casimir():
    sys_ = build_hamiltonian(family("standard", xi=0.3, beta1=0.2), (1.0, 2.0), "harmonic")
    tr = integrate(sys_, [0.3, -0.2, 0.5, 0.1], 1.0, 1e-3)
    assert tr.drift()["C2_2"] < 1e-8


def test_midpoint_method():
    sys_ = build_hamiltonian(family("IIb", **DEFAULT_PARAMS["IIb"]), (1.0, 2.0), "harmonic")
    tr = integrate(sys_, [0.3, -0.2, 0.5, 0.1], 1.0, 1e-2, method="midpoint")
    # energy is not quadratic, so midpoint keeps it only to O(dt^2)
    assert tr.drift()["H"] < 1e-4


def test_iib_converges_to_undeformed():
    x0 = [0.3, -0.2, 0.5, 0.1]
    ref = integrate(build_hamiltonian(family("none"), (1.0, 2.0)), x0, 1.0, 1e-2).states[-1]

    def dev(a):
        sys_ = build_hamiltonian(family("IIb", alpha=a, beta1=a, beta2=a), (1.0, 2.0))
        return np.linalg.norm(integrate(sys_, x0, 1.0, 1e-2).states[-1] - ref)

    r = dev(0.02) / dev(0.01)
    assert abs(r - 2) < 0.1


def test_blow_up_reports_last_time():
    sys_ = build_hamiltonian(family("none"), (1.0,), "cubic")
    with pytest.raises(BlowUpError) as err:
        integrate(sys_, [1.0, 0.0], 20.0, 0.01)
    assert 0 < err.value.last_time < 20.0


def test_argument_errors():
    sys_ = build_hamiltonian(family("none"), (1.0,), "zero")
    with pytest.raises(ValueError):
        integrate(sys_, [0.0, 0.0], 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(sys_, [0.0, 0.0], 1.0, 0.1, method="euler")
    with pytest.raises(ValueError):
        family("IIa")
    with pytest.raises(ValueError):
        resolve_potential("cosine")
    with pytest.raises(ValueError):
        resolve_potential(lambda u: float(value(u)))
    with pytest.raises(EvaluationError), np.errstate(invalid="ignore"):
        poisson_bracket(lambda x: x[0] * float("inf"), lambda x: x[1], [1.0, 1.0])


def test_dual_arithmetic():
    x, y = Dual.variables([2.0, 3.0])
    f = x * y / (x + 1) - x ** 2
    assert f.val == pytest.approx(2 * 3 / 3 - 4)
    assert f.grad == pytest.approx([3 / 3 - 6 / 9 - 4, 2 / 3])


def test_csv_output(tmp_path):
    sys_ = build_hamiltonian(family("none"), (1.0, 2.0), "harmonic")
    tr = integrate(sys_, [0.1, 0.2, 0.3, 0.4], 0.1, 0.01)
    path = tmp_path / "traj.csv"
    tr.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,q1,q2,p1,p2,H,C2_2"
    assert len(lines) == len(tr.times) + 1
