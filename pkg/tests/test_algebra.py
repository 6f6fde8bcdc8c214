import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qgalilei.algebra import (
    GENERATORS, Algebra, CapExceededError, SkewnessError, commutator, schouten,
    wedge, wedge3)
from qgalilei.hopf import build_family, expm1_over
from qgalilei.scalars import Series, param


def und(order=4):
    return Algebra.undeformed(order)


def standard_alg(order=4):
    return build_family("Ia-standard", order).alg


def test_normal_order_examples():
    a = und()
    K, H, P, M = a.gens()
    assert a.normal_order("PK") == K * P - M
    assert a.normal_order("MK") == K * M


def test_normal_order_standard_table():
    a = standard_alg(5)
    K, H, P, M = a.gens()
    xi = param("xi", 5)
    # (e^{2 xi M} - 1)/(2 xi)
    assert a.normal_order("PK") == K * P - expm1_over(M, xi.scale(2))


def test_commutator_examples():
    a = und()
    K, H, P, M = a.gens()
    assert commutator(K, H) == P
    assert commutator(K, P * P) == (P * M).scale(2)
    for tag in ("Ia-standard", "Ia-nonstandard", "Ib"):
        alg = build_family(tag, 3).alg
        m = alg.gen("M")
        assert all(commutator(m, g).is_zero() for g in alg.gens())


def test_verify_jacobi():
    assert und().verify_jacobi()["ok"]
    assert standard_alg(5).verify_jacobi()["ok"]
    M = (0, 0, 0, 1)
    H = (0, 1, 0, 0)
    broken = Algebra({("K", "P"): {M: 1}, ("K", "H"): {(0, 0, 1, 0): 1}, ("H", "P"): {H: 1}})
    report = broken.verify_jacobi()
    assert not report["ok"]
    # [[K,H],P] + [[H,P],K] + [[P,K],H] = [H,K] = -P
    assert report["residuals"]["K,H,P"] == "-P"


def test_tampered_h_p_to_k_is_consistent():
    # all Jacobi triples for [H,P]=K reduce to brackets that vanish
    alg = Algebra({("K", "P"): {(0, 0, 0, 1): 1}, ("K", "H"): {(0, 0, 1, 0): 1},
                   ("H", "P"): {(1, 0, 0, 0): 1}})
    assert alg.verify_jacobi()["ok"]


def test_degree_cap():
    alg = Algebra.undeformed(2, degree_cap=3)
    with pytest.raises(CapExceededError):
        alg.normal_order("KKKK")


def test_tensor_examples():
    a = und()
    K, H, P, M = a.gens()
    one = a.one()
    assert a.tensor(K, P) * a.tensor(one, M) == a.tensor(K, P * M)
    assert a.tensor(P, one) * a.tensor(K, one) == a.tensor(K * P, one) - a.tensor(M, one)
    assert a.tensor(K, P).flip() == a.tensor(P, K)


def test_wedge_examples():
    a = und()
    K, H, P, M = a.gens()
    assert wedge(K, P) == a.tensor(K, P) - a.tensor(P, K)
    assert wedge(H, H).is_zero()
    assert (wedge(P, M) + wedge(M, P)).is_zero()


def _generic_r(a, coeffs):
    K, H, P, M = a.gens()
    a1, a2, a3, a5, a6 = coeffs
    return (wedge(K, P).scale(a1) + wedge(K, M).scale(a2) + wedge(K, H).scale(a3)
            + wedge(P, H).scale(a5) + wedge(M, H).scale(a6))


# independent oracle: Lie structure constants on dense component arrays
_STRUCT = {(0, 1): {2: 1}, (0, 2): {3: 1}}  # [K,H]=P, [K,P]=M


def _br(i, j):
    if (i, j) in _STRUCT:
        return _STRUCT[(i, j)]
    if (j, i) in _STRUCT:
        return {k: -v for k, v in _STRUCT[(j, i)].items()}
    return {}


def _schouten_oracle(r):
    out = {}

    def add(key, v):
        out[key] = out.get(key, 0) + v

    for (i, j), x in r.items():
        for (k, l), y in r.items():
            for s, c in _br(i, k).items():
                add((s, j, l), x * y * c)
            for s, c in _br(j, k).items():
                add((i, s, l), x * y * c)
            for s, c in _br(j, l).items():
                add((i, k, s), x * y * c)
    return {k: v for k, v in out.items() if v}


def _components(t):
    out = {}
    for key, c in t.terms.items():
        assert all(sum(m) == 1 for m in key)
        idx = tuple(m.index(1) for m in key)
        out[idx] = c.constant_term()
    return out


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@given(st.tuples(coeff, coeff, coeff, coeff, coeff))
def test_schouten_matches_structure_constants(coeffs):
    a = und(2)
    r = _generic_r(a, coeffs)
    assert _components(schouten(r)) == _schouten_oracle(_components(r))


@given(st.tuples(coeff, coeff, coeff, coeff, coeff))
def test_schouten_closed_form(coeffs):
    a = und(2)
    K, H, P, M = a.gens()
    a1, a2, a3, a5, a6 = coeffs
    expect = (wedge3(K, P, H).scale(-a3 * a3) + wedge3(K, P, M).scale(a1 * a1 - a2 * a3)
              + wedge3(K, H, M).scale(a1 * a3) + wedge3(P, H, M).scale(a1 * a5 - a3 * a6))
    s = schouten(_generic_r(a, coeffs))
    assert s == expect
    # total antisymmetry
    assert s.permute((1, 0, 2)) == -s
    assert s.permute((0, 2, 1)) == -s


def test_schouten_examples():
    a = und(2)
    K, H, P, M = a.gens()
    assert schouten(wedge(K, P)) == wedge3(K, P, M)
    assert schouten(wedge(H, M)).is_zero()
    with pytest.raises(SkewnessError):
        schouten(a.tensor(K, P))


def _random_reduce(alg, word, rng):
    """Order a word by random adjacent swaps G_j G_i -> G_i G_j - [G_i, G_j]."""
    idx = {g: i for i, g in enumerate(GENERATORS)}
    state = {tuple(word): Series.constant(1, alg.order)}
    done = {}
    while state:
        w = rng.choice(sorted(state))
        c = state.pop(w)
        inversions = [p for p in range(len(w) - 1) if idx[w[p]] > idx[w[p + 1]]]
        if not inversions:
            done[w] = done.get(w, Series.constant(0, alg.order)) + c
            continue
        p = rng.choice(inversions)
        lo, hi = w[p + 1], w[p]
        swapped = w[:p] + (lo, hi) + w[p + 2:]
        state[swapped] = state.get(swapped, Series.constant(0, alg.order)) + c
        for mono, v in alg.bracket(lo, hi).terms.items():
            mid = tuple(g for g, e in zip(GENERATORS, mono) for _ in range(e))
            nw = w[:p] + mid + w[p + 2:]
            state[nw] = state.get(nw, Series.constant(0, alg.order)) - c * v
        state = {k: v for k, v in state.items() if v}
    total = alg.zero()
    for w, c in done.items():
        mono = tuple(w.count(g) for g in GENERATORS)
        total = total + alg.element({mono: c})
    return total


@pytest.mark.parametrize("tag", ["undeformed", "Ia-standard", "Ib", "IIb"])
@given(word=st.lists(st.sampled_from(GENERATORS), min_size=2, max_size=5),
       seed=st.integers(0, 10**6))
def test_normal_order_confluent(tag, word, seed):
    alg = build_family(tag, 3).alg
    assert _random_reduce(alg, word, random.Random(seed)) == alg.normal_order(word)


@st.composite
def elements(draw, alg):
    total = alg.zero()
    for _ in range(draw(st.integers(1, 3))):
        mono = tuple(1 if i == draw(st.integers(0, 3)) else 0 for i in range(4))
        mono = tuple(a + b for a, b in zip(mono, draw(st.sampled_from(
            [(0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0), (1, 0, 0, 0)]))))
        total = total + alg.element({mono: draw(st.integers(-3, 3))})
    return total


@pytest.mark.parametrize("tag", ["undeformed", "Ia-standard", "Ia-nonstandard", "Ib", "IIb"])
@given(data=st.data())
def test_associativity(tag, data):
    alg = build_family(tag, 3).alg
    # deformed brackets raise the degree; the default cap is a safety rail, not a bound
    alg.degree_cap = 32
    x, y, z = (data.draw(elements(alg)) for _ in range(3))
    assert (x * y) * z == x * (y * z)
