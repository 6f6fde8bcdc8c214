from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgalilei.lattice import (
    GridError, StabilityError, continuum_comparison, convergence_study,
    deformed_laplacian, evolve, gaussian, heat_kernel_solution, make_field,
    op_K, operator_identities, plane_wave_check, solve_hse, stencil_matrix, symbol,
    verify_symmetry, write_snapshots)


def small(alpha=0.5, stride=1, **kw):
    return make_field(gaussian(1.0), alpha, half_width=6.0, stride=stride, **kw)


def test_constant_is_annihilated():
    f = make_field(lambda x: np.full_like(x, 3.0), 0.2, 5.0)
    assert np.max(np.abs(deformed_laplacian(f))) < 1e-12


@pytest.mark.parametrize("stride", [1, 2, 3])
def test_plane_wave_symbol(stride):
    assert plane_wave_check(small(0.4, stride)) < 1e-13


def test_symbol_closed_form():
    # the stencil row (4/a^2)(1, -2, 1) on half-spacing nodes, evaluated by hand
    a, k = 0.3, 2.1
    by_hand = (4 / a ** 2) * (2 * np.cos(k * a / 2) - 2)
    assert symbol(k, a) == pytest.approx(by_hand, rel=1e-13)
    assert symbol(k, 0.0) == -k ** 2


def test_stencil_symmetric_and_translation_invariant():
    f = small(0.5)
    A = stencil_matrix(f)
    assert np.array_equal(A, A.T)
    assert np.allclose(np.roll(np.roll(A, 1, 0), 1, 1), A)


def test_stencil_fourier_diagonal():
    f = small(0.5)
    A = stencil_matrix(f)
    got = np.sort(np.linalg.eigvalsh(A))
    expect = np.sort(symbol(f.wavenumbers(), f.alpha))
    assert np.allclose(got, expect, atol=1e-10 * 16 / f.alpha ** 2)


def test_laplacian_converges_quadratically():
    errs = []
    for a in (0.2, 0.1, 0.05):
        f = make_field(gaussian(1.0), a, 10.0)
        exact = (f.x ** 2 - 1) * np.exp(-f.x ** 2 / 2)
        errs.append(np.max(np.abs(deformed_laplacian(f) - exact)))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(rates - 2) < 0.1)


def test_single_mode_decay():
    f = make_field(lambda x: np.cos(2 * np.pi * x / 12.0), 0.25, 6.0, mass=0.7)
    k = 2 * np.pi / 12.0
    t = 0.8
    expect = np.exp(symbol(k, f.alpha) / (2 * f.mass) * t) * f.psi
    for scheme, dt, tol in (("exact", 0.1, 1e-12), ("cn", 1e-3, 1e-7)):
        got = solve_hse(f, t, dt, scheme=scheme)[-1].psi
        assert np.max(np.abs(got - expect)) < tol


def test_zero_data_stays_zero():
    f = make_field(np.zeros_like, 0.5, 4.0)
    for scheme in ("exact", "cn", "explicit"):
        assert not np.any(solve_hse(f, 0.5, 0.01, scheme=scheme)[-1].psi)


def test_explicit_stability_error():
    f = small(0.1)
    with pytest.raises(StabilityError):
        solve_hse(f, 0.1, 0.01, scheme="explicit")
    with pytest.raises(StabilityError):
        solve_hse(f, 0.1, 1e-5, scheme="explicit", schrodinger=True)


def test_dirichlet_explicit_matches_cn():
    f = small(0.5, boundary="dirichlet")
    a = solve_hse(f, 0.2, 0.005, scheme="explicit")[-1].psi
    b = solve_hse(f, 0.2, 0.005, scheme="cn")[-1].psi
    assert np.max(np.abs(a - b)) < 1e-3
    with pytest.raises(ValueError):
        solve_hse(f, 0.2, 0.01, scheme="exact")


def test_schrodinger_cn_is_unitary():
    f = small(0.5)
    out = solve_hse(f, 1.0, 0.01, scheme="cn", schrodinger=True)[-1].psi
    assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(f.psi), rel=1e-12)


def test_snapshots(tmp_path):
    f = small(0.5)
    out = solve_hse(f, 0.4, 0.1, snapshots=(0.2,))
    assert [g.t for g in out] == pytest.approx([0.2, 0.4])
    path = tmp_path / "snap.csv"
    write_snapshots(path, out)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,psi"
    assert len(lines) == 1 + 2 * f.n


def test_convergence_exponent():
    study = convergence_study(0.05, levels=3)
    assert 1.8 <= study["exponent"] <= 2.2


def test_heat_kernel_matches_undeformed_spectral():
    f = make_field(gaussian(1.0), 1e-9, 20.0, mode="spectral", n=1024)
    g = evolve(f, 0.5)
    assert np.max(np.abs(g.psi - heat_kernel_solution(f.x, 0.5, 1.0))) < 1e-10
    assert continuum_comparison(1e-9) < 1e-8


@pytest.mark.parametrize("schrodinger", [False, True])
@pytest.mark.parametrize("stride", [1, 2])
def test_symmetry_commuting_diagrams(schrodinger, stride):
    f = make_field(gaussian(1.0), 0.2, 12.0, stride=stride)
    rep = verify_symmetry(f, 0.5, schrodinger=schrodinger)
    assert max(rep["deviation"].values()) < 1e-10
    assert rep["deviation"]["M"] <= 1e-12
    assert max(rep["identities"].values()) < 1e-10


def test_wrong_time_label_breaks_boost():
    # K carries explicit t; using the initial t after evolving is not a symmetry
    f = make_field(gaussian(1.0), 0.2, 12.0)
    later = evolve(f, 0.5)
    a = evolve(f.with_psi(op_K(f, f.psi, 0.0)), 0.5).psi
    b = op_K(later, later.psi, 0.0)
    assert np.max(np.abs(a - b)) > 1e-3


@given(st.floats(0.05, 0.5), st.integers(1, 3))
def test_identities_hold_on_lattice(alpha, stride):
    f = make_field(gaussian(1.0), alpha, 8.0, stride=stride)
    assert max(operator_identities(f).values()) < 1e-9


def test_grid_errors():
    with pytest.raises(GridError):
        make_field(gaussian(), -0.1)
    with pytest.raises(GridError):
        make_field(gaussian(), 0.1, boundary="neumann")
    with pytest.raises(GridError):
        make_field(gaussian(), 0.1, mode="spectral", boundary="dirichlet")
    f = small(0.5)
    with pytest.raises(GridError):
        deformed_laplacian(replace(f, alpha=0.3))
    with pytest.raises(GridError):
        verify_symmetry(small(0.5, boundary="dirichlet"))
