import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from conftest import random_geometry
from dfsqubit.couplings import (DIPOLES, DomainError, Geometry, chi_tensor,
                                closed_form_couplings, coherent_shifts,
                                collective_decay_rates, couplings_from_tensor,
                                kossakowski_matrix, limit_couplings)

geometries = st.builds(
    Geometry.from_r_over_lambda,
    st.floats(0.05, 20.0),
    st.floats(0.0, np.pi),
    st.floats(0.0, 2 * np.pi, exclude_max=True),
)


def close_mixed(a, b, rel=1e-10, abs_small=1e-12, cut=1e-8):
    a, b = np.asarray(a), np.asarray(b)
    big = np.maximum(np.abs(a), np.abs(b)) > cut
    ok_big = np.abs(a - b)[big] <= rel * np.abs(b)[big]
    ok_small = np.abs(a - b)[~big] <= abs_small
    return ok_big.all() and ok_small.all()


def test_dipoles_orthonormal():
    d = DIPOLES.as_rows()
    assert np.allclose(d.conj() @ d.T, np.eye(3), atol=1e-15)


def test_chi_symmetric_with_imaginary_part():
    chi = chi_tensor(Geometry(2 * np.pi * 0.3))
    assert np.allclose(chi, chi.T, atol=0)
    assert np.abs(chi.imag).max() > 0.1


def test_chi_along_z_has_no_xy_component():
    chi = chi_tensor(Geometry(1.3, theta=0.0))
    assert chi[0, 1] == 0 and chi[1, 0] == 0


def test_eta_zero_is_a_pole():
    with pytest.raises(DomainError):
        chi_tensor(Geometry(0.0))
    with pytest.raises(DomainError):
        coherent_shifts(0.0)
    with pytest.raises(DomainError):
        Geometry(-1.0)


def test_tensor_matches_closed_form_at_reference_point():
    g = Geometry(2 * np.pi * 0.3)
    a, b = couplings_from_tensor(g), closed_form_couplings(g)
    for i, j in [(0, 0), (2, 0)]:
        assert abs(a.omega[i, j] - b.omega[i, j]) <= 1e-12 * abs(b.omega[i, j])
        assert abs(a.gamma_cross[i, j] - b.gamma_cross[i, j]) <= 1e-12 * abs(b.gamma_cross[i, j])


@given(geometries)
def test_tensor_equals_closed_form(g):
    a, b = couplings_from_tensor(g), closed_form_couplings(g)
    assert close_mixed(a.omega, b.omega)
    assert close_mixed(a.gamma_cross, b.gamma_cross)


@given(geometries)
def test_hermitian_with_structure(g):
    for cs in (couplings_from_tensor(g), closed_form_couplings(g)):
        for m in (cs.omega, cs.gamma_cross):
            assert np.allclose(m, m.conj().T, atol=1e-12 * max(1, np.abs(m).max()))
            assert m[2, 2] == pytest.approx(m[0, 0], rel=1e-12, abs=1e-12)
            assert m[2, 1] == pytest.approx(-m[1, 0], rel=1e-10, abs=1e-12)


@given(st.floats(0.05, 10.0), st.floats(0.0, np.pi),
       st.floats(0.0, 2 * np.pi, exclude_max=True), st.floats(0.0, 2 * np.pi, exclude_max=True))
def test_phi_only_enters_as_phases(r, theta, phi1, phi2):
    a = closed_form_couplings(Geometry.from_r_over_lambda(r, theta, phi1))
    b = closed_form_couplings(Geometry.from_r_over_lambda(r, theta, phi2))
    assert np.allclose(np.abs(a.omega), np.abs(b.omega), rtol=1e-12, atol=1e-12)
    assert np.allclose(np.abs(a.gamma_cross), np.abs(b.gamma_cross), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("theta", [0.0, np.pi])
def test_axial_geometry_has_no_cross_terms(theta):
    for cs in (closed_form_couplings(Geometry(0.9, theta)), couplings_from_tensor(Geometry(0.9, theta))):
        for m in (cs.omega, cs.gamma_cross):
            off = m - np.diag(np.diag(m))
            assert np.abs(off).max() < 1e-12


def test_small_eta_limits():
    cs = closed_form_couplings(Geometry(1e-5))
    assert cs.gamma_cross[0, 0].real == pytest.approx(1.0, abs=1e-9)
    assert abs(cs.gamma_cross[2, 0]) < 1e-9
    ga, gs = collective_decay_rates(1e-5)
    assert np.all(np.abs(ga) < 1e-9)
    assert np.allclose(gs, 2.0, atol=1e-9)


def test_shift_envelopes():
    eta = 2 * np.pi * np.array([50.0, 100.0, 200.0])
    omega_F, omega_N = coherent_shifts(eta)
    # Omega_N ~ 3 sin(eta) / eta^2 and Omega_F ~ 1.5 cos(eta) / eta
    assert np.allclose(omega_N * eta**2, 3 * np.sin(eta), atol=20 / eta)
    assert np.allclose(omega_F * eta, 1.5 * np.cos(eta), atol=5 / eta)


@given(st.floats(1e-6, 200.0))
def test_rate_sum_rule(eta):
    ga, gs = collective_decay_rates(eta)
    assert np.allclose(ga + gs, 2.0, atol=1e-14)
    assert ga[0] == ga[1] and gs[0] == gs[1]


def test_series_branch_is_continuous():
    eps = 1e-12
    lo, hi = collective_decay_rates(np.array([0.5 - eps, 0.5 + eps]))
    assert np.allclose(lo[:, 0], lo[:, 1], atol=1e-10)
    assert np.allclose(hi[:, 0], hi[:, 1], atol=1e-10)


def test_decay_thresholds():
    f12 = lambda r: collective_decay_rates(2 * np.pi * r)[0][0] - 1
    f3 = lambda r: collective_decay_rates(2 * np.pi * r)[0][2] - 1
    assert brentq(f12, 0.2, 0.6) == pytest.approx(0.44, abs=0.01)
    assert brentq(f3, 0.5, 0.9) == pytest.approx(0.72, abs=0.01)
    assert np.all(collective_decay_rates(2 * np.pi * 0.1)[0] < 0.1)


@pytest.mark.parametrize("k", range(1, 21))
def test_kossakowski_psd_on_grid(k):
    cs = closed_form_couplings(Geometry(2 * np.pi * 0.05 * k))
    assert np.linalg.eigvalsh(kossakowski_matrix(cs)).min() >= -1e-10


def test_kossakowski_psd_random(rng):
    for _ in range(200):
        cs = closed_form_couplings(random_geometry(rng))
        assert np.linalg.eigvalsh(kossakowski_matrix(cs)).min() >= -1e-10


def test_limit_couplings():
    cs = limit_couplings()
    assert np.array_equal(cs.gamma_cross, np.eye(3))
    assert np.all(cs.omega == 0)


def test_geometry_validation():
    with pytest.raises(DomainError):
        Geometry(1.0, theta=4.0)
    with pytest.raises(DomainError):
        Geometry(1.0, phi=2 * np.pi)
    assert Geometry.from_r_over_lambda(0.25).eta == pytest.approx(np.pi / 2)
