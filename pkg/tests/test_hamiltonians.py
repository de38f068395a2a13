import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_density, random_geometry, two_level_pair_dissipator
from dfsqubit.couplings import Geometry, closed_form_couplings
from dfsqubit.hamiltonians import (DIM, DriveConfig, GROUND, antisymmetric, build_dissipator,
                                   build_h_a, build_h_laser, build_h_omega, build_h_rf,
                                   build_liouvillian, commutator_generator, excitation_number,
                                   index, ket, label, projector, symmetric,
                                   trace_functional, unvec, vec)
from dfsqubit.spectral import psi_a


def test_index_is_bijective():
    seen = {index(i, j) for i in range(1, 5) for j in range(1, 5)}
    assert seen == set(range(16))
    assert index(4, 4) == 15
    assert all(label(index(i, j)) == (i, j) for i in range(1, 5) for j in range(1, 5))


def test_h_a_diagonal():
    assert np.all(build_h_a(0.0) == 0)
    h = build_h_a(1.0)
    assert h[index(1, 4), index(1, 4)] == -1
    assert h[index(3, 4), index(3, 4)] == 1
    assert h[index(1, 3), index(1, 3)] == 0
    assert h[index(4, 4), index(4, 4)] == 0


def test_h_omega_blocks(rng):
    for _ in range(20):
        cs = closed_form_couplings(random_geometry(rng))
        h = build_h_omega(cs)
        assert np.allclose(h, h.conj().T, atol=1e-12 * np.abs(h).max())
        a = np.column_stack([antisymmetric(i) for i in (1, 2, 3)])
        s = np.column_stack([symmetric(i) for i in (1, 2, 3)])
        assert np.abs(a.conj().T @ h @ s).max() < 1e-12 * np.abs(h).max()
        assert np.allclose(a.conj().T @ h @ a, cs.omega, atol=1e-12 * np.abs(h).max())
        assert np.allclose(s.conj().T @ h @ s, -cs.omega, atol=1e-12 * np.abs(h).max())


def test_h_omega_only_in_single_excitation_manifold():
    h = build_h_omega(closed_form_couplings(Geometry(0.8, 1.0, 0.4)))
    single = [index(i, 4) for i in (1, 2, 3)] + [index(4, i) for i in (1, 2, 3)]
    mask = np.ones((DIM, DIM), bool)
    mask[np.ix_(single, single)] = False
    assert np.all(h[mask] == 0)


def test_laser_dark_states():
    doubly = [ket(i, j) for i in (1, 2, 3) for j in (1, 2, 3)]
    hy = build_h_laser(DriveConfig(omega_y=5.0))
    hx = build_h_laser(DriveConfig(omega_x=5.0))
    for d in doubly:
        assert abs(d.conj() @ hy @ psi_a(2)) < 1e-14
        assert abs(d.conj() @ hx @ psi_a(3)) < 1e-14
    assert abs(ket(2, 4).conj() @ hx @ ket(4, 4)) == 0
    assert abs(ket(2, 4).conj() @ hy @ ket(4, 4)) == 0


def test_detunings_follow_zeeman():
    d = DriveConfig(delta2=0.3, zeeman=1.1)
    assert d.detunings == pytest.approx((1.4, 0.3, -0.8))


def test_rf_coupling():
    h = build_h_rf(2.0, 3.0, 0.2, 0.0)
    d = 2.0 * np.cos(0.2)
    assert h[index(3, 4), index(3, 4)] == pytest.approx(2 * d)
    assert h[index(1, 4), index(1, 4)] == pytest.approx(-2 * d)
    assert h[index(2, 4), index(2, 4)] == 0 and h[index(4, 4), index(4, 4)] == 0
    t_node = (np.pi / 2 - 0.2) / 3.0
    assert np.abs(build_h_rf(2.0, 3.0, 0.2, t_node)).max() < 1e-14


def test_vectorization_convention(rng):
    a, b = rng.normal(size=(2, 16, 16)) + 1j * rng.normal(size=(2, 16, 16))
    rho = random_density(rng)
    assert np.allclose(np.kron(a, b.T) @ vec(rho), vec(a @ rho @ b))
    assert np.array_equal(unvec(vec(rho)), rho)


def test_dissipator_trace_and_ground(rng):
    for _ in range(10):
        cs = closed_form_couplings(random_geometry(rng))
        d = build_dissipator(cs)
        assert np.abs(trace_functional() @ d).max() < 1e-10
        assert np.abs(d @ vec(projector(ket(GROUND, GROUND)))).max() < 1e-14


@given(st.floats(0.05, 5.0), st.floats(0, np.pi), st.floats(0, 6.28), st.floats(-3, 3))
def test_liouvillian_preserves_hermiticity(r, theta, phi, delta):
    cs = closed_form_couplings(Geometry.from_r_over_lambda(r, theta, phi))
    l = build_liouvillian(build_h_a(delta) + build_h_omega(cs), build_dissipator(cs))
    rng = np.random.default_rng(0)
    rho = random_density(rng)
    out = unvec(l @ vec(rho))
    assert np.allclose(out, out.conj().T, atol=1e-10 * np.abs(out).max())
    assert abs(trace_functional() @ l @ vec(rho)) < 1e-10


def test_unitary_generator_spectrum():
    h = build_h_a(0.7) + build_h_omega(closed_form_couplings(Geometry(1.1, 0.5, 0.2)))
    w = np.linalg.eigvals(commutator_generator(h))
    assert np.abs(w.real).max() < 1e-10


def test_excitation_number_conserved():
    n = excitation_number()
    h = build_h_a(0.9) + build_h_omega(closed_form_couplings(Geometry(0.7, 1.2, 2.0)))
    assert np.abs(h @ n - n @ h).max() < 1e-12


def test_dissipator_only_lowers_excitation():
    # population flows from N=2 to N=1 to N=0 and never upward
    cs = closed_form_couplings(Geometry(0.9, 0.8, 0.3))
    d = build_dissipator(cs)
    n = np.real(np.diag(excitation_number()))
    for k in range(DIM):
        rho = np.zeros((DIM, DIM))
        rho[k, k] = 1.0
        out = np.real(np.diag(unvec(d @ vec(rho))))
        gained = np.flatnonzero(out > 1e-14)
        assert np.all(n[gained] < n[k])


def test_laser_commutes_without_drive():
    h = build_h_laser(DriveConfig())
    ho = build_h_omega(closed_form_couplings(Geometry(0.9)))
    assert np.abs(h @ ho - ho @ h).max() == 0


def test_axial_dissipator_reduces_to_two_level_pairs():
    cs = closed_form_couplings(Geometry(0.9, theta=0.0))
    d = build_dissipator(cs)
    for lvl in (1, 2, 3):
        states = [index(lvl, lvl), index(lvl, 4), index(4, lvl), index(4, 4)]
        pairs = [(i, j) for i in states for j in states]
        sel = [i * DIM + j for i, j in pairs]
        block = d[np.ix_(sel, sel)]
        ref = two_level_pair_dissipator(cs.gamma_cross[lvl - 1, lvl - 1].real)
        assert np.allclose(block, ref, atol=1e-12)
        # the block is closed: operators on it are mapped back into it
        others = np.setdiff1d(np.arange(DIM * DIM), sel)
        assert np.abs(d[np.ix_(others, sel)]).max() < 1e-12
