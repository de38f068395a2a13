"""
Single-qubit control inside the decoherence-free subspace.

The qubit is spanned by |0> = psi_a^2 and |1> = psi_a^3 (atoms on the x axis,
theta = pi/2, phi = 0), with Bloch components

    B_x = 2 Re rho_01,  B_y = -2 Im rho_01,  B_z = rho_00 - rho_11.

A static Zeeman splitting tilts the precession axis into the x-z plane. An RF
field modulating the splitting near the qubit frequency Omega_N - Omega_F gives
an arbitrary axis in the rotating frame. The full 16-level simulations keep the
counter-rotating terms; only the qubit coherence is transformed to the frame
rotating at omega_rf afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .couplings import DomainError, Geometry, closed_form_couplings, coherent_shifts
from .dynamics import (ModulatedGenerator, Trajectory, density, evolve, static_liouvillian)
from .hamiltonians import (build_dissipator, build_h_omega, build_h_rf,
                           build_liouvillian, commutator_generator)
from .spectral import bohr_frequency, psi_a

PAULI = np.array([[[0, 1], [1, 0]],
                  [[0, -1j], [1j, 0]],
                  [[1, 0], [0, -1]]], dtype=complex)


@dataclass(frozen=True)
class QubitHamiltonian:
    """Traceless 2x2 generator ``rate * axis . sigma / 2`` over (psi_a^2, psi_a^3)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2) or np.abs(m - m.conj().T).max() > 1e-12:
            raise ValueError("qubit Hamiltonian must be a Hermitian 2x2 matrix")
        object.__setattr__(self, "matrix", m - np.trace(m) / 2 * np.eye(2))

    @property
    def field(self) -> np.ndarray:
        """rate * axis, i.e. the real 3-vector h with matrix = h . sigma / 2."""
        return np.real(np.einsum("kij,ji->k", PAULI, self.matrix))

    @property
    def rate(self) -> float:
        return float(np.linalg.norm(self.field))

    @property
    def axis(self) -> np.ndarray:
        h = self.field
        n = np.linalg.norm(h)
        return h / n if n > 0 else np.array([0.0, 0.0, 1.0])

    def propagator(self, t: float) -> np.ndarray:
        return scipy.linalg.expm(-1j * self.matrix * t)

    def bloch_trajectory(self, times, b0=(0.0, 0.0, 1.0)) -> np.ndarray:
        """Bloch vectors of the unitary evolution, rotating b0 about the axis."""
        rho0 = 0.5 * (np.eye(2) + np.einsum("k,kij->ij", np.asarray(b0, float), PAULI))
        out = []
        for t in np.asarray(times, dtype=float):
            u = self.propagator(t)
            out.append(qubit_bloch(u @ rho0 @ u.conj().T))
        return np.array(out)


def qubit_bloch(rho2: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("kij,ji->k", PAULI, rho2))


def static_qubit_hamiltonian(eta: float, delta: float) -> QubitHamiltonian:
    """Qubit generator for a static Zeeman splitting delta (theta = pi/2).

    Returns the matrix [[-(N - F)/2, -delta], [-delta, (N - F)/2]] whose axis is
    -(2 delta, 0, Omega_N - Omega_F) / omega_B and whose rate is omega_B.
    """
    omega_F, omega_N = (float(v) for v in coherent_shifts(eta))
    w = (omega_N - omega_F) / 2
    return QubitHamiltonian(np.array([[-w, -delta], [-delta, w]], dtype=complex))


def static_axis(eta: float, delta: float) -> np.ndarray:
    omega_F, omega_N = (float(v) for v in coherent_shifts(eta))
    return -np.array([2 * delta, 0.0, omega_N - omega_F]) / bohr_frequency(eta, delta)


def delta_for_target(target, eta: float) -> float:
    """Zeeman splitting whose precession orbit from +z passes through ``target``.

    Decay is ignored. ``target`` must be a unit vector with non-zero x component,
    except the start point +z itself, which needs no splitting at all.
    """
    s = np.asarray(target, dtype=float)
    if s.shape != (3,) or abs(np.linalg.norm(s) - 1) > 1e-9:
        raise DomainError("target must be a unit 3-vector")
    if s[2] >= 1 - 1e-12:
        return 0.0
    if s[0] == 0:
        raise DomainError("targets with S_x = 0 need an infinite splitting")
    omega_F, omega_N = (float(v) for v in coherent_shifts(eta))
    return (1 - s[2]) / (2 * abs(s[0])) * abs(omega_F - omega_N) * np.sign(s[0])


def rf_qubit_hamiltonian(delta0: float, phi_rf: float, detuning_rf: float) -> QubitHamiltonian:
    """Rotating-wave qubit generator [[D/2, -d0 e^{i phi}], [-d0 e^{-i phi}, -D/2]].

    Its axis is (-2 d0 cos phi, 2 d0 sin phi, D) / Omega_rf with
    Omega_rf = sqrt(D^2 + 4 d0^2).
    """
    if delta0 <= 0:
        raise ValueError("delta0 must be positive")
    off = -delta0 * np.exp(1j * phi_rf)
    return QubitHamiltonian(np.array([[detuning_rf / 2, off],
                                      [np.conj(off), -detuning_rf / 2]]))


def rf_rabi_frequency(delta0: float, detuning_rf: float = 0.0) -> float:
    return float(np.hypot(detuning_rf, 2 * delta0))


def qubit_frequency(eta: float) -> float:
    omega_F, omega_N = (float(v) for v in coherent_shifts(eta))
    return omega_N - omega_F


# --- Bloch vectors from two-atom states -------------------------------------------

def qubit_basis(theta: float = np.pi / 2, phi: float = 0.0) -> np.ndarray:
    """16x2 matrix with columns psi_a^2, psi_a^3."""
    return np.column_stack([psi_a(2, theta, phi), psi_a(3, theta, phi)])


def qubit_block(rho: np.ndarray, basis: np.ndarray | None = None) -> np.ndarray:
    """2x2 block of rho on the qubit subspace, i.e. P rho P in the qubit basis."""
    b = qubit_basis() if basis is None else basis
    return b.conj().T @ rho @ b


def bloch_vector(rho: np.ndarray, frame_phase: float = 0.0) -> np.ndarray:
    """Generalized Bloch vector Tr[sigma P rho P].

    ``frame_phase`` multiplies the coherence rho_01 by exp(-i frame_phase), which
    moves a lab-frame state into a frame rotating at omega_rf when
    frame_phase = omega_rf t.
    """
    q = qubit_block(rho)
    q[0, 1] *= np.exp(-1j * frame_phase)
    q[1, 0] *= np.exp(1j * frame_phase)
    return qubit_bloch(q)


def bloch_series(traj: Trajectory, frame_omega: float = 0.0) -> np.ndarray:
    b = qubit_basis()
    blocks = np.einsum("ia,tij,jb->tab", b.conj(), traj.states, b)
    phase = np.exp(-1j * frame_omega * traj.times)
    blocks[:, 0, 1] *= phase
    blocks[:, 1, 0] *= phase.conj()
    return np.real(np.einsum("kij,tji->tk", PAULI, blocks))


def qubit_populations(traj: Trajectory) -> np.ndarray:
    b = qubit_basis()
    return np.real(np.einsum("ia,tij,ja->ta", b.conj(), traj.states, b))


# --- full-model simulations --------------------------------------------------------

@dataclass
class BlochRun:
    trajectory: Trajectory
    bloch: np.ndarray               # (n_t, 3)
    frame_omega: float = 0.0

    @property
    def times(self):
        return self.trajectory.times

    @property
    def norm(self):
        return np.linalg.norm(self.bloch, axis=1)


def simulate_static_field(eta: float, delta: float, t_end: float, dt_out: float = 0.005,
                          **kwargs) -> BlochRun:
    """Master-equation evolution from psi_a^2 with a static splitting delta."""
    geom = Geometry(eta)
    gen = static_liouvillian(closed_form_couplings(geom), zeeman=delta)
    traj = evolve(gen, density(psi_a(2)), t_end, dt_out, **kwargs)
    return BlochRun(traj, bloch_series(traj))


@dataclass(frozen=True)
class PulseSegment:
    """RF pulse delta0 cos(omega_rf t + phi_rf) lasting ``duration`` (t is absolute time)."""

    delta0: float
    omega_rf: float
    phi_rf: float
    duration: float

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("pulse duration must be positive")


def resonant_pulse(eta: float, delta0: float, phi_rf: float, duration: float,
                   detuning_rf: float = 0.0) -> PulseSegment:
    return PulseSegment(delta0, qubit_frequency(eta) + detuning_rf, phi_rf, duration)


def rf_generator(eta: float, segment: PulseSegment) -> ModulatedGenerator:
    """Liouvillian H_Omega + V_rf(t) plus decay; omega_0 removed, no rotating-wave step."""
    cs = closed_form_couplings(Geometry(eta))
    static = build_liouvillian(build_h_omega(cs), build_dissipator(cs))
    # build_h_rf is linear in delta(t); unit amplitude at t = 0 and phase 0 gives the pattern
    pattern = commutator_generator(build_h_rf(1.0, 0.0, 0.0, 0.0))
    d0, w, ph = segment.delta0, segment.omega_rf, segment.phi_rf
    return ModulatedGenerator(static, (pattern,), (lambda t: d0 * np.cos(w * t + ph),))


def simulate_rf_pulses(eta: float, segments, dt_out: float = 0.01,
                       frame_omega: float | None = None, rho0: np.ndarray | None = None,
                       **kwargs) -> BlochRun:
    """Run a sequence of RF segments from psi_a^2 and record B_N in the rotating frame.

    The field phase is continuous in absolute time across segments. The rotating
    frame turns at ``frame_omega`` (default: the first segment's omega_rf).
    """
    segments = list(segments)
    if not segments:
        raise ValueError("at least one pulse segment is required")
    if frame_omega is None:
        frame_omega = segments[0].omega_rf
    rho = density(psi_a(2)) if rho0 is None else rho0
    t0 = 0.0
    times, states = [], []
    for k, seg in enumerate(segments):
        n = max(1, int(np.ceil(seg.duration / dt_out - 1e-9)))
        grid = t0 + np.linspace(0.0, seg.duration, n + 1)
        traj = evolve(rf_generator(eta, seg), rho, grid[-1], dt_out, times=grid, **kwargs)
        skip = 0 if k == 0 else 1
        times.append(traj.times[skip:])
        states.append(traj.states[skip:])
        rho = traj.states[-1]
        t0 = grid[-1]
    traj = Trajectory(np.concatenate(times), np.concatenate(states))
    return BlochRun(traj, bloch_series(traj, frame_omega), frame_omega)


def simulate_rf_transfer(eta: float, delta0: float, phi_rf: float, detuning_rf: float,
                         t_end: float, dt_out: float = 0.01, **kwargs) -> BlochRun:
    """Single RF pulse at omega_rf = Omega_N - Omega_F + detuning_rf, starting at psi_a^2."""
    seg = resonant_pulse(eta, delta0, phi_rf, t_end, detuning_rf)
    return simulate_rf_pulses(eta, [seg], dt_out, **kwargs)


def pi_pulse_duration(delta0: float, detuning_rf: float = 0.0) -> float:
    return np.pi / rf_rabi_frequency(delta0, detuning_rf)


def composed_rwa_bloch(pulses, b0=(0.0, 0.0, 1.0)) -> np.ndarray:
    """Final Bloch vector after RWA rotations for (delta0, phi_rf, detuning_rf, duration) tuples."""
    u = np.eye(2, dtype=complex)
    for d0, ph, det, dur in pulses:
        u = rf_qubit_hamiltonian(d0, ph, det).propagator(dur) @ u
    rho0 = 0.5 * (np.eye(2) + np.einsum("k,kij->ij", np.asarray(b0, float), PAULI))
    return qubit_bloch(u @ rho0 @ u.conj().T)
