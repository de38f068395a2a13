"""
Eigenstructure of H_A + H_Omega in the single-excitation manifold.

The antisymmetric block (states |a_i>) and the symmetric block (|s_i>) never
mix, and the Hamiltonian restricted to either is a 3x3 matrix. For zero Zeeman
splitting the eigenvalues are (Omega_F, Omega_F, Omega_N) and their negatives,
independent of the orientation of the atoms; the eigenvectors depend on the
orientation only. For theta = pi/2 the non-degenerate problem is solved in
closed form as well.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .couplings import (CouplingSet, DomainError, Geometry, closed_form_couplings,
                        coherent_shifts, collective_decay_rates)
from .hamiltonians import (GROUND, antisymmetric, build_h_a, build_h_omega, ket,
                           symmetric)


@dataclass(frozen=True)
class CollectiveState:
    label: str
    vector: np.ndarray

    def __post_init__(self):
        norm = np.linalg.norm(self.vector)
        if abs(norm - 1) > 1e-10:
            raise ValueError(f"state {self.label} is not normalized (norm {norm})")


@dataclass
class Spectrum:
    """Energy shifts (units of gamma) and decay rates of a set of collective states.

    ``decay_rates`` holds the population decay rate 2 Gamma of each state, or
    NaN where no closed form is available.
    """

    states: list[CollectiveState]
    shifts: np.ndarray
    decay_rates: np.ndarray = field(default=None)

    def __post_init__(self):
        self.shifts = np.asarray(self.shifts, dtype=float)
        if self.decay_rates is None:
            self.decay_rates = np.full(self.shifts.shape, np.nan)

    def __getitem__(self, lbl: str) -> CollectiveState:
        for s in self.states:
            if s.label == lbl:
                return s
        raise KeyError(lbl)

    def labels(self):
        return [s.label for s in self.states]


def _block_basis(kind: str):
    make = antisymmetric if kind == "a" else symmetric
    return [make(i) for i in (1, 2, 3)]


def psi_pm(kind: str, sign: int, phi: float) -> np.ndarray:
    """|psi^(+-)> = (e^{i phi} |x_1> +- e^{-i phi} |x_3>) / sqrt 2 for x = a or s."""
    b = _block_basis(kind)
    return (np.exp(1j * phi) * b[0] + sign * np.exp(-1j * phi) * b[2]) / np.sqrt(2)


def collective_states(kind: str, theta: float, phi: float) -> list[np.ndarray]:
    """Eigenstates psi^1, psi^2, psi^3 of H_Omega in the antisymmetric ('a') or symmetric ('s') block."""
    if kind not in ("a", "s"):
        raise ValueError("kind must be 'a' or 's'")
    x2 = _block_basis(kind)[1]
    plus, minus = psi_pm(kind, +1, phi), psi_pm(kind, -1, phi)
    st, ct = np.sin(theta), np.cos(theta)
    return [st * x2 - ct * minus, plus, ct * x2 + st * minus]


def psi_a(i: int, theta: float = np.pi / 2, phi: float = 0.0) -> np.ndarray:
    return collective_states("a", theta, phi)[i - 1]


def psi_s(i: int, theta: float = np.pi / 2, phi: float = 0.0) -> np.ndarray:
    return collective_states("s", theta, phi)[i - 1]


def named_state(name: str, geom: Geometry | None = None) -> np.ndarray:
    """Look up a state by label: 'ground', 'a2', 's1', 'psi_a2', 'psi_s3', 'ket13' ..."""
    theta = geom.theta if geom else np.pi / 2
    phi = geom.phi if geom else 0.0
    name = name.strip().lower()
    if name in ("ground", "gg", "44"):
        return ket(GROUND, GROUND)
    if name.startswith("psi_a") or name.startswith("psi_s"):
        return collective_states(name[4], theta, phi)[int(name[5:]) - 1]
    if name.startswith("ket") and len(name) == 5:
        return ket(int(name[3]), int(name[4]))
    if len(name) == 2 and name[0] in "as" and name[1] in "123":
        return (antisymmetric if name[0] == "a" else symmetric)(int(name[1]))
    raise KeyError(f"unknown state label {name!r}")


def block_matrix(h: np.ndarray, basis) -> np.ndarray:
    """<b_i| h |b_j> for a list of basis vectors."""
    b = np.column_stack(basis)
    return b.conj().T @ h @ b


def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component real and positive."""
    k = np.argmax(np.abs(v))
    return v * np.exp(-1j * np.angle(v[k]))


def degenerate_eigensystem(geom: Geometry) -> Spectrum:
    """Closed-form eigenstates of H_Omega (zero Zeeman splitting).

    Returns six states psi_a^1..3, psi_s^1..3 with shifts (F, F, N, -F, -F, -N)
    and population decay rates 2 Gamma_a^i, 2 Gamma_s^i.
    """
    omega_F, omega_N = (float(v) for v in coherent_shifts(geom.eta))
    ga, gs = collective_decay_rates(geom.eta)
    states = []
    for kind in ("a", "s"):
        for i, v in enumerate(collective_states(kind, geom.theta, geom.phi), start=1):
            states.append(CollectiveState(f"psi_{kind}{i}", v))
    shifts = [omega_F, omega_F, omega_N, -omega_F, -omega_F, -omega_N]
    rates = 2 * np.concatenate([ga, gs])
    return Spectrum(states, shifts, rates)


def numerical_block_eigensystem(cs: CouplingSet, delta: float, kind: str):
    """Diagonalize [H_A + H_Omega] restricted to the 'a' or 's' block.

    Eigenvalues ascend; eigenvectors are 16-component and phase-fixed. At
    delta = 0 the degenerate pair is rotated onto the closed-form
    representatives psi^1, psi^2.
    """
    basis = _block_basis(kind)
    h = build_h_a(delta) + build_h_omega(cs)
    m = block_matrix(h, basis)
    w, u = np.linalg.eigh(m)
    vecs = np.column_stack(basis) @ u
    vecs = np.column_stack([_phase_fix(vecs[:, c]) for c in range(3)])
    if delta == 0:
        ref = np.column_stack(collective_states(kind, cs.geometry.theta, cs.geometry.phi)[:2])
        # find the two nearly equal eigenvalues and replace their eigenvectors
        gaps = np.abs(np.diff(w))
        k = int(np.argmin(gaps))
        pair = vecs[:, k:k + 2]
        # projection of the reference pair onto the numerical eigenspace
        overlap = pair.conj().T @ ref
        q, _ = np.linalg.qr(pair @ overlap)
        # QR may flip signs; align with the references
        for c in range(2):
            q[:, c] *= np.exp(-1j * np.angle(ref[:, c].conj() @ q[:, c]))
        vecs[:, k:k + 2] = q
    return w, vecs


def bohr_frequency(eta, delta) -> float:
    """omega_B = sqrt(4 delta^2 + (Omega_F - Omega_N)^2)."""
    omega_F, omega_N = coherent_shifts(eta)
    return np.sqrt(4 * np.asarray(delta) ** 2 + (omega_F - omega_N) ** 2)


def mixing_angles(eta, delta):
    """(vartheta_a, vartheta_s) in (0, pi/2) for the theta = pi/2 eigenstates.

    tan 2 vartheta_a = 2|delta| / (Omega_F - Omega_N) and
    tan 2 vartheta_s = 2|delta| / (Omega_N - Omega_F).
    """
    omega_F, omega_N = coherent_shifts(eta)
    d = 2 * np.abs(delta)
    return 0.5 * np.arctan2(d, omega_F - omega_N), 0.5 * np.arctan2(d, omega_N - omega_F)


def planar_shifts(eta, delta):
    """Closed-form Lambda_a^1..3 and Lambda_s^1..3 for theta = pi/2.

    Level 1 is the uncoupled a_2 / s_2 state; levels 2 and 3 are the mixed pair,
    matched index by index to :func:`planar_states`.
    """
    omega_F, omega_N = coherent_shifts(eta)
    wb = bohr_frequency(eta, delta)
    mean = (omega_F + omega_N) / 2
    lam_a = np.stack([omega_F + 0 * wb, mean - wb / 2, mean + wb / 2])
    lam_s = np.stack([-omega_F + 0 * wb, -mean + wb / 2, -mean - wb / 2])
    return lam_a, lam_s


def planar_states(phi: float, eta: float, delta: float):
    """Closed-form eigenstates phi_a^1..3 and phi_s^1..3 for theta = pi/2."""
    th_a, th_s = mixing_angles(eta, delta)
    sign = -1.0 if delta < 0 else 1.0  # e^{i xi}, xi in {0, pi}
    pa, ma = psi_pm("a", +1, phi), psi_pm("a", -1, phi)
    ps, ms = psi_pm("s", +1, phi), psi_pm("s", -1, phi)
    states_a = [antisymmetric(2),
                sign * np.sin(th_a) * pa + np.cos(th_a) * ma,
                -sign * np.cos(th_a) * pa + np.sin(th_a) * ma]
    states_s = [symmetric(2),
                -sign * np.cos(th_s) * ps + np.sin(th_s) * ms,
                sign * np.sin(th_s) * ps + np.cos(th_s) * ms]
    return states_a, states_s


def nondegenerate_eigensystem(geom: Geometry, delta: float,
                              cs: CouplingSet | None = None) -> Spectrum:
    """Numerical eigenstates of H_A + H_Omega in both blocks, sorted by energy within each.

    Labels are ``phi_a1..3`` / ``phi_s1..3`` in ascending order of the shift.
    Decay rates are attached only where the state coincides with a closed-form
    one (delta = 0); otherwise they are NaN. For labels that follow the
    states continuously in delta at theta = pi/2 use :func:`planar_shifts` and
    :func:`planar_states`.
    """
    if cs is None:
        cs = closed_form_couplings(geom)
    states, shifts = [], []
    for kind in ("a", "s"):
        w, v = numerical_block_eigensystem(cs, delta, kind)
        shifts.extend(w)
        states.extend(CollectiveState(f"phi_{kind}{i + 1}", v[:, i]) for i in range(3))
    return Spectrum(states, shifts)


def energy_surface(l, z, delta: float, phi: float = 0.0) -> np.ndarray:
    """Lambda_a shifts (sorted) on a grid of in-plane positions.

    ``l`` and ``z`` are components of R in units of lambda_0 along e_phi and e_z.
    Returns an array of shape ``broadcast(l, z).shape + (3,)``.
    """
    l, z = np.broadcast_arrays(np.asarray(l, dtype=float), np.asarray(z, dtype=float))
    if np.any((l == 0) & (z == 0)):
        raise DomainError("the origin (l, z) = (0, 0) is excluded")
    out = np.empty(l.shape + (3,))
    for idx in np.ndindex(l.shape):
        r = np.hypot(l[idx], z[idx])
        theta = float(np.arctan2(abs(l[idx]), z[idx]))
        # negative l is the same plane rotated by pi about z
        ph = (phi + (np.pi if l[idx] < 0 else 0.0)) % (2 * np.pi)
        cs = closed_form_couplings(Geometry(2 * np.pi * r, theta, ph))
        out[idx] = numerical_block_eigensystem(cs, delta, "a")[0]
    return out


def full_spectrum(cs: CouplingSet, delta: float):
    """Eigenvalues and eigenvectors of the full 16x16 H_A + H_Omega."""
    return np.linalg.eigh(build_h_a(delta) + build_h_omega(cs))
