"""
Operators on the two-atom Hilbert space and the Liouville space built over it.

Product basis
-------------
``|i, j> = |i>_1 (x) |j>_2`` with i, j in 1..4, stored at index ``4 (i-1) + (j-1)``.
Level 4 is the ground state, so ``|4, 4>`` sits at index 15. Operators on atom 1
are ``kron(A, I4)``, on atom 2 ``kron(I4, A)``.

Vectorization
-------------
Density matrices are flattened row by row (``rho.reshape(-1)``), for which
``vec(A rho B) = kron(A, B.T) vec(rho)``. The commutator generator is then
``-i (H (x) I - I (x) H^T)``.

All frequencies are in units of gamma with hbar = 1; the mean transition
frequency omega_0 is removed from every Hamiltonian.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .couplings import CouplingSet, Geometry

DIM = 16
LEVELS = (1, 2, 3)
GROUND = 4
I4 = np.eye(4)
I16 = np.eye(DIM)


def index(i: int, j: int) -> int:
    """Position of |i, j> in the product basis (levels counted from 1)."""
    if not (1 <= i <= 4 and 1 <= j <= 4):
        raise ValueError(f"levels must be in 1..4, got ({i}, {j})")
    return 4 * (i - 1) + (j - 1)


def label(k: int) -> tuple[int, int]:
    return k // 4 + 1, k % 4 + 1


def ket(i: int, j: int) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[index(i, j)] = 1.0
    return v


def antisymmetric(i: int) -> np.ndarray:
    """|a_i> = (|i,4> - |4,i>) / sqrt 2."""
    return (ket(i, GROUND) - ket(GROUND, i)) / np.sqrt(2)


def symmetric(i: int) -> np.ndarray:
    """|s_i> = (|i,4> + |4,i>) / sqrt 2."""
    return (ket(i, GROUND) + ket(GROUND, i)) / np.sqrt(2)


def projector(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def _single_raise(i: int) -> np.ndarray:
    m = np.zeros((4, 4))
    m[i - 1, GROUND - 1] = 1.0
    return m


def raising(i: int, atom: int) -> np.ndarray:
    """S_i^+(atom) = |i><4| on the given atom (1 or 2)."""
    if atom == 1:
        return np.kron(_single_raise(i), I4)
    if atom == 2:
        return np.kron(I4, _single_raise(i))
    raise ValueError(f"atom must be 1 or 2, got {atom}")


def lowering(i: int, atom: int) -> np.ndarray:
    return raising(i, atom).T


def excitation_number() -> np.ndarray:
    """Number of excited atoms, as a diagonal operator."""
    return sum(raising(i, mu) @ lowering(i, mu) for i in LEVELS for mu in (1, 2))


# --- Hamiltonians -----------------------------------------------------------------

def build_h_a(zeeman: float) -> np.ndarray:
    """Free Hamiltonian with omega_0 removed: level 1 at -delta, 2 at 0, 3 at +delta."""
    energies = {1: -zeeman, 2: 0.0, 3: zeeman}
    h = np.zeros((DIM, DIM), dtype=complex)
    for i, w in energies.items():
        for mu in (1, 2):
            h += w * raising(i, mu) @ lowering(i, mu)
    return h


def build_h_omega(cs: CouplingSet) -> np.ndarray:
    """Dipole-dipole Hamiltonian -sum_{mu != nu} sum_ij Omega_ij S_i^+(mu) S_j^-(nu)."""
    h = np.zeros((DIM, DIM), dtype=complex)
    for mu, nu in ((1, 2), (2, 1)):
        for i in LEVELS:
            for j in LEVELS:
                h -= cs.omega[i - 1, j - 1] * raising(i, mu) @ lowering(j, nu)
    return h


@dataclass(frozen=True)
class DriveConfig:
    """CW laser drive in the frame rotating at the laser frequency.

    ``omega_x`` and ``omega_y`` are the Rabi frequencies at atom 1 and atom 2
    (a scalar applies to both atoms with equal phase). ``delta2`` is the detuning
    from the m_j = 0 level; the detunings of levels 1 and 3 follow from the
    Zeeman splitting ``zeeman``.
    """

    omega_x: complex | tuple = 0.0
    omega_y: complex | tuple = 0.0
    delta2: float = 0.0
    zeeman: float = 0.0

    def rabi(self, which: str) -> np.ndarray:
        v = np.broadcast_to(np.asarray(getattr(self, f"omega_{which}"), dtype=complex), (2,))
        return v.copy()

    @property
    def detunings(self) -> tuple[float, float, float]:
        return self.delta2 + self.zeeman, self.delta2, self.delta2 - self.zeeman


def build_h_laser(drive: DriveConfig, geom: Geometry | None = None) -> np.ndarray:
    """Rotating-frame free part plus laser coupling, -sum Delta_i S_i^+S_i^- + H_L.

    The laser travels along +z. Any propagation phase difference between the
    atoms goes into the per-atom Rabi frequencies of ``drive``; ``geom`` is
    accepted for symmetry with the other builders and is not used otherwise.
    """
    h = np.zeros((DIM, DIM), dtype=complex)
    for i, det in zip(LEVELS, drive.detunings):
        for mu in (1, 2):
            h -= det * raising(i, mu) @ lowering(i, mu)
    ox, oy = drive.rabi("x"), drive.rabi("y")
    for mu in (1, 2):
        k = mu - 1
        coupling = ((ox[k] + 1j * oy[k]) * raising(1, mu)
                    + (-ox[k] + 1j * oy[k]) * raising(3, mu))
        h -= coupling + coupling.conj().T
    return h


def rf_detuning(t, delta0: float, omega_rf: float, phi_rf: float):
    """delta(t) = delta0 cos(omega_rf t + phi_rf)."""
    return delta0 * np.cos(omega_rf * t + phi_rf)


_RF_PATTERN = (build_h_a(1.0)).real.diagonal()


def build_h_rf(delta0: float, omega_rf: float, phi_rf: float, t: float) -> np.ndarray:
    """RF coupling 2 delta(t) sum_mu (S_3^+S_3^- - S_1^+S_1^-); the static H_A is zero here."""
    return np.diag(2 * rf_detuning(t, delta0, omega_rf, phi_rf) * _RF_PATTERN).astype(complex)


# --- superoperators ----------------------------------------------------------------

def left(a: np.ndarray) -> np.ndarray:
    """Superoperator rho -> a rho."""
    return np.kron(a, np.eye(a.shape[0]))


def right(b: np.ndarray) -> np.ndarray:
    """Superoperator rho -> rho b."""
    return np.kron(np.eye(b.shape[0]), b.T)


def sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator rho -> a rho b."""
    return np.kron(a, b.T)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1)


def unvec(v: np.ndarray) -> np.ndarray:
    n = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape(n, n)


def lindblad_from_rates(jumps, rates: np.ndarray) -> np.ndarray:
    """sum_ab G_ab (2 A_b rho A_a^+ - A_a^+ A_b rho - rho A_a^+ A_b) as a matrix."""
    n = jumps[0].shape[0]
    out = np.zeros((n * n, n * n), dtype=complex)
    for a, ja in enumerate(jumps):
        for b, jb in enumerate(jumps):
            g = rates[a, b]
            if g == 0:
                continue
            prod = ja.conj().T @ jb
            out += g * (2 * sandwich(jb, ja.conj().T) - left(prod) - right(prod))
    return out


def jump_operators() -> list[np.ndarray]:
    """S_i^-(mu) ordered (atom 1: levels 1..3, atom 2: levels 1..3)."""
    return [lowering(i, mu) for mu in (1, 2) for i in LEVELS]


def build_dissipator(cs: CouplingSet) -> np.ndarray:
    """Spontaneous-emission superoperator including collective and cross decay.

    Single-atom terms carry gamma (= 1) for every transition; the pair terms use
    Gamma_ij between S_i^+ of one atom and S_j^- of the other.
    """
    g = np.eye(3, dtype=complex)
    rates = np.block([[g, cs.gamma_cross], [cs.gamma_cross, g]])
    return lindblad_from_rates(jump_operators(), rates)


def commutator_generator(h: np.ndarray) -> np.ndarray:
    """-i [h, .] as a matrix."""
    return -1j * (left(h) - right(h))


def build_liouvillian(h: np.ndarray, diss: np.ndarray) -> np.ndarray:
    return commutator_generator(h) + diss


def trace_functional(dim: int = DIM) -> np.ndarray:
    """Row vector t with t @ vec(rho) = Tr(rho)."""
    return vec(np.eye(dim)).astype(complex)
