"""Decoherence-free subspace checks: dissipator kernel, invariance and leakage."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .couplings import CouplingSet
from .hamiltonians import (GROUND, antisymmetric, build_dissipator, ket, projector,
                           unvec, vec)
from .spectral import collective_states


class IllConditionedKernel(UserWarning):
    """The singular-value gap at the kernel cut-off is below 10x the tolerance."""


def dfs_basis() -> list[np.ndarray]:
    """Canonical basis {|4,4>, |a_1>, |a_2>, |a_3>} of the decoherence-free subspace."""
    return [ket(GROUND, GROUND)] + [antisymmetric(i) for i in (1, 2, 3)]


def operator_basis(states) -> np.ndarray:
    """Vectorized |v_i><v_j| for all pairs, as columns (orthonormal if the states are)."""
    return np.column_stack([vec(np.outer(u, v.conj())) for u in states for v in states])


@dataclass
class NullSpace:
    dimension: int
    basis: np.ndarray           # columns are vectorized operators
    singular_values: np.ndarray  # ascending
    tol: float
    gap: float                   # smallest kept / largest discarded singular value
    ill_conditioned: bool

    def operators(self):
        return [unvec(self.basis[:, k]) for k in range(self.basis.shape[1])]


def dissipator_null_space(diss: np.ndarray, tol: float | None = None) -> NullSpace:
    """Kernel of a superoperator from its singular-value decomposition.

    ``tol`` defaults to 1e-10 times the largest singular value. Singular values
    below ``tol`` are counted as zero. If the next singular value above the cut
    is within a factor 10 of ``tol`` an :class:`IllConditionedKernel` warning is
    issued and ``ill_conditioned`` is set.
    """
    _, s, vh = scipy.linalg.svd(diss)
    order = np.argsort(s)
    s = s[order]
    v = vh.conj().T[:, order]
    smax = s[-1] if s.size else 0.0
    if tol is None:
        tol = 1e-10 * smax
    if smax == 0:
        return NullSpace(diss.shape[1], v, s, tol, np.inf, False)
    dim = int(np.sum(s < tol))
    kept = s[dim] if dim < s.size else np.inf
    discarded = s[dim - 1] if dim > 0 else 0.0
    gap = kept / discarded if discarded > 0 else np.inf
    ill = kept < 10 * tol
    if ill:
        warnings.warn(f"kernel cut-off is ill-conditioned: next singular value {kept:.3e} "
                      f"vs tol {tol:.3e}", IllConditionedKernel)
    return NullSpace(dim, v[:, :dim], s, tol, gap, ill)


def subspace_projector(basis) -> np.ndarray:
    q, _ = np.linalg.qr(np.column_stack(basis))
    return q @ q.conj().T


def invariance_defect(h: np.ndarray, basis) -> float:
    """Spectral norm of (I - P) h P; zero when span(basis) is invariant under h."""
    p = subspace_projector(basis)
    return float(np.linalg.norm((np.eye(h.shape[0]) - p) @ h @ p, 2))


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles (radians, ascending) between the column spans of a and b."""
    return np.sort(scipy.linalg.subspace_angles(a, b))


def slow_subspace(diss: np.ndarray, dim: int) -> np.ndarray:
    """Right singular vectors belonging to the ``dim`` smallest singular values."""
    _, s, vh = scipy.linalg.svd(diss)
    order = np.argsort(s)[:dim]
    return vh.conj().T[:, order]


def projected_decay_rate(diss: np.ndarray, psi: np.ndarray) -> float:
    """-<psi| L(|psi><psi|) |psi>: initial population decay rate of |psi>."""
    p = projector(psi)
    return float(-np.real(vec(p).conj() @ diss @ vec(p)))


def dfs_leakage_rate(cs: CouplingSet, diss: np.ndarray | None = None) -> np.ndarray:
    """Decay rates 2 Gamma_a^i of the antisymmetric eigenstates psi_a^i, from the dissipator."""
    if diss is None:
        diss = build_dissipator(cs)
    g = cs.geometry
    return np.array([projected_decay_rate(diss, v)
                     for v in collective_states("a", g.theta, g.phi)])


def symmetric_decay_rate(cs: CouplingSet, diss: np.ndarray | None = None) -> np.ndarray:
    """Decay rates 2 Gamma_s^i of the symmetric eigenstates psi_s^i."""
    if diss is None:
        diss = build_dissipator(cs)
    g = cs.geometry
    return np.array([projected_decay_rate(diss, v)
                     for v in collective_states("s", g.theta, g.phi)])
