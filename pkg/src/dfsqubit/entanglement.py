"""Partial trace and pure-state concurrence for two four-level atoms."""
from __future__ import annotations

import numpy as np

from .hamiltonians import DIM, projector

C_MAX = np.sqrt(1.5)


def partial_trace(rho: np.ndarray, keep: int = 1) -> np.ndarray:
    """Reduced 4x4 state of atom ``keep`` (1 or 2)."""
    r = np.asarray(rho).reshape(4, 4, 4, 4)
    if keep == 1:
        return np.einsum("ijkj->ik", r)
    if keep == 2:
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 1 or 2, got {keep}")


def concurrence(psi: np.ndarray, atom: int = 1, tol: float = 1e-10) -> float:
    """sqrt(2 (1 - Tr rho_1^2)) for a normalized pure state psi.

    Ranges from 0 (product states) to sqrt(3/2).
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (DIM,):
        raise ValueError(f"state must have {DIM} components")
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > tol:
        raise ValueError(f"state is not normalized (norm {norm:.12g})")
    r1 = partial_trace(projector(psi), atom)
    purity = np.real(np.trace(r1 @ r1))
    return float(np.sqrt(max(0.0, 2 * (1 - purity))))


def maximally_entangled() -> np.ndarray:
    """sum_i |i, i> / 2, with Tr rho_1^2 = 1/4."""
    return np.eye(4).reshape(-1).astype(complex) / 2
