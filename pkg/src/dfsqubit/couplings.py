"""
Vacuum-induced couplings between two identical S0 <-> P1 atoms.

Everything is expressed in units of the single-atom rate ``gamma`` (so
``gamma = 1``) and the separation is carried as ``eta = k0 R = 2 pi R / lambda0``.
Two independent routes are provided:

- :func:`couplings_from_tensor` contracts the free-space interaction tensor
  with the dipole moments of the three transitions;
- :func:`closed_form_couplings` evaluates the explicit trigonometric
  expressions for the same quantities.

The two agree to rounding and are used to check each other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

SQRT2 = np.sqrt(2.0)

# below this separation the sin/cos brackets of the decay rates are summed as
# power series; the direct forms lose ~eps/eta**4 relative accuracy
SERIES_ETA = 0.5
_SERIES_TERMS = 14


class DomainError(ValueError):
    """Raised when a quantity is requested outside its domain (e.g. eta <= 0)."""


@dataclass(frozen=True)
class Geometry:
    """Relative position of atom 2 with respect to atom 1.

    ``eta`` is the dimensionless separation k0 R, ``theta`` the polar and
    ``phi`` the azimuthal angle of the separation vector.
    """

    eta: float
    theta: float = np.pi / 2
    phi: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.eta) or self.eta < 0:
            raise DomainError(f"eta must be finite and >= 0, got {self.eta}")
        if not 0.0 <= self.theta <= np.pi:
            raise DomainError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise DomainError(f"phi must lie in [0, 2 pi), got {self.phi}")

    @classmethod
    def from_r_over_lambda(cls, r_over_lambda: float, theta=np.pi / 2, phi=0.0):
        return cls(2 * np.pi * r_over_lambda, theta, phi)

    @property
    def r_over_lambda(self) -> float:
        return self.eta / (2 * np.pi)

    @property
    def unit_vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


@dataclass(frozen=True)
class DipoleSet:
    """Dipole moments <i|d|4> of the three transitions, in units of the reduced element."""

    d1: np.ndarray = field(default_factory=lambda: np.array([1.0, 1.0j, 0.0]) / SQRT2)
    d2: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0], dtype=complex))
    d3: np.ndarray = field(default_factory=lambda: -np.array([1.0, -1.0j, 0.0]) / SQRT2)

    def as_rows(self) -> np.ndarray:
        return np.vstack([self.d1, self.d2, self.d3])


DIPOLES = DipoleSet()


@dataclass(frozen=True)
class CouplingSet:
    """Coherent couplings and collective decay rates for one geometry (units of gamma).

    ``omega[i, j]`` and ``gamma_cross[i, j]`` hold Omega_{i+1, j+1} and
    Gamma_{i+1, j+1}; both matrices are Hermitian. ``omega_F``/``omega_N``
    are the orientation-independent eigenvalues of the antisymmetric block.
    """

    geometry: Geometry
    omega: np.ndarray
    gamma_cross: np.ndarray
    omega_F: float
    omega_N: float


def _check_eta(eta):
    eta = np.asarray(eta, dtype=float)
    if np.any(~np.isfinite(eta)) or np.any(eta <= 0):
        raise DomainError("eta must be > 0 (eta = 0 is a pole of the interaction tensor)")
    return eta


# --- spherical-Bessel combinations --------------------------------------------
#
# j0 = sin(x)/x, j1(x)/x = (sin x - x cos x)/x**3, j2 = (3/x**2 - 1) sin(x)/x - 3 cos(x)/x**2
# and the matching y-functions. The j's are regular at 0 but their direct forms
# cancel catastrophically; use the series j_n(x)/x**n = sum (-x^2/2)^k / (k! (2n+2k+1)!!).

def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


_J_COEFFS = {
    n: np.array([(-0.5) ** k / (factorial(k) * _double_factorial(2 * n + 2 * k + 1))
                 for k in range(_SERIES_TERMS)])
    for n in (0, 1, 2)
}


def _j_over_xn(n: int, x: np.ndarray) -> np.ndarray:
    """j_n(x) / x**n, accurate at small x."""
    x = np.asarray(x, dtype=float)
    small = x < SERIES_ETA
    out = np.empty_like(x)
    xs = x[small]
    if xs.size:
        out[small] = np.polynomial.polynomial.polyval(xs**2, _J_COEFFS[n])
    xl = x[~small]
    if xl.size:
        s, c = np.sin(xl), np.cos(xl)
        if n == 0:
            out[~small] = s / xl
        elif n == 1:
            out[~small] = (s - xl * c) / xl**3
        else:
            out[~small] = ((3 / xl**2 - 1) * s / xl - 3 * c / xl**2) / xl**2
    return out


def _bessel_j(eta):
    """(j0, j1/eta, j2) at eta."""
    j0 = _j_over_xn(0, eta)
    j1x = _j_over_xn(1, eta)
    j2 = _j_over_xn(2, eta) * np.asarray(eta, dtype=float) ** 2
    return j0, j1x, j2


# --- tensor route ---------------------------------------------------------------

def chi_tensor(geom: Geometry) -> np.ndarray:
    """Free-space interaction tensor chi_kl(R), normalized so that (3/2) chi is in units of gamma.

    The common prefactor k0^3 / (4 pi eps0) is dropped; with the reduced dipole
    element set to one, ``Omega_ij = (3/2) d_i^T Re(chi) d_j^*`` in units of gamma.
    """
    eta = float(_check_eta(geom.eta))
    n = geom.unit_vector
    iso = 1 / eta + 1j / eta**2 - 1 / eta**3
    aniso = 1 / eta + 3j / eta**2 - 3 / eta**3
    return (np.eye(3) * iso - np.outer(n, n) * aniso) * np.exp(1j * eta)


def couplings_from_tensor(geom: Geometry, dipoles: DipoleSet = DIPOLES) -> CouplingSet:
    chi = chi_tensor(geom)
    d = dipoles.as_rows()
    # entry (i, j) = d_i^T M d_j^*
    omega = 1.5 * d @ chi.real @ d.conj().T
    gamma_cross = 1.5 * d @ chi.imag @ d.conj().T
    omega_F, omega_N = coherent_shifts(geom.eta)
    return CouplingSet(geom, omega, gamma_cross, float(omega_F), float(omega_N))


# --- closed forms ---------------------------------------------------------------

def coherent_shifts(eta):
    """Return (Omega_F, Omega_N), the eigenvalues of the antisymmetric coupling block."""
    eta = _check_eta(eta)
    c, s = np.cos(eta), np.sin(eta)
    omega_F = -1.5 / eta**3 * ((1 - eta**2) * c + eta * s)
    omega_N = 3 / eta**3 * (c + eta * s)
    return omega_F, omega_N


def collective_decay_rates(eta):
    """Gamma_a^i and Gamma_s^i (i = 1, 2, 3), in units of gamma.

    Returns two arrays of shape ``(3,) + eta.shape``: the antisymmetric and the
    symmetric coefficients. The decay rate of the corresponding state is twice
    the coefficient.
    """
    eta = _check_eta(eta)
    j0, j1x, _ = _bessel_j(eta)
    # 1 - (3/2)(j0 - j1/eta) == [2 eta^3 - 3 eta cos + 3 (1 - eta^2) sin] / (2 eta^3)
    far = 1.5 * (j0 - j1x)
    near = 3.0 * j1x
    gamma_a = np.stack([1 - far, 1 - far, 1 - near])
    gamma_s = np.stack([1 + far, 1 + far, 1 + near])
    return gamma_a, gamma_s


def closed_form_couplings(geom: Geometry) -> CouplingSet:
    """Explicit trigonometric couplings.

    The cross terms carry a ``cot(theta)`` in their usual form; here they are
    written with ``sin(theta) cos(theta)`` so that theta = 0 and pi are regular.
    """
    eta = float(_check_eta(geom.eta))
    theta, phi = geom.theta, geom.phi
    c, s = np.cos(eta), np.sin(eta)
    cos2t = np.cos(2 * theta)
    st, ct = np.sin(theta), np.cos(theta)

    o31_radial = 0.75 / eta**3 * ((eta**2 - 3) * c - 3 * eta * s)
    o11 = 0.375 / eta**3 * ((3 * eta**2 - 1 + (eta**2 - 3) * cos2t) * c
                            - eta * (1 + 3 * cos2t) * s)

    j0, j1x, j2 = (float(v) for v in _bessel_j(eta))
    # (eta^2 - 3) sin + 3 eta cos == -eta^3 j2 ; (3 eta^2 - 1) sin + eta cos == eta^3 (3 j0 - j1/eta)
    g31_radial = -0.75 * j2
    g11 = 0.375 * ((3 * j0 - j1x) - cos2t * j2)

    def assemble(diag, radial):
        m = np.zeros((3, 3), dtype=complex)
        x31 = radial * st**2 * np.exp(-2j * phi)
        x21 = -SQRT2 * radial * st * ct * np.exp(-1j * phi)
        x22 = diag - radial * (2 * ct**2 - st**2)
        m[0, 0] = m[2, 2] = diag
        m[1, 1] = x22
        m[2, 0] = x31
        m[1, 0] = x21
        m[2, 1] = -x21
        m[0, 2] = np.conj(x31)
        m[0, 1] = np.conj(x21)
        m[1, 2] = -np.conj(x21)
        return m

    omega_F, omega_N = coherent_shifts(eta)
    return CouplingSet(geom, assemble(o11, o31_radial), assemble(g11, g31_radial),
                       float(omega_F), float(omega_N))


def limit_couplings(geom: Geometry | None = None) -> CouplingSet:
    """Decay rates in the R -> 0 limit: Gamma_ij = gamma delta_ij.

    The coherent couplings diverge in this limit and play no role in the
    dissipator, so they are set to zero here. Only use the result where the
    coherent part is irrelevant.
    """
    if geom is None:
        geom = Geometry(0.0)
    return CouplingSet(geom, np.zeros((3, 3), dtype=complex), np.eye(3, dtype=complex),
                       np.nan, np.nan)


def kossakowski_matrix(cs: CouplingSet) -> np.ndarray:
    """6x6 rate matrix over the jump operators S_i^-(mu), ordered (atom, level)."""
    g = np.eye(3)
    return np.block([[g, cs.gamma_cross], [cs.gamma_cross, g]])
