"""
Master-equation integration, steady states and laser population of the DFS.

Generators act on row-major vectorized density matrices (see
:mod:`dfsqubit.hamiltonians`). Time-independent problems can be propagated
either with an adaptive Runge-Kutta 5(4) integrator or with the matrix
exponential at the output times; time-dependent ones (RF drive) use the
integrator on a generator split into a static part and scalar-modulated
parts. Integration runs in real coordinates over a Hermitian operator basis,
which keeps every state exactly Hermitian.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .couplings import CouplingSet, Geometry, closed_form_couplings, collective_decay_rates
from .hamiltonians import (DIM, DriveConfig, GROUND, build_dissipator, build_h_a,
                           build_h_laser, build_h_omega, build_liouvillian,
                           excitation_number, ket, projector, unvec, vec)
from .spectral import collective_states

RTOL = 1e-9
ATOL = 1e-12


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} (at t = {t_fail:.6g})")
        self.t_fail = t_fail


class DegenerateKernelError(RuntimeError):
    """The generator has more than one stationary state."""

    def __init__(self, dimension: int, basis: list[np.ndarray]):
        super().__init__(f"stationary space has dimension {dimension}")
        self.dimension = dimension
        self.basis = basis


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray                       # shape (n_t, 16, 16)
    observables: dict[str, np.ndarray] = field(default_factory=dict)

    def population(self, psi: np.ndarray) -> np.ndarray:
        return np.real(np.einsum("i,tij,j->t", psi.conj(), self.states, psi))

    def add_populations(self, named: dict[str, np.ndarray]) -> "Trajectory":
        for name, psi in named.items():
            self.observables[name] = self.population(psi)
        return self


def density(psi: np.ndarray) -> np.ndarray:
    return projector(psi / np.linalg.norm(psi))


def ground_state() -> np.ndarray:
    return density(ket(GROUND, GROUND))


def validate_density(rho: np.ndarray, herm_tol=1e-10, trace_tol=1e-9, pos_tol=1e-8):
    """Raise ValueError if rho is not a density matrix within the given tolerances."""
    if rho.shape != (DIM, DIM):
        raise ValueError(f"density matrix must be {DIM}x{DIM}, got {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > herm_tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > trace_tol:
        raise ValueError(f"density matrix has trace {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -pos_tol:
        raise ValueError("density matrix is not positive semidefinite")


def output_grid(t_end: float, dt_out: float) -> np.ndarray:
    n = int(np.floor(t_end / dt_out + 1e-9))
    t = dt_out * np.arange(n + 1)
    if t_end - t[-1] > 1e-12 * max(1.0, t_end):
        t = np.append(t, t_end)
    return t


@dataclass(frozen=True)
class ModulatedGenerator:
    """Time-dependent generator ``static + sum_k f_k(t) parts[k]``."""

    static: np.ndarray
    parts: tuple = ()
    modulations: tuple = ()

    def __call__(self, t: float) -> np.ndarray:
        out = self.static.copy()
        for f, m in zip(self.modulations, self.parts):
            out = out + f(t) * m
        return out


def hermitian_frame(dim: int = DIM) -> np.ndarray:
    """Unitary T whose columns are vectorized Hermitian matrices.

    In the coordinates x = T^+ vec(rho) every Hermiticity-preserving generator
    is a real matrix and Hermitian rho are real vectors.
    """
    cols = []
    for k in range(dim):
        for l in range(dim):
            m = np.zeros((dim, dim), dtype=complex)
            if k == l:
                m[k, k] = 1.0
            elif k < l:
                m[k, l] = m[l, k] = 1 / np.sqrt(2)
            else:
                m[l, k] = 1j / np.sqrt(2)
                m[k, l] = -1j / np.sqrt(2)
            cols.append(m.reshape(-1))
    return np.column_stack(cols)


_FRAME = hermitian_frame()


def to_real(generator: np.ndarray) -> np.ndarray:
    g = _FRAME.conj().T @ generator @ _FRAME
    return np.ascontiguousarray(g.real)


def evolve(generator, rho0: np.ndarray, t_end: float, dt_out: float, *,
           method: str = "RK45", rtol: float = RTOL, atol: float = ATOL,
           times: np.ndarray | None = None) -> Trajectory:
    """Propagate rho0 under a Liouvillian.

    ``generator`` is a fixed 256x256 matrix or a :class:`ModulatedGenerator`.
    ``method`` is a :func:`scipy.integrate.solve_ivp` method name, or ``"expm"``
    for exact propagation of a fixed generator. Integration runs in real
    Hermitian coordinates, so snapshots are Hermitian by construction. The
    integrator is restarted at every output time, so snapshots are integrated
    to exactly rather than interpolated.
    """
    validate_density(rho0)
    t = output_grid(t_end, dt_out) if times is None else np.asarray(times, dtype=float)
    if np.any(np.diff(t) <= 0):
        raise ValueError("output times must increase strictly")
    x0 = (_FRAME.conj().T @ vec(rho0)).real

    if method == "expm":
        if isinstance(generator, ModulatedGenerator):
            raise ValueError("expm propagation needs a time-independent generator")
        g = to_real(generator)
        out = np.empty((t.size, x0.size))
        out[0] = x0
        cache = {}
        for k, dt in enumerate(np.diff(t)):
            key = round(dt, 14)
            if key not in cache:
                cache[key] = scipy.linalg.expm(g * dt)
            out[k + 1] = cache[key] @ out[k]
        return Trajectory(t, _from_real(out))

    if isinstance(generator, ModulatedGenerator):
        g0 = to_real(generator.static)
        gk = [to_real(m) for m in generator.parts]
        fs = generator.modulations

        def rhs(tt, x):
            out = g0 @ x
            for f, m in zip(fs, gk):
                out += f(tt) * (m @ x)
            return out
    else:
        g0 = to_real(np.asarray(generator))

        def rhs(tt, x):
            return g0 @ x

    out = np.empty((t.size, x0.size))
    out[0] = x0
    first_step = None
    for k in range(t.size - 1):
        sol = solve_ivp(rhs, (t[k], t[k + 1]), out[k], method=method, rtol=rtol, atol=atol,
                        first_step=first_step)
        if sol.status != 0:
            raise IntegrationError(sol.message, float(sol.t[-1]))
        out[k + 1] = sol.y[:, -1]
        # carry the last untruncated step size into the next interval
        if sol.t.size >= 3 and k + 2 < t.size:
            first_step = min(float(sol.t[-2] - sol.t[-3]), float(t[k + 2] - t[k + 1]))
    return Trajectory(t, _from_real(out))


def _from_real(x: np.ndarray) -> np.ndarray:
    return (x @ _FRAME.T).reshape(-1, DIM, DIM)


def steady_state(liouvillian: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Trace-one stationary state of ``liouvillian``.

    Raises :class:`DegenerateKernelError` (carrying the kernel basis) if the
    stationary space is not one-dimensional.
    """
    _, s, vh = scipy.linalg.svd(liouvillian)
    if tol is None:
        tol = 1e-10 * s[0]
    null = vh[s < tol].conj()
    if null.shape[0] != 1:
        basis = [unvec(v) for v in null]
        raise DegenerateKernelError(len(basis), _trace_orthogonalize(basis))
    rho = unvec(null[0])
    rho = rho / np.trace(rho)
    return (rho + rho.conj().T) / 2


def _trace_orthogonalize(basis):
    """Split a kernel basis into one trace-one element and traceless remainder."""
    if not basis:
        return basis
    traces = np.array([np.trace(b) for b in basis])
    k = int(np.argmax(np.abs(traces)))
    lead = basis[k] / traces[k]
    rest = [b - np.trace(b) * lead for i, b in enumerate(basis) if i != k]
    return [lead] + rest


# --- laser population of antisymmetric states ---------------------------------

def static_liouvillian(cs: CouplingSet, zeeman: float = 0.0,
                       drive: DriveConfig | None = None) -> np.ndarray:
    """Generator for fixed fields: H_A (or the laser-frame part) + H_Omega + L_gamma."""
    if drive is None:
        h = build_h_a(zeeman)
    else:
        h = build_h_laser(drive, cs.geometry)
    return build_liouvillian(h + build_h_omega(cs), build_dissipator(cs))


def antisymmetric_populations(traj: Trajectory, geom: Geometry) -> Trajectory:
    states = collective_states("a", geom.theta, geom.phi)
    return traj.add_populations({f"psi_a{i}": v for i, v in enumerate(states, start=1)})


def polarized_drive(polarization: str, rabi: float, delta2: float = 0.0,
                    zeeman: float = 0.0) -> DriveConfig:
    if polarization == "x":
        return DriveConfig(omega_x=rabi, delta2=delta2, zeeman=zeeman)
    if polarization == "y":
        return DriveConfig(omega_y=rabi, delta2=delta2, zeeman=zeeman)
    raise ValueError(f"polarization must be 'x' or 'y', got {polarization!r}")


def drive_to_antisymmetric(polarization: str, rabi: float, geom: Geometry, t_end: float,
                           dt_out: float = 0.1, **kwargs) -> Trajectory:
    """Drive both atoms from |4,4> with a transverse laser and track psi_a^1..3.

    The configuration is the one in which the selective population works:
    atoms along x (theta = pi/2, phi = 0), no Zeeman splitting, resonant drive.
    """
    if not (np.isclose(geom.theta, np.pi / 2) and geom.phi == 0):
        raise ValueError("selective population assumes theta = pi/2, phi = 0")
    cs = closed_form_couplings(geom)
    gen = static_liouvillian(cs, drive=polarized_drive(polarization, rabi))
    traj = evolve(gen, ground_state(), t_end, dt_out, **kwargs)
    return antisymmetric_populations(traj, geom)


def approx_antisym_population(t, gamma_a: float, c_inf: float):
    """Rise curve c_inf / (2 Gamma_a) (1 - exp(-2 Gamma_a t))."""
    if gamma_a <= 0:
        raise ValueError("gamma_a must be positive")
    t = np.asarray(t, dtype=float)
    return c_inf / (2 * gamma_a) * (1 - np.exp(-2 * gamma_a * t))


def feeding_rate(plateau: float, gamma_a: float) -> float:
    """Late-time feeding coefficient C_a = 2 Gamma_a times the plateau population."""
    return 2 * gamma_a * plateau


def antisymmetric_rate(geom: Geometry, i: int) -> float:
    return float(collective_decay_rates(geom.eta)[0][i - 1])


def excited_population(traj: Trajectory) -> np.ndarray:
    """Mean number of excited atoms at each snapshot."""
    n = excitation_number()
    return np.real(np.einsum("ij,tji->t", n, traj.states))


def check_trajectory(traj: Trajectory, herm_tol=1e-10, trace_tol=1e-9, pos_tol=1e-8):
    """Worst-case (hermiticity, trace, negativity) deviations along a trajectory."""
    herm = max(np.abs(r - r.conj().T).max() for r in traj.states)
    trace = max(abs(np.trace(r) - 1) for r in traj.states)
    neg = max(-np.linalg.eigvalsh((r + r.conj().T) / 2).min() for r in traj.states)
    return herm, trace, neg
