"""How far the rotating-wave qubit model drifts from the full RF simulation.

    python scripts/rwa_validity.py [eta_over_2pi]

For each ratio delta0 / (Omega_N - Omega_F) a resonant pi pulse is simulated with
the counter-rotating terms kept, and the largest per-component Bloch deviation
from the 2x2 rotating-wave model is printed, along with the final vector length.
"""
import sys

import numpy as np

from dfsqubit.control import (pi_pulse_duration, qubit_frequency, rf_qubit_hamiltonian,
                              simulate_rf_transfer)

RATIOS = (0.2, 0.1, 0.05, 0.02, 0.01)


def deviation(eta, ratio, phi=np.pi):
    d0 = ratio * qubit_frequency(eta)
    t = pi_pulse_duration(d0)
    run = simulate_rf_transfer(eta, d0, phi, 0.0, t, dt_out=t / 200)
    model = rf_qubit_hamiltonian(d0, phi, 0.0).bloch_trajectory(run.times)
    return d0, np.abs(run.bloch - model).max(), run.norm[-1]


if __name__ == "__main__":
    eta = 2 * np.pi * (float(sys.argv[1]) if len(sys.argv) > 1 else 0.05)
    print(f"eta = {eta:.6g}, Omega_N - Omega_F = {qubit_frequency(eta):.6g}")
    print("ratio     delta0       max|B - B_rwa|   |B(end)|")
    for r in RATIOS:
        d0, dev, norm = deviation(eta, r)
        print(f"{r:<9g} {d0:<12.6g} {dev:<16.4f} {norm:.4f}")
