"""Regenerate the figure configs in configs/ from the RunConfig dataclasses.

    python scripts/make_configs.py [outdir]
"""
import sys
from pathlib import Path

import numpy as np

from dfsqubit.config import (GeometryConfig, LaserConfig, OutputConfig, RFConfig, RunConfig,
                             SimulationConfig, SurfaceConfig, SweepConfig)
from dfsqubit.control import pi_pulse_duration
from dfsqubit.spectral import bohr_frequency

OBSERVABLES = ["psi_a1", "psi_a2", "psi_a3", "psi_s1", "psi_s2", "psi_s3", "ground", "excited"]


def planar(r):
    return GeometryConfig(r_over_lambda=r, theta=np.pi / 2, phi=0.0)


def configs():
    # couplings, decay rates and collective rates against R / lambda0
    for stem in ("fig2", "fig3", "fig4"):
        yield RunConfig(geometry=planar(0.1), output=OutputConfig(stem=stem),
                        sweep=SweepConfig(analysis="couplings", parameter="r_over_lambda",
                                          start=0.05, stop=2.0, num=196))

    yield RunConfig(surface=SurfaceConfig(), output=OutputConfig(stem="fig6"))

    for stem, pol in (("fig9a", "y"), ("fig9b", "x")):
        yield RunConfig(geometry=planar(0.1), drive=LaserConfig(polarization=pol, rabi=5.0),
                        simulation=SimulationConfig(t_end=20.0, dt_out=0.05,
                                                    observables=list(OBSERVABLES)),
                        output=OutputConfig(stem=stem))

    # one precession period per splitting
    for stem, delta in (("fig10a", 3.15), ("fig10b", 4.83), ("fig10c", 6.22)):
        period = 2 * np.pi / float(bohr_frequency(2 * np.pi * 0.1, delta))
        yield RunConfig(geometry=planar(0.1), zeeman=delta,
                        simulation=SimulationConfig(t_end=period, dt_out=period / 200),
                        output=OutputConfig(stem=stem))

    yield RunConfig(geometry=planar(0.05), rf=RFConfig(delta0=1.0, phi_rf=np.pi),
                    simulation=SimulationConfig(t_end=pi_pulse_duration(1.0), dt_out=0.005),
                    output=OutputConfig(stem="fig11"))


def main(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for cfg in configs():
        cfg.validate().save(outdir / f"{cfg.output.stem}.json")
        print(outdir / f"{cfg.output.stem}.json")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent.parent / "configs")
