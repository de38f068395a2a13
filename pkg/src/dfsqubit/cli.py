"""
Command-line entry point: ``dfsqubit <subcommand> ...``.

Tabular results go to stdout as CSV unless an output stem is given, in which
case ``<dir>/<stem>.csv`` and a ``<stem>.meta.json`` sidecar are written. The
directory comes from ``--output-dir``, the config's ``output.directory``, the
``DFSQUBIT_OUTPUT_DIR`` environment variable, or the working directory, in that
order. Data files hold no timestamps, so repeated runs are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import (ConfigError, GeometryConfig, RFConfig, RunConfig, SimulationConfig,
                     SurfaceConfig)
from .control import (PAULI, PulseSegment, delta_for_target, qubit_bloch, qubit_frequency,
                      qubit_populations, rf_qubit_hamiltonian, simulate_rf_pulses,
                      simulate_static_field, static_qubit_hamiltonian)
from .couplings import (DomainError, Geometry, closed_form_couplings, collective_decay_rates,
                        limit_couplings)
from .dfs import dfs_leakage_rate, dissipator_null_space, projected_decay_rate
from .dynamics import (DegenerateKernelError, IntegrationError, evolve, excited_population,
                       static_liouvillian, steady_state)
from .entanglement import concurrence
from .hamiltonians import (DIM, DriveConfig, build_dissipator, build_h_a, build_h_omega,
                           excitation_number, ket)
from .spectral import bohr_frequency, energy_surface, named_state, numerical_block_eigensystem

OUTPUT_ENV = "DFSQUBIT_OUTPUT_DIR"
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

DEFAULT_ETA_GRID = [2 * np.pi * 0.05 * k for k in range(1, 21)]


# --- output -------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def output_dir(args, cfg: RunConfig | None = None) -> Path:
    if getattr(args, "output_dir", None):
        return Path(args.output_dir)
    if cfg is not None and cfg.output.directory:
        return Path(cfg.output.directory)
    return Path(os.environ.get(OUTPUT_ENV, "."))


def emit(args, header, rows, cfg: RunConfig | None = None, extra_meta=None):
    text = csv_text(header, rows)
    stem = getattr(args, "output", None) or (cfg.output.stem if cfg else None)
    if not stem or stem == "-":
        sys.stdout.write(text)
        return None
    d = output_dir(args, cfg)
    d.mkdir(parents=True, exist_ok=True)
    path = d / f"{stem}.csv"
    with open(path, "w", newline="") as fh:
        fh.write(text)
    meta = {
        "command": args.command,
        "argv": getattr(args, "argv", sys.argv[1:]),
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "rows": len(rows),
    }
    if cfg is not None:
        meta["config"] = cfg.to_dict()
    if extra_meta:
        meta.update(extra_meta)
    (d / f"{stem}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(path, file=sys.stderr)
    return path


def matrix_to_json(m: np.ndarray) -> list:
    """Row-major nested lists of [re, im] pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.ndim != 3 or a.shape[-1] != 2:
        raise ValueError("matrix must be nested rows of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def write_json(path, obj):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(obj) + "\n")


# --- geometry arguments -------------------------------------------------------------

def add_geometry_args(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--eta", type=float, help="k0 R")
    g.add_argument("--eta-over-2pi", "--r-over-lambda", dest="r_over_lambda", type=float,
                   help="R / lambda0 (= eta / 2 pi)")
    p.add_argument("--theta", type=float, default=np.pi / 2)
    p.add_argument("--phi", type=float, default=0.0)


def geometry_from_args(args) -> Geometry:
    gc = GeometryConfig(args.eta, args.r_over_lambda, args.theta, args.phi)
    gc.validate()
    return gc.geometry()


def _geometry_cfg(cfg: RunConfig) -> Geometry:
    if cfg.geometry is None:
        raise ConfigError("geometry", "required for this command")
    return cfg.geometry.geometry()


# --- analyses shared by subcommands and sweeps ---------------------------------------

COUPLING_HEADER = (["eta", "theta", "phi"]
                   + [f"{kind}_{i}{j}_{part}" for kind in ("Omega", "Gamma")
                      for i in (1, 2, 3) for j in (1, 2, 3) for part in ("re", "im")]
                   + ["Omega_F", "Omega_N"]
                   + [f"Gamma_a{i}" for i in (1, 2, 3)] + [f"Gamma_s{i}" for i in (1, 2, 3)])


def couplings_row(geom: Geometry) -> list:
    cs = closed_form_couplings(geom)
    row = [geom.eta, geom.theta, geom.phi]
    for m in (cs.omega, cs.gamma_cross):
        for z in m.reshape(-1):
            row += [z.real, z.imag]
    ga, gs = collective_decay_rates(geom.eta)
    return row + [cs.omega_F, cs.omega_N] + list(ga) + list(gs)


SPECTRUM_HEADER = (["eta", "theta", "phi", "delta"]
                   + [f"Lambda_a{i}" for i in (1, 2, 3)] + [f"Lambda_s{i}" for i in (1, 2, 3)]
                   + ["omega_B"]
                   + [f"rate_a{i}" for i in (1, 2, 3)] + [f"rate_s{i}" for i in (1, 2, 3)])


def spectrum_row(geom: Geometry, delta: float) -> list:
    """Block eigenvalues (ascending) with the population decay rates of the eigenstates."""
    cs = closed_form_couplings(geom)
    diss = build_dissipator(cs)
    shifts, rates = [], []
    for kind in ("a", "s"):
        w, v = numerical_block_eigensystem(cs, delta, kind)
        shifts += list(w)
        rates += [projected_decay_rate(diss, v[:, k]) for k in range(3)]
    return ([geom.eta, geom.theta, geom.phi, delta] + shifts
            + [float(bohr_frequency(geom.eta, delta))] + rates)


DFS_HEADER = ["eta", "r_over_lambda", "dimension", "gap", "ill_conditioned",
              "rate_a1", "rate_a2", "rate_a3"]


def dfs_row(geom: Geometry) -> list:
    cs = closed_form_couplings(geom)
    diss = build_dissipator(cs)
    ns = dissipator_null_space(diss)
    return ([geom.eta, geom.r_over_lambda, ns.dimension, ns.gap, ns.ill_conditioned]
            + list(dfs_leakage_rate(cs, diss)))


def initial_state(sim: SimulationConfig, geom: Geometry) -> np.ndarray:
    if isinstance(sim.initial, str):
        psi = named_state(sim.initial, geom)
        return np.outer(psi, psi.conj())
    rho = matrix_from_json(sim.initial)
    if rho.shape != (DIM, DIM):
        raise ConfigError("simulation.initial", f"matrix must be {DIM}x{DIM}")
    return rho


def _observable(name: str, geom: Geometry):
    if name == "excited":
        return None
    return named_state(name, geom)


def _drive(cfg: RunConfig) -> DriveConfig | None:
    if cfg.drive is None:
        return None
    d = cfg.drive
    kw = {"omega_x": d.rabi} if d.polarization == "x" else {"omega_y": d.rabi}
    return DriveConfig(delta2=d.detuning, zeeman=cfg.zeeman, **kw)


def _static_generator(cfg: RunConfig, geom: Geometry):
    cs = closed_form_couplings(geom)
    return static_liouvillian(cs, zeeman=cfg.zeeman, drive=_drive(cfg))


def evolve_table(cfg: RunConfig):
    geom = _geometry_cfg(cfg)
    if cfg.mode == "rf":
        raise ConfigError("rf", "use the bloch subcommand for RF runs")
    sim = cfg.simulation
    traj = evolve(_static_generator(cfg, geom), initial_state(sim, geom), sim.t_end,
                  sim.dt_out, method=sim.method, rtol=sim.rtol, atol=sim.atol)
    cols = []
    for name in sim.observables:
        psi = _observable(name, geom)
        cols.append(excited_population(traj) if psi is None else traj.population(psi))
    rows = [[t] + [c[k] for c in cols] for k, t in enumerate(traj.times)]
    return ["t"] + list(sim.observables), rows, traj


def steady_row(cfg: RunConfig):
    geom = _geometry_cfg(cfg)
    rho = steady_state(_static_generator(cfg, geom))
    vals = []
    for name in cfg.simulation.observables:
        psi = _observable(name, geom)
        if psi is None:
            vals.append(np.real(np.trace(excitation_number() @ rho)))
        else:
            vals.append(np.real(psi.conj() @ rho @ psi))
    return list(cfg.simulation.observables), vals, rho


# --- subcommands ---------------------------------------------------------------------

def cmd_couplings(args):
    geom = geometry_from_args(args)
    emit(args, COUPLING_HEADER, [couplings_row(geom)])
    if args.dump_operators:
        cs = closed_form_couplings(geom)
        write_json(args.dump_operators, {
            "h_omega": matrix_to_json(build_h_omega(cs)),
            "dissipator": matrix_to_json(build_dissipator(cs)),
        })
    return 0


def cmd_spectrum(args):
    geom = geometry_from_args(args)
    emit(args, SPECTRUM_HEADER, [spectrum_row(geom, args.delta)])
    if args.dump_operators:
        cs = closed_form_couplings(geom)
        write_json(args.dump_operators,
                   {"hamiltonian": matrix_to_json(build_h_a(args.delta) + build_h_omega(cs))})
    return 0


def cmd_surface(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    sc = cfg.surface or SurfaceConfig()
    if args.delta is not None:
        sc = replace(sc, delta=args.delta)
    if args.num is not None:
        sc = replace(sc, num=args.num)
    l = np.linspace(sc.l_min, sc.l_max, sc.num)
    z = np.linspace(sc.z_min, sc.z_max, sc.num)
    L, Z = np.meshgrid(l, z, indexing="ij")
    origin = (L == 0) & (Z == 0)
    rows = []
    for idx in np.ndindex(L.shape):
        if origin[idx]:
            continue
        lam = energy_surface(L[idx], Z[idx], sc.delta, sc.phi)
        rows.append([L[idx], Z[idx]] + list(lam))
    emit(args, ["l", "z", "Lambda_a1", "Lambda_a2", "Lambda_a3"], rows, cfg)
    return 0


def cmd_dfs(args):
    if args.limit_r_zero:
        cs = limit_couplings()
        ns = dissipator_null_space(build_dissipator(cs))
        emit(args, ["eta", "dimension", "gap", "ill_conditioned"],
             [[0.0, ns.dimension, ns.gap, ns.ill_conditioned]])
        return 0
    if args.eta is None and args.r_over_lambda is None:
        geoms = [Geometry(e, args.theta, args.phi) for e in DEFAULT_ETA_GRID]
    else:
        geoms = [geometry_from_args(args)]
    emit(args, DFS_HEADER, [dfs_row(g) for g in geoms])
    return 0


def _config_with_overrides(args) -> RunConfig:
    cfg = RunConfig.load(args.config)
    if getattr(args, "t_end", None) is not None:
        cfg.simulation.t_end = args.t_end
    return cfg.validate()


def cmd_evolve(args):
    cfg = _config_with_overrides(args)
    header, rows, traj = evolve_table(cfg)
    emit(args, header, rows, cfg)
    if args.dump_rho:
        write_json(args.dump_rho, {"times": [float(t) for t in traj.times],
                                   "states": [matrix_to_json(r) for r in traj.states]})
    return 0


def cmd_steady(args):
    cfg = _config_with_overrides(args)
    header, vals, rho = steady_row(cfg)
    emit(args, header, [vals], cfg)
    if args.dump_rho:
        write_json(args.dump_rho, {"state": matrix_to_json(rho)})
    return 0


BLOCH_HEADER = ["t", "Bx", "By", "Bz", "norm", "p_a2", "p_a3", "Bx_model", "By_model", "Bz_model"]


def bloch_table(cfg: RunConfig):
    geom = _geometry_cfg(cfg)
    if not (np.isclose(geom.theta, np.pi / 2) and geom.phi == 0):
        raise ConfigError("geometry", "qubit control assumes theta = pi/2, phi = 0")
    sim = cfg.simulation
    kw = dict(method=sim.method, rtol=sim.rtol, atol=sim.atol)
    eta = geom.eta
    if cfg.mode == "rf":
        rf = cfg.rf
        w0 = qubit_frequency(eta)
        if rf.pulses is None:
            pulses = [(rf.delta0, rf.phi_rf, rf.detuning_rf, sim.t_end)]
        else:
            pulses = [(p.delta0, p.phi_rf, p.detuning_rf, p.duration) for p in rf.pulses]
        segs = [PulseSegment(d0, w0 + det, ph, dur) for d0, ph, det, dur in pulses]
        run = simulate_rf_pulses(eta, segs, sim.dt_out, **kw)
        model = _rwa_model(pulses, run.times)
    elif cfg.mode == "free":
        run = simulate_static_field(eta, cfg.zeeman, sim.t_end, sim.dt_out, **kw)
        model = static_qubit_hamiltonian(eta, cfg.zeeman).bloch_trajectory(run.times)
    else:
        raise ConfigError("drive", "the bloch subcommand takes a static splitting or an rf block")
    pops = qubit_populations(run.trajectory)
    rows = [[t, *run.bloch[k], run.norm[k], *pops[k], *model[k]]
            for k, t in enumerate(run.times)]
    return BLOCH_HEADER, rows


def _rwa_model(pulses, times):
    """Piecewise RWA Bloch trajectory for (delta0, phi, detuning, duration) pulses."""
    edges = np.cumsum([0.0] + [p[3] for p in pulses])
    u_start = [np.eye(2, dtype=complex)]
    for (d0, ph, det, dur) in pulses:
        u_start.append(rf_qubit_hamiltonian(d0, ph, det).propagator(dur) @ u_start[-1])
    rho0 = 0.5 * (np.eye(2) + PAULI[2])
    out = []
    for t in times:
        k = min(int(np.searchsorted(edges, t, side="right")) - 1, len(pulses) - 1)
        d0, ph, det, _ = pulses[k]
        u = rf_qubit_hamiltonian(d0, ph, det).propagator(t - edges[k]) @ u_start[k]
        out.append(qubit_bloch(u @ rho0 @ u.conj().T))
    return np.array(out)


def cmd_bloch(args):
    if args.config:
        cfg = _config_with_overrides(args)
    else:
        if args.t_end is None:
            raise ConfigError("t_end", "required without --config")
        geometry_from_args(args)
        gc = GeometryConfig(args.eta, args.r_over_lambda)
        sim = SimulationConfig(t_end=args.t_end, dt_out=args.dt_out)
        cfg = RunConfig(geometry=gc, zeeman=args.delta or 0.0, simulation=sim)
        if args.delta0 is not None:
            cfg.rf = RFConfig(delta0=args.delta0, phi_rf=args.phi_rf,
                              detuning_rf=args.detuning_rf)
        cfg.validate()
    header, rows = bloch_table(cfg)
    emit(args, header, rows, cfg)
    return 0


def cmd_target(args):
    s = np.array([args.sx, args.sy, args.sz], dtype=float)
    s = s / np.linalg.norm(s)
    geom = geometry_from_args(args)
    print(_fmt(delta_for_target(s, geom.eta)))
    return 0


def cmd_concurrence(args):
    if args.state:
        psi = named_state(args.state)
    elif args.product:
        psi = ket(*args.product)
    else:
        parts = [complex(x.replace(" ", "")) for x in args.amplitudes.split(",")]
        psi = np.array(parts, dtype=complex)
    print(_fmt(concurrence(psi)))
    return 0


def _sweep_one(payload):
    analysis, cfg_dict = payload
    cfg = RunConfig.from_dict(cfg_dict)
    value_geom = _geometry_cfg(cfg)
    if analysis == "couplings":
        return COUPLING_HEADER, [couplings_row(value_geom)]
    if analysis == "spectrum":
        return SPECTRUM_HEADER, [spectrum_row(value_geom, cfg.zeeman)]
    if analysis == "dfs":
        return DFS_HEADER, [dfs_row(value_geom)]
    if analysis == "steady":
        header, vals, _ = steady_row(cfg)
        return ["eta", "theta", "phi", "zeeman"] + header, [
            [value_geom.eta, value_geom.theta, value_geom.phi, cfg.zeeman] + vals]
    header, rows, _ = evolve_table(cfg)
    return ["eta", "theta", "phi", "zeeman"] + header, [
        [value_geom.eta, value_geom.theta, value_geom.phi, cfg.zeeman] + rows[-1]]


def sweep_payloads(cfg: RunConfig):
    sw = cfg.sweep
    out = []
    for v in sw.grid():
        d = cfg.to_dict()
        d.pop("sweep", None)
        geo = dict(d.get("geometry", {}))
        if sw.parameter == "zeeman":
            d["zeeman"] = v
        elif sw.parameter in ("eta", "r_over_lambda"):
            geo.pop("eta", None)
            geo.pop("r_over_lambda", None)
            geo[sw.parameter] = v
        else:
            geo[sw.parameter] = v
        d["geometry"] = geo
        out.append((sw.analysis, d))
    return out


def cmd_sweep(args):
    cfg = RunConfig.load(args.config)
    if cfg.sweep is None:
        raise ConfigError("sweep", "required for the sweep subcommand")
    payloads = sweep_payloads(cfg)
    workers = args.workers or cfg.sweep.workers or os.cpu_count() or 1
    if workers == 1:
        results = [_sweep_one(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, payloads))
    header = results[0][0]
    rows = [r for _, rs in results for r in rs]
    emit(args, header, rows, cfg)
    return 0


# --- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dfsqubit",
                                 description="Two dipole-coupled four-level atoms: DFS qubit tools")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-o", "--output", help="output stem; '-' or omitted writes CSV to stdout")
        p.add_argument("--output-dir", help=f"output directory (default ${OUTPUT_ENV} or .)")
        return p

    p = common(sub.add_parser("couplings", help="Omega_ij, Gamma_ij and collective rates"))
    add_geometry_args(p)
    p.add_argument("--dump-operators", metavar="JSON")
    p.set_defaults(func=cmd_couplings)

    p = common(sub.add_parser("spectrum", help="single-excitation shifts and decay rates"))
    add_geometry_args(p)
    p.add_argument("--delta", type=float, default=0.0, help="Zeeman splitting (gamma)")
    p.add_argument("--dump-operators", metavar="JSON")
    p.set_defaults(func=cmd_spectrum)

    p = common(sub.add_parser("surface", help="antisymmetric shifts on an (l, z) grid"))
    p.add_argument("--config")
    p.add_argument("--delta", type=float)
    p.add_argument("--num", type=int)
    p.set_defaults(func=cmd_surface)

    p = common(sub.add_parser("dfs", help="dissipator kernel dimension and leakage rates"))
    add_geometry_args(p, required=False)
    p.add_argument("--limit-r-zero", action="store_true",
                   help="use the R -> 0 rates Gamma_ij = delta_ij")
    p.set_defaults(func=cmd_dfs)

    p = common(sub.add_parser("evolve", help="master-equation trajectory from a config"))
    p.add_argument("--config", required=True)
    p.add_argument("--t-end", type=float)
    p.add_argument("--dump-rho", metavar="JSON")
    p.set_defaults(func=cmd_evolve)

    p = common(sub.add_parser("steady", help="stationary state observables"))
    p.add_argument("--config", required=True)
    p.add_argument("--dump-rho", metavar="JSON")
    p.set_defaults(func=cmd_steady)

    p = common(sub.add_parser("bloch", help="qubit Bloch vector under static or RF fields"))
    p.add_argument("--config")
    add_geometry_args(p, required=False)
    p.add_argument("--delta", type=float, help="static Zeeman splitting")
    p.add_argument("--delta0", type=float, help="RF amplitude (selects RF mode)")
    p.add_argument("--phi-rf", type=float, default=0.0)
    p.add_argument("--detuning-rf", type=float, default=0.0)
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt-out", type=float, default=0.01)
    p.set_defaults(func=cmd_bloch)

    p = sub.add_parser("target", help="Zeeman splitting that reaches a Bloch point")
    add_geometry_args(p)
    p.add_argument("--sx", type=float, required=True)
    p.add_argument("--sy", type=float, default=0.0)
    p.add_argument("--sz", type=float, required=True)
    p.set_defaults(func=cmd_target)

    p = sub.add_parser("concurrence", help="pure-state concurrence")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--state", help="label: psi_a1..3, psi_s1..3, a1..3, s1..3, ket12 ...")
    g.add_argument("--product", type=int, nargs=2, metavar=("I", "J"))
    g.add_argument("--amplitudes", help="16 comma-separated complex numbers, e.g. 0.7071,-0.7071j,...")
    p.set_defaults(func=cmd_concurrence)

    p = common(sub.add_parser("sweep", help="parallel sweep of an analysis over a parameter"))
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except (ConfigError, DomainError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, DegenerateKernelError, np.linalg.LinAlgError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
