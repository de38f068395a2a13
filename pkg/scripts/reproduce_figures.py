"""Write the data behind every figure config into one directory.

    python scripts/reproduce_figures.py [outdir]

Each config in configs/ is dispatched to the subcommand that fits it; the CSV and
its .meta.json sidecar land in ``outdir`` (default ./figures).
"""
import sys
import time
from pathlib import Path

from dfsqubit.cli import main
from dfsqubit.config import RunConfig

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def subcommand(cfg: RunConfig) -> str:
    if cfg.sweep is not None:
        return "sweep"
    if cfg.surface is not None:
        return "surface"
    if cfg.mode == "laser":
        return "evolve"
    return "bloch"


def run_all(outdir):
    failures = 0
    for path in sorted(CONFIG_DIR.glob("*.json")):
        cmd = subcommand(RunConfig.load(path))
        t0 = time.perf_counter()
        code = main([cmd, "--config", str(path), "--output-dir", str(outdir)])
        print(f"{path.stem:8s} {cmd:8s} exit {code}  {time.perf_counter() - t0:6.1f} s")
        failures += code != 0
    return failures


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("figures")
    sys.exit(1 if run_all(out) else 0)
