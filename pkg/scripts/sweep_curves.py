"""Speaking probability against likelihood precision and against the prior on attentiveness.

Writes one CSV per parameter and observation into ``--outdir`` and prints a
coarse text plot of each curve.

    python3 scripts/sweep_curves.py --outdir results/
"""

import argparse
from pathlib import Path

import numpy as np

from presence_aif.io import write_sweep_csv
from presence_aif.presence import PresenceModelSpec, SimulationCondition, sweep


def text_plot(rows, width=40):
    ps = np.array([p for _, p in rows])
    lo, hi = ps.min(), ps.max()
    span = hi - lo or 1.0
    for v, p in rows:
        bar = "#" * (1 + int(round((p - lo) / span * (width - 1))))
        print(f"  {v:5.2f} {p:.6f} {bar}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    ap.add_argument("--steps", type=int, default=21)
    ap.add_argument("--variant", choices=("original", "modified"), default="original")
    args = ap.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    grid = np.linspace(0.0, 1.0, args.steps)
    base = PresenceModelSpec(variant=args.variant)
    for param in ("zeta11", "prior-a"):
        for obs in ("direct", "averted"):
            rows = sweep(param, grid, SimulationCondition(observation=obs), base)
            path = args.outdir / f"sweep_{param}_{obs}_{args.variant}.csv"
            with open(path, "w", newline="") as fh:
                write_sweep_csv(param, rows, fh)
            print(f"{param} / {obs} -> {path}")
            text_plot(rows)


if __name__ == "__main__":
    main()
