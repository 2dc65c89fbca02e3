"""Run both correlated-probe violation scans and write CSVs (plus an optional plot).

    python3 scripts/violation_scans.py --outdir results [--plot]
"""

import argparse
import os
import time

import numpy as np

from arthurs_kelly.cli import scan_csv
from arthurs_kelly.inequality import ScanGrid, summarize, violation_scan

GRIDS = {
    "scan_cr1": ScanGrid(B_R=1, C_R=1, ar_min=1.05, ar_max=10),
    "scan_cr2": ScanGrid(B_R=1, C_R=2, ar_min=4.05, ar_max=20),
}


def plot(name, grid, rows, outdir):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    gap = np.array([r.gamma - r.gamma_c for r in rows]).reshape(grid.ar_steps, grid.ci_steps)
    fig, ax = plt.subplots(figsize=(5, 4))
    extent = (grid.ci_min, grid.ci_max, grid.ar_min, grid.ar_max)
    im = ax.imshow(gap, origin="lower", aspect="auto", extent=extent, cmap="RdBu")
    ax.contour(np.linspace(grid.ci_min, grid.ci_max, grid.ci_steps),
               np.linspace(grid.ar_min, grid.ar_max, grid.ar_steps), gap, levels=[0],
               colors="k")
    ax.set_xlabel("C_I")
    ax.set_ylabel("A_R")
    ax.set_title(f"Gamma - Gamma_C (B_R={grid.B_R:g}, C_R={grid.C_R:g})")
    fig.colorbar(im)
    fig.savefig(os.path.join(outdir, f"{name}.png"), dpi=120, bbox_inches="tight")
    plt.close(fig)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--plot", action="store_true", help="needs matplotlib")
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    for name, grid in GRIDS.items():
        t0 = time.perf_counter()
        rows = violation_scan(grid, threads=args.threads)
        with open(os.path.join(args.outdir, f"{name}.csv"), "w", newline="") as fh:
            fh.write(scan_csv(rows))
        s = summarize(rows)
        print(f"{name}: {s.violations}/{s.valid} points with Gamma_C <= Gamma, "
              f"{s.original_violations} below 1, min Gamma_C {s.min_gamma_c:.6f} "
              f"({time.perf_counter() - t0:.1f}s)")
        if args.plot:
            plot(name, grid, rows, args.outdir)


if __name__ == "__main__":
    main()
