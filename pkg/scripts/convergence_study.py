"""Exact meter variances at t = 1/kappa against the large-coupling map.

Prints the discrepancy for a sweep of couplings and the observed order for a
few reference states. Real minimal-uncertainty states converge at second order;
chirped or displaced states converge at first order.
"""

import argparse

import numpy as np

from arthurs_kelly.dynamics import convergence_check
from arthurs_kelly.gaussian import GaussianProbeParams, GaussianSystemParams, assemble_initial_state

STATES = {
    "minimal": (GaussianProbeParams(1, 1), GaussianSystemParams()),
    "entangled C=i": (GaussianProbeParams(1, 1, 1j), GaussianSystemParams()),
    "chirped separable": (GaussianProbeParams(1.3 + 0.7j, 0.8 - 0.4j, 0, 0.2, -0.1 + 0.3j),
                          GaussianSystemParams(1.2 + 0.5j, 0.3)),
    "chirped entangled": (GaussianProbeParams(1.5 + 0.3j, 1.1 - 0.2j, 0.4 + 0.6j, 0.2, 0.1j),
                          GaussianSystemParams(0.9 + 0.3j, 0.1 + 0.2j)),
}


def main():
    ap = argparse.ArgumentParser(description="large-coupling convergence study")
    ap.add_argument("--kmin", type=float, default=1e1)
    ap.add_argument("--kmax", type=float, default=1e5)
    ap.add_argument("--points", type=int, default=5)
    args = ap.parse_args()
    kappas = np.logspace(np.log10(args.kmin), np.log10(args.kmax), args.points)

    print(f"{'state':<20}" + "".join(f"{k:>12.3g}" for k in kappas) + "   order")
    for name, (probe, system) in STATES.items():
        report = convergence_check(assemble_initial_state(probe, system), kappas)
        errs = "".join(f"{e:>12.3e}" for e in report.max_errors)
        print(f"{name:<20}{errs}   {np.median(report.observed_orders):.2f}")


if __name__ == "__main__":
    main()
