"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize

from arthurs_kelly.checks import random_probe, random_system, run_kernel_checks
from arthurs_kelly.cli import main
from arthurs_kelly.dynamics import (
    HamiltonianParams,
    convergence_check,
    propagate_moments,
    symplectic_map,
)
from arthurs_kelly.gaussian import (
    GaussianProbeParams,
    GaussianSystemParams,
    assemble_initial_state,
    moment_oracle,
    probe_moments,
)
from arthurs_kelly.inequality import (
    ScanGrid,
    gamma_bound,
    gamma_c,
    gamma_c_closed_form,
    minimized_product,
    separable_product,
    stationarity_residuals,
    summarize,
    violation_scan,
)


def record(log, number, title, passed, elapsed, limit, detail):
    status = "PASS" if passed else "FAIL"
    log.append(f"[{status}] {number:>2}. {title}: {detail} ({elapsed:.3g}s, limit {limit:g}s)")
    assert passed, log[-1]


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_01_minimal_uncertainty_bound(acceptance_log):
    with Timer() as t:
        value = gamma_bound(0.25, 0.25, 0.25)
    ok = value == 1.0 and t.elapsed < 1e-3
    record(acceptance_log, 1, "minimal-uncertainty bound", ok, t.elapsed, 1e-3, f"gamma={value!r}")


def test_02_gamma_c_unit_point(acceptance_log):
    with Timer() as t:
        value = gamma_c(2, 2, 0, 0)
    ok = abs(value - 1) <= 1e-12 and t.elapsed < 1e-3
    record(acceptance_log, 2, "gamma_c unit point", ok, t.elapsed, 1e-3, f"gamma_c={value!r}")


@pytest.mark.parametrize("label,grid", [
    ("C_R=1", ScanGrid(B_R=1, C_R=1, ar_min=1.05, ar_max=10)),
    ("C_R=2", ScanGrid(B_R=1, C_R=2, ar_min=4.05, ar_max=20)),
])
def test_03_violation_scans(acceptance_log, label, grid):
    with Timer() as t:
        s = summarize(violation_scan(grid, threads=1))
    ok = s.violations >= 1 and s.original_violations == 0 and t.elapsed < 10
    record(acceptance_log, 3, f"violation scan {label}", ok, t.elapsed, 10,
           f"valid={s.valid} violations={s.violations} below_one={s.original_violations} "
           f"min_gamma_c={s.min_gamma_c:.6f}")


def test_04_gamma_c_two_paths(acceptance_log):
    rng = np.random.default_rng(404)
    n = 10_000
    ar, br = rng.uniform(0.3, 10, size=(2, n))
    cr = rng.uniform(-0.95, 0.95, size=n) * np.sqrt(ar * br)
    ci = rng.uniform(-10, 10, size=n)
    with Timer() as t:
        worst = max(abs(gamma_c(*p) / gamma_c_closed_form(*p) - 1) for p in zip(ar, br, cr, ci))
    ok = worst <= 1e-9 and t.elapsed < 5
    record(acceptance_log, 4, "gamma_c closed form vs moment path", ok, t.elapsed, 5,
           f"{n} sets, worst rel diff {worst:.2e}")


def test_05_moment_formulas_vs_quadrature(acceptance_log):
    rng = np.random.default_rng(505)
    names = {"dx1sq": "x1 x1", "dx2sq": "x2 x2", "dp1sq": "p1 p1", "dp2sq": "p2 p2",
             "alpha": "alpha", "beta": "beta"}
    worst = 0.0
    with Timer() as t:
        for _ in range(20):
            p = random_probe(rng)
            closed = probe_moments(p)
            for attr, which in names.items():
                worst = max(worst, abs(getattr(closed, attr) - moment_oracle(p, which)))
    ok = worst <= 1e-6 and t.elapsed < 120
    record(acceptance_log, 5, "moment formulas vs quadrature", ok, t.elapsed, 120,
           f"20 probes, worst abs diff {worst:.2e}")


def _variance_ratio(state):
    report = convergence_check(state, [1e2, 1e3])
    err = report.errors[:, :2].max(axis=1)
    return err[0] / err[1]


def test_06_large_coupling_convergence(acceptance_log):
    rng = np.random.default_rng(606)
    separable, entangled = [], []
    with Timer() as t:
        for _ in range(10):
            p = random_probe(rng)
            sep = GaussianProbeParams(p.A, p.B, 0, p.D1, p.D2)
            separable.append(_variance_ratio(assemble_initial_state(sep, random_system(rng))))
            entangled.append(_variance_ratio(assemble_initial_state(p, random_system(rng))))
    ratios = separable + entangled
    ok = all(5 <= r <= 20 for r in ratios) and t.elapsed < 1
    minimal = _variance_ratio(assemble_initial_state(GaussianProbeParams(1, 1),
                                                     GaussianSystemParams()))
    record(acceptance_log, 6, "large-coupling 1/kappa convergence", ok, t.elapsed, 1,
           f"separable ratios [{min(separable):.2f}, {max(separable):.2f}], "
           f"entangled [{min(entangled):.2f}, {max(entangled):.2f}]; "
           f"info: real minimal state ratio {minimal:.1f} (second order)")


def test_07_kernel_identities(acceptance_log):
    with Timer() as t:
        results = run_kernel_checks(HamiltonianParams(kappa=2.0), 1.0, 0.3, seed=707,
                                    trials=100)
    ok = all(r.passed for r in results) and t.elapsed < 10
    detail = "; ".join(f"{r.name} {r.worst:.1e}" + (f" [{r.note}]" if r.note else "")
                       for r in results)
    record(acceptance_log, 7, "kernel identities x100", ok, t.elapsed, 10, detail)


def _nelder_mead_minimum(K1, K2, K3):
    f = lambda v: separable_product(K1, K2, K3, math.exp(v[0]), math.exp(v[1]))
    res = minimize(f, [0.0, 0.0], method="Nelder-Mead",
                   options={"xatol": 1e-8, "fatol": 1e-13, "maxiter": 2000})
    return res.fun


def test_08_minimization_closed_form(acceptance_log):
    rng = np.random.default_rng(808)
    worst_value = worst_residual = 0.0
    with Timer() as t:
        for K in rng.uniform(0.25, 4.0, size=(1000, 3)):
            value, x, y = minimized_product(*K)
            reference = _nelder_mead_minimum(*K)
            worst_value = max(worst_value, abs(value - reference),
                              abs(value - gamma_bound(*K) ** 2))
            worst_residual = max(worst_residual, *map(abs, stationarity_residuals(*K, x, y)))
    ok = worst_value <= 1e-6 and worst_residual < 1e-10 and t.elapsed < 5
    record(acceptance_log, 8, "minimized product vs numerical minimizer", ok, t.elapsed, 5,
           f"worst value diff {worst_value:.1e}, worst residual {worst_residual:.1e}")


def test_09_physicality_preservation(acceptance_log):
    # Moderate masses, couplings and times keep cond(cov) below ~1e8. Far more
    # squeezed outputs lose more than 1e-9 of det to double rounding alone.
    rng = np.random.default_rng(909)
    worst_eig = np.inf
    worst_det = 0.0
    with Timer() as t:
        for _ in range(1000):
            state = assemble_initial_state(random_probe(rng), random_system(rng))
            h = HamiltonianParams(*rng.uniform(0.5, 3.0, size=3), rng.uniform(0, 3))
            out = propagate_moments(state, symplectic_map(h, rng.uniform(0, 1.5)))
            worst_eig = min(worst_eig, out.physicality_eigenvalues()[0])
            worst_det = max(worst_det, abs(np.linalg.det(out.cov) / np.linalg.det(state.cov) - 1))
    ok = worst_eig >= -1e-10 and worst_det <= 1e-9 and t.elapsed < 5
    record(acceptance_log, 9, "physicality preservation", ok, t.elapsed, 5,
           f"min eigenvalue {worst_eig:.1e}, worst det drift {worst_det:.1e}")


def test_10_scan_determinism(acceptance_log, tmp_path, capsys):
    paths = [tmp_path / "one.csv", tmp_path / "eight.csv"]
    with Timer() as t:
        codes = [main(["scan", "--threads", str(n), "--out", str(p)])
                 for n, p in zip((1, 8), paths)]
    capsys.readouterr()
    same = paths[0].read_bytes() == paths[1].read_bytes()
    ok = codes == [0, 0] and same and t.elapsed < 30
    record(acceptance_log, 10, "scan determinism across threads", ok, t.elapsed, 30,
           f"exit codes {codes}, byte-identical={same}")
