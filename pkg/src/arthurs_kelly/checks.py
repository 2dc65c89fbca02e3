"""Randomized identity checks for the kernel, shared by the CLI and tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import propagator
from .dynamics import HamiltonianParams, propagate_moments, symplectic_map
from .gaussian import GaussianProbeParams, GaussianSystemParams, assemble_initial_state


def random_probe(rng: np.random.Generator, imag_scale: float = 2.0) -> GaussianProbeParams:
    """Valid probe with Re(A)Re(B) - Re(C)^2 bounded away from zero."""
    ar, br = rng.uniform(0.3, 3.0, size=2)
    cr = rng.uniform(-0.9, 0.9) * np.sqrt(ar * br)
    ai, bi, ci = rng.uniform(-imag_scale, imag_scale, size=3)
    d1, d2 = rng.uniform(-1.5, 1.5, size=2) + 1j * rng.uniform(-1.5, 1.5, size=2)
    return GaussianProbeParams(complex(ar, ai), complex(br, bi), complex(cr, ci), d1, d2)


def random_system(rng: np.random.Generator) -> GaussianSystemParams:
    return GaussianSystemParams(
        complex(rng.uniform(0.3, 3.0), rng.uniform(-2.0, 2.0)),
        complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)),
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float
    note: str = ""


def _free_action(h: HamiltonianParams, e: propagator.KernelEndpoints) -> float:
    z1, z2, _, zm = e.z
    return (h.m1 * z1**2 + h.m2 * z2**2 + h.m3 * zm**2) / (2 * e.t)


def _free_prefactor(h: HamiltonianParams, t: float) -> complex:
    return complex(np.sqrt(1j * h.m1 * h.m2 * h.m3 / (8 * np.pi**3 * t**3)))


def check_free_limit(h, rng, trials, tol=1e-6) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        t = rng.uniform(0.1, 3.0)
        e = propagator.KernelEndpoints(rng.normal(size=3), rng.normal(size=3), t)
        for kappa in (0.0, 1e-8):
            hk = h.with_kappa(kappa)
            free = _free_action(hk, e)
            worst = max(worst, abs(propagator.classical_action(hk, e) - free)
                        / max(1.0, abs(free)))
        hf = h.with_kappa(0.0)
        ref = _free_prefactor(hf, t)
        worst = max(worst, abs(propagator.prefactor(hf, t) - ref) / abs(ref))
    return CheckResult("free limit (action, prefactor)", worst <= tol, worst, tol)


def check_composition(h, t, t1, rng, trials, tol=1e-8) -> CheckResult:
    """Kernel and prefactor composition, equality up to a global sign."""
    worst = 0.0
    signs = set()
    splits = [t1] + list(rng.uniform(0.05, 0.95, size=trials - 1) * t)
    for split in splits:
        Q, q = rng.normal(size=3), rng.normal(size=3)
        direct = propagator.kernel(h, propagator.KernelEndpoints(q, Q, t)).kernel
        composed = propagator.composed_kernel(h, Q, q, t, split)
        sign = 1 if abs(composed - direct) <= abs(composed + direct) else -1
        signs.add(sign)
        worst = max(worst, abs(composed - sign * direct) / abs(direct))
        f = propagator.prefactor(h, t)
        rhs = propagator.composition_prefactor(h, t, split)
        worst = max(worst, min(abs(rhs - f), abs(rhs + f)) / abs(f))
    note = "kernel sign " + "/".join(f"{s:+d}" for s in sorted(signs))
    return CheckResult("composition (kernel, prefactor)", worst <= tol, worst, tol, note)


def check_unit_jacobian(h, rng, trials, tol=1e-10) -> CheckResult:
    worst = 0.0
    for i in range(trials):
        hh = h if i == 0 else HamiltonianParams(*rng.uniform(0.2, 5.0, size=3),
                                                 10 ** rng.uniform(1, 4))
        if hh.kappa <= 0:
            continue
        worst = max(worst, abs(propagator.jacobian_unit_check(hh) - 1.0))
        J, Jinv = propagator.jacobian_matrix(hh), propagator.inverse_jacobian_matrix(hh)
        worst = max(worst, float(np.abs(Jinv @ J - np.eye(3)).max()))
    return CheckResult("unit jacobian", worst <= tol, worst, tol)


def check_kernel_vs_symplectic(h, t, rng, trials, tol=1e-8) -> CheckResult:
    worst = 0.0
    smap = symplectic_map(h, t)
    for _ in range(trials):
        probe, system = random_probe(rng), random_system(rng)
        via_kernel = propagator.kernel_evolve_gaussian(h, probe, system, t)
        via_map = propagate_moments(assemble_initial_state(probe, system), smap)
        scale = max(1.0, float(np.abs(via_map.cov).max()))
        diff = max(float(np.abs(via_kernel.cov - via_map.cov).max()),
                   float(np.abs(via_kernel.mean - via_map.mean).max()))
        worst = max(worst, diff / scale)
    return CheckResult("kernel-evolved moments vs symplectic map", worst <= tol, worst, tol)


def run_kernel_checks(h: HamiltonianParams, t: float, t1: float, *, seed: int = 0,
                      trials: int = 100) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_free_limit(h, rng, trials),
        check_composition(h, t, t1, rng, trials),
        check_unit_jacobian(h, rng, trials),
        check_kernel_vs_symplectic(h, t, rng, trials),
    ]
