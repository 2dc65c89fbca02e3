"""Generalized Arthurs-Kelly bound, correlated-probe product and violation scans."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .dynamics import asymptotic_map
from .errors import InvalidParameters
from .gaussian import (
    GaussianProbeParams,
    GaussianSystemParams,
    PhaseSpaceMoments,
    assemble_initial_state,
    probe_moments,
    system_moments,
)

BOUNDARY_RTOL = 1e-9


def _positive(**values: float) -> None:
    for name, v in values.items():
        if not (v > 0 and math.isfinite(v)):
            raise InvalidParameters(f"{name} must be positive and finite, got {v!r}")


def gamma_bound(K1: float, K2: float, K3: float) -> float:
    """``sqrt(K1)/2 + sqrt(K2)/2 + sqrt(K3)`` with ``K_j = dx_j^2 dp_j^2``."""
    _positive(K1=K1, K2=K2, K3=K3)
    return 0.5 * math.sqrt(K1) + 0.5 * math.sqrt(K2) + math.sqrt(K3)


def separable_product(K1: float, K2: float, K3: float, x: float, y: float) -> float:
    """Squared meter product for a separable probe as a function of
    ``x = dp1^2 dp2^2`` and ``y = dp2^2 dp3^2``."""
    return (0.25 * (K1 + K2) + K3 + K1 * K2 / x + K2 * K3 / y + K1 * y / x
            + 0.25 * K3 * x / y + x / 16 + y / 4)


def stationarity_residuals(K1: float, K2: float, K3: float, x: float, y: float
                           ) -> tuple[float, float]:
    """Partial derivatives of :func:`separable_product` in ``x`` and ``y``."""
    dx = -K1 * K2 / x**2 - K1 * y / x**2 + 0.25 * K3 / y + 1 / 16
    dy = -K2 * K3 / y**2 + K1 / x - 0.25 * K3 * x / y**2 + 0.25
    return dx, dy


def minimized_product(K1: float, K2: float, K3: float) -> tuple[float, float, float]:
    """Minimum of :func:`separable_product` and its location ``(x, y)``."""
    _positive(K1=K1, K2=K2, K3=K3)
    x = 4 * math.sqrt(K1 * K2)
    y = 2 * math.sqrt(K2 * K3)
    return separable_product(K1, K2, K3, x, y), x, y


def correlated_product(K1, K2, K3, x, y, z, alpha, beta) -> float:
    """Squared meter product with probe correlations, given
    ``x = dp1^2 dp2^2``, ``y = dp2^2 dp3^2``, ``z = dp3^2 dp1^2``.

    Diagnostic only: this expression has no useful lower bound in ``z``.
    """
    _positive(x=x, y=y, z=z)
    return (separable_product(K1, K2, K3, x, y) - alpha * beta
            + alpha * (K2 * math.sqrt(z / (x * y)) + math.sqrt(y * z / x)
                       + 0.25 * math.sqrt(x * z / y))
            - beta * (K1 * math.sqrt(y / (x * z)) + K3 * math.sqrt(x / (y * z))
                      + 0.25 * math.sqrt(x * y / z)))


def meter_product(state: PhaseSpaceMoments) -> float:
    """``dx1(1/kappa) dx2(1/kappa)`` in the large-coupling limit."""
    m = asymptotic_map(state)
    return math.sqrt(m.dx1sq * m.dx2sq)


# -- constrained correlated probe family --------------------------------------

def _check_family(A_R: float, B_R: float, C_R: float) -> None:
    if not (A_R > 0 and B_R > 0):
        raise InvalidParameters("A_R and B_R must be positive")
    if A_R * B_R - C_R**2 <= 0:
        raise InvalidParameters("A_R B_R - C_R^2 must be positive")


def constrained_probe(A_R: float, B_R: float, C_R: float, C_I: float) -> GaussianProbeParams:
    """Probe with ``A_I = C_R C_I / B_R`` and ``B_I = C_R C_I / A_R``."""
    _check_family(A_R, B_R, C_R)
    return GaussianProbeParams(
        A=complex(A_R, C_R * C_I / B_R),
        B=complex(B_R, C_R * C_I / A_R),
        C=complex(C_R, C_I),
    )


def gamma_example(A_R: float, B_R: float, C_R: float, C_I: float) -> float:
    """Separable-case bound for the constrained family with a minimal system."""
    _check_family(A_R, B_R, C_R)
    return 0.5 * (1 + math.sqrt((A_R * B_R + C_I**2) / (A_R * B_R - C_R**2)))


def gamma_c(A_R: float, B_R: float, C_R: float, C_I: float) -> float:
    """Meter product of the constrained probe, via moment propagation."""
    state = assemble_initial_state(constrained_probe(A_R, B_R, C_R, C_I),
                                   GaussianSystemParams())
    return meter_product(state)


def gamma_c_closed_form(A_R: float, B_R: float, C_R: float, C_I: float) -> float:
    _check_family(A_R, B_R, C_R)
    det = A_R * B_R - C_R**2
    f1 = 4 * A_R * B_R + det * (A_R * B_R + 4 * A_R + C_I**2 + 4 * C_I)
    f2 = 4 * A_R * B_R + det * (A_R * B_R + 4 * B_R + C_I**2 - 4 * C_I)
    return math.sqrt(f1 * f2) / (8 * math.sqrt(A_R * B_R) * det)


# -- reports ------------------------------------------------------------------

@dataclass(frozen=True)
class UncertaintyReport:
    dx1sq_T: float
    dx2sq_T: float
    K1: float
    K2: float
    K3: float
    alpha: float
    beta: float
    Gamma: float
    Gamma_C: float
    violates_generalized: bool
    violates_original: bool

    def to_dict(self) -> dict:
        return asdict(self)


def uncertainty_report(probe: GaussianProbeParams,
                       system: GaussianSystemParams) -> UncertaintyReport:
    pm = probe_moments(probe)
    sm = system_moments(system)
    K1, K2, K3 = pm.dx1sq * pm.dp1sq, pm.dx2sq * pm.dp2sq, sm.dx3sq * sm.dp3sq
    meters = asymptotic_map(assemble_initial_state(probe, system))
    g = gamma_bound(K1, K2, K3)
    gc = math.sqrt(meters.dx1sq * meters.dx2sq)
    return UncertaintyReport(
        dx1sq_T=meters.dx1sq, dx2sq_T=meters.dx2sq,
        K1=K1, K2=K2, K3=K3, alpha=pm.alpha, beta=pm.beta,
        Gamma=g, Gamma_C=gc,
        violates_generalized=gc <= g, violates_original=gc < 1.0,
    )


# -- scans --------------------------------------------------------------------

@dataclass(frozen=True)
class ScanGrid:
    B_R: float = 1.0
    C_R: float = 1.0
    ar_min: float = 1.05
    ar_max: float = 10.0
    ar_steps: int = 200
    ci_min: float = -10.0
    ci_max: float = 10.0
    ci_steps: int = 200

    def __post_init__(self):
        for name in ("B_R", "C_R", "ar_min", "ar_max", "ci_min", "ci_max"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameters(f"{name} must be finite")
        if self.ar_steps < 2 or self.ci_steps < 2:
            raise InvalidParameters("grid needs at least 2 steps per axis")
        if self.ar_max <= self.ar_min or self.ci_max <= self.ci_min:
            raise InvalidParameters("grid ranges must be increasing")
        if self.B_R <= 0:
            raise InvalidParameters("B_R must be positive")

    def a_r_values(self) -> np.ndarray:
        return np.linspace(self.ar_min, self.ar_max, self.ar_steps)

    def c_i_values(self) -> np.ndarray:
        return np.linspace(self.ci_min, self.ci_max, self.ci_steps)


@dataclass(frozen=True)
class ScanRow:
    a_r: float
    c_i: float
    valid: bool
    gamma: float
    gamma_c: float
    violates_generalized: bool
    violates_original: bool
    boundary: bool
    alpha: float
    beta: float


def _scan_point(grid: ScanGrid, a_r: float, c_i: float) -> ScanRow:
    a_r, c_i = float(a_r), float(c_i)
    if a_r <= 0 or a_r * grid.B_R - grid.C_R**2 <= 0:
        nan = float("nan")
        return ScanRow(a_r, c_i, False, nan, nan, False, False, False, nan, nan)
    probe = constrained_probe(a_r, grid.B_R, grid.C_R, c_i)
    g = gamma_example(a_r, grid.B_R, grid.C_R, c_i)
    gc = meter_product(assemble_initial_state(probe, GaussianSystemParams()))
    pm = probe_moments(probe)
    return ScanRow(
        a_r, c_i, True, g, gc,
        violates_generalized=gc <= g,
        violates_original=gc < 1.0,
        boundary=abs(gc - g) <= BOUNDARY_RTOL * g,
        alpha=pm.alpha, beta=pm.beta,
    )


def _scan_block(grid: ScanGrid, a_r: float) -> list[ScanRow]:
    return [_scan_point(grid, a_r, c_i) for c_i in grid.c_i_values()]


def violation_scan(grid: ScanGrid, threads: int = 1) -> list[ScanRow]:
    """Evaluate every grid point; rows ordered A_R-major, C_I-minor."""
    if threads < 1:
        raise InvalidParameters("threads must be >= 1")
    a_values = grid.a_r_values()
    if threads == 1:
        blocks = [_scan_block(grid, a) for a in a_values]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(lambda a: _scan_block(grid, a), a_values))
    return [row for block in blocks for row in block]


@dataclass(frozen=True)
class ScanSummary:
    points: int
    valid: int
    violations: int
    original_violations: int
    boundary: int
    min_gamma_c: float
    alpha_negative: int
    beta_negative: int


def summarize(rows: list[ScanRow]) -> ScanSummary:
    valid = [r for r in rows if r.valid]
    return ScanSummary(
        points=len(rows),
        valid=len(valid),
        violations=sum(r.violates_generalized for r in valid),
        original_violations=sum(r.violates_original for r in valid),
        boundary=sum(r.boundary for r in valid),
        min_gamma_c=min((r.gamma_c for r in valid), default=float("nan")),
        alpha_negative=sum(r.alpha < 0 for r in valid),
        beta_negative=sum(r.beta < 0 for r in valid),
    )
