"""Phase-space propagation under the Arthurs-Kelly Hamiltonian.

``H = sum_j p_j^2 / (2 m_j) + kappa (x3 p1 + p3 p2)``

Hamilton's equations are linear, ``r' = K r``, and the generator ``K`` is
nilpotent (``K^4 = 0``), so the exact propagator is the cubic polynomial
``I + tK + (tK)^2/2 + (tK)^3/6``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateState, InvalidParameters, NonConvergence
from .gaussian import PhaseSpaceMoments, symplectic_form

X1, X2, X3, P1, P2, P3 = range(6)
OMEGA = symplectic_form(3)


@dataclass(frozen=True)
class HamiltonianParams:
    """Masses and coupling. ``kappa = 0`` is allowed for the free limit."""

    m1: float = 1.0
    m2: float = 1.0
    m3: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("m1", "m2", "m3", "kappa"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise InvalidParameters(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if min(self.m1, self.m2, self.m3) <= 0:
            raise InvalidParameters("masses must be positive")
        if self.kappa < 0:
            raise InvalidParameters("kappa must be non-negative")

    @property
    def b(self) -> float:
        return self.m2 * self.m3 * self.kappa**2 - 1.0

    def a(self, t: float) -> float:
        return 12.0 * self.m3 + self.m1 * self.kappa**2 * t**2

    @property
    def measurement_time(self) -> float:
        if self.kappa <= 0:
            raise InvalidParameters("measurement time 1/kappa needs kappa > 0")
        return 1.0 / self.kappa

    def with_kappa(self, kappa: float) -> "HamiltonianParams":
        return HamiltonianParams(self.m1, self.m2, self.m3, kappa)


@dataclass(frozen=True, eq=False)
class SymplecticMap:
    matrix: np.ndarray
    time: float = field(default=0.0)

    def __post_init__(self):
        S = np.array(self.matrix, dtype=float)
        if S.shape != (6, 6):
            raise InvalidParameters("symplectic map must be 6x6")
        if self.time < 0:
            raise InvalidParameters("time must be non-negative")
        scale = max(1.0, float(np.abs(S).max()) ** 2)
        if symplectic_defect(S) > 1e-10 * scale:
            raise InvalidParameters("matrix is not symplectic")
        S.setflags(write=False)
        object.__setattr__(self, "matrix", S)
        object.__setattr__(self, "time", float(self.time))

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        return SymplecticMap(self.matrix @ other.matrix, self.time + other.time)


def symplectic_defect(S: np.ndarray) -> float:
    """Largest entry of ``|S^T Omega S - Omega|``."""
    return float(np.abs(S.T @ OMEGA @ S - OMEGA).max())


def drift_matrix(h: HamiltonianParams) -> np.ndarray:
    K = np.zeros((6, 6))
    K[X1, P1] = 1.0 / h.m1
    K[X1, X3] = h.kappa
    K[X2, P2] = 1.0 / h.m2
    K[X2, P3] = h.kappa
    K[X3, P3] = 1.0 / h.m3
    K[X3, P2] = h.kappa
    K[P3, P1] = -h.kappa
    return K


def symplectic_map(h: HamiltonianParams, t: float) -> SymplecticMap:
    if t < 0:
        raise InvalidParameters("time must be non-negative")
    tK = t * drift_matrix(h)
    tK2 = tK @ tK
    S = np.eye(6) + tK + tK2 / 2.0 + tK2 @ tK / 6.0
    return SymplecticMap(S, t)


def propagate_moments(state: PhaseSpaceMoments, smap: SymplecticMap) -> PhaseSpaceMoments:
    if state.n_modes != 3:
        raise InvalidParameters("propagation needs a three-mode state")
    S = smap.matrix
    cov = S @ state.cov @ S.T
    return PhaseSpaceMoments(mean=S @ state.mean, cov=0.5 * (cov + cov.T))


@dataclass(frozen=True)
class MeterMoments:
    """Meter position variances and means at the read-out time ``1/kappa``."""

    dx1sq: float
    dx2sq: float
    x1_mean: float
    x2_mean: float

    def as_array(self) -> np.ndarray:
        return np.array([self.dx1sq, self.dx2sq, self.x1_mean, self.x2_mean])


def asymptotic_map(state: PhaseSpaceMoments) -> MeterMoments:
    """Large-kappa meter moments at ``t = 1/kappa`` from the initial moments.

    ``x1 -> x1 + x3 + p2/2`` and ``x2 -> x2 + p3 - p1/2``; kinetic
    corrections of order ``1/(m kappa)`` are dropped. Probe and system are
    assumed uncorrelated, so only the probe cross terms alpha = cov(x1, p2)
    and beta = cov(x2, p1) survive.
    """
    if state.n_modes != 3:
        raise InvalidParameters("asymptotic map needs a three-mode state")
    c, m = state.cov, state.mean
    alpha = c[X1, P2]
    beta = c[X2, P1]
    dx1sq = c[X1, X1] + c[X3, X3] + c[P2, P2] / 4.0 + alpha
    dx2sq = c[X2, X2] + c[P3, P3] + c[P1, P1] / 4.0 - beta
    if dx1sq <= 0 or dx2sq <= 0:
        raise DegenerateState(
            f"asymptotic meter variances not positive: {dx1sq:.6g}, {dx2sq:.6g}"
        )
    return MeterMoments(
        dx1sq=float(dx1sq),
        dx2sq=float(dx2sq),
        x1_mean=float(m[X1] + m[X3] + m[P2] / 2.0),
        x2_mean=float(m[X2] + m[P3] - m[P1] / 2.0),
    )


def exact_meter_moments(state: PhaseSpaceMoments, h: HamiltonianParams) -> MeterMoments:
    """Meter moments from exact propagation to ``t = 1/kappa``."""
    out = propagate_moments(state, symplectic_map(h, h.measurement_time))
    return MeterMoments(
        dx1sq=float(out.cov[X1, X1]),
        dx2sq=float(out.cov[X2, X2]),
        x1_mean=float(out.mean[X1]),
        x2_mean=float(out.mean[X2]),
    )


@dataclass(frozen=True)
class ConvergenceReport:
    kappas: tuple[float, ...]
    errors: np.ndarray          # (n_kappa, 4): |exact - asymptotic| per output
    max_errors: np.ndarray
    ratios: np.ndarray          # max_errors[i] / max_errors[i + 1]
    observed_orders: np.ndarray  # log(ratio) / log(kappa[i+1] / kappa[i])

    @property
    def first_order(self) -> bool:
        """Every ratio within a factor 2 of the 1/kappa prediction."""
        expected = np.array(self.kappas[1:]) / np.array(self.kappas[:-1])
        r = self.ratios / expected
        return bool(np.all((r >= 0.5) & (r <= 2.0)))

    def to_dict(self) -> dict:
        return {
            "kappas": list(self.kappas),
            "errors": self.errors.tolist(),
            "max_errors": self.max_errors.tolist(),
            "ratios": self.ratios.tolist(),
            "observed_orders": self.observed_orders.tolist(),
            "first_order": self.first_order,
        }


def convergence_check(
    state: PhaseSpaceMoments,
    kappas: Sequence[float],
    masses: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> ConvergenceReport:
    """Compare exact propagation at ``t = 1/kappa`` with :func:`asymptotic_map`.

    The generic discrepancy is O(1/kappa). It falls faster when the initial
    state has no x1-p1, x3-p3, p1-p2 or x2-p2 correlations (e.g. real
    minimal-uncertainty Gaussians), since those carry the 1/kappa terms.
    Raises :class:`NonConvergence` when the error fails to decrease.
    """
    kappas = tuple(float(k) for k in kappas)
    if len(kappas) < 2:
        raise InvalidParameters("need at least two kappa values")
    if any(k <= 0 for k in kappas) or any(b <= a for a, b in zip(kappas, kappas[1:])):
        raise InvalidParameters("kappa values must be positive and strictly increasing")
    target = asymptotic_map(state).as_array()
    errors = np.array([
        np.abs(exact_meter_moments(state, HamiltonianParams(*masses, k)).as_array() - target)
        for k in kappas
    ])
    max_errors = errors.max(axis=1)
    if np.any(max_errors[1:] >= max_errors[:-1]):
        raise NonConvergence(f"errors do not decrease with kappa: {max_errors.tolist()}")
    ratios = max_errors[:-1] / max_errors[1:]
    orders = np.log(ratios) / np.log(np.array(kappas[1:]) / np.array(kappas[:-1]))
    return ConvergenceReport(kappas, errors, max_errors, ratios, orders)
