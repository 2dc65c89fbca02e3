"""Closed-form Feynman kernel of the Arthurs-Kelly system.

The Lagrangian is quadratic, so ``K[Q:q:t] = F(t) exp(i S_cl)`` with the
classical action ``S_cl`` a real quadratic form in the endpoints. With
``z1 = Q1 - q1``, ``z2 = Q2 - q2``, ``z± = Q3 ± q3``,
``a(t) = 12 m3 + m1 kappa^2 t^2`` and ``b = m2 m3 kappa^2 - 1``::

    S_cl = [12 m1 m3 b z1^2 - m2 a z2^2 - m3 a z-^2 + 3 m1 m3 kappa^2 t^2 b z+^2
            - 12 m1 m3 kappa t b z1 z+ + 2 m2 m3 kappa a z2 z-] / (2 a b t)

    F(t) = sqrt(3 m1 m2 m3^2 / (2 pi^3 i b t^3 a(t)))

Square roots use the principal branch; overall signs of ``F`` are not
tracked (identities involving ``F`` hold up to a global sign).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import HamiltonianParams
from .errors import InvalidParameters, SingularConfiguration
from .gaussian import (
    GaussianProbeParams,
    GaussianSystemParams,
    PhaseSpaceMoments,
    gaussian_moments,
)

B_TOL = 1e-9

# (Q1, Q2, Q3, q1, q2, q3) -> (z1, z2, z+, z-)
_Z_MAP = np.array([
    [1, 0, 0, -1, 0, 0],
    [0, 1, 0, 0, -1, 0],
    [0, 0, 1, 0, 0, 1],
    [0, 0, 1, 0, 0, -1],
], dtype=float)


@dataclass(frozen=True)
class KernelEndpoints:
    q: tuple[float, float, float]
    Q: tuple[float, float, float]
    t: float

    def __post_init__(self):
        q = tuple(float(v) for v in self.q)
        Q = tuple(float(v) for v in self.Q)
        if len(q) != 3 or len(Q) != 3:
            raise InvalidParameters("endpoints need three coordinates each")
        if not self.t > 0:
            raise InvalidParameters("t must be positive")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "t", float(self.t))

    @property
    def z(self) -> tuple[float, float, float, float]:
        """``(z1, z2, z+, z-)``."""
        return tuple(_Z_MAP @ np.r_[self.Q, self.q])


@dataclass(frozen=True)
class KernelEvaluation:
    action: float
    prefactor: complex
    kernel: complex


def check_regular(h: HamiltonianParams, t: float) -> None:
    if not t > 0:
        raise SingularConfiguration(f"kernel needs t > 0, got {t}")
    if abs(h.b) < B_TOL:
        raise SingularConfiguration(
            f"b = m2 m3 kappa^2 - 1 = {h.b:.3g} vanishes; kernel formulas are singular"
        )
    if h.a(t) <= 0:
        raise SingularConfiguration("a(t) must be positive")


def classical_action(h: HamiltonianParams, e: KernelEndpoints) -> float:
    t = e.t
    check_regular(h, t)
    m1, m2, m3, k = h.m1, h.m2, h.m3, h.kappa
    a, b = h.a(t), h.b
    z1, z2, zp, zm = e.z
    numerator = (
        12 * m1 * m3 * b * z1**2
        - m2 * a * z2**2
        - m3 * a * zm**2
        + 3 * m1 * m3 * k**2 * t**2 * b * zp**2
        - 12 * m1 * m3 * k * t * b * z1 * zp
        + 2 * m2 * m3 * k * a * z2 * zm
    )
    return float(numerator / (2 * a * b * t))


def action_hessian(h: HamiltonianParams, t: float) -> np.ndarray:
    """Symmetric ``H`` with ``S_cl = v^T H v / 2`` for ``v = (Q1, Q2, Q3, q1, q2, q3)``."""
    check_regular(h, t)
    m1, m2, m3, k = h.m1, h.m2, h.m3, h.kappa
    a, b = h.a(t), h.b
    W = np.zeros((4, 4))
    W[0, 0] = 12 * m1 * m3 * b
    W[1, 1] = -m2 * a
    W[2, 2] = 3 * m1 * m3 * k**2 * t**2 * b
    W[3, 3] = -m3 * a
    W[0, 2] = W[2, 0] = -6 * m1 * m3 * k * t * b
    W[1, 3] = W[3, 1] = m2 * m3 * k * a
    return _Z_MAP.T @ W @ _Z_MAP / (a * b * t)


def prefactor(h: HamiltonianParams, t: float) -> complex:
    check_regular(h, t)
    value = 3 * h.m1 * h.m2 * h.m3**2 / (2 * np.pi**3 * 1j * h.b * t**3 * h.a(t))
    return complex(np.sqrt(complex(value)))


def van_vleck_prefactor(h: HamiltonianParams, t: float) -> complex:
    """``sqrt(det(-d2S/dQ dq) / (2 pi i)^3)`` from the action alone."""
    H = action_hessian(h, t)
    det = np.linalg.det(-H[:3, 3:])
    return complex(np.sqrt(complex(det / (2j * np.pi) ** 3)))


def kernel(h: HamiltonianParams, e: KernelEndpoints) -> KernelEvaluation:
    s = classical_action(h, e)
    f = prefactor(h, e.t)
    return KernelEvaluation(action=s, prefactor=f, kernel=f * np.exp(1j * s))


def composition_prefactor(h: HamiltonianParams, t: float, t1: float) -> complex:
    """Right-hand side of the prefactor composition identity, ``0 < t1 < t``."""
    if not 0 < t1 < t:
        raise InvalidParameters("need 0 < t1 < t")
    t2 = t - t1
    ratio = (2j * h.b * t1**3 * t2**3 * h.a(t1) * h.a(t2)
             / (3 * h.m1 * h.m2 * h.m3**2 * t**3 * h.a(t)))
    return complex(np.pi**1.5 * prefactor(h, t1) * prefactor(h, t2) * np.sqrt(ratio))


def composed_kernel(
    h: HamiltonianParams, Q, q, t: float, t1: float
) -> complex:
    """``∫ dx K[Q:x:t1] K[x:q:t-t1]`` evaluated as an exact Fresnel integral.

    The exponent is ``i (x^T P x / 2 + j^T x + c)`` with real symmetric ``P``;
    the integral is ``(2 pi)^{3/2} |det P|^{-1/2} exp(i pi sig(P) / 4)
    exp(i (c - j^T P^-1 j / 2))``.
    """
    if not 0 < t1 < t:
        raise InvalidParameters("need 0 < t1 < t")
    Q = np.asarray(Q, dtype=float)
    q = np.asarray(q, dtype=float)
    H1 = action_hessian(h, t1)       # (Q, x)
    H2 = action_hessian(h, t - t1)   # (x, q)
    P = H1[3:, 3:] + H2[:3, :3]
    j = H1[3:, :3] @ Q + H2[:3, 3:] @ q
    c = 0.5 * Q @ H1[:3, :3] @ Q + 0.5 * q @ H2[3:, 3:] @ q
    eig = np.linalg.eigvalsh(0.5 * (P + P.T))
    if np.min(np.abs(eig)) < 1e-12 * np.max(np.abs(eig)):
        raise SingularConfiguration("intermediate-time quadratic form is singular")
    signature = int(np.sum(np.sign(eig)))
    gauss = ((2 * np.pi) ** 1.5 / np.sqrt(np.prod(np.abs(eig)))
             * np.exp(1j * np.pi * signature / 4))
    phase = c - 0.5 * j @ np.linalg.solve(P, j)
    return complex(prefactor(h, t1) * prefactor(h, t - t1) * gauss * np.exp(1j * phase))


def kernel_evolve_gaussian(
    h: HamiltonianParams,
    probe: GaussianProbeParams,
    system: GaussianSystemParams,
    t: float,
) -> PhaseSpaceMoments:
    """Evolve ``psi(q1, q2) phi(q3)`` with the kernel and return its moments.

    The initial state is ``exp(-q^T M0 q / 2 + d0^T q)`` and the kernel exponent
    is ``i (x^T Hxx x / 2 + x^T Hxq q + q^T Hqq q / 2)``. Completing the square in
    ``q`` with ``P = M0 - i Hqq`` leaves a Gaussian in ``x`` with

    ``M = -i Hxx + Hxq P^-1 Hqx`` and ``d = i Hxq P^-1 d0``.
    """
    H = action_hessian(h, t)
    hxx, hxq, hqq = H[:3, :3], H[:3, 3:], H[3:, 3:]
    M0 = np.zeros((3, 3), dtype=complex)
    M0[:2, :2] = probe.exponent_matrix
    M0[2, 2] = system.A3
    d0 = np.array([probe.D1, probe.D2, system.D3], dtype=complex)
    P = M0 - 1j * hqq
    try:
        P_inv_hqx = np.linalg.solve(P, hxq.T)
        P_inv_d0 = np.linalg.solve(P, d0)
    except np.linalg.LinAlgError:
        raise SingularConfiguration("q-space quadratic form is not invertible") from None
    M = -1j * hxx + hxq @ P_inv_hqx
    d = 1j * hxq @ P_inv_d0
    return gaussian_moments(M, d)


def jacobian_matrix(h: HamiltonianParams) -> np.ndarray:
    """Large-kappa linear map ``(q1, q2, q3) -> (X, Y, Z)`` with ``a = m1 + 12 m3``."""
    m1, m3, k = h.m1, h.m3, h.kappa
    if k <= 0:
        raise InvalidParameters("jacobian map needs kappa > 0")
    a = m1 + 12 * m3
    return np.array([
        [1.0, 0.0, 0.5],
        [0.0, 1.0 / (m3 * k), -1.0],
        [6 * m1 * m3 * k / a, -1.0, 3 * m1 * m3 * k / a],
    ])


def inverse_jacobian_matrix(h: HamiltonianParams) -> np.ndarray:
    """Closed-form inverse ``(X, Y, Z) -> (q1, q2, q3)``."""
    m1, m3, k = h.m1, h.m3, h.kappa
    if k <= 0:
        raise InvalidParameters("jacobian map needs kappa > 0")
    a = m1 + 12 * m3
    return np.array([
        [1 - 3 * m1 / a, 0.5, 1 / (2 * m3 * k)],
        [6 * m1 * m3 * k / a, 0.0, -1.0],
        [6 * m1 / a, -1.0, -1 / (m3 * k)],
    ])


def jacobian_unit_check(h: HamiltonianParams) -> float:
    """``|det|`` of the change of variables; identically one."""
    return float(abs(np.linalg.det(jacobian_matrix(h))))
