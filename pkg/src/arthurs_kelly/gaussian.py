"""Gaussian probe/system states and their phase-space moments.

Conventions used throughout the package:

* hbar = 1.
* Phase-space ordering is ``(x1, ..., xn, p1, ..., pn)``; for the full
  Arthurs-Kelly setup that is ``(x1, x2, x3, p1, p2, p3)``.
* Mixed position/momentum covariances are symmetrized,
  ``<{r_i, r_j}>/2 - <r_i><r_j>``, so covariance matrices are real.

A pure Gaussian wavefunction is written as
``psi(x) ∝ exp(-x^T M x / 2 + d^T x)`` with complex symmetric ``M`` and
complex ``d``. The two-mode probe ``exp(-A x1^2/2 - B x2^2/2 + C x1 x2 +
D1 x1 + D2 x2)`` has ``M = [[A, -C], [-C, B]]`` and ``d = (D1, D2)``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import InvalidParameters, NonConvergence

PHYSICALITY_TOL = 1e-10


def symplectic_form(n_modes: int) -> np.ndarray:
    """Canonical form ``[[0, I], [-I, 0]]`` for the (x..., p...) ordering."""
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


def physicality_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Eigenvalues of the Hermitian matrix ``cov + i*Omega/2`` (ascending)."""
    cov = np.asarray(cov, dtype=float)
    omega = symplectic_form(cov.shape[0] // 2)
    return np.linalg.eigvalsh(cov + 0.5j * omega)


@dataclass(frozen=True)
class GaussianProbeParams:
    """Complex parameters of the two-mode probe wavefunction."""

    A: complex
    B: complex
    C: complex = 0j
    D1: complex = 0j
    D2: complex = 0j

    def __post_init__(self):
        for name in ("A", "B", "C", "D1", "D2"):
            value = complex(getattr(self, name))
            if not np.isfinite(value.real) or not np.isfinite(value.imag):
                raise InvalidParameters(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.A.real <= 0 or self.B.real <= 0:
            raise InvalidParameters("Re(A) and Re(B) must be positive")
        if self.A.real * self.B.real - self.C.real**2 <= 0:
            raise InvalidParameters(
                "probe is not normalizable: Re(A)Re(B) - Re(C)^2 must be positive"
            )

    @property
    def exponent_matrix(self) -> np.ndarray:
        return np.array([[self.A, -self.C], [-self.C, self.B]], dtype=complex)

    @property
    def linear_term(self) -> np.ndarray:
        return np.array([self.D1, self.D2], dtype=complex)


@dataclass(frozen=True)
class GaussianSystemParams:
    """One-mode system state ``psi(x3) ∝ exp(-A3 x3^2/2 + D3 x3)``."""

    A3: complex = 1 + 0j
    D3: complex = 0j

    def __post_init__(self):
        for name in ("A3", "D3"):
            value = complex(getattr(self, name))
            if not np.isfinite(value.real) or not np.isfinite(value.imag):
                raise InvalidParameters(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.A3.real <= 0:
            raise InvalidParameters("Re(A3) must be positive")


@dataclass(frozen=True, eq=False)
class PhaseSpaceMoments:
    """Mean vector and symmetrized covariance in (x..., p...) ordering."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        n = mean.shape[0]
        if mean.ndim != 1 or n % 2:
            raise InvalidParameters("mean must be a vector of even length")
        if cov.shape != (n, n):
            raise InvalidParameters(f"cov must be {n}x{n}, got {cov.shape}")
        if np.abs(cov - cov.T).max() > 1e-12 * max(1.0, np.abs(cov).max()):
            raise InvalidParameters("cov must be symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.any(np.diag(cov) <= 0):
            raise InvalidParameters("diagonal variances must be positive")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.shape[0] // 2

    @property
    def labels(self) -> list[str]:
        n = self.n_modes
        return [f"x{j}" for j in range(1, n + 1)] + [f"p{j}" for j in range(1, n + 1)]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown phase-space label {label!r}") from None

    def variance(self, label: str) -> float:
        i = self.index(label)
        return float(self.cov[i, i])

    def covariance(self, first: str, second: str) -> float:
        return float(self.cov[self.index(first), self.index(second)])

    def expectation(self, label: str) -> float:
        return float(self.mean[self.index(label)])

    def physicality_eigenvalues(self) -> np.ndarray:
        return physicality_eigenvalues(self.cov)

    def is_physical(self, tol: float = PHYSICALITY_TOL) -> bool:
        return bool(self.physicality_eigenvalues()[0] >= -tol)

    def to_dict(self) -> dict:
        return {
            "labels": self.labels,
            "mean": [float(v) for v in self.mean],
            "cov": [[float(v) for v in row] for row in self.cov],
        }


@dataclass(frozen=True)
class ProbeMomentSummary:
    dx1sq: float
    dx2sq: float
    dp1sq: float
    dp2sq: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class SystemMoments:
    dx3sq: float
    dp3sq: float
    x3_mean: float
    p3_mean: float
    cov_xp: float


def probe_moments(params: GaussianProbeParams) -> ProbeMomentSummary:
    """Closed-form probe variances and the cross-correlations alpha, beta.

    Only the real/imaginary parts of A, B, C enter; the linear terms D1, D2
    shift means but leave every second moment unchanged.
    """
    ar, ai = params.A.real, params.A.imag
    br, bi = params.B.real, params.B.imag
    cr, ci = params.C.real, params.C.imag
    det = ar * br - cr**2
    return ProbeMomentSummary(
        dx1sq=0.5 * br / det,
        dx2sq=0.5 * ar / det,
        dp1sq=0.5 * ar + (ar * ci**2 + ai**2 * br - 2 * ai * cr * ci) / (2 * det),
        dp2sq=0.5 * br + (ar * bi**2 + br * ci**2 - 2 * bi * cr * ci) / (2 * det),
        alpha=(br * ci - bi * cr) / (2 * det),
        beta=(ar * ci - ai * cr) / (2 * det),
    )


def gaussian_moments(M: np.ndarray, d: np.ndarray) -> PhaseSpaceMoments:
    """Moments of ``psi ∝ exp(-x^T M x / 2 + d^T x)`` for any number of modes.

    With ``M = Mr + i Mi`` and ``Mr`` positive definite:

    * position covariance ``Mr^-1 / 2``, mean ``Mr^-1 Re(d)``
    * symmetrized x-p block ``-Mr^-1 Mi / 2``
    * momentum covariance ``(Mr + Mi Mr^-1 Mi) / 2``, mean ``Im(d) - Mi <x>``
    """
    M = np.asarray(M, dtype=complex)
    d = np.asarray(d, dtype=complex)
    M = 0.5 * (M + M.T)
    mr, mi = M.real, M.imag
    try:
        np.linalg.cholesky(mr)
    except np.linalg.LinAlgError:
        raise InvalidParameters("Re(M) must be positive definite") from None
    mr_inv = np.linalg.inv(mr)
    mr_inv = 0.5 * (mr_inv + mr_inv.T)
    x_mean = mr_inv @ d.real
    p_mean = d.imag - mi @ x_mean
    n = mr.shape[0]
    cov = np.empty((2 * n, 2 * n))
    cov[:n, :n] = 0.5 * mr_inv
    cov[:n, n:] = -0.5 * mr_inv @ mi
    cov[n:, :n] = cov[:n, n:].T
    cov[n:, n:] = 0.5 * (mr + mi @ mr_inv @ mi)
    return PhaseSpaceMoments(mean=np.concatenate([x_mean, p_mean]), cov=cov)


def full_probe_moments(params: GaussianProbeParams) -> PhaseSpaceMoments:
    """All first and second moments of the probe, ordering (x1, x2, p1, p2)."""
    return gaussian_moments(params.exponent_matrix, params.linear_term)


@functools.lru_cache(maxsize=1024)
def system_moments(params: GaussianSystemParams) -> SystemMoments:
    m = gaussian_moments(np.array([[params.A3]]), np.array([params.D3]))
    return SystemMoments(
        dx3sq=float(m.cov[0, 0]),
        dp3sq=float(m.cov[1, 1]),
        x3_mean=float(m.mean[0]),
        p3_mean=float(m.mean[1]),
        cov_xp=float(m.cov[0, 1]),
    )


def assemble_initial_state(
    probe: GaussianProbeParams, system: GaussianSystemParams
) -> PhaseSpaceMoments:
    """Product state ``psi(x1, x2) phi(x3)`` in (x1, x2, x3, p1, p2, p3) order."""
    pm = full_probe_moments(probe)
    sm = system_moments(system)
    probe_idx = [0, 1, 3, 4]
    mean = np.zeros(6)
    cov = np.zeros((6, 6))
    mean[probe_idx] = pm.mean
    cov[np.ix_(probe_idx, probe_idx)] = pm.cov
    mean[2], mean[5] = sm.x3_mean, sm.p3_mean
    cov[2, 2], cov[5, 5] = sm.dx3sq, sm.dp3sq
    cov[2, 5] = cov[5, 2] = sm.cov_xp
    return PhaseSpaceMoments(mean=mean, cov=cov)


# -- quadrature oracle -------------------------------------------------------

_ALIASES = {"alpha": ("x1", "p2"), "beta": ("x2", "p1")}
_OPERATORS = ("x1", "x2", "p1", "p2")


def _parse_descriptor(which) -> tuple[str, ...]:
    if isinstance(which, str):
        if which in _ALIASES:
            return _ALIASES[which]
        ops = tuple(which.replace(",", " ").split())
    else:
        ops = tuple(which)
    if not 1 <= len(ops) <= 2 or any(op not in _OPERATORS for op in ops):
        raise ValueError(
            f"moment descriptor must name one or two of {_OPERATORS}, got {which!r}"
        )
    return ops


@functools.lru_cache(maxsize=256)
def _oracle_table(
    params: GaussianProbeParams, sigmas: float, max_subdivisions: int
) -> tuple[np.ndarray, np.ndarray, float]:
    """Normalized means and symmetrized covariance of (x1, x2, p1, p2) by quadrature.

    Returns ``(mean, cov, error_estimate)``.
    """
    A, B, C, D1, D2 = params.A, params.B, params.C, params.D1, params.D2

    # integration box from the |psi|^2 exponent: peak +- sigmas marginal widths
    mr = np.array([[A.real, -C.real], [-C.real, B.real]])
    mr_inv = np.linalg.inv(mr)
    centre = mr_inv @ np.array([D1.real, D2.real])
    half = sigmas * np.sqrt(0.5 * np.diag(mr_inv))

    def exponent(x1, x2):
        return -0.5 * A * x1 * x1 - 0.5 * B * x2 * x2 + C * x1 * x2 + D1 * x1 + D2 * x2

    e0 = exponent(*centre).real
    pairs = [(i, j) for i in range(4) for j in range(i, 4)]

    def local(x1, x2):
        # x acts multiplicatively; -i d/dx psi = -i (dE/dx) psi
        return (
            x1,
            x2,
            -1j * (-A * x1 + C * x2 + D1),
            -1j * (-B * x2 + C * x1 + D2),
        )

    # reference values at the density peak; cov = <(a-ca)(b-cb)> - (mu_a-ca)(mu_b-cb)
    # holds for any reference, and centring keeps the integrands small
    ref = [complex(v) for v in local(*centre)]

    def integrand(x1, x2):
        rho = np.exp(2.0 * (exponent(x1, x2).real - e0))
        shifted = [v - r for v, r in zip(local(x1, x2), ref)]
        out = [rho]
        out.extend(rho * np.real(v) for v in shifted)
        # Re(conj(a) b) is the symmetrized product for both x and -i d/dx
        out.extend(rho * (np.conj(shifted[i]) * shifted[j]).real for i, j in pairs)
        return np.array(out)

    inner_fail = [False]
    opts = dict(epsabs=1e-13, epsrel=1e-12, norm="max", limit=max_subdivisions,
                full_output=True)

    def inner(x1):
        value, err, info = integrate.quad_vec(
            lambda x2: integrand(x1, x2), centre[1] - half[1], centre[1] + half[1], **opts
        )
        inner_fail[0] |= info.status != 0
        # carry the inner error estimate along so the outer rule integrates it
        return np.append(value, err)

    raw, err, info = integrate.quad_vec(
        inner, centre[0] - half[0], centre[0] + half[0], **opts
    )
    if info.status != 0 or inner_fail[0]:
        raise NonConvergence(
            f"adaptive quadrature hit the subdivision limit ({max_subdivisions})"
        )
    err += raw[-1]
    raw = raw[:-1]
    norm = raw[0]
    offset = raw[1:5] / norm
    mean = offset + np.array([r.real for r in ref])
    cov = np.empty((4, 4))
    for k, (i, j) in enumerate(pairs):
        cov[i, j] = cov[j, i] = raw[5 + k] / norm - offset[i] * offset[j]
    # first-order propagation through the ratio and the offset products
    mu = float(np.abs(offset).max())
    scale = 1.0 + float(np.abs(raw[1:]).max() / norm) + 2.0 * mu * (1.0 + mu)
    return mean, cov, float(err / norm * scale)


def moment_oracle(
    params: GaussianProbeParams,
    which: str | Sequence[str],
    *,
    tol: float = 1e-8,
    sigmas: float = 12.0,
    max_subdivisions: int = 2000,
) -> float:
    """Brute-force moment of the probe by adaptive 2D quadrature.

    ``which`` names a mean (``"p2"``) or a symmetrized central second moment
    (``"x1 p2"``, ``("p1", "p1")``); ``"alpha"`` and ``"beta"`` are aliases for
    ``"x1 p2"`` and ``"x2 p1"``. Momenta act as ``-i d/dx`` on the explicit
    wavefunction and the state is normalized numerically, so neither the
    closed-form moments nor the normalization constant are used.
    """
    ops = _parse_descriptor(which)
    mean, cov, err = _oracle_table(params, float(sigmas), int(max_subdivisions))
    if err > tol:
        raise NonConvergence(
            f"quadrature error estimate {err:.3g} exceeds requested accuracy {tol:.3g}"
        )
    idx = [_OPERATORS.index(op) for op in ops]
    if len(idx) == 1:
        return float(mean[idx[0]])
    return float(cov[idx[0], idx[1]])


def oracle_moments(params: GaussianProbeParams, **kwargs) -> PhaseSpaceMoments:
    """Every probe moment from :func:`moment_oracle`, ordering (x1, x2, p1, p2)."""
    mean = [moment_oracle(params, op, **kwargs) for op in _OPERATORS]
    cov = [[moment_oracle(params, (a, b), **kwargs) for b in _OPERATORS] for a in _OPERATORS]
    return PhaseSpaceMoments(mean=mean, cov=cov)
