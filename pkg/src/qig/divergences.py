"""Quasi-entropies as contrast functionals and the metrics they induce.

``S_F(D1, D2) = Tr D1^{1/2} F(Delta) D1^{1/2}`` with the relative modular
operator ``Delta = L_{D2} R_{D1}^{-1}``. On the matrix units ``|u_i><v_j|``
built from the eigenvectors of ``D2`` and ``D1``, ``Delta`` acts by
``mu_i / lam_j``, so the functional is a double spectral sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import DensityMatrix, DimensionError, QigError, as_array, as_density
from .metric import MetricContext, fisher_info
from .monotone import beta_function

HESSIAN_H = 1e-4


@dataclass(frozen=True)
class ContrastKernel:
    """Kernel ``F`` of a quasi-entropy.

    ``family="alpha"`` uses ``F(t) = 4/(1 - alpha^2) (1 - t^((1+alpha)/2))``;
    ``family="custom"`` wraps a user callable, flagged as unverified since
    operator convexity is not checked.
    """

    family: str
    alpha: float | None = None
    func: Callable | None = None

    def __post_init__(self):
        if self.family == "alpha":
            _check_alpha(self.alpha)
        elif self.family == "custom":
            if self.func is None:
                raise QigError("custom kernel needs a callable")
            if abs(float(self.func(1.0))) > 1e-12:
                raise QigError("kernel must satisfy F(1) = 0")
        else:
            raise QigError(f"unknown kernel family {self.family!r}")

    @property
    def verified_convex(self) -> bool:
        return self.family == "alpha"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "custom":
            return self.func(t)
        a = (1 + self.alpha) / 2
        # 1 - t^a = -expm1(a log t), accurate near t = 1
        return -np.expm1(a * np.log(t)) / (a * (1 - a))


def alpha_kernel(alpha: float) -> ContrastKernel:
    return ContrastKernel("alpha", float(alpha))


def _check_alpha(alpha) -> float:
    if alpha is None or not -1.0 < float(alpha) < 1.0:
        raise QigError(f"alpha must lie in (-1, 1), got {alpha!r}")
    return float(alpha)


def _pair_states(D1, D2) -> tuple[DensityMatrix, DensityMatrix]:
    D1, D2 = as_density(D1), as_density(D2)
    if D1.dim != D2.dim:
        raise DimensionError(f"states have different dimensions {D1.dim} and {D2.dim}")
    return D1, D2


def quasi_entropy(D1, D2, kernel: ContrastKernel) -> float:
    """``sum_ij F(mu_i / lam_j) lam_j |<u_i|v_j>|^2`` with ``D1 = sum lam_j |v_j><v_j|``, ``D2 = sum mu_i |u_i><u_i|``."""
    D1, D2 = _pair_states(D1, D2)
    lam, V = D1.eigenvalues, D1.eigenvectors
    mu, U = D2.eigenvalues, D2.eigenvectors
    overlap = np.abs(U.conj().T @ V) ** 2
    ratio = mu[:, None] / lam[None, :]
    return float(np.sum(kernel(ratio) * lam[None, :] * overlap))


def alpha_entropy(D1, D2, alpha: float) -> float:
    """``4/(1 - alpha^2) Tr (I - D2^a D1^-a) D1`` with ``a = (1 + alpha)/2``.

    The operator inside the trace is not Hermitian; its trace is real up to
    roundoff and the imaginary part is checked rather than discarded.
    """
    alpha = _check_alpha(alpha)
    D1, D2 = _pair_states(D1, D2)
    a = (1 + alpha) / 2
    n = D1.dim
    T = np.trace((np.eye(n) - D2.power(a) @ D1.power(-a)) @ D1.data)
    if abs(T.imag) > 1e-10 * max(1.0, abs(T.real)):
        raise QigError(f"alpha-entropy trace has imaginary part {T.imag:.3e}")
    return float(4.0 / (1 - alpha * alpha) * T.real)


def _alpha_entropy_cancelled(D1, D2, alpha: float) -> float:
    # same quantity as alpha_entropy, written as c (1 - Tr D2^a D1^(1-a)); used in finite differences
    a = (1 + alpha) / 2
    D1, D2 = _pair_states(D1, D2)
    return float((1.0 - np.real(np.trace(D2.power(a) @ D1.power(1 - a)))) / (a * (1 - a)))


def hessian_recovery(D, A, B, alpha: float, h: float = HESSIAN_H, min_h: float = 1e-7) -> float:
    """Metric recovered from ``S_alpha`` by a mixed central difference.

    Returns ``-d^2/dt du S_alpha(D + tA, D + uB)`` at ``t = u = 0``: the
    divergence vanishes on the diagonal, so its mixed derivative is minus the
    induced metric, which is the Fisher information of ``f_beta`` with
    ``beta = (1 - alpha)/2``. The step is halved if the stencil leaves the
    positive cone.
    """
    alpha = _check_alpha(alpha)
    D = as_array(D)
    A, B = as_array(A), as_array(B)
    while h >= min_h:
        try:
            s = lambda t, u: _alpha_entropy_cancelled(D + t * A, D + u * B, alpha)
            mixed = (s(h, h) - s(h, -h) - s(-h, h) + s(-h, -h)) / (4 * h * h)
            return -mixed
        except QigError:
            h /= 2
    raise QigError("stencil leaves the positive cone even at the smallest step")


def metric_from_alpha(D, A, B, alpha: float) -> float:
    """Spectral value ``gamma_D(A, B)`` under ``f_beta``, ``beta = (1 - alpha)/2``."""
    beta = (1 - _check_alpha(alpha)) / 2
    return fisher_info(MetricContext.build(D, beta_function(beta)), A, B)


def ruskai_bridge(kernel: ContrastKernel, t, series_cutoff: float = 1e-4):
    """Monotone function from a quasi-entropy kernel: ``1/f(t) = (F(t) + t F(1/t)) / (t - 1)^2``.

    Near ``t = 1`` the quotient is 0/0; for the alpha family the numerator
    factors as ``(1 - t^a)(1 - t^(1-a)) / (a(1-a))`` which is evaluated with
    ``expm1`` instead. Custom kernels fall back to the raw quotient with a
    normalized value at ``t = 1``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise QigError("bridge needs t > 0")
    s = np.log(t)
    if kernel.family == "alpha":
        a = (1 + kernel.alpha) / 2
        safe = np.where(s == 0, 1.0, s)
        num = np.expm1(a * safe) * np.expm1((1 - a) * safe) / (a * (1 - a))
        inv_f = num / np.expm1(safe) ** 2
        return np.where(s == 0, 1.0, 1.0 / inv_f)
    near = np.abs(t - 1) < series_cutoff
    safe_t = np.where(near, 2.0, t)
    inv_f = (kernel(safe_t) + safe_t * kernel(1 / safe_t)) / (safe_t - 1) ** 2
    return np.where(near, 1.0, 1.0 / inv_f)


@dataclass(frozen=True)
class WYDCheck:
    metric_side: float
    commutator_side: float

    @property
    def error(self) -> float:
        return abs(self.metric_side - self.commutator_side)


def wyd_skew_check(D, B, beta: float) -> WYDCheck:
    """Fisher information of ``f_beta`` at ``A = i[D, B]`` versus the skew-information trace.

    With ``f_beta(1) = 1`` the identity reads
    ``F_D(i[D, B]) = -1/(beta(1 - beta)) Tr [D^beta, B][D^(1-beta), B]``.
    """
    if not 0.0 < beta < 1.0:
        raise QigError(f"beta must lie in (0, 1), got {beta}")
    D = as_density(D)
    B = as_array(B)
    A = 1j * (D.data @ B - B @ D.data)
    metric_side = fisher_info(MetricContext(D, beta_function(beta)), A)
    P, Q = D.power(beta), D.power(1 - beta)
    tr = np.trace((P @ B - B @ P) @ (Q @ B - B @ Q)).real
    return WYDCheck(metric_side, float(-tr / (beta * (1 - beta))))
