"""Integral representations used as independent cross-checks of the spectral path.

None of these touch an eigendecomposition: resolvents come from
``numpy.linalg.inv``, exponentials from ``scipy.linalg.expm`` and real
powers from ``scipy.linalg.fractional_matrix_power``. The half-line
integrals are compactified with ``t = s / (1 - s)``.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad_vec
from scipy.linalg import expm, fractional_matrix_power

from .linalg import QigError, as_array


class QuadratureError(QigError):
    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


KINDS = ("metric", "variance", "sld_exp")


def _half_line(integrand, epsabs, epsrel, limit):
    def g(s):
        if s >= 1.0:
            return 0.0 * integrand(0.0)
        t = s / (1.0 - s)
        return integrand(t) / (1.0 - s) ** 2

    return quad_vec(g, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel, limit=limit)


def km_integral_oracle(
    D,
    A,
    B=None,
    kind: str = "metric",
    epsrel: float = 1e-12,
    epsabs: float = 1e-14,
    limit: int = 2000,
    tol: float = 1e-9,
):
    """Quadrature evaluation of the integral forms.

    ``kind="metric"``:   ``int_0^inf Tr A (D+t)^-1 B (D+t)^-1 dt`` (Kubo-Mori metric).
    ``kind="variance"``: ``int_0^1 Tr A D^t B D^(1-t) dt`` (Kubo-Mori variance).
    ``kind="sld_exp"``:  ``2 int_0^inf e^(-tD) A e^(-tD) dt`` (SLD, a matrix; ``B`` unused).

    Raises :class:`QuadratureError` when the estimated error exceeds ``tol``
    relative to the result.
    """
    D = as_array(D)
    A = as_array(A)
    B = A if B is None else as_array(B)
    n = D.shape[0]
    I = np.eye(n)
    if kind == "metric":
        def integrand(t):
            R = np.linalg.inv(D + t * I)
            return np.real(np.trace(A @ R @ B @ R))

        val, err = _half_line(integrand, epsabs, epsrel, limit)
    elif kind == "variance":
        def integrand(t):
            P = fractional_matrix_power(D, t)
            Q = fractional_matrix_power(D, 1.0 - t)
            return np.real(np.trace(A @ P @ B @ Q))

        val, err = quad_vec(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel, limit=limit)
    elif kind == "sld_exp":
        def integrand(t):
            E = expm(-t * D)
            return 2.0 * (E @ A @ E)

        val, err = _half_line(integrand, epsabs, epsrel, limit)
    else:
        raise QigError(f"unknown oracle kind {kind!r}; expected one of {KINDS}")
    scale = max(float(np.max(np.abs(val))), 1e-300)
    if err > tol * scale:
        raise QuadratureError(f"{kind} quadrature did not converge", err)
    return float(val) if np.ndim(val) == 0 else val
