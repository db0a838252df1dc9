"""Monotone Fisher information and generalized variance in spectral form.

In the eigenbasis of ``D`` the superoperator ``J_D`` multiplies entry
``(i, j)`` by the mean ``m(lam_i, lam_j)`` of the chosen monotone function.
Every quantity here follows from that one table:

* ``J_D(A)``, ``J_D^{-1}(A)``: entrywise scaling by ``m`` or ``1/m``;
* Fisher information ``gamma_D(A, B) = Tr A J_D^{-1}(B)``;
* generalized variance ``phi_D[A, B] = Tr A J_D(B)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    PAULI,
    DensityMatrix,
    DimensionError,
    QigError,
    as_array,
    as_density,
)
from .monotone import F_MIN, MonotoneFunction, parse_function


@dataclass(frozen=True)
class MetricContext:
    """Footpoint ``D`` plus monotone function ``f`` with the mean table precomputed."""

    D: DensityMatrix
    f: MonotoneFunction
    multipliers: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lam = self.D.eigenvalues
        m = self.f.mean(lam[:, None], lam[None, :])
        if not np.all(m > 0):
            raise QigError("mean table must be strictly positive")
        m.setflags(write=False)
        object.__setattr__(self, "multipliers", m)

    @classmethod
    def build(cls, D, f="min") -> "MetricContext":
        return cls(as_density(D), parse_function(f))

    @property
    def dim(self) -> int:
        return self.D.dim

    @property
    def U(self) -> np.ndarray:
        return self.D.eigenvectors

    def to_eigenbasis(self, A) -> np.ndarray:
        A = as_array(A)
        if A.shape[-2:] != (self.dim, self.dim):
            raise DimensionError(f"operand shape {A.shape} does not match footpoint dim {self.dim}")
        U = self.U
        return U.conj().T @ A @ U

    def from_eigenbasis(self, A: np.ndarray) -> np.ndarray:
        U = self.U
        return U @ A @ U.conj().T


def context(D, f="min") -> MetricContext:
    if isinstance(D, MetricContext):
        return D
    return MetricContext.build(D, f)


def apply_J(ctx: MetricContext, A) -> np.ndarray:
    """``J_D(A)``: entrywise multiplication by ``m(lam_i, lam_j)`` in D's eigenbasis."""
    return ctx.from_eigenbasis(ctx.multipliers * ctx.to_eigenbasis(A))


def apply_J_inv(ctx: MetricContext, A) -> np.ndarray:
    """``J_D^{-1}(A)``: entrywise division by ``m(lam_i, lam_j)``."""
    return ctx.from_eigenbasis(ctx.to_eigenbasis(A) / ctx.multipliers)


def _pair(ctx: MetricContext, A, B, weights: np.ndarray) -> float:
    a = ctx.to_eigenbasis(A)
    b = ctx.to_eigenbasis(B)
    # Tr A W(B) = sum_ij A'_ji W_ij B'_ij
    return float(np.real(np.sum(a.T * weights * b)))


def fisher_info(ctx: MetricContext, A, B=None) -> float:
    """Monotone Fisher information ``gamma_D(A, B) = Tr A J_D^{-1}(B)``.

    With ``B`` omitted returns the quadratic form ``F_D(A)``.
    """
    return _pair(ctx, A, A if B is None else B, 1.0 / ctx.multipliers)


def variance(ctx: MetricContext, A, B=None) -> float:
    """Generalized variance ``phi_D[A, B] = Tr A J_D(B)``."""
    return _pair(ctx, A, A if B is None else B, ctx.multipliers)


def fisher_gram(ctx: MetricContext, tangents) -> np.ndarray:
    """Matrix ``gamma_D(T_a, T_b)`` over a stack of Hermitian matrices."""
    T = np.asarray([as_array(t) for t in tangents])
    U = ctx.U
    Tp = U.conj().T[None] @ T @ U[None]
    W = 1.0 / ctx.multipliers
    G = np.einsum("aji,ij,bij->ab", Tp, W, Tp).real
    return 0.5 * (G + G.T)


def sld(D, A) -> np.ndarray:
    """Symmetric logarithmic derivative: the Hermitian ``L`` with ``DL + LD = 2A``."""
    ctx = context(D, F_MIN)
    lam = ctx.D.eigenvalues
    a = ctx.to_eigenbasis(A)
    return ctx.from_eigenbasis(2.0 * a / (lam[:, None] + lam[None, :]))


# --- qubit Bloch-ball decomposition ---------------------------------------


@dataclass(frozen=True)
class BlochSplit:
    r: float
    radial: float
    tangential: float
    radial_direct: float
    tangential_direct: float

    @property
    def max_error(self) -> float:
        return max(abs(self.radial - self.radial_direct), abs(self.tangential - self.tangential_direct))


def bloch_split(f, r: float) -> BlochSplit:
    """Radial and tangential coefficients of a qubit monotone metric at Bloch radius ``r``.

    Closed form ``radial = 1/(1 - r^2)``, ``tangential = g((1-r)/(1+r)) / (1+r)``
    with ``g = 1/f``, alongside direct evaluation at ``D = (I + r sigma_z)/2``
    with tangents ``sigma_z/2`` and ``sigma_x/2``.
    """
    f = parse_function(f)
    r = float(r)
    if not 0.0 < r < 1.0:
        raise QigError(f"Bloch radius must lie in (0, 1), got {r}")
    radial = 1.0 / (1.0 - r * r)
    tangential = float(1.0 / (1.0 + r) / f((1.0 - r) / (1.0 + r)))
    ctx = context((np.eye(2) + r * PAULI[2]) / 2, f)
    return BlochSplit(
        r,
        radial,
        tangential,
        fisher_info(ctx, PAULI[2] / 2),
        fisher_info(ctx, PAULI[0] / 2),
    )


@dataclass
class RadialLimitReport:
    function: str
    radii: list
    tangential: list
    f_at_zero: float
    predicted_limit: float | None
    verdict: str  # "converges" | "diverges" | "inconclusive"

    @property
    def consistent(self) -> bool:
        expected = "converges" if self.f_at_zero > 0 else "diverges"
        return self.verdict == expected


def radial_limit_probe(f, kmax: int = 8, rtol: float = 1e-2) -> RadialLimitReport:
    """Follow the tangential coefficient toward the pure states at ``r = 1 - 10^-k``.

    Convergence is declared when the last value is within ``rtol`` of
    ``1 / (2 f(0))``; divergence when the sequence grows monotonically by at
    least a factor of two over the probed range.
    """
    f = parse_function(f)
    radii = [1.0 - 10.0 ** (-k) for k in range(1, kmax + 1)]
    vals = [float(1.0 / (1.0 + r) / f((1.0 - r) / (1.0 + r))) for r in radii]
    limit = 1.0 / (2.0 * f.f_at_zero) if f.f_at_zero > 0 else None
    increasing = all(b > a for a, b in zip(vals, vals[1:]))
    if limit is not None and abs(vals[-1] - limit) <= rtol * limit:
        verdict = "converges"
    elif increasing and vals[-1] >= 2.0 * vals[0] and (limit is None or vals[-1] > 2.0 * limit):
        verdict = "diverges"
    else:
        verdict = "inconclusive"
    return RadialLimitReport(f.label, radii, vals, f.f_at_zero, limit, verdict)
