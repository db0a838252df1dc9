"""Catalog of symmetric, normalized operator monotone functions.

Each member ``f`` satisfies ``f(1) = 1`` and ``f(t) = t f(1/t)``. The
associated mean ``m(x, y) = y f(x / y)`` is what the superoperator ``J_D``
multiplies matrix entries by in the eigenbasis of ``D``.

All evaluations are done in the logarithmic variable ``s = log t`` with
``expm1`` so the removable singularity at ``t = 1`` costs no precision; for
``|s| < 1e-6`` a second-order series ``exp(s/2 + c s^2)`` takes over.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .linalg import QigError, random_hermitian, random_unitary, matrix_function

SERIES_CUTOFF = 1e-6


class UnknownFunctionError(QigError):
    pass


def _positive(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise QigError("monotone functions are defined for t > 0 only")
    return t


def _series(s, c):
    # every catalog member has log f(e^s) = s/2 + c s^2 + O(s^3)
    return np.exp(0.5 * s + c * s * s)


def f_min(t):
    """``(1 + t) / 2``; the smallest monotone metric (largest variance)."""
    t = _positive(t)
    return (1.0 + t) / 2.0


def f_max(t):
    """``2t / (1 + t)``; the largest monotone metric."""
    t = _positive(t)
    return 2.0 * t / (1.0 + t)


def f_kubo_mori(t):
    """``(t - 1) / log t``, the logarithmic-mean function."""
    t = _positive(t)
    s = np.log(t)
    small = np.abs(s) < SERIES_CUTOFF
    safe = np.where(small, 1.0, s)
    return np.where(small, _series(s, 1.0 / 24.0), np.expm1(safe) / safe)


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if beta in (0.0, 1.0):
        raise QigError("beta in {0, 1} is the Kubo-Mori function; use f_kubo_mori")
    if not -1.0 < beta < 1.0:
        raise QigError(f"beta must lie in (-1, 0) or (0, 1), got {beta}")
    return beta


def f_beta(beta: float, t):
    """Wigner-Yanase-Dyson family.

    ``beta (1 - beta) (t - 1)^2 / ((t^beta - 1)(t^(1 - beta) - 1))``,
    symmetric under ``beta -> 1 - beta``.
    """
    beta = _check_beta(beta)
    t = _positive(t)
    s = np.log(t)
    small = np.abs(s) < SERIES_CUTOFF
    safe = np.where(small, 1.0, s)
    val = beta * (1 - beta) * np.expm1(safe) ** 2 / (np.expm1(beta * safe) * np.expm1((1 - beta) * safe))
    c = (1.0 + 2.0 * beta * (1.0 - beta)) / 24.0
    return np.where(small, _series(s, c), val)


@dataclass(frozen=True)
class MonotoneFunction:
    """A named catalog member.

    ``f_at_zero`` is ``lim_{t -> 0} f(t)``; it decides whether the tangential
    part of the qubit metric has a limit at the pure states.
    """

    name: str
    beta: float | None = None
    f_at_zero: float = field(init=False)

    def __post_init__(self):
        if self.name not in ("min", "max", "km", "beta"):
            raise UnknownFunctionError(f"unknown monotone function {self.name!r}")
        if self.name == "beta":
            b = _check_beta(self.beta)
            # for beta < 0 the factor t^beta - 1 blows up as t -> 0
            zero = b * (1 - b) if b > 0 else 0.0
        else:
            zero = {"min": 0.5, "max": 0.0, "km": 0.0}[self.name]
        object.__setattr__(self, "f_at_zero", zero)

    @property
    def label(self) -> str:
        return f"beta:{self.beta:g}" if self.name == "beta" else self.name

    def _raw(self, t):
        if self.name == "min":
            return f_min(t)
        if self.name == "max":
            return f_max(t)
        if self.name == "km":
            return f_kubo_mori(t)
        return f_beta(self.beta, t)

    def __call__(self, t):
        # fold t > 1 onto 1/t so that f(t) = t f(1/t) holds exactly, not just to one ulp of a large value
        t = np.asarray(t, dtype=float)
        big = t > 1.0
        if not np.any(big):
            return self._raw(t)
        inv = 1.0 / np.where(big, t, 1.0)
        out = np.where(big, t * self._raw(inv), self._raw(np.where(big, 1.0, t)))
        return out if out.ndim else float(out)

    def mean(self, x, y):
        """Two-variable mean ``m(x, y) = y f(x / y)`` (vectorized, symmetric, homogeneous)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.name == "min":
            return (x + y) / 2.0
        if self.name == "max":
            return 2.0 * x * y / (x + y)
        # symmetrize so that m(x, y) == m(y, x) holds bit for bit
        return 0.5 * (y * self(x / y) + x * self(y / x))

    def __str__(self) -> str:
        return self.label


F_MIN = MonotoneFunction("min")
F_MAX = MonotoneFunction("max")
F_KM = MonotoneFunction("km")


def beta_function(beta: float) -> MonotoneFunction:
    return MonotoneFunction("beta", float(beta))


def parse_function(spec: str | MonotoneFunction) -> MonotoneFunction:
    """Parse ``"min" | "max" | "km" | "beta:<float>"``."""
    if isinstance(spec, MonotoneFunction):
        return spec
    spec = spec.strip().lower()
    if spec in ("min", "max", "km"):
        return MonotoneFunction(spec)
    if spec in ("kubo_mori", "kubo-mori"):
        return F_KM
    m = re.fullmatch(r"beta:(.+)", spec)
    if m:
        try:
            return beta_function(float(m.group(1)))
        except ValueError as exc:
            raise UnknownFunctionError(f"bad beta value in {spec!r}") from exc
    raise UnknownFunctionError(f"unknown function spec {spec!r}; expected min|max|km|beta:<float>")


def catalog() -> list[MonotoneFunction]:
    """Representative members used by sweeps."""
    return [F_MIN, F_MAX, beta_function(0.3), beta_function(-0.3), beta_function(0.5), F_KM]


@dataclass
class MonotonicityReport:
    function: str
    trials: int
    dim: int
    violations: int
    worst_min_eigenvalue: float

    @property
    def ok(self) -> bool:
        return self.violations == 0


def check_matrix_monotone(
    f: MonotoneFunction, seed: int = 0, trials: int = 100, dim: int = 3, tol: float = 1e-9
) -> MonotonicityReport:
    """Spot-check ``0 < A <= B  =>  f(A) <= f(B)`` on seeded random pairs."""
    if dim > 4:
        raise QigError("matrix monotonicity spot-check is limited to dim <= 4")
    if trials < 1:
        raise QigError("need at least one trial")
    rng = np.random.default_rng(seed)
    violations = 0
    worst = np.inf
    for _ in range(trials):
        U = random_unitary(rng, dim)
        lam = np.exp(rng.uniform(np.log(0.01), np.log(10.0), size=dim))
        A = (U * lam) @ U.conj().T
        G = random_hermitian(rng, dim)
        B = A + G @ G * rng.uniform(0.01, 2.0)
        diff = matrix_function(B, f) - matrix_function(A, f)
        e = float(np.linalg.eigvalsh((diff + diff.conj().T) / 2)[0])
        worst = min(worst, e)
        if e < -tol:
            violations += 1
    return MonotonicityReport(f.label, trials, dim, violations, worst)
