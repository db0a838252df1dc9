"""Statistical models, logarithmic derivatives and Cramer-Rao bounds.

A :class:`StatisticalModel` is a chart ``theta -> D_theta`` around
``theta = 0``. Given a monotone function ``f`` the generalized variance
``phi_0`` at ``D_0`` determines logarithmic derivatives ``L_i = J^{-1}(d_i D)``
through ``phi_0[L_i, B] = d_i Tr D_theta B``; the Fisher matrix is the Gram
matrix ``phi_0[L_i, L_j]`` and its inverse lower-bounds the generalized
covariance of every locally unbiased estimator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from .linalg import (
    PAULI,
    DensityMatrix,
    QigError,
    as_array,
    gell_mann_basis,
    random_density,
    random_hermitian,
    random_tangent,
)
from .metric import MetricContext, apply_J_inv, fisher_gram, variance
from .monotone import parse_function

H_MODEL = 1e-5
UNBIASED_TOL = 1e-6
CR_TOL = 1e-9


class CalibrationError(QigError):
    """An estimator violates the centering or unit-derivative condition."""


class RankDeficientError(QigError):
    """Tangents are linearly dependent; the bound would need a pseudo-inverse."""


@dataclass(frozen=True)
class StatisticalModel:
    """Smooth family ``theta -> D_theta`` with tangents at ``theta = 0``.

    If ``tangents`` is not supplied they are obtained by central differences
    with step ``h`` (optionally Richardson-refined).
    """

    state_fn: Callable[[np.ndarray], np.ndarray]
    param_dim: int
    tangents: tuple = None
    h: float = H_MODEL
    richardson: bool = False
    name: str = "model"
    D0: DensityMatrix = field(init=False, repr=False)

    def __post_init__(self):
        D0 = DensityMatrix(self.state_fn(np.zeros(self.param_dim)))
        object.__setattr__(self, "D0", D0)
        if self.tangents is None:
            object.__setattr__(self, "tangents", tuple(self._fd_tangents()))
        else:
            object.__setattr__(self, "tangents", tuple(np.asarray(as_array(t)) for t in self.tangents))
        if len(self.tangents) != self.param_dim:
            raise QigError(f"expected {self.param_dim} tangents, got {len(self.tangents)}")
        for t in self.tangents:
            if abs(np.trace(t)) > 1e-10:
                raise QigError(f"model tangent is not traceless (trace {np.trace(t):.3e})")

    def state_at(self, theta) -> DensityMatrix:
        return DensityMatrix(self.state_fn(np.asarray(theta, dtype=float)))

    def _central(self, i: int, h: float) -> np.ndarray:
        e = np.zeros(self.param_dim)
        e[i] = h
        return (np.asarray(self.state_fn(e)) - np.asarray(self.state_fn(-e))) / (2 * h)

    def _fd_tangents(self):
        out = []
        for i in range(self.param_dim):
            d = self._central(i, self.h)
            if self.richardson:
                d = (4 * self._central(i, self.h / 2) - d) / 3
            out.append((d + d.conj().T) / 2)
        return out

    def derivative_of_expectation(self, B) -> np.ndarray:
        """``d_i Tr D_theta B`` at 0 for every parameter ``i``."""
        B = as_array(B)
        return np.array([np.real(np.trace(t @ B)) for t in self.tangents])


# --- builtin families ------------------------------------------------------


def bloch_radial(r: float) -> StatisticalModel:
    """``D_theta = (I + (r + theta) sigma_z) / 2``."""
    return StatisticalModel(
        lambda th: (np.eye(2) + (r + th[0]) * PAULI[2]) / 2,
        1,
        tangents=(PAULI[2] / 2,),
        name=f"bloch_radial(r={r})",
    )


def bloch_full(x0=(0.0, 0.0, 0.0), params: Sequence[int] = (0, 1, 2)) -> StatisticalModel:
    """Bloch chart ``D = (I + x . sigma)/2`` around ``x0``, moving the listed coordinates."""
    x0 = np.asarray(x0, dtype=float)
    params = tuple(params)

    def state(th):
        x = x0.copy()
        x[list(params)] += th
        return (np.eye(2) + sum(x[k] * PAULI[k] for k in range(3))) / 2

    return StatisticalModel(
        state, len(params), tangents=tuple(PAULI[k] / 2 for k in params), name="bloch_full"
    )


def gibbs_state(H, beta: float) -> np.ndarray:
    H = as_array(H)
    lam = np.linalg.eigvalsh(H)
    E = expm(-beta * (H - lam[0] * np.eye(H.shape[0])))
    return E / np.trace(E).real


def gibbs(H, beta0: float = 1.0, h: float = H_MODEL, richardson: bool = False) -> StatisticalModel:
    """Gibbs family ``e^{-(beta0 + theta) H} / Tr``; finite-difference tangent."""
    H = as_array(H)
    return StatisticalModel(
        lambda th: gibbs_state(H, beta0 + th[0]), 1, h=h, richardson=richardson, name=f"gibbs(beta0={beta0})"
    )


def affine_model(D0, tangents, name: str = "affine") -> StatisticalModel:
    """``D_theta = D0 + sum_i theta_i T_i`` with exact tangents."""
    D0 = as_array(D0)
    T = [as_array(t) for t in tangents]
    return StatisticalModel(
        lambda th: D0 + sum(a * t for a, t in zip(th, T)), len(T), tangents=tuple(T), name=name
    )


def random_model(seed: int, n: int, m: int, floor: float = 0.02) -> StatisticalModel:
    """Seeded affine ``m``-parameter model around a random full-rank state."""
    rng = np.random.default_rng(seed)
    D0 = random_density(rng, n, floor)
    tangents = [random_tangent(rng, n).data for _ in range(m)]
    return affine_model(D0, tangents, name=f"random(seed={seed},n={n},m={m})")


def user_config_model(cfg: dict | str) -> StatisticalModel:
    """Model from a JSON config in the Gell-Mann chart.

    ``{"dim": n, "param_dim": m, "basis": "gell_mann", "floor": 1e-10,
    "theta_to_coeffs": {...}}`` where ``theta_to_coeffs`` is either an affine
    map ``{"offset": [...], "matrix": [[...], ...]}`` (matrix is
    ``(n^2-1) x m``) or a polynomial table ``{"terms": [{"powers": [..m..],
    "coeffs": [..n^2-1..]}, ...]}``. The state is ``I/n + sum_k c_k(theta) E_k``.
    """
    if isinstance(cfg, str):
        cfg = json.loads(cfg)
    try:
        n = int(cfg["dim"])
        m = int(cfg["param_dim"])
        basis_name = cfg.get("basis", "gell_mann")
        spec = cfg["theta_to_coeffs"]
        floor = float(cfg.get("floor", 1e-10))
    except (KeyError, TypeError, ValueError) as exc:
        raise QigError(f"malformed model config: {exc}") from exc
    if basis_name != "gell_mann":
        raise QigError(f"unsupported basis {basis_name!r}")
    basis = gell_mann_basis(n)
    d = len(basis)
    if "terms" in spec:
        terms = [(np.asarray(t["powers"], dtype=int), np.asarray(t["coeffs"], dtype=float)) for t in spec["terms"]]
        if any(p.shape != (m,) or c.shape != (d,) for p, c in terms):
            raise QigError("polynomial term shapes do not match dim/param_dim")
        coeffs = lambda th: sum(c * np.prod(th**p) for p, c in terms)
    elif "offset" in spec:
        off = np.asarray(spec["offset"], dtype=float)
        M = np.asarray(spec["matrix"], dtype=float).reshape(d, m)
        if off.shape != (d,):
            raise QigError("affine offset length must be n^2 - 1")
        coeffs = lambda th: off + M @ th
    else:
        raise QigError("theta_to_coeffs needs 'terms' or 'offset'/'matrix'")

    def state(th):
        return np.eye(n) / n + basis.combine(coeffs(np.asarray(th, dtype=float)))

    model = StatisticalModel(state, m, name="user_config")
    if model.D0.eigenvalues[0] < floor:
        raise QigError(f"model base state violates floor {floor}")
    return model


BUILTIN_MODELS = {
    "bloch_radial": lambda p: bloch_radial(p.get("r", 0.5)),
    "bloch_full": lambda p: bloch_full(p.get("x0", (0.0, 0.0, 0.0)), p.get("params", (0, 1, 2))),
    "gibbs": lambda p: gibbs(_matrix_param(p["H"]), p.get("beta0", 1.0)),
    "user_config": lambda p: user_config_model(p),
    "random": lambda p: random_model(p.get("seed", 0), p.get("dim", 2), p.get("param_dim", 1)),
}


def _matrix_param(x):
    from .io import decode_matrix

    return decode_matrix(x) if isinstance(x, dict) else np.asarray(x, dtype=complex)


def builtin_models(name: str, params: dict | None = None) -> StatisticalModel:
    if name not in BUILTIN_MODELS:
        raise QigError(f"unknown model {name!r}; expected one of {sorted(BUILTIN_MODELS)}")
    try:
        return BUILTIN_MODELS[name](params or {})
    except (KeyError, TypeError) as exc:
        raise QigError(f"malformed parameters for model {name!r}: {exc}") from exc


# --- logarithmic derivatives and Fisher matrices ---------------------------


def _ctx(model: StatisticalModel, f) -> MetricContext:
    return MetricContext(model.D0, parse_function(f))


def log_derivatives(model: StatisticalModel, f) -> list[np.ndarray]:
    """``L_i = J_{D0}^{-1}(d_i D)`` so that ``phi_0[L_i, B] = d_i Tr D_theta B``."""
    ctx = _ctx(model, f)
    return [apply_J_inv(ctx, t) for t in model.tangents]


def fisher_matrix(model: StatisticalModel, f) -> np.ndarray:
    """``G_ij = Tr (d_i D) J^{-1}(d_j D) = phi_0[L_i, L_j]``."""
    return fisher_gram(_ctx(model, f), model.tangents)


def _require_full_rank(G: np.ndarray, rtol: float = 1e-10) -> None:
    ev = np.linalg.eigvalsh(G)
    if ev[0] <= rtol * max(ev[-1], 1e-300):
        raise RankDeficientError(
            f"Fisher matrix is rank deficient (eigenvalues {ev}); the bound is not computed"
        )


def center(model: StatisticalModel, A) -> np.ndarray:
    """Subtract ``(Tr D0 A) I`` so that the estimator is centered at ``D0``."""
    A = as_array(A)
    return A - np.real(np.trace(model.D0.data @ A)) * np.eye(A.shape[0])


@dataclass(frozen=True)
class ScalarCR:
    variance: float
    bound: float
    slack: float
    centering_shift: float

    def holds(self, tol: float = CR_TOL) -> bool:
        return self.slack >= -tol


def scalar_cr_check(model: StatisticalModel, A, f, tol: float = UNBIASED_TOL) -> ScalarCR:
    """``phi_0[A, A] >= 1 / phi_0[L, L]`` for a locally unbiased observable ``A``."""
    if model.param_dim != 1:
        raise QigError("scalar Cramer-Rao check needs a one-parameter model")
    A = as_array(A)
    deriv = model.derivative_of_expectation(A)[0]
    if abs(deriv - 1.0) > tol:
        raise CalibrationError(f"estimator is not locally unbiased: d/dtheta Tr D A = {deriv!r} (defect {deriv - 1:.3e})")
    shift = float(np.real(np.trace(model.D0.data @ A)))
    Ac = center(model, A)
    ctx = _ctx(model, f)
    G = fisher_matrix(model, f)
    _require_full_rank(G)
    var = variance(ctx, Ac)
    bound = 1.0 / G[0, 0]
    return ScalarCR(var, bound, var - bound, shift)


def optimal_estimator(model: StatisticalModel, f) -> np.ndarray:
    """The unique locally unbiased estimator saturating the scalar bound.

    ``A = lam * J^{-1}(dD) + c I`` with ``lam`` fixed by the unit-derivative
    condition and ``c`` by centering.
    """
    if model.param_dim != 1:
        raise QigError("optimal estimator is defined for one-parameter models")
    (L,) = log_derivatives(model, f)
    slope = model.derivative_of_expectation(L)[0]
    if not slope > 0:
        raise QigError("degenerate tangent: the logarithmic derivative has zero Fisher information")
    return center(model, L / slope)


# --- multiparameter bound --------------------------------------------------


@dataclass(frozen=True)
class EstimatorBank:
    """Observables ``A_1..A_m`` checked for centering and calibration against a model."""

    observables: tuple
    centering_defect: float = 0.0
    calibration_defect: float = 0.0

    @classmethod
    def checked(cls, model: StatisticalModel, observables, center_tol: float = 1e-9, cal_tol: float = 1e-7):
        obs = tuple(as_array(a) for a in observables)
        if len(obs) != model.param_dim:
            raise CalibrationError(f"bank has {len(obs)} observables for a {model.param_dim}-parameter model")
        cen = max(abs(np.real(np.trace(model.D0.data @ a))) for a in obs)
        C = np.array([model.derivative_of_expectation(a) for a in obs]).T  # C[i, j] = d_i Tr D A_j
        cal = float(np.max(np.abs(C - np.eye(len(obs)))))
        if cen > center_tol:
            raise CalibrationError(f"condition (i) fails: max |Tr D0 A_i| = {cen:.3e}")
        if cal > cal_tol:
            raise CalibrationError(f"condition (ii) fails: max |d_i Tr D A_j - delta_ij| = {cal:.3e}")
        return cls(obs, cen, cal)


def efficient_bank(model: StatisticalModel, f) -> EstimatorBank:
    """``A_i = sum_j (G^{-1})_ij L_j``; saturates the matrix bound."""
    L = log_derivatives(model, f)
    G = fisher_matrix(model, f)
    _require_full_rank(G)
    Ginv = np.linalg.inv(G)
    obs = [center(model, sum(Ginv[i, j] * L[j] for j in range(len(L)))) for i in range(len(L))]
    return EstimatorBank.checked(model, obs)


def noisy_bank(model: StatisticalModel, f, seed: int, scale: float = 0.5) -> EstimatorBank:
    """Efficient bank plus seeded noise that is ``phi_0``-orthogonal to ``I`` and every ``L_j``."""
    rng = np.random.default_rng(seed)
    ctx = _ctx(model, f)
    n = model.D0.dim
    span = [np.eye(n, dtype=complex)] + log_derivatives(model, f)
    # Gram-Schmidt in the phi_0 inner product
    ortho = []
    for v in span:
        w = v - sum(variance(ctx, u, v) * u for u in ortho)
        nrm = np.sqrt(variance(ctx, w))
        if nrm > 1e-12:
            ortho.append(w / nrm)
    base = efficient_bank(model, f).observables
    obs = []
    for a in base:
        N0 = random_hermitian(rng, n)
        N = N0 - sum(variance(ctx, u, N0) * u for u in ortho)
        if np.linalg.norm(N) < 1e-8 * np.linalg.norm(N0):
            raise QigError("no room for noise: I and the log-derivatives span all observables")
        obs.append(a + scale * N / np.linalg.norm(N))
    return EstimatorBank.checked(model, obs)


@dataclass(frozen=True)
class MatrixCR:
    cov: np.ndarray
    bound: np.ndarray
    gap_eigenvalues: np.ndarray

    @property
    def min_eig_of_gap(self) -> float:
        return float(self.gap_eigenvalues[0])

    def holds(self, tol: float = CR_TOL) -> bool:
        return self.min_eig_of_gap >= -tol


def covariance_matrix(model: StatisticalModel, bank: EstimatorBank, f) -> np.ndarray:
    ctx = _ctx(model, f)
    m = len(bank.observables)
    C = np.array([[variance(ctx, bank.observables[i], bank.observables[j]) for j in range(m)] for i in range(m)])
    return 0.5 * (C + C.T)


def matrix_cr_check(model: StatisticalModel, bank: EstimatorBank, f) -> MatrixCR:
    """``phi_0[A] >= (phi_0[L_i, L_j])^{-1}`` in the positive semidefinite order."""
    EstimatorBank.checked(model, bank.observables)
    G = fisher_matrix(model, f)
    _require_full_rank(G)
    cov = covariance_matrix(model, bank, f)
    bound = np.linalg.inv(G)
    bound = 0.5 * (bound + bound.T)
    return MatrixCR(cov, bound, np.linalg.eigvalsh(cov - bound))


@dataclass(frozen=True)
class BlockOracle:
    M: np.ndarray
    min_eigenvalue: float
    psd: bool
    implication_holds: bool


def block_matrix_oracle(model: StatisticalModel, bank: EstimatorBank, f, tol: float = CR_TOL) -> BlockOracle:
    """Assemble ``[[phi_0[A_i, A_j], phi_0[A_i, L_j]], [phi_0[L_i, A_j], phi_0[L_i, L_j]]]``.

    The stack ``X = (A_1..A_m, L_1..L_m)`` gives ``M_ab = Tr X_a J_D(X_b)``;
    positivity of ``M`` with identity off-diagonal blocks implies the matrix
    bound. ``implication_holds`` records that the implication was not
    contradicted by :func:`matrix_cr_check`.
    """
    ctx = _ctx(model, f)
    X = list(bank.observables) + log_derivatives(model, f)
    k = len(X)
    M = np.array([[variance(ctx, X[a], X[b]) for b in range(k)] for a in range(k)])
    M = 0.5 * (M + M.T)
    lo = float(np.linalg.eigvalsh(M)[0])
    psd = lo >= -tol
    cr = matrix_cr_check(model, bank, f)
    return BlockOracle(M, lo, psd, (not psd) or cr.holds(tol))
