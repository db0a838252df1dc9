"""Riemannian geometry of monotone metrics on the affine chart of full-rank states.

Chart: ``x -> D(x) = I/n + sum_k x_k E_k`` with the half-normalized Gell-Mann
basis. Curvature is computed purely from finite differences of the metric
tensor: Christoffel symbols from central differences of ``g``, the Riemann
tensor from central differences of the Christoffel symbols, then Ricci and
scalar contractions. Richardson extrapolation over ``{h, h/2}`` and the
difference between the two steps (the error gauge) accompany every value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .channels import Channel
from .estimation import gibbs_state
from .linalg import QigError, TracelessBasis, as_array, gell_mann_basis
from .metric import MetricContext, fisher_gram, variance
from .linalg import DensityMatrix
from .monotone import F_KM, parse_function

CURVATURE_H = 1e-2
MAX_CURVATURE_DIM = 3


class DomainError(QigError):
    """Chart point (or its finite-difference stencil) leaves the positive cone."""


@dataclass(frozen=True)
class Chart:
    n: int
    basis: TracelessBasis = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "basis", gell_mann_basis(self.n))

    @property
    def dim(self) -> int:
        return self.n * self.n - 1

    def to_state(self, x) -> np.ndarray:
        return np.eye(self.n) / self.n + self.basis.combine(x)

    def coordinates(self, D) -> np.ndarray:
        return self.basis.coefficients(as_array(D))

    def min_eigenvalue(self, x) -> float:
        return float(np.linalg.eigvalsh(self.to_state(x))[0])

    def domain_check(self, x, floor: float = 1e-10) -> bool:
        return self.min_eigenvalue(x) > floor


def _state(chart: Chart, x) -> DensityMatrix:
    D = chart.to_state(x)
    try:
        return DensityMatrix(D)
    except QigError as exc:
        raise DomainError(f"chart point outside positivity domain: {exc}") from exc


def metric_tensor(chart: Chart, f, x) -> np.ndarray:
    """``g_ij(x) = gamma_{D(x)}(E_i, E_j)``."""
    ctx = MetricContext(_state(chart, np.asarray(x, dtype=float)), parse_function(f))
    return fisher_gram(ctx, chart.basis.elements)


class _MetricField:
    """Metric tensor on an integer lattice ``x + h * k`` with caching."""

    def __init__(self, chart: Chart, f, x, h: float):
        self.chart, self.f, self.x, self.h = chart, parse_function(f), np.asarray(x, dtype=float), h
        self._cache: dict = {}

    def g(self, k: tuple) -> np.ndarray:
        if k not in self._cache:
            self._cache[k] = metric_tensor(self.chart, self.f, self.x + self.h * np.asarray(k))
        return self._cache[k]

    def christoffel(self, k: tuple) -> np.ndarray:
        """``Gamma^a_{bc}`` at lattice point ``k``, indices ``[a, b, c]``."""
        d = self.chart.dim
        dg = np.empty((d, d, d))  # dg[c, i, j] = d_c g_ij
        for c in range(d):
            kp = list(k)
            km = list(k)
            kp[c] += 1
            km[c] -= 1
            dg[c] = (self.g(tuple(kp)) - self.g(tuple(km))) / (2 * self.h)
        ginv = np.linalg.inv(self.g(k))
        # first kind: Gamma_{l b c} = (d_b g_lc + d_c g_lb - d_l g_bc) / 2
        first = 0.5 * (np.einsum("blc->lbc", dg) + np.einsum("clb->lbc", dg) - dg)
        return np.einsum("al,lbc->abc", ginv, first)

    def scalar(self) -> float:
        d = self.chart.dim
        zero = (0,) * d
        G = self.christoffel(zero)
        dG = np.empty((d, d, d, d))  # dG[m, a, b, c] = d_m Gamma^a_bc
        for m in range(d):
            kp = [0] * d
            km = [0] * d
            kp[m] = 1
            km[m] = -1
            dG[m] = (self.christoffel(tuple(kp)) - self.christoffel(tuple(km))) / (2 * self.h)
        # R^r_{s m v} = d_m G^r_{v s} - d_v G^r_{m s} + G^r_{m l} G^l_{v s} - G^r_{v l} G^l_{m s}
        R = (
            np.einsum("mrvs->rsmv", dG)
            - np.einsum("vrms->rsmv", dG)
            + np.einsum("rml,lvs->rsmv", G, G)
            - np.einsum("rvl,lms->rsmv", G, G)
        )
        ricci = np.einsum("rsrv->sv", R)
        ginv = np.linalg.inv(self.g(zero))
        return float(np.einsum("sv,sv->", ginv, ricci))


@dataclass(frozen=True)
class CurvatureReport:
    point: np.ndarray
    scalar_curvature: float
    fd_step: float
    richardson_estimate: float
    error_gauge: float
    coarse: float = float("nan")
    flagged: bool = False

    @property
    def value(self) -> float:
        return self.richardson_estimate


def scalar_curvature(chart: Chart, f, x, h: float = CURVATURE_H, gauge_threshold: float = 1e-2) -> CurvatureReport:
    """Scalar curvature at chart point ``x`` with Richardson refinement over ``{h, h/2}``.

    ``scalar_curvature`` is the value at step ``h/2``; ``richardson_estimate``
    removes the leading ``h^2`` error; ``error_gauge`` is ``|S(h) - S(h/2)|``.
    """
    if chart.n > MAX_CURVATURE_DIM:
        raise QigError(f"curvature is limited to n <= {MAX_CURVATURE_DIM}")
    x = np.asarray(x, dtype=float)
    # the stencil reaches 2h along single axes and h + h diagonally
    reach = 2 * h * np.max(np.linalg.norm(chart.basis.elements, ord=2, axis=(1, 2)))
    if chart.min_eigenvalue(x) <= np.sqrt(2) * reach:
        raise DomainError(f"a {2 * h:g}-ball around the point leaves the positivity domain")
    coarse = _MetricField(chart, f, x, h).scalar()
    fine = _MetricField(chart, f, x, h / 2).scalar()
    rich = (4 * fine - coarse) / 3
    gauge = abs(coarse - fine)
    return CurvatureReport(x, fine, h, rich, gauge, coarse, gauge > gauge_threshold * max(1.0, abs(rich)))


def curvature_at_state(D, f, h: float = CURVATURE_H) -> CurvatureReport:
    D = as_array(D)
    chart = Chart(D.shape[0])
    return scalar_curvature(chart, f, chart.coordinates(D), h)


# --- Gibbs curve scan ------------------------------------------------------


@dataclass
class GibbsPoint:
    beta: float
    scalar_curvature: float
    error_gauge: float
    step: float
    skipped: str | None = None


@dataclass
class GibbsScan:
    points: list
    violations: list  # (beta_prev, beta_next, increase, allowed)

    @property
    def monotone(self) -> bool:
        return not self.violations


def gibbs_scan(H, f=F_KM, beta_grid=None, h: float = CURVATURE_H, adapt: bool = True) -> GibbsScan:
    """Scalar curvature along ``e^{-beta H} / Tr e^{-beta H}`` for ``beta`` on the grid.

    A violation of the non-increasing trend is recorded only if the increase
    exceeds the summed error gauges of the two neighbouring points. With
    ``adapt`` the step shrinks so the stencil stays well inside the cone.
    """
    H = as_array(H)
    n = H.shape[0]
    chart = Chart(n)
    f = parse_function(f)
    if beta_grid is None:
        beta_grid = np.round(np.arange(0.0, 3.0 + 1e-9, 0.1), 12)
    beta_grid = np.asarray(beta_grid, dtype=float)
    if np.any(np.diff(beta_grid) <= 0) or beta_grid[0] < 0:
        raise QigError("beta grid must be non-negative and strictly ascending")
    points = []
    for b in beta_grid:
        D = gibbs_state(H, b)
        x = chart.coordinates(D)
        step = h
        if adapt:
            step = min(h, chart.min_eigenvalue(x) / 8)
        try:
            rep = scalar_curvature(chart, f, x, step)
            points.append(GibbsPoint(float(b), rep.richardson_estimate, rep.error_gauge, step))
        except DomainError as exc:
            points.append(GibbsPoint(float(b), float("nan"), float("nan"), step, str(exc)))
    valid = [p for p in points if p.skipped is None]
    violations = []
    for p, q in zip(valid, valid[1:]):
        allowed = p.error_gauge + q.error_gauge
        if q.scalar_curvature - p.scalar_curvature > allowed:
            violations.append((p.beta, q.beta, q.scalar_curvature - p.scalar_curvature, allowed))
    return GibbsScan(points, violations)


def seeded_hamiltonian(seed: int, n: int, spread: float = 1.0) -> np.ndarray:
    """Random Hermitian ``H`` rescaled so its spectral spread is ``spread``."""
    from .linalg import random_hermitian

    X = random_hermitian(seed, n)
    lam = np.linalg.eigvalsh(X)
    return X * (spread / (lam[-1] - lam[0]))


@dataclass(frozen=True)
class CoarseGrainingCurvature:
    scal_upstream: float
    scal_downstream: float
    gauge_upstream: float
    gauge_downstream: float

    @property
    def conjecture_holds(self) -> bool | None:
        """``Scal(D) <= Scal(ch(D))`` beyond the gauges; ``None`` if undecidable."""
        diff = self.scal_downstream - self.scal_upstream
        tol = self.gauge_upstream + self.gauge_downstream
        if diff >= -tol and diff <= tol:
            return None
        return diff > 0


def coarse_graining_curvature_probe(D, f, ch: Channel, h: float = CURVATURE_H) -> CoarseGrainingCurvature:
    """Scalar curvature before and after a coarse graining; raw values, no normalization across dimensions."""
    D = as_array(D)
    up = curvature_at_state(D, f, h)
    out = ch.apply(D)
    out = (out + out.conj().T) / 2
    down = curvature_at_state(out / np.trace(out).real, f, h)
    return CoarseGrainingCurvature(up.richardson_estimate, down.richardson_estimate, up.error_gauge, down.error_gauge)


# --- exponential parametrization -------------------------------------------


@dataclass(frozen=True)
class DualityCheck:
    hessian: float
    km_variance: float

    @property
    def relative_error(self) -> float:
        return abs(self.hessian - self.km_variance) / max(abs(self.km_variance), 1e-300)


def log_partition(H) -> float:
    """``log Tr exp(H)`` with a spectral shift against overflow."""
    H = as_array(H)
    H = (H + H.conj().T) / 2
    top = float(np.linalg.eigvalsh(H)[-1])
    return top + float(np.log(np.trace(expm(H - top * np.eye(H.shape[0]))).real))


def km_exponential_duality_check(H0, Bi, Bj, h: float = 1e-4) -> DualityCheck:
    """Hessian of ``log Tr exp`` at ``H0`` versus the Kubo-Mori variance at ``e^H0 / Tr``.

    In exponential coordinates the second derivative of the log-partition
    function is the Kubo-Mori variance of the centered directions.
    """
    H0, Bi, Bj = as_array(H0), as_array(Bi), as_array(Bj)
    psi = lambda t, u: log_partition(H0 + t * Bi + u * Bj)
    hess = (psi(h, h) - psi(h, -h) - psi(-h, h) + psi(-h, -h)) / (4 * h * h)
    n = H0.shape[0]
    top = float(np.linalg.eigvalsh((H0 + H0.conj().T) / 2)[-1])
    E = expm(H0 - top * np.eye(n))
    D = DensityMatrix(E / np.trace(E).real, pd_floor=0.0)
    ctx = MetricContext(D, F_KM)
    ci = Bi - np.real(np.trace(D.data @ Bi)) * np.eye(n)
    cj = Bj - np.real(np.trace(D.data @ Bj)) * np.eye(n)
    return DualityCheck(float(hess), variance(ctx, ci, cj))
