"""Hermitian linear algebra substrate.

Validated matrix carriers, the spectral decomposition used by every metric
computation, the generalized Gell-Mann basis and seeded random generators.
Matrices are plain complex ``numpy`` arrays underneath; the wrapper classes
only exist to enforce invariants at construction and to cache spectra.
"""

from __future__ import annotations

from functools import cached_property
from typing import Union

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
UNITARY_TOL = 1e-10
PD_FLOOR = 1e-10


class QigError(ValueError):
    """Base class for invariant violations raised by this package."""


class NotHermitianError(QigError):
    pass


class NotDensityError(QigError):
    pass


class NotPositiveError(QigError):
    pass


class DimensionError(QigError):
    pass


class HermitianMatrix:
    """Complex square matrix equal to its conjugate transpose."""

    __slots__ = ("data",)

    def __init__(self, data, tol: float = HERMITIAN_TOL):
        arr = np.array(data, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DimensionError(f"expected a non-empty square matrix, got shape {arr.shape}")
        scale = max(1.0, float(np.max(np.abs(arr))))
        defect = float(np.max(np.abs(arr - arr.conj().T)))
        if defect > tol * scale:
            raise NotHermitianError(f"matrix is not Hermitian (max |H - H^*| = {defect:.3e})")
        # exact symmetrization of admissible roundoff
        arr = 0.5 * (arr + arr.conj().T)
        arr.setflags(write=False)
        self.data = arr

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


class TangentVector(HermitianMatrix):
    """Traceless Hermitian matrix: a tangent direction of the state space."""

    __slots__ = ()

    def __init__(self, data, tol: float = TRACE_TOL):
        super().__init__(data)
        scale = max(1.0, float(np.max(np.abs(self.data))))
        if abs(np.trace(self.data)) > tol * scale * self.dim:
            raise NotDensityError(f"tangent must be traceless, trace = {np.trace(self.data):.3e}")


class DensityMatrix(HermitianMatrix):
    """Strictly positive Hermitian matrix of unit trace with a cached spectrum."""

    __slots__ = ("__dict__",)

    def __init__(self, data, pd_floor: float = PD_FLOOR, trace_tol: float = TRACE_TOL):
        super().__init__(data)
        tr = np.trace(self.data).real
        if abs(tr - 1.0) > trace_tol:
            raise NotDensityError(f"density matrix must have unit trace, got {tr!r}")
        lam = self.eigenvalues
        if lam[0] < pd_floor:
            raise NotPositiveError(
                f"smallest eigenvalue {lam[0]:.3e} is below the positivity floor {pd_floor:.1e}"
            )

    @cached_property
    def _spectrum(self):
        return spectral_decompose(self.data)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._spectrum[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._spectrum[1]

    def power(self, p: float) -> np.ndarray:
        lam, U = self._spectrum
        return (U * lam**p) @ U.conj().T

    def inverse(self) -> np.ndarray:
        return self.power(-1.0)


MatrixLike = Union[np.ndarray, HermitianMatrix]


def as_array(x: MatrixLike) -> np.ndarray:
    if isinstance(x, HermitianMatrix):
        return x.data
    return np.asarray(x, dtype=complex)


def as_density(x, pd_floor: float = PD_FLOOR) -> DensityMatrix:
    if isinstance(x, DensityMatrix):
        return x
    return DensityMatrix(as_array(x), pd_floor=pd_floor)


def spectral_decompose(H: MatrixLike) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and a unitary eigenvector matrix of a Hermitian matrix.

    ``H == U @ diag(lam) @ U^*`` up to eigensolver precision.
    """
    arr = as_array(H)
    if not isinstance(H, HermitianMatrix):
        arr = HermitianMatrix(arr).data
    lam, U = np.linalg.eigh(arr)
    return lam, U


def matrix_function(H: MatrixLike, func) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    lam, U = spectral_decompose(H)
    return (U * func(lam)) @ U.conj().T


def hs_inner(A: MatrixLike, B: MatrixLike) -> complex:
    """Hilbert-Schmidt pairing ``Tr A^* B``."""
    return complex(np.vdot(as_array(A), as_array(B)))


# --- Pauli matrices and the traceless basis -------------------------------

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class TracelessBasis:
    """Ordered Hilbert-Schmidt orthogonal basis of traceless Hermitian n x n matrices.

    Normalized so that ``Tr(E_i E_j) = delta_ij / 2``; for n = 2 the elements
    are the Pauli matrices divided by two and chart coordinates coincide with
    the Bloch vector.
    """

    def __init__(self, elements: np.ndarray):
        self.elements = np.array(elements, dtype=complex)
        self.elements.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def __len__(self) -> int:
        return self.elements.shape[0]

    def __getitem__(self, k: int) -> TangentVector:
        return TangentVector(self.elements[k])

    def gram(self) -> np.ndarray:
        return np.einsum("aij,bji->ab", self.elements, self.elements).real

    def combine(self, coeffs) -> np.ndarray:
        """Matrix ``sum_k c_k E_k``."""
        return np.tensordot(np.asarray(coeffs, dtype=float), self.elements, axes=1)

    def coefficients(self, X: MatrixLike) -> np.ndarray:
        """Expansion coefficients of a traceless Hermitian matrix."""
        return 2.0 * np.einsum("aij,ji->a", self.elements, as_array(X)).real


def gell_mann_basis(n: int) -> TracelessBasis:
    """Generalized Gell-Mann matrices scaled by 1/2.

    Order: symmetric off-diagonal pairs, antisymmetric pairs, then diagonal
    elements. For ``n == 2`` this is re-ordered to ``(sigma_x, sigma_y,
    sigma_z) / 2`` so chart coordinates match the Bloch vector.
    """
    if int(n) != n or n < 2:
        raise DimensionError(f"Gell-Mann basis needs n >= 2, got {n!r}")
    n = int(n)
    if n == 2:
        return TracelessBasis(np.stack(PAULI) / 2)
    sym, anti, diag = [], [], []
    for j in range(n):
        for k in range(j + 1, n):
            s = np.zeros((n, n), dtype=complex)
            s[j, k] = s[k, j] = 1
            a = np.zeros((n, n), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            sym.append(s)
            anti.append(a)
    for l in range(1, n):
        d = np.zeros((n, n), dtype=complex)
        d[np.arange(l), np.arange(l)] = 1
        d[l, l] = -l
        diag.append(np.sqrt(2.0 / (l * (l + 1))) * d)
    return TracelessBasis(np.stack(sym + anti + diag) / 2)


# --- seeded generators -----------------------------------------------------

def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_hermitian(seed, n: int) -> np.ndarray:
    rng = _rng(seed)
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (X + X.conj().T) / 2


def random_unitary(seed, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    rng = _rng(seed)
    Z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_density(seed, n: int, spectrum_floor: float = 0.01) -> DensityMatrix:
    """Seeded full-rank density matrix whose eigenvalues are all >= ``spectrum_floor``."""
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    if not 0 < spectrum_floor < 1.0 / n:
        raise QigError(f"spectrum floor must lie in (0, 1/n) = (0, {1.0 / n:.4g}), got {spectrum_floor}")
    H = random_hermitian(seed, n)
    P = H @ H + 1e-3 * np.eye(n)
    P /= np.trace(P).real
    # mixing with I/n lifts the smallest eigenvalue to at least spectrum_floor
    lam_min = max(float(np.linalg.eigvalsh(P)[0]), 0.0)
    if lam_min < spectrum_floor:
        target = min(spectrum_floor * (1 + 1e-9), 0.5 * (spectrum_floor + 1.0 / n))
        w = (target - lam_min) / (1.0 / n - lam_min)
        P = (1 - w) * P + w * np.eye(n) / n
    return DensityMatrix(P, pd_floor=min(PD_FLOOR, spectrum_floor))


def random_tangent(seed, n: int) -> TangentVector:
    """Seeded traceless Hermitian matrix of unit Frobenius norm."""
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    H = random_hermitian(seed, n)
    H = H - np.trace(H).real / n * np.eye(n)
    return TangentVector(H / np.linalg.norm(H))
