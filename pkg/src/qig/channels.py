"""Coarse grainings as Kraus-form CPTP maps, and monotonicity probes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    PAULI,
    DensityMatrix,
    DimensionError,
    QigError,
    as_array,
    random_unitary,
)
from .metric import MetricContext, apply_J, fisher_info, variance
from .monotone import parse_function

TP_TOL = 1e-10
REFLOOR_EPS = 1e-9


class Channel:
    """Completely positive trace-preserving map ``X -> sum_k K_k X K_k^*``."""

    def __init__(self, kraus, tol: float = TP_TOL):
        ks = np.array([np.asarray(k, dtype=complex) for k in kraus])
        if ks.ndim != 3 or len(ks) == 0:
            raise DimensionError("Kraus operators must be a non-empty list of equally shaped matrices")
        self.kraus = ks
        self.kraus.setflags(write=False)
        defect = np.max(np.abs(np.einsum("kji,kjl->il", ks.conj(), ks) - np.eye(self.in_dim)))
        if defect > tol:
            raise QigError(f"Kraus operators are not trace preserving (defect {defect:.3e})")

    @property
    def in_dim(self) -> int:
        return self.kraus.shape[2]

    @property
    def out_dim(self) -> int:
        return self.kraus.shape[1]

    def apply(self, X) -> np.ndarray:
        X = as_array(X)
        if X.shape != (self.in_dim, self.in_dim):
            raise DimensionError(f"channel input must be {self.in_dim}x{self.in_dim}, got {X.shape}")
        return np.einsum("kij,jl,kml->im", self.kraus, X, self.kraus.conj())

    def adjoint_apply(self, Y) -> np.ndarray:
        Y = as_array(Y)
        if Y.shape != (self.out_dim, self.out_dim):
            raise DimensionError(f"adjoint input must be {self.out_dim}x{self.out_dim}, got {Y.shape}")
        return np.einsum("kji,jl,klm->im", self.kraus.conj(), Y, self.kraus)

    __call__ = apply

    def compose(self, other: "Channel") -> "Channel":
        """``self o other`` (apply ``other`` first)."""
        if other.out_dim != self.in_dim:
            raise DimensionError("composition dimension mismatch")
        return Channel([a @ b for a in self.kraus for b in other.kraus])

    def superoperator(self) -> np.ndarray:
        """Matrix of the map on row-major vectorized matrices: ``vec(K X K^*) = (K (x) conj K) vec X``."""
        return sum(np.kron(k, k.conj()) for k in self.kraus)

    def __repr__(self) -> str:
        return f"Channel({self.in_dim}->{self.out_dim}, {len(self.kraus)} Kraus)"


def apply(ch: Channel, X) -> np.ndarray:
    return ch.apply(X)


def adjoint_apply(ch: Channel, Y) -> np.ndarray:
    return ch.adjoint_apply(Y)


def identity_channel(n: int) -> Channel:
    return Channel([np.eye(n)])


def unitary_channel(U) -> Channel:
    return Channel([np.asarray(U, dtype=complex)])


def partial_trace_channel(d1: int, d2: int, keep: int = 0) -> Channel:
    """Trace out one factor of ``C^d1 (x) C^d2``; ``keep=0`` keeps the first."""
    kraus = []
    if keep == 0:
        for j in range(d2):
            e = np.zeros((1, d2))
            e[0, j] = 1
            kraus.append(np.kron(np.eye(d1), e))
    else:
        for j in range(d1):
            e = np.zeros((1, d1))
            e[0, j] = 1
            kraus.append(np.kron(e, np.eye(d2)))
    return Channel(kraus)


def depolarizing_channel(p: float) -> Channel:
    """Qubit depolarizing map; ``p = 1`` sends every state to ``I/2``."""
    if not 0 <= p <= 1:
        raise QigError("depolarizing strength must lie in [0, 1]")
    ks = [np.sqrt(1 - 3 * p / 4) * np.eye(2)] + [np.sqrt(p / 4) * s for s in PAULI]
    return Channel(ks)


def random_channel(seed, in_dim: int, out_dim: int, env_dim: int = 1) -> Channel:
    """Seeded channel from a Haar-random Stinespring isometry ``C^in -> C^out (x) C^env``."""
    if min(in_dim, out_dim, env_dim) < 1:
        raise DimensionError("dimensions must be positive")
    if out_dim * env_dim < in_dim:
        raise DimensionError(
            f"isometry needs out_dim * env_dim >= in_dim ({out_dim}*{env_dim} < {in_dim})"
        )
    V = random_unitary(seed, out_dim * env_dim)[:, :in_dim]
    V = V.reshape(out_dim, env_dim, in_dim)
    return Channel([V[:, e, :] for e in range(env_dim)])


# --- monotonicity probes ---------------------------------------------------


@dataclass(frozen=True)
class ProbeResult:
    upstream: float
    downstream: float
    margin: float
    refloored: bool = False

    def holds(self, tol: float = 1e-9) -> bool:
        return self.margin >= -tol


def _output_state(ch: Channel, D, pd_floor: float) -> tuple[DensityMatrix, bool]:
    out = ch.apply(D)
    out = (out + out.conj().T) / 2
    out /= np.trace(out).real
    lam_min = float(np.linalg.eigvalsh(out)[0])
    if lam_min >= pd_floor:
        return DensityMatrix(out, pd_floor=pd_floor), False
    n = out.shape[0]
    mixed = (1 - REFLOOR_EPS) * out + REFLOOR_EPS * np.eye(n) / n
    if np.linalg.eigvalsh(mixed)[0] <= 0:
        raise QigError(f"output state is singular (min eigenvalue {lam_min:.3e}); case skipped")
    return DensityMatrix(mixed, pd_floor=0.0), True


def probe_fisher_monotonicity(D, A, f, ch: Channel, pd_floor: float = 1e-10) -> ProbeResult:
    """``F_D(A)`` versus ``F_{ch(D)}(ch(A))``; the margin is upstream minus downstream."""
    f = parse_function(f)
    up = fisher_info(MetricContext.build(D, f), A)
    out, refl = _output_state(ch, D, pd_floor)
    down = fisher_info(MetricContext(out, f), ch.apply(A))
    return ProbeResult(up, down, up - down, refl)


def probe_variance_monotonicity(D, A, f, ch: Channel, pd_floor: float = 1e-10) -> ProbeResult:
    """``phi_D[ch*(A)]`` (upstream) versus ``phi_{ch(D)}[A]`` (downstream); ``A`` lives on the output."""
    f = parse_function(f)
    lhs = variance(MetricContext.build(D, f), ch.adjoint_apply(A))
    out, refl = _output_state(ch, D, pd_floor)
    rhs = variance(MetricContext(out, f), A)
    return ProbeResult(lhs, rhs, rhs - lhs, refl)


# --- superoperator form ----------------------------------------------------


def _hs_matrix(op, n: int) -> np.ndarray:
    """Matrix of a linear map on n x n matrices in the row-major matrix-unit basis."""
    cols = []
    for k in range(n * n):
        E = np.zeros(n * n, dtype=complex)
        E[k] = 1
        cols.append(op(E.reshape(n, n)).reshape(-1))
    return np.array(cols).T


def superoperator_gap(D, f, ch: Channel) -> dict:
    """Smallest eigenvalues of ``J_{ch(D)} - ch J_D ch*`` and ``J_D^-1 - ch* J_{ch(D)}^-1 ch``.

    Both should be positive semidefinite as Hermitian forms on matrices with
    the Hilbert-Schmidt inner product.
    """
    f = parse_function(f)
    ctx_in = MetricContext.build(D, f)
    out, _ = _output_state(ch, D, 1e-10)
    ctx_out = MetricContext(out, f)
    n, m = ch.in_dim, ch.out_dim
    S = ch.superoperator()
    Sa = S.conj().T
    J_in = _hs_matrix(lambda X: apply_J(ctx_in, X), n)
    J_out = _hs_matrix(lambda X: apply_J(ctx_out, X), m)
    var_gap = J_out - S @ J_in @ Sa
    fis_gap = np.linalg.inv(J_in) - Sa @ np.linalg.inv(J_out) @ S
    herm = lambda M: (M + M.conj().T) / 2
    return {
        "variance_form": float(np.linalg.eigvalsh(herm(var_gap))[0]),
        "fisher_form": float(np.linalg.eigvalsh(herm(fis_gap))[0]),
    }


# --- seeded sweeps ---------------------------------------------------------


def case_rng(seed: int, index: int) -> np.random.Generator:
    """Per-case generator derived from ``(master seed, case index)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def sweep_case(seed: int, index: int, in_dims=(2, 3, 4), out_dims=(2, 3), floor: float = 0.01):
    """Seeded ``(D, A, channel)`` triple plus an output-side observable for the variance probe."""
    from .linalg import random_density, random_hermitian, random_tangent

    rng = case_rng(seed, index)
    n = int(rng.choice(in_dims))
    m = int(rng.choice(out_dims))
    env = -(-n // m) + int(rng.integers(0, 3))
    D = random_density(rng, n, floor)
    A = random_tangent(rng, n)
    ch = random_channel(rng, n, m, env)
    B = random_hermitian(rng, m)
    return D, A, ch, B


def monotonicity_sweep(seed: int, cases: int, functions, in_dims=(2, 3, 4), out_dims=(2, 3), tol: float = 1e-9):
    """Run both probes over ``cases`` seeded triples for every function; returns row dicts."""
    rows = []
    for i in range(cases):
        D, A, ch, B = sweep_case(seed, i, in_dims, out_dims)
        for f in functions:
            f = parse_function(f)
            row = {"case": i, "f": f.label, "in_dim": ch.in_dim, "out_dim": ch.out_dim, "env_dim": len(ch.kraus), "tol": tol}
            try:
                fp = probe_fisher_monotonicity(D, A, f, ch)
                vp = probe_variance_monotonicity(D, B, f, ch)
            except QigError as exc:
                row.update(skipped=str(exc))
                rows.append(row)
                continue
            row.update(
                fisher_upstream=fp.upstream,
                fisher_downstream=fp.downstream,
                fisher_margin=fp.margin,
                variance_lhs=vp.upstream,
                variance_rhs=vp.downstream,
                variance_margin=vp.margin,
                refloored=fp.refloored or vp.refloored,
                ok=fp.holds(tol) and vp.holds(tol),
            )
            rows.append(row)
    return rows
