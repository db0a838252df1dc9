import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qig.linalg import DimensionError, random_density, random_hermitian, random_tangent, random_unitary
from qig.metric import (
    MetricContext,
    apply_J,
    apply_J_inv,
    bloch_split,
    fisher_info,
    radial_limit_probe,
    sld,
    variance,
)
from qig.monotone import F_KM, F_MAX, F_MIN, beta_function, catalog

from conftest import SX

CATALOG = catalog()


def test_J_min_is_anticommutator(qubit_diag):
    for seed in range(20):
        D = random_density(seed, 3, 0.02)
        A = random_hermitian(seed + 1, 3)
        out = apply_J(MetricContext(D, F_MIN), A)
        assert np.linalg.norm(out - (D.data @ A + A @ D.data) / 2) < 1e-12


def test_J_inv_max_formula():
    D = random_density(4, 4, 0.05)
    A = random_hermitian(5, 4)
    Dinv = np.linalg.inv(D.data)
    out = apply_J_inv(MetricContext(D, F_MAX), A)
    assert np.linalg.norm(out - (Dinv @ A + A @ Dinv) / 2) < 1e-10


@pytest.mark.parametrize("f", CATALOG, ids=str)
def test_J_at_maximally_mixed(f):
    ctx = MetricContext.build(np.eye(3) / 3, f)
    A = random_hermitian(0, 3)
    assert np.allclose(apply_J(ctx, A), A / 3, atol=1e-15)


def test_J_km_logarithmic_mean(qubit_diag):
    out = apply_J(MetricContext.build(qubit_diag, F_KM), SX)
    expected = 0.5 / math.log(3)  # (0.75 - 0.25) / (log 0.75 - log 0.25)
    assert out[0, 1] == pytest.approx(expected, rel=1e-14)
    assert out[0, 1] == pytest.approx(0.45511961331341866, rel=1e-14)
    assert np.allclose(np.diag(out), 0)


@pytest.mark.parametrize("f", CATALOG, ids=str)
def test_round_trip(f):
    for seed in range(100):
        n = 2 + seed % 4
        ctx = MetricContext(random_density(seed, n, 0.01), f)
        A = random_hermitian(seed + 7, n)
        assert np.linalg.norm(apply_J(ctx, apply_J_inv(ctx, A)) - A) < 1e-10 * max(1, np.linalg.norm(A))


def test_dimension_mismatch():
    ctx = MetricContext.build(np.eye(2) / 2, F_MIN)
    with pytest.raises(DimensionError):
        apply_J(ctx, np.eye(3))


def test_fisher_commuting_cases():
    ctx = MetricContext.build(np.eye(2) / 2, F_KM)
    assert fisher_info(ctx, SX / 2) == pytest.approx(1.0, rel=1e-14)
    p, a = 0.3, 0.2
    for f in CATALOG:
        ctx = MetricContext.build(np.diag([p, 1 - p]), f)
        A = np.diag([a, -a])
        assert fisher_info(ctx, A) == pytest.approx(a * a / p + a * a / (1 - p), rel=1e-13)
        assert variance(ctx, A) == pytest.approx(p * a * a + (1 - p) * a * a, rel=1e-13)


def test_variance_min_formula():
    D = random_density(3, 3, 0.05)
    A, B = random_hermitian(1, 3), random_hermitian(2, 3)
    v = variance(MetricContext(D, F_MIN), A, B)
    assert v == pytest.approx(0.5 * np.trace(D.data @ (A @ B + B @ A)).real, rel=1e-12)


def test_metric_is_symmetric_and_positive():
    for f in CATALOG:
        ctx = MetricContext(random_density(8, 3, 0.02), f)
        A, B = random_tangent(1, 3), random_tangent(2, 3)
        assert fisher_info(ctx, A, B) == pytest.approx(fisher_info(ctx, B, A), rel=1e-12)
        assert fisher_info(ctx, A) > 0
        # positive definiteness with constant 1/max multiplier
        assert fisher_info(ctx, A) >= np.linalg.norm(A.data) ** 2 / ctx.multipliers.max() * (1 - 1e-12)


def test_duality():
    for seed in range(30):
        for f in CATALOG:
            ctx = MetricContext(random_density(seed, 3, 0.02), f)
            A = random_hermitian(seed + 100, 3)
            JA = apply_J(ctx, A)
            assert fisher_info(ctx, JA) == pytest.approx(variance(ctx, A), rel=1e-10)
            L = apply_J_inv(ctx, A)
            assert variance(ctx, L) == pytest.approx(fisher_info(ctx, A), rel=1e-10)
            assert np.trace(A @ apply_J(ctx, apply_J_inv(ctx, A))).real == pytest.approx(np.trace(A @ A).real, rel=1e-10)


def test_metric_and_variance_ordering():
    for seed in range(200):
        n = 2 + seed % 3
        D = random_density(seed, n, 0.01)
        A = random_tangent(seed + 1000, n)
        vals = {f.label: fisher_info(MetricContext(D, f), A) for f in CATALOG}
        vars_ = {f.label: variance(MetricContext(D, f), A) for f in CATALOG}
        for k in vals:
            assert vals["min"] - 1e-9 <= vals[k] <= vals["max"] + 1e-9
            assert vars_["max"] - 1e-9 <= vars_[k] <= vars_["min"] + 1e-9


@given(st.integers(0, 10_000))
def test_unitary_covariance(seed):
    n = 2 + seed % 3
    D = random_density(seed, n, 0.01)
    A = random_tangent(seed + 1, n).data
    U = random_unitary(seed + 2, n)
    for f in (F_MIN, F_KM, beta_function(-0.3)):
        a = fisher_info(MetricContext(D, f), A)
        b = fisher_info(MetricContext.build(U @ D.data @ U.conj().T, f), U @ A @ U.conj().T)
        assert a == pytest.approx(b, rel=1e-10)


def test_commuting_collapse():
    for seed in range(50):
        n = 2 + seed % 4
        D = random_density(seed, n, 0.01)
        U = D.eigenvectors
        A = U @ np.diag(np.random.default_rng(seed).normal(size=n)) @ U.conj().T
        A -= np.trace(A).real / n * np.eye(n)
        ref = np.trace(np.linalg.inv(D.data) @ A @ A).real
        for f in CATALOG:
            assert fisher_info(MetricContext(D, f), A) == pytest.approx(ref, rel=1e-11)


def test_degenerate_spectrum_is_basis_independent():
    # D with a doubly degenerate eigenvalue, rotated inside the degenerate block
    D0 = np.diag([0.4, 0.4, 0.2]).astype(complex)
    V = np.eye(3, dtype=complex)
    V[:2, :2] = random_unitary(3, 2)
    A = random_tangent(4, 3).data
    for f in CATALOG:
        a = fisher_info(MetricContext.build(D0, f), A)
        b = fisher_info(MetricContext.build(V @ D0 @ V.conj().T, f), V @ A @ V.conj().T)
        assert a == pytest.approx(b, rel=1e-12)


def test_sld_properties(qubit_diag):
    L = sld(qubit_diag, SX)
    assert L[0, 1] == pytest.approx(2.0, rel=1e-14)  # 2 A_01 / (0.75 + 0.25)
    D = random_density(2, 4, 0.02)
    A = random_tangent(3, 4).data
    L = sld(D, A)
    assert np.linalg.norm(D.data @ L + L @ D.data - 2 * A) < 1e-12
    assert np.trace(A @ L).real == pytest.approx(np.trace(D.data @ L @ L).real, rel=1e-10)
    assert np.allclose(L, apply_J_inv(MetricContext(D, F_MIN), A))
    # commuting case
    Dd = np.diag([0.6, 0.3, 0.1])
    Ad = np.diag([0.1, -0.05, -0.05])
    assert np.allclose(sld(Dd, Ad), np.linalg.inv(Dd) @ Ad)


@pytest.mark.parametrize("f", CATALOG, ids=str)
@pytest.mark.parametrize("r", [0.01, 0.2, 0.5, 0.9, 0.999])
def test_bloch_split(f, r):
    s = bloch_split(f, r)
    assert s.max_error < 1e-10 * max(1, s.tangential)
    assert s.radial == pytest.approx(1 / (1 - r * r), rel=1e-14)


def test_bloch_split_min_tangential_is_one():
    for r in np.linspace(0.05, 0.95, 10):
        assert bloch_split(F_MIN, r).tangential == pytest.approx(1.0, rel=1e-14)
    s = bloch_split(F_KM, 1e-9)
    assert s.radial == pytest.approx(1) and s.tangential == pytest.approx(1)


def test_bloch_split_km_half():
    # tangential = 1/(2 m(0.75, 0.25)) with the logarithmic mean
    assert bloch_split(F_KM, 0.5).tangential == pytest.approx(math.log(3), rel=1e-13)


def test_bloch_split_rejects_bad_radius():
    with pytest.raises(ValueError):
        bloch_split(F_MIN, 1.0)


def test_radial_limit_probe():
    rep = radial_limit_probe(F_MIN)
    assert rep.verdict == "converges" and rep.tangential[-1] == pytest.approx(1.0)
    assert radial_limit_probe(F_MAX).verdict == "diverges"
    assert radial_limit_probe(F_KM).verdict == "diverges"
    assert radial_limit_probe(beta_function(0.5)).verdict == "converges"
    assert radial_limit_probe(beta_function(-0.3)).verdict == "diverges"
    for f in CATALOG:
        assert radial_limit_probe(f).consistent
