"""Acceptance gates. Each test prints one ``[PASS]``/``[FAIL]`` line.

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

import sys
import time

import numpy as np
import pytest

from qig.channels import monotonicity_sweep, random_channel, superoperator_gap
from qig.divergences import (
    alpha_entropy,
    alpha_kernel,
    hessian_recovery,
    metric_from_alpha,
    quasi_entropy,
    ruskai_bridge,
    wyd_skew_check,
)
from qig.estimation import (
    block_matrix_oracle,
    efficient_bank,
    matrix_cr_check,
    noisy_bank,
    optimal_estimator,
    random_model,
    scalar_cr_check,
)
from qig.geometry import Chart, curvature_at_state, gibbs_scan, scalar_curvature, seeded_hamiltonian
from qig.linalg import random_density, random_hermitian, random_tangent, random_unitary
from qig.metric import MetricContext, apply_J, apply_J_inv, bloch_split, fisher_info, sld, variance
from qig.monotone import F_KM, F_MAX, F_MIN, beta_function, catalog
from qig.oracles import km_integral_oracle

CATALOG = catalog()


@pytest.fixture
def report(capsys):
    start = time.perf_counter()

    def _report(label, ok, detail, budget=None):
        elapsed = time.perf_counter() - start
        in_time = budget is None or elapsed < budget
        line = f"[{'PASS' if ok and in_time else 'FAIL'}] {label}: {detail} ({elapsed:.2f}s"
        line += f" / budget {budget:g}s)" if budget else ")"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
        assert in_time, line

    return _report


def test_c01_function_envelope(report):
    t = np.logspace(-4, 4, 1000)
    worst = {"norm": 0.0, "sym": 0.0, "env": 0.0}
    for f in CATALOG:
        worst["norm"] = max(worst["norm"], abs(float(f(1.0)) - 1))
        worst["sym"] = max(worst["sym"], float(np.max(np.abs(f(t) - t * f(1 / t)))))
        lo, hi = 2 * t / (1 + t), (1 + t) / 2
        ft = f(t)
        worst["env"] = max(worst["env"], float(np.max(np.maximum(lo - ft, ft - hi))))
    ok = worst["norm"] < 1e-12 and worst["sym"] < 1e-12 and worst["env"] <= 1e-12
    report("C1 function envelope", ok, f"|f(1)-1|={worst['norm']:.1e} sym={worst['sym']:.1e} envelope excess={worst['env']:.1e}", 1)


def test_c02_special_case_collapse(report):
    worst = 0.0
    for seed in range(200):
        n = 2 + seed % 5
        D = random_density(seed, n, 0.01)
        A = random_hermitian(seed + 10_000, n)
        Dd, Di = D.data, D.inverse()
        e1 = np.linalg.norm(apply_J(MetricContext(D, F_MIN), A) - (Dd @ A + A @ Dd) / 2)
        e2 = np.linalg.norm(apply_J_inv(MetricContext(D, F_MAX), A) - (Di @ A + A @ Di) / 2)
        worst = max(worst, e1, e2)
    report("C2 special-case collapse", worst < 1e-10, f"max Frobenius error {worst:.2e} over 200 cases", 5)


def test_c03_commuting_normalization(report):
    worst_f = worst_v = 0.0
    for seed in range(200):
        n = 2 + seed % 5
        D = random_density(seed, n, 0.01)
        V = D.eigenvectors
        a = np.random.default_rng(seed).normal(size=n)
        A = V @ np.diag(a) @ V.conj().T
        classical_f = float(np.sum(a**2 / D.eigenvalues))
        classical_v = float(np.sum(a**2 * D.eigenvalues))
        for f in CATALOG:
            ctx = MetricContext(D, f)
            worst_f = max(worst_f, abs(fisher_info(ctx, A) - classical_f) / classical_f)
            worst_v = max(worst_v, abs(variance(ctx, A) - classical_v) / classical_v)
    ok = worst_f < 1e-11 and worst_v < 1e-11
    report("C3 commuting normalization", ok, f"metric rel err {worst_f:.1e}, variance rel err {worst_v:.1e}")


def test_c04_integral_oracles(report):
    worst = {"metric": 0.0, "variance": 0.0, "sld_exp": 0.0}
    for seed in range(50):
        n = 2 + seed % 3
        D = random_density(seed, n, 0.05)
        A, B = random_hermitian(seed + 1, n), random_hermitian(seed + 2, n)
        ctx = MetricContext(D, F_KM)
        q = km_integral_oracle(D, A, B, "metric")
        worst["metric"] = max(worst["metric"], abs(q - fisher_info(ctx, A, B)) / max(abs(q), 1e-12))
        q = km_integral_oracle(D, A, B, "variance")
        worst["variance"] = max(worst["variance"], abs(q - variance(ctx, A, B)) / max(abs(q), 1e-12))
        L = km_integral_oracle(D, A, kind="sld_exp")
        worst["sld_exp"] = max(worst["sld_exp"], np.linalg.norm(L - sld(D, A)) / np.linalg.norm(L))
    ok = max(worst.values()) < 1e-8
    report("C4 spectral vs integral", ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()), 30)


def test_c05_monotonicity_sweeps(report):
    rows = monotonicity_sweep(2024, 170, CATALOG)
    done = [r for r in rows if "skipped" not in r]
    margin = min(min(r["fisher_margin"], r["variance_margin"]) for r in done)
    gap = np.inf
    for seed in range(12):
        n = 2 + seed % 2
        D = random_density(seed, n, 0.02)
        ch = random_channel(seed, n, 2 + (seed // 2) % 2, 2)
        for f in CATALOG:
            gap = min(gap, *superoperator_gap(D, f, ch).values())
    ok = len(done) >= 1000 and margin >= -1e-9 and gap >= -1e-8
    report("C5 monotonicity sweeps", ok,
           f"{len(done)} probes ({len(rows) - len(done)} skipped), min margin {margin:.2e}, superoperator min eig {gap:.2e}", 120)


def test_c06_scalar_cramer_rao(report):
    worst_slack, worst_opt = np.inf, 0.0
    for f in CATALOG:
        for seed in range(100):
            m = random_model(seed, 2 + seed % 3, 1)
            worst_opt = max(worst_opt, abs(scalar_cr_check(m, optimal_estimator(m, f), f).slack))
            noisy = noisy_bank(m, f, seed).observables[0]
            worst_slack = min(worst_slack, scalar_cr_check(m, noisy, f).slack)
    ok = worst_slack >= -1e-9 and worst_opt <= 1e-9
    report("C6 scalar Cramer-Rao", ok, f"min slack {worst_slack:.2e}, optimal |slack| {worst_opt:.1e}", 30)


def test_c07_matrix_cramer_rao(report):
    worst_gap, worst_block, worst_eff = np.inf, np.inf, 0.0
    for seed in range(100):
        m = random_model(seed, 3, 2 + seed % 2)
        f = CATALOG[seed % len(CATALOG)]
        bank = noisy_bank(m, f, seed)
        worst_gap = min(worst_gap, matrix_cr_check(m, bank, f).min_eig_of_gap)
        blk = block_matrix_oracle(m, bank, f)
        worst_block = min(worst_block, blk.min_eigenvalue if blk.psd else -np.inf)
        cr = matrix_cr_check(m, efficient_bank(m, f), f)
        worst_eff = max(worst_eff, float(np.max(np.abs(cr.cov - cr.bound))))
    ok = worst_gap >= -1e-9 and worst_block >= -1e-9 and worst_eff < 1e-9
    report("C7 matrix Cramer-Rao", ok,
           f"min gap eig {worst_gap:.2e}, min block eig {worst_block:.2e}, efficient residual {worst_eff:.1e}", 60)


def test_c08_divergences(report):
    alphas = (-0.6, -0.2, 0.0, 0.4, 0.8)
    ent = 0.0
    for seed in range(50):
        D1, D2 = random_density(seed, 2 + seed % 3, 0.02), random_density(seed + 500, 2 + seed % 3, 0.02)
        a = alphas[seed % 5]
        ent = max(ent, abs(quasi_entropy(D1, D2, alpha_kernel(a)) - alpha_entropy(D1, D2, a)))
    hess, ratios = 0.0, []
    for seed in range(10):
        D = random_density(seed, 3, 0.05)
        A, B = random_tangent(seed + 1, 3).data, random_tangent(seed + 2, 3).data
        a = alphas[seed % 5]
        exact = metric_from_alpha(D, A, B, a)
        hess = max(hess, abs(hessian_recovery(D, A, B, a, h=1e-4) - exact) / abs(exact))
    D, A = random_density(99, 2, 0.1), random_tangent(98, 2).data
    exact = metric_from_alpha(D, A, A, 0.4)
    errs = [abs(hessian_recovery(D, A, A, 0.4, h=h) - exact) for h in (1e-3, 5e-4, 2.5e-4)]
    ratios = [e1 / e2 for e1, e2 in zip(errs, errs[1:])]
    t = np.logspace(-3, 3, 100)
    bridge = max(float(np.max(np.abs(ruskai_bridge(alpha_kernel(a), t) - beta_function((1 - a) / 2)(t))))
                 for a in alphas)
    wyd = 0.0
    for seed in range(20):
        r = wyd_skew_check(random_density(seed, 3, 0.02), random_hermitian(seed + 3, 3), 0.1 + 0.04 * seed)
        wyd = max(wyd, r.error / max(1.0, abs(r.metric_side)))
    ok = ent < 1e-10 and hess < 1e-5 and all(3.5 <= q <= 4.5 for q in ratios) and bridge < 1e-10 and wyd < 1e-9
    report("C8 divergence machinery", ok,
           f"entropy {ent:.1e}, hessian rel {hess:.1e}, h-ratios {', '.join(f'{q:.2f}' for q in ratios)}, "
           f"bridge {bridge:.1e}, WYD {wyd:.1e}", 60)


def test_c09_curvature_gate(report):
    chart = Chart(2)
    rng = np.random.default_rng(9)
    worst = 0.0
    pts = []
    while len(pts) < 20:
        x = rng.uniform(-0.75, 0.75, 3)
        if np.linalg.norm(x) < 0.75:
            pts.append(x)
    for x in pts:
        worst = max(worst, abs(scalar_curvature(chart, F_MIN, x).value - 6.0))
    # invariance is compared at h = 5e-3: the residual after Richardson scales as h^4 and is ~1e-6 at h = 1e-2
    iso = 0.0
    for seed in range(5):
        D = random_density(seed, 2, 0.15).data
        U = random_unitary(seed + 50, 2)
        for f in (F_MIN, F_KM):
            iso = max(iso, abs(curvature_at_state(D, f, 5e-3).value - curvature_at_state(U @ D @ U.conj().T, f, 5e-3).value))
    ok = worst <= 1e-3 and iso < 1e-6
    report("C9 curvature gate", ok, f"max |Scal - 6| {worst:.1e} over 20 points, isometry drift {iso:.1e}", 60)


def test_c10_gibbs_conjecture_evidence(report):
    violations = []
    for n, count in ((2, 50), (3, 10)):
        for seed in range(count):
            scan = gibbs_scan(seeded_hamiltonian(seed, n), F_KM)
            skipped = [p.beta for p in scan.points if p.skipped]
            if skipped:
                violations.append((n, seed, "skipped", skipped))
            violations += [(n, seed, *v) for v in scan.violations]
    detail = "0 violations across 50 qubit + 10 qutrit scans" if not violations else f"violations: {violations}"
    report("C10 Kubo-Mori Gibbs curvature scan", not violations, detail, 600)


def test_c11_bloch_decomposition(report):
    err = radial_spread = 0.0
    for r in np.linspace(0.05, 0.95, 19):
        splits = [bloch_split(f, r) for f in CATALOG]
        err = max(err, *(s.max_error for s in splits))
        radial = [s.radial_direct for s in splits]
        radial_spread = max(radial_spread, max(radial) - min(radial))
    ok = err < 1e-10 and radial_spread < 1e-10
    report("C11 Bloch decomposition", ok, f"formula vs direct {err:.1e}, radial spread across f {radial_spread:.1e}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
