"""Command line entry point: ``qig fisher|crbound|monotonicity|curvature|divergence``.

Each subcommand reads a JSON config (``--config`` file and/or ``--inline``
JSON merged on top), runs deterministically and writes either

* JSON: ``{"version", "config_echo", "rows", "summary"}``, or
* CSV: a ``# qig <version>`` line, a header row and ``%.17g`` numbers.

Exit status: 0 when every verdict passed, 2 when the run completed with a
verdict failure (a finding, not a crash), 1 on operational errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channels import (
    identity_channel,
    monotonicity_sweep,
    probe_fisher_monotonicity,
    probe_variance_monotonicity,
    superoperator_gap,
    sweep_case,
)
from .divergences import alpha_entropy, alpha_kernel, quasi_entropy, ruskai_bridge
from .estimation import (
    CR_TOL,
    EstimatorBank,
    block_matrix_oracle,
    builtin_models,
    efficient_bank,
    fisher_matrix,
    matrix_cr_check,
    noisy_bank,
    scalar_cr_check,
)
from .geometry import Chart, gibbs_scan, scalar_curvature
from .io import decode_matrix
from .linalg import QigError, as_density
from .metric import MetricContext, fisher_info, variance
from .monotone import beta_function, catalog, parse_function

log = logging.getLogger("qig")

EXIT_OK, EXIT_ERROR, EXIT_VERDICT = 0, 1, 2
ORDER_TOL = 1e-9


class ConfigError(QigError):
    pass


def _functions(cfg: dict) -> list:
    specs = cfg.get("functions") or ([cfg["f"]] if "f" in cfg else None)
    if specs is None:
        return catalog()
    return [parse_function(s) for s in specs]


def _matrix_list(cfg: dict, many: str, one: str) -> list:
    if many in cfg:
        return [decode_matrix(x) for x in cfg[many]]
    if one in cfg:
        return [decode_matrix(cfg[one])]
    raise ConfigError(f"config needs {many!r} or {one!r}")


# --- commands --------------------------------------------------------------


def cmd_fisher(cfg: dict, seed: int):
    states = _matrix_list(cfg, "states", "state")
    tangents = _matrix_list(cfg, "tangents", "tangent")
    fs = _functions(cfg)
    rows = []
    failures = 0
    for si, D in enumerate(states):
        D = as_density(D)
        for ti, A in enumerate(tangents):
            vals = {}
            for f in fs:
                ctx = MetricContext(D, f)
                fi, va = fisher_info(ctx, A), variance(ctx, A)
                vals[f.label] = fi
                rows.append({"f": f.label, "state": si, "tangent": ti, "fisher_info": fi, "variance": va, "tol": ORDER_TOL})
            if "min" in vals and "max" in vals:
                lo, hi = vals["min"], vals["max"]
                scale = ORDER_TOL * max(1.0, abs(hi))
                bad = [k for k, v in vals.items() if not lo - scale <= v <= hi + scale]
                failures += len(bad)
    summary = {"rows": len(rows), "ordering_violations": failures, "ordering_checked": any(r["f"] == "min" for r in rows)}
    return rows, summary, failures == 0


def _bank(cfg: dict, model, f, seed: int) -> EstimatorBank:
    est = cfg.get("estimator", "optimal")
    if est == "optimal":
        return efficient_bank(model, f)
    if est == "noisy":
        return noisy_bank(model, f, cfg.get("noise_seed", seed), cfg.get("noise_scale", 0.5))
    if isinstance(est, dict) and "observables" in est:
        return EstimatorBank.checked(model, [decode_matrix(x) for x in est["observables"]])
    raise ConfigError(f"unknown estimator spec {est!r}")


def cmd_crbound(cfg: dict, seed: int):
    mcfg = cfg.get("model")
    if not isinstance(mcfg, dict) or "name" not in mcfg:
        raise ConfigError("crbound needs model: {name, params}")
    model = builtin_models(mcfg["name"], mcfg.get("params", {}))
    rows = []
    ok = True
    for f in _functions(cfg):
        bank = _bank(cfg, model, f, seed)
        cr = matrix_cr_check(model, bank, f)
        blk = block_matrix_oracle(model, bank, f)
        row = {
            "f": f.label,
            "param_dim": model.param_dim,
            "covariance": cr.cov.tolist(),
            "fisher_matrix": fisher_matrix(model, f).tolist(),
            "bound": cr.bound.tolist(),
            "gap_spectrum": cr.gap_eigenvalues.tolist(),
            "min_eig_of_gap": cr.min_eig_of_gap,
            "block_min_eigenvalue": blk.min_eigenvalue,
            "block_psd": blk.psd,
            "tol": CR_TOL,
        }
        if model.param_dim == 1:
            sc = scalar_cr_check(model, bank.observables[0], f)
            row.update(scalar_variance=sc.variance, scalar_bound=sc.bound, scalar_slack=sc.slack)
        ok &= cr.holds() and blk.psd and blk.implication_holds
        rows.append(row)
    return rows, {"model": model.name, "all_bounds_hold": ok}, ok


def cmd_monotonicity(cfg: dict, seed: int):
    cases = int(cfg.get("cases", 1000))
    fs = _functions(cfg)
    tol = float(cfg.get("tol", 1e-9))
    rows = monotonicity_sweep(seed, cases, fs, tuple(cfg.get("in_dims", (2, 3, 4))), tuple(cfg.get("out_dims", (2, 3))), tol)
    if cfg.get("identity_controls", True):
        for i in range(int(cfg.get("controls", 5))):
            D, A, _, _ = sweep_case(seed, cases + i)
            ch = identity_channel(D.dim)
            for f in fs:
                fp = probe_fisher_monotonicity(D, A, f, ch)
                vp = probe_variance_monotonicity(D, A, f, ch)
                rows.append({
                    "case": f"control-{i}", "f": f.label, "in_dim": D.dim, "out_dim": D.dim, "env_dim": 1, "tol": tol,
                    "fisher_upstream": fp.upstream, "fisher_downstream": fp.downstream, "fisher_margin": fp.margin,
                    "variance_lhs": vp.upstream, "variance_rhs": vp.downstream, "variance_margin": vp.margin,
                    "refloored": False, "ok": fp.holds(tol) and vp.holds(tol),
                })
    done = [r for r in rows if "skipped" not in r]
    summary = {
        "cases": cases,
        "probes": len(done),
        "skipped": len(rows) - len(done),
        "violations": sum(not r["ok"] for r in done),
        "min_fisher_margin": min((r["fisher_margin"] for r in done), default=None),
        "min_variance_margin": min((r["variance_margin"] for r in done), default=None),
        "refloored": sum(bool(r["refloored"]) for r in done),
        "tol": tol,
    }
    if cfg.get("superoperator", False):
        gaps = []
        for i in range(int(cfg.get("superoperator_cases", 20))):
            D, _, ch, _ = sweep_case(seed, 10_000 + i, in_dims=(2, 3), out_dims=(2, 3))
            for f in fs:
                g = superoperator_gap(D, f, ch)
                gaps.append(min(g.values()))
        summary["superoperator_min_eigenvalue"] = min(gaps)
        summary["superoperator_tol"] = 1e-8
    ok = summary["violations"] == 0 and summary.get("superoperator_min_eigenvalue", 0.0) >= -1e-8
    return rows, summary, ok


def _beta_grid(spec) -> np.ndarray:
    if spec is None:
        spec = {"start": 0.0, "stop": 3.0, "step": 0.1}
    if isinstance(spec, dict):
        k = int(round((spec["stop"] - spec["start"]) / spec["step"]))
        return np.round(spec["start"] + spec["step"] * np.arange(k + 1), 12)
    return np.asarray(spec, dtype=float)


def cmd_curvature(cfg: dict, seed: int):
    f = parse_function(cfg.get("f", "km"))
    h = float(cfg.get("h", 1e-2))
    mode = cfg.get("mode", "gibbs")
    rows = []
    if mode == "gibbs":
        hams = _matrix_list(cfg, "hamiltonians", "H")
        violations = []
        for hi, H in enumerate(hams):
            scan = gibbs_scan(H, f, _beta_grid(cfg.get("betas")), h)
            for p in scan.points:
                rows.append({"hamiltonian": hi, "beta": p.beta, "scalar_curvature": p.scalar_curvature,
                             "error_gauge": p.error_gauge, "step": p.step, "skipped": p.skipped or ""})
            violations += [{"hamiltonian": hi, "beta_prev": v[0], "beta_next": v[1], "increase": v[2], "allowed": v[3]}
                           for v in scan.violations]
        summary = {"f": f.label, "hamiltonians": len(hams), "monotone_decreasing": not violations, "violations": violations}
        return rows, summary, not violations
    if mode == "points":
        n = int(cfg.get("n", 2))
        chart = Chart(n)
        if "points" in cfg:
            pts = [np.asarray(p, dtype=float) for p in cfg["points"]]
        else:
            rp = cfg.get("random_points", {})
            pts = _random_chart_points(chart, rp.get("count", 20), rp.get("seed", seed), rp.get("max_radius", 0.7))
        expect = cfg.get("expect")
        tol = float(cfg.get("tol", 1e-3))
        fails = 0
        for i, x in enumerate(pts):
            rep = scalar_curvature(chart, f, x, h)
            row = {"point": i, "coords": x.tolist(), "scalar_curvature": rep.richardson_estimate,
                   "unextrapolated": rep.scalar_curvature, "error_gauge": rep.error_gauge, "step": h}
            if expect is not None:
                row.update(expected=expect, tol=tol, ok=abs(rep.richardson_estimate - expect) <= tol)
                fails += not row["ok"]
            rows.append(row)
        return rows, {"f": f.label, "n": n, "points": len(pts), "failures": fails}, fails == 0
    raise ConfigError(f"unknown curvature mode {mode!r}")


def _random_chart_points(chart: Chart, count: int, seed: int, max_radius: float) -> list:
    """Seeded interior points: for qubits a Bloch ball of radius ``max_radius``, else shrunken random states."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        v = rng.normal(size=chart.dim)
        v *= max_radius * rng.uniform() ** (1 / chart.dim) / np.linalg.norm(v)
        if chart.n > 2:
            v *= 1.0 / chart.n
        pts.append(v)
    return pts


def cmd_divergence(cfg: dict, seed: int):
    pairs = cfg.get("pairs")
    if not pairs:
        raise ConfigError("divergence needs a non-empty 'pairs' list of {D1, D2}")
    alphas = [float(a) for a in cfg.get("alphas", [-0.6, -0.2, 0.0, 0.4, 0.8])]
    tol = float(cfg.get("tol", 1e-10))
    rows = []
    fails = 0
    for pi, p in enumerate(pairs):
        D1, D2 = as_density(decode_matrix(p["D1"])), as_density(decode_matrix(p["D2"]))
        for a in alphas:
            closed = alpha_entropy(D1, D2, a)
            quasi = quasi_entropy(D1, D2, alpha_kernel(a))
            diff = abs(closed - quasi)
            ok = diff <= tol * max(1.0, abs(closed))
            fails += not ok
            rows.append({"kind": "entropy", "pair": pi, "alpha": a, "s_alpha": closed, "quasi_entropy": quasi,
                         "abs_diff": diff, "tol": tol, "ok": ok})
    grid = np.asarray(cfg.get("bridge_grid", np.geomspace(1e-2, 1e2, 9)), dtype=float)
    for a in alphas:
        fb = ruskai_bridge(alpha_kernel(a), grid)
        ref = beta_function((1 - a) / 2)(grid) if a != 1.0 else None
        for t, x, y in zip(grid, fb, ref):
            diff = abs(x - y)
            ok = diff <= tol * max(1.0, abs(y))
            fails += not ok
            rows.append({"kind": "bridge", "alpha": a, "t": float(t), "f_bridge": float(x), "f_beta": float(y),
                         "abs_diff": diff, "tol": tol, "ok": ok})
    return rows, {"pairs": len(pairs), "alphas": alphas, "failures": fails}, fails == 0


COMMANDS = {
    "fisher": cmd_fisher,
    "crbound": cmd_crbound,
    "monotonicity": cmd_monotonicity,
    "curvature": cmd_curvature,
    "divergence": cmd_divergence,
}


# --- output ----------------------------------------------------------------


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def render(command: str, cfg: dict, rows: list, summary: dict, fmt: str) -> str:
    rows, summary = _plain(rows), _plain(summary)
    if fmt == "json":
        doc = {"version": __version__, "config_echo": {"command": command, **cfg}, "rows": rows, "summary": summary}
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    header = []
    for r in rows:
        for k in r:
            if k not in header:
                header.append(k)
    buf = io.StringIO()
    buf.write(f"# qig {__version__}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(r[k]) if k in r else "" for k in header])
    return buf.getvalue()


def load_config(path: str | None, inline: str | None) -> dict:
    cfg: dict = {}
    if path:
        try:
            cfg = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if inline:
        try:
            cfg.update(json.loads(inline))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad --inline JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def run(command: str, cfg: dict, seed: int, fmt: str) -> tuple[str, int]:
    rows, summary, ok = COMMANDS[command](cfg, seed)
    text = render(command, {**cfg, "seed": seed}, rows, summary, fmt)
    return text, EXIT_OK if ok else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qig", description="Monotone quantum Fisher information toolkit")
    p.add_argument("--version", action="version", version=f"qig {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON config file")
        s.add_argument("--inline", help="inline JSON merged over the config file")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--out", help="output path (default stdout)")
        s.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.inline)
        text, code = run(args.command, cfg, args.seed, args.format)
    except (QigError, KeyError, TypeError, ValueError) as exc:
        log.error("%s: %s", args.command, exc)
        return EXIT_ERROR
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_VERDICT:
        log.warning("%s: run completed with verdict failures (see summary)", args.command)
    return code


if __name__ == "__main__":
    sys.exit(main())
