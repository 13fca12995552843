"""Command-line front end: ingest models, run analyses and experiment
sweeps, and emit machine-readable reports.

Formats are JSON in, JSON or CSV out. Exit codes: 0 success, 2 input
validation failure, 3 resource cap exceeded, 4 numerical failure (including
a failed oracle cross-check). Reports embed the full invocation; the
experiment CSV keeps the fixed header
`averCorr,layer,mean_leakage,var_leakage,algorithm,seed_count` with rows
sorted deterministically. The env var PDP_THREADS caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .errors import InfeasibleCorrelation, PrivacyModelError, SearchSpaceExceeded
from .model_discrete import (
    JointDistribution,
    QuerySpec,
    global_sensitivity,
    load_distribution,
)
from .model_gaussian import (
    GaussianModel,
    leakage_gaussian,
    load_gaussian_model,
    max_leakage_gaussian,
    mu0_expand,
)
from .oracle import pdp_exact_discrete, pdp_numeric_gaussian
from .report import AdversaryNode
from .synth import gen_covariance, gen_whg_edges
from .whg import fast_search, full_space_search, search_synthetic

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CAP = 3
EXIT_NUMERIC = 4

# the full-space search over a real distribution is far costlier per node
# than the synthetic variant, so the front end refuses earlier than the
# library default of 18
CLI_FULL_CAP = 15


def _read_json(path: str):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _load_any(path: str):
    """Classify an input file as a discrete table or a Gaussian model."""
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    if "sigma" in data:
        return "gaussian", load_gaussian_model(data)
    if "probs" in data:
        return "discrete", load_distribution(data)
    raise ValueError(f'{path}: need either "probs" (discrete) or "sigma" (gaussian)')


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _query_for(dist: JointDistribution, text: str | None) -> QuerySpec:
    if text is None:
        return QuerySpec.sum_query(dist.n)
    q = QuerySpec.parse(text)
    if len(q.coefficients) != dist.n:
        raise ValueError(
            f"query has {len(q.coefficients)} coefficients for {dist.n} tuples"
        )
    return q


def _workers(n_cells: int) -> int:
    env = os.environ.get("PDP_THREADS", "")
    if env.strip():
        cap = int(env)
        if cap < 1:
            raise ValueError("PDP_THREADS must be a positive integer")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_cells))


def cmd_analyze_discrete(args) -> int:
    dist = load_distribution(_read_json(args.dist_file))
    query = _query_for(dist, args.query)
    if args.mode == "full":
        _, report = full_space_search(
            dist, query, args.lam, cap=CLI_FULL_CAP, force=args.force
        )
    else:
        _, report = fast_search(dist, query, args.lam)
    payload = report.to_json()
    payload["invocation"] = _invocation(args)
    _emit(payload, args.out)
    return EXIT_OK


def _parse_adversary(text: str, n: int) -> tuple[int, tuple[int, ...]]:
    parts = [int(t) for t in text.split(",") if t.strip() != ""]
    if not parts:
        raise ValueError("--adversary needs at least the attacked index")
    i, K = parts[0], tuple(sorted(parts[1:]))
    if not 0 <= i < n or any(not 0 <= k < n for k in K) or i in K:
        raise ValueError(f"adversary ({i}, {K}) invalid for n={n}")
    return i, K


def cmd_analyze_gaussian(args) -> int:
    model = load_gaussian_model(_read_json(args.model_file))
    if bool(args.adversary) == bool(args.all):
        raise ValueError("pass exactly one of --adversary or --all")
    if args.all:
        report = max_leakage_gaussian(model, force=args.force)
        payload = report.to_json()
    else:
        i, K = _parse_adversary(args.adversary, model.n)
        exp = mu0_expand(model, i, K)
        payload = {
            "i": i,
            "K": list(K),
            "leakage": leakage_gaussian(model, i, K),
            "mu0_coef_i": exp.coef_i,
            "sigma0_sq": exp.sigma0_sq,
        }
    payload["invocation"] = _invocation(args)
    _emit(payload, args.out)
    return EXIT_OK


def _all_adversaries(n: int):
    for i in range(n):
        others = [j for j in range(n) if j != i]
        for mask in range(1 << len(others)):
            yield i, tuple(o for p, o in enumerate(others) if (mask >> p) & 1)


def cmd_oracle_check(args) -> int:
    kind, obj = _load_any(args.input_file)
    rows = []
    if kind == "discrete":
        dist = obj
        if dist.n > args.cap and not args.force:
            raise SearchSpaceExceeded(
                f"oracle-check over n={dist.n} exceeds cap {args.cap}; "
                "pass --force to override"
            )
        tol = args.tolerance if args.tolerance is not None else 1e-9
        query = _query_for(dist, args.query)
        graph, _ = full_space_search(dist, query, args.lam, force=True)
        values = graph.all_values()
        for i, K in _all_adversaries(dist.n):
            node = AdversaryNode(i, K)
            oracle = pdp_exact_discrete(dist, query, args.lam, i, K).leakage
            chain = values.get(node)
            ok = chain is not None and oracle <= chain + tol
            rows.append(
                {
                    "i": i,
                    "K": list(K),
                    "chain": chain,
                    "oracle": oracle,
                    "pass": bool(ok),
                }
            )
        cols = ("chain", "oracle")
    else:
        model = obj
        if model.n > args.cap and not args.force:
            raise SearchSpaceExceeded(
                f"oracle-check over n={model.n} exceeds cap {args.cap}; "
                "pass --force to override"
            )
        tol = args.tolerance if args.tolerance is not None else 1e-3
        for i, K in _all_adversaries(model.n):
            closed = leakage_gaussian(model, i, K)
            numeric = pdp_numeric_gaussian(model, i, K)
            ok = abs(closed - numeric) <= tol
            rows.append(
                {
                    "i": i,
                    "K": list(K),
                    "closed_form": closed,
                    "oracle": numeric,
                    "pass": bool(ok),
                }
            )
        cols = ("closed_form", "oracle")
    all_pass = all(r["pass"] for r in rows)
    print(f"{'i':>3} {'K':<16} {cols[0]:>14} {cols[1]:>14} result")
    for r in rows:
        print(
            f"{r['i']:>3} {str(r['K']):<16} "
            f"{_fmt(r[cols[0]]):>14} {_fmt(r[cols[1]]):>14} "
            f"{'pass' if r['pass'] else 'FAIL'}"
        )
    print(f"{sum(r['pass'] for r in rows)}/{len(rows)} adversaries pass (tol {tol:g})")
    if args.out:
        _emit(
            {"rows": rows, "tolerance": tol, "invocation": _invocation(args)},
            args.out,
        )
    return EXIT_OK if all_pass else EXIT_NUMERIC


def _fmt(v) -> str:
    return "missing" if v is None else f"{v:.6f}"


def _parse_sweep(text: str) -> list[float]:
    vals = [float(t) for t in text.split(",") if t.strip() != ""]
    if not vals:
        raise ValueError("--averCorr needs at least one value")
    return vals


def _parse_layers(text: str, n: int) -> set[int] | None:
    if text == "all":
        return None
    layers = {int(t) for t in text.split(",") if t.strip() != ""}
    if not layers or any(not 1 <= k <= n for k in layers):
        raise ValueError(f"--layers must name layers in 1..{n}")
    return layers


def cmd_experiment(args) -> int:
    sweep = _parse_sweep(args.aver_corr)
    layers = _parse_layers(args.layers, args.n)
    seeds = args.seeds if args.seeds is not None else (30 if args.kind == "discrete" else 1)
    if seeds < 1:
        raise ValueError("--seeds must be >= 1")
    if args.kind == "gaussian":
        for a in sweep:
            gen_covariance(args.n, a)  # fail fast on infeasible sweep points

    def run_cell(cell):
        a, seed = cell
        outp = {}
        if args.kind == "discrete":
            edges, fl = gen_whg_edges(
                args.n, a, seed=seed, scale=args.scale, alpha=args.beta_alpha
            )
            for mode in ("full", "fast"):
                rep = search_synthetic(edges, fl, mode)
                outp[(a, mode)] = rep.layer_max
        else:
            sigma = gen_covariance(args.n, a)
            model = GaussianModel(
                mu=np.zeros(args.n), sigma=sigma, M=args.M, lam=args.lam
            )
            rep = max_leakage_gaussian(model, force=True)
            outp[(a, "enumerate")] = rep.layer_max
        return outp

    cells = [(a, s) for a in sweep for s in range(seeds)]
    results: dict[tuple[float, str], list[dict[int, float]]] = {}
    with ThreadPoolExecutor(max_workers=_workers(len(cells))) as pool:
        for outp in pool.map(run_cell, cells):
            for key, layer_max in outp.items():
                results.setdefault(key, []).append(layer_max)
    rows = []
    for (a, algo), per_seed in sorted(results.items()):
        layer_keys = sorted({k for lm in per_seed for k in lm})
        for k in layer_keys:
            if layers is not None and k not in layers:
                continue
            vals = [lm[k] for lm in per_seed if k in lm]
            rows.append(
                (a, k, float(np.mean(vals)), float(np.var(vals)), algo, len(vals))
            )
    rows.sort(key=lambda r: (r[0], r[4], r[1]))
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["averCorr", "layer", "mean_leakage", "var_leakage", "algorithm", "seed_count"]
        )
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    kind, obj = _load_any(args.input_file)
    eps = args.epsilon
    if eps <= 0:
        raise ValueError("--epsilon must be positive")
    if kind == "discrete":
        dist = obj
        query = _query_for(dist, args.query)
        gs = global_sensitivity(dist, query)
        if gs <= 0:
            raise ValueError("query has zero sensitivity; any lambda works")
        n = dist.n

        if args.method == "oracle":
            def leak(lam: float) -> float:
                return max(
                    pdp_exact_discrete(dist, query, lam, i, K).leakage
                    for i, K in _all_adversaries(n)
                )
        elif args.method == "fast":
            def leak(lam: float) -> float:
                return fast_search(dist, query, lam)[1].leakage
        else:
            def leak(lam: float) -> float:
                return full_space_search(dist, query, lam, force=True)[1].leakage
    else:
        model = obj
        gs = model.M
        n = model.n

        def leak(lam: float) -> float:
            scaled = GaussianModel(mu=model.mu, sigma=model.sigma, M=model.M, lam=lam)
            return max_leakage_gaussian(scaled, force=True).leakage

    lo = gs / (10.0 * eps)
    hi = 10.0 * n * gs / eps
    f_lo, f_hi = leak(lo), leak(hi)
    if f_hi > eps:
        raise PrivacyModelError(
            f"bracket exhausted: leakage {f_hi:.6g} at lambda {hi:.6g} still "
            f"exceeds epsilon {eps:.6g}"
        )
    iters = 0
    if f_lo <= eps:
        hi = lo  # already private at the smallest bracketed scale
    else:
        while (hi - lo) / hi > 1e-6 and iters < 200:
            mid = 0.5 * (lo + hi)
            if leak(mid) <= eps:
                hi = mid
            else:
                lo = mid
            iters += 1
    payload = {
        "lambda": hi,
        "epsilon": eps,
        "leakage_at_lambda": leak(hi),
        "iterations": iters,
        "bracket": [gs / (10.0 * eps), 10.0 * n * gs / eps],
        "method": args.method if kind == "discrete" else "enumerate",
        "invocation": _invocation(args),
    }
    _emit(payload, args.out)
    return EXIT_OK


def _invocation(args) -> str:
    return " ".join(args.argv)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="priordp",
        description=(
            "Privacy leakage of Laplace-perturbed linear queries against "
            "adversaries with prior knowledge over correlated data"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "analyze-discrete", help="graph-search leakage of a discrete joint table"
    )
    p.add_argument("dist_file", help="JSON file with domains + probs")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--mode", choices=("full", "fast"), default="full")
    p.add_argument("--query", default=None, help="comma-separated coefficients")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--force", action="store_true", help="override the size cap")
    p.set_defaults(func=cmd_analyze_discrete)

    p = sub.add_parser(
        "analyze-gaussian", help="closed-form leakage of a Gaussian model"
    )
    p.add_argument("model_file", help="JSON file with mu, sigma, M, lambda")
    p.add_argument("--adversary", default=None, help="i[,k1,k2,...] (0-based)")
    p.add_argument("--all", action="store_true", help="enumerate every adversary")
    p.add_argument("--out", default=None)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_analyze_gaussian)

    p = sub.add_parser(
        "oracle-check",
        help="cross-check analytic leakage against the brute-force oracle",
    )
    p.add_argument("input_file", help="discrete table or Gaussian model JSON")
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--query", default=None)
    p.add_argument("--cap", type=int, default=8)
    p.add_argument("--force", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("experiment", help="sweep averCorr and write a CSV")
    p.add_argument("--kind", choices=("discrete", "gaussian"), required=True)
    p.add_argument("--n", type=int, default=15)
    p.add_argument("--averCorr", dest="aver_corr", default="0.2,0.5,0.8")
    p.add_argument("--layers", default="all", help='"all" or comma list')
    p.add_argument("--seeds", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--scale", type=float, default=1.0, help="GS/lambda unit")
    p.add_argument("--beta-alpha", dest="beta_alpha", type=float, default=512.0)
    p.add_argument("--M", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser(
        "calibrate", help="minimal lambda keeping max leakage at or below epsilon"
    )
    p.add_argument("input_file")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--query", default=None)
    p.add_argument(
        "--method",
        choices=("full", "fast", "oracle"),
        default="full",
        help="leakage evaluator for discrete inputs",
    )
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = ["priordp"] + argv
    try:
        return args.func(args)
    except SearchSpaceExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InfeasibleCorrelation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PrivacyModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
