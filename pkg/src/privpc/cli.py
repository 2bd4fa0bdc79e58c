"""Command-line harness: dataset loading, mechanism runs, Monte-Carlo sweeps,
timing benchmarks, and CSV/JSON reports.

Exit codes: 0 on success, 2 on configuration errors, 3 on dataset load
errors.  Reports are deterministic for a fixed configuration and seed: trials use
per-trial RNG streams and rows are emitted in sorted ``(k, trial)`` order
(timings appear only in ``bench`` output, which is inherently nondeterministic).
"""

from __future__ import annotations

import argparse
import csv
import gzip
import io
import json
import math
import statistics
import sys
import time
from typing import Any, Sequence

import numpy as np

from . import generators
from .estimators import GLOBAL_SENSITIVITY
from .graph import Graph, GraphFormatError, load_edge_list
from .noise import RngStream, sample_gaussian
from .ppm import AUTO, PpmConfig, resolve_iterations, run_ppm
from .ptr import PtrConfig, auto_delta, auto_p, run_ptr, success_probability_lower_bound
from .spectral import (
    GAP_THRESHOLD,
    local_sensitivity_bound,
    smooth_sensitivity_diagnostic,
    top_two_eigenpairs,
)
from .subsets import dks_extract, dks_upper_bound, jaccard, top_k_abs_subset

CSV_COLUMNS = [
    "graph", "mechanism", "k", "trial", "status", "density", "jaccard",
    "time_ms", "eps_total", "delta_total",
    # resolved-config echo
    "eps0", "eps1", "eps2", "eps", "delta", "p", "mu", "iters", "seed",
]

_SYNTHETIC = {
    "complete": (generators.complete_graph, ("n",)),
    "star": (generators.star_graph, ("n",)),
    "er": (generators.erdos_renyi, ("n", "p", "seed")),
    "planted": (generators.planted_clique, ("n", "clique", "p", "seed")),
    "regular": (generators.random_regular, ("n", "d", "seed")),
}


class ConfigError(ValueError):
    pass


def _parse_synthetic(text: str, default_seed: int) -> Graph:
    name, _, rest = text.partition(":")
    if name not in _SYNTHETIC:
        raise ConfigError(f"unknown synthetic graph {name!r}; choose from {sorted(_SYNTHETIC)}")
    fn, argnames = _SYNTHETIC[name]
    params: dict[str, Any] = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ConfigError(f"bad synthetic parameter {item!r}; expected key=value")
            params[key.strip()] = float(val) if "." in val or "e" in val.lower() else int(val)
    if "seed" in argnames and "seed" not in params:
        params["seed"] = default_seed
    if "clique" in params:  # generator argument is clique_size
        params["clique_size"] = params.pop("clique")
    unknown = set(params) - {a if a != "clique" else "clique_size" for a in argnames}
    if unknown:
        raise ConfigError(f"unknown parameter(s) {sorted(unknown)} for synthetic {name!r}")
    try:
        return fn(**params)
    except TypeError as exc:
        raise ConfigError(f"synthetic {name!r}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"synthetic {name!r}: {exc}") from exc


def _load_graph(args) -> Graph:
    if (args.graph is None) == (args.synthetic is None):
        raise ConfigError("exactly one of --graph or --synthetic is required")
    if args.synthetic is not None:
        return _parse_synthetic(args.synthetic, args.seed)
    path = args.graph
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8") as fh:
        return load_edge_list(
            fh, index_base=args.index_base, drop_self_loops=args.drop_self_loops
        )


def _parse_k_grid(text: str, n: int) -> list[int]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("k-grid range must be start:stop:step")
        start, stop, step = (int(p) for p in parts)
        ks = list(range(start, stop + 1, step))
    else:
        ks = [int(p) for p in text.split(",") if p]
    if not ks:
        raise ConfigError("k-grid is empty")
    for k in ks:
        if not 2 <= k <= n:
            raise ConfigError(f"k={k} outside [2, n={n}]")
    return ks


def _resolve_ptr_config(args, graph: Graph) -> PtrConfig:
    delta = auto_delta(graph.m) if args.delta is None else args.delta
    p = auto_p(delta) if args.p is None else args.p
    try:
        return PtrConfig(eps0=args.eps0, eps1=args.eps1, eps2=args.eps2,
                         delta=delta, p=p, mu=args.mu)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_delta(args, graph: Graph) -> float:
    return auto_delta(graph.m) if args.delta is None else args.delta


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _graph_name(args) -> str:
    return args.graph if args.graph is not None else args.synthetic


def _write_rows(rows: list[dict], aggregates, args) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in CSV_COLUMNS])
        text = buf.getvalue()
    else:
        payload: dict[str, Any] = {"rows": rows}
        if aggregates is not None:
            payload["aggregates"] = aggregates
        text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


# ---------------------------------------------------------------------------
# stats
# ---------------------------------------------------------------------------

def cmd_stats(args) -> int:
    graph = _load_graph(args)
    summary = top_two_eigenpairs(graph, seed=args.seed)
    ls = local_sensitivity_bound(summary)
    delta = _resolve_delta(args, graph)
    smooth = smooth_sensitivity_diagnostic(summary, graph.n, args.eps, delta)
    report = {
        "graph": _graph_name(args),
        "n": graph.n,
        "m": graph.m,
        "components": graph.component_count(),
        "lambda1": summary.lambda1,
        "lambda2": summary.lambda2,
        "gap": summary.gap,
        "c_pi": summary.c_pi,
        "ls_bound": ls,
        "gs_bound": GLOBAL_SENSITIVITY,
        "gs_over_ls": None if ls is None else GLOBAL_SENSITIVITY / ls,
        "smooth_sensitivity": smooth,
        "residual": summary.residual,
        "iterations": summary.iterations_used,
    }
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    else:
        lines = ["metric,value"]
        lines += [f"{key},{_fmt(val)}" for key, val in report.items()]
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def _echo_base(args, graph: Graph) -> dict[str, Any]:
    return {"graph": _graph_name(args), "seed": args.seed}


def _trial_vectors(args, graph: Graph, summary, config_echo: dict, outcomes: list):
    """One (trial, status, vector) triple per trial for the chosen mechanism."""
    out: list[tuple[int, str, np.ndarray | None]] = []
    if args.mechanism == "ptr":
        config = _resolve_ptr_config(args, graph)
        config_echo.update(eps0=config.eps0, eps1=config.eps1, eps2=config.eps2,
                           delta=config.delta, p=config.p, mu=config.mu,
                           eps_total=config.eps_total, delta_total=config.delta_total)
        for trial in range(args.trials):
            outcome = run_ptr(graph, summary, config, RngStream(args.seed, trial))
            out.append((trial, outcome.status, outcome.vector))
            outcomes.append(outcome)
    elif args.mechanism == "ppm":
        delta = _resolve_delta(args, graph)
        config = PpmConfig(eps=args.eps, delta=delta, iters=args.iters)
        iters = resolve_iterations(config, graph, summary)
        config_echo.update(eps=args.eps, delta=delta, iters=iters,
                           eps_total=args.eps, delta_total=delta)
        for trial in range(args.trials):
            vec = run_ppm(graph, config, RngStream(args.seed, trial), summary=summary)
            out.append((trial, "released", vec))
    elif args.mechanism == "gauss_global":
        delta = _resolve_delta(args, graph)
        if delta >= 1.0 or args.eps <= 0:
            raise ConfigError("gauss_global needs eps > 0 and delta in (0, 1)")
        sigma = GLOBAL_SENSITIVITY * math.sqrt(2.0 * math.log(2.0 / delta)) / args.eps
        config_echo.update(eps=args.eps, delta=delta,
                           eps_total=args.eps, delta_total=delta)
        for trial in range(args.trials):
            noise = sample_gaussian(sigma, RngStream(args.seed, trial), size=graph.n)
            out.append((trial, "released", summary.v + noise))
    elif args.mechanism == "nonprivate":
        for trial in range(args.trials):
            out.append((trial, "released", summary.v))
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown mechanism {args.mechanism}")
    return out


def cmd_run(args) -> int:
    graph = _load_graph(args)
    summary = top_two_eigenpairs(graph, seed=args.seed)
    ks = _parse_k_grid(args.k_grid, graph.n)
    config_echo = _echo_base(args, graph)
    outcomes: list = []
    trials = _trial_vectors(args, graph, summary, config_echo, outcomes)

    reference = {k: top_k_abs_subset(summary.v, k).members for k in ks}
    rows: list[dict] = []
    for k in ks:
        for trial, status, vec in trials:
            row = dict(config_echo, mechanism=args.mechanism, k=k, trial=trial, status=status)
            if vec is not None:
                result = dks_extract(graph, vec, k)
                row["density"] = result.density
                row["jaccard"] = jaccard(result.members, reference[k])
            rows.append(row)

    rows.sort(key=lambda r: (r["k"], r["trial"]))
    aggregates: dict | list = _aggregate(rows, ks)
    for agg in aggregates:
        # Diagnostic only: computed from the non-private spectrum, never a
        # private release.
        agg["density_upper_bound_nonprivate"] = dks_upper_bound(summary, graph, agg["k"])
    if args.debug_unsafe and args.format == "json" and outcomes:
        aggregates = {
            "per_k": aggregates,
            "trial_diagnostics": [o.to_dict(debug_unsafe=True) for o in outcomes],
        }
    _write_rows(rows, aggregates, args)
    if not args.out:
        return 0
    per_k = aggregates["per_k"] if isinstance(aggregates, dict) else aggregates
    for agg in per_k:
        sys.stdout.write(
            f"k={agg['k']} released={agg['released']}/{agg['trials']} "
            f"density={_fmt(agg['density_mean'])}+-{_fmt(agg['density_std'])} "
            f"jaccard={_fmt(agg['jaccard_mean'])}\n"
        )
    return 0


def _aggregate(rows: list[dict], ks: Sequence[int]) -> list[dict]:
    out = []
    for k in ks:
        sub = [r for r in rows if r["k"] == k]
        released = [r for r in sub if r["status"] == "released"]
        dens = [r["density"] for r in released]
        jac = [r["jaccard"] for r in released]
        out.append({
            "k": k,
            "trials": len(sub),
            "released": len(released),
            "no_response": len(sub) - len(released),
            "density_mean": statistics.fmean(dens) if dens else None,
            "density_std": statistics.pstdev(dens) if len(dens) > 1 else (0.0 if dens else None),
            "jaccard_mean": statistics.fmean(jac) if jac else None,
            "jaccard_std": statistics.pstdev(jac) if len(jac) > 1 else (0.0 if jac else None),
        })
    return out


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def cmd_bench(args) -> int:
    graph = _load_graph(args)
    summary = top_two_eigenpairs(graph, seed=args.seed)
    ptr_config = _resolve_ptr_config(args, graph)
    delta = _resolve_delta(args, graph)
    ppm_config = PpmConfig(eps=args.eps, delta=delta, iters=args.iters)
    iters = resolve_iterations(ppm_config, graph, summary)

    rows: list[dict] = []
    ptr_ms: list[float] = []
    ppm_ms: list[float] = []
    for trial in range(args.trials):
        # PTR timing covers the privatization phases only; the eigensolve is
        # amortized outside the loop.
        rng = RngStream(args.seed, trial)
        t0 = time.perf_counter()
        outcome = run_ptr(graph, summary, ptr_config, rng)
        ms = (time.perf_counter() - t0) * 1e3
        ptr_ms.append(ms)
        rows.append({"graph": _graph_name(args), "mechanism": "ptr", "trial": trial,
                     "status": outcome.status, "time_ms": ms,
                     "eps_total": ptr_config.eps_total, "delta_total": ptr_config.delta_total,
                     "eps0": ptr_config.eps0, "eps1": ptr_config.eps1,
                     "eps2": ptr_config.eps2, "delta": ptr_config.delta,
                     "p": ptr_config.p, "mu": ptr_config.mu, "seed": args.seed})
    for trial in range(args.trials):
        rng = RngStream(args.seed, 10_000_000 + trial)
        t0 = time.perf_counter()
        run_ppm(graph, ppm_config, rng, summary=summary)
        ms = (time.perf_counter() - t0) * 1e3
        ppm_ms.append(ms)
        rows.append({"graph": _graph_name(args), "mechanism": "ppm", "trial": trial,
                     "status": "released", "time_ms": ms,
                     "eps_total": args.eps, "delta_total": delta,
                     "eps": args.eps, "delta": delta, "iters": iters, "seed": args.seed})

    med_ptr = statistics.median(ptr_ms)
    med_ppm = statistics.median(ppm_ms)
    aggregates = {
        "ptr_median_ms": med_ptr,
        "ppm_median_ms": med_ppm,
        "speedup": med_ppm / med_ptr if med_ptr > 0 else None,
        "ppm_iters": iters,
    }
    _write_rows(rows, aggregates, args)
    sys.stdout.write(
        f"ptr_median_ms={med_ptr:.4f} ppm_median_ms={med_ppm:.4f} "
        f"speedup={aggregates['speedup']:.1f} ppm_iters={iters}\n"
    )
    return 0


# ---------------------------------------------------------------------------
# mc-success
# ---------------------------------------------------------------------------

def cmd_mc_success(args) -> int:
    graph = _load_graph(args)
    summary = top_two_eigenpairs(graph, seed=args.seed)
    config = _resolve_ptr_config(args, graph)
    successes = 0
    for trial in range(args.trials):
        outcome = run_ptr(graph, summary, config, RngStream(args.seed, trial))
        successes += int(outcome.released)
    rate = successes / args.trials
    se = math.sqrt(max(rate * (1.0 - rate), 1e-12) / args.trials)
    report = {
        "graph": _graph_name(args),
        "trials": args.trials,
        "successes": successes,
        "rate": rate,
        "ci95_low": max(rate - 1.96 * se, 0.0),
        "ci95_high": min(rate + 1.96 * se, 1.0),
        "success_lower_bound": success_probability_lower_bound(config.delta, config.p),
        "delta": config.delta,
        "p": config.p,
        "mu": config.mu,
        "seed": args.seed,
    }
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    src = parser.add_argument_group("dataset")
    src.add_argument("--graph", help="edge-list path (.gz transparently handled)")
    src.add_argument("--synthetic", metavar="NAME:PARAMS",
                     help="e.g. complete:n=100 | star:n=10 | er:n=50,p=0.2 | "
                          "planted:n=220,clique=20,p=0.05 | regular:n=5000,d=40")
    src.add_argument("--index-base", type=int, default=0, choices=(0, 1),
                     help="subtract this from input vertex ids")
    src.add_argument("--drop-self-loops", action="store_true")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--eps0", type=float, default=1.0)
    parser.add_argument("--eps1", type=float, default=3.0)
    parser.add_argument("--eps2", type=float, default=3.0)
    parser.add_argument("--eps", type=float, default=3.0,
                        help="budget for ppm / gauss_global")
    parser.add_argument("--delta", type=float, default=None,
                        help="default: ln(m)/m")
    parser.add_argument("--p", type=float, default=None,
                        help="success knob; default derived from delta")
    parser.add_argument("--mu", type=float, default=3.0 * GAP_THRESHOLD)
    parser.add_argument("--iters", default=AUTO, type=lambda s: s if s == AUTO else int(s),
                        help="power-method iterations, or 'auto'")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--debug-unsafe", action="store_true",
                        help="include privacy-relevant diagnostics in outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privpc",
        description="Edge-DP principal components and densest-k-subgraph experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="spectral and sensitivity statistics")
    _add_common(p_stats)

    p_run = sub.add_parser("run", help="Monte-Carlo subset experiments")
    _add_common(p_run)
    p_run.add_argument("--mechanism", choices=("ptr", "ppm", "nonprivate", "gauss_global"),
                       required=True)
    p_run.add_argument("--k-grid", required=True, help="a,b,c or start:stop:step")
    p_run.add_argument("--trials", type=int, default=100)

    p_bench = sub.add_parser("bench", help="privatization timing, ptr vs ppm")
    _add_common(p_bench)
    p_bench.add_argument("--trials", type=int, default=10)

    p_mc = sub.add_parser("mc-success", help="empirical ptr release rate")
    _add_common(p_mc)
    p_mc.add_argument("--trials", type=int, default=1000)

    return parser


_COMMANDS = {
    "stats": cmd_stats,
    "run": cmd_run,
    "bench": cmd_bench,
    "mc-success": cmd_mc_success,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        parser.error("--trials must be >= 1")
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GraphFormatError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
