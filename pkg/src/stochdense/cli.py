"""Command-line interface: ``stochdense {solve,gen,eval,peel,oracle,sweep}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from .experiments import SynthSpec, evaluate, generate, run_trial, write_csv
from .graph import GraphFormatError, MultilayerGraph, load_layer_files, load_multilayer, save_multilayer
from .lp import LpSolverError
from .metrics import KINDS, UnsupportedMetricError, layer_values, make_metric_config, normalize_kind
from .oracle import OracleSizeError, oracle_ab_density
from .single_layer import EmptyLayerError, densest_exact, greedy_peeling, layer_optima
from .stochastic import PruningError, solve_ab_density

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_SOLVER, EXIT_METRIC = 0, 2, 3, 4, 5

REGRET_NOTE = (
    "regret values are reported as positive regret, the negation of the worst-layer "
    "(alpha, beta)-density with alpha = 1 and beta_i = -(optimal density of layer i)"
)

log = logging.getLogger("stochdense")


def _metric_choices():
    return [k.replace("_", "-") for k in KINDS]


def _load_graph(args) -> MultilayerGraph:
    vertices = []
    if getattr(args, "vertices", None):
        with open(args.vertices, encoding="utf-8") as fh:
            vertices = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    if getattr(args, "layer_files", None):
        return load_layer_files(args.layer_files, vertices)
    if not args.input:
        raise GraphFormatError("no input graph given (use --input or --layer-files)")
    return load_multilayer(args.input, vertices)


def _emit(text: str, output: str | None):
    if output and output != "-":
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _labels(g: MultilayerGraph, subset) -> list[str]:
    return g.label_list(subset)


def _solve_payload(g, dist, kind, timings: bool) -> dict:
    cfg = dist.info.config
    info = dist.info
    report = evaluate(dist, g, cfg)
    payload = {
        "metric": kind.replace("_", "-"),
        "optimal_value": cfg.report(dist.value),
        "lp_value": cfg.report(info.lp_value),
        "lower_bound": cfg.report(info.lower_bound.value) if info.lower_bound else None,
        "vertices": info.vertices,
        "edges": info.edges,
        "layers": g.k,
        "pruned_vertices": info.pruned_vertices,
        "pruned_edges": info.pruned_edges,
        "preprocess_seconds": info.preprocess_seconds if timings else None,
        "total_seconds": info.total_seconds if timings else None,
        "support_size": dist.support_size,
        "is_basic": info.is_basic,
        "distribution": [
            {"subset": _labels(g, s), "probability": p} for s, p in dist.atoms
        ],
        "per_layer": report.per_layer,
        "worst_layer": g.layer_names[report.worst_layer],
    }
    if cfg.kind == "regret":
        payload["sign_convention"] = REGRET_NOTE
    return payload


def _check_solution(g, dist):
    total = sum(p for _, p in dist.atoms)
    if abs(total - 1.0) > 1e-9:
        raise LpSolverError(f"distribution masses sum to {total!r}")
    recomputed = layer_values(g, dist.info.config, dist.atoms).min()
    if abs(recomputed - dist.value) > 1e-6:
        raise LpSolverError("re-evaluated value disagrees with the solver's value")


def cmd_solve(args) -> int:
    kind = normalize_kind(args.metric)
    g = _load_graph(args)
    start = time.perf_counter()
    dist = solve_ab_density(g, kind, preprocess=not args.no_preprocess, threads=args.threads, tol=args.tol)
    dist.info.total_seconds = time.perf_counter() - start
    _check_solution(g, dist)
    payload = _solve_payload(g, dist, kind, args.timings)
    if args.format == "csv":
        row = {k: v for k, v in payload.items() if k not in ("distribution", "per_layer", "sign_convention")}
        _emit(write_csv([row]), args.output)
    else:
        _emit(_dump(payload), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = SynthSpec(args.n, args.exponent, args.layers, args.clique_size, args.clique_layers, args.seed)
    g, v_c = generate(spec)
    if args.output and args.output != "-":
        save_multilayer(g, args.output)
    else:
        save_multilayer(g, sys.stdout)
    if args.clique_output:
        _emit("".join(f"{g.labels[v]}\n" for v in sorted(v_c)), args.clique_output)
    return EXIT_OK


def _read_labels(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip() and not line.startswith("#")]


def cmd_eval(args) -> int:
    g = _load_graph(args)
    with open(args.solution, encoding="utf-8") as fh:
        solution = json.load(fh)
    kind = normalize_kind(args.metric or solution["metric"])
    ids = {label: i for i, label in enumerate(g.labels)}
    try:
        atoms = [(frozenset(ids[x] for x in a["subset"]), float(a["probability"])) for a in solution["distribution"]]
    except KeyError as exc:
        raise GraphFormatError(f"solution refers to unknown vertex {exc}") from None
    optima = layer_optima(g, args.threads) if kind != "density" else None
    cfg = make_metric_config(g, kind, optima)
    v_c = None
    if args.clique:
        v_c = frozenset(ids[x] for x in _read_labels(args.clique))
    report = evaluate(atoms, g, cfg, v_c).to_dict()
    report["worst_layer"] = g.layer_names[report["worst_layer"]]
    if args.format == "csv":
        rows = [{"metric": report["metric"], **row} for row in report["per_layer"]]
        _emit(write_csv(rows), args.output)
    else:
        _emit(_dump(report), args.output)
    return EXIT_OK


def cmd_peel(args) -> int:
    g = _load_graph(args)
    layers = [args.layer] if args.layer is not None else range(g.k)
    rows = []
    for i in layers:
        if len(g.layers[i]) == 0:
            rows.append({"layer": g.layer_names[i], "greedy_density": None, "greedy_subset": [],
                         "exact_density": None, "exact_subset": []})
            continue
        subset, value = greedy_peeling(g, i)
        row = {"layer": g.layer_names[i], "greedy_density": value, "greedy_subset": _labels(g, subset)}
        if not args.greedy_only:
            opt = densest_exact(g, i)
            row.update(exact_density=opt.opt_density, exact_subset=_labels(g, opt.subset))
        rows.append(row)
    if args.format == "csv":
        flat = [{k: (" ".join(v) if isinstance(v, list) else v) for k, v in r.items()} for r in rows]
        _emit(write_csv(flat), args.output)
    else:
        _emit(_dump(rows), args.output)
    return EXIT_OK


def cmd_oracle(args) -> int:
    kind = normalize_kind(args.metric)
    g = _load_graph(args)
    optima = layer_optima(g, args.threads) if kind != "density" else None
    cfg = make_metric_config(g, kind, optima)
    res = oracle_ab_density(g, cfg)
    payload = {
        "metric": kind.replace("_", "-"),
        "optimal_value": cfg.report(res.value),
        "method": res.method,
        "distribution": [{"subset": _labels(g, s), "probability": p} for s, p in res.atoms],
    }
    if cfg.kind == "regret":
        payload["sign_convention"] = REGRET_NOTE
    _emit(_dump(payload), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    metrics = [normalize_kind(m) for m in args.metrics]
    rows = []
    for k in args.layers:
        for s in range(args.seeds):
            spec = SynthSpec(args.n, args.exponent, k, args.clique_size, args.clique_layers, args.seed + s)
            for trial in run_trial(spec, metrics, baselines=args.baselines):
                rows.append(trial.row())
                log.info("k=%d seed=%d %s F=%.4f", k, spec.seed, trial.metric, trial.f_measure)
    if args.format == "json":
        _emit(_dump(rows), args.output)
    else:
        _emit(write_csv(rows), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stochdense", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_args(p):
        p.add_argument("--input", help="TSV edge list: layer, u, v[, weight]")
        p.add_argument("--layer-files", nargs="+", help="one u, v[, weight] file per layer instead of --input")
        p.add_argument("--vertices", help="file of vertex labels to include even if isolated")
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("--threads", type=int, default=1, help="threads for per-layer densest subgraphs")

    p = sub.add_parser("solve", help="optimal distribution over vertex subsets")
    graph_args(p)
    p.add_argument("--metric", choices=_metric_choices(), default="density")
    p.add_argument("--no-preprocess", action="store_true", help="skip lower bound and vertex removal")
    p.add_argument("--tol", type=float, default=1e-9, help="LP feasibility tolerance")
    p.add_argument("--seed", type=int, default=0, help="accepted for interface symmetry; solve is deterministic")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--timings", action="store_true", help="record wall times (output is then not reproducible)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="Chung-Lu multilayer graph with a planted clique")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--exponent", type=float, default=2.3)
    p.add_argument("--layers", type=int, default=3)
    p.add_argument("--clique-size", type=int, default=10)
    p.add_argument("--clique-layers", choices=["all", "one"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="TSV output path (default: stdout)")
    p.add_argument("--clique-output", help="write the planted vertex labels here")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("eval", help="evaluate a solve output against a graph")
    graph_args(p)
    p.add_argument("--solution", required=True, help="JSON written by 'solve' or 'oracle'")
    p.add_argument("--metric", choices=_metric_choices(), help="defaults to the solution's metric")
    p.add_argument("--clique", help="file of hidden vertex labels for precision/recall/F")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("peel", help="single-layer densest subgraph tools")
    graph_args(p)
    p.add_argument("--layer", type=int, help="layer index (default: all)")
    p.add_argument("--greedy-only", action="store_true", help="skip the exact LP")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_peel)

    p = sub.add_parser("oracle", help="brute-force optimum over all subsets (n <= 12)")
    graph_args(p)
    p.add_argument("--metric", choices=_metric_choices(), default="density")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", help="planted-clique recovery experiments as CSV rows")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--exponent", type=float, default=2.3)
    p.add_argument("--layers", type=int, nargs="+", default=[2, 3, 4, 5])
    p.add_argument("--clique-size", type=int, default=10)
    p.add_argument("--clique-layers", choices=["all", "one"], default="all")
    p.add_argument("--seeds", type=int, default=20, help="number of seeds per layer count")
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--metrics", nargs="+", choices=_metric_choices(), default=_metric_choices())
    p.add_argument("--baselines", action="store_true", help="also score DCS-LP and DCS-Greedy subsets")
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UnsupportedMetricError, EmptyLayerError, OracleSizeError) as exc:
        print(f"stochdense: {exc}", file=sys.stderr)
        return EXIT_METRIC
    except (LpSolverError, PruningError) as exc:
        print(f"stochdense: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (GraphFormatError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"stochdense: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
