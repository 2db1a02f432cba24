"""Command-line entry point: ``exprnet {correlate,select,learn}``.

Exit codes: 0 success, 2 usage / configuration / input error, 3 analysis failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .core import ErrorReport
from .errors import ExprNetError
from .formats import (CsvSpec, export_dot, export_network_json, load_matrix, render_error_report)
from .graphs import MODEL_LABELS, evaluate_network, find_cycles, learn
from .select import STRATEGY_GRID, StrategyConfig, run_ensemble
from .stats import correlation_matrix

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 2, 3

ORDERINGS = {"highest": "highest_first", "lowest": "lowest_first", "unordered": "unordered"}
MODELS = {"coexpr": "coexpression", "bayes": "bayesian", "depnet": "dependency"}


class InputError(Exception):
    pass


def _threshold(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError("threshold must be in (0,1]")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _nonneg_int(text):
    value = int(text) if text.lstrip("-").isdigit() else None
    if value is None or value < 0:
        raise argparse.ArgumentTypeError("must be an integer >= 0")
    return value


def _dataset_name(path: str) -> str:
    return "stdin" if path == "-" else Path(path).stem


def _load(path: str, args):
    spec = CsvSpec(delimiter=args.delimiter, has_sample_id_column=not args.no_sample_ids)
    try:
        matrix = load_matrix(sys.stdin.buffer if path == "-" else path, spec)
    except (OSError, ExprNetError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {type(exc).__name__}: {exc}") from None
    return matrix.standardized() if args.zscore else matrix


def _write(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _suffixed(path: str, model: str, many: bool) -> str:
    if not many:
        return path
    base, ext = os.path.splitext(path)
    return f"{base}.{model}{ext}"


def cmd_correlate(args) -> int:
    matrix = _load(args.input, args)
    corr = correlation_matrix(matrix)
    names = [g.name for g in matrix.gene_ids]
    lines = [",".join(["gene"] + names)]
    for name, row in zip(names, corr.values):
        lines.append(",".join([name] + [repr(float(v)) for v in row]))
    table = "\n".join(lines) + "\n"
    count = 0
    for i in range(matrix.p):
        for j in range(i + 1, matrix.p):
            r = corr.values[i, j]
            if (abs(r) if args.absolute else r) >= args.threshold:
                count += 1
    if args.out:
        _write(args.out, table)
    else:
        sys.stdout.write(table)
    print(f"{count} pair{'' if count == 1 else 's'} ≥ {args.threshold:g}")
    if corr.constant:
        print("constant genes (r set to 0): " + ", ".join(g.name for g in corr.constant))
    return EXIT_OK


def cmd_select(args) -> int:
    if args.all_strategies:
        grid = list(STRATEGY_GRID)
    else:
        grid = [(args.search, ORDERINGS[args.ordering])]
    configs = [StrategyConfig(search=s, ordering=o, threshold=args.threshold, use_absolute_r=args.absolute,
                              metric=args.metric, max_subset=args.max_subset) for s, o in grid]
    datasets = [(_dataset_name(p), _load(p, args)) for p in args.input]
    names = [d for d, _ in datasets]
    if len(set(names)) != len(names):
        raise InputError("input files must have distinct names")
    report = ErrorReport(datasets=names, metric=args.metric, label_header="Strategies")
    selections = {}
    for cfg in configs:
        row = {}
        for name, matrix in datasets:
            results, overall = run_ensemble(matrix, cfg)
            row[name] = overall
            selections[(cfg, name)] = results
        report.add_row(cfg.label, row)
    if args.out_dir:
        out = Path(args.out_dir)
        for (cfg, name), results in selections.items():
            slug = f"{cfg.search}_{cfg.ordering}"
            doc = {"strategy": cfg.label, "dataset": name, "metric": cfg.metric, "threshold": cfg.threshold,
                   "absolute_r": cfg.use_absolute_r, "results": [r.to_dict() for r in results]}
            _write(out / "selections" / f"{slug}__{name}.json", json.dumps(doc, indent=1, ensure_ascii=False) + "\n")
        _write(out / "report.csv", render_error_report(report, "csv"))
        _write(out / "report.md", render_error_report(report, "markdown"))
    sys.stdout.write(render_error_report(report, args.format))
    print(f"metric: LOOCV {args.metric}")
    return EXIT_OK


def cmd_learn(args) -> int:
    matrix = _load(args.input, args)
    models = list(MODELS.values()) if args.model == "all" else [MODELS[args.model]]
    many = len(models) > 1
    corr = correlation_matrix(matrix)
    learned = {}
    for model in models:
        net = learn(matrix, model, args.threshold, args.parents, args.absolute, corr)
        learned[model] = (net, *evaluate_network(matrix, net, args.metric)) if args.evaluate else (net, None, None)
    for model, (net, _, _) in learned.items():
        summary = f"{MODEL_LABELS[model]}: {len(net.edges)} edges"
        if model == "bayesian":
            cycles = find_cycles(net)
            summary += f", {len(cycles)} directed cycle{'' if len(cycles) == 1 else 's'}"
            if cycles:
                summary += " (" + "; ".join("->".join(g.name for g in c + c[:1]) for c in cycles) + ")"
        print(summary)
        if args.dot:
            _write(_suffixed(args.dot, model, many), export_dot(net))
        if args.json:
            _write(_suffixed(args.json, model, many), export_network_json(net) + "\n")
    if args.evaluate:
        name = _dataset_name(args.input)
        report = ErrorReport(datasets=[name], metric=args.metric, label_header="Model")
        for model, (_, _, overall) in learned.items():
            report.add_row(MODEL_LABELS[model], {name: overall})
        sys.stdout.write(render_error_report(report, args.format))
        print(f"metric: LOOCV {args.metric}")
        if args.per_gene:
            lines = [",".join(["gene"] + models)]
            for g in matrix.gene_ids:
                lines.append(",".join([g.name] + [repr(learned[m][1][g].value) for m in models]))
            _write(args.per_gene, "\n".join(lines) + "\n")
    return EXIT_OK


def _common(p: argparse.ArgumentParser):
    p.add_argument("--delimiter", default=",", help="CSV field delimiter (default ',')")
    p.add_argument("--no-sample-ids", action="store_true", help="input has no leading sample-id column")
    p.add_argument("--zscore", action="store_true", help="standardize each gene before analysis")


def _correlation_flags(p: argparse.ArgumentParser):
    p.add_argument("--threshold", type=_threshold, default=0.5, help="correlation threshold in (0,1] (default 0.5)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--absolute", dest="absolute", action="store_true", default=True,
                   help="compare |r| against the threshold (default)")
    g.add_argument("--signed", dest="absolute", action="store_false", help="compare signed r against the threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exprnet", description="Gene-regulatory structure and feature subsets "
                                     "from expression matrices (samples as rows, genes as columns).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correlate", help="pairwise Pearson correlation matrix")
    p.add_argument("input", help="CSV path or '-' for stdin")
    _correlation_flags(p)
    p.add_argument("--out", help="write the correlation matrix CSV here instead of stdout")
    _common(p)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("select", help="correlation filter + SFS/SBE wrapper search for every gene")
    p.add_argument("input", nargs="+", help="one or more CSV paths; each becomes a report column")
    p.add_argument("--search", choices=["sfs", "sbe"], default="sfs")
    p.add_argument("--ordering", choices=list(ORDERINGS), default="highest")
    _correlation_flags(p)
    p.add_argument("--metric", choices=["mse", "mae"], default="mse")
    p.add_argument("--max-subset", type=_nonneg_int, default=None, help="subset size cap (default n-2)")
    p.add_argument("--all-strategies", action="store_true", help="run all six search/ordering combinations")
    p.add_argument("--out-dir", help="write per-target selections JSON and the report here")
    p.add_argument("--format", choices=["markdown", "csv"], default="markdown", help="stdout report format")
    _common(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("learn", help="learn co-expression, Bayesian or dependency networks")
    p.add_argument("input", help="CSV path or '-' for stdin")
    p.add_argument("--model", choices=list(MODELS) + ["all"], default="all")
    _correlation_flags(p)
    p.add_argument("--parents", type=_positive_int, default=5, help="dependency-network parent cap (default 5)")
    p.add_argument("--dot", help="DOT output path (model name inserted before the extension for --model all)")
    p.add_argument("--json", help="JSON output path (same naming rule as --dot)")
    p.add_argument("--evaluate", action="store_true", help="report LOOCV errors of each learned network")
    p.add_argument("--metric", choices=["mse", "mae"], default="mse")
    p.add_argument("--per-gene", help="with --evaluate, write per-gene errors CSV here")
    p.add_argument("--format", choices=["markdown", "csv"], default="markdown", help="stdout report format")
    _common(p)
    p.set_defaults(func=cmd_learn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        CsvSpec(delimiter=args.delimiter)
    except ValueError as exc:
        print(f"exprnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except InputError as exc:
        print(f"exprnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"exprnet: analysis failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
