"""Command-line interface: dataset generation, selection runs, and sweeps.

Commands
--------
gen    write a synthetic dataset (CSV) with its ground truth (JSON)
fsss   search for maximal stable feature sets; writes models.json + table
ss     plain stability selection at one threshold
css    cluster stability selection (one representative per stable cluster)
paths  per-feature stability values across a sparsity sweep (plot-ready CSV)
tiles  pairwise similarity entries for the models found by a search
bench  repetition benchmark comparing methods (tidy CSV + summary)

Every command writes a ``manifest.json`` recording the seed, the full
configuration with its sha256, and package versions; outputs are fully
determined by the manifest contents.  Feature indices in outputs are
0-based and always accompanied by column names.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .baselines import (
    cluster_stability_selection_sps,
    selection_proportions,
    stability_selection,
)
from .baseproc import BaseProcedureConfig
from .dataio import (
    load_csv,
    result_to_dict,
    save_dataset,
    truth_from_dict,
    truth_to_dict,
    write_json,
    write_manifest,
)
from .fsss import fsss
from .harness import ExperimentConfig, aggregate, run_experiment, stability_paths, summary_table, tile_similarity
from .subsampling import make_plan, run_subsampling
from .synthetic import (
    ClusterSpec,
    gen_benchmark_data,
    gen_cluster_data,
    gen_path_demo_data,
)
from .util import check_alpha

log = logging.getLogger(__name__)

RECIPES = ("demo", "benchmark", "cluster")


def _alpha_arg(raw: str) -> float:
    try:
        return check_alpha(float(raw))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _even_positive(raw: str) -> int:
    value = int(raw)
    if value < 2 or value % 2 != 0:
        raise argparse.ArgumentTypeError(f"subsample count must be even and >= 2, got {value}")
    return value


def _int_list(raw: str) -> tuple[int, ...]:
    try:
        values = tuple(int(tok) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _add_io_args(sub, response_required: bool = True):
    sub.add_argument("--input", required=True, help="CSV dataset with a header row")
    sub.add_argument(
        "--response",
        required=response_required,
        help="name of the response column inside the CSV",
    )
    sub.add_argument("--out", default=".", help="output directory (created if missing)")


def _add_subsampling_args(sub):
    sub.add_argument("--B", type=_even_positive, default=100, help="number of subsamples (even)")
    sub.add_argument("--s0", type=int, default=10, help="features selected per subsample")
    sub.add_argument("--base", choices=("l0", "lasso"), default="l0", help="base procedure")
    sub.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    sub.add_argument("--workers", type=int, default=None,
                     help="parallel subsample fits (default: SUBSTAB_WORKERS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="substab",
        description="Subspace-based stability selection of feature sets.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    cmds = parser.add_subparsers(dest="command", required=True)

    gen = cmds.add_parser("gen", help="write a synthetic dataset and its ground truth")
    gen.add_argument("--recipe", choices=RECIPES, default="demo")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--n", type=int, default=None, help="rows (recipes with a free sample size)")
    gen.add_argument("--noise-sigma", type=float, default=None)
    gen.add_argument("--out", default=".")

    fs = cmds.add_parser("fsss", help="search for maximal stable feature sets")
    _add_io_args(fs)
    _add_subsampling_args(fs)
    fs.add_argument("--alpha", type=_alpha_arg, default=0.8, help="stability threshold in (0.5, 1)")
    fs.add_argument("--K", type=int, default=1, help="maximal stable sets to collect")
    fs.add_argument("--mode", choices=("walk", "greedy"), default="walk")
    fs.add_argument("--corr-guard", type=float, default=None,
                    help="refuse extensions with squared correlation above this")

    ss = cmds.add_parser("ss", help="plain stability selection")
    _add_io_args(ss)
    _add_subsampling_args(ss)
    ss.add_argument("--alpha", type=_alpha_arg, default=0.8)

    css = cmds.add_parser("css", help="cluster stability selection (representatives)")
    _add_io_args(css)
    _add_subsampling_args(css)
    css.add_argument("--alpha", type=_alpha_arg, default=0.8)
    css.add_argument("--cut-height", type=float, default=0.3,
                     help="dendrogram cut for correlation clustering")

    paths = cmds.add_parser("paths", help="stability paths across a sparsity sweep")
    _add_io_args(paths)
    _add_subsampling_args(paths)
    paths.add_argument("--s0-grid", type=_int_list, required=True, help="e.g. 2,4,8,12")
    paths.add_argument("--cut-height", type=float, default=0.2)
    paths.add_argument("--truth", default=None, help="ground-truth JSON for labels")

    tiles = cmds.add_parser("tiles", help="pairwise similarity of the found models")
    _add_io_args(tiles)
    _add_subsampling_args(tiles)
    tiles.add_argument("--alpha", type=_alpha_arg, default=0.8)
    tiles.add_argument("--K", type=int, default=5)
    tiles.add_argument("--mode", choices=("walk", "greedy"), default="walk")

    bench = cmds.add_parser("bench", help="repetition benchmark across methods")
    bench.add_argument("--recipe", choices=RECIPES, default="benchmark")
    bench.add_argument("--methods", default="l0,ss,css,fsss_greedy",
                       help="comma-separated subset of l0,lasso,ss,css,fsss_greedy,fsss")
    bench.add_argument("--s0-grid", type=_int_list, default=(12, 16, 24, 35))
    bench.add_argument("--reps", type=int, default=5)
    bench.add_argument("--os-trials", type=int, default=5)
    bench.add_argument("--B", type=_even_positive, default=100)
    bench.add_argument("--fold-size", type=int, default=200)
    bench.add_argument("--test-size", type=int, default=500)
    bench.add_argument("--base", choices=("l0", "lasso"), default="l0")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--workers", type=int, default=None)
    bench.add_argument("--out", default=".")
    return parser


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _subsample(args, X, y):
    plan = make_plan(X.n, args.B, seed=args.seed)
    base = BaseProcedureConfig(kind=args.base, s0=args.s0)
    return run_subsampling(X, y, plan, base, workers=args.workers)


def _cmd_gen(args) -> int:
    out = _outdir(args)
    if args.recipe == "demo":
        if args.n is not None or args.noise_sigma is not None:
            raise ValueError("the demo recipe has fixed n=100 and noise scale 0.2")
        X, y, truth = gen_path_demo_data(seed=args.seed)
    elif args.recipe == "benchmark":
        n = args.n if args.n is not None else 600
        sigma = args.noise_sigma if args.noise_sigma is not None else 1.5
        X, y, truth = gen_benchmark_data(seed=args.seed, n=n, noise_sigma=sigma)
    else:
        n = args.n if args.n is not None else 300
        sigma = args.noise_sigma if args.noise_sigma is not None else 1.0
        spec = ClusterSpec(proxy_counts=(2, 2, 2), rep_betas=(1.0, 1.0, 1.0), eta=0.5)
        X, y, truth = gen_cluster_data(spec, n=n, noise_sigma=sigma, seed=args.seed)
    save_dataset(out / "data.csv", X, y)
    write_json(out / "truth.json", truth_to_dict(truth))
    write_manifest(out / "manifest.json", "gen", args.seed, _config(args))
    print(f"wrote {out / 'data.csv'} ({X.n} rows, {X.p} features) and truth.json")
    return 0


def _cmd_fsss(args) -> int:
    out = _outdir(args)
    X, y = load_csv(args.input, response=args.response)
    records, P = _subsample(args, X, y)
    result = fsss(
        X, P, alpha=args.alpha, K=args.K, seed=args.seed,
        mode=args.mode, corr_guard=args.corr_guard,
    )
    write_json(out / "models.json", result_to_dict(result))
    if result.exhausted:
        status = "family exhausted"
    elif len(result.models) >= args.K:
        status = "collected K models"
    else:
        status = "restart budget hit"
    lines = [
        f"maximal stable feature sets at alpha={args.alpha} "
        f"({status}, {result.restarts} restarts)"
    ]
    for i, m in enumerate(result.models):
        names = ", ".join(m.names)
        lines.append(f"  model {i + 1}: stability={m.stability:.4f}  [{names}]")
    if not result.models:
        lines.append("  (none found)")
    table = "\n".join(lines)
    (out / "models.txt").write_text(table + "\n", encoding="utf-8")
    write_manifest(out / "manifest.json", "fsss", args.seed, _config(args))
    print(table)
    return 0


def _cmd_ss(args) -> int:
    out = _outdir(args)
    X, y = load_csv(args.input, response=args.response)
    records, _ = _subsample(args, X, y)
    selected = stability_selection(records, X.p, args.alpha)
    props = selection_proportions(records, X.p)
    payload = {
        "alpha": args.alpha,
        "features": list(selected),
        "names": [X.column_names[j] for j in selected],
        "proportions": [float(props[j]) for j in selected],
    }
    write_json(out / "selected.json", payload)
    write_manifest(out / "manifest.json", "ss", args.seed, _config(args))
    print(f"selected {len(selected)} feature(s): {payload['names']}")
    return 0


def _cmd_css(args) -> int:
    out = _outdir(args)
    X, y = load_csv(args.input, response=args.response)
    records, _ = _subsample(args, X, y)
    selected = cluster_stability_selection_sps(X, records, args.alpha, args.cut_height)
    payload = {
        "alpha": args.alpha,
        "cut_height": args.cut_height,
        "features": list(selected),
        "names": [X.column_names[j] for j in selected],
    }
    write_json(out / "selected.json", payload)
    write_manifest(out / "manifest.json", "css", args.seed, _config(args))
    print(f"selected {len(selected)} feature(s): {payload['names']}")
    return 0


def _cmd_paths(args) -> int:
    import json

    out = _outdir(args)
    X, y = load_csv(args.input, response=args.response)
    truth = None
    if args.truth:
        with open(args.truth, encoding="utf-8") as fh:
            truth = truth_from_dict(json.load(fh))
    df = stability_paths(
        X, y, s0_grid=args.s0_grid, B=args.B, seed=args.seed,
        base_kind=args.base, cut_height=args.cut_height, truth=truth,
    )
    df.to_csv(out / "paths.csv", index=False)
    write_manifest(out / "manifest.json", "paths", args.seed, _config(args))
    print(f"wrote {out / 'paths.csv'} ({len(df)} rows)")
    return 0


def _cmd_tiles(args) -> int:
    out = _outdir(args)
    X, y = load_csv(args.input, response=args.response)
    records, P = _subsample(args, X, y)
    result = fsss(X, P, alpha=args.alpha, K=args.K, seed=args.seed, mode=args.mode)
    subsets = result.feature_sets
    if len(subsets) < 2:
        log.warning("found %d model(s); tiles need at least two", len(subsets))
    df = tile_similarity(X, subsets, P, args.alpha, y=y)
    df.to_csv(out / "tiles.csv", index=False)
    write_json(out / "models.json", result_to_dict(result))
    write_manifest(out / "manifest.json", "tiles", args.seed, _config(args))
    print(f"wrote {out / 'tiles.csv'} ({len(df)} pairs over {len(subsets)} models)")
    return 0


def _cmd_bench(args) -> int:
    out = _outdir(args)
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    config = ExperimentConfig(
        methods=methods,
        s0_grid=tuple(args.s0_grid),
        B=args.B,
        fold_sizes=(args.fold_size,) * 3,
        test_size=args.test_size,
        repetitions=args.reps,
        os_trials=args.os_trials,
        base_kind=args.base,
        seed=args.seed,
        workers=args.workers,
    )
    if args.recipe == "benchmark":
        make_data = lambda seed, n: gen_benchmark_data(seed=seed, n=n)  # noqa: E731
    elif args.recipe == "cluster":
        spec = ClusterSpec(proxy_counts=(2, 2, 2), rep_betas=(1.0, 1.0, 1.0), eta=0.5)
        make_data = lambda seed, n: gen_cluster_data(spec, n=n, noise_sigma=1.0, seed=seed)  # noqa: E731
    else:
        raise ValueError("the demo recipe has a fixed sample size; bench needs resizable data")
    per_rep = run_experiment(make_data, config)
    per_rep.to_csv(out / "per_rep.csv", index=False)
    agg = aggregate(per_rep)
    agg.to_csv(out / "aggregate.csv", index=False)
    summary = summary_table(make_data, config, per_rep=per_rep)
    summary.to_csv(out / "summary.csv", index=False)
    write_json(out / "summary.json", {"rows": summary.to_dict(orient="records")})
    write_manifest(out / "manifest.json", "bench", args.seed, _config(args))
    cols = ["method", "s0", "mse_mean", "fp_mean", "tp_mean", "os"]
    print(summary[cols].to_string(index=False))
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "fsss": _cmd_fsss,
    "ss": _cmd_ss,
    "css": _cmd_css,
    "paths": _cmd_paths,
    "tiles": _cmd_tiles,
    "bench": _cmd_bench,
}


def _config(args) -> dict:
    skip = {"command", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
