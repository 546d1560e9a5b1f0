"""Command-line interface: ``facetrec <command> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .benchmark import DEFAULT_BENCH_SPEC, run_bench
from .evaluation import run_evaluation
from .ingest import Dataset, IdMap, IngestError, ingest, open_dataset, save
from .recommender import ConfigurationError, find_profile, load_profiles, table2_profiles
from .stats import StatisticsError, dataset_stats
from .store import ValidationError
from .synthetic import SyntheticSpec, generate_synthetic

logger = logging.getLogger("facetrec")


def _data_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("input data")
    g.add_argument("--data", help="saved store directory or interaction file")
    g.add_argument("--format", choices=("csv", "tsv"), default="tsv")
    g.add_argument("--mode", choices=("implicit", "explicit"), default="implicit")
    g.add_argument("--header", action="store_true", help="skip the first line of the file")
    g.add_argument("--strict", action="store_true", help="fail on any malformed row")
    return p


def _synthetic_options() -> argparse.ArgumentParser:
    d = DEFAULT_BENCH_SPEC
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group(
        "synthetic data",
        "Per-user counts follow P(c) ~ c^-count_shape on [min_count, max_count]. "
        "Any --count-shape > 0 with --max-count well above --min-count (e.g. the "
        "defaults, or 1.5 with 1..300) yields right-skewed counts. Items follow a "
        "Zipf law with --popularity-exponent (0 = uniform).",
    )
    g.add_argument("--users", type=int, default=d.num_users)
    g.add_argument("--items", type=int, default=d.num_items)
    g.add_argument("--min-count", type=int, default=d.min_count)
    g.add_argument("--max-count", type=int, default=d.max_count)
    g.add_argument("--count-shape", type=float, default=d.count_shape)
    g.add_argument("--popularity-exponent", type=float, default=d.popularity_exponent)
    g.add_argument("--data-seed", type=int, default=d.seed, help="seed of the synthetic generator")
    return p


def _profile_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--profiles", help="profile file (default: built-in MP, cf_full, cf_ov20..cf_ov100)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="facetrec", description=__doc__)
    parser.add_argument("--version", action="version", version=f"facetrec {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    data, synth, prof = _data_options(), _synthetic_options(), _profile_options()

    p = sub.add_parser("ingest", parents=[data], help="load an interaction file and save the store")
    p.add_argument("input", help="interaction file")
    p.add_argument("--out", required=True, help="output directory")

    sub.add_parser("stats", parents=[data], help="dataset statistics as JSON").add_argument(
        "--bias-corrected", action="store_true", help="sample (bias-corrected) moment estimators"
    )

    p = sub.add_parser(
        "evaluate", parents=[data, synth, prof],
        help="evaluate profiles on a holdout split (synthetic data when --data is absent)",
    )
    p.add_argument("--holdout", type=int, default=10)
    p.add_argument("--min-interactions", type=int, default=11)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="split seed")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--csv", help="write one row per (profile, metric)")
    p.add_argument("--curve", help="write nDCG@1..k per profile")

    p = sub.add_parser("generate", parents=[synth], help="write a synthetic interaction TSV")
    p.add_argument("--out", required=True)

    p = sub.add_parser(
        "bench", parents=[data, synth],
        help="latency of full vs prefiltered CF (synthetic data when --data is absent)",
    )
    p.add_argument("--budgets", default="20,40,60,80,100", help="comma-separated candidate budgets")
    p.add_argument("--sample", type=int, default=500, help="number of timed target users")
    p.add_argument("--min-interactions", type=int, default=11, help="minimum history of timed users")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="target sampling seed")
    p.add_argument("--out", help="result JSON path (default: stdout)")

    p = sub.add_parser("recommend", parents=[data, prof], help="recommend items for one user")
    p.add_argument("--user", required=True, help="user key")
    p.add_argument("--profile", required=True, help="profile name")
    p.add_argument("--k", type=int, default=10)

    p = sub.add_parser("serve", parents=[data, prof], help="start the HTTP service")
    p.add_argument("--bind", help="host:port (default: $FACETREC_BIND or 127.0.0.1:8080)")
    return parser


def _spec(args) -> SyntheticSpec:
    return SyntheticSpec(
        num_users=args.users,
        num_items=args.items,
        min_count=args.min_count,
        max_count=args.max_count,
        count_shape=args.count_shape,
        popularity_exponent=args.popularity_exponent,
        seed=args.data_seed,
    )


def _synthetic_dataset(args) -> Dataset:
    store = generate_synthetic(_spec(args))
    snap = store.snapshot()
    users = IdMap(f"u{i}" for i in range(snap.user_capacity))
    items = IdMap(f"i{i}" for i in range(snap.item_capacity))
    return Dataset(store, users, items, rows=snap.num_interactions)


def _dataset(args, synthetic_fallback: bool = False) -> Dataset:
    if args.data is None:
        if synthetic_fallback:
            return _synthetic_dataset(args)
        raise IngestError("--data is required")
    ds = open_dataset(args.data, args.format, args.mode, args.header, args.strict)
    if ds.malformed:
        print(f"warning: {ds.malformed} malformed row(s) skipped", file=sys.stderr)
    return ds


def _profiles(args):
    if args.profiles is None:
        return table2_profiles()
    return load_profiles(Path(args.profiles).read_text(encoding="utf-8"))


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_ingest(args) -> int:
    ds = ingest(args.input, args.format, args.mode, args.header, args.strict)
    save(ds, args.out)
    print(json.dumps({
        "rows": ds.rows,
        "malformed": ds.malformed,
        "errors": ds.errors,
        "num_users": ds.store.num_users,
        "num_items": ds.store.num_items,
        "num_interactions": ds.store.num_interactions,
        "out": str(args.out),
    }, indent=2))
    return 0


def cmd_stats(args) -> int:
    ds = _dataset(args)
    print(json.dumps(dataset_stats(ds.store, bias_corrected=args.bias_corrected).to_dict(), indent=2))
    return 0


def cmd_evaluate(args) -> int:
    profiles = _profiles(args)
    ds = _dataset(args, synthetic_fallback=True)
    report = run_evaluation(
        ds.store, profiles, k=args.k, holdout=args.holdout,
        min_interactions=args.min_interactions, seed=args.seed, parallelism=args.parallelism,
    )
    report.metadata["data"] = args.data if args.data else {"synthetic": vars(_spec(args))}
    _emit(report.to_json(), args.out)
    if args.csv:
        _emit(report.to_csv(), args.csv)
    if args.curve:
        _emit(report.curve_csv(), args.curve)
    return 0


def cmd_generate(args) -> int:
    ds = _synthetic_dataset(args)
    with open(args.out, "w", encoding="utf-8") as fh:
        for u, i, _ in ds.store.triples():
            fh.write(f"{ds.users.key(u)}\t{ds.items.key(i)}\n")
    return 0


def cmd_bench(args) -> int:
    budgets = [int(b) for b in args.budgets.split(",") if b.strip()]
    ds = _dataset(args, synthetic_fallback=True)
    result = run_bench(
        ds.store, budgets, sample=args.sample, min_interactions=args.min_interactions,
        repeats=args.repeats, seed=args.seed,
    )
    result["data"] = args.data if args.data else {"synthetic": vars(_spec(args))}
    _emit(json.dumps(result, indent=2) + "\n", args.out)
    return 0


def cmd_recommend(args) -> int:
    if args.k < 1:
        raise ValidationError("--k must be >= 1")
    profile = find_profile(_profiles(args), args.profile)
    ds = _dataset(args)
    for item, score in ds.recommend(args.user, profile, args.k):
        print(f"{item}\t{score!r}")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    profiles = _profiles(args)
    ds = _dataset(args)
    serve(ds, profiles, args.bind)
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "stats": cmd_stats,
    "evaluate": cmd_evaluate,
    "generate": cmd_generate,
    "bench": cmd_bench,
    "recommend": cmd_recommend,
    "serve": cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (IngestError, ConfigurationError, StatisticsError, ValidationError, OSError) as exc:
        print(f"facetrec {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
