"""``hosim`` command line: one subcommand per reproducible figure or table."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from importlib import resources
from typing import Sequence

import numpy as np

from . import __version__
from .census import CONFIG3_NAMES, CONFIG4_NAMES, count_configs3, count_configs4
from .closure import closure_over_time, temporal_overlap_census
from .dataset import (DatasetFormatError, SimplexDataset, filter_max_size, load_dataset,
                      summary_stats, temporal_split)
from .evaluation import auc_pr
from .projection import build_incidence, build_projected_graph, graph_metrics
from .triangles import NoTrianglesError, fraction_open

CSV_VERSION = 1
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ----------------------------------------------------------------------
# helpers


def resolve_dataset(arg: str) -> str:
    """Map a CLI dataset argument to a loadable path.

    Tries the path itself, then a fetched dataset in the cache, then the
    bundled ``fig1`` example.
    """
    from .dataset import _prefix_paths
    from .fetch import SUPPORTED, dataset_prefix, is_cached

    if arg.endswith((".jsonl", ".json")) or all(os.path.exists(p) for p in _prefix_paths(arg)):
        return arg
    if arg in SUPPORTED and is_cached(arg):
        return str(dataset_prefix(arg))
    if os.path.basename(os.path.normpath(arg)) == "fig1":
        return str(resources.files("hosim") / "data" / "fig1")
    return arg


def _load(args) -> SimplexDataset:
    path = resolve_dataset(args.dataset)
    try:
        ds = load_dataset(path)
    except FileNotFoundError as exc:
        raise DataError(str(exc)) from None
    return filter_max_size(ds, args.max_size)


def _csv_writer(out, command: str):
    out.write(f"# hosim {__version__} {command} csv-v{CSV_VERSION}\n")
    return csv.writer(out, lineterminator="\n")


def _emit_json(out, obj) -> None:
    json.dump(obj, out, indent=2, sort_keys=False, allow_nan=False, default=_jsonable)
    out.write("\n")


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _num(x: float):
    return None if isinstance(x, float) and math.isnan(x) else x


def _float_list(text: str, what: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad {what} list {text!r}") from None


def _triangle_summary(ds: SimplexDataset) -> dict:
    try:
        n_open, closed, frac = fraction_open(ds)
    except NoTrianglesError:
        return {"closed": 0, "open": 0, "fraction_open": None}
    return {"closed": closed, "open": n_open, "fraction_open": frac}


# ----------------------------------------------------------------------
# subcommands


def cmd_stats(args, out) -> None:
    ds = _load(args)
    st = summary_stats(ds).as_dict()
    st.update(_triangle_summary(ds))
    g = build_projected_graph(ds)
    if g.n >= 2 and len(ds.active_nodes()) >= 2:
        sub, _ = ds.compact()
        density, avg_deg = graph_metrics(build_projected_graph(sub))
        st.update(edges=g.m, edge_density=density, average_degree=avg_deg)
    if args.csv:
        w = _csv_writer(out, "stats")
        w.writerow(["key", "value"])
        for k, v in st.items():
            w.writerow([k, json.dumps(v) if isinstance(v, dict) else v])
    else:
        _emit_json(out, st)


def cmd_project(args, out) -> None:
    ds = _load(args)
    g = build_projected_graph(ds)
    u, v, wt = g.edges()
    lab = ds.labels

    def write(fh):
        w = _csv_writer(fh, "project")
        w.writerow(["u", "v", "w"])
        a, b = lab[u], lab[v]
        swap = a > b  # keep u < v in original labels
        a, b = np.where(swap, b, a), np.where(swap, a, b)
        w.writerows(zip(a.tolist(), b.tolist(), wt.tolist()))

    if args.out:
        with open(args.out, "w") as fh:
            write(fh)
    else:
        write(out)


def cmd_triangles(args, out) -> None:
    ds = _load(args)
    if args.only_3node:
        ds = ds.select(ds.sizes == 3)
    _emit_json(out, _triangle_summary(ds))


def cmd_census(args, out) -> None:
    ds, _ = _load(args).compact()
    g = build_projected_graph(ds)
    inc = build_incidence(ds)
    counts = count_configs3(g, inc) if args.arity == 3 else count_configs4(g, inc)
    names = CONFIG3_NAMES if args.arity == 3 else CONFIG4_NAMES
    values = counts.values()
    if args.format == "json":
        _emit_json(out, {"arity": args.arity, "n_nodes": g.n,
                         "counts": [{"ref": r, "config": c, "count": v}
                                    for r, (c, v) in enumerate(zip(names, values), 1)]})
        return
    w = _csv_writer(out, "census")
    w.writerow(["ref", "config", "count"])
    for r, (c, v) in enumerate(zip(names, values), 1):
        w.writerow([r, c, v])


def cmd_closure(args, out) -> None:
    ds = _load(args)
    grid = [x / 100.0 for x in _float_list(args.x, "--x")]
    if not grid or any(not 0 < x <= 1 for x in grid):
        raise UsageError("--x values must lie in (0, 100]")
    w = _csv_writer(out, "closure")
    w.writerow(["data_pct", "ref", "config", "instances", "closures", "probability", "low_support"])
    for x, table in closure_over_time(ds, grid, args.arity):
        for row in table.rows():
            p = row["probability"]
            w.writerow([f"{100 * x:g}", row["ref"], row["config"], row["n"], row["x"],
                        "" if p is None else repr(p), int(row["low_support"])])


def cmd_async(args, out) -> None:
    ds = _load(args)
    census = temporal_overlap_census(ds)
    d = census.as_dict()
    d["fractions"] = [_num(f) for f in d["fractions"]]
    _emit_json(out, d)


def cmd_predict(args, out) -> None:
    from .prediction import ScoreFunction, rank_candidates

    try:
        fn = ScoreFunction.parse(args.score)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ds = _load(args)
    split = temporal_split(ds, args.quantile)
    ranked = rank_candidates(split, fn, alpha=args.alpha, seed=args.seed)
    if args.top is not None:
        ranked = ranked.top(args.top)
    lab = ds.labels
    w = _csv_writer(out, f"predict {fn.label}")
    w.writerow(["rank", "u", "v", "w", "score", "label"])
    for r, (t, s, y) in enumerate(zip(ranked.triples, ranked.scores, ranked.labels), 1):
        u, v, x = sorted(lab[t].tolist())
        w.writerow([r, u, v, x, repr(float(s)), int(y)])


def read_ranking(path: str) -> np.ndarray:
    """Labels in rank order from a ``predict`` CSV."""
    try:
        with open(path) as fh:
            lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise DataError(str(exc)) from None
    if not lines:
        raise DataError(f"{path}: empty ranking")
    rows = list(csv.DictReader(io.StringIO("".join(lines))))
    if not rows or "label" not in rows[0] or "rank" not in rows[0]:
        raise DataError(f"{path}: expected columns rank,...,label with at least one row")
    try:
        ranks = np.array([int(r["rank"]) for r in rows])
        labels = np.array([int(r["label"]) for r in rows], dtype=bool)
    except (TypeError, ValueError):
        raise DataError(f"{path}: non-integer rank or label") from None
    return labels[np.argsort(ranks, kind="stable")]


def cmd_eval(args, out) -> None:
    labels = read_ranking(args.ranking)
    try:
        curve = auc_pr(labels)
    except ValueError as exc:
        raise DataError(f"{args.ranking}: {exc}") from None
    _emit_json(out, curve.as_dict())


def _b_grid(text: str) -> list[float]:
    from .generative import b_range

    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError("--b expects lo:hi:step or a comma list")
        try:
            lo, hi, step = map(float, parts)
        except ValueError:
            raise UsageError(f"bad --b range {text!r}") from None
        if step <= 0 or hi < lo:
            raise UsageError("--b range needs lo <= hi and step > 0")
        return b_range(lo, hi, step)
    return _float_list(text, "--b")


def cmd_simulate(args, out) -> None:
    from .generative import sweep

    try:
        ns = [int(t) for t in args.n.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad --n list {args.n!r}") from None
    bs = _b_grid(args.b)
    if not ns or not bs or args.seeds < 1:
        raise UsageError("--n, --b and --seeds must be non-empty")
    try:
        rows = sweep(bs, ns, range(args.seed, args.seed + args.seeds), threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    w = _csv_writer(out, "simulate")
    w.writerow(["n", "b", "seed", "fraction_open", "density", "avg_degree", "n_simplices"])
    for r in rows:
        frac = "" if math.isnan(r.fraction_open) else repr(r.fraction_open)
        w.writerow([r.n, f"{r.b:g}", r.seed, frac, repr(r.density), repr(r.avg_degree),
                    r.n_simplices])


def cmd_egonet(args, out) -> None:
    from .egonet import FEATURES, egonet_experiment

    feats = [f.strip() for f in args.features.split(",") if f.strip()]
    bad = [f for f in feats if f not in FEATURES]
    if bad or not feats:
        raise UsageError(f"unknown feature(s) {bad}; choose from {', '.join(FEATURES)}")
    inputs = []
    for item in args.datasets:
        path, sep, label = item.rpartition(",")
        if not sep or not path or not label:
            raise UsageError(f"expected <dataset>,<label>, got {item!r}")
        ns = argparse.Namespace(dataset=path, max_size=args.max_size)
        inputs.append((_load(ns), label, path))
    if len({lab for _, lab, _ in inputs}) < 2:
        raise UsageError("need datasets from at least two domains")
    stats = egonet_experiment(inputs, feats, count=args.count, train_per_dataset=args.train,
                              trials=args.trials, seed=args.seed)
    _emit_json(out, stats.as_dict())


def cmd_fetch(args, out) -> None:
    from pathlib import Path

    from .fetch import SUPPORTED, FetchError, fetch_dataset

    if args.name not in SUPPORTED:
        raise UsageError(f"unknown dataset {args.name!r}; supported: {', '.join(SUPPORTED)}")
    try:
        prefix = fetch_dataset(args.name, root=Path(args.cache) if args.cache else None)
    except FetchError as exc:
        raise DataError(str(exc)) from None
    _emit_json(out, {"name": args.name, "prefix": str(prefix)})


# ----------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads (default: all cores); results do not depend on it")
    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("dataset", help="three-file prefix, directory, .jsonl file or fetched name")
    data.add_argument("--max-size", type=int, default=25,
                      help="drop simplices with more nodes than this (default 25)")

    p = _Parser(prog="hosim", description="Higher-order interaction analysis toolkit.")
    p.add_argument("--version", action="version", version=f"hosim {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_, parents=(common, data)):
        sp = sub.add_parser(name, parents=list(parents), help=help_, description=help_)
        sp.set_defaults(func=func)
        return sp

    s = add("stats", cmd_stats, "Dataset summary and triangle counts (Table 1, Fig. 1).")
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--csv", action="store_true", help="key,value CSV output")

    s = add("project", cmd_project, "Weighted projected graph as u,v,w rows (Fig. 1C).")
    s.add_argument("--out", help="write the CSV here instead of stdout")

    s = add("triangles", cmd_triangles, "Open and closed triangle counts (Fig. 3).")
    s.add_argument("--only-3node", action="store_true",
                   help="keep only 3-node simplices first (Fig. 3D-E)")

    s = add("census", cmd_census,
            "Enumeration-free configuration census keyed by Table 4 reference numbers.")
    s.add_argument("--arity", type=int, choices=(3, 4), default=3)
    s.add_argument("--format", choices=("csv", "json"), default="csv")

    s = add("closure", cmd_closure,
            "Closure probabilities per configuration over data prefixes (Fig. 4-5, closure-over-time tables).")
    s.add_argument("--arity", type=int, choices=(3, 4), default=3)
    s.add_argument("--x", default="100", help="comma list of data percentages, e.g. 40,60,80,100")

    add("async", cmd_async, "Temporal overlap of open-triangle edges (Table 3).")

    s = add("predict", cmd_predict, "Rank open triangles by a closure score (Table 2, Table 7).")
    s.add_argument("--score", default="harmonic",
                   help="harmonic|geometric|arithmetic|genmean:p|cn|jaccard|aa|pa-deg|pa-simp|"
                        "katz[:w]|ppr[:w]|sppr|sppr-grad|sppr-curl|sppr-harm|logreg|random")
    s.add_argument("--alpha", type=float, default=0.85, help="PageRank teleport (default 0.85)")
    s.add_argument("--top", type=int, help="emit only the K best candidates")
    s.add_argument("--quantile", type=float, default=0.8,
                   help="train/test split quantile (default 0.8)")

    s = add("eval", cmd_eval, "AUC-PR of a predict ranking (Table 2).", parents=(common,))
    s.add_argument("ranking", help="CSV written by 'hosim predict'")

    s = add("simulate", cmd_simulate, "Generative model sweep of fraction open vs b (Fig. 6).",
            parents=(common,))
    s.add_argument("--n", default="25,50,100,200", help="comma list of node counts")
    s.add_argument("--b", default="0.8:1.8:0.02", help="lo:hi:step or comma list")
    s.add_argument("--seeds", type=int, default=5, help="seeds per (n, b), starting at --seed")

    s = add("egonet", cmd_egonet, "Egonet domain classification accuracy (egonet prediction table and decision-boundary figure).",
            parents=(common,))
    s.add_argument("datasets", nargs="+", metavar="DATASET,LABEL")
    s.add_argument("--features", default="open,deg,density")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--count", type=int, default=100, help="egonets per dataset and trial")
    s.add_argument("--train", type=int, default=80, help="training egonets per dataset")
    s.add_argument("--max-size", type=int, default=25)

    s = add("fetch", cmd_fetch, "Download a small public dataset used in Tables 1-3.",
            parents=(common,))
    s.add_argument("name")
    s.add_argument("--cache", help="cache directory (default $HOSIM_CACHE or ~/.cache/hosim)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be positive")
    if getattr(args, "max_size", 1) < 1:
        parser.error("--max-size must be positive")
    out = sys.stdout
    try:
        args.func(args, out)
    except UsageError as exc:
        print(f"hosim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DatasetFormatError, NoTrianglesError, OverflowError, ValueError) as exc:
        print(f"hosim: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
