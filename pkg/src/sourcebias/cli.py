"""Command-line front end: ``sourcebias <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from datetime import timedelta
from pathlib import Path

import numpy as np

from . import analysis, coverage, ingest, selection, synth, training
from .baselines import knn_scorer, popularity_scorer
from .evaluation import auc_report
from .model import FactorModel, export_embeddings_csv, load_model, save_model

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dump_json(obj, path: str | None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _load_train(path: str) -> ingest.InteractionDataset:
    """Accept a dataset directory or a split directory (uses its train part)."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no such dataset: {p}")
    if (p / "split.json").is_file():
        return ingest.load_dataset(p / "train")
    return ingest.load_dataset(p)


def _check_aligned(model: FactorModel, ds: ingest.InteractionDataset):
    if model.source_names is not None and tuple(model.source_names) != tuple(ds.sources):
        raise ingest.DataError("model and dataset source tables differ")
    if model.n_sources != ds.n_sources:
        raise ingest.DataError("model and dataset source counts differ")


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_ingest(args):
    fmt = ingest.FORMATS[args.format]
    for p in args.input:
        if not Path(p).is_file():
            raise FileNotFoundError(f"no such input file: {p}")
    parsed = ingest.read_mentions(args.input, fmt, strict=args.strict)
    if args.start and args.end:
        window = (ingest.parse_time(args.start), ingest.parse_time(args.end))
    elif parsed.records:
        times = [r.mention_time for r in parsed.records]
        window = (ingest.parse_time(args.start) if args.start else min(times),
                  ingest.parse_time(args.end) if args.end else max(times) + timedelta(seconds=1))
    else:
        raise ingest.EmptyDatasetError("no records parsed")
    ds = ingest.build_dataset(parsed.records, window, args.min_events, args.min_sources,
                              parse_skipped=parsed.skipped)
    ingest.save_dataset(ds, args.out)
    logging.info("dataset: %d sources, %d events, %d interactions",
                 ds.n_sources, ds.n_events, ds.n_interactions)


def cmd_split(args):
    ds = _load_train(args.dataset)
    holdout = None
    if args.holdout_hours is not None:
        end = ds.window[1]
        holdout = (max(ds.window[0], end - timedelta(hours=args.holdout_hours)), end)
    sp = ingest.split_leave_one_out(ds, holdout, args.seed)
    ingest.save_split(sp, args.out)


def cmd_train(args):
    ds = _load_train(args.dataset)
    cfg = training.TrainConfig(alpha=args.alpha, lam=args.lam, K=args.k, epochs=args.epochs,
                               seed=args.seed, init_scale=args.init_scale)
    if args.log and args.log != "-":
        with open(args.log, "w") as fh:
            model = training.train(ds, cfg, on_epoch=training.jsonl_logger(fh))
    else:
        model = training.train(ds, cfg, on_epoch=training.jsonl_logger(sys.stderr))
    save_model(model, args.out)


def cmd_eval(args):
    model = load_model(args.model)
    sp = ingest.load_split(args.split)
    _check_aligned(model, sp.train)
    ev = sp.eval_set
    report = {"eval_size": len(ev), "scorers": {"mf": auc_report(model, ev)}}
    for name in _csv_list(args.baselines):
        if name == "popularity":
            report["scorers"]["popularity"] = auc_report(popularity_scorer(sp.train), ev)
        elif name == "knn":
            report["scorers"]["knn"] = auc_report(knn_scorer(sp.train, args.knn_k), ev)
        else:
            raise UsageError(f"unknown baseline {name!r}")
    _dump_json(report, args.out)


def _metrics(ds, picks, args) -> dict:
    top = [int(t) for t in _csv_list(args.top)]
    return coverage.coverage_metrics(ds, picks, top, args.gini_universe)


def _write_lorenz(ds, picks, universe, path):
    prof = coverage.coverage_profile(ds, picks)
    counts = prof.covered_counts() if universe == "subset" else prof.counts
    pts = coverage.lorenz_points(counts)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["population_share", "coverage_share"])
        w.writerows([[repr(float(a)), repr(float(b))] for a, b in pts])


def cmd_select(args):
    model = load_model(args.model)
    ds = _load_train(args.dataset)
    _check_aligned(model, ds)
    rel = selection.relevance_scores(ds)
    res = selection.mmr_select(model, rel, selection.SelectionConfig(args.n, args.beta, args.epsilon))
    rows = [f"{r}\t{ds.sources[s]}\t{sc!r}\n" for r, (s, sc) in enumerate(zip(res.picks, res.scores), 1)]
    table = "rank\tsource_name\tmmr_score\n" + "".join(rows)
    metrics = _metrics(ds, res.picks, args)
    metrics.update({"n": args.n, "beta": args.beta})
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "selection.tsv").write_text(table)
        _dump_json(metrics, str(out / "metrics.json"))
        _write_lorenz(ds, res.picks, args.gini_universe, out / "lorenz.csv")
    else:
        sys.stdout.write(table)
        sys.stderr.write(json.dumps(metrics, sort_keys=True) + "\n")


def _read_selection(path: str, ds) -> list[int]:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such selection file: {p}")
    pos = {n: i for i, n in enumerate(ds.sources)}
    picks = []
    for line in p.read_text().splitlines()[1:]:
        if not line.strip():
            continue
        name = line.split("\t")[1]
        if name not in pos:
            raise ingest.DataError(f"unknown source in selection: {name}")
        picks.append(pos[name])
    return picks


def cmd_metrics(args):
    ds = _load_train(args.dataset)
    picks = _read_selection(args.selection, ds)
    _dump_json(_metrics(ds, picks, args), args.out)
    if args.lorenz:
        _write_lorenz(ds, picks, args.gini_universe, args.lorenz)


def _top_active(ds, m) -> list[int]:
    deg = ds.source_degrees()
    order = np.lexsort((np.arange(ds.n_sources), -deg))
    return order[:m].tolist()


def cmd_distances(args):
    model = load_model(args.model)
    ds = _load_train(args.dataset)
    _check_aligned(model, ds)
    analysis.write_distances_csv(model, _top_active(ds, args.top_m), args.out)
    if args.embeddings:
        export_embeddings_csv(model, args.embeddings)


def cmd_correlate(args):
    models = [load_model(m) for m in args.models]
    if len(models) < 2:
        raise UsageError("need at least two models")
    activities = None
    if args.datasets:
        if len(args.datasets) != len(models):
            raise UsageError("--datasets must match --models one to one")
        activities = []
        for path in args.datasets:
            ds = _load_train(path)
            activities.append(dict(zip(ds.sources, ds.source_degrees().tolist())))
    summary = analysis.correlation_summary(models, activities, args.top_m)
    summary["models"] = list(args.models)
    _dump_json(summary, args.out)


def cmd_synth(args):
    if args.kind == "blocks":
        records, window, *_ = synth.planted_blocks(
            args.sources, args.events, args.groups, args.groups, args.p_in, args.p_out, seed=args.seed)
    else:
        records, window, _ = synth.skewed_landscape(seed=args.seed)
    with open(args.out, "w") as fh:
        synth.write_simple_tsv(records, fh)
    logging.info("window %s .. %s", ingest.format_time(window[0]), ingest.format_time(window[1]))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sourcebias", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", help="build a filtered dataset from mention TSV files")
    s.add_argument("--input", nargs="+", required=True)
    s.add_argument("--format", choices=sorted(ingest.FORMATS), default="gdelt")
    s.add_argument("--start", help="window start (ISO 8601, UTC)")
    s.add_argument("--end", help="window end, exclusive (ISO 8601, UTC)")
    s.add_argument("--min-events", type=int, default=5)
    s.add_argument("--min-sources", type=int, default=5)
    s.add_argument("--strict", action="store_true", help="fail on malformed lines")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("split", help="leave-one-out split on the last day of the window")
    s.add_argument("--dataset", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--holdout-hours", type=float, default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("train", help="fit the BPR factor model")
    s.add_argument("--dataset", required=True)
    s.add_argument("--k", type=int, default=20)
    s.add_argument("--alpha", type=float, default=0.1)
    s.add_argument("--lambda", dest="lam", type=float, default=0.01)
    s.add_argument("--epochs", type=int, default=50)
    s.add_argument("--init-scale", type=float, default=0.1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--log", help="JSON-lines training log path ('-' for stderr, the default)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", help="leave-one-out AUC of the model and baselines")
    s.add_argument("--model", required=True)
    s.add_argument("--split", required=True)
    s.add_argument("--baselines", default="popularity,knn")
    s.add_argument("--knn-k", type=int, default=10)
    s.add_argument("--out")
    s.set_defaults(func=cmd_eval)

    def metric_flags(s):
        s.add_argument("--gini-universe", choices=["subset", "all"], default="subset")
        s.add_argument("--top", default="100,1000,5000", help="retention cut-offs")

    s = sub.add_parser("select", help="MMR source selection")
    s.add_argument("--model", required=True)
    s.add_argument("--dataset", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--beta", type=float, default=0.5)
    s.add_argument("--epsilon", type=float, default=1e-9)
    s.add_argument("--out", help="output directory (selection.tsv, metrics.json, lorenz.csv)")
    metric_flags(s)
    s.set_defaults(func=cmd_select)

    s = sub.add_parser("metrics", help="coverage metrics of a selection TSV")
    s.add_argument("--dataset", required=True)
    s.add_argument("--selection", required=True)
    s.add_argument("--out")
    s.add_argument("--lorenz", help="write Lorenz points CSV here")
    metric_flags(s)
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("distances", help="pairwise embedding distances of the most active sources")
    s.add_argument("--model", required=True)
    s.add_argument("--dataset", required=True)
    s.add_argument("--top-m", type=int, default=1000)
    s.add_argument("--out", required=True)
    s.add_argument("--embeddings", help="also write all source embeddings as CSV")
    s.set_defaults(func=cmd_distances)

    s = sub.add_parser("correlate", help="cross-week Pearson correlation of embedding distances")
    s.add_argument("--models", nargs="+", required=True)
    s.add_argument("--datasets", nargs="+")
    s.add_argument("--top-m", type=int, default=1000)
    s.add_argument("--out")
    s.set_defaults(func=cmd_correlate)

    s = sub.add_parser("synth", help="write a synthetic mentions file (simple layout)")
    s.add_argument("--kind", choices=["blocks", "skewed"], default="blocks")
    s.add_argument("--sources", type=int, default=200)
    s.add_argument("--events", type=int, default=2000)
    s.add_argument("--groups", type=int, default=4)
    s.add_argument("--p-in", type=float, default=0.3)
    s.add_argument("--p-out", type=float, default=0.01)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"sourcebias: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, IndexError, KeyError) as exc:
        print(f"sourcebias: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
