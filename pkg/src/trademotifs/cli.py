"""Command-line interface: full pipeline plus one subcommand per stage.

Stages exchange plain CSV edge lists (src,dst,weight) so each step is
independently runnable and inspectable. One master seed drives all
randomness: stage seeds derive from it as
``derive_seed(master, stage_name, period_index, side)``, so a full run is
reproducible from (inputs, flags, seed) alone, for any worker count.

Subcommands: run, ingest, split, motifs, significance, report, motif-table.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__, kernels, rng
from .classify import get_class_table
from .errors import CsvFormatError, StageError, TradeMotifsError
from .esu import SamplerConfig, census, rand_esu_sample
from .graph_core import WeightedDigraph, build_graph
from .ingest import ColumnMap, Flow, YearRange, aggregate_flows, parse_csv
from .nullmodel import EnsembleConfig, MotifStats, build_ensemble, significance
from .report import (
    AnalysisReport,
    build_report,
    render_csv,
    render_diff_markdown,
    render_json,
)
from .split import SplitConfig, histogram_rows, split_with_config

log = logging.getLogger(__name__)

DEFAULT_PERIODS = "2004-2006,2007-2007,2008-2010"
_PERIOD_NAMES_3 = ("Before", "During", "After")


# -- helpers ----------------------------------------------------------------


def _read_edge_csv(path: str | Path) -> WeightedDigraph:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["src", "dst", "weight"]:
            raise CsvFormatError(f"{path}: expected edge-list header 'src,dst,weight'")
        records = [(row[0], row[1], float(row[2])) for row in reader if row]
    return build_graph(records)


def _write_edge_csv(path: str | Path, g: WeightedDigraph) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("src,dst,weight\n")
        for src, dst, w in g.to_records():
            fh.write(f"{src},{dst},{w!r}\n")


def _parse_col_map(text: str | None) -> ColumnMap:
    if not text:
        return ColumnMap()
    overrides = {}
    for item in text.split(","):
        if "=" not in item:
            raise CsvFormatError(f"--col-map entry '{item}' is not key=value")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    return ColumnMap.from_overrides(overrides)


def _parse_periods(text: str) -> list[YearRange]:
    return [YearRange.parse(part) for part in text.split(",") if part.strip()]


def _sampler(args, seed: int) -> SamplerConfig:
    return SamplerConfig.from_fraction(args.motif_size, args.sample_q, seed)


def _split_config(args) -> SplitConfig:
    return SplitConfig(
        bins=args.bins,
        min_gap_bins=args.min_gap,
        manual_threshold=args.threshold,
        log_scale=not args.linear_hist,
    )


def _dump_hist(path: str, hist) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("bin_lower,bin_upper,count\n")
        for lo, hi, c in histogram_rows(hist):
            fh.write(f"{lo!r},{hi!r},{c}\n")


def _dump_null(path: str, ensemble) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("replicate,canonical_id,concentration\n")
        for r in range(ensemble.concentrations.shape[0]):
            for idx, cls in enumerate(ensemble.table.classes):
                fh.write(
                    f"{r},{cls.canonical_id},{ensemble.concentrations[r, idx]!r}\n"
                )


def _dump_occurrences(path: str, g: WeightedDigraph, cfg: SamplerConfig) -> None:
    table = get_class_table(cfg.k)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(f"node_{i}" for i in range(cfg.k)) + ",canonical_id\n")
        for occ in rand_esu_sample(g, cfg):
            cls = table.lookup(occ.edge_mask)
            labels = (g.labels[v] for v in occ.nodes)
            fh.write(",".join(labels) + f",{cls.canonical_id}\n")


STATS_HEADER = (
    "canonical_id,display_id,real_count,concentration,null_mean,null_std,z_score,p_value"
)


def _write_stats_csv(path: str | Path, stats: list[MotifStats]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(STATS_HEADER + "\n")
        for s in stats:
            z = "" if s.z_score is None else repr(s.z_score)
            fh.write(
                f"{s.motif.canonical_id},{s.motif.display_id},{s.real_count},"
                f"{s.concentration!r},{s.null_mean!r},{s.null_std!r},{z},{s.p_value!r}\n"
            )


def _read_stats_csv(path: str | Path) -> list[MotifStats]:
    table = get_class_table(3)
    stats = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = set(STATS_HEADER.split(","))
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise CsvFormatError(f"{path}: expected stats header '{STATS_HEADER}'")
        for row in reader:
            canon = int(row["canonical_id"])
            motif = table.by_canonical.get(canon)
            if motif is None:
                motif = get_class_table(4).by_canonical.get(canon)
            if motif is None:
                raise CsvFormatError(f"{path}: unknown canonical id {canon}")
            stats.append(
                MotifStats(
                    motif=motif,
                    real_count=int(row["real_count"]),
                    concentration=float(row["concentration"]),
                    null_mean=float(row["null_mean"]),
                    null_std=float(row["null_std"]),
                    z_score=float(row["z_score"]) if row["z_score"] else None,
                    p_value=float(row["p_value"]),
                )
            )
    return stats


def _period_labels(periods: list[YearRange]) -> list[str]:
    if len(periods) == len(_PERIOD_NAMES_3):
        return [
            f"{name} ({p.label})" for name, p in zip(_PERIOD_NAMES_3, periods)
        ]
    return [p.label for p in periods]


# -- stage runners -----------------------------------------------------------


def _stage(name: str):
    """Decorator tagging failures with the pipeline stage they occur in."""

    def wrap(fn):
        def inner(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except StageError:
                raise
            except (TradeMotifsError, OSError, ValueError) as exc:
                raise StageError(name, str(exc)) from exc

        return inner

    return wrap


@_stage("ingest")
def _ingest_graph(args, years: YearRange) -> WeightedDigraph:
    parsed = parse_csv(args.input, _parse_col_map(args.col_map))
    if parsed.n_skipped:
        log.info("skipped rows: %s", dict(parsed.skipped))
    flow = Flow.EXPORT if args.flow == "export" else Flow.IMPORT
    edges = aggregate_flows(parsed.records, years, flow)
    return build_graph(edges)


@_stage("significance")
def _side_stats(
    g: WeightedDigraph, args, master_seed: int, period_idx: int, side: str
) -> tuple[list[MotifStats], object]:
    sampler = _sampler(args, rng.derive_seed(master_seed, "esu", period_idx, side))
    real = census(g, sampler)
    ens_cfg = EnsembleConfig(
        n_random=args.ensemble,
        switches_per_edge=args.switches_per_edge,
        seed=rng.derive_seed(master_seed, "null", period_idx, side),
    )
    ensemble = build_ensemble(g, sampler, ens_cfg)
    return significance(real, ensemble), ensemble


def _provenance(args, periods: list[YearRange]) -> dict:
    # Runtime-only knobs (threads) are excluded: they do not affect results.
    return {
        "version": __version__,
        "input": str(args.input),
        "flow": args.flow,
        "periods": [p.label for p in periods],
        "seed": args.seed,
        "seed_rule": "derive_seed(seed, stage, period_index, side)",
        "motif_size": args.motif_size,
        "sample_q": args.sample_q,
        "ensemble": args.ensemble,
        "switches_per_edge": args.switches_per_edge,
        "bins": args.bins,
        "threshold": args.threshold,
        "linear_hist": args.linear_hist,
        "min_gap": args.min_gap,
        "p_filter": args.p_filter,
        "freq_filter": args.freq_filter,
        "locale_comma": args.locale_comma,
    }


def _cmd_run(args) -> int:
    periods = _parse_periods(args.years)
    if not periods:
        raise StageError("config", "no analysis periods given")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    reports: list[tuple[str, AnalysisReport]] = []
    for idx, years in enumerate(periods):
        g = _ingest_graph(args, years)
        split_stage = _stage("split")(split_with_config)
        result = split_stage(g, _split_config(args))
        if args.dump_hist:
            _dump_hist(f"{args.dump_hist}.{years.label}", result.histogram)
        print(
            f"{years.label}: {g.n} nodes, {g.edge_count} edges; "
            f"threshold {result.threshold:g} -> "
            f"{result.inliers.edge_count} inlier / "
            f"{result.outliers.edge_count} outlier edges"
        )

        side_stats = {}
        for side, graph in (("inliers", result.inliers), ("outliers", result.outliers)):
            stats, ensemble = _side_stats(graph, args, args.seed, idx, side)
            side_stats[side] = stats
            if args.dump_null:
                _dump_null(f"{args.dump_null}.{years.label}.{side}", ensemble)
            if args.dump_occurrences:
                sampler = _sampler(
                    args, rng.derive_seed(args.seed, "esu", idx, side)
                )
                _dump_occurrences(
                    f"{args.dump_occurrences}.{years.label}.{side}", graph, sampler
                )

        report = build_report(
            years.start_year,
            years.end_year,
            side_stats["inliers"],
            side_stats["outliers"],
            p_max=args.p_filter,
            f_min=args.freq_filter,
        )
        period_dir = out_dir / years.label
        period_dir.mkdir(parents=True, exist_ok=True)
        (period_dir / "report.csv").write_text(
            render_csv(report, args.locale_comma), encoding="utf-8"
        )
        (period_dir / "report.json").write_text(render_json(report), encoding="utf-8")
        reports.append((years.label, report))

    labeled = [
        (label, rep)
        for label, (_, rep) in zip(_period_labels(periods), reports)
    ]
    (out_dir / "diff.md").write_text(
        render_diff_markdown(labeled, args.locale_comma), encoding="utf-8"
    )
    (out_dir / "config.json").write_text(
        json.dumps(_provenance(args, periods), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {len(reports)} period report(s) and diff.md under {out_dir}")
    return 0


def _cmd_ingest(args) -> int:
    years = YearRange.parse(args.years)
    g = _ingest_graph(args, years)
    _write_edge_csv(args.output, g)
    print(f"{args.output}: {g.n} nodes, {g.edge_count} edges for {years.label}")
    return 0


def _cmd_split(args) -> int:
    read = _stage("split")(_read_edge_csv)
    g = read(args.input)
    result = _stage("split")(split_with_config)(g, _split_config(args))
    if args.dump_hist:
        _dump_hist(args.dump_hist, result.histogram)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_edge_csv(out_dir / "inliers.csv", result.inliers)
    _write_edge_csv(out_dir / "outliers.csv", result.outliers)
    print(f"threshold: {result.threshold!r}")
    print(
        f"inliers: {result.inliers.edge_count} edges, "
        f"outliers: {result.outliers.edge_count} edges"
    )
    return 0


def _cmd_motifs(args) -> int:
    read = _stage("motifs")(_read_edge_csv)
    g = read(args.input)
    sampler = _sampler(args, args.seed)
    result = _stage("motifs")(census)(g, sampler)
    conc = result.concentrations()
    print(f"observed {result.total} connected size-{args.motif_size} subgraphs")
    print(f"estimated total at q={sampler.q:g}: {result.estimated_total:g}")
    rows = [
        (cls.canonical_id, cls.display_id, cls.name, int(c), float(pc), c / sampler.q)
        for cls, c, pc in zip(result.table.classes, result.counts, conc)
    ]
    if args.output:
        with open(args.output, "w", newline="", encoding="utf-8") as fh:
            fh.write("canonical_id,display_id,name,count,concentration,estimated_count\n")
            for canon, disp, name, cnt, pc, est in rows:
                fh.write(f"{canon},{disp},{name},{cnt},{pc!r},{est!r}\n")
    else:
        for canon, disp, name, cnt, pc, _est in rows:
            if cnt:
                print(f"  {disp:>4} {name:<32} {cnt:>10}  {pc:6.2f}%")
    if args.dump_occurrences:
        _dump_occurrences(args.dump_occurrences, g, sampler)
    return 0


def _cmd_significance(args) -> int:
    read = _stage("significance")(_read_edge_csv)
    g = read(args.input)
    sampler = _sampler(args, rng.derive_seed(args.seed, "esu"))
    real = _stage("significance")(census)(g, sampler)
    ens_cfg = EnsembleConfig(
        n_random=args.ensemble,
        switches_per_edge=args.switches_per_edge,
        seed=rng.derive_seed(args.seed, "null"),
    )
    ensemble = _stage("significance")(build_ensemble)(g, sampler, ens_cfg)
    stats = significance(real, ensemble)
    _write_stats_csv(args.output, stats)
    if args.dump_null:
        _dump_null(args.dump_null, ensemble)
    print(f"{args.output}: {len(stats)} class statistics written")
    return 0


def _cmd_report(args) -> int:
    # Collect (period, side) stats files: SYEAR-EYEAR:TYPE:PATH
    by_period: dict[str, dict[str, list[MotifStats]]] = {}
    order: list[str] = []
    for spec in args.stats:
        try:
            period, side, path = spec.split(":", 2)
        except ValueError:
            raise StageError("report", f"--stats '{spec}' is not PERIOD:TYPE:PATH")
        side = side.lower()
        if side not in ("inliers", "outliers"):
            raise StageError("report", f"--stats type '{side}' must be inliers|outliers")
        if period not in by_period:
            by_period[period] = {}
            order.append(period)
        by_period[period][side] = _stage("report")(_read_stats_csv)(path)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    for period in order:
        sides = by_period[period]
        if set(sides) != {"inliers", "outliers"}:
            raise StageError("report", f"period {period} needs both inliers and outliers stats")
        years = YearRange.parse(period)
        rep = build_report(
            years.start_year,
            years.end_year,
            sides["inliers"],
            sides["outliers"],
            p_max=args.p_filter,
            f_min=args.freq_filter,
        )
        period_dir = out_dir / years.label
        period_dir.mkdir(parents=True, exist_ok=True)
        (period_dir / "report.csv").write_text(
            render_csv(rep, args.locale_comma), encoding="utf-8"
        )
        (period_dir / "report.json").write_text(render_json(rep), encoding="utf-8")
        reports.append((years.label, rep))

    labels = _period_labels([YearRange.parse(p) for p in order])
    labeled = [(lab, rep) for lab, (_, rep) in zip(labels, reports)]
    (out_dir / "diff.md").write_text(
        render_diff_markdown(labeled, args.locale_comma), encoding="utf-8"
    )
    print(f"wrote {len(reports)} period report(s) and diff.md under {out_dir}")
    return 0


def _cmd_motif_table(args) -> int:
    table = get_class_table(args.k)
    if args.format == "markdown":
        print("| Canonical | IDM | Name | Representative edges |")
        print("|----------:|----:|------|----------------------|")
        for cls in table.classes:
            edges = ";".join(f"{i}->{j}" for i, j in cls.representative_edges())
            print(f"| {cls.canonical_id} | {cls.display_id} | {cls.name} | {edges} |")
    else:
        print("canonical_id,display_id,name,edges")
        for cls in table.classes:
            edges = ";".join(f"{i}->{j}" for i, j in cls.representative_edges())
            print(f'{cls.canonical_id},{cls.display_id},"{cls.name}",{edges}')
    return 0


# -- argument parsing --------------------------------------------------------


def _add_ingest_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="raw trade CSV")
    p.add_argument("--flow", choices=("export", "import"), default="export")
    p.add_argument("--col-map", default=None, help="column overrides: key=name,... "
                   "(keys: year, reporter, partner, flow, value)")


def _add_split_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bins", type=int, default=10_000, help="histogram bins")
    p.add_argument("--threshold", type=float, default=None, help="manual split threshold")
    p.add_argument("--linear-hist", action="store_true", help="bin raw weights instead of logs")
    p.add_argument("--min-gap", type=int, default=1, help="minimum empty-bin run")
    p.add_argument("--dump-hist", default=None, help="write histogram CSV here")


def _add_sampler_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--motif-size", type=int, default=3, help="subgraph size k")
    p.add_argument("--sample-q", type=float, default=1.0,
                   help="leaf sampling fraction (1.0 = exact enumeration)")
    p.add_argument("--seed", type=int, default=0, help="master seed")


def _add_ensemble_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ensemble", type=int, default=1000, help="null-model replicates")
    p.add_argument("--switches-per-edge", type=int, default=100,
                   help="switch attempts per edge per replicate")
    p.add_argument("--dump-null", default=None, help="write null concentrations CSV here")


def _add_filter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p-filter", type=float, default=0.05, help="significance filter (p <)")
    p.add_argument("--freq-filter", type=float, default=0.05,
                   help="frequency filter (concentration fraction >)")
    p.add_argument("--locale-comma", action="store_true",
                   help="render percentages in comma-decimal style")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trademotifs",
        description="Motif significance mining in weighted directed trade networks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = {"config": lambda p: p.add_argument(
        "--config", default=None, help="key=value file of flag defaults")}

    p_run = sub.add_parser("run", help="full pipeline over one or more periods")
    _add_ingest_flags(p_run)
    p_run.add_argument("--years", default=DEFAULT_PERIODS,
                       help="comma-separated year ranges, one per period")
    _add_split_flags(p_run)
    _add_sampler_flags(p_run)
    _add_ensemble_flags(p_run)
    _add_filter_flags(p_run)
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p_run.add_argument("--dump-occurrences", default=None)
    common["config"](p_run)
    p_run.set_defaults(func=_cmd_run)

    p_ing = sub.add_parser("ingest", help="aggregate a raw trade CSV into an edge list")
    _add_ingest_flags(p_ing)
    p_ing.add_argument("--years", required=True, help="year range, e.g. 2004-2006")
    p_ing.add_argument("--output", default="edges.csv")
    common["config"](p_ing)
    p_ing.set_defaults(func=_cmd_ingest)

    p_split = sub.add_parser("split", help="split an edge list at the weight threshold")
    p_split.add_argument("--input", required=True, help="edge-list CSV")
    _add_split_flags(p_split)
    p_split.add_argument("--out", default=".", help="directory for inliers/outliers CSVs")
    common["config"](p_split)
    p_split.set_defaults(func=_cmd_split)

    p_mot = sub.add_parser("motifs", help="per-class subgraph census of an edge list")
    p_mot.add_argument("--input", required=True, help="edge-list CSV")
    _add_sampler_flags(p_mot)
    p_mot.add_argument("--output", default=None, help="write per-class counts CSV here")
    p_mot.add_argument("--dump-occurrences", default=None)
    p_mot.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common["config"](p_mot)
    p_mot.set_defaults(func=_cmd_motifs)

    p_sig = sub.add_parser("significance", help="census plus null-model statistics")
    p_sig.add_argument("--input", required=True, help="edge-list CSV")
    _add_sampler_flags(p_sig)
    _add_ensemble_flags(p_sig)
    p_sig.add_argument("--output", default="stats.csv")
    p_sig.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common["config"](p_sig)
    p_sig.set_defaults(func=_cmd_significance)

    p_rep = sub.add_parser("report", help="filtered tables from stats CSVs")
    p_rep.add_argument("--stats", action="append", required=True,
                       metavar="PERIOD:TYPE:PATH",
                       help="e.g. 2004-2006:inliers:stats_in.csv (repeatable)")
    _add_filter_flags(p_rep)
    p_rep.add_argument("--out", default="out")
    common["config"](p_rep)
    p_rep.set_defaults(func=_cmd_report)

    p_tab = sub.add_parser("motif-table", help="print the isomorphism class table")
    p_tab.add_argument("--k", type=int, default=3, choices=(3, 4))
    p_tab.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p_tab.set_defaults(func=_cmd_motif_table)

    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Read --config key=value defaults; explicit flags still win."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return argv
    injected: list[str] = []
    with open(known.config, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line or line.startswith("["):
                continue
            if "=" not in line:
                raise CsvFormatError(f"config line '{line}' is not key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            value = value.strip("\"'")
            if value.lower() in ("true", "false"):
                if value.lower() == "true":
                    injected.append(flag)
            else:
                injected.extend([flag, value])
    # Config-derived flags go first so explicit argv overrides them.
    return [argv[0]] + injected + argv[1:]


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if argv:
            argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        if getattr(args, "threads", None):
            kernels.set_threads(args.threads)
        return args.func(args)
    except StageError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 2
    except (TradeMotifsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
