"""The ``curate`` command line tool.

One subcommand per capability so that full ablation grids (every
heuristic, side and threshold combination) can be scripted from the
shell:

* ``curate run``     full config-driven pipeline
* ``curate preset``  print the recommended pipeline config as YAML
* ``curate dedup``   one deduplication stage
* ``curate filter``  one stateless filter stage
* ``curate rank``    cosine ranking and top-k extraction
* ``curate stats``   corpus counts and reduction vs a reference
* ``curate synth``   generate a labeled synthetic corpus
* ``curate lid``     export script-detector predictions for caching
* ``curate report``  disparity/reduction tables from a score TSV

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
error.  Every value flag can also be set through an environment
variable: ``--threads`` reads ``CURATE_THREADS``, ``--top-k`` reads
``CURATE_TOP_K`` and so on.  All output files are written atomically
(temp file then rename), so an interrupted run never leaves a partial
file at the target path.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import pipeline as pl
from .corpus import LanguagePair, Side, atomic_write, compute_stats, read_corpus, write_corpus
from .dedup import DedupSpec, DedupStream
from .errors import ConfigError, CurateError, DataError
from .filters import LengthSpec, LidSpec, RatioKind, RatioSpec
from .lid import ScriptPredictor, TablePredictor, export_predictions, load_prediction_table
from .metrics import disparity_report, read_score_table, write_disparity_report
from .ranking import load_embeddings, rank_corpus, top_k, write_ranked_tsv
from .synthnoise import NoiseRecipe, generate, load_recipe, score_filters, write_labeled_tsv
from .taxonomy import NoiseLabel
from .textnorm import NormMode

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

_TICK_EVERY = 100_000


class _EnvArgumentParser(argparse.ArgumentParser):
    """argparse with CURATE_<DEST> environment defaults for every option.

    CURATE_THREADS=2 acts like --threads 2, CURATE_MIN_WORDS=4 like
    --min-words 4, and so on; explicit flags always win.  String
    defaults go through the normal argparse type conversion.
    """

    def add_argument(self, *args, **kwargs):
        action = super().add_argument(*args, **kwargs)
        if not action.option_strings or action.dest is argparse.SUPPRESS:
            return action
        raw = os.environ.get(f"CURATE_{action.dest.upper()}")
        if raw is None:
            return action
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            action.default = raw.strip().lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            action.default = [raw]
        else:
            action.default = raw
        action.required = False
        return action


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--source", help="source-side text file")
    parser.add_argument("--target", help="target-side text file")
    parser.add_argument("--tsv", help="source<TAB>target file instead of two files")


def _open_corpus(args):
    if args.tsv is not None:
        if args.source is not None or args.target is not None:
            raise ConfigError("give either --tsv or --source/--target, not both")
        return read_corpus(tsv_path=args.tsv), True
    if args.source is None or args.target is None:
        raise ConfigError("need --source and --target (or --tsv)")
    return read_corpus(args.source, args.target), False


def _ticker(pairs, label: str):
    count = 0
    for pair in pairs:
        count += 1
        if count % _TICK_EVERY == 0:
            print(f"{label}: {count} pairs", file=sys.stderr)
        yield pair


def _write_result(pairs, out_dir: Path, as_tsv: bool) -> int:
    if as_tsv:
        stats = write_corpus(pairs, tsv_path=out_dir / "corpus.tsv")
    else:
        stats = write_corpus(pairs, out_dir / "source.txt", out_dir / "target.txt")
    return stats.pair_count


def _parse_side(value: str) -> Side:
    try:
        return Side.from_string(value)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_pair(value: str) -> LanguagePair:
    try:
        return LanguagePair.from_string(value)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_cli_predictor(args):
    if getattr(args, "predictions", None):
        return TablePredictor(load_prediction_table(args.predictions))
    src = getattr(args, "src_predictions", None)
    tgt = getattr(args, "tgt_predictions", None)
    if src or tgt:
        return TablePredictor(
            source=load_prediction_table(src) if src else None,
            target=load_prediction_table(tgt) if tgt else None,
        )
    return ScriptPredictor()


def _write_removal_log(log, path) -> None:
    with atomic_write(path) as out:
        for pair_id, stage, reason in log:
            out.write(f"{pair_id}\t{stage}\t{reason}\n")


# ---------------------------------------------------------------- run


def cmd_run(args) -> int:
    config = pl.load_config(args.config)
    pairs, as_tsv = _open_corpus(args)
    out_dir = Path(args.out_dir)
    removal_log = [] if args.removal_log else None
    started = time.perf_counter()
    result = pl.run(config, _ticker(pairs, "read"), threads=args.threads, removal_log=removal_log)
    written = _write_result(result.pairs, out_dir, as_tsv)
    if result.ranked is not None:
        by_id = {pair.id: pair for pair in result.pairs}
        write_ranked_tsv(result.ranked, by_id, out_dir / "scores.tsv")
    report_text = result.report.to_text()
    with atomic_write(out_dir / "report.txt") as out:
        out.write(report_text)
    with atomic_write(out_dir / "report.tsv") as out:
        out.write(result.report.to_tsv())
    if config.report:
        with atomic_write(config.report) as out:
            out.write(report_text)
    if removal_log is not None:
        _write_removal_log(removal_log, out_dir / "removals.tsv")
    print(report_text, end="")
    print(f"wrote {written} pairs to {out_dir} in {time.perf_counter() - started:.1f}s")
    return EXIT_OK


def cmd_preset(args) -> int:
    ranking = None
    if args.src_emb or args.tgt_emb:
        if not (args.src_emb and args.tgt_emb and args.top_k):
            raise ConfigError("ranking needs --src-emb, --tgt-emb and --top-k together")
        ranking = pl.RankingSpec(args.src_emb, args.tgt_emb, args.top_k)
    config = pl.recommended_preset(
        _parse_pair(args.pair),
        n=args.ngram,
        ratio_lo=args.ratio,
        dedup_side=_parse_side(args.dedup_side),
        ranking=ranking,
    )
    sys.stdout.write(pl.dump_config(config))
    return EXIT_OK


# ---------------------------------------------------------------- dedup


def cmd_dedup(args) -> int:
    try:
        norm = NormMode.from_string(args.norm)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    spec = DedupSpec(norm=norm, ngram=args.ngram, side=_parse_side(args.side))
    pairs, as_tsv = _open_corpus(args)
    log = [] if args.log else None
    on_removed = None
    if log is not None:
        on_removed = lambda pair, stage, reason: log.append((pair.id, stage, reason))
    stream = DedupStream(_ticker(pairs, "read"), spec, on_removed=on_removed)
    out_dir = Path(args.out_dir)
    written = _write_result(iter(stream), out_dir, as_tsv)
    if log is not None:
        _write_removal_log(log, args.log)
    print(f"kept {written}, removed {stream.removed_count} ({spec.describe()})")
    return EXIT_OK


# ---------------------------------------------------------------- filter


def _filter_spec_from_args(args, language_pair: LanguagePair | None):
    kind = args.kind.lower()
    side = _parse_side(args.side)
    if kind == "length":
        return LengthSpec(min_words=args.min_words, side=side)
    if kind in ("lid", "lidthresh"):
        if language_pair is None:
            raise ConfigError("LID filters need --pair (expected languages, like en-si)")
        min_prob = args.min_prob
        if kind == "lidthresh" and min_prob is None:
            min_prob = 0.7
        return LidSpec(
            expected_source=language_pair.source_lang,
            expected_target=language_pair.target_lang,
            min_prob=min_prob,
            side=side,
        )
    if kind in ("stratio", "sentwratio", "sentcratio"):
        if args.lo is None:
            raise ConfigError(f"--kind {kind} needs --lo")
        if kind == "stratio" and args.hi is None:
            raise ConfigError("--kind stratio needs both --lo and --hi")
        return RatioSpec(kind=RatioKind(kind), lo=args.lo, hi=args.hi, side=side)
    raise ConfigError(f"unknown filter kind {args.kind!r}")


def cmd_filter(args) -> int:
    language_pair = _parse_pair(args.pair) if args.pair else None
    spec = _filter_spec_from_args(args, language_pair)
    config = pl.PipelineConfig(
        language_pair=language_pair or LanguagePair("en", "si"),
        stages=(spec,),
    )
    pairs, as_tsv = _open_corpus(args)
    removal_log = [] if args.log else None
    predictor = _build_cli_predictor(args) if isinstance(spec, LidSpec) else None
    result = pl.run(
        config,
        _ticker(pairs, "read"),
        threads=args.threads,
        removal_log=removal_log,
        predictor=predictor,
    )
    out_dir = Path(args.out_dir)
    written = _write_result(result.pairs, out_dir, as_tsv)
    if removal_log is not None:
        _write_removal_log(removal_log, args.log)
    removed = result.report.total.pair_count - written
    print(f"kept {written}, removed {removed} ({args.kind}@{args.side})")
    if result.report.lid_failures:
        print(f"lid failures (failed closed): {result.report.lid_failures}")
    return EXIT_OK


# ---------------------------------------------------------------- rank


def cmd_rank(args) -> int:
    pairs, as_tsv = _open_corpus(args)
    src_emb = load_embeddings(args.src_emb)
    tgt_emb = load_embeddings(args.tgt_emb)
    materialized = list(_ticker(pairs, "read"))
    ranked = rank_corpus(materialized, src_emb, tgt_emb)
    if args.top_k is not None:
        if args.top_k > len(ranked):
            print(
                f"warning: --top-k {args.top_k} exceeds corpus size {len(ranked)}; keeping all",
                file=sys.stderr,
            )
        ranked = top_k(ranked, args.top_k)
    by_id = {pair.id: pair for pair in materialized}
    ordered = [by_id[entry.pair_id] for entry in ranked.entries]
    out_dir = Path(args.out_dir)
    written = _write_result(ordered, out_dir, as_tsv)
    write_ranked_tsv(ranked, by_id, out_dir / "scores.tsv")
    print(f"ranked {len(materialized)} pairs, wrote top {written} (dim {src_emb.dim})")
    if ranked.zero_norm_count:
        print(f"zero-norm vectors scored 0: {ranked.zero_norm_count}")
    return EXIT_OK


# ---------------------------------------------------------------- stats


def cmd_stats(args) -> int:
    count = sum(1 for _ in _open_corpus(args)[0])
    if args.ref_source or args.ref_tsv:
        if args.ref_tsv is not None:
            reference = sum(1 for _ in read_corpus(tsv_path=args.ref_tsv))
        else:
            if args.ref_target is None:
                raise ConfigError("need both --ref-source and --ref-target")
            reference = sum(1 for _ in read_corpus(args.ref_source, args.ref_target))
        stats = compute_stats(reference, count)
        print(f"pairs: {count}")
        print(f"reference: {reference}")
        print(f"reduction: {stats.reduction_pct:.2f}%")
    else:
        print(f"pairs: {count}")
    return EXIT_OK


# ---------------------------------------------------------------- synth


def _parse_rates(entries) -> dict[NoiseLabel, float]:
    rates: dict[NoiseLabel, float] = {}
    for entry in entries or []:
        if "=" not in entry:
            raise ConfigError(f"--rate takes LABEL=FRACTION, got {entry!r}")
        code, _, value = entry.partition("=")
        try:
            label = NoiseLabel(code)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        try:
            rates[label] = float(value)
        except ValueError:
            raise ConfigError(f"bad fraction in {entry!r}") from None
    return rates


def cmd_synth(args) -> int:
    if args.recipe is not None:
        if args.pairs is not None or args.rate:
            raise ConfigError("give either --recipe or inline --pairs/--rate flags, not both")
        recipe = load_recipe(args.recipe)
    else:
        if args.pairs is None:
            raise ConfigError("need --pairs N (or a --recipe file)")
        recipe = NoiseRecipe(
            seed=args.seed,
            pair_count=args.pairs,
            rates=_parse_rates(args.rate),
            duplicate_rate=args.duplicates,
            language_pair=_parse_pair(args.pair),
        )
    labeled = generate(recipe)
    write_labeled_tsv(labeled, args.out)
    print(f"wrote {len(labeled)} labeled pairs to {args.out}")
    if args.source_out and args.target_out:
        write_corpus((item.pair for item in labeled), args.source_out, args.target_out)
        print(f"wrote corpus to {args.source_out} / {args.target_out}")
    if args.score_config:
        config = pl.load_config(args.score_config)
        score = score_filters(labeled, config, threads=args.threads)
        print(score.to_text(), end="")
    return EXIT_OK


# ---------------------------------------------------------------- lid


def cmd_lid(args) -> int:
    side = _parse_side(args.side)
    if side is Side.BOTH:
        raise ConfigError("export one side at a time: --side s or --side t")
    pairs, _ = _open_corpus(args)
    count = export_predictions(_ticker(pairs, "read"), side, args.out)
    print(f"wrote {count} predictions to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- report


def cmd_report(args) -> int:
    table = read_score_table(args.scores)
    rows = disparity_report(table, args.reference, baseline_tag=args.baseline_tag)
    if args.out:
        write_disparity_report(rows, args.out)
        print(f"wrote {len(rows)} report rows to {args.out}")
    else:
        print("corpus\tpair\tmodel\theuristic\tdelta\treduction_pct")
        for row in rows:
            reduction = "NA" if row.reduction_pct is None else f"{row.reduction_pct:.2f}"
            print(
                f"{row.corpus}\t{row.pair}\t{row.model}\t{row.heuristic}\t"
                f"{row.delta:.2f}\t{reduction}"
            )
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _EnvArgumentParser(
        prog="curate",
        description="Heuristic filtering and similarity ranking for parallel corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_threads(p):
        p.add_argument(
            "--threads",
            type=int,
            default=str(os.cpu_count() or 1),
            help="worker threads for stateless stages (default: machine parallelism)",
        )

    p_run = sub.add_parser("run", help="run a full pipeline from a config file")
    p_run.add_argument("--config", required=True, help="pipeline config (YAML)")
    _add_corpus_args(p_run)
    p_run.add_argument("--out-dir", required=True)
    p_run.add_argument("--removal-log", action="store_true", help="also write removals.tsv")
    add_threads(p_run)
    p_run.set_defaults(func=cmd_run)

    p_preset = sub.add_parser("preset", help="print the recommended pipeline config")
    p_preset.add_argument("--pair", required=True, help="language pair tag, like en-si")
    p_preset.add_argument("--ngram", type=int, default="5")
    p_preset.add_argument("--ratio", type=float, default="0.6")
    p_preset.add_argument("--dedup-side", default="t", choices=["t", "st"])
    p_preset.add_argument("--src-emb")
    p_preset.add_argument("--tgt-emb")
    p_preset.add_argument("--top-k", type=int)
    p_preset.set_defaults(func=cmd_preset)

    p_dedup = sub.add_parser("dedup", help="apply one deduplication stage")
    _add_corpus_args(p_dedup)
    p_dedup.add_argument("--norm", default="identity", choices=["identity", "nums", "punctnums"])
    p_dedup.add_argument("--ngram", type=int, default=None, help="n-gram overlap order (omit for full-sentence)")
    p_dedup.add_argument("--side", default="st", help="s, t or st")
    p_dedup.add_argument("--out-dir", required=True)
    p_dedup.add_argument("--log", help="write removal log TSV here")
    p_dedup.set_defaults(func=cmd_dedup)

    p_filter = sub.add_parser("filter", help="apply one stateless filter")
    _add_corpus_args(p_filter)
    p_filter.add_argument(
        "--kind",
        required=True,
        choices=["length", "lid", "lidthresh", "stratio", "sentwratio", "sentcratio"],
    )
    p_filter.add_argument("--side", default="st", help="s, t or st")
    p_filter.add_argument("--min-words", type=int, default="5")
    p_filter.add_argument("--min-prob", type=float, default=None)
    p_filter.add_argument("--lo", type=float, default=None)
    p_filter.add_argument("--hi", type=float, default=None)
    p_filter.add_argument("--pair", help="expected languages for LID, like en-si")
    p_filter.add_argument("--predictions", help="id/label/prob TSV used for any checked side")
    p_filter.add_argument("--src-predictions", help="prediction TSV for the source side")
    p_filter.add_argument("--tgt-predictions", help="prediction TSV for the target side")
    p_filter.add_argument("--out-dir", required=True)
    p_filter.add_argument("--log", help="write removal log TSV here")
    add_threads(p_filter)
    p_filter.set_defaults(func=cmd_filter)

    p_rank = sub.add_parser("rank", help="rank by cosine similarity and slice top-k")
    _add_corpus_args(p_rank)
    p_rank.add_argument("--src-emb", required=True)
    p_rank.add_argument("--tgt-emb", required=True)
    p_rank.add_argument("--top-k", type=int, default=None)
    p_rank.add_argument("--out-dir", required=True)
    p_rank.set_defaults(func=cmd_rank)

    p_stats = sub.add_parser("stats", help="pair counts and reduction vs a reference corpus")
    _add_corpus_args(p_stats)
    p_stats.add_argument("--ref-source")
    p_stats.add_argument("--ref-target")
    p_stats.add_argument("--ref-tsv")
    p_stats.set_defaults(func=cmd_stats)

    p_synth = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    p_synth.add_argument("--recipe", help="YAML recipe file instead of inline flags")
    p_synth.add_argument("--pairs", type=int, help="total pair count")
    p_synth.add_argument("--seed", type=int, default="0")
    p_synth.add_argument("--pair", default="en-si")
    p_synth.add_argument(
        "--rate",
        action="append",
        metavar="LABEL=FRACTION",
        help="injection rate, repeatable (e.g. --rate CS=0.1)",
    )
    p_synth.add_argument("--duplicates", type=float, default="0")
    p_synth.add_argument("--out", required=True, help="labeled TSV output path")
    p_synth.add_argument("--source-out", help="also write the bare corpus: source side")
    p_synth.add_argument("--target-out", help="also write the bare corpus: target side")
    p_synth.add_argument("--score-config", help="score these stages against the planted truth")
    add_threads(p_synth)
    p_synth.set_defaults(func=cmd_synth)

    p_lid = sub.add_parser("lid", help="export script-detector predictions for caching")
    _add_corpus_args(p_lid)
    p_lid.add_argument("--side", required=True, help="s or t")
    p_lid.add_argument("--out", required=True)
    p_lid.set_defaults(func=cmd_lid)

    p_report = sub.add_parser("report", help="disparity tables from a score TSV")
    p_report.add_argument("--scores", required=True)
    p_report.add_argument("--reference", required=True, help="reference model tag")
    p_report.add_argument("--baseline-tag", default="baseline")
    p_report.add_argument("--out")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CurateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except BrokenPipeError:
        return EXIT_OK
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - safety net
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
