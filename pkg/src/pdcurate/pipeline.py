"""Config-driven curation runs: dedup stages, filters, ranking, top-k.

A pipeline applies its heuristic stages in order to the input stream,
then ranks the survivors by embedding cosine similarity and emits the
top-k slice.  Heuristics run before ranking on purpose: filtering first
is what keeps degenerate pairs out of the top of the ranked list.

Config files are YAML with top-level keys ``language_pair``, ``stages``
(a list of ``{kind, side, params}``), optional ``ranking``
(``{source_embeddings, target_embeddings, top_k}``), optional
``lid_predictions`` (``{path}`` or ``{source, target}``) and optional
``report`` (output path).  Validation is fail-fast: a bad stage aborts
the run before any pair is processed.

The recommended preset chains full punctuation+number-stripped dedup,
n-gram dedup, the 5-word length floor, LID with a 0.7 probability
threshold and the alpha-word-ratio filter.  Published side assignments
are bound positionally: the dedup base runs on the target side, length
and LID on both sides, and the ratio filter on the source side for the
0.6 variant or both sides for the stricter 0.8 variant.  n defaults to
5; 5 or 6 work best in most settings, with 4 usually too aggressive.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import yaml

from .corpus import CorpusStats, LanguagePair, SentencePair, Side, compute_stats
from .dedup import DedupSpec, DedupStream
from .errors import ConfigError, DataError
from .filters import (
    LengthSpec,
    LidSpec,
    RatioKind,
    RatioSpec,
    length_pass,
    lid_pass,
    ratio_pass,
)
from .lid import SCRIPT_LANGS, LidPredictor, ScriptPredictor, TablePredictor, load_prediction_table
from .ranking import RankedCorpus, load_embeddings, rank_corpus, top_k
from .textnorm import NormMode

StageSpec = DedupSpec | LengthSpec | LidSpec | RatioSpec

PRESET_NGRAM_RANGE = (4, 7)


@dataclass(frozen=True, slots=True)
class RankingSpec:
    source_embeddings: str
    target_embeddings: str
    top_k: int

    def __post_init__(self):
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")


@dataclass(frozen=True, slots=True)
class LidPredictionFiles:
    """Where LID stage predictions come from; absent means script detector."""

    path: str | None = None
    source: str | None = None
    target: str | None = None

    def __post_init__(self):
        if self.path is not None and (self.source is not None or self.target is not None):
            raise ConfigError("lid_predictions: give one shared path or per-side paths, not both")
        if self.path is None and self.source is None and self.target is None:
            raise ConfigError("lid_predictions: no file given")


@dataclass(frozen=True)
class PipelineConfig:
    language_pair: LanguagePair
    stages: tuple[StageSpec, ...] = ()
    ranking: RankingSpec | None = None
    lid_predictions: LidPredictionFiles | None = None
    report: str | None = None


def stage_kind(stage: StageSpec) -> str:
    if isinstance(stage, DedupSpec):
        return "dedup"
    if isinstance(stage, LengthSpec):
        return "length"
    if isinstance(stage, LidSpec):
        return "lid"
    if isinstance(stage, RatioSpec):
        return stage.kind.value
    raise ConfigError(f"unknown stage type: {type(stage).__name__}")


def stage_name(index: int, stage: StageSpec) -> str:
    if isinstance(stage, DedupSpec):
        return f"{index}:{stage.describe()}"
    return f"{index}:{stage_kind(stage)}@{stage.side.value}"


def _stage_to_dict(stage: StageSpec) -> dict:
    kind = stage_kind(stage)
    if isinstance(stage, DedupSpec):
        params = {"norm": stage.norm.value, "ngram": stage.ngram}
    elif isinstance(stage, LengthSpec):
        params = {"min_words": stage.min_words}
    elif isinstance(stage, LidSpec):
        params = {
            "expected_source": stage.expected_source,
            "expected_target": stage.expected_target,
            "min_prob": stage.min_prob,
        }
    else:
        params = {"lo": stage.lo, "hi": stage.hi}
    return {"kind": kind, "side": stage.side.value, "params": params}


def _stage_from_dict(entry: dict, language_pair: LanguagePair) -> StageSpec:
    if not isinstance(entry, dict) or "kind" not in entry:
        raise ConfigError(f"each stage needs a 'kind' key, got {entry!r}")
    kind = str(entry["kind"]).lower()
    try:
        side = Side.from_string(entry.get("side", "st"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    params = entry.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigError(f"stage params must be a mapping, got {params!r}")
    try:
        if kind == "dedup":
            norm = NormMode.from_string(params.get("norm", "identity"))
            ngram = params.get("ngram")
            return DedupSpec(norm=norm, ngram=None if ngram is None else int(ngram), side=side)
        if kind == "length":
            return LengthSpec(min_words=int(params.get("min_words", 5)), side=side)
        if kind in ("lid", "lidthresh"):
            min_prob = params.get("min_prob")
            if kind == "lidthresh" and min_prob is None:
                min_prob = 0.7
            return LidSpec(
                expected_source=params.get("expected_source", language_pair.source_lang),
                expected_target=params.get("expected_target", language_pair.target_lang),
                min_prob=None if min_prob is None else float(min_prob),
                side=side,
            )
        if kind in ("stratio", "sentwratio", "sentcratio"):
            hi = params.get("hi")
            return RatioSpec(
                kind=RatioKind(kind),
                lo=float(params["lo"]),
                hi=None if hi is None else float(hi),
                side=side,
            )
    except KeyError as exc:
        raise ConfigError(f"stage {kind!r} is missing required param {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"stage {kind!r}: {exc}") from exc
    raise ConfigError(f"unknown stage kind {kind!r}")


def config_to_dict(config: PipelineConfig) -> dict:
    data: dict = {
        "language_pair": str(config.language_pair),
        "stages": [_stage_to_dict(stage) for stage in config.stages],
    }
    if config.ranking is not None:
        data["ranking"] = {
            "source_embeddings": config.ranking.source_embeddings,
            "target_embeddings": config.ranking.target_embeddings,
            "top_k": config.ranking.top_k,
        }
    if config.lid_predictions is not None:
        lp = config.lid_predictions
        data["lid_predictions"] = {
            key: value
            for key, value in (("path", lp.path), ("source", lp.source), ("target", lp.target))
            if value is not None
        }
    if config.report is not None:
        data["report"] = config.report
    return data


def config_from_dict(data: dict) -> PipelineConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(data) - {"language_pair", "stages", "ranking", "lid_predictions", "report"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        language_pair = LanguagePair.from_string(str(data["language_pair"]))
    except KeyError:
        raise ConfigError("config needs a language_pair (like 'en-si')") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raw_stages = data.get("stages") or []
    if not isinstance(raw_stages, list):
        raise ConfigError("stages must be a list")
    stages = tuple(_stage_from_dict(entry, language_pair) for entry in raw_stages)
    ranking = None
    if data.get("ranking") is not None:
        r = data["ranking"]
        if not isinstance(r, dict):
            raise ConfigError("ranking must be a mapping")
        try:
            ranking = RankingSpec(
                source_embeddings=str(r["source_embeddings"]),
                target_embeddings=str(r["target_embeddings"]),
                top_k=int(r["top_k"]),
            )
        except KeyError as exc:
            raise ConfigError(f"ranking is missing {exc}") from exc
    lid_predictions = None
    if data.get("lid_predictions") is not None:
        lp = data["lid_predictions"]
        if not isinstance(lp, dict):
            raise ConfigError("lid_predictions must be a mapping")
        lid_predictions = LidPredictionFiles(
            path=lp.get("path"), source=lp.get("source"), target=lp.get("target")
        )
    return PipelineConfig(
        language_pair=language_pair,
        stages=stages,
        ranking=ranking,
        lid_predictions=lid_predictions,
        report=data.get("report"),
    )


def dump_config(config: PipelineConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False)


def parse_config(text: str) -> PipelineConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    return config_from_dict(data)


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"))


@dataclass(frozen=True, slots=True)
class StageReport:
    name: str
    stats: CorpusStats
    wall_time_s: float


@dataclass(frozen=True, slots=True)
class RankingReport:
    requested_k: int
    emitted: int
    dim: int
    zero_norm_count: int


@dataclass
class RunReport:
    stages: list[StageReport] = field(default_factory=list)
    total: CorpusStats = field(default_factory=lambda: compute_stats(0, 0))
    ranking: RankingReport | None = None
    lid_failures: int = 0
    warnings: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        lines = ["stage                                    in          out    removed  reduction"]
        for stage in self.stages:
            stats = stage.stats
            removed = stats.pair_count - stats.retained_count
            lines.append(
                f"{stage.name:<38} {stats.pair_count:>9}  {stats.retained_count:>9}  "
                f"{removed:>9}  {stats.reduction_pct:>7.2f}%  ({stage.wall_time_s:.2f}s)"
            )
        lines.append(
            f"{'total':<38} {self.total.pair_count:>9}  {self.total.retained_count:>9}  "
            f"{self.total.pair_count - self.total.retained_count:>9}  {self.total.reduction_pct:>7.2f}%"
        )
        if self.ranking is not None:
            lines.append(
                f"ranking: top {self.ranking.requested_k} of ranked corpus -> "
                f"{self.ranking.emitted} pairs (dim {self.ranking.dim}, "
                f"{self.ranking.zero_norm_count} zero-norm vectors)"
            )
        lines.append(f"lid failures (failed closed): {self.lid_failures}")
        for warning in self.warnings:
            lines.append(f"warning: {warning}")
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        rows = ["section\tname\tin\tout\tremoved\treduction_pct\twall_time_s"]
        for stage in self.stages:
            stats = stage.stats
            rows.append(
                f"stage\t{stage.name}\t{stats.pair_count}\t{stats.retained_count}\t"
                f"{stats.pair_count - stats.retained_count}\t{stats.reduction_pct:.2f}\t"
                f"{stage.wall_time_s:.3f}"
            )
        rows.append(
            f"total\t-\t{self.total.pair_count}\t{self.total.retained_count}\t"
            f"{self.total.pair_count - self.total.retained_count}\t{self.total.reduction_pct:.2f}\t-"
        )
        if self.ranking is not None:
            rows.append(
                f"ranking\ttop_k\t{self.ranking.requested_k}\t{self.ranking.emitted}\t-\t-\t-"
            )
            rows.append(f"ranking\tdim\t{self.ranking.dim}\t-\t-\t-\t-")
            rows.append(f"ranking\tzero_norm\t{self.ranking.zero_norm_count}\t-\t-\t-\t-")
        rows.append(f"lid\tfailures\t{self.lid_failures}\t-\t-\t-\t-")
        for warning in self.warnings:
            rows.append(f"warning\t{warning}\t-\t-\t-\t-\t-")
        return "\n".join(rows) + "\n"


@dataclass
class RunResult:
    """Curated pairs (rank order when ranking ran, id order otherwise)."""

    pairs: list[SentencePair]
    report: RunReport
    ranked: RankedCorpus | None = None


RemovalLog = list[tuple[int, str, str]]


def _build_predictor(config: PipelineConfig) -> LidPredictor:
    files = config.lid_predictions
    if files is None:
        return ScriptPredictor()
    if files.path is not None:
        return TablePredictor(load_prediction_table(files.path))
    return TablePredictor(
        source=load_prediction_table(files.source) if files.source else None,
        target=load_prediction_table(files.target) if files.target else None,
    )


def _chunked_map(
    predicate: Callable[[SentencePair], object],
    pairs: Sequence[SentencePair],
    threads: int,
) -> Iterable[object]:
    """Evaluate a pure predicate over all pairs, id order preserved.

    With threads > 1 the corpus is split into contiguous chunks and each
    chunk is evaluated as one task; results are concatenated in chunk
    order, so output is identical to the serial path by construction.
    Chunk tasks keep task-dispatch overhead negligible; speedup appears
    only for predicates that release the GIL (pure-Python predicates are
    bound by it either way).
    """
    if threads <= 1 or len(pairs) < 50_000:
        return [predicate(pair) for pair in pairs]
    chunk_count = threads * 4
    size = (len(pairs) + chunk_count - 1) // chunk_count
    chunks = [pairs[i : i + size] for i in range(0, len(pairs), size)]

    def evaluate(chunk: Sequence[SentencePair]) -> list[object]:
        return [predicate(pair) for pair in chunk]

    verdicts: list[object] = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(evaluate, chunks):
            verdicts.extend(part)
    return verdicts


def validate_config(config: PipelineConfig) -> None:
    """Fail fast before any pair is processed."""
    for stage in config.stages:
        if not isinstance(stage, (DedupSpec, LengthSpec, LidSpec, RatioSpec)):
            raise ConfigError(f"unsupported stage object: {stage!r}")
    if config.ranking is not None:
        for path in (config.ranking.source_embeddings, config.ranking.target_embeddings):
            if not Path(path).is_file():
                raise DataError(f"embedding file not found: {path}")
    if config.lid_predictions is not None:
        for path in (
            config.lid_predictions.path,
            config.lid_predictions.source,
            config.lid_predictions.target,
        ):
            if path is not None and not Path(path).is_file():
                raise DataError(f"prediction file not found: {path}")


def run(
    config: PipelineConfig,
    pairs: Iterable[SentencePair],
    *,
    threads: int = 1,
    removal_log: RemovalLog | None = None,
    predictor: LidPredictor | None = None,
) -> RunResult:
    """Run stages in order, then rank survivors and slice top-k.

    Pair ids always index the original corpus, so embedding stores built
    for the unfiltered corpus keep working after filtering.  Identical
    input and config give byte-identical output regardless of threads.
    """
    validate_config(config)
    report = RunReport()
    lid_stages = [s for s in config.stages if isinstance(s, LidSpec)]
    if predictor is None and lid_stages:
        predictor = _build_predictor(config)
    if isinstance(predictor, ScriptPredictor):
        # the built-in script detector only ever emits en/si/ta
        expected = {s.expected_source for s in lid_stages} | {s.expected_target for s in lid_stages}
        unsupported = expected - SCRIPT_LANGS
        if unsupported:
            raise ConfigError(
                f"script LID cannot predict {sorted(unsupported)}; "
                "load prediction files for these languages"
            )

    current = list(pairs)
    input_count = len(current)

    for index, stage in enumerate(config.stages):
        name = stage_name(index, stage)
        started = time.perf_counter()
        before = len(current)
        if isinstance(stage, DedupSpec):
            on_removed = None
            if removal_log is not None:
                on_removed = lambda pair, st, reason: removal_log.append((pair.id, name, reason))
            stream = DedupStream(current, stage, on_removed=on_removed, stage_name=name)
            current = list(stream)
        else:
            current = _apply_stateless(stage, current, name, threads, report, removal_log, predictor)
        report.stages.append(
            StageReport(
                name=name,
                stats=compute_stats(before, len(current)),
                wall_time_s=time.perf_counter() - started,
            )
        )

    report.total = compute_stats(input_count, len(current))

    ranked = None
    if config.ranking is not None:
        src_emb = load_embeddings(config.ranking.source_embeddings)
        tgt_emb = load_embeddings(config.ranking.target_embeddings)
        full_ranking = rank_corpus(current, src_emb, tgt_emb)
        if config.ranking.top_k > len(full_ranking):
            report.warnings.append(
                f"top_k {config.ranking.top_k} exceeds ranked corpus size {len(full_ranking)}; "
                "emitting everything"
            )
        ranked = top_k(full_ranking, config.ranking.top_k)
        by_id = {pair.id: pair for pair in current}
        current = [by_id[entry.pair_id] for entry in ranked.entries]
        report.ranking = RankingReport(
            requested_k=config.ranking.top_k,
            emitted=len(ranked),
            dim=src_emb.dim,
            zero_norm_count=ranked.zero_norm_count,
        )

    return RunResult(pairs=current, report=report, ranked=ranked)


def _apply_stateless(
    stage: StageSpec,
    current: list[SentencePair],
    name: str,
    threads: int,
    report: RunReport,
    removal_log: RemovalLog | None,
    predictor: LidPredictor | None,
) -> list[SentencePair]:
    kind = stage_kind(stage)
    if isinstance(stage, LengthSpec):
        predicate = lambda pair: length_pass(pair, stage)
    elif isinstance(stage, RatioSpec):
        predicate = lambda pair: ratio_pass(pair, stage)
    elif isinstance(stage, LidSpec):
        if predictor is None:
            raise ConfigError("pipeline has a LID stage but no predictor")
        lid_predictor = predictor

        def predicate(pair: SentencePair) -> bool:
            failures: list[int] = []
            verdict = lid_pass(
                pair, stage, lid_predictor, on_error=lambda *_: failures.append(1)
            )
            return verdict if not failures else None  # None marks a predictor failure
    else:
        raise ConfigError(f"unsupported stateless stage: {stage!r}")

    verdicts = _chunked_map(predicate, current, threads)
    kept: list[SentencePair] = []
    for pair, verdict in zip(current, verdicts):
        if verdict is None:
            report.lid_failures += 1
            verdict = False
        if verdict:
            kept.append(pair)
        elif removal_log is not None:
            removal_log.append((pair.id, name, kind))
    return kept


def recommended_preset(
    language_pair: LanguagePair,
    n: int = 5,
    ratio_lo: float = 0.6,
    *,
    dedup_side: Side = Side.TARGET,
    ranking: RankingSpec | None = None,
) -> PipelineConfig:
    """The recommended heuristic combination as a ready pipeline config.

    Five stages: full punctuation+number-stripped dedup, n-gram dedup on
    the target side, the 5-word length floor on both sides, LID with the
    0.7 probability threshold on both sides, and the alpha-word-ratio
    floor (source side for ratio_lo < 0.8, both sides otherwise).
    dedup_side accepts TARGET (default) or BOTH, the two best-performing
    assignments.
    """
    if not PRESET_NGRAM_RANGE[0] <= n <= PRESET_NGRAM_RANGE[1]:
        raise ConfigError(
            f"preset n-gram order must lie in "
            f"{PRESET_NGRAM_RANGE[0]}..{PRESET_NGRAM_RANGE[1]}, got {n}"
        )
    if not 0.0 < ratio_lo <= 1.0:
        raise ConfigError(f"ratio_lo must lie in (0, 1], got {ratio_lo}")
    ratio_side = Side.BOTH if ratio_lo >= 0.8 else Side.SOURCE
    stages: tuple[StageSpec, ...] = (
        DedupSpec(norm=NormMode.STRIP_PUNCT_NUMS, ngram=None, side=dedup_side),
        DedupSpec(norm=NormMode.IDENTITY, ngram=n, side=Side.TARGET),
        LengthSpec(min_words=5, side=Side.BOTH),
        LidSpec(
            expected_source=language_pair.source_lang,
            expected_target=language_pair.target_lang,
            min_prob=0.7,
            side=Side.BOTH,
        ),
        RatioSpec(kind=RatioKind.SENT_W_RATIO, lo=ratio_lo, hi=None, side=ratio_side),
    )
    return PipelineConfig(language_pair=language_pair, stages=stages, ranking=ranking)
