"""The recommended curation pipeline, end to end.

Heuristics run before ranking: dedup (punct+number-stripped, then
5-gram), the 5-word length floor, LID at probability 0.7, and the
alpha-word-ratio filter.  Survivors are ranked by cosine similarity and
the top-k slice is emitted.  The same config serializes to YAML for the
``curate run`` command line.
"""

import tempfile
from pathlib import Path

import numpy as np

from pdcurate import LanguagePair, RankingSpec, recommended_preset, run, write_embeddings
from pdcurate.pipeline import dump_config
from pdcurate.synthnoise import NoiseRecipe, generate
from pdcurate.taxonomy import NoiseLabel

workdir = Path(tempfile.mkdtemp(prefix="pdcurate-demo-"))

# a synthetic 4000-pair web-crawl stand-in with planted noise
recipe = NoiseRecipe(
    seed=7,
    pair_count=4000,
    rates={NoiseLabel.CS: 0.08, NoiseLabel.WL: 0.05, NoiseLabel.NL: 0.05},
    duplicate_rate=0.08,
    language_pair=LanguagePair("en", "si"),
)
labeled = generate(recipe)
pairs = [item.pair for item in labeled]

rng = np.random.default_rng(1)
write_embeddings(rng.normal(size=(4000, 32)).astype(np.float32), workdir / "src.bin")
write_embeddings(rng.normal(size=(4000, 32)).astype(np.float32), workdir / "tgt.bin")

config = recommended_preset(
    LanguagePair("en", "si"),
    n=5,
    ratio_lo=0.6,
    ranking=RankingSpec(str(workdir / "src.bin"), str(workdir / "tgt.bin"), 1000),
)
print("config as YAML (what `curate preset --pair en-si` prints):\n")
print(dump_config(config))

result = run(config, pairs)
print(result.report.to_text())

kept = {p.id for p in result.pairs}
noise_kept = sum(
    1 for item in labeled
    if item.truth in (NoiseLabel.CS, NoiseLabel.WL, NoiseLabel.NL) and item.pair.id in kept
)
print(f"planted CS/WL/NL pairs surviving into the top-k: {noise_kept}")
