"""Measuring filter precision and recall against planted ground truth.

Human noise audits label a sample of pairs; the synthetic generator
produces a corpus where every pair's category is known, so the same
before/after table is computed exactly instead of sampled.
"""

from pdcurate import LanguagePair, recommended_preset
from pdcurate.synthnoise import NoiseRecipe, generate, score_filters
from pdcurate.taxonomy import NoiseLabel, heuristic_coverage

recipe = NoiseRecipe(
    seed=20_240_801,
    pair_count=5000,
    rates={
        NoiseLabel.CS: 0.10,
        NoiseLabel.WL: 0.06,
        NoiseLabel.NL: 0.06,
        NoiseLabel.UN: 0.05,
        NoiseLabel.CCN: 0.05,
        NoiseLabel.X: 0.04,
    },
    duplicate_rate=0.08,
    language_pair=LanguagePair("en", "si"),
)
labeled = generate(recipe)
print(f"generated {len(labeled)} pairs; which heuristic should catch what:")
for label in (NoiseLabel.CS, NoiseLabel.WL, NoiseLabel.NL, NoiseLabel.UN, NoiseLabel.CCN, NoiseLabel.X):
    covered_by = ", ".join(heuristic_coverage(label)) or "(nothing targets it)"
    print(f"  {label.code:<4} -> {covered_by}")

config = recommended_preset(LanguagePair("en", "si"), n=5, ratio_lo=0.6)
score = score_filters(labeled, config)
print()
print(score.to_text())
print("CS/WL/NL and exact duplicates are caught by construction.  X pairs all")
print("survive (nothing in this combination targets wrong-but-fluent pairs) and")
print("some CCN slips through, the residual noise rule-based filtering leaves.")
