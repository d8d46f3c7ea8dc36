"""Disparity between sentence encoders, before and after curation.

Models trained on corpora ranked by different encoders score very
differently; the disparity is the gap to the reference encoder, and the
reduction percentage says how much of that gap a heuristic closed.
Scores here are evaluation points produced elsewhere; this module only
does the bookkeeping.
"""

from pdcurate import ScoreTable, best_per_group, disparity, disparity_reduction
from pdcurate.metrics import disparity_report

# baseline scores for one corpus/language pair: reference encoder vs two others
laser3, xlmr, labse = 30.76, 5.55, 14.49
delta_xlmr = disparity(laser3, xlmr)
delta_labse = disparity(laser3, labse)
print(f"baseline disparity vs XLM-R: {delta_xlmr:.2f} points, vs LaBSE: {delta_labse:.2f}")

# after the combined heuristics, the best runs close most of the gap
print(f"combined heuristics cut the XLM-R gap to 11.92 "
      f"-> reduction {disparity_reduction(delta_xlmr, 11.92):.2f}%")
print(f"a heuristic can flip the gap entirely: baseline 4.82, after 'length' -2.28 "
      f"-> reduction {disparity_reduction(4.82, -2.28):.2f}%")

# the same computation driven from a score table (what `curate report` reads)
rows = {
    ("ccmatrix", "en-si", "laser3", "baseline"): 30.76,
    ("ccmatrix", "en-si", "xlmr", "baseline"): 5.55,
    ("ccmatrix", "en-si", "labse", "baseline"): 14.49,
    ("ccmatrix", "en-si", "laser3", "combined"): 36.10,
    ("ccmatrix", "en-si", "xlmr", "combined"): 24.18,
    ("ccmatrix", "en-si", "labse", "combined"): 33.94,
}
table = ScoreTable(rows)
print("\nbest heuristic per (corpus, pair, model):")
for group, (tag, score) in best_per_group(table).items():
    print(f"  {group}: {tag} at {score}")

print("\nfull report rows (delta and reduction vs baseline):")
for row in disparity_report(table, "laser3"):
    reduction = "NA" if row.reduction_pct is None else f"{row.reduction_pct:.2f}%"
    print(f"  {row.model:<7} {row.heuristic:<10} delta {row.delta:>6.2f}  reduction {reduction}")
