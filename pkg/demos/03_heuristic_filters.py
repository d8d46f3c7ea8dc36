"""Per-pair filters: length, language ID and ratio heuristics.

Each filter inspects one side (s), the other (t) or both (st) and
either keeps or removes a pair in isolation.  The published threshold
choices ship as defaults: 5 words minimum, LID probability 0.7,
alpha-word ratio 0.6, and per-language-pair length-ratio windows.
"""

from pdcurate import (
    LengthSpec,
    LidSpec,
    RatioKind,
    RatioSpec,
    ScriptPredictor,
    SentencePair,
    Side,
    length_pass,
    lid_pass,
    ratio_pass,
    stratio_bounds_from_reference,
)
from pdcurate.filters import STRATIO_BOUNDS

candidates = [
    SentencePair(0, "a full sentence with enough words", "මෙය වචන ගොඩක් තියෙන වාක්‍යයක්"),
    SentencePair(1, "too short", "කෙටියි"),
    SentencePair(2, "this english text sits on the sinhala side", "and this one too sadly"),
    SentencePair(3, "numbers 077 4411 223 dominate 99 here", "අංක 077 4411 223 99 11 22 33"),
]

predictor = ScriptPredictor()
length = LengthSpec(min_words=5, side=Side.BOTH)
lid = LidSpec(expected_source="en", expected_target="si", min_prob=0.7, side=Side.BOTH)
wratio = RatioSpec(kind=RatioKind.SENT_W_RATIO, lo=0.6, side=Side.BOTH)

print(f"{'pair':<6}{'length>=5':<12}{'LID(en,si)':<12}{'wordratio>=0.6'}")
for pair in candidates:
    print(
        f"#{pair.id:<5}"
        f"{str(length_pass(pair, length)):<12}"
        f"{str(lid_pass(pair, lid, predictor)):<12}"
        f"{ratio_pass(pair, wratio)}"
    )

print("\npublished source/target length-ratio windows:")
for (src, tgt), (lo, hi) in STRATIO_BOUNDS.items():
    print(f"  {src}-{tgt}: [{lo}, {hi}]")

# deriving a window for a new language pair from a trusted reference set
src_lengths = [12, 9, 15, 11, 8, 14, 10, 13]
tgt_lengths = [10, 9, 13, 10, 9, 12, 11, 11]
lo, hi = stratio_bounds_from_reference(src_lengths, tgt_lengths)
print(f"\nwindow derived from a small reference set: [{lo:.3f}, {hi:.3f}]")
