"""Noise-category annotations: distributions and inter-annotator agreement.

Quality audits have several annotators label each sampled pair with one
of nine categories (three correct: CC, CN, CB; six error classes).
The distribution summarises corpus quality; Fleiss' kappa says how much
the annotators actually agree.
"""

import random

from pdcurate import AnnotationSet, fleiss_kappa, label_distribution
from pdcurate.taxonomy import Annotation, NoiseLabel

rng = random.Random(3)

# simulate a 100-pair audit by three annotators: mostly-agreeing labels
true_labels = rng.choices(
    [NoiseLabel.CC, NoiseLabel.CN, NoiseLabel.CS, NoiseLabel.UN, NoiseLabel.CCN],
    weights=[40, 15, 25, 15, 5],
    k=100,
)
items = []
for pair_id, truth in enumerate(true_labels):
    for annotator in ("a1", "a2", "a3"):
        if rng.random() < 0.85:
            label = truth
        else:
            label = rng.choice(list(NoiseLabel))
        items.append(Annotation(pair_id, annotator, label))
annotations = AnnotationSet(tuple(items))

dist = label_distribution(annotations)  # majority vote per pair
print("label distribution (majority aggregation):")
for label, pct in dist.per_label.items():
    if pct:
        print(f"  {label.code:<4} {pct:5.1f}%")
print(f"correct (CC+CN+CB): {dist.correct_pct:.1f}%   error: {dist.error_pct:.1f}%")

kappa = fleiss_kappa(annotations)
print(f"\nFleiss' kappa over the three annotators: {kappa:.3f}")
print("(1.0 = perfect agreement, 0 = chance level; published audits of this")
print("kind report values like 0.833 / 0.651 / 0.649 per language pair)")
