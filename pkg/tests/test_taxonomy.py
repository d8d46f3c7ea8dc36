import itertools
import random

import pytest

from pdcurate.errors import DataError
from pdcurate.taxonomy import (
    CORRECT_LABELS,
    ERROR_LABELS,
    Annotation,
    AnnotationSet,
    NoiseLabel,
    fleiss_kappa,
    heuristic_coverage,
    label_distribution,
    read_annotations,
    write_annotations,
)


def annset(rows):
    """rows: list of (pair_id, annotator, label_code)."""
    return AnnotationSet(
        tuple(Annotation(pid, ann, NoiseLabel(code)) for pid, ann, code in rows)
    )


def from_matrix(matrix, categories):
    """Fleiss-style count matrix -> one annotation per (pair, rater)."""
    rows = []
    for pair_id, counts in enumerate(matrix):
        rater = 0
        for category, count in zip(categories, counts):
            for _ in range(count):
                rows.append((pair_id, f"r{rater}", category))
                rater += 1
    return annset(rows)


# ------------------------------------------------------------- coverage


def test_heuristic_coverage_snapshot():
    expected = {
        NoiseLabel.NL: ("lid", "sentwratio", "sentcratio"),
        NoiseLabel.WL: ("lid",),
        NoiseLabel.UN: ("lid",),
        NoiseLabel.CS: ("length",),
        NoiseLabel.CCN: ("lid", "sentwratio", "sentcratio"),
        NoiseLabel.X: ("stratio",),
        NoiseLabel.CB: ("stratio",),
        NoiseLabel.CC: (),
        NoiseLabel.CN: (),
    }
    for label in NoiseLabel:
        assert heuristic_coverage(label) == expected[label]


def test_labels_partition_into_correct_and_error():
    assert set(CORRECT_LABELS) | set(ERROR_LABELS) == set(NoiseLabel)
    assert not set(CORRECT_LABELS) & set(ERROR_LABELS)
    assert NoiseLabel.CC.is_correct and not NoiseLabel.NL.is_correct


def test_label_parsing_case_insensitive():
    assert NoiseLabel("ccn") is NoiseLabel.CCN
    with pytest.raises(ValueError):
        NoiseLabel("ZZ")


# ------------------------------------------------------- distribution


def test_distribution_unanimous_cc():
    rows = [(p, f"a{r}", "CC") for p in range(5) for r in range(3)]
    dist = label_distribution(annset(rows))
    assert dist.per_label[NoiseLabel.CC] == 100.0
    assert dist.correct_pct == 100.0
    assert dist.error_pct == 0.0


def test_distribution_hand_tally():
    # 10 pairs, 3 annotators: 4 clear CC, 3 clear UN, 2 majority CS, 1 tie CC/UN
    rows = []
    for p in range(4):
        rows += [(p, "a", "CC"), (p, "b", "CC"), (p, "c", "CC")]
    for p in range(4, 7):
        rows += [(p, "a", "UN"), (p, "b", "UN"), (p, "c", "CN")]
    for p in range(7, 9):
        rows += [(p, "a", "CS"), (p, "b", "CS"), (p, "c", "CC")]
    rows += [(9, "a", "CC"), (9, "b", "UN"), (9, "c", "X")]  # 3-way tie
    dist = label_distribution(annset(rows))
    assert dist.per_label[NoiseLabel.CC] == pytest.approx(40.0)
    assert dist.per_label[NoiseLabel.UN] == pytest.approx(40.0)  # tie resolves to UN
    assert dist.per_label[NoiseLabel.CS] == pytest.approx(20.0)
    assert dist.correct_pct == pytest.approx(40.0)
    assert dist.error_pct == pytest.approx(60.0)


def test_distribution_sums_to_100():
    rng = random.Random(5)
    codes = [label.code for label in NoiseLabel]
    rows = [
        (p, f"a{r}", rng.choice(codes)) for p in range(40) for r in range(3)
    ]
    for method in ("majority", "mean"):
        dist = label_distribution(annset(rows), method=method)
        assert sum(dist.per_label.values()) == pytest.approx(100.0, abs=0.01)
        assert dist.correct_pct + dist.error_pct == pytest.approx(100.0, abs=0.01)


def test_distribution_mean_method_weights_votes():
    rows = [(0, "a", "CC"), (0, "b", "CC"), (0, "c", "UN")]
    majority = label_distribution(annset(rows + [(1, "a", "CC"), (1, "b", "CC"), (1, "c", "CC")]))
    mean = label_distribution(
        annset(rows + [(1, "a", "CC"), (1, "b", "CC"), (1, "c", "CC")]), method="mean"
    )
    assert majority.per_label[NoiseLabel.UN] == 0.0
    assert mean.per_label[NoiseLabel.UN] == pytest.approx(100 / 6)


# ------------------------------------------------------------- kappa


def test_kappa_perfect_agreement_two_categories():
    rows = []
    for p in range(4):
        code = "CC" if p % 2 == 0 else "UN"
        rows += [(p, "a", code), (p, "b", code), (p, "c", code)]
    assert fleiss_kappa(annset(rows)) == pytest.approx(1.0)


def test_kappa_agreement_at_chance_level():
    # 4 pairs, 2 annotators, every pair split CC/UN: observed agreement 0,
    # expected agreement 0.5 -> kappa (0 - 0.5)/(1 - 0.5) = -1
    rows = []
    for p in range(4):
        rows += [(p, "a", "CC"), (p, "b", "UN")]
    assert fleiss_kappa(annset(rows)) == pytest.approx((0 - 0.5) / (1 - 0.5))


def test_kappa_standard_worked_example():
    # the classic 10-subject, 14-rater, 5-category matrix; kappa = 4211/20059
    matrix = [
        [0, 0, 0, 0, 14],
        [0, 2, 6, 4, 2],
        [0, 0, 3, 5, 6],
        [0, 3, 9, 2, 0],
        [2, 2, 8, 1, 1],
        [7, 7, 0, 0, 0],
        [3, 2, 6, 3, 0],
        [2, 5, 3, 2, 2],
        [6, 5, 2, 1, 0],
        [0, 2, 2, 3, 7],
    ]
    annotations = from_matrix(matrix, ["CC", "CN", "CB", "CS", "UN"])
    assert fleiss_kappa(annotations) == pytest.approx(4211 / 20059, abs=1e-6)
    assert fleiss_kappa(annotations) == pytest.approx(0.2099307, abs=1e-6)


def test_kappa_invariant_under_label_permutation():
    matrix = [
        [2, 1, 0],
        [0, 3, 0],
        [1, 1, 1],
        [0, 0, 3],
        [2, 0, 1],
    ]
    base_labels = ["CC", "UN", "WL"]
    reference = fleiss_kappa(from_matrix(matrix, base_labels))
    for perm in itertools.permutations(base_labels):
        assert fleiss_kappa(from_matrix(matrix, list(perm))) == pytest.approx(reference)


def test_kappa_bounds_on_random_sets():
    rng = random.Random(13)
    codes = [label.code for label in NoiseLabel]
    for _ in range(50):
        rows = [
            (p, f"a{r}", rng.choice(codes))
            for p in range(rng.randint(2, 20))
            for r in range(3)
        ]
        kappa = fleiss_kappa(annset(rows))
        assert -1.0 <= kappa <= 1.0


def test_kappa_rejects_ragged_annotator_counts():
    rows = [(0, "a", "CC"), (0, "b", "CC"), (1, "a", "CC")]
    with pytest.raises(ValueError, match="ragged"):
        fleiss_kappa(annset(rows))


def test_kappa_needs_two_pairs_and_two_raters():
    with pytest.raises(ValueError):
        fleiss_kappa(annset([(0, "a", "CC"), (0, "b", "CC")]))
    with pytest.raises(ValueError):
        fleiss_kappa(annset([(0, "a", "CC"), (1, "a", "CC")]))


def test_duplicate_annotation_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        annset([(0, "a", "CC"), (0, "a", "UN")])


# ------------------------------------------------------------- files


def test_annotation_file_round_trip(tmp_path):
    rows = [(0, "ann1", "CC"), (0, "ann2", "ccn"), (1, "ann1", "nl"), (1, "ann2", "WL")]
    original = annset(rows)
    write_annotations(original, tmp_path / "ann.tsv")
    reloaded = read_annotations(tmp_path / "ann.tsv")
    assert reloaded == original
    text = (tmp_path / "ann.tsv").read_text()
    assert "CCN" in text and "ccn" not in text  # uppercase on write


def test_annotation_file_bad_line(tmp_path):
    (tmp_path / "ann.tsv").write_text("0\ta\tCC\nnot-enough-fields\n")
    with pytest.raises(DataError, match="line 2"):
        read_annotations(tmp_path / "ann.tsv")
