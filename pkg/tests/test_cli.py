import signal
import subprocess
import sys
import time

import numpy as np
import pytest

from pdcurate.cli import main
from pdcurate.corpus import SentencePair, read_corpus, write_corpus
from pdcurate.ranking import cosine, write_embeddings


@pytest.fixture()
def corpus(tmp_path):
    pairs = [
        SentencePair(0, "one two three four five", "මම ගෙදර යමි හොඳයි දැන්"),
        SentencePair(1, "short one", "කෙටි එකක්"),
        SentencePair(2, "one two three four five", "මම ගෙදර යමි හොඳයි දැන්"),
        SentencePair(3, "alpha beta gamma delta epsilon", "අට නවය දහය එකොළහ දොළහ"),
    ]
    write_corpus(pairs, tmp_path / "s.txt", tmp_path / "t.txt")
    return tmp_path


def run_cli(*argv):
    return main(list(argv))


def test_help_exists_for_every_subcommand(capsys):
    for name in ("run", "preset", "dedup", "filter", "rank", "stats", "synth", "lid", "report"):
        with pytest.raises(SystemExit) as exit_info:
            run_cli(name, "--help")
        assert exit_info.value.code == 0
        assert "usage" in capsys.readouterr().out


def test_unknown_flag_exits_2(corpus):
    with pytest.raises(SystemExit) as exit_info:
        run_cli(
            "dedup",
            "--source", str(corpus / "s.txt"),
            "--target", str(corpus / "t.txt"),
            "--out-dir", str(corpus / "out"),
            "--bogus-flag",
        )
    assert exit_info.value.code == 2


def test_missing_hi_for_stratio_exits_2(corpus, capsys):
    code = run_cli(
        "filter",
        "--kind", "stratio",
        "--lo", "0.5",
        "--source", str(corpus / "s.txt"),
        "--target", str(corpus / "t.txt"),
        "--out-dir", str(corpus / "out"),
    )
    assert code == 2
    assert "stratio" in capsys.readouterr().err


def test_missing_input_file_exits_3(tmp_path, capsys):
    code = run_cli(
        "dedup",
        "--source", str(tmp_path / "missing.txt"),
        "--target", str(tmp_path / "missing2.txt"),
        "--out-dir", str(tmp_path / "out"),
    )
    assert code == 3


def test_dedup_removes_exact_duplicate(corpus, capsys):
    out = corpus / "out"
    code = run_cli(
        "dedup",
        "--source", str(corpus / "s.txt"),
        "--target", str(corpus / "t.txt"),
        "--norm", "identity",
        "--side", "st",
        "--out-dir", str(out),
        "--log", str(corpus / "removals.tsv"),
    )
    assert code == 0
    kept = list(read_corpus(out / "source.txt", out / "target.txt"))
    assert len(kept) == 3  # pair 2 was an exact copy of pair 0
    log = (corpus / "removals.tsv").read_text().splitlines()
    assert len(log) == 1 and log[0].startswith("2\t")


def test_filter_length_matches_brute_force(corpus, capsys):
    out = corpus / "out"
    code = run_cli(
        "filter",
        "--kind", "length",
        "--min-words", "5",
        "--side", "st",
        "--source", str(corpus / "s.txt"),
        "--target", str(corpus / "t.txt"),
        "--out-dir", str(out),
    )
    assert code == 0
    kept = list(read_corpus(out / "source.txt", out / "target.txt"))
    original = list(read_corpus(corpus / "s.txt", corpus / "t.txt"))
    expected = [
        p for p in original
        if len(p.source.split()) >= 5 and len(p.target.split()) >= 5
    ]
    assert [(p.source, p.target) for p in kept] == [(p.source, p.target) for p in expected]
    assert "removed 1" in capsys.readouterr().out


def test_rank_top_1_selects_highest_cosine(corpus):
    rng = np.random.default_rng(0)
    src = rng.normal(size=(4, 5)).astype(np.float32)
    tgt = rng.normal(size=(4, 5)).astype(np.float32)
    write_embeddings(src, corpus / "s.bin")
    write_embeddings(tgt, corpus / "t.bin")
    out = corpus / "out"
    code = run_cli(
        "rank",
        "--source", str(corpus / "s.txt"),
        "--target", str(corpus / "t.txt"),
        "--src-emb", str(corpus / "s.bin"),
        "--tgt-emb", str(corpus / "t.bin"),
        "--top-k", "1",
        "--out-dir", str(out),
    )
    assert code == 0
    best_id = max(range(4), key=lambda i: (cosine(src[i], tgt[i]), -i))
    kept = list(read_corpus(out / "source.txt", out / "target.txt"))
    original = list(read_corpus(corpus / "s.txt", corpus / "t.txt"))
    assert kept[0].source == original[best_id].source
    scores = (out / "scores.tsv").read_text().splitlines()
    assert len(scores) == 1
    assert scores[0].split("\t")[1] == str(best_id)


def test_stats_against_reference(corpus, capsys):
    out = corpus / "out"
    run_cli(
        "dedup",
        "--source", str(corpus / "s.txt"),
        "--target", str(corpus / "t.txt"),
        "--out-dir", str(out),
    )
    capsys.readouterr()
    code = run_cli(
        "stats",
        "--source", str(out / "source.txt"),
        "--target", str(out / "target.txt"),
        "--ref-source", str(corpus / "s.txt"),
        "--ref-target", str(corpus / "t.txt"),
    )
    assert code == 0
    output = capsys.readouterr().out
    assert "pairs: 3" in output
    assert "reference: 4" in output
    assert "reduction: 25.00%" in output


def test_synth_with_score_config(tmp_path, capsys):
    config = tmp_path / "cfg.yaml"
    config.write_text(
        "language_pair: en-si\n"
        "stages:\n"
        "- kind: length\n"
        "  side: st\n"
        "  params: {min_words: 5}\n"
    )
    code = run_cli(
        "synth",
        "--pairs", "500",
        "--seed", "3",
        "--pair", "en-si",
        "--rate", "CS=0.1",
        "--out", str(tmp_path / "labeled.tsv"),
        "--score-config", str(config),
    )
    assert code == 0
    output = capsys.readouterr().out
    assert "wrote 500 labeled pairs" in output
    assert "CS" in output
    lines = (tmp_path / "labeled.tsv").read_text().splitlines()
    assert len(lines) == 500
    assert sum(1 for line in lines if line.split("\t")[1] == "CS") == 50


def test_synth_bad_rate_exits_2(tmp_path):
    code = run_cli(
        "synth", "--pairs", "10", "--rate", "CS:0.1", "--out", str(tmp_path / "x.tsv")
    )
    assert code == 2


def test_lid_export_and_reuse(corpus, capsys):
    preds = corpus / "preds.tsv"
    code = run_cli(
        "lid",
        "--source", str(corpus / "s.txt"),
        "--target", str(corpus / "t.txt"),
        "--side", "t",
        "--out", str(preds),
    )
    assert code == 0
    lines = preds.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0].split("\t")[1] == "si"


def test_report_command(tmp_path, capsys):
    scores = tmp_path / "scores.tsv"
    scores.write_text(
        "ccmatrix\ten-si\tlaser3\tbaseline\t30.76\n"
        "ccmatrix\ten-si\txlmr\tbaseline\t5.55\n"
        "ccmatrix\ten-si\tlaser3\tcombined\t36.10\n"
        "ccmatrix\ten-si\txlmr\tcombined\t24.18\n"
    )
    code = run_cli("report", "--scores", str(scores), "--reference", "laser3")
    assert code == 0
    output = capsys.readouterr().out
    assert "25.21\tNA" in output
    assert "11.92\t52.72" in output


def test_run_deterministic_across_threads(tmp_path, capsys):
    from pdcurate.corpus import LanguagePair
    from pdcurate.pipeline import dump_config, recommended_preset
    from pdcurate.synthnoise import NoiseRecipe, generate
    from pdcurate.taxonomy import NoiseLabel

    labeled = generate(
        NoiseRecipe(
            seed=9,
            pair_count=2000,
            rates={NoiseLabel.CS: 0.1, NoiseLabel.WL: 0.1},
            language_pair=LanguagePair("en", "si"),
        )
    )
    write_corpus((item.pair for item in labeled), tmp_path / "s.txt", tmp_path / "t.txt")
    config = tmp_path / "cfg.yaml"
    config.write_text(dump_config(recommended_preset(LanguagePair("en", "si"))))
    outputs = []
    for threads, out_name in ((1, "out1"), (4, "out4")):
        out = tmp_path / out_name
        code = run_cli(
            "run",
            "--config", str(config),
            "--source", str(tmp_path / "s.txt"),
            "--target", str(tmp_path / "t.txt"),
            "--out-dir", str(out),
            "--threads", str(threads),
        )
        assert code == 0
        outputs.append(
            ((out / "source.txt").read_bytes(), (out / "target.txt").read_bytes())
        )
    assert outputs[0] == outputs[1]


def test_env_variable_overrides_flag_default(corpus, capsys, monkeypatch):
    monkeypatch.setenv("CURATE_MIN_WORDS", "3")
    out = corpus / "out"
    code = run_cli(
        "filter",
        "--kind", "length",
        "--side", "s",
        "--source", str(corpus / "s.txt"),
        "--target", str(corpus / "t.txt"),
        "--out-dir", str(out),
    )
    assert code == 0
    kept = list(read_corpus(out / "source.txt", out / "target.txt"))
    assert len(kept) == 3  # min-words 3 from the environment keeps 2-word pair out


def test_tsv_input_gives_tsv_output(tmp_path):
    (tmp_path / "c.tsv").write_text("dup source\tdup target\ndup source\tdup target\nfresh\tnew\n")
    out = tmp_path / "out"
    code = run_cli(
        "dedup",
        "--tsv", str(tmp_path / "c.tsv"),
        "--side", "st",
        "--out-dir", str(out),
    )
    assert code == 0
    lines = (out / "corpus.tsv").read_text().splitlines()
    assert lines == ["dup source\tdup target", "fresh\tnew"]


def test_killed_run_leaves_no_partial_output(tmp_path):
    """SIGKILL mid-run: the output path either absent or complete."""
    n = 120_000
    with open(tmp_path / "s.txt", "w") as src, open(tmp_path / "t.txt", "w") as tgt:
        for i in range(n):
            src.write(f"source line {i} padded with words\n")
            tgt.write(f"target line {i} padded with words\n")
    out_dir = tmp_path / "out"
    proc = subprocess.Popen(
        [
            sys.executable, "-m", "pdcurate.cli",
            "dedup",
            "--source", str(tmp_path / "s.txt"),
            "--target", str(tmp_path / "t.txt"),
            "--out-dir", str(out_dir),
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    time.sleep(0.35)
    if proc.poll() is None:
        proc.send_signal(signal.SIGKILL)
    proc.wait()
    for name in ("source.txt", "target.txt"):
        path = out_dir / name
        if path.exists():
            assert len(path.read_text().splitlines()) == n
