"""
End-to-end runs of the diarclust command line.
"""

import json
import math
import re

import pandas as pd
import pytest

import diarclust.pipeline.training as training
from conftest import planted_sample
from diarclust.config import get_settings, reset_settings
from diarclust.main import EXIT_DIVERGED, EXIT_INVALID, EXIT_OK, EXIT_RUNTIME, _run_config, build_parser, main
from diarclust.models import EmbeddingSet
from diarclust.repositories import CheckpointRepository, EmbeddingRepository, MetricsRepository, RttmRepository

SMALL_SYNTH = ["--speakers", "2", "--recordings", "3", "--frames", "40", "--features", "4", "--inventory", "4"]
SMALL_TRAIN = [
    "--heldout", "1", "--epochs", "2", "--chunk-frames", "10", "--s-local", "2", "--embed-dim", "3",
    "--width", "4", "--k-trunc", "3", "--em-iters", "2", "--lr", "0.01",
]


@pytest.fixture
def planted_csv(tmp_path):
    sample = planted_sample(seed=7)
    repo = EmbeddingRepository(tmp_path)
    embeddings = repo.write_embeddings(EmbeddingSet.from_array(sample.embeddings), "planted.csv")
    truth = repo.write_truth(sample.assignments.tolist(), "truth.csv")
    return str(embeddings), str(truth)


@pytest.fixture
def corpus_dir(tmp_path):
    out = tmp_path / "corpus"
    assert main(["synth", *SMALL_SYNTH, "--seed", "3", "--out-dir", str(out)]) == EXIT_OK
    return out


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def _printed_ari(text):
    return float(re.search(r"ARI (-?\d+\.\d+)", text).group(1))


# synth

def test_synth_is_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        assert main(["synth", "--speakers", "3", "--recordings", "5", "--frames", "200",
                     "--seed", "7", "--out-dir", str(tmp_path / name)]) == EXIT_OK
    assert "5 recordings" in capsys.readouterr().out
    for name in ("corpus.json", "reference.rttm"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_synth_rejects_zero_speakers(tmp_path, capsys):
    assert main(["synth", "--speakers", "0", "--out-dir", str(tmp_path)]) == EXIT_INVALID
    assert "error" in capsys.readouterr().err


def test_synth_reference_scores_zero_against_itself(corpus_dir, capsys):
    reference = str(corpus_dir / "reference.rttm")
    assert main(["score", reference, reference]) == EXIT_OK
    assert "DER 0.00%" in capsys.readouterr().out


# cluster

def test_cluster_recovers_planted_clusters(planted_csv, tmp_path, capsys):
    embeddings, truth = planted_csv
    out = tmp_path / "igmm"
    assert main(["cluster", "--embeddings", embeddings, "--truth", truth, "--out-dir", str(out)]) == EXIT_OK
    assert _printed_ari(capsys.readouterr().out) >= 0.95
    responsibilities = pd.read_csv(out / "responsibilities.csv")
    assert list(responsibilities.columns) == ["n"] + [f"r_{k}" for k in range(1, 11)]
    assignments = pd.read_csv(out / "assignments.csv")
    assert list(assignments.columns) == ["n", "i", "s", "cluster"]
    assert len(assignments) == 60


def test_cluster_with_ahc_backend(planted_csv, tmp_path, capsys):
    embeddings, truth = planted_csv
    out = tmp_path / "ahc"
    assert main(["cluster", "--backend", "ahc", "--embeddings", embeddings, "--truth", truth,
                 "--out-dir", str(out)]) == EXIT_OK
    assert _printed_ari(capsys.readouterr().out) >= 0.95
    metrics = pd.read_csv(out / "cluster_metrics.csv")
    assert metrics.loc[0, "backend"] == "ahc"
    assert not (out / "responsibilities.csv").exists()


def test_cluster_ahc_threshold_defaults_to_settings(planted_csv, tmp_path, monkeypatch):
    embeddings, _ = planted_csv
    monkeypatch.setenv("DIARCLUST_AHC_THRESHOLD", "2.0")
    reset_settings()
    assert main(["cluster", "--backend", "ahc", "--embeddings", embeddings, "--out-dir", str(tmp_path)]) == EXIT_OK
    assert pd.read_csv(tmp_path / "cluster_metrics.csv").loc[0, "clusters"] == 1


def test_cluster_zero_iterations_uniform_init_ties_to_first_cluster(planted_csv, tmp_path):
    embeddings, _ = planted_csv
    assert main(["cluster", "--embeddings", embeddings, "--em-iters", "0", "--init", "uniform",
                 "--out-dir", str(tmp_path / "flat")]) == EXIT_OK
    assert set(pd.read_csv(tmp_path / "flat" / "assignments.csv")["cluster"]) == {0}


def test_cluster_is_deterministic(planted_csv, tmp_path):
    embeddings, _ = planted_csv
    for name in ("a", "b"):
        assert main(["cluster", "--embeddings", embeddings, "--out-dir", str(tmp_path / name)]) == EXIT_OK
    for name in ("assignments.csv", "responsibilities.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_cluster_reports_bad_csv_row(tmp_path, capsys):
    path = _write(tmp_path / "bad.csv", "n,i,s,e_1,e_2\n0,0,0,1.0,2.0\n1,0,1,x,2.0\n")
    assert main(["cluster", "--embeddings", path, "--out-dir", str(tmp_path)]) == EXIT_INVALID
    assert "line 3" in capsys.readouterr().err


def test_cluster_missing_file_is_an_io_error(tmp_path):
    assert main(["cluster", "--embeddings", str(tmp_path / "none.csv"), "--out-dir", str(tmp_path)]) == EXIT_RUNTIME


def test_invalid_hyperparameters_exit_with_usage_code(planted_csv, tmp_path):
    embeddings, _ = planted_csv
    assert main(["cluster", "--embeddings", embeddings, "--alpha", "0", "--out-dir", str(tmp_path)]) == EXIT_INVALID


def test_unknown_backend_is_rejected_by_the_parser(planted_csv):
    embeddings, _ = planted_csv
    with pytest.raises(SystemExit) as info:
        main(["cluster", "--embeddings", embeddings, "--backend", "kmeans"])
    assert info.value.code == 2


# train

def test_train_writes_metrics_and_checkpoint(corpus_dir, tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["train", "--corpus", str(corpus_dir / "corpus.json"), *SMALL_TRAIN, "--out-dir", str(out)])
    assert code == EXIT_OK
    assert capsys.readouterr().out.startswith("epoch 2:")
    history = MetricsRepository(out).read_epochs()
    assert [row.epoch for row in history] == [1, 2]
    assert all(math.isfinite(row.DER) for row in history)
    params, encoder = CheckpointRepository(out).load()
    assert encoder.embed_dim == 3 and encoder.feature_dim == 4
    params.check_shapes(encoder)


def test_train_without_auxiliary_weights_still_reports_cluster_loss(corpus_dir, tmp_path):
    out = tmp_path / "plain"
    code = main(["train", "--corpus", str(corpus_dir / "corpus.json"), *SMALL_TRAIN,
                 "--lambda1", "0", "--lambda2", "0", "--out-dir", str(out)])
    assert code == EXIT_OK
    frame = pd.read_csv(out / "metrics.csv")
    assert "L_cluster" in frame.columns
    assert frame["L_cluster"].notna().all()


def test_train_is_reproducible(corpus_dir, tmp_path):
    for name in ("a", "b"):
        assert main(["train", "--corpus", str(corpus_dir / "corpus.json"), *SMALL_TRAIN,
                     "--seed", "4", "--out-dir", str(tmp_path / name)]) == EXIT_OK
    for name in ("metrics.csv", "checkpoint.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_train_divergence_exit_code(corpus_dir, tmp_path, monkeypatch, capsys):
    def diverged(params, rec, config):
        return training.RecordingLosses(math.nan, None, None, math.inf, 0)

    monkeypatch.setattr(training, "recording_losses", diverged)
    code = main(["train", "--corpus", str(corpus_dir / "corpus.json"), *SMALL_TRAIN, "--out-dir", str(tmp_path)])
    assert code == EXIT_DIVERGED
    assert "diverged" in capsys.readouterr().err


def test_train_rejects_weights_above_one(corpus_dir, tmp_path):
    code = main(["train", "--corpus", str(corpus_dir / "corpus.json"), "--lambda1", "0.8", "--lambda2", "0.5",
                 "--out-dir", str(tmp_path)])
    assert code == EXIT_INVALID


def test_binarize_threshold_comes_from_settings_unless_flagged(monkeypatch):
    monkeypatch.setenv("DIARCLUST_BINARIZE_THRESHOLD", "0.3")
    reset_settings()
    parser = build_parser(get_settings())
    args = parser.parse_args(["train", "--corpus", "corpus.json"])
    assert _run_config(args).train_config().binarize_threshold == 0.3
    args = parser.parse_args(["diarize", "--corpus", "corpus.json", "--checkpoint", "c.json",
                              "--binarize-threshold", "0.7"])
    assert _run_config(args).train_config().binarize_threshold == 0.7


# diarize

DIARIZE = ["--chunk-frames", "10", "--k-trunc", "3", "--em-iters", "2"]


@pytest.mark.parametrize("backend", ["igmm", "ahc"])
def test_diarize_writes_hypothesis_and_speaker_count_table(corpus_dir, tmp_path, capsys, backend):
    corpus = str(corpus_dir / "corpus.json")
    run_dir = tmp_path / "run"
    assert main(["train", "--corpus", corpus, *SMALL_TRAIN, "--out-dir", str(run_dir)]) == EXIT_OK
    capsys.readouterr()

    out = tmp_path / backend
    code = main(["diarize", "--corpus", corpus, "--checkpoint", str(run_dir / "checkpoint.json"), *DIARIZE,
                 "--backend", backend, "--out-dir", str(out)])
    assert code == EXIT_OK
    printed = capsys.readouterr().out
    assert printed.startswith(f"{backend}: DER")
    assert "2 speakers (3 recordings)" in printed

    table = pd.read_csv(out / "der_by_speakers.csv")
    assert list(table["n_speakers"]) == [2]
    assert list(table["recordings"]) == [3]
    assert list(pd.read_csv(out / "der.csv")["recording_id"]) == ["rec000", "rec001", "rec002"]
    hypothesis = RttmRepository(out).read("hypothesis.rttm", "rec000")
    assert hypothesis.validate() == (True, None)
    assert main(["score", str(corpus_dir / "reference.rttm"), str(out / "hypothesis.rttm")]) == EXIT_OK


def test_diarize_missing_checkpoint_is_an_io_error(corpus_dir, tmp_path):
    code = main(["diarize", "--corpus", str(corpus_dir / "corpus.json"), "--checkpoint",
                 str(tmp_path / "none.json"), "--out-dir", str(tmp_path)])
    assert code == EXIT_RUNTIME


# score

REF = "SPEAKER r 1 0.000 10.000 <NA> <NA> a <NA> <NA>\n"
HYP = "SPEAKER r 1 0.000 8.000 <NA> <NA> a <NA> <NA>\n"


def test_score_fixture_with_collar(tmp_path, capsys):
    ref, hyp = _write(tmp_path / "ref.rttm", REF), _write(tmp_path / "hyp.rttm", HYP)
    assert main(["score", ref, hyp]) == EXIT_OK
    assert "DER 18.42%  (MI 18.42% / FA 0.00% / CF 0.00%)" in capsys.readouterr().out


def test_score_fixture_without_collar(tmp_path, capsys):
    ref, hyp = _write(tmp_path / "ref.rttm", REF), _write(tmp_path / "hyp.rttm", HYP)
    assert main(["score", ref, hyp, "--collar", "0", "--json"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("DER 20.00%")
    assert json.loads(lines[-1])["missed"] == pytest.approx(0.2)


def test_score_identical_files(tmp_path, capsys):
    ref = _write(tmp_path / "ref.rttm", REF)
    assert main(["score", ref, ref]) == EXIT_OK
    assert capsys.readouterr().out.startswith("DER 0.00%")


def test_score_several_recordings_with_threads(tmp_path, capsys):
    ref = _write(tmp_path / "ref.rttm", REF + REF.replace(" r ", " q "))
    hyp = _write(tmp_path / "hyp.rttm", HYP)
    out = tmp_path / "scores"
    assert main(["score", ref, hyp, "--workers", "2", "--out-dir", str(out)]) == EXIT_OK
    printed = capsys.readouterr().out
    assert "q: DER 100.00%" in printed
    assert "r: DER 18.42%" in printed
    table = pd.read_csv(out / "der.csv")
    assert list(table["recording_id"]) == ["q", "r"]
    assert json.loads((out / "der.json").read_text())["scored_speech"] == pytest.approx(19.0)


def test_score_parse_error_exit_code(tmp_path, capsys):
    ref = _write(tmp_path / "ref.rttm", "SPEAKER r 1 zero 1.0 <NA> <NA> a\n")
    assert main(["score", ref, ref]) == EXIT_INVALID
    assert "line 1" in capsys.readouterr().err
