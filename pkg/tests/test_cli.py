import json
import math

import pytest

from factsim.cli import main
from factsim.corpus import load_benchmark

FIXTURE_RECORD = {
    "id": "v1",
    "source": "The plant opened in March. Workers assembled turbines.",
    "summary": "The plant opened in March.",
    "label": "consistent",
    "dataset": "cnndm",
    "origin": "cnndm",
    "split": "validation",
    "error_types": [],
}


def _write_corpus(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def _row(record_id, *, label="consistent", origin="cnndm", split="validation",
         source=None, summary=None, error_types=None, dataset=None):
    row = dict(FIXTURE_RECORD)
    row["id"] = record_id
    row["label"] = label
    row["origin"] = origin
    row["dataset"] = dataset or origin
    row["split"] = split
    if source:
        row["source"] = source
    if summary:
        row["summary"] = summary
    if label == "inconsistent":
        row["error_types"] = error_types or [
            {"locus": "intrinsic", "attribute": "noun_phrase"}
        ]
        if row["summary"] == FIXTURE_RECORD["summary"]:
            row["summary"] = "The plant closed in March."
    return row


class TestScoreCommand:
    def test_scores_every_record(self, tmp_path, fixture_corpus_path):
        out = tmp_path / "scores.jsonl"
        code = main([
            "score", "--corpus", str(fixture_corpus_path),
            "--metric", "sbertscore", "--out", str(out),
        ])
        assert code == 0
        lines = [json.loads(l) for l in out.read_text().splitlines()]
        assert len(lines) == 6
        assert {l["id"] for l in lines} == {"a1", "a2", "a3", "a4", "a5", "a6"}
        for line in lines:
            assert set(line) >= {
                "id", "metric", "precision", "recall", "f1",
                "truncated_source", "truncated_summary",
            }

    def test_copy_summary_record_scores_precision_one(self, tmp_path, fixture_corpus_path):
        out = tmp_path / "scores.jsonl"
        main(["score", "--corpus", str(fixture_corpus_path), "--out", str(out)])
        by_id = {json.loads(l)["id"]: json.loads(l) for l in out.read_text().splitlines()}
        assert by_id["a1"]["precision"] == 1.0

    def test_doc_granularity_flags_long_source(self, tmp_path, fixture_corpus_path):
        out = tmp_path / "scores.jsonl"
        main([
            "score", "--corpus", str(fixture_corpus_path),
            "--granularity", "doc:sent", "--out", str(out),
        ])
        by_id = {json.loads(l)["id"]: json.loads(l) for l in out.read_text().splitlines()}
        assert by_id["a5"]["truncated_source"] is True
        assert by_id["a1"]["truncated_source"] is False

    def test_sentence_granularity_does_not_flag(self, tmp_path, fixture_corpus_path):
        out = tmp_path / "scores.jsonl"
        main(["score", "--corpus", str(fixture_corpus_path), "--out", str(out)])
        by_id = {json.loads(l)["id"]: json.loads(l) for l in out.read_text().splitlines()}
        assert by_id["a5"]["truncated_source"] is False

    def test_rouge_metric(self, tmp_path, fixture_corpus_path):
        out = tmp_path / "scores.jsonl"
        code = main([
            "score", "--corpus", str(fixture_corpus_path),
            "--metric", "rouge2", "--out", str(out),
        ])
        assert code == 0
        first = json.loads(out.read_text().splitlines()[0])
        assert first["metric"] == "rouge2"

    def test_unknown_metric_is_a_usage_error(self, fixture_corpus_path):
        with pytest.raises(SystemExit) as exc:
            main(["score", "--corpus", str(fixture_corpus_path), "--metric", "bleu"])
        assert exc.value.code == 2

    def test_unknown_granularity_is_a_usage_error(self, fixture_corpus_path):
        with pytest.raises(SystemExit) as exc:
            main([
                "score", "--corpus", str(fixture_corpus_path),
                "--granularity", "word:sent",
            ])
        assert exc.value.code == 2

    def test_missing_corpus_file_fails_cleanly(self, tmp_path, capsys):
        code = main(["score", "--corpus", str(tmp_path / "nope.jsonl")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_workers_do_not_change_output(self, tmp_path, fixture_corpus_path):
        out1 = tmp_path / "w1.jsonl"
        out4 = tmp_path / "w4.jsonl"
        main(["score", "--corpus", str(fixture_corpus_path), "--workers", "1", "--out", str(out1)])
        main(["score", "--corpus", str(fixture_corpus_path), "--workers", "4", "--out", str(out4)])
        assert out1.read_bytes() == out4.read_bytes()

    def test_stdout_when_no_out_given(self, fixture_corpus_path, capsys):
        code = main(["score", "--corpus", str(fixture_corpus_path), "--metric", "rouge1"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 6

    def test_config_supplies_defaults_but_flags_win(self, tmp_path, fixture_corpus_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"metric": "rouge1", "out": str(tmp_path / "c.jsonl")}))
        main([
            "score", "--corpus", str(fixture_corpus_path),
            "--config", str(config), "--metric", "sbertscore",
        ])
        first = json.loads((tmp_path / "c.jsonl").read_text().splitlines()[0])
        assert first["metric"] == "sbertscore"  # flag beat the config value


class TestSynthCommand:
    def test_writes_requested_corpus(self, tmp_path):
        out = tmp_path / "synth.jsonl"
        code = main([
            "synth", "--consistent", "8", "--inconsistent", "6",
            "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        records = load_benchmark(out)
        assert len(records) == 14

    def test_mix_controls_perturbations(self, tmp_path):
        out = tmp_path / "synth.jsonl"
        main([
            "synth", "--consistent", "1", "--inconsistent", "9",
            "--mix", "verb_antonym=1", "--seed", "0", "--out", str(out),
        ])
        records = load_benchmark(out)
        for record in records:
            for error in record.error_types:
                assert error.attribute.value == "predicate"

    def test_bad_mix_entry_fails(self, tmp_path, capsys):
        code = main([
            "synth", "--consistent", "1", "--inconsistent", "1",
            "--mix", "verb_antonym", "--out", str(tmp_path / "x.jsonl"),
        ])
        assert code == 1
        assert "kind=weight" in capsys.readouterr().err

    def test_same_seed_same_bytes(self, tmp_path):
        a = tmp_path / "a.jsonl"
        b = tmp_path / "b.jsonl"
        for path in (a, b):
            main([
                "synth", "--consistent", "5", "--inconsistent", "5",
                "--seed", "42", "--out", str(path),
            ])
        assert a.read_bytes() == b.read_bytes()


@pytest.fixture
def scored_workflow(tmp_path):
    """synth -> score -> calibrate, shared by evaluate/agree/combine tests."""
    corpus = tmp_path / "corpus.jsonl"
    scores = tmp_path / "scores.jsonl"
    thresholds = tmp_path / "thresholds.json"
    assert main([
        "synth", "--consistent", "30", "--inconsistent", "30",
        "--seed", "9", "--out", str(corpus),
    ]) == 0
    assert main([
        "score", "--corpus", str(corpus), "--metric", "sbertscore",
        "--out", str(scores),
    ]) == 0
    assert main([
        "calibrate", "--scores", str(scores), "--corpus", str(corpus),
        "--measure", "precision", "--out", str(thresholds),
    ]) == 0
    return tmp_path, corpus, scores, thresholds


class TestCalibrateCommand:
    def test_thresholds_file_shape(self, scored_workflow):
        _, _, _, thresholds = scored_workflow
        data = json.loads(thresholds.read_text())
        assert data["metric_name"] == "sbertscore"
        assert data["measure"] == "precision"
        assert data["orientation"] == "above"
        assert data["positive_class"] == "inconsistent"
        entry = data["groups"]["all"]
        assert 0.0 <= entry["balanced_accuracy"] <= 1.0
        assert isinstance(entry["threshold"], (int, float, str))

    def test_one_class_group_fails(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.jsonl"
        _write_corpus(corpus, [
            _row("c1", origin="cnndm"),
            _row("c2", origin="cnndm", label="inconsistent"),
            _row("x1", origin="xsum"),
            _row("x2", origin="xsum"),  # xsum group has no inconsistent record
        ])
        scores = tmp_path / "scores.jsonl"
        main(["score", "--corpus", str(corpus), "--out", str(scores)])
        code = main([
            "calibrate", "--scores", str(scores), "--corpus", str(corpus),
            "--group-by", "origin", "--out", str(tmp_path / "t.json"),
        ])
        assert code == 1
        err = capsys.readouterr().err
        assert "xsum" in err and "both classes" in err

    def test_external_score_format_with_below_orientation(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        _write_corpus(corpus, [
            _row("c1"),
            _row("c2", label="inconsistent"),
        ])
        external = tmp_path / "external.jsonl"
        external.write_text(
            json.dumps({"metric_name": "hallucination_rate",
                        "higher_is_consistent": False}) + "\n"
            + json.dumps({"id": "c1", "score": 0.05}) + "\n"
            + json.dumps({"id": "c2", "score": 0.90}) + "\n",
            encoding="utf-8",
        )
        out = tmp_path / "t.json"
        code = main([
            "calibrate", "--scores", str(external), "--corpus", str(corpus),
            "--out", str(out),
        ])
        assert code == 0
        data = json.loads(out.read_text())
        # orientation derived from higher_is_consistent=false
        assert data["orientation"] == "below"
        assert data["metric_name"] == "hallucination_rate"
        assert data["groups"]["all"]["balanced_accuracy"] == 1.0

    def test_missing_scores_for_validation_records(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.jsonl"
        _write_corpus(corpus, [_row("c1"), _row("c2", label="inconsistent")])
        scores = tmp_path / "scores.jsonl"
        scores.write_text(json.dumps({
            "id": "c1", "metric": "sbertscore", "precision": 1.0,
            "recall": 1.0, "f1": 1.0,
            "truncated_source": False, "truncated_summary": False,
        }) + "\n", encoding="utf-8")
        code = main([
            "calibrate", "--scores", str(scores), "--corpus", str(corpus),
            "--out", str(tmp_path / "t.json"),
        ])
        assert code == 1
        assert "c2" in capsys.readouterr().err


class TestEvaluateCommand:
    def test_report_sections(self, scored_workflow, capsys):
        tmp, corpus, scores, thresholds = scored_workflow
        report = tmp / "report.json"
        predictions = tmp / "preds.jsonl"
        code = main([
            "evaluate", "--scores", str(scores), "--corpus", str(corpus),
            "--thresholds", str(thresholds), "--out", str(report),
            "--predictions-out", str(predictions),
        ])
        assert code == 0
        data = json.loads(report.read_text())
        assert data["split"] == "test"
        assert data["positive_class"] == "inconsistent"
        assert data["confusion_convention"]["positive_class"] == "inconsistent"
        group = data["groups"]["all"]
        for section in ("balanced_accuracy", "roc_auc", "confusion", "error_type_recall"):
            assert section in group
        assert set(group["confusion"]["counts"]) == {"tp", "tn", "fp", "fn"}
        # stdout carries an aligned text summary
        assert "ba=" in capsys.readouterr().out

    def test_predictions_file_loads(self, scored_workflow):
        tmp, corpus, scores, thresholds = scored_workflow
        predictions = tmp / "preds.jsonl"
        main([
            "evaluate", "--scores", str(scores), "--corpus", str(corpus),
            "--thresholds", str(thresholds),
            "--predictions-out", str(predictions),
        ])
        from factsim.evaluate import load_predictions

        pred_set = load_predictions(predictions)
        records = load_benchmark(corpus)
        test_ids = {r.id for r in records if r.split.value == "test"}
        assert set(pred_set.predictions) == test_ids
        assert pred_set.threshold is not None

    def test_missing_group_threshold_fails(self, scored_workflow, capsys):
        tmp, corpus, scores, thresholds = scored_workflow
        data = json.loads(thresholds.read_text())
        data["groups"] = {}
        thresholds.write_text(json.dumps(data))
        code = main([
            "evaluate", "--scores", str(scores), "--corpus", str(corpus),
            "--thresholds", str(thresholds),
        ])
        assert code == 1
        assert "threshold" in capsys.readouterr().err

    def test_group_by_conflict_fails(self, scored_workflow, capsys):
        tmp, corpus, scores, thresholds = scored_workflow
        code = main([
            "evaluate", "--scores", str(scores), "--corpus", str(corpus),
            "--thresholds", str(thresholds), "--group-by", "origin",
        ])
        assert code == 1
        assert "conflicts" in capsys.readouterr().err

    def test_one_class_test_group_is_skipped_with_warning(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.jsonl"
        _write_corpus(corpus, [
            _row("v1", origin="cnndm"),
            _row("v2", origin="cnndm", label="inconsistent"),
            _row("v3", origin="xsum"),
            _row("v4", origin="xsum", label="inconsistent",
                 error_types=[{"locus": "extrinsic", "attribute": "sentence"}]),
            _row("t1", origin="cnndm", split="test"),
            _row("t2", origin="cnndm", split="test", label="inconsistent"),
            _row("t3", origin="xsum", split="test"),  # xsum test split: one class
        ])
        scores = tmp_path / "scores.jsonl"
        thresholds = tmp_path / "t.json"
        report = tmp_path / "r.json"
        main(["score", "--corpus", str(corpus), "--out", str(scores)])
        assert main([
            "calibrate", "--scores", str(scores), "--corpus", str(corpus),
            "--group-by", "origin", "--out", str(thresholds),
        ]) == 0
        code = main([
            "evaluate", "--scores", str(scores), "--corpus", str(corpus),
            "--thresholds", str(thresholds), "--out", str(report),
        ])
        assert code == 0
        captured = capsys.readouterr()
        assert "skipping" in captured.err
        data = json.loads(report.read_text())
        assert data["groups"]["xsum"]["skipped"] == "only one class present"
        assert "balanced_accuracy" in data["groups"]["cnndm"]


class TestAgreeAndCombine:
    @pytest.fixture
    def prediction_files(self, scored_workflow):
        tmp, corpus, scores, thresholds = scored_workflow
        paths = []
        for metric in ("rouge1", "rouge2", "bertscore"):
            metric_scores = tmp / f"{metric}.jsonl"
            metric_thresholds = tmp / f"{metric}_t.json"
            predictions = tmp / f"{metric}_p.jsonl"
            assert main([
                "score", "--corpus", str(corpus), "--metric", metric,
                "--out", str(metric_scores),
            ]) == 0
            assert main([
                "calibrate", "--scores", str(metric_scores), "--corpus", str(corpus),
                "--measure", "f1", "--out", str(metric_thresholds),
            ]) == 0
            assert main([
                "evaluate", "--scores", str(metric_scores), "--corpus", str(corpus),
                "--thresholds", str(metric_thresholds),
                "--predictions-out", str(predictions),
            ]) == 0
            paths.append(predictions)
        return tmp, corpus, paths

    def test_agree_matrix_shape_and_diagonal(self, prediction_files, capsys):
        tmp, _, paths = prediction_files
        out = tmp / "agreement.json"
        code = main(["agree", "--predictions"] + [str(p) for p in paths] + ["--out", str(out)])
        assert code == 0
        data = json.loads(out.read_text())
        assert len(data["metrics"]) == 3
        kappa = data["kappa"]
        for i in range(3):
            assert kappa[i][i] == 1.0
            for j in range(3):
                assert kappa[i][j] == pytest.approx(kappa[j][i])
        assert "kappa" in capsys.readouterr().out

    def test_agree_needs_two_files(self, prediction_files, capsys):
        tmp, _, paths = prediction_files
        code = main(["agree", "--predictions", str(paths[0])])
        assert code == 1
        assert "two" in capsys.readouterr().err

    def test_combine_and_report(self, prediction_files, capsys):
        tmp, corpus, paths = prediction_files
        out = tmp / "combined.jsonl"
        report = tmp / "combined_report.json"
        code = main([
            "combine", "--predictions", str(paths[0]), str(paths[1]),
            "--op", "and", "--corpus", str(corpus),
            "--out", str(out), "--report", str(report),
        ])
        assert code == 0
        data = json.loads(report.read_text())
        assert data["and_dominance_holds"] is True
        assert len(data["results"]) == 3
        from factsim.evaluate import load_predictions

        combined = load_predictions(out)
        assert combined.metric_name.startswith("and(")

    def test_combine_bad_op_is_usage_error(self, prediction_files):
        tmp, corpus, paths = prediction_files
        with pytest.raises(SystemExit) as exc:
            main([
                "combine", "--predictions", str(paths[0]), str(paths[1]),
                "--op", "xor",
            ])
        assert exc.value.code == 2

    def test_combine_needs_exactly_two(self, prediction_files, capsys):
        tmp, corpus, paths = prediction_files
        code = main([
            "combine", "--predictions", str(paths[0]), "--op", "and",
        ])
        assert code == 1
        assert "two" in capsys.readouterr().err


class TestBenchCommand:
    def test_identities_hold(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.jsonl"
        main([
            "synth", "--consistent", "10", "--inconsistent", "10",
            "--seed", "2", "--out", str(corpus),
        ])
        out = tmp_path / "bench.json"
        code = main([
            "bench", "--corpus", str(corpus), "--metrics", "sbertscore,rouge1",
            "--out", str(out),
        ])
        assert code == 0
        data = json.loads(out.read_text())
        identity = data["call_identity"]
        assert identity["observed_cold_calls"] == identity["expected_cold_calls"]
        assert data["warm_cache"]["second_pass_new_calls"] == 0
        # timings go to stdout, never into the file
        assert "timing" in capsys.readouterr().out
        assert "timing" not in out.read_text()

    def test_out_file_is_deterministic_across_runs(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        main([
            "synth", "--consistent", "6", "--inconsistent", "6",
            "--seed", "4", "--out", str(corpus),
        ])
        a = tmp_path / "bench_a.json"
        b = tmp_path / "bench_b.json"
        for path in (a, b):
            main(["bench", "--corpus", str(corpus), "--sample", "8", "--out", str(path)])
        assert a.read_bytes() == b.read_bytes()


def test_full_workflow_round_trip(tmp_path):
    """synth -> score -> calibrate -> evaluate, all through the CLI, ends
    with a usable report."""
    corpus = tmp_path / "corpus.jsonl"
    scores = tmp_path / "scores.jsonl"
    thresholds = tmp_path / "thresholds.json"
    report = tmp_path / "report.json"
    assert main([
        "synth", "--consistent", "25", "--inconsistent", "25",
        "--seed", "21", "--out", str(corpus),
    ]) == 0
    assert main([
        "score", "--corpus", str(corpus), "--out", str(scores),
    ]) == 0
    assert main([
        "calibrate", "--scores", str(scores), "--corpus", str(corpus),
        "--out", str(thresholds),
    ]) == 0
    assert main([
        "evaluate", "--scores", str(scores), "--corpus", str(corpus),
        "--thresholds", str(thresholds), "--out", str(report),
    ]) == 0
    data = json.loads(report.read_text())
    assert data["groups"]["all"]["balanced_accuracy"] >= 0.8
