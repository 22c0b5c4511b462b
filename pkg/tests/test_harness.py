"""Evaluation protocols, trace serialization and run summaries."""

import numpy as np
import pytest

from dsscn.harness import (HOLDOUT, PREQUENTIAL, RunConfig, run, run_holdout,
                           run_prequential, summarize, write_summary)
from dsscn.streams import chunk_stream, generate_sea


def sea_run(samples=5000, chunk=500, seed=0, protocol=PREQUENTIAL,
            schedule=((0, 4.0),)):
    X, labels = generate_sea(samples, schedule, seed=seed)
    cfg = RunConfig(protocol=protocol, chunk_size=chunk, seed=seed)
    return run(chunk_stream(X, labels, chunk), 3, 2, cfg)


class TestRunConfig:
    def test_protocol_validation(self):
        with pytest.raises(ValueError):
            RunConfig(protocol="bogus")

    def test_chunk_size_validation(self):
        with pytest.raises(ValueError):
            RunConfig(chunk_size=1)

    def test_holdout_fraction_validation(self):
        with pytest.raises(ValueError):
            RunConfig(protocol=HOLDOUT, holdout_train_fraction=1.0)


class TestPrequential:
    def test_first_chunk_unscored(self):
        report, _ = sea_run()
        assert report.rows[0].accuracy is None
        assert all(r.accuracy is not None for r in report.rows[1:])

    def test_stamps_sequential(self):
        report, _ = sea_run()
        assert [r.stamp for r in report.rows] == list(range(len(report.rows)))

    def test_learns_stationary_stream(self):
        report, _ = sea_run(samples=10000)
        assert report.accuracies[-5:].mean() > 0.9


class TestHoldout:
    def test_every_chunk_scored(self):
        X, labels = generate_sea(4000, seed=1)
        cfg = RunConfig(protocol=HOLDOUT, chunk_size=500, seed=1)
        report = run_holdout(chunk_stream(X, labels, 500), 3, 2, cfg)
        assert all(r.accuracy is not None for r in report.rows)

    def test_split_fraction_respected(self):
        X, labels = generate_sea(1000, seed=2)
        cfg = RunConfig(protocol=HOLDOUT, chunk_size=500, seed=2,
                        holdout_train_fraction=0.9)
        report = run_holdout(chunk_stream(X, labels, 500), 3, 2, cfg)
        # 50 test rows per chunk: accuracy quantized to 1/50
        for r in report.rows:
            assert round(r.accuracy * 50) == pytest.approx(r.accuracy * 50)


class TestTrace:
    def test_csv_shape(self):
        report, _ = sea_run(samples=2500)
        lines = report.trace_csv().strip().split("\n")
        assert len(lines) == len(report.rows) + 1
        header = lines[0].split(",")
        assert header[:5] == ["stamp", "accuracy", "depth", "nodes", "status"]
        assert "lambda_1" in header

    def test_csv_deterministic_across_runs(self):
        r1, _ = sea_run(samples=3000, seed=5)
        r2, _ = sea_run(samples=3000, seed=5)
        assert r1.trace_csv() == r2.trace_csv()

    def test_write_trace(self, tmp_path):
        report, _ = sea_run(samples=1500)
        path = tmp_path / "trace.csv"
        report.write_trace(str(path))
        assert path.read_text() == report.trace_csv()


class TestSummary:
    def test_fields_present(self):
        report, _ = sea_run(samples=2500)
        s = summarize(report)
        for key in ("classification_rate", "node", "layer", "runtime",
                    "stamps", "drift_stamps", "warning_stamps", "scopes_used"):
            assert key in s

    def test_population_std(self):
        report, _ = sea_run(samples=2500)
        s = summarize(report)
        acc = report.accuracies
        assert s["classification_rate"][0] == pytest.approx(acc.mean())
        assert s["classification_rate"][1] == pytest.approx(acc.std())

    def test_scopes_from_ladder(self):
        report, _ = sea_run(samples=2500)
        s = summarize(report)
        from dsscn.scn_init import DEFAULT_SCOPES
        assert s["scopes_used"]
        assert set(s["scopes_used"]) <= set(DEFAULT_SCOPES)

    def test_empty_report_rejected(self):
        from dsscn.harness import RunReport
        with pytest.raises(ValueError):
            summarize(RunReport())

    def test_write_summary_includes_config(self, tmp_path):
        report, _ = sea_run(samples=1500)
        path = tmp_path / "summary.txt"
        write_summary(str(path), summarize(report), report.config_header)
        text = path.read_text()
        assert "config.stack.alpha = 0.5" in text
        assert "classification_rate = " in text
        assert "drift_stamps = " in text
