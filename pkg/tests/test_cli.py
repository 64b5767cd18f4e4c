"""CLI behavior: exit codes, stage wiring, rerun stability, JSON mode."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from lessonlens.cli import main

FIXTURES_DIR = Path(__file__).parent / "fixtures" / "golden"


@pytest.fixture()
def workdir(tmp_path):
    config = {
        "store_dir": str(tmp_path / "store"),
        "backend": "mock",
        "mock_fixtures": str(FIXTURES_DIR / "mock_fixtures.json"),
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config), "utf-8")
    return tmp_path, config_path


def run(config_path, *argv) -> int:
    return main(["--config", str(config_path), *argv])


def ingest_golden(config_path) -> int:
    return run(
        config_path,
        "ingest",
        "--lesson-id",
        "golden-osmosis",
        "--duration-ms",
        "1800000",
        "--transcript",
        str(FIXTURES_DIR / "transcript.jsonl"),
        "--title",
        "Osmosis investigation",
        "--media-url",
        "media/golden-osmosis.mp4",
    )


class TestExitCodes:
    def test_analyze_without_ingest_exits_1(self, workdir, capsys):
        tmp_path, config_path = workdir
        run(config_path, "ingest", "--lesson-id", "other", "--duration-ms", "120000",
            "--transcript", str(FIXTURES_DIR / "transcript.jsonl"))
        code = run(config_path, "analyze", "--lesson-id", "missing-lesson")
        assert code == 1

    def test_missing_transcript_file_exits_1(self, workdir):
        tmp_path, config_path = workdir
        code = run(
            config_path,
            "ingest",
            "--lesson-id",
            "l1",
            "--duration-ms",
            "1000",
            "--transcript",
            str(tmp_path / "absent.jsonl"),
        )
        assert code == 1

    def test_backend_failure_exits_2(self, workdir, tmp_path, monkeypatch):
        _, config_path = workdir
        bad_config = tmp_path / "bad.json"
        bad_config.write_text(
            json.dumps(
                {
                    "store_dir": str(tmp_path / "store2"),
                    "backend": "remote",
                    "remote_base_url": "http://127.0.0.1:1",
                    "remote_timeout_s": 0.2,
                }
            ),
            "utf-8",
        )
        import lessonlens.gateway as gw

        monkeypatch.setattr(gw, "RETRY_BACKOFF_S", (0.0, 0.0, 0.0))
        code = main(
            [
                "--config",
                str(bad_config),
                "ingest",
                "--lesson-id",
                "l2",
                "--duration-ms",
                "120000",
                "--transcript",
                str(FIXTURES_DIR / "transcript.jsonl"),
            ]
        )
        assert code == 2

    def test_dependency_error_message_on_stderr_free_stdout_json(self, workdir, capsys):
        _, config_path = workdir
        code = main(
            ["--config", str(config_path), "--json", "analyze", "--lesson-id", "nothing"]
        )
        assert code == 1


class TestGoldenFlow:
    def test_ingest_analyze_annotate_evaluate(self, workdir, capsys):
        tmp_path, config_path = workdir
        assert ingest_golden(config_path) == 0
        assert run(
            config_path,
            "analyze",
            "--lesson-id",
            "golden-osmosis",
            "--generated-at",
            "2025-06-02T00:00:00Z",
        ) == 0
        assert run(config_path, "annotate", "--lesson-id", "golden-osmosis") == 0
        assert run(config_path, "evaluate", "--lesson-id", "golden-osmosis") == 0
        out = capsys.readouterr().out
        assert "Grounding rate" in out

        store = tmp_path / "store" / "golden-osmosis"
        for name in ("timeline.json", "hotspots.json", "feedback.json", "annotations.json", "evaluation.json"):
            assert (store / name).exists()

    def test_rerun_changes_no_artifact_bytes(self, workdir):
        tmp_path, config_path = workdir
        ingest_golden(config_path)
        run(config_path, "analyze", "--lesson-id", "golden-osmosis",
            "--generated-at", "2025-06-02T00:00:00Z")
        run(config_path, "annotate", "--lesson-id", "golden-osmosis")

        store = tmp_path / "store" / "golden-osmosis"
        before = {
            name: (store / name).read_bytes()
            for name in ("timeline.json", "feedback.json", "annotations.json")
        }
        ingest_golden(config_path)
        run(config_path, "analyze", "--lesson-id", "golden-osmosis",
            "--generated-at", "2025-06-02T00:00:00Z")
        run(config_path, "annotate", "--lesson-id", "golden-osmosis")
        for name, data in before.items():
            assert (store / name).read_bytes() == data

    def test_index_build_and_recommend(self, workdir):
        tmp_path, config_path = workdir
        ingest_golden(config_path)
        run(config_path, "analyze", "--lesson-id", "golden-osmosis",
            "--generated-at", "2025-06-02T00:00:00Z")
        assert run(
            config_path,
            "index-build",
            "--clips",
            str(FIXTURES_DIR / "clips.csv"),
            "--out",
            str(tmp_path / "index"),
        ) == 0
        assert (tmp_path / "index" / "clips.json").exists()
        assert (tmp_path / "index" / "vectors.json").exists()
        assert run(
            config_path,
            "recommend",
            "--lesson-id",
            "golden-osmosis",
            "--index",
            str(tmp_path / "index"),
        ) == 0
        doc = json.loads((tmp_path / "store" / "golden-osmosis" / "recommendations.json").read_text())
        assert len(doc["entries"]) == 9

    def test_export_report(self, workdir, tmp_path):
        _, config_path = workdir
        ingest_golden(config_path)
        run(config_path, "analyze", "--lesson-id", "golden-osmosis",
            "--generated-at", "2025-06-02T00:00:00Z")
        run(config_path, "annotate", "--lesson-id", "golden-osmosis")
        out = tmp_path / "report.md"
        assert run(config_path, "export-report", "--lesson-id", "golden-osmosis",
                   "--out", str(out)) == 0
        text = out.read_text("utf-8")
        assert text.startswith("# Lesson report")
        assert "## Strengths" in text and "## Growth areas" in text

    def test_ingest_with_merged_tail_window(self, workdir, tmp_path):
        # 250 s lesson -> windows [0,120) and [120,250); the 130 s merged tail
        # must stay within the gateway's caption window limit
        _, config_path = workdir
        transcript = tmp_path / "short.jsonl"
        transcript.write_text(
            json.dumps(
                {"start_ms": 0, "end_ms": 4000, "speaker": "teacher", "text": "Quick check-in."}
            )
            + "\n",
            "utf-8",
        )
        assert run(
            config_path,
            "ingest",
            "--lesson-id",
            "tail-lesson",
            "--duration-ms",
            "250000",
            "--transcript",
            str(transcript),
        ) == 0
        timeline = json.loads(
            (tmp_path / "store" / "tail-lesson" / "timeline.json").read_text("utf-8")
        )
        assert [c["end_ms"] for c in timeline["captions"]] == [120000, 250000]

    def test_json_output_mode(self, workdir, capsys):
        _, config_path = workdir
        assert main(
            [
                "--config",
                str(config_path),
                "--json",
                "ingest",
                "--lesson-id",
                "golden-osmosis",
                "--duration-ms",
                "1800000",
                "--transcript",
                str(FIXTURES_DIR / "transcript.jsonl"),
            ]
        ) == 0
        out = capsys.readouterr().out.strip().splitlines()[-1]
        doc = json.loads(out)
        assert doc["lesson_id"] == "golden-osmosis"
        assert doc["windows"] == 15
