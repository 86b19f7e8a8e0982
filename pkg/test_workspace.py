"""
Tests for workspace file lookup, saved reports and replay

Run with: pytest test_workspace.py -v
"""

import json

import pytest

from config import TOOL_VERSION
from errors import InputError
from workspace import Report, Workspace, file_hash, replay


@pytest.fixture
def ws(tmp_path):
    return Workspace(str(tmp_path))


def write(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data))
    return path


class TestWorkspace:
    """Tests for Workspace"""

    def test_resolve_order(self, ws, tmp_path):
        nested = write(tmp_path / "groups" / "g.json", {"name": "g"})
        assert ws.resolve("g.json", "groups") == nested.resolve()

        top = write(tmp_path / "g.json", {"name": "top"})
        assert ws.resolve("g.json", "groups") == top.resolve()
        assert ws.resolve(str(top)) == top

    def test_missing_file(self, ws):
        with pytest.raises(InputError, match="file not found"):
            ws.resolve("nothing.json", "groups")

    def test_files(self, ws, tmp_path):
        write(tmp_path / "spans" / "b.json", {})
        write(tmp_path / "spans" / "a.json", {})
        (tmp_path / "spans" / "notes.txt").write_text("x")
        assert [p.name for p in ws.files("spans")] == ["a.json", "b.json"]
        assert ws.files("universes") == []

    def test_env_root(self, tmp_path, monkeypatch):
        monkeypatch.setenv("NORMCALC_WORKSPACE", str(tmp_path))
        assert Workspace().root == tmp_path.resolve()


class TestReports:
    """Tests for Report and replay()"""

    def test_save_and_load(self, tmp_path):
        report = Report(["group", "list"], {}, "out\n", 0, 0.1)
        report.save(tmp_path / "r.json")
        loaded = Report.load(tmp_path / "r.json")
        assert loaded == report
        assert loaded.tool_version == TOOL_VERSION

    def test_missing_report(self, tmp_path):
        with pytest.raises(InputError, match="not found"):
            Report.load(tmp_path / "none.json")

    def test_malformed_report(self, tmp_path):
        (tmp_path / "bad.json").write_text("[1, 2")
        with pytest.raises(InputError):
            Report.load(tmp_path / "bad.json")
        write(tmp_path / "odd.json", {"command": [], "colour": "blue"})
        with pytest.raises(InputError):
            Report.load(tmp_path / "odd.json")

    def test_replay_match(self, tmp_path):
        source = write(tmp_path / "ix.json", {"group": "C2"})
        report = Report(["x"], {str(source): file_hash(source)}, "true\n", 0)
        outcome = replay(report, lambda argv: (0, "true\n"))
        assert outcome.matches
        assert outcome.stale_inputs == []

    def test_replay_output_mismatch(self, tmp_path):
        report = Report(["x"], {}, "true\n", 0)
        assert not replay(report, lambda argv: (1, "false\n")).matches
        assert not replay(report, lambda argv: (0, "true")).matches

    def test_stale_inputs_never_match(self, tmp_path):
        source = write(tmp_path / "ix.json", {"group": "C2"})
        deleted = write(tmp_path / "gone.json", {})
        report = Report(["x"], {str(source): file_hash(source), str(deleted): file_hash(deleted)}, "true\n", 0)
        write(source, {"group": "C4"})
        deleted.unlink()

        calls = []
        outcome = replay(report, lambda argv: calls.append(argv) or (0, "true\n"))
        assert not outcome.matches
        assert outcome.stale_inputs == sorted([str(source), str(deleted)])
        assert calls == [["x"]]
