#!/usr/bin/env python3
"""
Test suite for the fdnorm CLI and SDK: end-to-end runs over fixtures/ and the exit-code contract
"""
import json

import pytest

from conftest import FIXTURES
from fdnorm_cli import EXIT_INPUT_ERROR, EXIT_OK, EXIT_SIZE_LIMIT, EXIT_VIOLATION, run_command
from fdnorm_sdk import FDAnalyzer, is_clean


def fx(name):
    return str(FIXTURES / name)


def run_json(capsys, *argv):
    code = run_command([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def test_closure(capsys):
    """Test closure of a key"""
    assert run_command(["closure", "--set", "A1", fx("single_key.fd")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "✅ A1+ = {A1, A2, A3}" in out
    assert "superkey" in out


def test_closure_accepts_comma_separated_sets(capsys):
    """Test comma separated --set"""
    code, report = run_json(capsys, "closure", "--set", "st,cr", fx("students.fd"))
    assert code == EXIT_OK
    assert report["closure"]["closure"] == ["cr", "rd", "st"]
    assert report["closure"]["superkey"] is False


def test_keys(capsys):
    """Test candidate keys"""
    code, report = run_json(capsys, "keys", fx("students.fd"))
    assert code == EXIT_OK
    assert report["candidate_keys"] == [["cid", "sid"]]
    assert report["prime_attributes"] == ["cid", "sid"]
    assert report["tool"] == "fdnorm"
    assert report["schema"]["minimal_cover"] == ["cid → cr", "{cr, st} → rd", "sid → st"]


def test_classify_single_table(capsys):
    """Test classification of Ω"""
    assert run_command(["classify", fx("single_key.fd")]) == EXIT_OK
    capsys.readouterr()
    code, report = run_json(capsys, "classify", fx("students.fd"))
    assert code == EXIT_VIOLATION
    assert report["classification"]["level"] == "1NF"


def test_classify_decompositions(capsys):
    """Test classification of decompositions"""
    code, report = run_json(
        capsys, "classify", "--decomposition", fx("students_key_table.dec"), fx("students.fd")
    )
    assert code == EXIT_VIOLATION
    assert report["classification"]["preserving"] is False
    assert report["classification"]["lost"] == ["{cr, st} → rd"]

    code, report = run_json(
        capsys, "classify", "-d", fx("key_chain_2nf.dec"), fx("key_chain.fd")
    )
    assert code == EXIT_VIOLATION
    assert report["classification"]["level"] == "2NF"
    assert report["precision"]["precise_2nf"] is True

    assert run_command(["classify", "-d", fx("key_chain_full_split.dec"), fx("key_chain.fd")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "✅ Normal form: 3NF" in out
    assert "❌ Precisely 2NF" in out


def test_decompose_precise_2nf(capsys):
    """Test the precise 2NF planner"""
    assert run_command(["decompose", "--target", "precise2nf", fx("no_transitivity.fd")]) == EXIT_OK
    assert "also in 3NF" in capsys.readouterr().out

    code, report = run_json(capsys, "decompose", "-t", "precise2nf", fx("minimal_overlap.fd"))
    assert code == EXIT_VIOLATION
    assert report["decomposition"] is None
    assert report["plan"]["witness"]["meeting"] == "{A3, A4} → A5"
    assert [p["name"] for p in report["plan"]["placements"]] == ["key-table", "meeting-point"]


def test_decompose_2nf_lists_rejected_variants(capsys):
    """Test the 2NF template with its rejected placements"""
    code, report = run_json(capsys, "decompose", "--target", "2nf", fx("shared_dependent.fd"))
    assert code == EXIT_OK
    assert report["case_analysis"]["raw_case"] == "4b"
    assert [r["variant"] for r in report["rejected_variants"]] == ["4a"]
    assert report["rejected_variants"][0]["failures"] == ["A2 → A3 lost"]
    assert report["verification"] == {"lossless": True, "preserving": True, "lost": []}


def test_decompose_output_round_trip(capsys, tmp_path):
    """Test --output and re-checking the written file"""
    target = tmp_path / "out" / "students_3nf.dec"
    assert run_command(["decompose", "-t", "3nf", "-o", str(target), fx("students.fd")]) == EXIT_OK
    assert "💾 Decomposition saved to" in capsys.readouterr().out
    assert target.read_text(encoding="utf-8").startswith("table R1: cid cr  # synthesis")

    code, report = run_json(capsys, "check", "-d", str(target), fx("students.fd"))
    assert code == EXIT_OK
    assert report["lossless"]["lossless"] is True
    assert report["instance_oracle"]["join"]["spurious_count"] == 0


def test_check_lossy_decomposition(capsys):
    """Test the chase and the instance oracle on a lossy decomposition"""
    code, report = run_json(
        capsys, "check", "--decomposition", fx("partition_no_key_table.dec"), fx("partition.fd")
    )
    assert code == EXIT_VIOLATION
    assert report["lossless"]["lossless"] is False
    assert report["preservation"]["preserved"] is True
    assert report["instance_oracle"]["join"]["spurious_count"] > 0


def test_check_verbose_prints_chase_trace(capsys):
    """Test --verbose chase trace"""
    assert run_command(["check", "-v", "-d", fx("key_chain_2nf.dec"), fx("key_chain.fd")]) == EXIT_OK
    assert "equates" in capsys.readouterr().out


def test_diagnose(capsys):
    """Test the chain pair verdict"""
    code, report = run_json(capsys, "diagnose", fx("minimal_overlap.fd"))
    assert code == EXIT_VIOLATION
    assert report["verdict"]["impossible"] is True
    assert report["chains"] == {
        "A1": [{"nodes": [["A1"], ["A3"]], "links": ["A1 → A3"]}],
        "A2": [{"nodes": [["A2"], ["A4"]], "links": ["A2 → A4"]}],
    }

    assert run_command(["diagnose", fx("no_transitivity.fd")]) == EXIT_OK
    assert "✅ No partially overlapping chains found" in capsys.readouterr().out


def test_diagnose_outside_assumptions(capsys):
    """Test the diagnosis of a single-attribute key"""
    assert run_command(["diagnose", fx("single_key.fd")]) == EXIT_INPUT_ERROR
    captured = capsys.readouterr()
    assert "❌ Assumption check failed" in captured.err
    assert "Assumption check failed" not in captured.out


def test_diagnose_meeting_point_inside_one_side(capsys, tmp_path):
    """Test a schema whose chain ends both follow from one key attribute"""
    schema = tmp_path / "one_side.fd"
    schema.write_text(
        "attributes: A1 A2 A3 A4 A5\nfd: A1 -> A3\nfd: A2 -> A3\nfd: A2 -> A4\nfd: A3 A4 -> A5\n",
        encoding="utf-8",
    )
    assert run_command(["diagnose", str(schema)]) == EXIT_OK
    assert "✅ No partially overlapping chains found" in capsys.readouterr().out
    code, report = run_json(capsys, "decompose", "-t", "precise2nf", str(schema))
    assert code == EXIT_OK
    assert report["plan"]["succeeded"] is True
    assert report["plan"]["impossibility"] is None


def test_json_output_is_deterministic(capsys):
    """Test repeated --json runs"""
    for argv in (
        ["diagnose", fx("students.fd")],
        ["decompose", "-t", "precise2nf", fx("students.fd")],
        ["check", "-d", fx("students_meeting_table.dec"), fx("students.fd"), "--seed", "4"],
    ):
        first = run_json(capsys, *argv)
        second = run_json(capsys, *argv)
        assert first == second


def test_input_errors(capsys, tmp_path):
    """Test exit code 2 on malformed input"""
    bad = tmp_path / "bad.fd"
    bad.write_text("fd: A -> B\n", encoding="utf-8")
    assert run_command(["keys", str(bad)]) == EXIT_INPUT_ERROR
    assert f"❌ {bad}:1:1: expected an 'attributes:' line" in capsys.readouterr().err

    assert run_command(["keys", str(tmp_path / "missing.fd")]) == EXIT_INPUT_ERROR
    assert run_command(["closure", "--set", "Z", fx("students.fd")]) == EXIT_INPUT_ERROR
    assert run_command(["check", "-d", fx("key_chain_missing.dec"), fx("key_chain.fd")]) == EXIT_INPUT_ERROR
    assert run_command(["decompose", "-t", "2nf", fx("single_key.fd")]) == EXIT_INPUT_ERROR
    assert run_command(["decompose", "-t", "4nf", fx("single_key.fd")]) == EXIT_INPUT_ERROR
    assert run_command([]) == EXIT_INPUT_ERROR


def test_config_errors(capsys, tmp_path):
    """Test exit code 2 on a bad config file"""
    config = tmp_path / "limits.json"
    config.write_text(json.dumps({"max_key_attrs": 4, "colour": "blue"}), encoding="utf-8")
    assert run_command(["keys", "--config", str(config), fx("students.fd")]) == EXIT_INPUT_ERROR


def test_size_limit(capsys):
    """Test exit code 3 when a search bound is exceeded"""
    assert run_command(["keys", "--max-attrs", "1", fx("students.fd")]) == EXIT_SIZE_LIMIT
    assert "Size limit exceeded" in capsys.readouterr().err


def test_version(capsys):
    """Test --version"""
    assert run_command(["--version"]) == EXIT_OK
    assert "fdnorm 0.1.0" in capsys.readouterr().out


def test_sdk_from_text():
    """Test the SDK without files"""
    analyzer = FDAnalyzer.from_text("attributes: A1 A2 A3 A4 A5\nfd: A1 -> A3\nfd: A2 -> A4\nfd: A3 A4 -> A5\n")
    report = analyzer.diagnose()
    assert report["command"] == "diagnose"
    assert not is_clean(report)
    with pytest.raises(ValueError):
        analyzer.closure("A9")
