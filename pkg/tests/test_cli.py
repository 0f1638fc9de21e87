"""Command line surface: outputs, exit codes, determinism."""

from __future__ import annotations

import pytest

from layernet import cli, scenarios, topofile


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_scenario_ok(capsys):
    code, out, err = run(capsys, "validate", "scenario:service-customer")
    assert code == 0
    assert "ok" in out
    assert err == ""


def test_validate_reports_violations(capsys, tmp_path):
    # moving e onto d's machine parses fine but clashes structurally
    text = scenarios.scenario_text("service-customer").replace(
        "member e network custA machine m4", "member e network custA machine m1"
    )
    bad = tmp_path / "bad.topo"
    bad.write_text(text)
    code, out, err = run(capsys, "validate", str(bad))
    assert code == 1
    assert "machine-member-clash" in out


def test_validate_file_and_scenario_agree(capsys, tmp_path):
    path = tmp_path / "copy.topo"
    path.write_text(scenarios.scenario_text("enterprise-basic"))
    code_a, out_a, _ = run(capsys, "validate", str(path))
    code_b, out_b, _ = run(capsys, "validate", "scenario:enterprise-basic")
    assert code_a == code_b == 0
    assert out_a == out_b


def test_trace_walkthrough(capsys):
    code, out, err = run(
        capsys,
        "trace",
        "scenario:service-customer",
        "--from",
        "d",
        "--net",
        "custA",
        "--link",
        "4",
    )
    assert code == 0
    assert "outcome Delivered(e)" in out
    assert "provenance custA/de via PCd4e1" in out
    assert out.count("WireHop") == 2


def test_trace_header_override_can_drop(capsys):
    code, out, _ = run(
        capsys,
        "trace",
        "scenario:service-customer",
        "--from",
        "d",
        "--net",
        "custA",
        "--link",
        "4",
        "--header",
        "dst=d",
    )
    assert code == 1
    assert "Dropped" in out


def test_trace_unknown_member_usage_error(capsys):
    code, out, err = run(
        capsys,
        "trace",
        "scenario:service-customer",
        "--from",
        "zz",
        "--net",
        "custA",
        "--link",
        "4",
    )
    assert code == 2
    assert "error:" in err


def test_trace_bad_header_syntax(capsys):
    code, _, err = run(
        capsys,
        "trace",
        "scenario:service-customer",
        "--from",
        "d",
        "--net",
        "custA",
        "--link",
        "4",
        "--header",
        "nonsense",
    )
    assert code == 2
    assert "error:" in err


def test_trace_runs_are_byte_identical(capsys):
    args = ("trace", "scenario:enterprise-vpn", "--from", "E", "--net", "enterprise", "--link", "1")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_verify_all_checks(capsys):
    code, out, _ = run(capsys, "verify", "scenario:enterprise-vpn")
    assert code == 0
    assert out.count(": holds") == 8


def test_verify_single_property(capsys):
    code, out, _ = run(capsys, "verify", "scenario:enterprise-vpn", "--property", "filter-waypoint")
    assert code == 0
    assert out.strip() == "filter-waypoint [waypoint @ enterprise]: holds"


def test_verify_unknown_property(capsys):
    code, _, err = run(capsys, "verify", "scenario:enterprise-vpn", "--property", "nope")
    assert code == 2
    assert "no check named" in err


def test_fuse_with_derived_facts(capsys):
    code, out, _ = run(
        capsys,
        "fuse",
        "scenario:service-customer",
        "--machine",
        "m1",
        "--assume",
        "all-links-external:custA",
        "--assume",
        "all-links-primitive:service",
    )
    assert code == 0
    assert "machine m1: 4 stage(s)" in out
    assert "unfused stages: 8" in out
    assert "holds" in out


def test_fuse_no_check_skips_equivalence(capsys):
    code, out, _ = run(
        capsys,
        "fuse",
        "scenario:service-customer",
        "--machine",
        "m1",
        "--no-check",
    )
    assert code == 0
    assert "fusion-equivalence" not in out


def test_fuse_contradicted_fact_exits_one(capsys):
    code, out, _ = run(
        capsys,
        "fuse",
        "scenario:service-customer",
        "--machine",
        "m1",
        "--assume",
        "all-links-primitive:custA",
    )
    assert code == 1
    assert "invalid assumption" in out


def test_fuse_malformed_fact_usage_error(capsys):
    code, _, err = run(
        capsys,
        "fuse",
        "scenario:service-customer",
        "--machine",
        "m1",
        "--assume",
        "garbage",
    )
    assert code == 2
    assert "error:" in err


def test_export_byte_identical(capsys):
    _, first, _ = run(capsys, "export", "scenario:service-customer", "--machine", "m3")
    _, second, _ = run(capsys, "export", "scenario:service-customer", "--machine", "m3")
    assert first == second
    assert "machine m3" in first
    assert "inLink=3" in first


def test_scenario_summary_and_emit(capsys):
    code, out, _ = run(capsys, "scenario", "service-hipaa")
    assert code == 0
    assert "valid" in out
    code, out, _ = run(capsys, "scenario", "service-hipaa", "--emit")
    assert code == 0
    assert topofile.parse(out) == scenarios.scenario("service-hipaa")


def test_unknown_scenario_exits_two(capsys):
    code, _, err = run(capsys, "scenario", "nope")
    assert code == 2
    assert "error:" in err
    code, _, err = run(capsys, "validate", "scenario:nope")
    assert code == 2


def test_missing_topology_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", str(tmp_path / "absent.topo"))
    assert code == 2
    assert "error:" in err


def test_parse_error_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.topo"
    bad.write_text("network x {\n  field ???\n}\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2
    assert "2:" in err


def test_report_writes_files(capsys, tmp_path):
    out_dir = tmp_path / "rep"
    code, out, _ = run(capsys, "report", "scenario:enterprise-vpn", "--out", str(out_dir))
    assert code == 0
    for name in ("rules.csv", "stages.csv", "properties.csv", "rule_counts.png", "stage_counts.png"):
        assert name in out
        assert (out_dir / name).exists()


def test_no_arguments_usage(capsys):
    code, _, err = run(capsys)
    assert code == 2


def test_console_script_entrypoint():
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "layernet.cli", "validate", "scenario:enterprise-basic"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
