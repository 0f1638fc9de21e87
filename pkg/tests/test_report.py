"""Report rendering: delimited files plus charts."""

from __future__ import annotations

import csv

from layernet.report import REPORT_FILES, write_report


def test_write_report_produces_all_files(tmp_path, service_customer):
    written = write_report(service_customer, tmp_path)
    assert written == list(REPORT_FILES)
    for name in written:
        path = tmp_path / name
        assert path.exists() and path.stat().st_size > 0


def test_rules_csv_contents(tmp_path, service_customer):
    write_report(service_customer, tmp_path)
    with open(tmp_path / "rules.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["network", "member", "transmit", "send", "forward", "acquire", "receive", "total"]
    by_member = {(r[0], r[1]): r for r in rows[1:]}
    assert ("custA", "d") in by_member
    assert by_member[("custA", "d")][-1] == "4"


def test_stages_csv_contents(tmp_path, service_customer):
    write_report(service_customer, tmp_path)
    with open(tmp_path / "stages.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["machine", "unfused_stages", "fused_stages", "flattened_rules", "assumptions"]
    m1 = next(r for r in rows[1:] if r[0] == "m1")
    assert m1[1:4] == ["8", "4", "36"]
    assert "all-links-external:custA" in m1[4]


def test_properties_csv_contents(tmp_path, enterprise_vpn):
    write_report(enterprise_vpn, tmp_path)
    with open(tmp_path / "properties.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["name", "kind", "network", "verdict", "witnesses", "first_witness"]
    assert len(rows) == 1 + 8
    assert all(r[3] == "holds" for r in rows[1:])


def test_csv_output_is_deterministic(tmp_path, enterprise_vpn):
    a_dir = tmp_path / "a"
    b_dir = tmp_path / "b"
    a_dir.mkdir()
    b_dir.mkdir()
    write_report(enterprise_vpn, a_dir)
    write_report(enterprise_vpn, b_dir)
    for name in ("rules.csv", "stages.csv", "properties.csv"):
        assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()


def test_charts_are_png(tmp_path, service_customer):
    write_report(service_customer, tmp_path)
    for name in ("rule_counts.png", "stage_counts.png"):
        header = (tmp_path / name).read_bytes()[:8]
        assert header == b"\x89PNG\r\n\x1a\n"
