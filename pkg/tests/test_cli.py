"""Manifest parsing, report emission, exit-code discipline."""

from __future__ import annotations

import csv
import io

import pytest

from pertlab.cli import (FORMAT_VERSION, Manifest, TaskSpec, emit_csv,
                         emit_plot_data, emit_report, main, parse_manifest,
                         run_manifest, serialize_manifest)
from pertlab.errors import ManifestError
from pertlab.harness import RingSpec

REMARK = """
[manifest]
format-version = 1

[ring]
p = 5
vars = x, y, z
gens = x*y, x*z
D = 8

[task]
command = check-filter-regular
f = z
n_max = 4
seed = 0
"""

BOUND = """
[manifest]
format-version = 1

[ring]
p = 5
vars = x, y
D = auto

[ideals]
J = x, y

[task]
command = bound-n
f = x
J = J
n_max = 8
seed = 7
"""


def test_parse_manifest_fields():
    m = parse_manifest(BOUND)
    assert m.format_version == FORMAT_VERSION
    assert m.ring == RingSpec(5, ("x", "y"), (), None)
    assert m.ideals == (("J", ("x", "y")),)
    assert m.task.command == "bound-n"
    assert m.task.f == ("x",)
    assert m.task.j == "J"
    assert m.task.seed == 7


def test_round_trip_identity():
    for text in (REMARK, BOUND):
        m = parse_manifest(text)
        assert parse_manifest(serialize_manifest(m)) == m


def test_round_trip_with_range_and_epsilon():
    m = Manifest(
        1, RingSpec(5, ("x", "y"), ("x*y",), 9),
        (("J", ("x", "y")),),
        TaskSpec(command="verify", f=("x + y",), j="J", n_max=6,
                 n_range=None, n_single=3, samples=4, seed=5, delta=2,
                 claim="main", epsilon=("y^3",)))
    assert parse_manifest(serialize_manifest(m)) == m
    m2 = Manifest(1, None, (), TaskSpec(command="experiment",
                                        catalog="remark-2-4",
                                        n_range=(1, 6), samples=20, seed=42))
    assert parse_manifest(serialize_manifest(m2)) == m2


def test_manifest_errors():
    with pytest.raises(ManifestError):
        parse_manifest("[task]\ncommand = hilbert\n")  # no format-version
    with pytest.raises(ManifestError):
        parse_manifest("[manifest]\nformat-version = 1\n\n[task]\n"
                       "command = frobnicate\n")
    with pytest.raises(ManifestError):
        parse_manifest("not a manifest at all [")


def test_filter_regular_false_is_exit_zero():
    result = run_manifest(REMARK)
    assert result.exit_code() == 0
    rows = result.rows()
    assert rows[0]["status"] == "false"


def test_bound_run_values():
    result = run_manifest(BOUND)
    values = {row["n"]: row["value_orig"] for row in result.rows()}
    assert values == {"t": 1, "k": 1, "h": 1, "N": 2}
    assert result.resolved_D == 11


def test_violated_verdict_sets_exit_one():
    text = """
[manifest]
format-version = 1

[task]
command = verify
claim = main
catalog = node-branch
n_max = 6
epsilon = x^2
seed = 0
"""
    result = run_manifest(text)
    assert result.exit_code() == 1


def test_csv_reparse_matches_rows():
    result = run_manifest(BOUND)
    text = emit_csv(result)
    parsed = list(csv.DictReader(io.StringIO(text)))
    rows = result.rows()
    assert len(parsed) == len(rows)
    for got, want in zip(parsed, rows):
        for key, value in want.items():
            assert got[key] == str(value)


def test_formats_share_numeric_content():
    result = run_manifest(BOUND)
    table = emit_report(result, "table")
    csv_text = emit_report(result, "csv")
    for row in result.rows():
        assert str(row["value_orig"]) in table
        assert str(row["value_orig"]) in csv_text


def test_csv_deterministic_across_runs():
    a = emit_csv(run_manifest(BOUND))
    b = emit_csv(run_manifest(BOUND))
    assert a == b


def test_plot_data():
    text = """
[manifest]
format-version = 1

[ring]
p = 5
vars = x, y, z
gens = x*y, x*z
D = auto

[ideals]
J = x, y, z

[task]
command = hilbert
f = x + y, z
J = J
n_max = 3
seed = 0
"""
    result = run_manifest(text)
    plot = emit_plot_data(result)
    assert "gr-table\t0\t1" in plot
    assert "gr-table\t2\t0" in plot


def test_main_exit_codes(tmp_path, capsys):
    path = tmp_path / "bound.cfg"
    path.write_text(BOUND)
    assert main([str(path)]) == 0
    out = capsys.readouterr().out
    assert "bound-n" in out

    bad = tmp_path / "bad.cfg"
    bad.write_text("[manifest]\nformat-version = 1\n")
    assert main([str(bad)]) == 2
    assert main([str(tmp_path / "missing.cfg")]) == 2


def test_main_csv_out_file(tmp_path):
    path = tmp_path / "bound.cfg"
    path.write_text(BOUND)
    out = tmp_path / "report.csv"
    assert main([str(path), "--format", "csv", "--out", str(out)]) == 0
    content = out.read_text()
    assert content.startswith("claim,N,sample,n,")
