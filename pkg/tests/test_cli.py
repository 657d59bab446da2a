import csv
import io
import json
import shutil

import pytest

from pzone.cli import bench, bench_csv, main, read_property
from pzone.samples import fixture_path


def run_cli(capsys, *args):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def test_check_json_result(capsys):
    code, out, _ = run_cli(capsys, "check", fixture_path("bounded_loop"), "--reach", "l1", "--mode", "auto", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"] == ["0 < p & p <= 5"]
    assert doc["termination"] == "Complete"
    assert doc["mode_report"]["bounds"] == {"x": 5, "y": 1}
    assert set(doc) == {"property", "mode_report", "result", "stats", "termination"}


def test_check_cycle_empty(capsys):
    code, out, _ = run_cli(capsys, "check", fixture_path("shrinking_loop"), "--cycle", "l0", "--mode", "auto")
    assert code == 0
    assert "result:\n  false" in out


def test_check_cap_exit_code(capsys):
    code, out, _ = run_cli(capsys, "check", fixture_path("bounded_loop"), "--reach", "l1", "--mode", "none", "--max-states", "50")
    assert code == 2
    assert "CapReached" in out


def test_check_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.pta"
    bad.write_text("clocks x;\nloc l0 { on a when x < q goto l0; }\ninit l0;\n")
    code, out, err = run_cli(capsys, "check", bad, "--reach", "l0")
    assert code == 1 and out == ""
    assert f"{bad}:2:24:" in err


def test_check_missing_file_and_unknown_location(tmp_path, capsys):
    code, _, err = run_cli(capsys, "check", tmp_path / "absent.pta", "--reach", "l0")
    assert code == 1 and err
    code, _, err = run_cli(capsys, "check", fixture_path("bounded_loop"), "--reach", "l7")
    assert code == 1 and "l7" in err


def test_check_requires_one_property(capsys):
    with pytest.raises(SystemExit) as info:
        main(["check", str(fixture_path("bounded_loop"))])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main(["check", str(fixture_path("bounded_loop")), "--reach", "l1", "--cycle", "l0"])


def test_json_output_is_deterministic(capsys):
    args = ("check", fixture_path("equality_guard"), "--reach", "l1", "--json", "--validate")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second
    assert json.loads(first)["validation"]["counterexamples"] == []


def test_seed_from_environment(capsys, monkeypatch):
    args = ("check", fixture_path("bounded_loop"), "--reach", "l1", "--json", "--validate")
    monkeypatch.setenv("PZONE_SEED", "9")
    code, out, _ = run_cli(capsys, *args)
    assert code == 0 and json.loads(out)["validation"]["counterexamples"] == []
    monkeypatch.setenv("PZONE_SEED", "nine")
    with pytest.raises(SystemExit):
        main([str(a) for a in args])


def test_dot_export(tmp_path, capsys):
    dot = tmp_path / "g.dot"
    code, _, _ = run_cli(capsys, "check", fixture_path("bounded_loop"), "--reach", "l1", "--dot", dot)
    assert code == 0
    text = dot.read_text()
    assert text.startswith("digraph") and "0 < p & p <= 5" in text


def test_liveness_flag_silences_warning(capsys, tmp_path):
    model = tmp_path / "lower.pta"
    model.write_text(
        "clocks x; params p;\nloc l0 [accepting] { on a when x >= p && x <= 3 reset {x} goto l0; }\ninit l0;\n"
    )
    _, out, _ = run_cli(capsys, "check", model, "--cycle", "l0", "--json")
    assert "warnings" in json.loads(out)["mode_report"]
    _, out, _ = run_cli(capsys, "check", model, "--cycle", "l0", "--json", "--liveness-l-side")
    assert "warnings" not in json.loads(out)["mode_report"]


def test_read_property_directive():
    assert read_property("# property: reach l1\nclocks x;") == ("reach", ("l1",))
    assert read_property("# property: cycle l0, l2\n") == ("cycle", ("l0", "l2"))
    assert read_property("clocks x;") is None


def test_bench_empty_directory(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "bench", tmp_path)
    assert code == 0
    assert out.strip().splitlines() == ["model,property,none_time,none_status,auto_time,auto_status"]


def test_bench_small_directory(tmp_path, capsys):
    for name in ("bounded_loop", "full_reset"):
        shutil.copy(fixture_path(name), tmp_path / f"{name}.pta")
    out_csv = tmp_path / "out.csv"
    code, out, _ = run_cli(capsys, "bench", tmp_path, "--timeout", "1", "--csv", out_csv)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert [r[0] for r in rows[1:]] == ["bounded_loop", "full_reset", "mean", "normalized mean"]
    by_name = {r[0]: r for r in rows[1:]}
    assert by_name["bounded_loop"][3] == "T.O." and by_name["bounded_loop"][2] == "1.000"
    assert by_name["bounded_loop"][5] == "Complete"
    assert by_name["full_reset"][3] == "Complete"
    assert out_csv.read_text() == out


def test_bench_rows_and_aggregates():
    rows = [
        {"model": "a", "property": "reach l1", "none_time": 4.0, "none_status": "T.O.", "auto_time": 1.0, "auto_status": "Complete"},
        {"model": "b", "property": "reach l1", "none_time": 1.0, "none_status": "Complete", "auto_time": 2.0, "auto_status": "Complete"},
    ]
    lines = bench_csv(rows).splitlines()
    assert lines[-2] == "mean,,2.500,,1.500,"
    assert lines[-1] == "normalized mean,,0.750,,0.625,"
