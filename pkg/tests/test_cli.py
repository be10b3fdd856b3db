import json
import os
import subprocess
import sys

import pytest

from mvadder.cli import main, parse_cap
from mvadder.engine import worst_case_stimulus


def run_cli(args):
    return main(args)


def test_parse_cap():
    assert parse_cap("2fF") == pytest.approx(2e-15)
    assert parse_cap("0.5pF") == pytest.approx(0.5e-12)
    assert parse_cap("3e-15") == pytest.approx(3e-15)
    import argparse

    with pytest.raises(argparse.ArgumentTypeError):
        parse_cap("two farads")


def test_verify_cells_exit_zero(capsys):
    for cell in ("qfa1", "qfa2", "bfa1", "bfa2", "bfa2x2"):
        assert run_cli(["verify", "--cell", cell]) == 0
    out = capsys.readouterr().out
    assert "OK" in out


def test_verify_cpa(capsys):
    assert run_cli(["verify", "--cell", "cpa", "--base", "qfa2", "--digits", "2"]) == 0
    assert run_cli(["--seed", "5", "verify", "--cell", "cpa", "--base", "bfa2",
                    "--digits", "4", "--vectors", "300"]) == 0


def test_sta_json_output(capsys):
    assert run_cli(["sta", "--cell", "qfa2", "--cl", "2fF",
                    "--from", "Cin", "--to", "Cout,Sum"]) == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["arrivals_ps"]["Cout"] == 24.0
    assert [a["kind"] for a in blob["critical_path"]] == ["mux2", "inv"]


def test_sim_with_trace_export(tmp_path, capsys):
    stim_path = tmp_path / "stim.json"
    worst_case_stimulus("carry_to_carry", "qfa2", 0.9).save(stim_path)
    trace_path = tmp_path / "trace.csv"
    energy_path = tmp_path / "energy.csv"
    assert run_cli(["sim", "--cell", "qfa2", "--cl", "2fF",
                    "--stimulus", str(stim_path),
                    "--trace-out", str(trace_path),
                    "--energy-out", str(energy_path)]) == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["final_levels"] == {"Cout": 0, "Sum": 3}
    assert blob["total_energy_j"] > 0
    assert trace_path.read_text().startswith("time_ps,net,level,voltage")
    assert energy_path.read_text().startswith("time_ps,net,joules")


def test_compare_writes_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert run_cli(["compare", "--configs", "qfa2@0.9,bfa2x2@0.45",
                    "--cl", "2fF", "--out", str(out)]) == 0
    rows = json.loads(out.read_text())
    assert [r["config"] for r in rows] == ["qfa2@0.9", "bfa2x2@0.45"]
    csv_out = tmp_path / "report.csv"
    assert run_cli(["compare", "--configs", "qfa2@0.9", "--out", str(csv_out)]) == 0
    assert csv_out.read_text().startswith("config,kind,")


def test_dump_netlist_roundtrip(tmp_path, capsys):
    out = tmp_path / "qfa1.json"
    assert run_cli(["dump-netlist", "--cell", "qfa1", "--cl", "2fF",
                    "--out", str(out)]) == 0
    from mvadder.netlist import load_netlist, to_json, validate

    c = load_netlist(out)
    assert validate(c) == []
    assert to_json(c) == json.loads(out.read_text())


def test_usage_error_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(["verify", "--cell", "nosuch"])
    assert exc.value.code == 2
    # runtime input problems also map to 2
    assert run_cli(["sim", "--cell", "qfa2", "--stimulus", "/nonexistent.json"]) == 2


def test_bad_library_exit_two(tmp_path, capsys):
    lib = tmp_path / "lib.json"
    lib.write_text(json.dumps({"inv": {"bogus_key": 1}}))
    assert run_cli(["--lib", str(lib), "verify", "--cell", "qfa2"]) == 2


def test_model_error_exit_three(tmp_path, capsys):
    # threshold above a vdd/3 carry-inverter supply: non-functional gate
    lib = tmp_path / "lib.json"
    lib.write_text(json.dumps({"inv": {"threshold_voltage_v": 0.35}}))
    assert run_cli(["--lib", str(lib), "verify", "--cell", "qfa1"]) == 3


def test_custom_library_changes_timing(tmp_path, capsys):
    lib = tmp_path / "lib.json"
    lib.write_text(json.dumps({"inv": {"drive_resistance_ohm": 20000.0}}))
    assert run_cli(["--lib", str(lib), "sta", "--cell", "qfa2", "--cl", "2fF",
                    "--from", "Cin", "--to", "Cout"]) == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["arrivals_ps"]["Cout"] == 44.0  # 3 + (1 + 20k*2fF)


@pytest.mark.slow
def test_fallback_mode_produces_identical_report(tmp_path):
    """The pure-Python kernel path (env flag) must reproduce the numba
    report byte for byte."""
    from mvadder.report import compare, parse_config_spec, rows_to_json

    configs = [parse_config_spec(s, 2e-15) for s in ("qfa2@0.9", "bfa2x2@0.45")]
    expected = rows_to_json(compare(configs))

    out = tmp_path / "report.json"
    env = dict(os.environ, MVADDER_DISABLE_NUMBA="1")
    proc = subprocess.run(
        [sys.executable, "-m", "mvadder.cli", "compare",
         "--configs", "qfa2@0.9,bfa2x2@0.45", "--cl", "2fF", "--out", str(out)],
        env=env, capture_output=True, text=True, timeout=300,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text() == expected
