import json
import subprocess
import sys

import pytest

from sixnodal.cli import main


def run_cli(args):
    proc = subprocess.run([sys.executable, "-m", "sixnodal.cli", *args],
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def test_usage_error_exit_2():
    code, _, _ = run_cli(["bogus-subcommand"])
    assert code == 2


def test_orbit_json_matches_tables():
    code, out, _ = run_cli(["lattice", "orbit", "--kind", "rho",
                            "--count", "3", "--json"])
    assert code == 0
    data = json.loads(out)
    assert data["data"]["classes"] == [[3, -2], [7, -4], [29, -16]]
    assert data["data"]["g_pairings"] == [6, 18, 78]


def test_deg_fano_json():
    code, out, _ = run_cli(["schubert", "deg-fano", "--ambient", "5", "--json"])
    assert code == 0
    data = json.loads(out)
    assert data["data"]["integral"] == 45
    code, out, _ = run_cli(["schubert", "deg-fano", "--ambient", "4", "--json"])
    assert json.loads(out)["data"]["integral"] == 27


def test_represent_subcommand():
    code, out, _ = run_cli(["lattice", "represent", "--n", "-10", "--json"])
    assert code == 0
    data = json.loads(out)
    assert data["data"]["status"] == "witness"
    assert data["data"]["square"] == -10


def test_chamber_subcommand():
    code, out, _ = run_cli(["lattice", "chamber", "--x", "12", "--y", "-5",
                            "--json"])
    data = json.loads(out)
    assert data["data"]["chamber"] == [0]


def test_transfer_failure_exit_1():
    code, _, err = run_cli(["lattice", "transfer", "--gram", "[[4,3],[3,7]]"])
    assert code == 1


def test_svg_emission(tmp_path):
    out_path = tmp_path / "cones.svg"
    code, out, _ = run_cli(["lattice", "svg", "--range", "2",
                            "--out", str(out_path)])
    assert code == 0
    svg = out_path.read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<line") == 7       # five rays plus two isotropic edges
    # four labeled chambers between the outermost drawn rays
    for label in ("C-2", "C-1", "C0", "C1"):
        assert f">{label}<" in svg


def test_svg_figure_one_configuration(tmp_path):
    out_path = tmp_path / "fig1.svg"
    code, _, _ = run_cli(["lattice", "svg", "--range", "1",
                          "--out", str(out_path)])
    assert code == 0
    svg = out_path.read_text()
    # two chambers: the nef cones of the two basic models
    assert ">C0<" in svg and ">C-1<" in svg and ">C1<" not in svg


def test_instance_roundtrip_and_checks(tmp_path):
    inst_path = tmp_path / "inst.json"
    code, _, _ = run_cli(["instance", "new", "--seed", "2",
                          "--out", str(inst_path)])
    assert code == 0
    code, out, _ = run_cli(["instance", "check", str(inst_path), "--json"])
    assert code == 0
    data = json.loads(out)
    assert all(c["pass"] for c in data["checks"])


def test_surf27_counts():
    code, out, _ = run_cli(["surf27", "enumerate", "--json"])
    data = json.loads(out)
    assert data["data"]["line_classes"] == 27
    assert data["data"]["disjoint_sextuples"] == 72
    assert data["data"]["double_sixes"] == 36


def test_segre_identity_both_variants():
    _, out_c, _ = run_cli(["segre", "identity", "--variant", "cyclic", "--json"])
    _, out_p, _ = run_cli(["segre", "identity", "--variant", "printed", "--json"])
    holds_c = json.loads(out_c)["data"]["relation_holds"]
    holds_p = json.loads(out_p)["data"]["relation_holds"]
    assert holds_c != holds_p


def test_main_entry_in_process(tmp_path, capsys):
    # the console entry point works without a subprocess as well
    code = main(["lattice", "orbit", "--kind", "alpha", "--count", "2",
                 "--json"])
    out = capsys.readouterr().out
    assert code == 0
    assert json.loads(out)["data"]["g_pairings"] == [24, 48]
