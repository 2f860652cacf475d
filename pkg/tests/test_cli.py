import json

import pytest

from revecc.cli import main


def run_cli(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_gen_add_modp_header(capsys):
    rc, out, _ = run_cli(capsys, "gen", "add_modp", "--p", "11")
    assert rc == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == "qubits 12"
    rc, out, _ = run_cli(capsys, "gen", "add_modp", "--p", "11", "--uncontrolled")
    assert "qubits 10" in out.splitlines()


def test_gen_usage_errors(capsys):
    assert run_cli(capsys, "gen", "adder", "--n", "0")[0] == 2
    assert run_cli(capsys, "gen", "adder")[0] == 2
    assert run_cli(capsys, "gen", "bogus")[0] == 2
    assert run_cli(capsys, "gen", "add_modp", "--p", "12")[0] == 2
    assert run_cli(capsys)[0] == 2


def test_gen_point_add_sidecar(tmp_path, capsys):
    out = tmp_path / "pa.txt"
    rc, _, _ = run_cli(capsys, "gen", "point_add", "--curve", "P-192", "-o", str(out), "--no-netlist")
    assert rc == 0 and not out.exists()
    side = json.loads((tmp_path / "pa.txt.regs.json").read_text())
    assert side["qubits"] == 1754
    assert side["circuit"]["curve"] == "P-192"


def test_gen_then_sim(tmp_path, capsys):
    net = tmp_path / "addc.txt"
    assert run_cli(capsys, "gen", "add_const_modp", "--p", "11", "--c", "5", "-o", str(net))[0] == 0
    rc, out, _ = run_cli(capsys, "sim", str(net), "--set", "x=9", "--set", "dirty=5")
    assert rc == 0
    assert "x=0x3" in out.splitlines()
    assert "dirty=0x5" in out.splitlines()


def test_sim_usage_errors(tmp_path, capsys):
    net = tmp_path / "neg.txt"
    run_cli(capsys, "gen", "neg_modp", "--p", "11", "-o", str(net))
    assert run_cli(capsys, "sim", str(net), "--set", "nope=1")[0] == 2
    assert run_cli(capsys, "sim", str(net), "--set", "x=ff")[0] == 2
    assert run_cli(capsys, "sim", str(net), "--set", "x")[0] == 2
    assert run_cli(capsys, "sim", str(tmp_path / "missing.txt"))[0] == 2


def test_sim_contract_violation(tmp_path, capsys):
    net = tmp_path / "inc.txt"
    net.write_text("qubits 2\nx 0\n")
    (tmp_path / "inc.txt.regs.json").write_text(json.dumps(
        {"qubits": 2, "registers": [{"name": "a", "qubits": [0], "role": "clean"},
                                        {"name": "b", "qubits": [1], "role": "input"}]}))
    rc, out, err = run_cli(capsys, "sim", str(net))
    assert rc == 1 and "a=0x1" in out and "violated" in err


def test_check_modarith_deterministic(capsys):
    argv = ("check", "modarith", "--seed", "7", "--p", "13")
    rc1, out1, _ = run_cli(capsys, *argv)
    rc2, out2, _ = run_cli(capsys, *argv)
    assert rc1 == rc2 == 0 and out1 == out2
    assert out1.strip().endswith("checks passed")


def test_check_kaliski(capsys):
    rc, out, _ = run_cli(capsys, "check", "kaliski", "--p", "11")
    assert rc == 0
    lines = out.splitlines()
    i = lines.index("x=8")
    assert lines[i + 5].split() == ["k", "0", "1", "2", "3", "4", "5", "6", "7", "7"]
    assert lines[i + 6].split() == ["ell", "0", "0", "0", "0", "0", "0", "0", "0", "1"]
    j = lines.index("x=7")
    assert lines[j + 6].split()[-1] == "3"


def test_check_point_add_f11(capsys):
    rc, out, _ = run_cli(capsys, "check", "point-add", "--curve", "F11")
    assert rc == 0 and "2/2 checks passed" in out


def test_check_intarith(capsys):
    rc, out, _ = run_cli(capsys, "check", "intarith", "--max-n", "3")
    assert rc == 0


def test_resources_csv_and_json(capsys):
    rc, out, _ = run_cli(capsys, "resources", "--n", "8,12")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,qubits,toffoli,depth,cnot,not,curve,shor_toffoli,shor_depth"
    assert len(lines) == 3
    rc, out, _ = run_cli(capsys, "resources", "--n", "16", "--format", "json")
    doc = json.loads(out)
    assert doc["rows"][0]["qubits"] == 9 * 16 + 8 + 10
    assert run_cli(capsys, "resources")[0] == 2


def test_resources_nist_qubits(capsys):
    rc, out, _ = run_cli(capsys, "resources", "--curves", "P-192,P-256", "--no-depth")
    rows = [l.split(",") for l in out.strip().splitlines()[1:]]
    assert [int(r[1]) for r in rows] == [1754, 2330]
    assert [r[3] for r in rows] == ["-1", "-1"]


def test_fit(capsys, tmp_path):
    rc, out, _ = run_cli(capsys, "resources", "--n", "8,12,16", "--no-depth")
    csv = tmp_path / "r.csv"
    csv.write_text(out)
    rc, out, _ = run_cli(capsys, "fit", "--csv", str(csv))
    doc = json.loads(out)
    assert rc == 0 and [p["n"] for p in doc["points"]] == [8, 12, 16]
    assert run_cli(capsys, "fit", "--n", "16")[0] == 2


def test_curve_add(capsys):
    rc, out, _ = run_cli(capsys, "curve-add", "--curve", "F11", "--x1", "5", "--y1", "2")
    assert rc == 0
    assert "circuit=(0x8, 0x3)" in out and out.strip().endswith("match")
    rc, out, _ = run_cli(capsys, "curve-add", "--curve", "F11", "--x1", "5", "--y1", "2", "--ctrl", "0")
    assert rc == 0 and "circuit=(0x5, 0x2)" in out
    assert run_cli(capsys, "curve-add", "--curve", "F11", "--x1", "1", "--y1", "1")[0] == 2


def test_curve_file(tmp_path, capsys):
    f = tmp_path / "toy.curve"
    f.write_text("name toy\np b\na 1\nb 6\ngx 2\ngy 7\nr d\n")
    rc, out, _ = run_cli(capsys, "curve-add", "--curve-file", str(f), "--x1", "5", "--y1", "2")
    assert rc == 0 and "curve=toy" in out


@pytest.mark.parametrize("tag,extra", [
    ("mul_modp", ["--strategy", "dbl_add"]), ("squ_modp", []), ("inv_modp", []),
    ("dbl_modp", []), ("sub_modp", []), ("sub_const_modp", ["--c", "3"]), ("neg_modp", ["--controlled"]),
])
def test_gen_modular_tags(tag, extra, tmp_path, capsys):
    out = tmp_path / "c.txt"
    assert run_cli(capsys, "gen", tag, "--p", "13", "-o", str(out), *extra)[0] == 0
    assert out.read_text().splitlines()[1].startswith("qubits ")


def test_check_reverse(capsys):
    rc, out, _ = run_cli(capsys, "check", "reverse", "--samples", "64")
    assert rc == 0 and "2/2 checks passed" in out
