import json
import subprocess
import sys

import pytest

from maxbrane import cli, k3n


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_timing(text):
    obj = json.loads(text)
    obj.pop("elapsed_s")
    return obj


def test_hilbert_betti(capsys):
    code, out, _ = run(["hilbert", "betti", "--b2", "22", "--n", "2", "--json"], capsys)
    assert code == 0 and json.loads(out)["result"]["total"] == 324


def test_comessatti_witness(tmp_path, capsys):
    f = tmp_path / "w.json"
    f.write_text(json.dumps({"sigma": [[1, 1], [0, -1]]}))
    code, out, _ = run(["comessatti", str(f), "--json"], capsys)
    assert code == 0 and json.loads(out)["result"]["lambda"] == 1


def test_lattice_u(capsys):
    code, out, _ = run(["lattice", "--expr", "U", "--json"], capsys)
    res = json.loads(out)["result"]
    assert code == 0 and res["gram"] == [[0, 1], [1, 0]] and res["discriminant"]["trivial"]


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["comessatti", str(bad)], capsys)[0] == 2
    assert run(["comessatti", str(tmp_path / "missing.json")], capsys)[0] == 2
    assert run(["lattice", "--nope"], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2
    f = tmp_path / "id.json"
    f.write_text(json.dumps({"n": 3, "sigma": [[int(i == j) for j in range(23)] for i in range(23)]}))
    code, _, err = run(["k3n", "obstruct", str(f)], capsys)
    assert code == 2 and "admissible" in err


def test_invariant_failure_maps_to_3(monkeypatch, capsys):
    from maxbrane.errors import InvariantError

    def boom(args):
        raise InvariantError("sentinel")

    monkeypatch.setattr(cli, "cmd_lattice", boom)
    assert run(["lattice", "--expr", "U"], capsys)[0] == 3


def test_determinism_and_human_agreement(tmp_path, capsys):
    f = tmp_path / "s.json"
    f.write_text(json.dumps(k3n.representative(4, 3).to_json()))
    argv = ["k3n", "obstruct", str(f)]
    _, a, _ = run(argv + ["--json"], capsys)
    _, b, _ = run(argv + ["--json"], capsys)
    assert strip_timing(a) == strip_timing(b)
    _, human, _ = run(argv, capsys)
    res = json.loads(a)["result"]
    for key in ("case", "tau", "lambda_Q", "witness_equals"):
        line = next(l for l in human.splitlines() if l.strip().startswith(key + " "))
        val = line.split(None, 1)[1].strip()
        assert val == (res[key] if isinstance(res[key], str) else json.dumps(res[key]))


def test_symplectic_and_smith(capsys):
    code, out, _ = run(["k3n", "symplectic", "--n", "3", "--json"], capsys)
    assert code == 0 and json.loads(out)["result"]["fixed_total"] == 256
    code, out, _ = run(["k3n", "symplectic", "--og6", "--json"], capsys)
    assert json.loads(out)["result"]["ambient_total"] == 1920
    code, out, _ = run(["smith", "--example", "hexagon-antipodal", "--kalinin", "2", "--json"], capsys)
    assert code == 0 and json.loads(out)["result"]["kalinin"]["d"]["d2"]["0"] == [1]
    assert run(["k3n", "symplectic"], capsys)[0] == 2


def test_fuzz_seeded(monkeypatch, capsys):
    monkeypatch.setenv("MAXBRANE_THREADS", "1")
    _, a, _ = run(["k3n", "fuzz", "--n", "4", "--count", "6", "--seed", "7", "--json"], capsys)
    monkeypatch.setenv("MAXBRANE_THREADS", "2")
    _, b, _ = run(["k3n", "fuzz", "--n", "4", "--count", "6", "--seed", "7", "--json"], capsys)
    ra, rb = strip_timing(a)["result"], strip_timing(b)["result"]
    assert ra == rb and ra["certified"] == 6


def test_console_script_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "maxbrane.cli", "hilbert", "betti", "--b2", "1", "--n", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "total" in proc.stdout
