import csv
import io
import json
import math
import subprocess
import sys

import pytest

from thermoshift import certify_one_sided
from thermoshift.cli import RunConfig, build_parser, run
from thermoshift.io import InputError, dumps, load_graph, load_potential, potential_from_dict

GOLDEN = (1 + math.sqrt(5)) / 2


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    f = {
        "full": write(tmp_path / "full.json", {"vertices": ["a", "b"],
                                               "edges": [["a", "a"], ["a", "b"], ["b", "a"], ["b", "b"]]}),
        "golden": write(tmp_path / "golden.json", {"vertices": ["a", "b"], "edges": [["a", "a"], ["a", "b"], ["b", "a"]]}),
        "loop": write(tmp_path / "loop.json", {"vertices": ["a"], "edges": [["a", "a"]]}),
        "cycle": write(tmp_path / "cycle.json", {"vertices": ["a", "b"], "edges": [["a", "b"], ["b", "a"]]}),
        "period2": write(tmp_path / "p2.json", {"vertices": ["a", "b", "c"],
                                                "edges": [["a", "b"], ["a", "c"], ["b", "a"], ["c", "a"]]}),
        "psi": write(tmp_path / "psi.json", {"window": [-1, 1], "values": {
            "a a a": 0.1, "a a b": 0.2, "a b a": -0.3, "b a a": 0.5, "b a b": 0.05}}),
    }
    f["dir"] = tmp_path
    return f


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    args = build_parser().parse_args(list(argv))
    params = {k: getattr(args, k) for k in ("manifest", "delta", "n_max", "k_max", "max_len", "s_star",
                                            "v_prime", "out", "format")}
    code = run(RunConfig(args.command, args.graph, args.potential, params), out, err)
    return code, out.getvalue(), err.getvalue()


def test_analyze_full_shift(files):
    code, out, _ = call("analyze", "--graph", files["full"])
    rep = json.loads(out)
    assert code == 0 and rep["transitive"] is True and rep["period"] == 1


def test_analyze_periodic(files):
    rep = json.loads(call("analyze", "--graph", files["period2"])[1])
    assert rep["period"] == 2 and rep["classes"] == [["a"], ["b", "c"]]


def test_equilibrium_golden(files):
    code, out, _ = call("equilibrium", "--graph", files["golden"])
    rep = json.loads(out)
    assert code == 0
    assert rep["pressure"] == pytest.approx(math.log(GOLDEN), abs=1e-12)
    assert set(rep) >= {"lambda", "pressure", "h", "nu", "pi", "P"}
    assert rep["P"]["b"] == {"a": pytest.approx(1.0, abs=1e-12)}


def test_reals_have_17_digits(files):
    out = call("equilibrium", "--graph", files["golden"])[1]
    assert '"lambda": 1.6180339887498' in out
    line = next(s for s in out.splitlines() if '"lambda"' in s)
    digits = line.split(": ")[1].rstrip(",").replace(".", "").lstrip("0")
    assert len(digits) == 17


def test_reports_are_deterministic(files):
    assert call("gibbs-check", "--graph", files["golden"])[1] == call("gibbs-check", "--graph", files["golden"])[1]


def test_reduce_round_trip(files, tmp_path):
    target = tmp_path / "phi.json"
    code, _, _ = call("reduce", "--graph", files["golden"], "--potential", files["psi"], "--out", str(target))
    assert code == 0
    g = load_graph(files["golden"])
    phi = load_potential(target, g)
    assert phi.window == (0, 2) and certify_one_sided(phi)


def test_two_sided_equilibrium_equals_reduced(files, tmp_path):
    target = tmp_path / "phi.json"
    call("reduce", "--graph", files["golden"], "--potential", files["psi"], "--out", str(target))
    a = json.loads(call("equilibrium", "--graph", files["golden"], "--potential", files["psi"])[1])
    b = json.loads(call("equilibrium", "--graph", files["golden"], "--potential", str(target))[1])
    assert a["pressure"] == pytest.approx(b["pressure"], abs=1e-12)


def test_gibbs_check_with_s_star(files):
    code, out, _ = call("gibbs-check", "--graph", files["golden"], "--s-star", "a", "--max-len", "4")
    rep = json.loads(out)
    assert code == 0 and rep["s_star"] == ["a"] and rep["holds"]
    code, _, err = call("gibbs-check", "--graph", files["golden"], "--s-star", "z")
    assert code == 1 and "--s-star" in err


def test_mixing_csv_golden(files):
    code, out, _ = call("mixing", "--graph", files["golden"], "--n-max", "2", "--k-max", "5", "--delta", "0.05")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert list(rows[0]) == ["n", "k", "wb", "bound", "pass"]
    assert len(rows) == 10
    assert all(r["pass"] == "true" for r in rows)


def test_mixing_flags_two_cycle(files):
    code, out, _ = call("mixing", "--graph", files["cycle"], "--n-max", "1", "--k-max", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 2
    assert all(float(r["wb"]) == 1.0 and r["pass"] == "false" for r in rows)


def test_mixing_delta_range(files):
    assert call("mixing", "--graph", files["golden"], "--delta", "0.5")[0] == 1


def test_mixing_threads_env(files, monkeypatch):
    base = call("mixing", "--graph", files["golden"], "--k-max", "4")[1]
    monkeypatch.setenv("THERMOSHIFT_THREADS", "3")
    assert call("mixing", "--graph", files["golden"], "--k-max", "4")[1] == base
    monkeypatch.setenv("THERMOSHIFT_THREADS", "zero")
    assert call("mixing", "--graph", files["golden"])[0] == 1


def test_factorize_period2(files):
    code, out, _ = call("factorize", "--graph", files["period2"])
    rep = json.loads(out)
    assert code == 0 and rep["p"] == 2
    assert rep["mu_Xi"] == pytest.approx([0.5, 0.5], abs=1e-12)
    assert set(rep) >= {"p", "classes", "mu_Xi", "entropy_check", "pressure_check"}


def test_truncate_manifest(files):
    d = files["dir"]
    man = write(d / "man.json", {"graphs": ["loop.json", "golden.json", "full.json"]})
    code, out, _ = call("truncate", "--manifest", man)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [float(r["pressure"]) for r in rows] == pytest.approx([0, math.log(GOLDEN), math.log(2)], abs=1e-12)
    assert [r["vertices"] for r in rows] == ["1", "2", "2"]
    single = write(d / "one.json", ["golden.json"])
    assert len(call("truncate", "--manifest", single)[1].strip().splitlines()) == 2
    bad = write(d / "bad.json", ["full.json", "golden.json"])
    assert call("truncate", "--manifest", bad)[0] == 1


def test_input_errors_name_the_field(files, tmp_path):
    code, _, err = call("analyze", "--graph", str(tmp_path / "missing.json"))
    assert code == 1 and "cannot read" in err
    broken = write(tmp_path / "broken.json", {"vertices": ["a"]})
    code, _, err = call("analyze", "--graph", broken)
    assert code == 1 and "'edges'" in err
    spaced = write(tmp_path / "spaced.json", {"vertices": ["a b"], "edges": []})
    assert "whitespace" in call("analyze", "--graph", spaced)[2]
    pot = write(tmp_path / "pot.json", {"window": [0, 1], "values": {"a a": 1.0}})
    code, _, err = call("equilibrium", "--graph", files["golden"], "--potential", pot)
    assert code == 1 and "'values'" in err
    assert call("equilibrium")[0] == 1


def test_potential_loader_rejects_non_numbers(files):
    g = load_graph(files["golden"])
    with pytest.raises(InputError, match="finite number"):
        potential_from_dict({"window": [0, 0], "values": {"a": "x", "b": 1}}, g)
    with pytest.raises(InputError, match="window"):
        potential_from_dict({"window": [0], "values": {}}, g)


def test_dumps_formats():
    text = dumps({"x": 0.1, "n": 3, "ok": True, "v": [1.0, 2.5], "none": None})
    assert '"x": 0.10000000000000001' in text
    assert '"v": [1, 2.5]' in text
    assert json.loads(text)["ok"] is True


def test_console_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "thermoshift.cli", "analyze", "--graph", files["loop"]],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["vertices"] == 1
