from __future__ import annotations

import json


from gstspace.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def result(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    return json.loads(out)["result"]


def test_check(capsys):
    assert result(capsys, "check", "-p", "1,1/2,1/3")["in_gst"] is True
    r = result(capsys, "check", "-p", "1,0,1")
    assert r["in_ind"] and not r["in_inf"]
    assert result(capsys, "check", "-p", "0.3,0.3,0.3")["in_inf"] is False
    # decimals are read exactly in exact mode
    assert result(capsys, "check", "-p", "0.3,0.3,0.3")["p"] == ["3/10"] * 3


def test_check_bad_input(capsys):
    assert run(capsys, "check", "-p", "1,x,2")[0] == 2
    assert run(capsys, "check")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_find_and_check_roundtrip(capsys, tmp_path):
    r = result(capsys, "find", "3", "--family", "theta")
    assert r["points"][0]["theta"] == "1/3" and r["points"][0]["in_gst"]
    out = tmp_path / "b.json"
    assert main(["find", "4", "--family", "boundary", "--output", str(out)]) == 0
    pts = json.loads(out.read_text())["result"]["points"]
    assert all(p["in_gst"] for p in pts)
    pfile = tmp_path / "p.json"
    pfile.write_text(json.dumps(pts[0]))
    assert result(capsys, "check", "--file", str(pfile))["in_gst"] is True


def test_find_surface(capsys):
    r = result(capsys, "find", "8", "--family", "surface", "--count", "10", "--seed", "7")
    assert len(r["points"]) == 10
    for p in r["points"]:
        c = result(capsys, "check", "--mode", "float", "-p", ",".join(repr(v) for v in p["p"]))
        assert c["in_gst"]


def test_inertia(capsys):
    r = result(capsys, "inertia", "3")
    assert r["ldl"]["n_pos"] == 1 and r["ldl"]["n_neg"] == 1 and r["ldl"]["n_zero"] == 1
    r = result(capsys, "inertia", "4", "--method", "ldl")
    assert (r["ldl"]["n_pos"], r["ldl"]["n_neg"], r["ldl"]["n_zero"]) == (1, 2, 1)
    r = result(capsys, "inertia", "6", "--method", "both")
    assert r["agree"] and r["eigen"]["n_pos"] >= 2 and r["eigen"]["n_neg"] >= 2


def test_hessian_dump(capsys):
    r = result(capsys, "hessian", "4")
    assert r["scaled_by"] == "2^{n-2}" and r["X_scaled"][1][1] == 3
    code, out, _ = run(capsys, "hessian", "4", "--format", "csv", "--scaled")
    assert out.splitlines()[1] == "0,0,1,0"


def test_ftheta(capsys):
    r = result(capsys, "ftheta", "10", "--roots")
    roots = [x["root"] for x in r["roots"]]
    assert len(roots) == 3
    assert any(abs(x - 0.100499) < 1e-5 for x in roots)
    assert any(abs(x - 0.86659) < 1e-5 for x in roots)
    assert result(capsys, "ftheta", "3", "--roots")["roots"][0]["root"] == "1/3"
    code, out, _ = run(capsys, "ftheta", "4", "--emit-grid", "--grid", "4", "--format", "csv")
    assert out.splitlines()[0] == "theta,f" and out.splitlines()[1] == "0.0,1.0"


def test_segment_component_homotopy(capsys):
    r = result(capsys, "segment", "-p", "1,1/2,1/3", "-q", "0,1/2,2/3")
    assert r["kind"] == "AllInIndNotGST"
    r = result(capsys, "component", "-p", "1,1/2,1/3", "--with-involution")
    assert r["label"]["sign"] == -r["involution_label"]["sign"]
    r = result(capsys, "homotopy", "-p", "1,1/2,1/3", "--steps", "4")
    assert all(s["psi"] == "0" for s in r["samples"])


def test_path_jsonl(capsys):
    code, out, _ = run(capsys, "path", "--boundary", "8", "--seed", "11")
    assert code == 0
    lines = [json.loads(x) for x in out.splitlines()]
    trailer = lines[-1]["trailer"]
    assert trailer["kind"] == "SurfacePath" and trailer["seed"] == 11
    assert trailer["waypoints"] == len(lines) - 1
    code, out, _ = run(capsys, "path", "-p", "1,1/2,1/3", "-q", "0,1/2,2/3")
    assert json.loads(out.splitlines()[-1])["trailer"]["kind"] == "FailureCertificate"


def test_path_timeout_exit_code(capsys):
    code, out, _ = run(capsys, "path", "--boundary", "8", "--seed", "11", "--budget", "2")
    assert code == 4


def test_simulate(capsys):
    r = result(capsys, "simulate", "--rounds", "2000", "--seed", "3")
    assert r["counts"]["rounds"] == 2000
    assert len(r["independence_z"]) == 18
    r = result(capsys, "simulate", "-p", "0,0,0", "--rounds", "100")
    assert r["counts"]["effects"] == [0, 0, 0]


def test_simulate_spec_file(capsys, tmp_path):
    f = tmp_path / "spec.json"
    f.write_text(json.dumps({"n": 3, "r": "1/2", "p": ["1/3", "1/9", "1/27"], "q": ["1/3", "1/9", "1/27"]}))
    r = result(capsys, "simulate", "--spec", str(f), "--rounds", "1000", "--seed", "1")
    assert r["config"]["spec"]["p"] == ["1/3", "1/9", "1/27"]
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "simulate", "--spec", str(bad))[0] == 2


def test_manifest_digest_stable(capsys):
    argv = ("simulate", "--rounds", "500", "--seed", "9")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    ma, mb = json.loads(a)["manifest"], json.loads(b)["manifest"]
    assert ma["config_digest"] == mb["config_digest"]
    assert ma["seeds"] == [9] and ma["command"][:2] == ["gstspace", "simulate"]
    assert json.loads(a)["result"] == json.loads(b)["result"]


def test_csv_rejected_where_unsupported(capsys):
    assert run(capsys, "inertia", "4", "--format", "csv")[0] == 2
