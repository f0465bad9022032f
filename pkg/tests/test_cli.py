import json

import pytest

from pinsum.cli import main, parse_catalog


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_consum_m1_m1(capsys):
    rc, out, _ = run(capsys, "consum", "data:M1.json", "data:M1.json")
    assert rc == 0
    assert out.strip().splitlines()[-1] == "alpha=2 beta=0 gamma=0 delta=0 delta'=0 delta''=0"


def test_tor_staircase(capsys):
    rc, out, _ = run(capsys, "tor", "data:F.json", "data:F.json", "--max-i", "7", "--format", "json")
    assert rc == 0
    entries = json.loads(out)["entries"]
    assert len([e for e in entries if e]) == 15


def test_corr_mixed(capsys):
    rc, out, _ = run(capsys, "--format", "json", "corr", "data:M4_minus_M3M3.json")
    assert rc == 0
    obj = json.loads(out)
    assert (obj["alpha"], obj["beta"], obj["gamma"], obj["delta"]) == ("2", "-2", "-2", "0")


def test_gysin_commands(capsys):
    rc, out, _ = run(capsys, "gysin", "verify", "data:M3_M3.json")
    assert (rc, out.strip()) == (0, "exact; Q^2 lemma holds")
    rc, out, _ = run(capsys, "gysin", "massey", "data:minus_M4.json", "--op", "phi1", "--power", "2", "--class", "z")
    assert (rc, out.strip()) == (0, "phi1(z) = v^2 in degree -9")


def test_reconstruct_and_hm_consum(capsys):
    rc, out, _ = run(capsys, "reconstruct", "data:sigma_13_21_34_hm.json")
    assert rc == 0
    assert out.strip().endswith("HM = F[U] + F[U]/U^4<9> + F[U]/U^5<11> + F[U]/U^6<11>")
    rc, out, _ = run(capsys, "hm-consum", "data:M3_hm.json", "data:M3_hm.json")
    assert rc == 0
    assert out.strip() == "F[U]<-1> + F[U]/U^3<4> + F[U]/U^3<4> + F[U]/U^3<4> + F[U]/U^3<9>"


def test_resolve_and_dualize(capsys):
    rc, out, _ = run(capsys, "resolve", "data:qv_cyclic.json", "--steps", "3")
    assert rc == 0
    assert "d_2 = [['Q', '0', '0'], ['V', 'Q', '0'], ['0', 'V', 'Q']]" in out
    rc, out, _ = run(capsys, "dualize", "data:M2.json", "--format", "json")
    assert rc == 0 and "dims" in json.loads(out)


@pytest.mark.parametrize("argv, code", [
    (["corr", "/nonexistent.json"], 2),
    (["tor", "data:F.json", "data:F.json", "--max-i", "-1"], 2),
    (["tor", "data:F.json", "data:F.json", "--window", "5", "5"], 4),
    (["gysin", "massey", "data:minus_M2.json", "--op", "phi4", "--class", "z"], 5),
])
def test_exit_codes(capsys, argv, code):
    rc, out, err = run(capsys, *argv)
    assert rc == code
    report = json.loads(err)
    assert "error" in report and "message" in report


def test_unknown_catalog(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"catalog": "Bogus"}')
    rc, _, err = run(capsys, "corr", str(p))
    assert rc == 2
    assert json.loads(err)["error"] == "UnknownCatalogEntry"


def test_window_env(capsys, monkeypatch):
    monkeypatch.setenv("PINSUM_WINDOW", "3 1")
    rc, _, err = run(capsys, "tor", "data:F.json", "data:F.json")
    assert rc == 4


def test_deterministic_output(capsys):
    outs = [run(capsys, "consum", "data:M3.json", "data:M3.json", "--format", "both")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_parse_catalog():
    assert str(parse_catalog("-M2")) == "-M2"
    assert str(parse_catalog("M 3")) == "M3"


def test_repro(capsys):
    rc, out, _ = run(capsys, "repro")
    lines = out.strip().splitlines()
    assert rc == 0
    assert len(lines) == 14 and all(line.startswith("[PASS]") for line in lines)
