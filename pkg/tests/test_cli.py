import json
import subprocess
import sys

import pytest

from bqkz import cli
from bqkz.reports import Report


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def test_gs_writes_component_table(tmp_path, capsys):
    out = tmp_path / "psi5.json"
    code, _ = run(["gs", "--sites", "5", "--x", "1", "--out", str(out)], capsys)
    assert code == 0
    obj = json.loads(out.read_text())
    assert obj["N"] == 5 and obj["tau"] == "symbolic"
    assert len(obj["components"]) == 10
    assert obj["values"]["4,5"] == "tau"


def test_gs_tau_one_values(capsys):
    code, text = run(["gs", "--sites", "5", "--tau", "1", "--x", "2"], capsys)
    assert code == 0
    values = json.loads(text)["values"]
    assert values["2,4"] == str(3 + 5 * 2 + 3 * 4)


def test_gs_csv(capsys):
    code, text = run(["gs", "--sites", "3", "--tau", "1", "--format", "csv"], capsys)
    assert code == 0
    assert text.splitlines()[0] == "positions,x_power,tau_power,coefficient"


def test_energy(capsys):
    code, text = run(["energy", "--sites", "4", "--x", "7/3", "--verify"], capsys)
    obj = json.loads(text)
    assert code == 0
    assert obj["E0"] == "-263/84"
    assert obj["eigenpair"]["pass"] is True


def test_scalar_and_overlap(capsys):
    code, text = run(["scalar", "--sites", "2", "--x", "2", "--alpha", "3"], capsys)
    assert code == 0 and json.loads(text)["value"] == "5"
    code, text = run(["scalar", "--sites", "4", "--tau", "general", "--x", "1", "--alpha", "1",
                      "--tau-value", "1"], capsys)
    assert code == 0
    code, text = run(["overlap", "--parts", "2,2", "--x", "1"], capsys)
    obj = json.loads(text)
    assert obj["value"] == "11" and obj["agrees"] is True


def test_tsasm_modes(capsys):
    assert run(["tsasm", "--m", "9", "--count-only"], capsys) == (0, "13654\n")
    code, text = run(["tsasm", "--m", "4"], capsys)
    assert json.loads(text)["display"] == "tau + t^2 + tau*t^2 + tau^2*t^2"
    code, text = run(["tsasm", "--m", "4", "--list"], capsys)
    assert text.count("mu=") == 4


def test_invalid_arguments(capsys):
    with pytest.raises(SystemExit):
        cli.main(["gs", "--sites", "5", "--x", "1/0"])
    with pytest.raises(SystemExit):
        cli.main(["gs", "--sites", "40"])
    with pytest.raises(SystemExit):
        cli.main(["energy", "--sites", "3", "--x", "0.5"])
    with pytest.raises(SystemExit):
        cli.main(["tsasm", "--m", "11"])


def test_check_report_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, text = run(["check", "--suite", "bqkz", "--max-sites", "4", "--seed", "7", "--trials", "5",
                          "--out", str(p)], capsys)
        assert code == 0 and text.startswith("PASS bqkz")
    assert paths[0].read_bytes() == paths[1].read_bytes()
    obj = json.loads(paths[0].read_text())
    for key in ("suite", "N", "seed", "trials", "pass", "counterexample", "code_version", "claim"):
        assert key in obj


def test_exit_code_follows_asserted_checks(monkeypatch, capsys):
    def failing(config):
        r = Report("broken", 1, None, 1, claim="none")
        r.fail({"why": "forced"})
        return [r]

    def observed(config):
        r = Report("observed", 1, None, 1, claim="none", observation=True)
        r.fail({"why": "recorded only"})
        return [r]

    monkeypatch.setitem(cli.SUITES, "shift", (failing, 1))
    assert cli.main(["check", "--suite", "shift"]) == 1
    monkeypatch.setitem(cli.SUITES, "shift", (observed, 1))
    assert cli.main(["check", "--suite", "shift"]) == 0


def test_every_suite_is_registered():
    expected = {"local", "exchange", "reflection", "bqkz", "parity", "psibar", "degrees", "mutations",
                "transfer", "eigenpair", "numeric", "log-derivative", "four-formulas", "degree-bound",
                "x0-spin-reversal", "nonnegativity", "scalar-products", "general-tau",
                "conjecture-overlaps", "susy", "tsasm", "conjecture-tsasm", "shift"}
    assert set(cli.SUITES) == expected


@pytest.mark.parametrize("suite,bound", [("local", 0), ("mutations", 3), ("conjecture-tsasm", 5),
                                         ("tsasm", 6), ("susy", 5), ("psibar", 4), ("numeric", 5)])
def test_small_suites_pass(suite, bound, capsys):
    assert cli.main(["check", "--suite", suite, "--max-sites", str(bound), "--trials", "2"]) == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bqkz", "tsasm", "--m", "5", "--count-only"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip() == "13"
