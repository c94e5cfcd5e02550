import json

import pytest

from d2dca.cli import main
from d2dca.suite import DEFAULT_SUITE, ConfigParse, parse_suite, run_attack_suite, run_entries


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


def test_default_suite_file_matches_builtin(pytestconfig):
    path = pytestconfig.rootpath / "configs" / "default_suite.json"
    assert json.loads(path.read_text()) == DEFAULT_SUITE


def test_default_suite_clean(pytestconfig):
    report = run_attack_suite(pytestconfig.rootpath / "configs" / "default_suite.json")
    assert report.scenarios >= 15
    assert report.unexpected_successes == []
    assert report.prediction_mismatches == []
    assert report.expected_not_observed == []
    assert {r["attack"] for r in report.residual_risks} == {"Cloner/within_T_silent"}
    assert report.exit_code == 0


def test_unexpected_success_sets_exit_code():
    entries = parse_suite({"scenarios": [
        {"kind": "PassiveEavesdropper", "variant": "correlated", "expect": "reject"}]})
    report = run_entries(entries)
    assert report.exit_code == 1
    assert len(report.unexpected_successes) == 1


@pytest.mark.parametrize("text", ["", "{}", "[]", '{"scenarios": []}', "not json",
                                  '{"scenarios": [{"kind": "Wizard"}]}',
                                  '{"scenarios": [{"kind": "Replayer", "variant": "M9"}]}',
                                  '{"scenarios": [{"kind": "Replayer", "variant": "M1", '
                                  '"expect": "maybe"}]}',
                                  '{"scenarios": [{"kind": "Replayer", "variant": "M1", '
                                  '"seeds": []}]}'])
def test_bad_suite_configs(tmp_path, text):
    with pytest.raises(ConfigParse):
        run_attack_suite(write(tmp_path, "s.json", text))


def test_missing_suite_file(tmp_path):
    with pytest.raises(ConfigParse):
        run_attack_suite(tmp_path / "missing.json")


def test_cli_attack_suite_exit_codes(tmp_path, capsys):
    ok = write(tmp_path, "ok.json", {"seeds": [1], "scenarios": [
        {"kind": "Replayer", "variant": "M3"},
        {"kind": "Cloner", "variant": "within_T_silent"}]})
    assert main(["attack-suite", "--config", str(ok)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["residual_risks"][0]["attack"] == "Cloner/within_T_silent"
    bad = write(tmp_path, "bad.json", {"scenarios": [
        {"kind": "PassiveEavesdropper", "variant": "correlated", "expect": "reject"}]})
    assert main(["attack-suite", "--config", str(bad)]) == 1
    assert main(["attack-suite", "--config", str(write(tmp_path, "e.json", ""))]) == 2


def test_cli_simulate_honest(tmp_path, pytestconfig, capsys):
    out = tmp_path / "t.jsonl"
    cfg = pytestconfig.rootpath / "configs" / "honest.json"
    assert main(["simulate", "--scenario", str(cfg), "--transcript", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)["summary"]
    assert summary["auth_successes"] == 4
    first = out.read_text()
    main(["simulate", "--scenario", str(cfg), "--transcript", str(out)])
    assert out.read_text() == first


def test_cli_simulate_rounds_expectation(tmp_path):
    good = write(tmp_path, "g.json", {"scenario_seed": 1, "ca_rounds_expected": 32})
    bad = write(tmp_path, "b.json", {"scenario_seed": 1, "ca_rounds_expected": 31})
    assert main(["simulate", "--scenario", str(good)]) == 0
    assert main(["simulate", "--scenario", str(bad)]) == 1


def test_cli_simulate_attacks(tmp_path, capsys):
    risk = write(tmp_path, "c.json", {"scenario_seed": 2, "attacker": {
        "kind": "Cloner", "variant": "within_T_silent", "clone_delay": 3000}})
    assert main(["simulate", "--scenario", str(risk)]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"]["residual_risk"]
    mitm = write(tmp_path, "m.json", {"attacker": {"kind": "MitmMutator", "variant": "M2"}})
    assert main(["simulate", "--scenario", str(mitm)]) == 0
    novar = write(tmp_path, "n.json", {"attacker": {"kind": "Replayer"}})
    assert main(["simulate", "--scenario", str(novar)]) == 2


@pytest.mark.parametrize("text", ["{", '{"session": {"T": -1}}', '{"attacker": {"kind": "X"}}'])
def test_cli_simulate_config_errors(tmp_path, text):
    assert main(["simulate", "--scenario", str(write(tmp_path, "x.json", text))]) == 2


def test_cli_vectors_match_golden(tmp_path, pytestconfig):
    assert main(["vectors", "--emit", str(tmp_path)]) == 0
    golden = pytestconfig.rootpath / "tests" / "golden" / "wire_vectors.json"
    assert (tmp_path / "wire_vectors.json").read_text() == golden.read_text()


def test_cli_enroll(tmp_path, capsys):
    reg = tmp_path / "reg.json"
    assert main(["enroll", "--registry", str(reg), "--edge-id", "0a0b", "--seed", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    stored = json.loads(reg.read_text())[out["edge_id_hash"]]
    assert stored["e_init"] == out["e_init"] and stored["draw_index"] == 1
    assert main(["enroll", "--registry", str(reg), "--edge-id", "0a0b"]) == 2
    assert main(["enroll", "--registry", str(reg), "--edge-id", "0c"]) == 0
    assert len(json.loads(reg.read_text())) == 2
    assert main(["enroll", "--registry", str(reg), "--edge-id", "zz"]) == 2


def test_parallel_and_serial_runs_agree():
    entries = parse_suite({"seeds": [0, 1, 2, 3], "scenarios": [
        {"kind": "Replayer", "variant": "M7"}, {"kind": "MitmMutator", "variant": "M5"},
        {"kind": "Cloner", "variant": "within_T_silent"}]})
    assert run_entries(entries, workers=1).to_dict() == run_entries(entries, workers=8).to_dict()
