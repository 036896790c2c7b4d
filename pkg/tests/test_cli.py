import json



def test_link_hopf(run_cli):
    code, recs, err = run_cli("link", "--pair", "hopf")
    assert code == 0
    (rec,) = recs
    assert rec["schema"] == 1 and rec["command"] == "link"
    assert rec["value"] == 1 and rec["residual"] < 1e-3
    assert len(rec["config_hash"]) == 16
    assert "[link]" in err


def test_link_pair_gauss_map_uses_r3_calibration(run_cli, config_path):
    code, recs, _ = run_cli("link", "--pair", "torus-link-2", "--method", "gauss-map")
    assert code == 0 and recs[0]["value"] == 2
    assert json.loads(config_path.read_text())["signs"] == {"3": 1}


def test_calibrate_is_idempotent(run_cli, config_path):
    code, first, _ = run_cli("calibrate")
    assert code == 0
    text = config_path.read_text()
    code, second, _ = run_cli("calibrate", "--n", 4)
    assert code == 0
    assert config_path.read_text() == text
    assert first[0]["reused"] is False and second[0]["reused"] is True
    assert first[0]["value"] == second[0]["value"] == 1
    assert json.loads(text)["global_sign"] == -1


def test_torus_link_and_reflections(run_cli):
    _, base, _ = run_cli("link", "--n", 4)
    _, refl, _ = run_cli("link", "--n", 4, "--iota2-reflected")
    assert base[0]["value"] == 1
    assert refl[0]["value"] == -1


def test_explicit_config_flag(run_cli, tmp_path):
    other = tmp_path / "other.json"
    code, _, _ = run_cli("--config", other, "calibrate", "--n", 3)
    assert code == 0 and json.loads(other.read_text())["signs"] == {"3": 1}


def test_degree_all_methods(run_cli):
    code, recs, _ = run_cli("degree", "--map", "circle-power--2")
    assert code == 0
    assert [r["inputs"]["method"] for r in recs] == ["regular", "simplicial", "kronecker"]
    assert {r["value"] for r in recs} == {-2}


def test_degree_singular_preimage_exit_code(run_cli):
    code, _, _ = run_cli("degree", "--map", "complex-square", "--method", "regular", "--point=0,0")
    assert code == 2
    code, recs, _ = run_cli("degree", "--map", "complex-square", "--method", "regular", "--point=0,0", "--jitter")
    assert code == 0 and recs[0]["value"] == 2


def test_unknown_map_exit_code(run_cli):
    code, recs, _ = run_cli("degree", "--map", "no-such-map")
    assert code == 2 and recs == []


def test_blowup(run_cli):
    code, recs, _ = run_cli("blowup", "--map", "reversing-diffeo-4d", "--resolution", 9)
    assert code == 0
    rec = recs[0]
    assert rec["det_A"] > 0
    assert all(r >= 1.4 for r in rec["forward_ratios"] + rec["inverse_ratios"])


def test_blowup_singular_jacobian(run_cli):
    code, _, _ = run_cli("blowup", "--map", "kink")
    assert code == 2


def test_extend(run_cli):
    code, recs, _ = run_cli("extend", "--resolution", 101, "--t", "0.05,0.01")
    assert code == 0
    rec = recs[0]
    assert rec["q"] == 3.0
    assert rec["relative_trace_errors"][0] < 0.05


def test_goodpoint(run_cli):
    code, recs, _ = run_cli("goodpoint", "--map", "kink", "--resolution", 129)
    assert code == 0 and recs[0]["value"] == "bad"


def test_experiment_on_identity(run_cli):
    code, recs, _ = run_cli("experiment", "jacobian-sign", "--map", "identity-4d")
    assert code == 0
    rec = recs[0]
    assert rec["jacobian_sign"] == 1
    assert rec["linking"] == [rec["base"]] * 3


def test_checks_quick(run_cli):
    code, recs, _ = run_cli("checks", "--quick")
    assert code == 0
    assert all(r["value"] is True for r in recs)


def test_catalog_listing(capsys):
    from linkdeg import cli

    assert cli.main(["catalog"]) == 0
    names = capsys.readouterr().out.split()
    assert "hopf" in names and "reflection-<n>d" in names
