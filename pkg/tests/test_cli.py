import json

import pytest

from eightvsos.cli import (config_from_dict, config_to_dict, load_config, main,
                           run_compute, sample_config)
from eightvsos.errors import ParseError, ValidationError
from eightvsos.verification import DEFAULT_THRESHOLDS

MINIMAL = {"L": 2, "p": 0.1, "gamma": [0.5, 0], "tau": [0.3, 0.1],
           "x": [[0.2, 0.1], [-0.4, 0.2]], "mu": [[0.6, -0.1], [-0.1, 0.3]]}


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def test_minimal_config_defaults(tmp_path):
    cfg = load_config(write(tmp_path, MINIMAL))
    assert cfg.seed == 0 and cfg.draws == 20 and cfg.method == "enum" and cfg.index == 0
    assert cfg.tolerances == DEFAULT_THRESHOLDS
    assert cfg.x0 is None and cfg.tau == 0.3 + 0.1j


def test_length_mismatch_names_field():
    with pytest.raises(ValidationError) as exc:
        config_from_dict(dict(MINIMAL, x=[[0.1, 0]]))
    assert exc.value.field == "x" and "x" in str(exc.value)


@pytest.mark.parametrize("change,field", [
    ({"p": 1.5}, "p"), ({"L": 0}, "L"), ({"method": "qr"}, "method"),
    ({"tolerances": {"identity": -1}}, "tolerances"), ({"gamma": "0.5"}, "gamma"),
    ({"index": 5}, "index"), ({"extra": 1}, "extra"),
])
def test_validation_errors(change, field):
    with pytest.raises(ValidationError) as exc:
        config_from_dict(dict(MINIMAL, **change))
    assert exc.value.field == field


def test_parse_error_has_line(tmp_path):
    with pytest.raises(ParseError) as exc:
        load_config(write(tmp_path, '{\n  "L": 2,\n  "p": \n}'))
    assert exc.value.line == 4


def test_round_trip():
    cfg = config_from_dict(dict(MINIMAL, x0=[0.1, 0.2], seed=3, tolerances={"ratio": 1e-9}))
    doc = config_to_dict(cfg)
    again = config_from_dict(json.loads(json.dumps(doc)))
    assert again == cfg and config_to_dict(again) == doc


def test_methods_agree():
    cfg = config_from_dict(sample_config(2, 4))
    doc = run_compute(cfg, ["enum", "repA", "repD"])
    assert doc["passed"]
    devs = [r["residual"] for r in doc["results"] if r["check"].startswith("agreement")]
    assert len(devs) == 3 and max(devs) <= 1e-8


def test_rep_with_index(tmp_path, capsys):
    path = write(tmp_path, sample_config(3, 1))
    assert main(["compute", "--config", path, "--method", "enum,repA", "--index", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["index"] == 2
    a, b = (complex(*doc["values"][m]) for m in ("enum", "repA"))
    assert abs(a - b) <= 1e-8 * abs(a)


def test_collision_fails(tmp_path, capsys):
    doc = sample_config(2, 0)
    doc["x0"] = doc["x"][0]
    path = write(tmp_path, doc)
    assert main(["compute", "--config", path, "--method", "repA"]) == 1
    out = json.loads(capsys.readouterr().out)
    assert "SingularDenominator" in out["results"][0]["error"]


def test_unsampled_aux_are_filled():
    cfg = config_from_dict(MINIMAL)
    doc = run_compute(cfg, ["repD", "enum"])
    assert doc["passed"] and "x0" in doc["resolved"]


def test_verify_all_passes(tmp_path):
    path = write(tmp_path, sample_config(2, 0))
    out = tmp_path / "rep.json"
    assert main(["verify", "--config", path, "--suite", "all", "--draws", "20", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and len({r["draw"] for r in doc["results"]}) == 20


def test_verify_goldens_only(tmp_path, capsys):
    path = write(tmp_path, sample_config(2, 0))
    assert main(["verify", "--config", path, "--suite", "goldens", "--draws", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert {r["check"].split("(")[0] for r in doc["results"]} == {"golden"}


def test_unknown_selector_is_usage_error(tmp_path):
    path = write(tmp_path, MINIMAL)
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--config", path, "--suite", "bogus"])
    assert exc.value.code == 2


def test_bad_config_exit_code(tmp_path, capsys):
    path = write(tmp_path, dict(MINIMAL, x=[[0, 0]]))
    assert main(["verify", "--config", path]) == 2
    assert "x" in capsys.readouterr().err


def test_missing_subcommand():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_reports_byte_identical(tmp_path):
    path = write(tmp_path, dict(sample_config(2, 0), L_list=[1, 2], draws=3))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify", "--config", path, "--out", str(a)])
    main(["verify", "--config", path, "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_timings_optional(tmp_path, capsys):
    path = write(tmp_path, MINIMAL)
    main(["compute", "--config", path, "--timings"])
    assert "millis" in json.loads(capsys.readouterr().out)["results"][0]


def test_sample_command(tmp_path, capsys):
    assert main(["sample", "--L", "3", "--seed", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    cfg = config_from_dict(doc)
    assert cfg.L == 3 and cfg.x0 is not None


def test_full_precision_numbers():
    cfg = config_from_dict(dict(MINIMAL, tau=[0.1 + 0.2, 1 / 3]))
    doc = json.loads(json.dumps(config_to_dict(cfg)))
    assert doc["tau"] == [0.1 + 0.2, 1 / 3]
