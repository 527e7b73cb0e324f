import csv
import json

import numpy as np
import pytest

from eiglab.cli import ExperimentConfig, main, run
from eiglab.errors import ConfigError
from eiglab.mmio import write_matrix

IDENTITY_LIKE = '{"blocks":[{"re":1,"im":0,"sizes":[1,1,1,1]}]}'


def _summary(out):
    return json.loads((out / "summary.json").read_text())


def _rows(out):
    with open(out / "trials.csv") as fh:
        return list(csv.DictReader(fh))


def test_analyze_identity(tmp_path):
    write_matrix(tmp_path / "identity.mtx", np.eye(4))
    out = tmp_path / "out"
    assert main(["analyze", "--matrix", str(tmp_path / "identity.mtx"), "--seed", "0", "--out", str(out)]) == 0
    summary = _summary(out)
    assert summary["structure"]["distinct"] == 1
    assert summary["structure"]["totalDefect"] == 0
    assert summary["passed"] is True
    assert summary["config"]["seed"] == 0 and summary["version"]
    assert "distinctA" in summary["boundInputs"]


def test_analyze_spec_matches(tmp_path):
    out = tmp_path / "out"
    spec = '{"blocks":[{"re":1,"im":0,"sizes":[2,1]},{"re":4,"im":0,"sizes":[1]}]}'
    assert main(["analyze", "--spec", spec, "--seed", "3", "--out", str(out)]) == 0
    assert _summary(out)["checks"]["matchesSpec"] is True


def test_perturb_identity_like(tmp_path):
    out = tmp_path / "out"
    code = main(["perturb", "--spec", IDENTITY_LIKE, "--rank", "1", "--trials", "100", "--seed", "1",
                 "--out", str(out)])
    assert code == 0
    rows = _rows(out)
    assert len(rows) == 100
    assert all(r["pass"] == "True" for r in rows)
    assert all(r["bound"] == "2" and r["measuredDistinctC"] == "2" for r in rows)
    inputs = _summary(out)["boundInputs"]
    assert (inputs["distinctA"], inputs["defectA"], inputs["r"], inputs["bound"]) == (1, 0, 1, 2)


def test_perturb_random_suite(tmp_path):
    out = tmp_path / "out"
    assert main(["perturb", "--trials", "30", "--seed", "5", "--out", str(out)]) == 0
    assert _summary(out)["boundViolations"] == 0


def test_krylov_suite_and_trace(tmp_path):
    out = tmp_path / "suite"
    assert main(["krylov", "--trials", "20", "--seed", "2", "--out", str(out)]) == 0
    assert all(r["pass"] == "True" for r in _rows(out))
    write_matrix(tmp_path / "d.mtx", np.diag([1.0, 2.0, 3.0, 3.0]))
    out = tmp_path / "trace"
    assert main(["krylov", "--matrix", str(tmp_path / "d.mtx"), "--seed", "0", "--out", str(out)]) == 0
    summary = _summary(out)
    assert summary["convergedAt"] == 3 and summary["mpd"] == 3
    assert len(_rows(out)) == 4


def test_krylov_rejects_defective_spec(tmp_path):
    code = main(["krylov", "--spec", '{"blocks":[{"re":1,"im":0,"sizes":[2]}]}', "--seed", "0",
                 "--out", str(tmp_path / "o")])
    assert code == 1
    assert "ConfigError" in _summary(tmp_path / "o")["error"]


def test_deflate_default(tmp_path):
    out = tmp_path / "out"
    assert main(["deflate", "--seed", "0", "--trials", "20", "--out", str(out)]) == 0
    summary = _summary(out)
    assert len(summary["roots"]) >= 2
    assert all(r["pass"] == "True" for r in _rows(out))


def test_tightness(tmp_path):
    out = tmp_path / "out"
    assert main(["tightness", "--seed", "0", "--k", "3", "--trials", "20", "--out", str(out)]) == 0
    assert len(_rows(out)) == 60


def test_check_failure_exit_code(tmp_path):
    # A cluster gap wider than the spectrum merges everything: 2k is never reached.
    code = main(["tightness", "--seed", "0", "--k", "2", "--trials", "5", "--cluster-tol", "10",
                 "--out", str(tmp_path / "o")])
    assert code == 2
    summary = _summary(tmp_path / "o")
    assert summary["passed"] is False
    assert summary["checks"]["withinBound"] is True


def test_bad_tolerance_is_an_error(tmp_path):
    # Merging distinct eigenvalues leaves an inconsistent structure.
    spec = '{"blocks":[{"re":1,"im":0,"sizes":[1]},{"re":2,"im":0,"sizes":[1]}]}'
    code = main(["analyze", "--spec", spec, "--seed", "0", "--cluster-tol", "10", "--out", str(tmp_path / "o")])
    assert code == 1
    assert "StructureInconsistent" in _summary(tmp_path / "o")["error"]


def test_missing_seed_is_config_error(tmp_path):
    assert main(["perturb", "--out", str(tmp_path / "o")]) == 1
    with pytest.raises(ConfigError, match="seed"):
        ExperimentConfig(mode="perturb", seed=None).validate()


@pytest.mark.parametrize(
    "changes, field",
    [
        ({"gmres_tol": 0.0}, "gmres_tol"),
        ({"cluster_tol": -1.0}, "cluster_tol"),
        ({"rank": -1}, "rank"),
        ({"trials": 0}, "trials"),
        ({"mode": "bogus"}, "mode"),
        ({"cond_cap": 0.5}, "cond_cap"),
    ],
)
def test_config_validation_names_field(changes, field):
    cfg = ExperimentConfig(**{"mode": "perturb", "seed": 1, **changes})
    with pytest.raises(ConfigError, match=field):
        cfg.validate()


def test_analyze_needs_input():
    with pytest.raises(ConfigError, match="analyze"):
        ExperimentConfig(mode="analyze", seed=1).validate()


def test_error_exit_on_bad_matrix(tmp_path):
    (tmp_path / "bad.mtx").write_text("not a matrix\n")
    assert main(["analyze", "--matrix", str(tmp_path / "bad.mtx"), "--seed", "0", "--out", str(tmp_path / "o")]) == 1
    assert main(["analyze", "--matrix", str(tmp_path / "nope.mtx"), "--seed", "0", "--out", str(tmp_path / "o")]) == 1


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 4, "trials": 5, "spec": IDENTITY_LIKE, "rank": 1}))
    out = tmp_path / "out"
    assert main(["perturb", "--config", str(cfg), "--trials", "7", "--out", str(out)]) == 0
    echoed = _summary(out)["config"]
    assert echoed["seed"] == 4 and echoed["trials"] == 7
    assert len(_rows(out)) == 7


def test_config_file_unknown_field(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 1, "colour": "red"}))
    assert main(["perturb", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1


def test_spec_from_file(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(IDENTITY_LIKE)
    out = tmp_path / "out"
    assert main(["perturb", "--spec", str(path), "--rank", "1", "--trials", "3", "--seed", "0", "--out", str(out)]) == 0


@pytest.mark.parametrize("mode, extra", [
    ("perturb", ["--trials", "20"]),
    ("krylov", ["--trials", "10"]),
    ("deflate", ["--trials", "10"]),
    ("tightness", ["--trials", "5", "--k", "2"]),
])
def test_reruns_are_byte_identical(tmp_path, mode, extra):
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert main([mode, "--seed", "11", "--out", str(out), *extra]) == 0
    assert (outs[0] / "trials.csv").read_bytes() == (outs[1] / "trials.csv").read_bytes()
    a, b = _summary(outs[0]), _summary(outs[1])
    a["config"].pop("out"), b["config"].pop("out")
    assert a == b


def test_run_accepts_dataclass(tmp_path):
    cfg = ExperimentConfig(mode="tightness", seed=0, trials=3, k=1, out=str(tmp_path / "o"))
    assert run(cfg) == 0
