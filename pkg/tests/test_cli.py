import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from okuboflat import io as jio
from okuboflat.cli import build_parser, main
from okuboflat.errors import ConfigError, MissingReport
from okuboflat.experiment import (EXIT_CONFIG, EXIT_ERROR, EXIT_OK, EXIT_RESIDUAL, OUTPUT_ROOT_ENV, ExperimentConfig,
                                  parse_complex, run, theta_from_list)
from okuboflat.painleve import default_state, linear_problem, okubo_frame
from okuboflat.plotdata import SCHEMA, plotdata

SUBCOMMANDS = ("painleve-run", "realize", "flat-frame", "wdvv-check", "classify", "isomono-check", "plotdata")
PII_ARGS = ["painleve-run", "--kind", "pii", "--samples", "6"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def pii_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("runs")
    assert main(PII_ARGS + ["--report", str(root / "pii")]) == EXIT_OK
    return root / "pii"


# -- configuration ----------------------------------------------------------------


def test_parse_complex_forms():
    assert parse_complex(2) == 2
    assert parse_complex([0.5, -1]) == 0.5 - 1j
    assert parse_complex("0.3+0.1i") == 0.3 + 0.1j
    for bad in (True, "x", [1, 2, 3], None):
        with pytest.raises(ConfigError):
            parse_complex(bad)


def test_theta_lists():
    assert theta_from_list("pii", [0.5]) == {"thinf2": 0.5}
    assert set(theta_from_list("IV", [0.1, 0.2])) == {"thinf1", "thinf2"}
    with pytest.raises(ConfigError) as info:
        theta_from_list("III", [1, 2, 3])
    assert info.value.field == "parameters"


@pytest.mark.parametrize("doc, field", [
    ({"kind": "II", "samples": 1, "path": [0, 1]}, "samples"),
    ({"kind": "VIII"}, "kind"),
    ({"kind": "II", "path": [0]}, "path"),
    ({"kind": "II", "path": [0, 1], "reports": ["wdvv", "pictures"]}, "reports"),
    ({"kind": "II", "path": [0, 1], "tolerances": {"cluster": -1}}, "tolerances"),
    ({"kind": "II", "path": [0, 1], "colour": "red"}, "colour"),
    ({"samples": 4}, "kind"),
    ({"kind": "II", "path": [0, 1], "initial": {"t": 0.5}}, "path"),
    ({"kind": "II", "path": [0, 1], "limits": {"wdvv": 0}}, "limits.wdvv"),
])
def test_config_errors_name_the_field(doc, field):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_json(doc)
    assert info.value.field == field


def test_config_error_line_number(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text('{\n  "kind": "II",\n  "path": [0, 0.3],\n  "samples": 1\n}\n')
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.load(p)
    assert info.value.line == 4 and "line 4" in str(info.value)
    assert main(["painleve-run", "--config", str(p)]) == EXIT_CONFIG
    assert main(["painleve-run", "--config", str(p), "--expect-failure"]) == EXIT_CONFIG


def test_config_round_trip():
    cfg = ExperimentConfig.from_json({"kind": "pv", "parameters": [0.25, 0.25, 0.25], "path": [1, 1.2, "1.2+0.1j"],
                                      "samples": 3, "probes": [2, [5, 1]], "runId": "a"})
    again = ExperimentConfig.from_json(cfg.to_json())
    assert again == cfg
    assert cfg.times()[2] == pytest.approx(1.2) and len(cfg.times()) == 5
    assert cfg.segments() == [(0, 3), (2, 5)]


def test_usage_errors_exit_3(capsys):
    assert_exit(["painleve-run", "--samples", "x"], EXIT_CONFIG)
    assert_exit(["nonsense"], EXIT_CONFIG)
    assert main(["painleve-run"]) == EXIT_CONFIG


def assert_exit(argv, code):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == code


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help(cmd, capsys):
    assert_exit([cmd, "--help"], 0)
    assert "--expect-failure" in capsys.readouterr().out


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "okuboflat", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert all(c in out.stdout for c in SUBCOMMANDS)
    assert set(build_parser()._subparsers._group_actions[0].choices) == set(SUBCOMMANDS)


# -- painleve-run --------------------------------------------------------------------


def test_pii_run_outputs(pii_run):
    names = {p.name for p in pii_run.iterdir()}
    assert {"trajectory.csv", "residuals.csv", "frames", "classification.json", "summary.json", "config.json"} <= names
    assert "error.json" not in names
    assert len(list((pii_run / "frames").glob("*.json"))) == 6
    traj = read_csv(pii_run / "trajectory.csv")
    assert [int(r["sample"]) for r in traj] == list(range(6))
    res = read_csv(pii_run / "residuals.csv")
    assert list(res[0]) == ["family", "sample", "direction", "condition", "residual"]
    assert {r["family"] for r in res} == {"consistency", "integrability", "wdvv", "equivalence", "dC", "isomonodromy"}
    for r in res:
        assert float(r["residual"]) == float(repr(float(r["residual"])))
    summary = json.loads((pii_run / "summary.json").read_text())
    assert summary["status"] == 0 and summary["failures"] == []
    cls = json.loads((pii_run / "classification.json").read_text())
    assert cls["partition"] == "4" and cls["pattern"] == "II" and cls["regular"]
    assert main(PII_ARGS + ["--report", str(pii_run.parent / "pii-x"), "--expect-failure"]) == EXIT_RESIDUAL


def test_determinism(tmp_path, monkeypatch):
    outs = []
    for root in ("a", "b"):
        monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / root))
        assert main(["painleve-run", "--kind", "piv", "--samples", "4", "--report", "run"]) == EXIT_OK
        d = tmp_path / root / "run"
        outs.append({p.relative_to(d): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()})
    assert outs[0].keys() == outs[1].keys() and len(outs[0]) > 5
    assert all(outs[0][k] == outs[1][k] for k in outs[0])


def test_output_root_only_for_relative_paths(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "root"))
    cfg = ExperimentConfig(kind="II", path=(0.5, 0.55), samples=2, output=str(tmp_path / "abs"),
                           reports=("wdvv",))
    assert run(cfg).outdir == tmp_path / "abs"


def test_pv_through_zero(tmp_path):
    out = tmp_path / "pv"
    assert main(["painleve-run", "--kind", "pv", "--path", "0.4,-0.4", "--samples", "9", "--report", str(out)]) == EXIT_ERROR
    err = json.loads((out / "error.json").read_text())
    assert err["type"] == "DivisionByZeroTime" and err["index"] == 4
    assert json.loads((out / "summary.json").read_text())["status"] == EXIT_ERROR


def test_pi_not_regular(tmp_path):
    out = tmp_path / "pi"
    assert main(["painleve-run", "--kind", "pi", "--report", str(out)]) == EXIT_ERROR
    cls = json.loads((out / "classification.json").read_text())
    assert cls["regular"] is False and cls["partition"] == "43"
    assert json.loads((out / "error.json").read_text())["type"] == "NotRegular"
    assert main(["painleve-run", "--kind", "pi", "--report", str(out), "--expect-failure"]) == EXIT_OK


def test_residual_failure_exit(tmp_path):
    cfg = ExperimentConfig(kind="II", path=(0.5, 0.6), samples=3, output=str(tmp_path / "tight"),
                           reports=("wdvv",), limits={"wdvv": 1e-30, "consistency": 1e-30})
    res = run(cfg)
    assert res.status == EXIT_RESIDUAL and res.failures
    assert {f["family"] for f in res.failures} <= {"wdvv", "consistency"}


def test_rerun_clears_stale_outputs(tmp_path):
    out = tmp_path / "re"
    assert main(PII_ARGS[:3] + ["--samples", "3", "--reports", "wdvv", "--report", str(out)]) == EXIT_OK
    assert main(["painleve-run", "--kind", "pi", "--report", str(out)]) == EXIT_ERROR
    assert not (out / "trajectory.csv").exists() and not any((out / "frames").iterdir())
    with pytest.raises(MissingReport):
        plotdata([out], tmp_path / "plot")


# -- other subcommands -----------------------------------------------------------------


def test_realize_command(tmp_path):
    conn = linear_problem("V", default_state("V"))
    src = tmp_path / "conn.json"
    src.write_text(jio.dumps(jio.connection_to_json(conn)))
    for flag, n in (([], 6), (["--minimize"], 3)):
        dst = tmp_path / f"real{n}.json"
        assert main(["realize", "--in", str(src), "--out", str(dst), *flag]) == EXIT_OK
        real = jio.realization_from_json(jio.load(dst))
        assert real.N == n
    bad = tmp_path / "bad.json"
    bad.write_text('{"m": 1, "poles": [{"a": 0, "A": [{"rows": 1, "cols": 1, "entries": [0]}]}]}')
    assert main(["realize", "--in", str(bad), "--out", str(tmp_path / "x.json")]) == EXIT_ERROR


def test_flat_frame_and_wdvv(pii_run, tmp_path):
    sample = pii_run / "frames" / "00002.json"
    out = tmp_path / "sf.json"
    assert main(["flat-frame", "--in", str(sample), "--out", str(out)]) == EXIT_OK
    stored = json.loads(sample.read_text())["saito"]
    assert json.loads(out.read_text()) == stored
    csv_out = tmp_path / "wdvv.csv"
    assert main(["wdvv-check", "--in", str(pii_run), "--out", str(csv_out)]) == EXIT_OK
    rows = read_csv(csv_out)
    assert list(rows[0]) == ["sample", "check", "residual"] and {r["sample"] for r in rows} == {str(i) for i in range(6)}
    assert main(["wdvv-check", "--in", str(tmp_path / "missing"), "--out", str(csv_out)]) == EXIT_ERROR


def test_flat_frame_from_system(tmp_path):
    fr = okubo_frame("IV", default_state("IV"))
    src = tmp_path / "sys.json"
    src.write_text(jio.dumps(jio.system_to_json(fr.sys)))
    out = tmp_path / "sf.json"
    assert main(["flat-frame", "--in", str(src), "--out", str(out)]) == EXIT_OK
    assert len(json.loads(out.read_text())["t"]) == 3


def test_classify_command(tmp_path, capsys):
    assert main(["classify", "--kind", "pv"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["pattern"] == "V" and doc["partition"] == "21"
    assert main(["classify", "--kind", "pi"]) == EXIT_RESIDUAL
    assert json.loads(capsys.readouterr().out)["error"] == "NotRegular"
    assert main(["classify", "--kind", "pi", "--expect-failure"]) == EXIT_OK
    capsys.readouterr()
    out = tmp_path / "table.json"
    assert main(["classify", "--table", "--out", str(out)]) == EXIT_OK
    assert len(json.loads(out.read_text())) >= 8
    m = tmp_path / "m.json"
    m.write_text(jio.dumps({"matrix": jio.cmat(np.diag([0.0, 1.0, 2.0]))}))
    assert main(["classify", "--in", str(m)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["pattern"] == "VI"
    # two blocks on one eigenvalue
    m.write_text(jio.dumps({"matrix": jio.cmat(np.diag([0.0, 1.0, 1.0]))}))
    assert main(["classify", "--in", str(m)]) == EXIT_RESIDUAL
    assert json.loads(capsys.readouterr().out)["regular"] is False


def test_isomono_command(pii_run, tmp_path):
    out = tmp_path / "iso.csv"
    assert main(["isomono-check", "--in", str(pii_run), "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    assert len(rows) == 2 * 3 and all(float(r["residual"]) < 1e-5 for r in rows)
    assert main(["isomono-check", "--in", str(pii_run), "--out", str(out), "--limit", "1e-30"]) == EXIT_RESIDUAL
    assert main(["isomono-check", "--in", str(pii_run), "--out", str(out), "--probes", "2,5+1j,-3"]) == EXIT_OK
    fourth = max(float(r["residual"]) for r in read_csv(out))
    main(["isomono-check", "--in", str(pii_run), "--out", str(out), "--probes", "2,5+1j,-3", "--order", "2"])
    assert max(float(r["residual"]) for r in read_csv(out)) > 10 * fourth


# -- plotdata ------------------------------------------------------------------------------


def test_plotdata_one_run(pii_run, tmp_path):
    out = tmp_path / "plot"
    assert main(["plotdata", "--in", str(pii_run), "--out", str(out)]) == EXIT_OK
    schema = json.loads((out / "schema.json").read_text())
    assert schema == SCHEMA
    for name, cols in SCHEMA.items():
        rows = read_csv(out / name)
        assert list(rows[0]) == list(cols)
        assert len(rows) == 6
    res = read_csv(out / "residual_vs_sample.csv")
    assert all(r["wdvv"] != "" for r in res)


def test_plotdata_merges_runs(pii_run, tmp_path):
    counts = plotdata([pii_run, pii_run], tmp_path / "two")
    assert counts["trajectory_qp.csv"] == 12
    ids = [r["run_id"] for r in read_csv(tmp_path / "two" / "trajectory_qp.csv")]
    assert ids[:6] == ["pii"] * 6 and ids[6:] == ["pii#1"] * 6


def test_plotdata_missing(tmp_path):
    (tmp_path / "empty").mkdir()
    with pytest.raises(MissingReport):
        plotdata(tmp_path / "empty", tmp_path / "out")
    with pytest.raises(MissingReport):
        plotdata([], tmp_path / "out")
    assert main(["plotdata", "--in", str(tmp_path / "empty"), "--out", str(tmp_path / "out")]) == EXIT_ERROR
