"""Plot-ready tables assembled from completed run directories.

Nothing is rendered.  :func:`plotdata` writes three CSV files and a schema
describing their columns:

``residual_vs_sample.csv``
    one row per run and sample, the largest residual of each family;
``trajectory_qp.csv``
    the Painleve trajectory;
``jordan_gap.csv``
    the smallest distance between block eigenvalues of ``T`` against the
    time parameter, which goes to zero at a coalescence.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

from . import io as jio
from .errors import MissingReport
from .report import format_float

__all__ = ["SCHEMA", "plotdata", "load_run"]

FAMILIES = ("integrability", "wdvv", "dC", "equivalence", "isomonodromy", "consistency")

SCHEMA = {
    "residual_vs_sample.csv": {
        "run_id": "name of the run directory (or its runId)",
        "sample": "sample index along the time path",
        "t_re": "real part of t",
        "t_im": "imaginary part of t",
        **{f: f"largest {f} residual at the sample; empty when not computed" for f in FAMILIES},
    },
    "trajectory_qp.csv": {
        "run_id": "name of the run directory (or its runId)",
        "sample": "sample index",
        "t_re": "real part of t", "t_im": "imaginary part of t",
        "q_re": "real part of q", "q_im": "imaginary part of q",
        "p_re": "real part of p", "p_im": "imaginary part of p",
    },
    "jordan_gap.csv": {
        "run_id": "name of the run directory (or its runId)",
        "sample": "sample index",
        "t_re": "real part of the coalescence parameter t",
        "t_im": "imaginary part of t",
        "eigenGap": "smallest distance between block eigenvalues z_{k,0} of T",
    },
}


def _read_csv(path: Path) -> list:
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def load_run(run_dir) -> dict:
    """Trajectory and residual rows of one run.

    Raises
    ------
    MissingReport
        ``trajectory.csv`` or ``residuals.csv`` is absent.
    """
    d = Path(run_dir)
    if not d.is_dir():
        raise MissingReport(f"{d} is not a directory")
    missing = [n for n in ("trajectory.csv", "residuals.csv") if not (d / n).is_file()]
    if missing:
        raise MissingReport(f"{d} lacks {', '.join(missing)}; is it a completed run?")
    run_id = d.resolve().name
    cfg = d / "config.json"
    if cfg.is_file():
        run_id = json.loads(cfg.read_text()).get("runId") or run_id
    return {"run_id": run_id, "trajectory": _read_csv(d / "trajectory.csv"), "residuals": _read_csv(d / "residuals.csv")}


def _write(path: Path, header: Sequence[str], rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def plotdata(run_dirs, out_dir) -> dict:
    """Write the plot tables for one or more runs into ``out_dir``.

    Runs are concatenated in the order given and told apart by ``run_id``;
    repeated ids get a ``#n`` suffix.

    Returns
    -------
    dict
        File name to row count.
    """
    if isinstance(run_dirs, (str, Path)):
        run_dirs = [run_dirs]
    runs = [load_run(d) for d in run_dirs]
    if not runs:
        raise MissingReport("no run directories given")
    seen: dict = {}
    for r in runs:
        n = seen.get(r["run_id"], 0)
        seen[r["run_id"]] = n + 1
        if n:
            r["run_id"] = f"{r['run_id']}#{n}"
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    res_rows, traj_rows, gap_rows = [], [], []
    for r in runs:
        best: dict = {}
        for row in r["residuals"]:
            key = (int(row["sample"]), row["family"])
            best[key] = max(best.get(key, 0.0), float(row["residual"]))
        for tr in r["trajectory"]:
            i = int(tr["sample"])
            vals = [format_float(best[(i, f)]) if (i, f) in best else "" for f in FAMILIES]
            res_rows.append([r["run_id"], i, tr["t_re"], tr["t_im"], *vals])
            traj_rows.append([r["run_id"], i, tr["t_re"], tr["t_im"], tr["q_re"], tr["q_im"], tr["p_re"], tr["p_im"]])
            gap_rows.append([r["run_id"], i, tr["t_re"], tr["t_im"], tr["eigenGap"]])
    tables = {"residual_vs_sample.csv": res_rows, "trajectory_qp.csv": traj_rows, "jordan_gap.csv": gap_rows}
    for name, rows in tables.items():
        _write(out / name, list(SCHEMA[name]), rows)
    (out / "schema.json").write_text(jio.dumps(SCHEMA))
    return {name: len(rows) for name, rows in tables.items()}
