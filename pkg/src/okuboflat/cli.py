"""Command line entry point: ``okuboflat <subcommand> ...``.

Exit status: 0 success, 1 a residual or pattern check failed, 2 a pipeline
error, 3 a bad configuration or usage.  ``--expect-failure`` turns any nonzero
status other than 3 into 0 and success into 1.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import io as jio
from .errors import ConfigError, MissingReport, OkuboError
from .experiment import (
    EXIT_CONFIG,
    EXIT_ERROR,
    EXIT_OK,
    EXIT_RESIDUAL,
    REPORTS,
    ExperimentConfig,
    parse_complex,
    run,
    theta_from_list,
)
from .isomono import isomonodromy_residual
from .matkit import DEFAULT_TOL, Tolerances, jordanize
from .okubo import canonical_frame
from .painleve import coalescence_table, default_state, okubo_data
from .plotdata import plotdata
from .realize import minimize, realize
from .report import ResidualReport
from .saito import classify_spec, flat_frame, wdvv_residuals

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _complex_list(text: str) -> list:
    return [parse_complex(x.strip(), "list entry") for x in text.split(",") if x.strip()]


def _tolerances(args) -> Tolerances:
    return Tolerances(args.cluster, args.residual, args.fd_step)


def _add_tol(p) -> None:
    p.add_argument("--cluster", type=float, default=DEFAULT_TOL.cluster, help="relative clustering radius")
    p.add_argument("--residual", type=float, default=DEFAULT_TOL.residual, help="reconstruction residual bound")
    p.add_argument("--fd-step", type=float, default=DEFAULT_TOL.fdStep, help="relative finite-difference step")


def _add_common(p) -> None:
    p.add_argument("--expect-failure", action="store_true", help="invert the exit status (0 iff the run fails)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="okuboflat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("painleve-run", help="run a Painleve pipeline and write reports")
    p.add_argument("--config", help="JSON experiment configuration (other flags override it)")
    p.add_argument("--kind", help="pi .. pvi")
    p.add_argument("--theta", help="comma-separated parameters in the order theta0,theta1,thinf1,thinf2"
                                   " restricted to the ones the kind takes (lam for PI)")
    p.add_argument("--q0"), p.add_argument("--p0"), p.add_argument("--t0"), p.add_argument("--u")
    p.add_argument("--t1", help="end of a straight time path")
    p.add_argument("--path", help="comma-separated time vertices (instead of --t0/--t1)")
    p.add_argument("--samples", type=int, help="samples per segment")
    p.add_argument("--report", help="output directory")
    p.add_argument("--reports", help=f"comma-separated subset of {','.join(REPORTS)}")
    p.add_argument("--probes", help="comma-separated isomonodromy probes")
    p.add_argument("--stride", type=int, help="stencil residuals on every n-th sample")
    p.add_argument("--seed", type=int, help="seed of the random PVI residues")
    _add_common(p)

    p = sub.add_parser("realize", help="realize a rational connection as Okubo data")
    p.add_argument("--in", dest="inp", required=True, help="RationalConnection JSON")
    p.add_argument("--minimize", action="store_true", help="reduce to a minimal realization")
    p.add_argument("--out", required=True, help="Realization JSON")
    _add_tol(p), _add_common(p)

    p = sub.add_parser("flat-frame", help="flat structure at a frame")
    p.add_argument("--in", dest="inp", required=True, help="frame, system or run-sample JSON")
    p.add_argument("--out", required=True, help="SaitoFrame JSON")
    _add_tol(p), _add_common(p)

    p = sub.add_parser("wdvv-check", help="WDVV residuals at one or more frames")
    p.add_argument("--in", dest="inp", required=True, nargs="+", help="frame JSON files or run directories")
    p.add_argument("--out", required=True, help="CSV (sample, check, residual)")
    p.add_argument("--limit", type=float, default=1e-6)
    _add_tol(p), _add_common(p)

    p = sub.add_parser("classify", help="Jordan type and Painleve pattern of T")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="inp", help="system JSON or {\"matrix\": matrix}")
    src.add_argument("--kind", help="classify the default state of a Painleve kind")
    src.add_argument("--table", action="store_true", help="the whole coalescence table")
    p.add_argument("--route", default="printed", choices=("printed", "realize", "rank4"))
    p.add_argument("--out", help="classification JSON (stdout when omitted)")
    _add_tol(p), _add_common(p)

    p = sub.add_parser("isomono-check", help="isomonodromy residual along a path of frames")
    p.add_argument("--in", dest="inp", required=True, nargs="+", help="a run directory or frame JSON files in order")
    p.add_argument("--probes", help="comma-separated probe points")
    p.add_argument("--order", type=int, default=4, choices=(2, 4))
    p.add_argument("--out", required=True, help="residual CSV")
    p.add_argument("--limit", type=float, default=1e-5)
    _add_tol(p), _add_common(p)

    p = sub.add_parser("plotdata", help="plot-ready CSV from completed runs")
    p.add_argument("--in", dest="inp", required=True, nargs="+", help="run directories")
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)
    return parser


# -- input helpers --------------------------------------------------------------


def _frame_from_doc(doc, tol):
    if "frame" in doc and isinstance(doc["frame"], dict):
        doc = doc["frame"]
    if "P" in doc:
        return jio.frame_from_json(doc)
    if "T" in doc:
        return canonical_frame(jio.system_from_json(doc), tol)
    raise ConfigError("expected a frame ({T, lambda, P, blocks, z}) or a system ({T, lambda})")


def _frame_files(inputs: Sequence[str]) -> list:
    files = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            found = sorted((p / "frames").glob("*.json")) if (p / "frames").is_dir() else sorted(p.glob("*.json"))
            if not found:
                raise MissingReport(f"{p} holds no frame JSON")
            files.extend(found)
        elif p.is_file():
            files.append(p)
        else:
            raise MissingReport(f"{p} does not exist")
    return files


# -- subcommands ---------------------------------------------------------------


def _painleve_run(args) -> int:
    data = jio.load(args.config) if args.config else {}
    text = Path(args.config).read_text() if args.config else None
    if args.kind:
        data["kind"] = args.kind
    if args.theta:
        data["parameters"] = theta_from_list(data.get("kind", ""), args.theta.split(","))
        data["parameters"] = {k: [v.real, v.imag] for k, v in data["parameters"].items()}
    init = dict(data.get("initial", {}))
    for key, val in (("q", args.q0), ("p", args.p0), ("t", args.t0), ("u", args.u)):
        if val is not None:
            init[key] = val
    if init:
        data["initial"] = init
    if args.path:
        data["path"] = args.path.split(",")
    elif args.t1 is not None:
        start = args.t0 if args.t0 is not None else init.get("t")
        if start is None:
            start = default_state(data.get("kind", "II")).t
            init["t"] = [start.real, start.imag]
            data["initial"] = init
        data["path"] = [start, args.t1]
    if args.samples is not None:
        data["samples"] = args.samples
    if args.report:
        data["output"] = args.report
    if args.reports:
        data["reports"] = [r.strip() for r in args.reports.split(",") if r.strip()]
    if args.probes:
        data["probes"] = args.probes.split(",")
    if args.stride is not None:
        data["stride"] = args.stride
    if args.seed is not None:
        data["seed"] = args.seed
    if "kind" not in data:
        raise ConfigError("give --kind or a --config with a kind", field="kind")
    if "path" not in data and data["kind"].upper().lstrip("P") in ("II", "III", "IV", "V"):
        t0 = parse_complex(init.get("t", default_state(data["kind"]).t), "t0")
        data["path"] = [[t0.real, t0.imag], [t0.real + 0.3, t0.imag]]
        data.setdefault("initial", {})["t"] = [t0.real, t0.imag]
    cfg = ExperimentConfig.from_json(data, text)
    res = run(cfg)
    if res.error:
        print(f"pipeline error: {res.error}", file=sys.stderr)
    for f in res.failures[:10]:
        print(f"residual {f['family']}/{f['condition']} at sample {f['sample']}: {f['residual']:.3g} > {f['limit']:.3g}",
              file=sys.stderr)
    print(f"wrote {res.outdir} (status {res.status})")
    return res.status


def _realize(args) -> int:
    conn = jio.connection_from_json(jio.load(args.inp))
    real = realize(conn)
    if args.minimize:
        real = minimize(real, _tolerances(args))
    Path(args.out).write_text(jio.dumps(jio.realization_to_json(real)))
    return EXIT_OK


def _flat_frame(args) -> int:
    tol = _tolerances(args)
    fr = _frame_from_doc(jio.load(args.inp), tol)
    Path(args.out).write_text(jio.dumps(jio.saito_to_json(flat_frame(fr, tol))))
    return EXIT_OK


def _wdvv_check(args) -> int:
    tol = _tolerances(args)
    rep = ResidualReport()
    for i, f in enumerate(_frame_files(args.inp)):
        rep.extend(wdvv_residuals(flat_frame(_frame_from_doc(jio.load(f), tol), tol)), sample_offset=i)
    Path(args.out).write_text(rep.to_csv(("sample", "check", "residual")))
    return EXIT_RESIDUAL if rep.failures(args.limit) else EXIT_OK


def _classify(args) -> int:
    tol = _tolerances(args)
    if args.table:
        rows = coalescence_table(tol=tol, extra_routes=True)
        out = [r.to_json() for r in rows]
        status = EXIT_OK if all(r.match for r in rows) else EXIT_RESIDUAL
    else:
        if args.kind:
            st = default_state(args.kind)
            T = okubo_data(st.kind, st, args.route, tol).T
        else:
            doc = jio.load(args.inp)
            T = jio.from_cmat(doc["matrix"]) if "matrix" in doc else jio.from_cmat(doc["T"])
        spec = jordanize(T, tol).spec
        out = {"jordan": spec.to_json(), **classify_spec(spec, tol)}
        status = EXIT_OK if out["regular"] else EXIT_RESIDUAL
        if not out["regular"]:
            out["error"] = "NotRegular"
    text = jio.dumps(out)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


def _isomono_check(args) -> int:
    tol = _tolerances(args)
    path = [_frame_from_doc(jio.load(f), tol) for f in _frame_files(args.inp)]
    probes = _complex_list(args.probes) if args.probes else None
    rep = isomonodromy_residual(path, probes, tol, order=args.order)
    Path(args.out).write_text(rep.to_csv())
    print(f"max isomonodromy residual {rep.max():.3g}")
    return EXIT_RESIDUAL if rep.failures(args.limit) else EXIT_OK


def _plotdata(args) -> int:
    counts = plotdata(args.inp, args.out)
    for name, n in counts.items():
        print(f"{name}: {n} rows")
    return EXIT_OK


_COMMANDS = {
    "painleve-run": _painleve_run,
    "realize": _realize,
    "flat-frame": _flat_frame,
    "wdvv-check": _wdvv_check,
    "classify": _classify,
    "isomono-check": _isomono_check,
    "plotdata": _plotdata,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        status = _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        status = EXIT_CONFIG
    except (OkuboError, ValueError, KeyError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        status = EXIT_ERROR
    if args.expect_failure and status != EXIT_CONFIG:
        return EXIT_OK if status != EXIT_OK else EXIT_RESIDUAL
    return status


if __name__ == "__main__":
    sys.exit(main())
