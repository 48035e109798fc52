"""Experiment configurations and the end-to-end pipeline.

A run takes one :class:`ExperimentConfig` through

    Painleve flow -> extended Okubo frames -> flat structure
    -> residual suites -> classification

and writes ``trajectory.csv``, ``residuals.csv``, ``frames/NNNNN.json``,
``classification.json`` and ``summary.json`` into the output directory.
Outputs depend only on the configuration.
"""

from __future__ import annotations

import csv
import io as _io
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io as jio
from .errors import ConfigError, NotRegular, OkuboError
from .isomono import isomonodromy_residual
from .matkit import Tolerances, jordanize
from .okubo import integrability_residuals
from .painleve import (
    PainleveState,
    default_state,
    flow,
    gauge_distance,
    hamiltonian,
    okubo_data,
    okubo_frame,
    okubo_path,
    pv_time_dictionary,
    random_pvi_residues,
)
from .painleve.core import normalize_kind
from .report import ResidualReport, format_float
from .saito import classify_spec, dC_residuals, flat_frame, jacobian_check, primitive_section_check, wdvv_residuals

__all__ = [
    "ExperimentConfig",
    "RunResult",
    "run",
    "REPORTS",
    "DEFAULT_LIMITS",
    "OUTPUT_ROOT_ENV",
    "EXIT_OK",
    "EXIT_RESIDUAL",
    "EXIT_ERROR",
    "EXIT_CONFIG",
]

REPORTS = ("integrability", "wdvv", "isomonodromy", "classification")

# per-family acceptance bounds; stencil residuals sit near 1e-8, so the
# shared tol.residual is too strict for them
DEFAULT_LIMITS = {
    "integrability": 1e-6,
    "wdvv": 1e-6,
    "dC": 1e-5,
    "equivalence": 0.5,
    "isomonodromy": 1e-5,
    "consistency": 1e-6,
}

OUTPUT_ROOT_ENV = "OKUBOFLAT_OUTPUT_ROOT"

EXIT_OK, EXIT_RESIDUAL, EXIT_ERROR, EXIT_CONFIG = 0, 1, 2, 3

# kinds with a time chart; the others only get classified
_FLOWING = ("II", "III", "IV", "V")

_THETA_ORDER = {
    "I": ("lam",),
    "II": ("thinf2",),
    "III": ("thinf1", "thinf2"),
    "IV": ("theta0", "thinf1", "thinf2"),
    "V": ("theta0", "theta1", "thinf1", "thinf2"),
    "VI": ("lam",),
}

_KNOWN_KEYS = {"kind", "parameters", "initial", "path", "samples", "tolerances", "output",
               "reports", "limits", "probes", "stride", "seed", "runId"}


def parse_complex(x, name: str = "value") -> complex:
    """A number, an ``[re, im]`` pair or a Python complex literal such as ``"0.3+0.1j"``."""
    if isinstance(x, bool):
        raise ConfigError(f"{name}: expected a number, got {x!r}", field=name)
    if isinstance(x, (int, float, complex)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        try:
            return complex(x.replace(" ", "").replace("i", "j"))
        except ValueError:
            pass
    raise ConfigError(f"{name}: cannot read {x!r} as a complex number", field=name)


def theta_from_list(kind: str, values: Sequence) -> dict:
    """Map positional parameters onto names (``theta0, theta1, thinf1, thinf2`` order).

    PIV also accepts just ``thinf1, thinf2``; its ``theta0`` then follows from
    the Fuchs relation.
    """
    kind = normalize_kind(kind)
    names = _THETA_ORDER[kind]
    values = list(values)
    if kind == "IV" and len(values) == 2:
        names = ("thinf1", "thinf2")
    if kind == "V" and len(values) == 3:
        names = ("theta0", "thinf1", "thinf2")
    if len(values) != len(names):
        raise ConfigError(f"P{kind} takes {len(names)} parameters {names}, got {len(values)}", field="parameters")
    return {n: parse_complex(v, f"parameters.{n}") for n, v in zip(names, values)}


@dataclass(frozen=True)
class ExperimentConfig:
    """A single experiment.

    Attributes
    ----------
    kind : str
        ``"I"`` .. ``"VI"``.
    parameters : dict
        Named exponents; see :class:`~okuboflat.painleve.PainleveState`.
    initial : dict
        ``q, p, t`` and optionally ``u``.
    path : tuple of complex
        Vertices of the time polyline, starting at ``initial["t"]``.
    samples : int
        Samples per segment, both ends included.
    tolerances : Tolerances
    output : str
        Output directory; relative paths resolve against ``$OKUBOFLAT_OUTPUT_ROOT``
        when it is set.
    reports : tuple of str
        Subset of :data:`REPORTS`.
    limits : dict
        Per-family overrides of :data:`DEFAULT_LIMITS`.
    probes : tuple of complex, optional
        Isomonodromy probes; defaults are derived from the first frame.
    stride : int
        Stencil-based residuals run on every ``stride``-th sample.
    seed : int
        Seed of the random PVI residues.
    """

    kind: str
    parameters: dict = field(default_factory=dict)
    initial: dict = field(default_factory=dict)
    path: tuple = ()
    samples: int = 20
    tolerances: Tolerances = field(default_factory=Tolerances)
    output: str = "out"
    reports: tuple = REPORTS
    limits: dict = field(default_factory=dict)
    probes: tuple | None = None
    stride: int = 1
    seed: int = 0
    runId: str | None = None

    def __post_init__(self):
        try:
            kind = normalize_kind(self.kind)
        except ValueError as exc:
            raise ConfigError(str(exc), field="kind") from exc
        object.__setattr__(self, "kind", kind)
        if not isinstance(self.samples, int) or isinstance(self.samples, bool) or self.samples < 2:
            raise ConfigError(f"samples must be an integer >= 2, got {self.samples!r}", field="samples")
        if not isinstance(self.stride, int) or self.stride < 1:
            raise ConfigError(f"stride must be a positive integer, got {self.stride!r}", field="stride")
        bad = [r for r in self.reports if r not in REPORTS]
        if bad:
            raise ConfigError(f"unknown reports {bad}; choose from {list(REPORTS)}", field="reports")
        object.__setattr__(self, "reports", tuple(self.reports))
        unknown = set(self.limits) - set(DEFAULT_LIMITS)
        if unknown:
            raise ConfigError(f"unknown limit families {sorted(unknown)}", field="limits")
        for k, v in self.limits.items():
            if not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"limit {k} must be positive", field=f"limits.{k}")
        init = {k: parse_complex(v, f"initial.{k}") for k, v in self.initial.items()}
        extra = set(init) - {"q", "p", "t", "u", "t2"}
        if extra:
            raise ConfigError(f"unknown initial fields {sorted(extra)}", field="initial")
        object.__setattr__(self, "initial", init)
        params = {k: parse_complex(v, f"parameters.{k}") for k, v in self.parameters.items()}
        object.__setattr__(self, "parameters", params)
        path = tuple(parse_complex(v, f"path[{i}]") for i, v in enumerate(self.path))
        object.__setattr__(self, "path", path)
        if self.probes is not None:
            object.__setattr__(self, "probes", tuple(parse_complex(v, "probes") for v in self.probes))
        if kind in _FLOWING:
            if len(path) < 2:
                raise ConfigError("path needs at least two time vertices", field="path")
            if "t" in init and abs(init["t"] - path[0]) > 1e-14 * max(1.0, abs(path[0])):
                raise ConfigError("path must start at initial.t", field="path")

    def limit(self, family: str) -> float:
        return float(self.limits.get(family, DEFAULT_LIMITS[family]))

    def state(self) -> PainleveState:
        """The initial :class:`PainleveState`; defaults fill unspecified fields."""
        base = default_state(self.kind)
        init = dict(self.initial)
        if self.path:
            init.setdefault("t", self.path[0])
        theta = dict(base.theta) if not self.parameters else dict(self.parameters)
        kw = {k: init[k] for k in ("q", "p", "t", "u", "t2") if k in init}
        residues = base.residues
        if self.kind == "VI":
            residues = random_pvi_residues(self.seed)
        try:
            return PainleveState(self.kind, theta, q=kw.get("q", base.q), p=kw.get("p", base.p),
                                 t=kw.get("t", base.t), u=kw.get("u", base.u), t2=kw.get("t2", base.t2),
                                 residues=residues)
        except ValueError as exc:
            raise ConfigError(str(exc), field="parameters") from exc

    def times(self) -> list:
        """Sample times: ``samples`` per segment, shared vertices kept once."""
        out = [self.path[0]]
        for a, b in zip(self.path[:-1], self.path[1:]):
            out.extend(a + (b - a) * s for s in np.linspace(0.0, 1.0, self.samples)[1:])
        return out

    def segments(self) -> list:
        """Index ranges ``(start, stop)`` of the samples of each segment."""
        k = self.samples - 1
        return [(i * k, (i + 1) * k + 1) for i in range(len(self.path) - 1)]

    def to_json(self) -> dict:
        tol = self.tolerances
        out = {
            "kind": self.kind,
            "parameters": {k: jio.cnum(v) for k, v in self.parameters.items()},
            "initial": {k: jio.cnum(v) for k, v in self.initial.items()},
            "path": [jio.cnum(v) for v in self.path],
            "samples": self.samples,
            "tolerances": {"cluster": tol.cluster, "residual": tol.residual, "fdStep": tol.fdStep},
            "output": self.output,
            "reports": list(self.reports),
            "limits": dict(self.limits),
            "stride": self.stride,
            "seed": self.seed,
        }
        if self.probes is not None:
            out["probes"] = [jio.cnum(v) for v in self.probes]
        if self.runId is not None:
            out["runId"] = self.runId
        return out

    @classmethod
    def from_json(cls, data: dict, text: str | None = None) -> "ExperimentConfig":
        """Build from a parsed JSON document; ``text`` is used for line numbers in errors."""
        try:
            return cls._from_json(data)
        except ConfigError as exc:
            if text is not None and exc.field and exc.line is None:
                exc.line = _line_of(text, exc.field)
                if exc.line is not None:
                    exc.args = (f"line {exc.line}: {exc.args[0]}",)
            raise

    @classmethod
    def _from_json(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("the configuration must be a JSON object")
        unknown = set(data) - _KNOWN_KEYS
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"unknown field {key!r}", field=key)
        if "kind" not in data:
            raise ConfigError("missing field 'kind'", field="kind")
        kind = data["kind"]
        params = data.get("parameters", {})
        if isinstance(params, list):
            params = theta_from_list(kind, params)
        elif not isinstance(params, dict):
            raise ConfigError("parameters must be an object or a list", field="parameters")
        tols = data.get("tolerances", {})
        if not isinstance(tols, dict) or set(tols) - {"cluster", "residual", "fdStep"}:
            raise ConfigError("tolerances takes cluster, residual and fdStep", field="tolerances")
        try:
            tol = Tolerances(**{k: float(v) for k, v in tols.items()})
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), field="tolerances") from exc
        for key, typ in (("initial", dict), ("limits", dict), ("path", list), ("reports", list)):
            if key in data and not isinstance(data[key], typ):
                raise ConfigError(f"{key} must be a JSON {'object' if typ is dict else 'array'}", field=key)
        return cls(
            kind=kind,
            parameters=params,
            initial=data.get("initial", {}),
            path=tuple(data.get("path", ())),
            samples=data.get("samples", 20),
            tolerances=tol,
            output=str(data.get("output", "out")),
            reports=tuple(data.get("reports", REPORTS)),
            limits=dict(data.get("limits", {})),
            probes=tuple(data["probes"]) if data.get("probes") is not None else None,
            stride=data.get("stride", 1),
            seed=int(data.get("seed", 0)),
            runId=data.get("runId"),
        )

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        text = Path(path).read_text()
        return cls.from_json(jio.load(path), text)


def _line_of(text: str, dotted: str) -> int | None:
    key = re.split(r"[.\[]", dotted)[0]
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def output_dir(config: ExperimentConfig) -> Path:
    out = Path(config.output)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not out.is_absolute():
        out = Path(root) / out
    return out


@dataclass
class RunResult:
    """Outcome of :func:`run`."""

    status: int
    outdir: Path
    maxima: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    error: str | None = None


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    path.write_text(buf.getvalue())


def _c(z) -> list:
    z = complex(z)
    return [format_float(z.real), format_float(z.imag)]


def _classification(config: ExperimentConfig, state: PainleveState) -> dict:
    tol = config.tolerances
    route = "rank4" if config.kind == "VI" else "printed"
    od = okubo_data(config.kind, state, route, tol)
    spec = jordanize(od.T, tol).spec
    cls = classify_spec(spec, tol)
    return {"kind": config.kind, "route": route, "jordan": spec.to_json(), **cls}


def _error_json(exc: Exception) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    idx = getattr(exc, "index", None)
    if idx is not None:
        out["index"] = int(idx)
    return out


def run(config: ExperimentConfig) -> RunResult:
    """Run the pipeline and write the report files.

    The status is :data:`EXIT_OK` when every selected residual family is within
    its limit, :data:`EXIT_RESIDUAL` when one is not and :data:`EXIT_ERROR`
    when the pipeline raised; the error is also written to ``error.json``.
    With ``"classification"`` selected a non-regular ``T`` is an error.
    """
    outdir = output_dir(config)
    try:
        (outdir / "frames").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output directory {outdir} is not writable: {exc}", field="output") from exc
    for stale in ("error.json", "summary.json", "classification.json", "trajectory.csv", "residuals.csv"):
        (outdir / stale).unlink(missing_ok=True)
    for old in (outdir / "frames").glob("*.json"):
        old.unlink()
    (outdir / "config.json").write_text(jio.dumps(config.to_json()))
    state0 = config.state()
    result = RunResult(EXIT_OK, outdir)
    try:
        _pipeline(config, state0, outdir, result)
    except OkuboError as exc:
        result.status = EXIT_ERROR
        result.error = f"{type(exc).__name__}: {exc}"
        (outdir / "error.json").write_text(jio.dumps(_error_json(exc)))
    summary = {
        "status": result.status,
        "maxima": {k: v for k, v in sorted(result.maxima.items())},
        "limits": {k: config.limit(k) for k in sorted(result.maxima)},
        "failures": result.failures,
        "error": result.error,
    }
    (outdir / "summary.json").write_text(jio.dumps(summary))
    return result


def _pipeline(config: ExperimentConfig, state0: PainleveState, outdir: Path, result: RunResult) -> None:
    kind, tol = config.kind, config.tolerances
    classification = None
    if "classification" in config.reports or kind not in _FLOWING:
        classification = _classification(config, state0)
        (outdir / "classification.json").write_text(jio.dumps(classification))
        if not classification["regular"]:
            raise NotRegular(f"P{kind}: T has Jordan type {classification['partition']} with a shared eigenvalue")
    if kind not in _FLOWING:
        return

    times = config.times()
    hams = flow(kind, state0, times, tol)
    frames: list = []
    for a, b in config.segments():
        start = frames[-1] if frames else okubo_frame(kind, state0, "printed", tol)
        seg = okubo_path(kind, hams[a], times[a:b], tol, start=start)
        frames.extend(seg if not frames else seg[1:])

    families: dict = {}
    consistency = ResidualReport()
    traj_rows = []
    sfs = []
    for i, (fr, h) in enumerate(zip(frames, hams)):
        gd = gauge_distance(fr.T, okubo_data(kind, h, "printed", tol).T, fr.lam)
        consistency.add(i, "-", "gauge", gd)
        if kind == "V":
            consistency.add(i, "-", "pvDictionary", abs(pv_time_dictionary(fr) - h.t) / max(1.0, abs(h.t)))
        ok_p, _ = primitive_section_check(fr, tol=tol)
        ok_j, cond = jacobian_check(fr, tol)
        lead = fr.leading
        gaps = [abs(lead[x] - lead[y]) for x in range(len(lead)) for y in range(x + 1, len(lead))]
        traj_rows.append([i, *_c(h.t), *_c(h.q), *_c(h.p), *_c(hamiltonian(kind, h)), format_float(gd),
                          format_float(min(gaps)) if gaps else "", int(ok_p), int(ok_j), format_float(cond)])
        sf = flat_frame(fr, tol) if ok_j else None
        sfs.append((sf, ok_p, ok_j))
        doc = {"sample": i, "t": jio.cnum(h.t), "frame": jio.frame_to_json(fr),
               "saito": jio.saito_to_json(sf) if sf is not None else None}
        (outdir / "frames" / f"{i:05d}.json").write_text(jio.dumps(doc))
    _write_csv(outdir / "trajectory.csv",
               ["sample", "t_re", "t_im", "q_re", "q_im", "p_re", "p_im", "H_re", "H_im", "gaugeDistance",
                "eigenGap", "primitive", "jacobianOk", "jacobianCond"], traj_rows)
    families["consistency"] = consistency

    stencil_idx = list(range(0, len(frames), config.stride))
    if "integrability" in config.reports:
        rep = ResidualReport()
        for i in stencil_idx:
            rep.extend(integrability_residuals([frames[i]], tol), sample_offset=i)
        families["integrability"] = rep
    if "wdvv" in config.reports:
        w, eq = ResidualReport(), ResidualReport()
        for i, (sf, ok_p, ok_j) in enumerate(sfs):
            eq.add(i, "-", "primitiveVsJacobian", 0.0 if ok_p == ok_j else 1.0)
            if sf is not None:
                w.extend(wdvv_residuals(sf), sample_offset=i)
        families["wdvv"] = w
        families["equivalence"] = eq
        dc = ResidualReport()
        for i in stencil_idx:
            if sfs[i][0] is not None:
                dc.extend(dC_residuals([frames[i]], tol), sample_offset=i)
        families["dC"] = dc
    if "isomonodromy" in config.reports:
        rep = ResidualReport()
        for a, b in config.segments():
            rep.extend(isomonodromy_residual(frames[a:b], config.probes, tol), sample_offset=a)
        families["isomonodromy"] = rep

    rows = []
    for fam, rep in families.items():
        for r in rep.rows:
            rows.append([fam, r.sample, r.direction, r.condition, format_float(r.residual)])
        result.maxima[fam] = rep.max()
        lim = config.limit(fam)
        for r in rep.failures(lim):
            result.failures.append({"family": fam, "sample": r.sample, "direction": r.direction,
                                    "condition": r.condition, "residual": r.residual, "limit": lim})
    _write_csv(outdir / "residuals.csv", ["family", "sample", "direction", "condition", "residual"], rows)
    if result.failures:
        result.status = EXIT_RESIDUAL
