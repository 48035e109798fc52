"""JSON forms of the library objects.

Complex numbers are ``[re, im]`` pairs, matrices ``{"rows", "cols",
"entries"}`` with the entries flattened row-major.  :func:`dumps` writes the
shortest round-trip float representation, so equal objects give equal bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .okubo import ExtOkuboFrame, GOkuboSystem
from .realize import Pole, RationalConnection, Realization
from .saito import SaitoFrame

__all__ = [
    "cnum", "from_cnum", "cvec", "from_cvec", "cmat", "from_cmat",
    "system_to_json", "system_from_json", "frame_to_json", "frame_from_json",
    "saito_to_json", "connection_to_json", "connection_from_json",
    "realization_to_json", "realization_from_json", "dumps", "load",
]


def cnum(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def from_cnum(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    raise ValueError(f"expected [re, im], got {x!r}")


def cvec(v) -> list:
    return [cnum(z) for z in np.asarray(v).reshape(-1)]


def from_cvec(data) -> np.ndarray:
    return np.array([from_cnum(x) for x in data], dtype=complex)


def cmat(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]), "entries": cvec(M)}


def from_cmat(data) -> np.ndarray:
    try:
        rows, cols, entries = int(data["rows"]), int(data["cols"]), data["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("a matrix needs rows, cols and entries") from exc
    if len(entries) != rows * cols:
        raise ValueError(f"{rows}x{cols} matrix with {len(entries)} entries")
    return from_cvec(entries).reshape(rows, cols)


def system_to_json(sys: GOkuboSystem) -> dict:
    return {"T": cmat(sys.T), "lambda": cvec(sys.lam)}


def system_from_json(data, validate: bool = True) -> GOkuboSystem:
    return GOkuboSystem(from_cmat(data["T"]), from_cvec(data["lambda"]), validate=validate)


def frame_to_json(frame: ExtOkuboFrame) -> dict:
    out = system_to_json(frame.sys)
    out.update({"P": cmat(frame.P), "blocks": list(frame.blocks), "z": cvec(frame.zCoords)})
    return out


def frame_from_json(data, validate: bool = True) -> ExtOkuboFrame:
    sys = system_from_json(data, validate)
    return ExtOkuboFrame(sys, from_cmat(data["P"]), tuple(int(b) for b in data["blocks"]), from_cvec(data["z"]))


def saito_to_json(sf: SaitoFrame) -> dict:
    return {
        "w": cvec(sf.weights.w),
        "t": cvec(sf.t),
        "C": cmat(sf.Cmat),
        "Phi": [cmat(M) for M in sf.higgs],
        "g": cvec(sf.g),
        "jacobianCond": float(sf.jacobianCond),
    }


def connection_to_json(conn: RationalConnection) -> dict:
    return {"m": conn.m, "poles": [{"a": cnum(p.a), "r": p.r, "A": [cmat(c) for c in p.coeffs]} for p in conn.poles]}


def connection_from_json(data, validate: bool = True) -> RationalConnection:
    m = int(data["m"])
    poles = []
    for p in data["poles"]:
        coeffs = tuple(from_cmat(c) for c in p["A"])
        if "r" in p and int(p["r"]) != len(coeffs) - 1:
            raise ValueError(f"pole at {p['a']} declares r={p['r']} but has {len(coeffs)} coefficients")
        poles.append(Pole(from_cnum(p["a"]), coeffs))
    return RationalConnection(m, tuple(poles), validate)


def realization_to_json(real: Realization) -> dict:
    return {
        "S": cmat(real.S), "B": cmat(real.B), "C": cmat(real.C), "G": cmat(real.G),
        "lambdaOut": cvec(real.lambdaOut), "minimal": bool(real.minimal),
        "jordan": real.jordan_spec().to_json(),
    }


def realization_from_json(data) -> Realization:
    return Realization(from_cmat(data["S"]), from_cmat(data["B"]), from_cmat(data["C"]),
                       from_cmat(data["G"]), from_cvec(data["lambdaOut"]), bool(data.get("minimal", False)))


def dumps(obj) -> str:
    """Deterministic JSON text; non-finite numbers are rejected."""
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def load(path) -> dict:
    """Read a JSON document, turning syntax errors into :class:`ConfigError` with a line number."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}", line=exc.lineno) from exc
