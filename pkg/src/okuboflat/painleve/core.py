"""Painleve states, Hamiltonians and Hamiltonian flows along polylines in ``t``."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import DivisionByZeroTime, PoleHit, StepFailure
from ..matkit import DEFAULT_TOL, Tolerances
from . import data

__all__ = ["KINDS", "PainleveState", "hamiltonian", "gradient", "flow", "BLOWUP"]

KINDS = ("I", "II", "III", "IV", "V", "VI")

BLOWUP = 1e8

# parameters each kind needs; the ones in _DERIVED may be omitted
_REQUIRED = {
    "I": (),
    "II": ("thinf2",),
    "III": ("thinf1", "thinf2"),
    "IV": ("theta0", "thinf1", "thinf2"),
    "V": ("theta0", "theta1", "thinf1", "thinf2"),
    "VI": (),
}
_OPTIONAL = {"I": ("lam",), "VI": ("lam",)}
_DIVIDES_BY_T = ("III", "V")
_SUM_TOL = 1e-12


def normalize_kind(kind: str) -> str:
    k = str(kind).upper()
    if k.startswith("P"):
        k = k[1:]
    if k not in KINDS:
        raise ValueError(f"unknown Painleve kind {kind!r}")
    return k


@dataclass(frozen=True)
class PainleveState:
    """A point ``(q, p)`` at time ``t`` of one Painleve equation.

    Parameters
    ----------
    kind : str
        ``"I"`` .. ``"VI"`` (a leading ``P`` is accepted).
    theta : dict
        ``theta0, theta1, thinf1, thinf2`` as the kind requires, ``lam``
        for the PI twist.  For V a missing ``theta1`` and for IV a missing
        ``theta0`` are filled in from ``theta0 + theta1 + thinf1 + thinf2 = 0``
        and ``theta0 + thinf1 + thinf2 = 0``.
    q, p, t : complex
    u : complex
        Gauge scalar, nonzero.
    t2 : complex, optional
        Position of the extra regular singularity for the rank-four routes.
    residues : tuple of ndarray, optional
        The three rank-one residues of the PVI linear problem.
    """

    kind: str
    theta: dict = field(default_factory=dict)
    q: complex = 0j
    p: complex = 0j
    t: complex = 0j
    u: complex = 1 + 0j
    t2: complex | None = None
    residues: tuple | None = None

    def __post_init__(self):
        kind = normalize_kind(self.kind)
        object.__setattr__(self, "kind", kind)
        th = {str(k): complex(v) for k, v in dict(self.theta).items()}
        allowed = set(_REQUIRED[kind]) | set(_OPTIONAL.get(kind, ()))
        unknown = set(th) - allowed
        if unknown:
            raise ValueError(f"P{kind} does not take parameters {sorted(unknown)}")
        if kind == "V" and "theta1" not in th and {"theta0", "thinf1", "thinf2"} <= set(th):
            th["theta1"] = -th["theta0"] - th["thinf1"] - th["thinf2"]
        if kind == "IV" and "theta0" not in th and {"thinf1", "thinf2"} <= set(th):
            th["theta0"] = -th["thinf1"] - th["thinf2"]
        missing = [k for k in _REQUIRED[kind] if k not in th]
        if missing:
            raise ValueError(f"P{kind} needs parameters {missing}")
        if kind == "V":
            s = th["theta0"] + th["theta1"] + th["thinf1"] + th["thinf2"]
            if abs(s) > _SUM_TOL:
                raise ValueError(f"PV needs theta0 + theta1 + thinf1 + thinf2 = 0 (got {s})")
        if kind == "IV":
            s = th["theta0"] + th["thinf1"] + th["thinf2"]
            if abs(s) > _SUM_TOL:
                raise ValueError(f"PIV needs theta0 + thinf1 + thinf2 = 0 (got {s})")
        if kind in ("IV", "V") and th["thinf1"] == th["thinf2"]:
            raise ValueError(f"P{kind} needs thinf1 != thinf2")
        if kind == "II" and th["thinf2"] == 0:
            raise ValueError("PII needs thinf2 != 0")
        object.__setattr__(self, "theta", th)
        for name in ("q", "p", "t", "u"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.u == 0:
            raise ValueError("the gauge scalar u must be nonzero")
        if self.t2 is not None:
            object.__setattr__(self, "t2", complex(self.t2))
        if self.residues is not None:
            res = tuple(np.array(a, dtype=complex).reshape(2, 2) for a in self.residues)
            if len(res) != 3:
                raise ValueError("PVI needs three residues")
            for a in res:
                a.setflags(write=False)
            object.__setattr__(self, "residues", res)

    def replace(self, **changes) -> "PainleveState":
        return dataclasses.replace(self, **changes)

    def th(self, name: str) -> complex:
        return self.theta[name]


def _check_t(kind: str, t: complex) -> None:
    if kind in _DIVIDES_BY_T and t == 0:
        raise DivisionByZeroTime(f"H_{kind} divides by t; t = 0 is not allowed")


def _values(kind: str, s: PainleveState, q, p, t):
    th = s.theta
    if kind == "II":
        return data.pii_H(q, p, t, th["thinf2"])
    if kind == "III":
        return data.piii_tH(q, p, t, th["thinf1"], th["thinf2"]) / t
    if kind == "IV":
        return data.piv_H(q, p, t, th["theta0"], th["thinf1"], th["thinf2"])
    if kind == "V":
        return data.pv_tH(q, p, t, th["theta0"], th["thinf1"], th["thinf2"]) / t
    if kind == "I":
        return data.pi_H(q, p, t)
    raise ValueError("PVI has no printed Hamiltonian in these coordinates")


def hamiltonian(kind: str, state: PainleveState) -> complex:
    """Value of the printed Hamiltonian at ``state``.

    Raises
    ------
    DivisionByZeroTime
        ``t = 0`` for III or V.
    """
    kind = normalize_kind(kind)
    if kind != state.kind:
        raise ValueError(f"state is P{state.kind}, not P{kind}")
    _check_t(kind, state.t)
    return complex(_values(kind, state, state.q, state.p, state.t))


def gradient(kind: str, state: PainleveState, q=None, p=None, t=None):
    """``(dH/dq, dH/dp, dH/dt)`` in closed form."""
    kind = normalize_kind(kind)
    q = state.q if q is None else q
    p = state.p if p is None else p
    t = state.t if t is None else t
    th = state.theta
    if kind == "II":
        a2 = th["thinf2"]
        return -2 * q * p + a2, 2 * p - q * q - t, -p
    if kind == "III":
        a12, a2 = th["thinf1"] - th["thinf2"], th["thinf2"]
        n = data.piii_tH(q, p, t, th["thinf1"], a2)
        nq = 2 * p * p * q - (2 * q - a12) * p + a2
        np_ = 2 * p * q * q - (q * q - a12 * q - t)
        return nq / t, np_ / t, p / t - n / (t * t)
    if kind == "IV":
        th0, a1, a2 = th["theta0"], th["thinf1"], th["thinf2"]
        return (p * (p - 2 * q - t) - (th0 + a2),
                q * (2 * p - q - t) + a2 - a1,
                -p * q)
    if kind == "V":
        th0, a1, a2 = th["theta0"], th["thinf1"], th["thinf2"]
        n = data.pv_tH(q, p, t, th0, a1, a2)
        c = th0 + a1 - a2
        nq = p * (p + t) * (2 * q - 1) + c * p - a2 * t
        np_ = (2 * p + t) * q * (q - 1) + c * q + (a2 - a1)
        nt = p * q * (q - 1) - a2 * q
        return nq / t, np_ / t, nt / t - n / (t * t)
    if kind == "I":
        return -3 * q * q - t, 2 * p, -q
    raise ValueError("PVI has no printed Hamiltonian in these coordinates")


def _segment_hits_zero(a: complex, b: complex) -> bool:
    d = b - a
    if d == 0:
        return a == 0
    s = min(1.0, max(0.0, -(a * np.conj(d)).real / abs(d) ** 2))
    return abs(a + s * d) <= 1e-14 * max(1.0, abs(a), abs(b))


def flow(kind: str, state0: PainleveState, tPath: Sequence[complex],
         tol: Tolerances = DEFAULT_TOL, rtol: float = 1e-10, atol: float = 1e-12) -> list:
    """Integrate Hamilton's equations along the polyline through ``tPath``.

    ``tPath[0]`` must equal ``state0.t``; a state is returned at every
    vertex.

    Raises
    ------
    DivisionByZeroTime
        For III/V, a vertex or segment touches ``t = 0``; ``index`` is the
        offending sample.
    PoleHit
        ``|q|`` or ``|p|`` exceeds 1e8.
    StepFailure
    """
    kind = normalize_kind(kind)
    if kind != state0.kind:
        raise ValueError(f"state is P{state0.kind}, not P{kind}")
    ts = [complex(x) for x in tPath]
    if not ts:
        raise ValueError("empty time path")
    if abs(ts[0] - state0.t) > 1e-14 * max(1.0, abs(state0.t)):
        raise ValueError("the time path must start at state0.t")
    if kind in _DIVIDES_BY_T:
        for i, tt in enumerate(ts):
            if tt == 0:
                raise DivisionByZeroTime(f"sample {i} has t = 0", index=i)
        for i in range(len(ts) - 1):
            if _segment_hits_zero(ts[i], ts[i + 1]):
                raise DivisionByZeroTime(f"segment ending at sample {i + 1} crosses t = 0", index=i + 1)
    out = [state0]
    cur = state0
    for i in range(1, len(ts)):
        ta, tb = ts[i - 1], ts[i]
        dt = tb - ta
        if dt == 0:
            out.append(cur.replace(t=tb))
            continue

        def rhs(s, y, ta=ta, dt=dt):
            hq, hp, _ = gradient(kind, cur, y[0], y[1], ta + s * dt)
            return np.array([hp * dt, -hq * dt])

        def blow(s, y):
            return BLOWUP - max(abs(y[0]), abs(y[1]))

        blow.terminal = True
        sol = solve_ivp(rhs, (0.0, 1.0), np.array([cur.q, cur.p], dtype=complex), method="DOP853",
                        rtol=rtol, atol=atol, events=blow)
        if sol.status == 1 or (sol.y.size and not np.all(np.isfinite(sol.y[:, -1]))):
            raise PoleHit(f"(q, p) blew up between samples {i - 1} and {i}")
        if sol.status != 0:
            raise StepFailure(f"integration failed between samples {i - 1} and {i}: {sol.message}")
        q, p = sol.y[:, -1]
        cur = cur.replace(q=complex(q), p=complex(p), t=tb)
        out.append(cur)
    return out
