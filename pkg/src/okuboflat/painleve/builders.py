"""Generalized Okubo data for each Painleve equation and the coalescence table.

In the Jordan charts used here the Painleve time is a straight line in the
canonical coordinates:

=====  ==========  ================  ======================
kind   blocks      frame ``P``       ``dz/dt``
=====  ==========  ================  ======================
V      (2, 1)      Q^-1 diag(1,t,1)  ``+d/dz_{1,1}``
IV     (3,)        Q^-1              ``-d/dz_{1,2}``
III    (2, 2)      G^-1 diag(1,t,1,1)``+d/dz_{1,1}``
II     (4,)        G^-1              ``+d/dz_{1,3}``
=====  ==========  ================  ======================

so the extended Okubo flow along that line reproduces the Hamiltonian flow
up to the gauge group commuting with ``B_inf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import MismatchedPattern, NotDiagonalizable, NotRegular, Resonant, ResonantSpectrum
from ..matkit import DEFAULT_TOL, JordanSpec, Tolerances, as_cmatrix, fnorm, jordanize
from ..okubo import ExtOkuboFrame, GOkuboSystem, check_nonresonance, directions, extend_deformation
from ..realize import minimize, realize
from ..saito import classify_spec, make_primitive
from . import data
from .core import PainleveState, normalize_kind
from .linear import linear_problem, random_pvi_residues, rank4_problem

__all__ = [
    "OkuboData",
    "okubo_data",
    "okubo_frame",
    "time_direction",
    "okubo_path",
    "gauge_distance",
    "pv_time_dictionary",
    "CoalescenceRow",
    "coalescence_table",
    "default_state",
    "ROUTES",
]

ROUTES = ("printed", "realize", "rank4")

_BLOCKS = {"V": (2, 1), "IV": (3,), "III": (2, 2), "II": (4,)}
_TIME_DIR = {"V": ((0, 1), 1.0), "IV": ((0, 2), -1.0), "III": ((0, 1), 1.0), "II": ((0, 3), 1.0)}


@dataclass(frozen=True)
class OkuboData:
    """``S`` in Jordan form, the gauge ``G`` and the diagonal of ``B_inf``; ``T = G^{-1} S G``."""

    S: np.ndarray
    G: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        S = as_cmatrix(self.S)
        G = as_cmatrix(self.G, *S.shape)
        lam = np.array(self.lam, dtype=complex).reshape(-1)
        if np.linalg.cond(G) > 1e14:
            raise ValueError("G is not invertible")
        for a in (S, G, lam):
            a.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "lam", lam)

    @property
    def T(self) -> np.ndarray:
        return np.linalg.solve(self.G, self.S @ self.G)

    def system(self, validate: bool = True) -> GOkuboSystem:
        return GOkuboSystem(self.T, self.lam, validate=validate)

    def blocks(self) -> tuple:
        """Block sizes of ``S`` in the order they appear."""
        return tuple(size for _, size in _blocks_in_order(self.S))


def _blocks_in_order(S: np.ndarray) -> list:
    n = S.shape[0]
    out, start = [], 0
    for i in range(1, n + 1):
        if i == n or abs(S[i - 1, i]) < 0.5:
            out.append((complex(S[start, start]), i - start))
            start = i
    return out


def _diagonalize(C: np.ndarray, tol: Tolerances):
    """Eigenvectors of ``-C``: nonzero exponents by descending real part, the zero one last."""
    ev, V = np.linalg.eig(-C)
    scale = max(1.0, float(np.max(np.abs(ev))))
    for i in range(len(ev)):
        for j in range(i + 1, len(ev)):
            if abs(ev[i] - ev[j]) <= tol.cluster * scale:
                raise NotDiagonalizable(f"repeated exponent {ev[i]:.6g}")
    last = int(np.argmin(np.abs(ev)))
    rest = sorted((i for i in range(len(ev)) if i != last),
                  key=lambda i: (-round(ev[i].real, 12), -round(ev[i].imag, 12)))
    order = rest + [last]
    Q = V[:, order]
    # unit entry of largest modulus in each column
    piv = np.argmax(np.abs(Q), axis=0)
    Q = Q / Q[piv, np.arange(Q.shape[1])]
    if np.linalg.cond(Q) > 1e12:
        raise NotDiagonalizable("eigenvector matrix is ill conditioned")
    lam = ev[order]
    try:
        check_nonresonance(lam)
    except Resonant as exc:
        raise ResonantSpectrum(str(exc)) from exc
    return Q, lam


def _realized(conn, tol: Tolerances) -> OkuboData:
    real = minimize(realize(conn), tol)
    return OkuboData(real.S, real.G, real.lambdaOut)


def okubo_data(kind: str, state: PainleveState, route: str = "printed",
               tol: Tolerances = DEFAULT_TOL) -> OkuboData:
    """Generalized Okubo data for ``kind`` at ``state``.

    Parameters
    ----------
    route : {"printed", "realize", "rank4"}
        ``printed`` uses the printed ``{S, G, B_inf}`` (II, III, I) or
        diagonalizes the printed residue matrix (V, IV); for VI it is the
        same as ``rank4``.  ``realize`` runs realize and minimize on
        :func:`linear_problem`.  ``rank4`` (VI, V, IV) realizes the
        Moebius-twisted problem.

    Raises
    ------
    ResonantSpectrum
    NotDiagonalizable
    """
    kind = normalize_kind(kind)
    if kind != state.kind:
        raise ValueError(f"state is P{state.kind}, not P{kind}")
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}")
    s, th = state, state.theta
    if route == "rank4" or (kind == "VI" and route == "printed"):
        return _realized(rank4_problem(kind, s), tol)
    if route == "realize":
        return _realized(linear_problem(kind, s), tol)
    if kind == "V":
        C = np.array(data.pv_C(s.q, s.p, s.t, th["theta0"], th["theta1"], th["thinf1"], th["thinf2"]), dtype=complex)
        Q, lam = _diagonalize(C, tol)
        return OkuboData(data.S_V, Q, lam)
    if kind == "IV":
        C = np.array(data.piv_C(s.q, s.p, s.t, th["thinf1"], th["thinf2"]), dtype=complex)
        Q, lam = _diagonalize(C, tol)
        return OkuboData(data.S_IV, Q, lam)
    if kind == "III":
        G = data.piii_G(s.q, s.p, s.t, s.u, th["thinf1"], th["thinf2"])
        return OkuboData(data.S_III, G, data.piii_Binf(th["thinf1"], th["thinf2"]))
    if kind == "II":
        G = data.pii_G(s.q, s.p, s.t, s.u, th["thinf2"])
        return OkuboData(data.S_II, G, data.pii_Binf(th["thinf2"]))
    # I: only as the non-regular witness
    lam = th.get("lam")
    if lam is None:
        raise ValueError("PI needs the twist parameter lam")
    return OkuboData(data.S_I, data.pi_G(s.q, s.p, s.t, lam), data.pi_Binf(lam))


def _check_regular(pieces: list, tol: Tolerances) -> None:
    ev = [v for v, _ in pieces]
    scale = max(1.0, max(abs(v) for v in ev))
    for i in range(len(ev)):
        for j in range(i + 1, len(ev)):
            if abs(ev[i] - ev[j]) <= tol.cluster * scale:
                spec = JordanSpec(tuple(pieces))
                raise NotRegular(f"T is not regular: Jordan type {spec.blocks}")


def okubo_frame(kind: str, state: PainleveState, route: str = "printed",
                tol: Tolerances = DEFAULT_TOL, od: OkuboData | None = None,
                primitive: bool = True) -> ExtOkuboFrame:
    """Extended Okubo frame at ``state`` in the chart where time is a straight line.

    With ``primitive`` a frame whose last row of ``P`` misses a block (the
    printed PIII gauge does) is moved by :func:`~okuboflat.saito.make_primitive`;
    the result differs from the printed ``T`` by a constant gauge commuting
    with ``B_inf``.

    Raises
    ------
    NotRegular
        ``S`` has a repeated eigenvalue across blocks (PI).
    """
    kind = normalize_kind(kind)
    od = okubo_data(kind, state, route, tol) if od is None else od
    pieces = _blocks_in_order(od.S)
    _check_regular(pieces, tol)
    sys = od.system()
    blocks = tuple(size for _, size in pieces)
    Ginv = np.linalg.inv(od.G)
    if route == "printed" and kind in _BLOCKS:
        D = np.ones(sys.N, dtype=complex)
        if kind in ("V", "III"):
            D[1] = state.t
        P = Ginv * D[None, :]
    else:
        P = Ginv
    frame = ExtOkuboFrame.from_basis(sys, P, blocks, tol)
    if primitive:
        frame, _ = make_primitive(frame, tol)
    return frame


def time_direction(kind: str, blocks: Sequence[int] | None = None) -> np.ndarray:
    """``dz/dt`` in canonical coordinates for the printed routes of V, IV, III, II."""
    kind = normalize_kind(kind)
    if kind not in _TIME_DIR:
        raise ValueError(f"no time direction for P{kind}")
    blocks = _BLOCKS[kind] if blocks is None else tuple(blocks)
    if blocks != _BLOCKS[kind]:
        raise ValueError(f"P{kind} uses blocks {_BLOCKS[kind]}")
    d, sign = _TIME_DIR[kind]
    zeta = np.zeros(sum(blocks), dtype=complex)
    zeta[directions(blocks).index(d)] = sign
    return zeta


def okubo_path(kind: str, state0: PainleveState, times: Sequence[complex],
               tol: Tolerances = DEFAULT_TOL, start: ExtOkuboFrame | None = None) -> list:
    """Extended Okubo frames at each time in ``times`` (straight segment from ``state0.t``).

    ``times`` must be equally spaced along one segment starting at ``state0.t``.
    ``start`` replaces the frame built from ``state0``; it is how a polyline
    is continued segment by segment.
    """
    kind = normalize_kind(kind)
    times = np.asarray(times, dtype=complex)
    if abs(times[0] - state0.t) > 1e-14 * max(1.0, abs(state0.t)):
        raise ValueError("times must start at state0.t")
    frame = okubo_frame(kind, state0, "printed", tol) if start is None else start
    zeta = time_direction(kind)
    if len(times) == 1:
        return [frame]
    steps = np.diff(times)
    if np.max(np.abs(steps - steps[0])) > 1e-12 * max(1.0, abs(times[-1] - times[0])):
        raise ValueError("times must be equally spaced on one segment")
    target = frame.zCoords + (times[-1] - times[0]) * zeta
    return extend_deformation(frame, target, tol, samples=len(times))


def gauge_distance(T1, T2, lam, tol: float = 1e-12) -> float:
    """Relative distance of ``T1`` from the orbit of ``T2`` under the stabilizer of ``diag(lam)``.

    The smallest singular value of ``K -> K T1 - T2 K`` on the stabilizer,
    divided by ``||T1||``.  Zero when ``K T1 K^{-1} = T2`` has a solution.
    """
    T1, T2 = as_cmatrix(T1), as_cmatrix(T2)
    lam = np.asarray(lam)
    n = len(lam)
    cols = []
    for i in range(n):
        for j in range(n):
            if abs(lam[i] - lam[j]) <= tol * max(1.0, abs(lam[i])):
                K = np.zeros((n, n), dtype=complex)
                K[i, j] = 1
                cols.append((K @ T1 - T2 @ K).reshape(-1))
    s = np.linalg.svd(np.array(cols).T, compute_uv=False)
    return float(s[-1] / max(fnorm(T1), 1e-300))


def pv_time_dictionary(frame: ExtOkuboFrame) -> complex:
    """``z_{1,1} B_21 / (z_{1,0} - z_{2,0})`` with ``B = -P^{-1} B_inf P``, which equals ``t`` on PV frames."""
    if frame.blocks != (2, 1):
        raise ValueError("the PV dictionary needs blocks (2, 1)")
    B = -frame.Pinv @ frame.sys.B_inf @ frame.P
    z10, z11, z20 = frame.zCoords
    return complex(z11 * B[1, 0] / (z10 - z20))


# -- coalescence ---------------------------------------------------------------


@dataclass(frozen=True)
class CoalescenceRow:
    label: str
    kind: str
    route: str
    expected: dict
    observed: JordanSpec | None
    classification: dict
    match: bool
    note: str = ""

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "kind": self.kind,
            "route": self.route,
            "expected": self.expected,
            "observed": self.observed.to_json() if self.observed is not None else None,
            "classification": self.classification,
            "match": self.match,
            "note": self.note,
        }


_TABLE = (
    ("VI/4", "VI", "rank4", {"partition": "1111", "regular": True, "pattern": "VI"}),
    ("V/3", "V", "printed", {"partition": "21", "regular": True, "pattern": "V"}),
    ("V/4", "V", "rank4", {"partition": "211", "regular": True, "pattern": "V"}),
    ("IV/3", "IV", "printed", {"partition": "3", "regular": True, "pattern": "IV"}),
    ("IV/4", "IV", "rank4", {"partition": "31", "regular": True, "pattern": "IV"}),
    ("III/4", "III", "printed", {"partition": "22", "regular": True, "pattern": "III"}),
    ("II/4", "II", "printed", {"partition": "4", "regular": True, "pattern": "II"}),
    ("I/7", "I", "printed", {"partition": "43", "regular": False, "pattern": None}),
)


def coalescence_table(states: dict | None = None, tol: Tolerances = DEFAULT_TOL,
                      strict: bool = False, extra_routes: bool = False) -> list:
    """Jordan type of ``T`` for each kind and route, checked against the expected patterns.

    Parameters
    ----------
    states : dict, optional
        Kind to :class:`PainleveState`; :func:`default_state` fills the gaps.
    strict : bool
        Raise :class:`MismatchedPattern` at the first mismatch.
    extra_routes : bool
        Also realize the 2x2 problems of V and IV directly (3x3 results).
    """
    states = dict(states or {})
    rows = list(_TABLE)
    if extra_routes:
        rows += [("V/3r", "V", "realize", {"partition": "21", "regular": True, "pattern": "V"}),
                 ("IV/3r", "IV", "realize", {"partition": "3", "regular": True, "pattern": "IV"})]
    out = []
    for label, kind, route, expected in rows:
        st = states.get(kind) or default_state(kind)
        od = okubo_data(kind, st, route, tol)
        spec = jordanize(od.T, tol).spec
        cls = classify_spec(spec, tol)
        ok = (cls["partition"] == expected["partition"] and cls["regular"] == expected["regular"]
              and cls["pattern"] == expected["pattern"])
        note = "" if cls["regular"] else "NotRegular: an eigenvalue occupies several Jordan blocks"
        row = CoalescenceRow(label, kind, route, expected, spec, cls, ok, note)
        if strict and not ok:
            raise MismatchedPattern(f"{label}: expected {expected}, observed {cls}", expected, spec)
        out.append(row)
    return out


# -- default states --------------------------------------------------------------


def default_state(kind: str) -> PainleveState:
    """A generic state for ``kind`` used by tests and the CLI defaults."""
    kind = normalize_kind(kind)
    if kind == "II":
        return PainleveState("II", {"thinf2": 0.5}, q=0.3 + 0.1j, p=0.4, t=0.2, u=1.0)
    if kind == "III":
        return PainleveState("III", {"thinf1": 0.37, "thinf2": 0.21}, q=0.7, p=0.3 + 0.2j, t=1.1, u=1.3)
    if kind == "IV":
        return PainleveState("IV", {"thinf1": 0.31, "thinf2": 0.17}, q=0.6 + 0.1j, p=0.4, t=0.9)
    if kind == "V":
        return PainleveState("V", {"theta0": 0.31, "thinf1": 0.37, "thinf2": 0.21}, q=2.0, p=1.0, t=1.0)
    if kind == "VI":
        return PainleveState("VI", {}, t=0.4 + 0.2j, t2=2.5 + 0.5j, residues=random_pvi_residues(0))
    return PainleveState("I", {"lam": 0.4}, q=0.3, p=0.7, t=1.2)

