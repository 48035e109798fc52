"""The 2x2 linear problems behind each Painleve equation.

The outputs are :class:`RationalConnection` objects with a regular
singularity and diagonal residue at infinity, ready for realization.  III,
II and I are given in their twisted ``xi`` forms; VI, and the rank-four
routes of V and IV, go through the Moebius pullback

    x = (t2 - 1) xi / (t2 - xi)

(which fixes 0 and 1 and sends infinity to ``xi = t2``) followed by the
twist ``Z = (xi - t2)^{-lam} Y``.
"""

from __future__ import annotations

from math import comb
from typing import Sequence

import numpy as np

from ..errors import DetNonzero, NoNonzeroTwist
from ..realize import Pole, RationalConnection
from . import data
from .core import PainleveState, normalize_kind

__all__ = [
    "linear_problem",
    "rank4_problem",
    "mobius_twist",
    "choose_twist",
    "pvi_residues",
    "random_pvi_residues",
    "DEFAULT_T2",
]

DEFAULT_T2 = 2.5 + 0.5j

_DET_TOL = 1e-10


def _m(a) -> np.ndarray:
    return np.array(a, dtype=complex)


def _eye():
    return np.eye(2, dtype=complex)


def _theta(state, *names):
    return [state.theta[n] for n in names]


def _raw_problem(state: PainleveState) -> RationalConnection:
    """The untwisted problem in ``x`` for V, IV and VI (all poles finite)."""
    s = state
    if s.kind == "V":
        th0, a1, a2 = _theta(s, "theta0", "thinf1", "thinf2")
        A0, A1, A2 = (_m(a) for a in data.pv_linear(s.q, s.p, s.t, s.u, th0, a1, a2))
        return RationalConnection(2, (Pole(0, (A0,)), Pole(1, (A2, A1))))
    if s.kind == "IV":
        a1, a2 = _theta(s, "thinf1", "thinf2")
        A0, A1, A2 = (_m(a) for a in data.piv_linear(s.q, s.p, s.t, s.u, a1, a2))
        return RationalConnection(2, (Pole(0, (A2, A1, A0)),))
    if s.kind == "VI":
        if s.residues is None:
            raise ValueError("PVI needs three rank-one residues")
        for i, A in enumerate(s.residues):
            d = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
            if abs(d) > _DET_TOL * max(1.0, float(np.linalg.norm(A)) ** 2):
                raise DetNonzero(f"residue A{i + 1} has determinant {d:.3g}")
        if s.t in (0, 1):
            raise ValueError("PVI needs t outside {0, 1}")
        A1, A2, A3 = s.residues
        return RationalConnection(2, (Pole(0, (A1,)), Pole(1, (A2,)), Pole(s.t, (A3,))), validate=False)
    raise ValueError(f"P{s.kind} has no untwisted finite-pole form")


def choose_twist(Ainf: np.ndarray) -> complex:
    """Nonzero eigenvalue of ``Ainf``: larger modulus, then larger real part.

    Raises
    ------
    NoNonzeroTwist
    """
    ev = np.linalg.eigvals(Ainf)
    scale = max(1.0, float(np.linalg.norm(Ainf)))
    good = [complex(e) for e in ev if abs(e) > 1e-12 * scale]
    if not good:
        raise NoNonzeroTwist("both candidate twists vanish")
    good.sort(key=lambda e: (-round(abs(e), 12), -round(e.real, 12)))
    return good[0]


def mobius_twist(conn: RationalConnection, t2: complex, lam: complex | None = None):
    """Pull back by ``x = (t2 - 1) xi / (t2 - xi)`` and twist by ``(xi - t2)^{-lam}``.

    Returns
    -------
    RationalConnection
        With poles at the images of the original poles plus ``t2`` and
        residue ``lam I`` at infinity.
    lam : complex
        The twist used (chosen by :func:`choose_twist` when not given).
    """
    t2 = complex(t2)
    if t2 in (0, 1):
        raise ValueError("t2 must avoid 0 and 1")
    al, be, ga, de = t2 - 1, 0.0, -1.0, t2
    xp = -de / ga
    m = conn.m
    Ainf = -sum((p.coeffs[0] for p in conn.poles), np.zeros((m, m), dtype=complex))
    if lam is None:
        lam = choose_twist(Ainf)
    lam = complex(lam)
    poles = []
    for p in conn.poles:
        den = al - p.a * ga
        if abs(den) < 1e-12:
            raise ValueError(f"pole {p.a} is sent to infinity")
        xa = -(be - p.a * de) / den
        new = [np.zeros((m, m), dtype=complex) for _ in range(p.r + 1)]
        new[0] += p.coeffs[0]
        for j in range(1, p.r + 1):
            c = (al * de - be * ga) * ga ** (j - 1) / den ** (j + 1)
            for l in range(1, j + 1):
                new[l] += c * comb(j - 1, j - l) * (xa - xp) ** (l - 1) * p.coeffs[j]
        poles.append(Pole(xa, tuple(new)))
    poles.append(Pole(xp, (Ainf - lam * np.eye(m),)))
    return RationalConnection(m, tuple(poles)), lam


def linear_problem(kind: str, state: PainleveState) -> RationalConnection:
    """The linear problem of ``kind`` at ``state``, twisted where needed.

    V and IV are returned as printed; III in ``xi = z/(z-1)``, II and I in
    ``xi = 1/z`` with their printed twists; VI after :func:`mobius_twist`
    with ``t2 = state.t2`` (default ``DEFAULT_T2``).

    Raises
    ------
    DetNonzero
        A PVI residue does not have rank one.
    NoNonzeroTwist
    """
    kind = normalize_kind(kind)
    if kind != state.kind:
        raise ValueError(f"state is P{state.kind}, not P{kind}")
    s = state
    if kind in ("V", "IV"):
        return _raw_problem(s)
    if kind == "III":
        a1, a2 = _theta(s, "thinf1", "thinf2")
        A0, A1, A2 = (_m(a) for a in data.piii_linear(s.q, s.p, s.t, s.u, a1, a2))
        return RationalConnection(2, (Pole(0, (A1, -A2)), Pole(1, (-(A1 + a2 * _eye()), -A0))))
    if kind == "II":
        (a2,) = _theta(s, "thinf2")
        A0, A1, A2 = (_m(a) for a in data.pii_linear(s.q, s.p, s.t, s.u, a2))
        return RationalConnection(2, (Pole(0, (a2 * _eye(), -A2, -A1, -A0)),))
    if kind == "I":
        lam = s.theta.get("lam")
        if lam is None:
            raise ValueError("PI needs the twist parameter lam")
        A0, A1, A2 = (_m(a) for a in data.pi_linear(s.q, s.p, s.t))
        return RationalConnection(2, (Pole(0, (-lam * _eye(), -A2, -A1, -A0)),))
    conn, _ = mobius_twist(_raw_problem(s), s.t2 if s.t2 is not None else DEFAULT_T2, s.theta.get("lam"))
    return conn


def rank4_problem(kind: str, state: PainleveState) -> RationalConnection:
    """V, IV or VI after the Moebius pullback and twist (the rank-four routes)."""
    kind = normalize_kind(kind)
    if kind not in ("V", "IV", "VI"):
        raise ValueError("the rank-four route exists for VI, V and IV")
    if kind != state.kind:
        raise ValueError(f"state is P{state.kind}, not P{kind}")
    conn, _ = mobius_twist(_raw_problem(state), state.t2 if state.t2 is not None else DEFAULT_T2,
                           state.theta.get("lam"))
    return conn


def pvi_residues(vectors: Sequence) -> tuple:
    """Rank-one residues ``A_i = a_i b_i^T`` from pairs ``(a_i, b_i)`` (convenience plumbing)."""
    out = []
    for a, b in vectors:
        out.append(np.outer(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)))
    if len(out) != 3:
        raise ValueError("PVI needs three residues")
    return tuple(out)


def random_pvi_residues(seed: int = 0) -> tuple:
    """Three random rank-one residues with O(1) entries (convenience plumbing)."""
    rng = np.random.default_rng(seed)
    pairs = [(rng.normal(size=2) + 1j * rng.normal(size=2), 0.5 * (rng.normal(size=2) + 1j * rng.normal(size=2)))
             for _ in range(3)]
    return pvi_residues(pairs)
