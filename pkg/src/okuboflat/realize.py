"""State-space realization of rational connections as generalized Okubo systems.

A connection

    dY/dz = sum_k sum_l A_k^{(l)} / (z - a_k)^{l+1} Y

with a regular singularity at infinity and diagonal residue there,
``R~ = -sum_k A_k^{(0)}``, is written as ``-B (z - S)^{-1} C`` with ``S`` in
Jordan form.  Completing ``C R~^{-1}`` to an invertible ``G`` gives the
generalized Okubo system ``T = G^{-1} S G``, ``B_inf = diag(R~, 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import CompletionFailure, RankAmbiguity, SingularRtilde
from .matkit import DEFAULT_TOL, JordanSpec, Tolerances, _nilpotent_chains, as_cmatrix, fnorm
from .okubo import ExtOkuboFrame, GOkuboSystem, _read_z

__all__ = [
    "Pole",
    "RationalConnection",
    "Realization",
    "realize",
    "minimize",
    "to_okubo",
    "realization_frame",
    "probe_points",
    "relative_error",
]

_GRAY_RANK = 100.0


class Pole(NamedTuple):
    """A pole ``a`` with coefficients ``A^{(0)}, ..., A^{(r)}`` (``A^{(l)}`` multiplies ``(z-a)^{-l-1}``)."""

    a: complex
    coeffs: tuple

    @property
    def r(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class RationalConnection:
    """An ``m x m`` rational connection given by its principal parts.

    Raises
    ------
    ValueError
        Poles coincide, shapes mismatch, or the residue at infinity is not
        diagonal (off-diagonal leakage above 1e-10 relative).
    """

    m: int
    poles: tuple
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        poles = []
        for p in self.poles:
            a, coeffs = (p.a, p.coeffs) if isinstance(p, Pole) else p
            if len(coeffs) == 0:
                raise ValueError("a pole needs at least one coefficient")
            cs = tuple(as_cmatrix(c, self.m, self.m) for c in coeffs)
            for c in cs:
                c.setflags(write=False)
            poles.append(Pole(complex(a), cs))
        object.__setattr__(self, "poles", tuple(poles))
        locs = [p.a for p in poles]
        for i in range(len(locs)):
            for j in range(i + 1, len(locs)):
                if abs(locs[i] - locs[j]) <= 1e-12 * max(1.0, abs(locs[i])):
                    raise ValueError(f"poles {locs[i]} and {locs[j]} coincide")
        if self.validate:
            R = self.Rtilde
            off = R - np.diag(np.diag(R))
            if fnorm(off) > 1e-10 * max(1.0, fnorm(R)):
                raise ValueError(f"residue at infinity is not diagonal (leakage {fnorm(off):.3g})")

    @classmethod
    def from_poles(cls, m: int, poles, validate: bool = True) -> "RationalConnection":
        return cls(m, tuple(Pole(complex(a), tuple(c)) for a, c in poles), validate)

    @property
    def Rtilde(self) -> np.ndarray:
        """``-sum_k A_k^{(0)}``, minus the residue at infinity."""
        out = np.zeros((self.m, self.m), dtype=complex)
        for p in self.poles:
            out -= p.coeffs[0]
        return out

    @property
    def degree(self) -> int:
        return sum(p.r + 1 for p in self.poles)

    def evaluate(self, z: complex) -> np.ndarray:
        out = np.zeros((self.m, self.m), dtype=complex)
        for p in self.poles:
            w = 1.0 / (z - p.a)
            wp = w
            for c in p.coeffs:
                out += c * wp
                wp = wp * w
        return out


@dataclass(frozen=True)
class Realization:
    """``-B (z - S)^{-1} C`` with ``S`` in Jordan form and its completion ``G``."""

    S: np.ndarray
    B: np.ndarray
    C: np.ndarray
    G: np.ndarray
    lambdaOut: np.ndarray
    minimal: bool = False

    def __post_init__(self):
        for name in ("S", "B", "C", "G", "lambdaOut"):
            a = np.array(getattr(self, name), dtype=complex)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def N(self) -> int:
        return self.S.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[0]

    @property
    def Ginv(self) -> np.ndarray:
        return np.linalg.inv(self.G)

    def evaluate(self, z: complex) -> np.ndarray:
        return -self.B @ np.linalg.solve(z * np.eye(self.N) - self.S, self.C)

    def jordan_spec(self) -> JordanSpec:
        return _spec_of_jordan(self.S)


def _blocks_of_jordan(S: np.ndarray) -> list:
    """``(eigenvalue, size)`` of each block of a matrix in Jordan form, in order."""
    n = S.shape[0]
    blocks = []
    start = 0
    for i in range(1, n + 1):
        if i == n or abs(S[i - 1, i]) < 0.5:
            blocks.append((complex(S[start, start]), i - start))
            start = i
    return blocks


def _sizes_in_order(S: np.ndarray) -> tuple:
    return tuple(sz for _, sz in _blocks_of_jordan(S))


def _spec_of_jordan(S: np.ndarray) -> JordanSpec:
    """Read the Jordan type of a matrix already in Jordan form."""
    return JordanSpec(tuple(_blocks_of_jordan(S)))


def _complete(S, B, C, Rt, minimal: bool) -> Realization:
    m, n = B.shape
    lam = np.diag(Rt)
    if np.any(np.abs(lam) <= 1e-12 * max(1.0, float(np.max(np.abs(lam))))):
        raise SingularRtilde(f"residue at infinity has a vanishing diagonal entry: {lam}")
    u, s, vh = np.linalg.svd(B)
    rank = int(np.sum(s > 1e-10 * s[0])) if s.size and s[0] > 0 else 0
    if rank != m:
        raise CompletionFailure(f"B has rank {rank}, expected {m}")
    ker = vh[m:].conj().T
    G = np.hstack([C / lam[None, :], ker])
    try:
        Ginv = np.linalg.inv(G)
    except np.linalg.LinAlgError as exc:
        raise CompletionFailure("G is singular") from exc
    if fnorm(Ginv[:m] - B) > 1e-8 * max(1.0, fnorm(B)) * max(1.0, np.linalg.cond(G)):
        raise CompletionFailure("the first rows of G^-1 do not reproduce B")
    return Realization(S, B, C, G, np.concatenate([lam, np.zeros(n - m)]), minimal)


def realize(conn: RationalConnection) -> Realization:
    """Block-companion realization, ``m (r_k + 1)`` states per pole.

    Each pole contributes ``m`` Jordan chains of length ``r_k + 1`` at
    ``a_k``; ``C`` injects into the top vector of each chain and ``B`` reads
    the coefficients off in reverse order.

    Raises
    ------
    SingularRtilde
    CompletionFailure
    """
    m = conn.m
    S_blocks, B_cols, C_rows = [], [], []
    for p in conn.poles:
        L = p.r + 1
        Sk = np.kron(np.eye(m), p.a * np.eye(L) + np.eye(L, k=1))
        Bk = np.zeros((m, m * L), dtype=complex)
        Ck = np.zeros((m * L, m), dtype=complex)
        for c in range(m):
            for i in range(L):
                Bk[:, c * L + i] = -p.coeffs[L - 1 - i][:, c]
            Ck[c * L + L - 1, c] = 1.0
        S_blocks.append(Sk)
        B_cols.append(Bk)
        C_rows.append(Ck)
    S = sla.block_diag(*S_blocks).astype(complex)
    B = np.hstack(B_cols)
    C = np.vstack(C_rows)
    return _complete(S, B, C, conn.Rtilde, minimal=False)


def _rank(s: np.ndarray, cutoff_rel: float, what: str) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    cut = cutoff_rel * s[0]
    amb = (s > cut / _GRAY_RANK) & (s < cut * _GRAY_RANK)
    if np.any(amb):
        raise RankAmbiguity(f"{what}: singular values {s[amb]} are too close to the cutoff {cut:.3g}")
    return int(np.sum(s > cut))


def _eigen_groups(S: np.ndarray, tol: float) -> list:
    d = np.diag(S)
    scale = max(1.0, float(np.max(np.abs(d))))
    groups: list = []
    for i, v in enumerate(d):
        for g in groups:
            if abs(d[g[0]] - v) <= tol * scale:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def minimize(real: Realization, tol: Tolerances = DEFAULT_TOL) -> Realization:
    """Remove unreachable and unobservable states pole by pole.

    For each eigenvalue ``a`` of ``S`` the nilpotent part is restricted to the
    block-Krylov span of ``C``, then quotiented by the kernel of the
    observability matrix of ``B``; the remainder is put back in Jordan form.

    Raises
    ------
    RankAmbiguity
        A singular value is within a factor 100 of the relative cutoff
        ``tol.cluster``.
    """
    S, B, C = real.S, real.B, real.C
    S_out, B_out, C_out = [], [], []
    for g in _eigen_groups(S, tol.cluster):
        k = len(g)
        a = complex(np.mean(np.diag(S)[g]))
        N = S[np.ix_(g, g)] - a * np.eye(k)
        Bg, Cg = B[:, g], C[g, :]
        kry = [Cg]
        for _ in range(k - 1):
            kry.append(N @ kry[-1])
        u, s, _ = np.linalg.svd(np.hstack(kry))
        r = _rank(s, tol.cluster, "controllability")
        if r == 0:
            continue
        V = u[:, :r]
        N1, B1, C1 = V.conj().T @ N @ V, Bg @ V, V.conj().T @ Cg
        obs = [B1]
        for _ in range(r - 1):
            obs.append(obs[-1] @ N1)
        _, s2, vh = np.linalg.svd(np.vstack(obs))
        r2 = _rank(s2, tol.cluster, "observability")
        if r2 == 0:
            continue
        W = vh[:r2].conj().T
        N2, B2, C2 = W.conj().T @ N1 @ W, B1 @ W, W.conj().T @ C1
        chains = _nilpotent_chains(N2, tol.cluster, max(1.0, fnorm(N2)))
        Pj = np.hstack(chains)
        sizes = [c.shape[1] for c in chains]
        J = sla.block_diag(*[a * np.eye(sz) + np.eye(sz, k=1) for sz in sizes])
        S_out.append(J)
        B_out.append(B2 @ Pj)
        C_out.append(np.linalg.solve(Pj, C2))
    if not S_out:
        raise CompletionFailure("the connection vanishes identically")
    S2 = sla.block_diag(*S_out).astype(complex)
    B2 = np.hstack(B_out)
    C2 = np.vstack(C_out)
    return _complete(S2, B2, C2, np.diag(np.diag(B @ C)), minimal=True)


def to_okubo(real: Realization, validate: bool = True) -> GOkuboSystem:
    """``T = G^{-1} S G`` and ``B_inf = diag(lambdaOut)``."""
    T = np.linalg.solve(real.G, real.S @ real.G)
    return GOkuboSystem(T, real.lambdaOut, validate=validate)


def realization_frame(real: Realization, validate: bool = True) -> ExtOkuboFrame:
    """The frame ``P = G^{-1}`` of :func:`to_okubo`, for which ``P^{-1} T P = S``.

    Unlike :func:`~okuboflat.okubo.canonical_frame` this needs no Jordan
    decomposition and works for non-regular ``S``, as produced by
    :func:`realize` before minimization.
    """
    sys = to_okubo(real, validate)
    sizes = _sizes_in_order(real.S)
    return ExtOkuboFrame(sys, real.Ginv, sizes, _read_z(real.S, sizes))


def probe_points(centres: Sequence[complex], count: int = 10, seed: int = 0) -> np.ndarray:
    """Deterministic probe points around ``centres``, away from each of them."""
    centres = np.asarray(list(centres), dtype=complex)
    rng = np.random.default_rng(seed)
    c0 = centres.mean() if centres.size else 0.0
    rad = max(1.0, float(np.max(np.abs(centres - c0)))) if centres.size else 1.0
    out = []
    while len(out) < count:
        z = c0 + 2 * rad * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if centres.size == 0 or np.min(np.abs(centres - z)) > 0.2 * rad:
            out.append(z)
    return np.array(out)


def relative_error(f, g, probes) -> float:
    """``max_z ||f(z) - g(z)|| / max(1e-300, ||f(z)||)`` over the probes."""
    worst = 0.0
    for z in probes:
        a, b = f(z), g(z)
        worst = max(worst, fnorm(a - b) / max(fnorm(a), 1e-300))
    return worst
