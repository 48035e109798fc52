"""Generalized Okubo systems and their extended Pfaffian frames.

A generalized Okubo system is the pair ``(T, B_inf)`` of the linear system
``(z - T) Y' = -B_inf Y`` with ``B_inf = diag(lambda)``.  Its isomonodromic
extension is carried here by :class:`ExtOkuboFrame`, which adds a frame
``P`` putting ``T`` into block upper-triangular Toeplitz form

    P^{-1} T P = Z_1 + ... + Z_n,   Z_k = sum_l z_{k,l} Lambda_k^l,

where the ``z_{k,l}`` are the canonical coordinates of the deformation
space.  Along a deformation ``(z_{k,l})`` moves and ``(T, P)`` follow the
flow

    dT = -Omega - [Omega, B_inf],   Omega = -P dZ P^{-1},   dP = X P,

with ``X`` the minimum norm solution of ``[X, T] = -[Omega, B_inf]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    BadSpectrum,
    Degenerate,
    IndexOutOfRange,
    NotRegular,
    PoleHit,
    Resonant,
    SingularFrame,
    StepFailure,
    ZeroSubdiagonal,
)
from .matkit import (
    DEFAULT_TOL,
    Tolerances,
    _min_norm_solve,
    as_cmatrix,
    commutator,
    fnorm,
    jordanize,
    shift,
)
from .report import ResidualReport

__all__ = [
    "GOkuboSystem",
    "ExtOkuboFrame",
    "DirectionData",
    "check_nonresonance",
    "assemble_z",
    "directions",
    "direction_matrix",
    "canonical_frame",
    "direction_data",
    "omega_tilde",
    "integrability_residuals",
    "extend_deformation",
    "flow_frame",
    "euler_shift",
    "confluence_frame",
    "rank_reduce",
]

RESONANCE_TOL = 1e-8
# an integration is abandoned once T or the frame grows beyond this size
BLOWUP = 1e8


def check_nonresonance(lam: Sequence[complex], tol: float = RESONANCE_TOL) -> None:
    """Raise :class:`Resonant` if two entries differ by a nonzero integer.

    Exact equalities are allowed.
    """
    lam = np.asarray(lam, dtype=complex)
    for i in range(len(lam)):
        for j in range(i + 1, len(lam)):
            d = lam[i] - lam[j]
            k = round(d.real)
            if k != 0 and abs(d - k) < tol:
                raise Resonant(f"lambda_{i + 1} - lambda_{j + 1} = {d} is a nonzero integer")


@dataclass(frozen=True)
class GOkuboSystem:
    """The pair ``(T, B_inf)`` with ``B_inf = diag(lam)``.

    Construction checks non-resonance unless ``validate=False``.
    """

    T: np.ndarray
    lam: np.ndarray
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        T = as_cmatrix(self.T)
        if T.shape[0] != T.shape[1]:
            raise ValueError("T must be square")
        lam = np.array(self.lam, dtype=complex).reshape(-1)
        if lam.shape[0] != T.shape[0]:
            raise ValueError("lambda must have one entry per row of T")
        if not np.all(np.isfinite(lam)):
            raise ValueError("lambda has non-finite entries")
        T.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "lam", lam)
        if self.validate:
            check_nonresonance(lam)

    @property
    def N(self) -> int:
        return self.T.shape[0]

    @property
    def B_inf(self) -> np.ndarray:
        return np.diag(self.lam)

    def connection(self, z: complex) -> np.ndarray:
        """``A(z) = -(z - T)^{-1} B_inf``."""
        return -np.linalg.solve(z * np.eye(self.N) - self.T, self.B_inf)


def directions(blocks: Sequence[int]) -> list:
    """Canonical directions ``(k, l)`` in row-major order."""
    return [(k, l) for k, m in enumerate(blocks) for l in range(m)]


def assemble_z(blocks: Sequence[int], z: Sequence[complex]) -> np.ndarray:
    """``Z_1 + ... + Z_n`` from the flat list of canonical coordinates."""
    n = int(sum(blocks))
    out = np.zeros((n, n), dtype=complex)
    z = np.asarray(z, dtype=complex)
    i = o = 0
    for m in blocks:
        lam = shift(m)
        pw = np.eye(m, dtype=complex)
        for _ in range(m):
            out[o:o + m, o:o + m] += z[i] * pw
            pw = pw @ lam
            i += 1
        o += m
    return out


def direction_matrix(blocks: Sequence[int], k: int, l: int) -> np.ndarray:
    """``E_{k,l}``: ``Lambda_k^l`` in block ``k``, zero elsewhere."""
    if not (0 <= k < len(blocks)) or not (0 <= l < blocks[k]):
        raise IndexOutOfRange(f"direction ({k}, {l}) does not exist for blocks {tuple(blocks)}")
    n = int(sum(blocks))
    o = int(sum(blocks[:k]))
    m = blocks[k]
    out = np.zeros((n, n), dtype=complex)
    out[o:o + m, o:o + m] = np.eye(m, k=l)
    return out


def _read_z(Z: np.ndarray, blocks: Sequence[int]) -> np.ndarray:
    z = []
    o = 0
    for m in blocks:
        z.extend(Z[o, o:o + m])
        o += m
    return np.array(z, dtype=complex)


def _leading(blocks: Sequence[int], z: np.ndarray) -> np.ndarray:
    idx = np.concatenate([[0], np.cumsum(blocks)[:-1]]).astype(int)
    return z[idx]


def _delta_hred(z0: np.ndarray) -> complex:
    out = 1.0 + 0j
    for i in range(len(z0)):
        for j in range(i + 1, len(z0)):
            out *= (z0[i] - z0[j]) ** 2
    return out


@dataclass(frozen=True)
class ExtOkuboFrame:
    """A point of the deformation space.

    Attributes
    ----------
    sys : GOkuboSystem
    P : ndarray
        Frame with ``P^{-1} T P = Z_1 + ... + Z_n``.
    blocks : tuple of int
        Block sizes ``m_k``.
    zCoords : ndarray
        Canonical coordinates ``z_{k,l}`` in row-major ``(k, l)`` order.
    """

    sys: GOkuboSystem
    P: np.ndarray
    blocks: tuple
    zCoords: np.ndarray
    Pinv: np.ndarray = field(init=False, repr=False, compare=False)
    structure_residual: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        P = as_cmatrix(self.P, self.sys.N, self.sys.N)
        blocks = tuple(int(b) for b in self.blocks)
        if sum(blocks) != self.sys.N or any(b < 1 for b in blocks):
            raise ValueError(f"blocks {blocks} do not partition {self.sys.N}")
        z = np.array(self.zCoords, dtype=complex).reshape(-1)
        if z.shape[0] != self.sys.N:
            raise ValueError("need one canonical coordinate per row")
        try:
            Pinv = np.linalg.inv(P)
        except np.linalg.LinAlgError as exc:
            raise SingularFrame("frame P is singular") from exc
        resid = fnorm(Pinv @ self.sys.T @ P - assemble_z(blocks, z))
        for a in (P, Pinv, z):
            a.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "zCoords", z)
        object.__setattr__(self, "Pinv", Pinv)
        object.__setattr__(self, "structure_residual", resid)

    @classmethod
    def from_basis(cls, sys: GOkuboSystem, P, blocks: Sequence[int],
                   tol: Tolerances = DEFAULT_TOL) -> "ExtOkuboFrame":
        """Build a frame from a known ``P``, reading the coordinates off ``P^{-1} T P``.

        Raises
        ------
        SingularFrame
            ``P^{-1} T P`` is not block upper-triangular Toeplitz.
        """
        P = as_cmatrix(P, sys.N, sys.N)
        Z = np.linalg.solve(P, sys.T @ P)
        z = _read_z(Z, blocks)
        frame = cls(sys, P, tuple(blocks), z)
        scale = max(1.0, fnorm(Z))
        if frame.structure_residual > math.sqrt(tol.residual) * 1e-2 * scale:
            raise SingularFrame(
                f"P^-1 T P is not block Toeplitz (residual {frame.structure_residual:.3g})"
            )
        return frame

    @property
    def T(self) -> np.ndarray:
        return self.sys.T

    @property
    def lam(self) -> np.ndarray:
        return self.sys.lam

    @property
    def N(self) -> int:
        return self.sys.N

    @property
    def Z(self) -> np.ndarray:
        return assemble_z(self.blocks, self.zCoords)

    @property
    def leading(self) -> np.ndarray:
        """Block eigenvalues ``z_{k,0}``."""
        return _leading(self.blocks, self.zCoords)

    @property
    def delta_hred(self) -> complex:
        return _delta_hred(self.leading)

    def directions(self) -> list:
        return directions(self.blocks)

    def with_system(self, sys: GOkuboSystem) -> "ExtOkuboFrame":
        return ExtOkuboFrame(sys, self.P, self.blocks, self.zCoords)


@dataclass(frozen=True)
class DirectionData:
    """``Omega~`` and ``dT`` evaluated on the canonical direction ``(k, l)``."""

    k: int
    l: int
    omegaTilde: np.ndarray
    dT: np.ndarray


def _weight_factor(lam: np.ndarray) -> np.ndarray:
    # F_ij = 1 + lambda_j - lambda_i
    return 1.0 + lam[None, :] - lam[:, None]


def omega_tilde(frame: ExtOkuboFrame, zeta: Sequence[complex]) -> np.ndarray:
    """``Omega~`` contracted with the tangent vector ``zeta`` (in canonical coordinates)."""
    E = assemble_z(frame.blocks, zeta)
    return -frame.P @ E @ frame.Pinv


def direction_data(frame: ExtOkuboFrame, k: int, l: int) -> DirectionData:
    """Pfaffian data on the canonical direction ``d/dz_{k,l}``.

    Raises
    ------
    IndexOutOfRange
    """
    E = direction_matrix(frame.blocks, k, l)
    om = -frame.P @ E @ frame.Pinv
    return DirectionData(k, l, om, -_weight_factor(frame.lam) * om)


def canonical_frame(sys: GOkuboSystem, tol: Tolerances = DEFAULT_TOL) -> ExtOkuboFrame:
    """Jordan frame of a regular ``T``.

    Raises
    ------
    NotRegular
        Some eigenvalue occupies two Jordan blocks.
    Degenerate
        ``delta_Hred`` is below tolerance.
    """
    P, spec, _ = jordanize(sys.T, tol)
    if not spec.is_regular(tol.cluster):
        raise NotRegular(f"T is not regular: Jordan type {spec.blocks}")
    blocks = spec.sizes
    frame = ExtOkuboFrame.from_basis(sys, P, blocks, tol)
    z0 = frame.leading
    scale = max(1.0, float(np.max(np.abs(z0))))
    if len(z0) > 1 and min(abs(a - b) for i, a in enumerate(z0) for b in z0[i + 1:]) <= tol.cluster * scale:
        raise Degenerate("block eigenvalues coalesce")
    return frame


# -- the deformation flow -----------------------------------------------------


class _FlowRHS:
    def __init__(self, sys: GOkuboSystem, blocks, velocity):
        self.n = sys.N
        self.lam = sys.lam
        self.B = np.diag(sys.lam)
        self.F = _weight_factor(sys.lam)
        self.blocks = blocks
        self.velocity = velocity

    def unpack(self, y):
        n2 = self.n * self.n
        return y[:n2].reshape(self.n, self.n), y[n2:].reshape(self.n, self.n)

    def __call__(self, s, y):
        T, P = self.unpack(y)
        Pinv = np.linalg.inv(P)
        zeta = self.velocity(T, P, Pinv)
        om = -P @ assemble_z(self.blocks, zeta) @ Pinv
        dT = -self.F * om
        X = _min_norm_solve(T, -commutator(om, self.B), 0.0, rank=self.n * (self.n - 1))
        return np.concatenate([dT.reshape(-1), (X @ P).reshape(-1)])


def _integrate(start: ExtOkuboFrame, velocity, s_eval, tol: Tolerances, rtol=1e-10, atol=1e-12):
    rhs = _FlowRHS(start.sys, start.blocks, velocity)
    y0 = np.concatenate([np.array(start.T).reshape(-1), np.array(start.P).reshape(-1)])
    s_eval = np.asarray(s_eval, dtype=float)
    s_end = float(s_eval[-1])

    def blowup(s, y):
        T, P = rhs.unpack(y)
        return BLOWUP - max(np.abs(T).max(), np.abs(P).max(), 1.0 / max(np.abs(P).max(), 1e-300))

    blowup.terminal = True
    try:
        sol = solve_ivp(rhs, (0.0, s_end), y0, method="DOP853", t_eval=s_eval,
                        rtol=rtol, atol=atol, events=blowup)
    except np.linalg.LinAlgError as exc:
        raise PoleHit(f"frame became singular during integration: {exc}") from exc
    if sol.status == 1:
        raise PoleHit(f"solution left the bounded region near s = {sol.t_events[0][0]:.6g}")
    if sol.status != 0:
        y = sol.y[:, -1] if sol.y.size else y0
        if not np.all(np.isfinite(y)) or np.abs(y).max() > BLOWUP / 10:
            raise PoleHit(f"integration diverged: {sol.message}")
        raise StepFailure(sol.message)
    return [rhs.unpack(sol.y[:, i]) for i in range(sol.y.shape[1])]


def flow_frame(start: ExtOkuboFrame, velocity, s_eval: Sequence[float] = (0.0, 1.0),
               tol: Tolerances = DEFAULT_TOL, rtol: float = 1e-10, atol: float = 1e-12) -> list:
    """Integrate the deformation flow with a general velocity field.

    Parameters
    ----------
    start : ExtOkuboFrame
    velocity : array_like or callable
        Tangent vector in canonical coordinates, constant or a callable
        ``velocity(T, P, Pinv) -> zeta``.
    s_eval : sequence of float
        Increasing parameter values, starting at 0, where frames are returned.

    Returns
    -------
    list of ExtOkuboFrame
    """
    if not callable(velocity):
        const = np.asarray(velocity, dtype=complex)
        if not np.any(const):
            return [start for _ in s_eval]
        vel = lambda T, P, Pinv: const  # noqa: E731
    else:
        vel = velocity
    s_eval = np.asarray(s_eval, dtype=float)
    if s_eval[0] != 0.0 or np.any(np.diff(s_eval) <= 0):
        raise ValueError("s_eval must start at 0 and increase strictly")
    if len(s_eval) == 1:
        return [start]
    pairs = _integrate(start, vel, s_eval, tol, rtol, atol)
    frames = []
    for T, P in pairs:
        sys = GOkuboSystem(T, start.lam, validate=False)
        Z = np.linalg.solve(P, T @ P)
        frames.append(ExtOkuboFrame(sys, P, start.blocks, _read_z(Z, start.blocks)))
    return frames


def _min_gap_on_segment(z0a, z0b) -> float:
    """Minimum over s in [0,1] of the smallest pairwise gap of the leading coordinates."""
    best = np.inf
    for i in range(len(z0a)):
        for j in range(i + 1, len(z0a)):
            a = z0a[i] - z0a[j]
            b = (z0b[i] - z0b[j]) - a
            s = 0.0 if b == 0 else float(np.clip(-(np.conj(b) * a).real / abs(b) ** 2, 0.0, 1.0))
            best = min(best, abs(a + s * b))
    return best


def extend_deformation(start: ExtOkuboFrame, targetZ: Sequence[complex],
                       tol: Tolerances = DEFAULT_TOL, samples: int = 2) -> list:
    """Continue a frame along the straight line to ``targetZ`` in canonical coordinates.

    Parameters
    ----------
    start : ExtOkuboFrame
    targetZ : sequence of complex
        Target canonical coordinates.
    samples : int
        Number of equally spaced frames returned, endpoints included.

    Raises
    ------
    PoleHit
        ``delta_Hred`` collapses on the segment or the solution blows up.
    StepFailure
    """
    target = np.asarray(targetZ, dtype=complex).reshape(-1)
    if target.shape != start.zCoords.shape:
        raise ValueError("targetZ has the wrong length")
    if samples < 2:
        raise ValueError("need at least two samples")
    zeta = target - start.zCoords
    s_eval = np.linspace(0.0, 1.0, samples)
    if not np.any(zeta):
        return [start for _ in s_eval]
    za, zb = start.leading, _leading(start.blocks, target)
    scale = max(1.0, float(np.max(np.abs(np.concatenate([za, zb])))))
    if len(za) > 1 and _min_gap_on_segment(za, zb) <= tol.cluster * scale:
        raise PoleHit("block eigenvalues collide on the deformation segment")
    frames = flow_frame(start, zeta, s_eval, tol)
    end = frames[-1]
    err = float(np.max(np.abs(end.zCoords - target)))
    if err > 1e2 * tol.residual * max(1.0, float(np.max(np.abs(target)))):
        raise StepFailure(f"endpoint missed the target coordinates by {err:.3g}")
    return frames


# -- residuals ----------------------------------------------------------------


# steps of the fixed-step RK4 used for the stencil flows
STENCIL_STEPS = 8


class _StencilPoint(NamedTuple):
    T: np.ndarray
    P: np.ndarray
    Pinv: np.ndarray


def _rk_flow(fr: ExtOkuboFrame, zeta: np.ndarray, steps: int = STENCIL_STEPS) -> _StencilPoint:
    """Short constant-velocity flow by fixed-step RK4, carrying ``P^{-1}`` along.

    The stencil differences divide by the step, so what matters is that the
    end point be a smooth function of the start: a fixed step sequence
    has no tolerance-driven jumps, and propagating ``dP^{-1} = -P^{-1} X``
    avoids re-inverting an ill-conditioned ``P``.
    """
    n = fr.N
    n2 = n * n
    F = _weight_factor(fr.lam)
    B = fr.sys.B_inf
    E = assemble_z(fr.blocks, zeta)

    def rhs(y):
        T, P, Pi = y[:n2].reshape(n, n), y[n2:2 * n2].reshape(n, n), y[2 * n2:].reshape(n, n)
        om = -P @ E @ Pi
        X = _min_norm_solve(T, -commutator(om, B), 0.0, rank=n * (n - 1))
        return np.concatenate([(-F * om).reshape(-1), (X @ P).reshape(-1), (-Pi @ X).reshape(-1)])

    y = np.concatenate([np.asarray(fr.T).reshape(-1), np.asarray(fr.P).reshape(-1), np.asarray(fr.Pinv).reshape(-1)])
    ds = 1.0 / steps
    for _ in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + ds / 2 * k1)
        k3 = rhs(y + ds / 2 * k2)
        k4 = rhs(y + ds * k3)
        y = y + ds / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return _StencilPoint(y[:n2].reshape(n, n), y[n2:2 * n2].reshape(n, n), y[2 * n2:].reshape(n, n))


def _stencil(fr: ExtOkuboFrame, index: int, h: float, tol: Tolerances) -> dict:
    """Points at offsets ``-2h, -h, h, 2h`` along canonical coordinate ``index``."""
    out = {}
    for k in (-2, -1, 1, 2):
        unit = np.zeros(fr.N, dtype=complex)
        unit[index] = k * h
        out[k] = _rk_flow(fr, unit)
    return out


def _d4(f, st: dict, h: float):
    """Fourth-order central difference of ``f(frame)`` on a stencil."""
    return (8 * (f(st[1]) - f(st[-1])) - (f(st[2]) - f(st[-2]))) / (12 * h)


def _fd_step(value: complex, rel: float) -> float:
    """Step of the fourth-order residual stencils.

    ``rel`` is the relative step of a second-order rule, optimal at a noise
    level ``rel**3``; the fourth-order rule at the same noise wants
    ``rel**(3/5)``.  Powers of two keep ``z + h - z == h`` exact.
    """
    h = rel ** 0.6 * max(1.0, abs(value))
    return 2.0 ** math.floor(math.log2(h))


def _label(d) -> str:
    return f"{d[0]},{d[1]}"


def integrability_residuals(path: Sequence[ExtOkuboFrame], tol: Tolerances = DEFAULT_TOL) -> ResidualReport:
    """Residuals of the integrability conditions at every frame of ``path``.

    Conditions
    ----------
    ``commute``
        ``||[T, Omega~_d]||`` per direction.
    ``wedge``
        ``||[Omega~_d, Omega~_d']||`` per direction pair.
    ``closed``
        Central-difference curl ``||d_d' Omega~_d - d_d Omega~_d'||``.
    ``dT``
        ``||d_d T + Omega~_d + [Omega~_d, B_inf]||`` by central differences.

    The derivatives are fourth-order central differences on a local stencil
    regenerated from each frame by short flows (step from :func:`_fd_step`),
    so the sample spacing of ``path`` does not enter.
    """
    rep = ResidualReport()
    for i, fr in enumerate(path):
        dirs = fr.directions()
        B = fr.sys.B_inf
        E = [direction_matrix(fr.blocks, *d) for d in dirs]
        om = [-fr.P @ e @ fr.Pinv for e in E]
        for d, o in zip(dirs, om):
            rep.add(i, _label(d), "commute", fnorm(commutator(fr.T, o)))
        for a in range(len(dirs)):
            for b in range(a + 1, len(dirs)):
                rep.add(i, f"{_label(dirs[a])}|{_label(dirs[b])}", "wedge", fnorm(commutator(om[a], om[b])))
        # derivatives of Omega~_a in direction b, and of T
        d_om = {}
        for b, db in enumerate(dirs):
            h = _fd_step(fr.zCoords[b], tol.fdStep)
            st = _stencil(fr, b, h, tol)
            dT = _d4(lambda f: f.T, st, h)
            rep.add(i, _label(db), "dT", fnorm(dT + om[b] + commutator(om[b], B)))
            for a in range(len(dirs)):
                d_om[a, b] = _d4(lambda f, e=E[a]: -f.P @ e @ f.Pinv, st, h)
        for a in range(len(dirs)):
            for b in range(a + 1, len(dirs)):
                rep.add(i, f"{_label(dirs[a])}|{_label(dirs[b])}", "closed",
                        fnorm(d_om[a, b] - d_om[b, a]))
    return rep


# -- transformations ----------------------------------------------------------


def euler_shift(sys: GOkuboSystem, lam: complex) -> GOkuboSystem:
    """Euler transform: ``(T, B_inf) -> (T, B_inf - lam I)``.

    Raises
    ------
    Resonant
        The shifted exponents violate non-resonance.  Since only differences
        enter, this happens exactly when the input was already resonant
        (possible for systems built with ``validate=False``).
    """
    return GOkuboSystem(sys.T, np.asarray(sys.lam) - lam)


def confluence_frame(zBlock: Sequence[complex], eps: complex):
    """Diagonalizable approximation of one Toeplitz block.

    Returns ``(Pk, Zk_eps)`` with ``Zk_eps = diag(z_0 + j z_1 eps)`` and
    ``Pk Zk_eps Pk^{-1} -> Z_k`` as ``eps -> 0``.

    Raises
    ------
    ZeroSubdiagonal
        ``z_1 = 0`` for a block of size at least two.
    """
    z = np.asarray(zBlock, dtype=complex).reshape(-1)
    m = len(z)
    if eps == 0:
        raise ValueError("eps must be nonzero")
    Zeps = np.diag(z[0] + np.arange(m) * (z[1] * eps if m > 1 else 0.0)).astype(complex)
    if m == 1:
        return np.ones((1, 1), dtype=complex), Zeps
    if z[1] == 0:
        raise ZeroSubdiagonal("z_{k,1} must be nonzero")
    a = np.zeros(m, dtype=complex)
    a[0] = 1.0
    for l in range(1, m):
        a[l] = sum(a[j] * z[l - j] for j in range(l)) / (l * eps * z[1])
    P = sum(a[l] * np.linalg.matrix_power(shift(m), l) for l in range(m))
    return P, Zeps


def rank_reduce(sys: GOkuboSystem, tol: Tolerances = DEFAULT_TOL, frame: ExtOkuboFrame | None = None):
    """Reduce a system with ``lambda = (lambda_1..lambda_m, 0, ..., 0)`` to rank ``m``.

    The reduced connection is ``-B (z - S)^{-1} C`` with ``S = P^{-1} T P``,
    ``B`` the first ``m`` rows of ``P`` and ``C`` the first ``m`` columns of
    ``P^{-1}`` times ``diag(lambda_1..lambda_m)``; equivalently the top-left
    ``m x m`` block of ``-(z - T)^{-1} B_inf``.

    Parameters
    ----------
    sys : GOkuboSystem
    frame : ExtOkuboFrame, optional
        A frame of ``sys``; computed with :func:`canonical_frame` if omitted.

    Returns
    -------
    RationalConnection

    Raises
    ------
    BadSpectrum
        The exponents are not of the required shape.
    """
    from .realize import RationalConnection

    lam = np.asarray(sys.lam)
    scale = max(1.0, float(np.max(np.abs(lam))))
    zero = np.abs(lam) <= 1e-12 * scale
    m = int(np.sum(~zero))
    if m == 0 or np.any(zero[:m]) or not np.all(zero[m:]):
        raise BadSpectrum(f"expected nonzero exponents followed by zeros, got {lam}")
    if frame is None:
        frame = canonical_frame(sys, tol)
    P, Pinv = frame.P, frame.Pinv
    Bm = P[:m, :]
    Cm = Pinv[:, :m] * lam[:m][None, :]
    poles = []
    o = i = 0
    for mk in frame.blocks:
        zk = frame.zCoords[i:i + mk]
        nil = sum(zk[l] * np.linalg.matrix_power(shift(mk), l) for l in range(1, mk)) if mk > 1 else np.zeros((1, 1))
        Bk, Ck = Bm[:, o:o + mk], Cm[o:o + mk, :]
        coeffs = []
        pw = np.eye(mk, dtype=complex)
        for _ in range(mk):
            coeffs.append(-Bk @ pw @ Ck)
            pw = pw @ nil
        a = complex(zk[0])
        # blocks sharing an eigenvalue (non-regular T) add up to one pole
        for q in poles:
            if abs(q[0] - a) <= 1e-12 * max(1.0, abs(a)):
                short, long_ = sorted((q[1], coeffs), key=len)
                q[1] = [c + (short[j] if j < len(short) else 0) for j, c in enumerate(long_)]
                break
        else:
            poles.append([a, coeffs])
        o += mk
        i += mk
    return RationalConnection.from_poles(m, [(a, c) for a, c in poles])
