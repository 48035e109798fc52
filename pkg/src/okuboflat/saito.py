"""Flat (Saito) structures carried by extended Okubo frames.

With weights ``w_j = lambda_j - lambda_N + 1`` the matrix

    C_ij = -T_ij / (1 + w_j - w_i)

satisfies ``dC = Omega~``.  Its last row gives flat coordinates
``t_j = C_Nj`` whenever the Jacobian ``dt/dz`` is invertible; the Higgs
matrices ``Phi_m = dC/dt_m`` then obey the extended WDVV equations and

    g_j = (1 / (1 + w_j)) sum_i w_i t_i C_ij

is a potential vector field, ``C_ij = dg_j/dt_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import JacobianDegenerate, NotRegular, Resonant
from .matkit import DEFAULT_TOL, JordanSpec, Tolerances, as_cmatrix, commutator, fnorm, jordanize
from .okubo import (
    ExtOkuboFrame,
    GOkuboSystem,
    check_nonresonance,
    direction_matrix,
    directions,
    extend_deformation,
    flow_frame,
    _fd_step,
    _label,
    _d4,
    _stencil,
)
from .report import ResidualReport

__all__ = [
    "Weights",
    "SaitoFrame",
    "flat_frame",
    "flat_jacobian",
    "wdvv_residuals",
    "canonical_product_residual",
    "dC_residuals",
    "regularity_class",
    "classify_spec",
    "PATTERNS",
    "primitive_section_check",
    "make_primitive",
    "jacobian_check",
    "saito_from_initial",
    "verify_potential",
    "potential_sampler",
]

# Jordan patterns of the Painleve correspondences, keyed by dimension and partition
PATTERNS = {
    4: {"1111": "VI", "211": "V", "31": "IV", "22": "III", "4": "II"},
    3: {"111": "VI", "21": "V", "3": "IV"},
}


@dataclass(frozen=True)
class Weights:
    """Weights ``w`` of the flat coordinates, normalized by ``w_N = 1``."""

    w: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=complex).reshape(-1)
        if abs(w[-1] - 1) > 1e-12:
            raise ValueError("the last weight must equal 1")
        check_nonresonance(w)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_lambda(cls, lam: Sequence[complex]) -> "Weights":
        lam = np.asarray(lam, dtype=complex)
        return cls(lam - lam[-1] + 1)

    @property
    def N(self) -> int:
        return len(self.w)


@dataclass(frozen=True)
class SaitoFrame:
    """The flat structure at one point.

    Attributes
    ----------
    weights : Weights
    t : ndarray
        Flat coordinates.
    Cmat : ndarray
        The matrix ``C``, with ``C_ij = dg_j/dt_i``.
    higgs : tuple of ndarray
        ``Phi_m = dC/dt_m`` for ``m = 1..N``.
    g : ndarray
        Potential vector field.
    jacobianCond : float
        Condition number of ``dt/dz``.
    T : ndarray
        The underlying ``T``.
    jacobian : ndarray
        ``J[d, j] = dt_j/dz_d`` on the canonical directions.
    blocks : tuple of int
    """

    weights: Weights
    t: np.ndarray
    Cmat: np.ndarray
    higgs: tuple
    g: np.ndarray
    jacobianCond: float
    T: np.ndarray = field(repr=False)
    jacobian: np.ndarray = field(repr=False)
    blocks: tuple = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.t)


def _c_matrix(T: np.ndarray, w: np.ndarray) -> np.ndarray:
    return -T / (1.0 + w[None, :] - w[:, None])


def flat_jacobian(frame: ExtOkuboFrame) -> np.ndarray:
    """``J[d, j] = (Omega~_d)_{Nj}``, the derivative of ``t_j`` along direction ``d``."""
    rows = []
    for d in frame.directions():
        om = -frame.P @ direction_matrix(frame.blocks, *d) @ frame.Pinv
        rows.append(om[-1, :])
    return np.array(rows)


def jacobian_check(frame: ExtOkuboFrame, tol: Tolerances = DEFAULT_TOL):
    """``(ok, cond)``: invertibility of the flat-coordinate Jacobian."""
    cond = float(np.linalg.cond(flat_jacobian(frame)))
    return bool(np.isfinite(cond) and cond < 1.0 / tol.cluster), cond


def flat_frame(frame: ExtOkuboFrame, tol: Tolerances = DEFAULT_TOL) -> SaitoFrame:
    """Flat coordinates, ``C``, Higgs matrices and potential at ``frame``.

    Raises
    ------
    JacobianDegenerate
        The Jacobian ``dt/dz`` has condition number ``>= 1/tol.cluster``.
    Resonant
        Two weights differ by a nonzero integer.
    """
    weights = Weights.from_lambda(frame.lam)
    w = weights.w
    if np.any(np.abs(1.0 + w) < 1e-12):
        raise Resonant("a weight equals -1, the potential is undefined")
    C = _c_matrix(frame.T, w)
    t = C[-1, :].copy()
    J = flat_jacobian(frame)
    cond = float(np.linalg.cond(J))
    if not np.isfinite(cond) or cond >= 1.0 / tol.cluster:
        raise JacobianDegenerate(f"flat coordinate Jacobian is degenerate (cond = {cond:.3g})")
    Jinv = np.linalg.inv(J)
    oms = [-frame.P @ direction_matrix(frame.blocks, *d) @ frame.Pinv for d in frame.directions()]
    higgs = tuple(sum(Jinv[m, d] * oms[d] for d in range(len(oms))) for m in range(frame.N))
    g = (w * t) @ C / (1.0 + w)
    for a in (t, C, g, J):
        a.setflags(write=False)
    return SaitoFrame(weights, t, C, higgs, g, cond, np.array(frame.T), J, frame.blocks)


def wdvv_residuals(sf: SaitoFrame, sample: int = 0, report: ResidualReport | None = None) -> ResidualReport:
    """Pointwise WDVV residuals of a flat frame.

    Conditions: ``commute`` (``||[Phi_k, Phi_l]||``), ``unit``
    (``||Phi_N - I||``), ``symmetry`` (``max |(Phi_m)_ij - (Phi_i)_mj|``) and
    ``homogeneity`` (``max |T_ij + (1 + w_j - w_i) C_ij|``).
    """
    rep = report if report is not None else ResidualReport()
    Phi = sf.higgs
    n = sf.N
    for k in range(n):
        for l in range(k + 1, n):
            rep.add(sample, f"{k + 1}|{l + 1}", "commute", fnorm(commutator(Phi[k], Phi[l])))
    rep.add(sample, str(n), "unit", fnorm(Phi[-1] - np.eye(n)))
    stack = np.array(Phi)  # stack[m, i, j]
    rep.add(sample, "", "symmetry", float(np.max(np.abs(stack - stack.transpose(1, 0, 2)))))
    w = sf.weights.w
    hom = sf.T + (1.0 + w[None, :] - w[:, None]) * sf.Cmat
    rep.add(sample, "", "homogeneity", float(np.max(np.abs(hom))))
    return rep


def canonical_product_residual(sf: SaitoFrame) -> float:
    """Distance of the product in canonical coordinates from the shift algebra.

    Checks ``(-d_{k,l}) * (-d_{p,q}) = -delta_{kp} d_{k,l+q}`` (zero once
    ``l + q >= m_k``), where ``X * Y = Phi_X(Y)``.
    """
    J = sf.jacobian
    dirs = directions(sf.blocks)
    index = {d: i for i, d in enumerate(dirs)}
    Phi = np.array(sf.higgs)
    worst = 0.0
    for i1, (k, l) in enumerate(dirs):
        a = -J[i1]
        Phi_a = np.tensordot(a, Phi, axes=1)
        for i2, (p, q) in enumerate(dirs):
            b = -J[i2]
            prod = b @ Phi_a
            if k == p and (k, l + q) in index:
                expect = -J[index[(k, l + q)]]
            else:
                expect = np.zeros_like(prod)
            worst = max(worst, float(np.max(np.abs(prod - expect))))
    return worst


def dC_residuals(path: Sequence[ExtOkuboFrame], tol: Tolerances = DEFAULT_TOL,
                 report: ResidualReport | None = None, sample_offset: int = 0) -> ResidualReport:
    """Fourth-order central-difference check of ``dC = Omega~`` on each canonical direction."""
    rep = report if report is not None else ResidualReport()
    for i, fr in enumerate(path):
        w = Weights.from_lambda(fr.lam).w
        for b, d in enumerate(fr.directions()):
            h = _fd_step(fr.zCoords[b], tol.fdStep)
            st = _stencil(fr, b, h, tol)
            dC = _d4(lambda f: _c_matrix(f.T, w), st, h)
            om = -fr.P @ direction_matrix(fr.blocks, *d) @ fr.Pinv
            rep.add(i + sample_offset, _label(d), "dC", fnorm(dC - om))
    return rep


# -- classification and criteria ---------------------------------------------


def regularity_class(frame, tol: Tolerances = DEFAULT_TOL) -> JordanSpec:
    """Jordan type of ``T`` (frame, system or bare matrix)."""
    T = frame.T if hasattr(frame, "T") else as_cmatrix(frame)
    return jordanize(T, tol).spec


def classify_spec(spec: JordanSpec, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Partition, regularity and the matching Painleve pattern (if any)."""
    regular = spec.is_regular(tol.cluster)
    part = spec.partition()
    pattern = PATTERNS.get(spec.dim, {}).get(part) if regular else None
    return {"partition": part, "regular": regular, "pattern": pattern, "dim": spec.dim}


def primitive_section_check(frame: ExtOkuboFrame, row: int | None = None,
                            tol: Tolerances = DEFAULT_TOL):
    """Entries ``P[row, i_{k,0}]`` at the leading column of every block.

    Returns
    -------
    ok : bool
        All entries are nonzero beyond ``tol.cluster`` relative to ``||P||``.
    values : list of complex
    """
    row = frame.N - 1 if row is None else row
    if not 0 <= row < frame.N:
        raise IndexError(f"row {row} out of range")
    lead = np.concatenate([[0], np.cumsum(frame.blocks)[:-1]]).astype(int)
    values = [complex(frame.P[row, i]) for i in lead]
    thresh = tol.cluster * fnorm(frame.P)
    return all(abs(v) > thresh for v in values), values


def make_primitive(frame: ExtOkuboFrame, tol: Tolerances = DEFAULT_TOL,
                   scales: Sequence[float] = (1.0, 0.5, 2.0, -1.0, 0.25, 4.0)):
    """Gauge ``frame`` by a constant ``K`` commuting with ``B_inf`` until it is primitive.

    The last row of ``P`` is an eigenvector of ``B_inf^T`` for ``lam_N``; when
    that eigenspace is larger than a line the choice matters.  ``K`` adds a
    multiple of another row of the eigenspace to row ``N``, giving
    ``T' = K T K^{-1}`` and ``P' = K P`` with the same canonical coordinates.

    Returns
    -------
    frame : ExtOkuboFrame
        ``frame`` itself if it was already primitive.
    K : ndarray

    Raises
    ------
    JacobianDegenerate
        No such gauge makes every leading entry nonzero.
    """
    N = frame.N
    eye = np.eye(N, dtype=complex)
    if primitive_section_check(frame, tol=tol)[0]:
        return frame, eye
    lam = frame.lam
    scale = max(1.0, float(np.max(np.abs(lam))))
    partners = [j for j in range(N - 1) if abs(lam[j] - lam[N - 1]) <= tol.cluster * scale]
    # step relative to the size of the rows being mixed
    for j in partners:
        ratio = np.linalg.norm(frame.P[N - 1]) / max(np.linalg.norm(frame.P[j]), 1e-300)
        for c in scales:
            K = eye.copy()
            K[N - 1, j] = c * ratio
            T = K @ frame.sys.T @ np.linalg.inv(K)
            cand = ExtOkuboFrame(GOkuboSystem(T, lam, validate=False), K @ frame.P, frame.blocks, frame.zCoords)
            if primitive_section_check(cand, tol=tol)[0] and jacobian_check(cand, tol)[0]:
                return cand, K
    raise JacobianDegenerate("no gauge in the stabilizer of B_inf makes the frame primitive")


# -- initial value problem -----------------------------------------------------


def saito_from_initial(S, R, v, targetZ, tol: Tolerances = DEFAULT_TOL,
                       blocks: Sequence[int] | None = None, samples: int = 2) -> list:
    """Flat structures determined by a regular ``S``, exponents ``R`` and an eigenvector ``v``.

    ``G`` has columns the eigenvectors of ``R`` with ``v`` last, ``T = G^{-1} S G``
    and ``B_inf = G^{-1} R G``; the frame is continued to ``targetZ`` and a
    flat frame is returned at each of ``samples`` points.

    Parameters
    ----------
    S : array_like
        Regular matrix.  If ``blocks`` is given, ``S`` must already be block
        upper-triangular Toeplitz with those blocks and ``targetZ`` is read in
        that chart; otherwise the Jordan chart of ``S`` is used.
    R : array_like
        Diagonalizable matrix with non-resonant spectrum.
    v : array_like
        Eigenvector of ``R``.
    targetZ : sequence of complex
    """
    S = as_cmatrix(S)
    R = as_cmatrix(R, *S.shape)
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = S.shape[0]
    rv = R @ v
    lam_v = complex(np.vdot(v, rv) / np.vdot(v, v))
    if fnorm(rv - lam_v * v) > tol.residual * max(1.0, fnorm(R)) * max(1.0, fnorm(v)):
        raise ValueError("v is not an eigenvector of R")
    ev, vecs = np.linalg.eig(R)
    # drop the eigenvector closest to v and put v last
    overlap = np.abs(vecs.conj().T @ v) / (np.linalg.norm(vecs, axis=0) * np.linalg.norm(v))
    j = int(np.argmax(overlap * (np.abs(ev - lam_v) < 1e-6 * max(1.0, abs(lam_v)))))
    keep = [i for i in range(n) if i != j]
    keep.sort(key=lambda i: (-round(ev[i].real, 12), -round(ev[i].imag, 12)))
    G = np.column_stack([vecs[:, keep], v])
    lam = np.concatenate([ev[keep], [lam_v]])
    check_nonresonance(lam)
    Ginv = np.linalg.inv(G)
    sys = GOkuboSystem(Ginv @ S @ G, lam)
    if blocks is None:
        P_S, spec, _ = jordanize(S, tol)
        if not spec.is_regular(tol.cluster):
            raise NotRegular(f"S is not regular: {spec.blocks}")
        start = ExtOkuboFrame.from_basis(sys, Ginv @ P_S, spec.sizes, tol)
    else:
        start = ExtOkuboFrame.from_basis(sys, Ginv, tuple(blocks), tol)
    path = extend_deformation(start, targetZ, tol, samples=samples)
    return [flat_frame(fr, tol) for fr in path]


# -- potentials ----------------------------------------------------------------


def potential_sampler(frame: ExtOkuboFrame, tol: Tolerances = DEFAULT_TOL) -> Callable:
    """Sample ``(g, C)`` at flat coordinates near ``frame`` by continuing the frame.

    The returned callable maps a target ``t`` to ``(g, C)``, following the
    straight segment from the base flat coordinates in ``t``-space.
    """
    base = flat_frame(frame, tol)
    t0 = np.array(base.t)
    lam = np.asarray(frame.lam)
    N = frame.N
    E = [direction_matrix(frame.blocks, *d) for d in frame.directions()]

    def sample(t):
        dt = np.asarray(t, dtype=complex) - t0
        if not np.any(dt):
            return np.array(base.g), np.array(base.Cmat)

        def velocity(T, P, Pinv):
            J = np.array([-(P[-1, :] @ e) @ Pinv for e in E])
            return np.linalg.solve(J.T, dt)

        end = flow_frame(frame, velocity, (0.0, 1.0), tol)[-1]
        sf = flat_frame(end, tol)
        return np.array(sf.g), np.array(sf.Cmat)

    sample.t0 = t0
    sample.weights = Weights.from_lambda(lam)
    sample.N = N
    return sample


def verify_potential(gFunc: Callable, t0: Sequence[complex], weights: Weights,
                     tol: Tolerances = DEFAULT_TOL, step: float = 1e-4) -> ResidualReport:
    """Finite-difference check that ``g`` is a potential vector field.

    ``gFunc(t)`` returns ``g`` or a pair ``(g, C)``.  With ``C`` supplied the
    Higgs matrices are differences of ``C`` (so the symmetry family tests
    that ``C`` is the derivative of a potential, and ``Cfit`` compares the
    supplied ``C`` with the differences of ``g``); otherwise they are second
    differences of ``g`` and the symmetry family is structural.

    Conditions: ``commute``, ``unit``, ``symmetry``, ``homogeneity`` and,
    with ``C`` supplied, ``Cfit``.
    """
    t0 = np.asarray(t0, dtype=complex)
    n = len(t0)
    w = np.asarray(weights.w)
    h = step * np.maximum(1.0, np.abs(t0))
    cache: dict = {}

    def at(offsets):
        key = tuple(offsets)
        if key not in cache:
            t = t0.copy()
            for i, s in offsets:
                t[i] += s * h[i]
            out = gFunc(t)
            cache[key] = (np.asarray(out[0]), np.asarray(out[1])) if isinstance(out, tuple) else (np.asarray(out), None)
        return cache[key]

    g0, C0 = at(())
    have_C = C0 is not None
    Cfd = np.array([(at(((i, 1),))[0] - at(((i, -1),))[0]) / (2 * h[i]) for i in range(n)])
    Phi = np.zeros((n, n, n), dtype=complex)  # Phi[k, i, j]
    for k in range(n):
        if have_C:
            Phi[k] = (at(((k, 1),))[1] - at(((k, -1),))[1]) / (2 * h[k])
            continue
        for i in range(n):
            if i == k:
                Phi[k, i] = (at(((i, 1),))[0] - 2 * g0 + at(((i, -1),))[0]) / h[i] ** 2
            else:
                a, b = sorted((i, k))
                Phi[k, i] = (at(((a, 1), (b, 1)))[0] - at(((a, 1), (b, -1)))[0]
                             - at(((a, -1), (b, 1)))[0] + at(((a, -1), (b, -1)))[0]) / (4 * h[a] * h[b])
    rep = ResidualReport()
    for k in range(n):
        for l in range(k + 1, n):
            rep.add(0, f"{k + 1}|{l + 1}", "commute", fnorm(commutator(Phi[k], Phi[l])))
    rep.add(0, str(n), "unit", fnorm(Phi[-1] - np.eye(n)))
    rep.add(0, "", "symmetry", float(np.max(np.abs(Phi - Phi.transpose(1, 0, 2)))))
    Cuse = C0 if have_C else Cfd
    euler = (w * t0) @ Cfd - (1.0 + w) * g0
    rep.add(0, "", "homogeneity", float(np.max(np.abs(euler))))
    if have_C:
        rep.add(0, "", "Cfit", float(np.max(np.abs(Cfd - Cuse))))
    return rep
