"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The two
non-trivial routines are :func:`jordanize`, a numerically guarded Jordan
decomposition, and :func:`solve_sylvester_gauge`, the minimum norm solve of
``X T - T X = R``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import ClusterAmbiguity, Inconsistent, SingularFrame

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "JordanSpec",
    "JordanDecomposition",
    "as_cmatrix",
    "commutator",
    "fnorm",
    "shift",
    "jordan_block",
    "jordanize",
    "solve_sylvester_gauge",
    "ad_matrix",
]

# Merges whose spread lands within this factor above the clustering radius
# are tried tentatively.
_GRAY_CLUSTER = 3.0
# Rank decisions: singular values within this factor of the cutoff (either side).
_GRAY_RANK = 100.0


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by all modules.

    Parameters
    ----------
    cluster : float
        Relative eigenvalue clustering radius and rank cutoff.
    residual : float
        Acceptance bound for reconstruction residuals.
    fdStep : float
        Relative finite-difference step.
    """

    cluster: float = 1e-8
    residual: float = 1e-8
    fdStep: float = 1e-5

    def __post_init__(self):
        for name in ("cluster", "residual", "fdStep"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"tolerance {name} must be positive, got {v!r}")
        if self.cluster >= 1:
            raise ValueError("tolerance cluster must be < 1")


DEFAULT_TOL = Tolerances()


def as_cmatrix(a, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array, validating its shape."""
    m = np.array(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {m.shape}")
    if rows is not None and m.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {m.shape[1]}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def fnorm(a) -> float:
    """Frobenius norm (the norm used for every residual in the package)."""
    return float(np.linalg.norm(a))


def shift(m: int) -> np.ndarray:
    """The nilpotent upper shift ``Lambda`` of size ``m``."""
    return np.eye(m, k=1, dtype=complex)


def jordan_block(eigenvalue: complex, size: int) -> np.ndarray:
    return eigenvalue * np.eye(size, dtype=complex) + shift(size)


def _eig_key(ev: complex):
    # rounding keeps the ordering stable against last-digit noise
    return (round(ev.real, 9) + 0.0, round(ev.imag, 9) + 0.0)


@dataclass(frozen=True)
class JordanSpec:
    """Jordan type of a square matrix.

    ``blocks`` holds ``(eigenvalue, size)`` pairs ordered by descending size,
    then by eigenvalue in (real, imag) lexicographic order.
    """

    blocks: tuple = field(default_factory=tuple)

    def __post_init__(self):
        bl = tuple((complex(ev), int(sz)) for ev, sz in self.blocks)
        if any(sz < 1 for _, sz in bl):
            raise ValueError("Jordan block sizes must be positive")
        bl = tuple(sorted(bl, key=lambda b: (-b[1], _eig_key(b[0]))))
        object.__setattr__(self, "blocks", bl)

    @property
    def dim(self) -> int:
        return sum(sz for _, sz in self.blocks)

    @property
    def sizes(self) -> tuple:
        return tuple(sz for _, sz in self.blocks)

    @property
    def eigenvalues(self) -> tuple:
        return tuple(ev for ev, _ in self.blocks)

    def partition(self) -> str:
        """Block sizes as a compact string, e.g. ``"211"``."""
        return "".join(str(s) for s in self.sizes)

    def is_regular(self, tol: float = 1e-8) -> bool:
        """True when no eigenvalue is shared by two blocks."""
        ev = self.eigenvalues
        scale = max(1.0, max((abs(e) for e in ev), default=0.0))
        return all(
            abs(ev[i] - ev[j]) > tol * scale
            for i in range(len(ev))
            for j in range(i + 1, len(ev))
        )

    def assemble(self) -> np.ndarray:
        return sla.block_diag(*[jordan_block(ev, sz) for ev, sz in self.blocks]).astype(complex)

    def to_json(self) -> list:
        return [{"eigenvalue": [ev.real, ev.imag], "size": sz} for ev, sz in self.blocks]

    @classmethod
    def from_json(cls, data) -> "JordanSpec":
        return cls(tuple((complex(*b["eigenvalue"]), b["size"]) for b in data))


class JordanDecomposition(NamedTuple):
    """Result of :func:`jordanize`: ``M = P J P^{-1}`` with ``J = spec.assemble()``."""

    P: np.ndarray
    spec: JordanSpec
    cond: float


class _Node(NamedTuple):
    members: list
    children: tuple


def _cluster(ev: np.ndarray, cluster_tol: float, scale: float) -> list:
    """Group eigenvalues that may belong to a common Jordan block.

    A perturbed size-k block spreads its eigenvalues over roughly
    ``delta**(1/k)``, so the admissible spread grows with the cluster size.
    The merge history is kept so that a cluster failing the nilpotency
    check can be split again.
    """
    nodes = [_Node([i], ()) for i in range(len(ev))]

    def spread(idx):
        vals = ev[idx]
        return float(np.max(np.abs(vals - vals.mean())))

    def radius(k):
        return scale * cluster_tol ** (1.0 / k)

    while len(nodes) > 1:
        best = None
        for a in range(len(nodes)):
            for b in range(a + 1, len(nodes)):
                merged = nodes[a].members + nodes[b].members
                ratio = spread(merged) / radius(len(merged))
                if best is None or ratio < best[0]:
                    best = (ratio, a, b)
        ratio, a, b = best
        # borderline merges are accepted tentatively; the staircase check
        # in jordanize splits them again if they are not one nilpotent cluster
        if ratio <= _GRAY_CLUSTER:
            nodes[a] = _Node(nodes[a].members + nodes[b].members, (nodes[a], nodes[b]))
            del nodes[b]
            continue
        break
    return nodes


def _numerical_rank(s: np.ndarray, cutoff: float, what: str) -> int:
    ambiguous = (s > cutoff / _GRAY_RANK) & (s < cutoff * _GRAY_RANK)
    if np.any(ambiguous):
        raise ClusterAmbiguity(f"rank of {what} is ambiguous: singular values {s[ambiguous]}")
    return int(np.sum(s > cutoff))


def _null_basis(a: np.ndarray, rank: int) -> np.ndarray:
    _, _, vh = np.linalg.svd(a)
    return vh[rank:].conj().T


def _nilpotent_chains(n: np.ndarray, cutoff: float, scale: float) -> list:
    """Jordan chains of a (numerically) nilpotent matrix.

    Returns a list of ``k x s`` arrays whose columns ``[N^{s-1}v, ..., Nv, v]``
    satisfy ``N c_j = c_{j-1}``.
    """
    k = n.shape[0]
    powers = [np.eye(k, dtype=complex)]
    ranks = [k]
    while ranks[-1] > 0:
        j = len(powers)
        if j > k:
            raise ClusterAmbiguity("cluster is not nilpotent within tolerance")
        pw = powers[-1] @ n
        s = np.linalg.svd(pw, compute_uv=False)
        r = _numerical_rank(s, cutoff * scale**j, f"N^{j}")
        if r >= ranks[-1]:
            raise ClusterAmbiguity("cluster is not nilpotent within tolerance")
        powers.append(pw)
        ranks.append(r)
    depth = len(ranks) - 1
    kernels = [np.zeros((k, 0), dtype=complex)] + [
        _null_basis(powers[j], ranks[j]) for j in range(1, depth + 1)
    ]
    # number of blocks of size >= j is ranks[j-1] - ranks[j]
    at_least = [0] + [ranks[j - 1] - ranks[j] for j in range(1, depth + 1)] + [0]
    if any(at_least[j] < at_least[j + 1] for j in range(1, depth)):
        raise ClusterAmbiguity(f"rank staircase {ranks} is not that of a nilpotent matrix")
    chains = []
    for size in range(depth, 0, -1):
        count = at_least[size] - at_least[size + 1]
        if count == 0:
            continue
        # level-`size` vectors already present from longer chains
        taken = [c[:, size - 1] for c in chains]
        w = np.column_stack([kernels[size - 1]] + [t[:, None] for t in taken])
        if w.shape[1]:
            qw, _ = np.linalg.qr(w)
            cand = kernels[size] - qw @ (qw.conj().T @ kernels[size])
        else:
            cand = kernels[size]
        u, s, _ = np.linalg.svd(cand, full_matrices=False)
        if len(s) < count or s[count - 1] < 1e-6:
            raise SingularFrame("could not complete Jordan chains")
        for c in range(count):
            v = u[:, c]
            cols = [v]
            for _ in range(size - 1):
                cols.append(n @ cols[-1])
            chains.append(np.column_stack(cols[::-1]))
    return chains


def jordanize(M, tol: Tolerances = DEFAULT_TOL) -> JordanDecomposition:
    """Jordan decomposition with eigenvalue clustering.

    Eigenvalues are clustered, each cluster's invariant subspace is isolated
    by a reordered Schur form, and its nilpotent part is resolved by the rank
    staircase of its powers.

    Parameters
    ----------
    M : array_like
        Square complex matrix.
    tol : Tolerances

    Returns
    -------
    JordanDecomposition
        ``(P, spec, cond)`` with ``M = P J P^{-1}`` and ``cond`` the
        condition number of ``P``.

    Raises
    ------
    ClusterAmbiguity
        Clusters or ranks cannot be decided at the tolerance.
    SingularFrame
        The assembled frame is ill conditioned or fails reconstruction.
    """
    M = as_cmatrix(M)
    n = M.shape[0]
    if M.shape[1] != n:
        raise ValueError("jordanize needs a square matrix")
    scale = max(1.0, fnorm(M))
    ev = np.linalg.eigvals(M)
    groups = _cluster(ev, tol.cluster, scale)

    pieces = []

    def resolve(node):
        g = node.members
        centre = ev[g].mean()
        rad = float(np.max(np.abs(ev[g] - centre)))
        others = np.delete(ev, g)
        gap = float(np.min(np.abs(others - centre))) if others.size else np.inf
        sel = 0.5 * (rad + gap) if np.isfinite(gap) else np.inf
        try:
            t, q, sdim = sla.schur(M, output="complex", sort=lambda x: abs(x - centre) <= sel)
            if sdim != len(g):
                raise ClusterAmbiguity("Schur reordering did not isolate the cluster")
            k = len(g)
            nk = t[:k, :k] - (np.trace(t[:k, :k]) / k) * np.eye(k)
            mu = np.trace(t[:k, :k]) / k
            nscale = max(fnorm(nk), np.sqrt(tol.cluster) * scale)
            chains = _nilpotent_chains(nk, tol.cluster, nscale)
        except (ClusterAmbiguity, SingularFrame):
            if not node.children:
                raise
            for child in node.children:
                resolve(child)
            return
        for c in chains:
            pieces.append((complex(mu), c.shape[1], q[:, :k] @ c))

    for node in groups:
        resolve(node)

    pieces.sort(key=lambda b: (-b[1], _eig_key(b[0])))
    P = np.column_stack([p for _, _, p in pieces])
    spec = JordanSpec(tuple((ev_, sz) for ev_, sz, _ in pieces))
    cond = float(np.linalg.cond(P))
    if not np.isfinite(cond) or cond > 1.0 / (tol.cluster * 1e-4):
        raise SingularFrame(f"Jordan frame is ill conditioned (cond = {cond:.3g})")
    J = spec.assemble()
    resid = fnorm(P @ J @ np.linalg.inv(P) - M)
    if resid > tol.residual * scale:
        raise SingularFrame(f"Jordan reconstruction residual {resid:.3g} exceeds tolerance")
    return JordanDecomposition(P, spec, cond)


def ad_matrix(T: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> X T - T X`` acting on column-major ``vec(X)``."""
    n = T.shape[0]
    eye = np.eye(n)
    return np.kron(T.T, eye) - np.kron(eye, T)


def _min_norm_solve(T: np.ndarray, R: np.ndarray, rank_tol: float, rank: int | None = None):
    n = T.shape[0]
    u, s, vh = np.linalg.svd(ad_matrix(T))
    if rank is None:
        rank = int(np.sum(s > rank_tol * s[0])) if s[0] > 0 else 0
    rhs = R.reshape(-1, order="F")
    coef = (u[:, :rank].conj().T @ rhs) / s[:rank]
    x = vh[:rank].conj().T @ coef
    return x.reshape(n, n, order="F")


def solve_sylvester_gauge(T, R, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Minimum Frobenius norm solution of ``[X, T] = X T - T X = R``.

    Raises
    ------
    Inconsistent
        ``R`` is not in the image of ``ad_T`` within ``tol.residual``.

    Examples
    --------
    >>> X = solve_sylvester_gauge(np.diag([1.0, 2.0]), np.array([[0, 3.0], [5.0, 0]]))
    >>> np.allclose(X, [[0, 3], [-5, 0]])
    True
    """
    T = as_cmatrix(T)
    R = as_cmatrix(R, *T.shape)
    X = _min_norm_solve(T, R, tol.cluster)
    resid = fnorm(commutator(X, T) - R)
    if resid > tol.residual * max(1.0, fnorm(R)):
        raise Inconsistent(f"[X, T] = R has no solution (residual {resid:.3g})")
    return X


def block_offsets(sizes: Sequence[int]) -> list:
    """Starting index of each block."""
    return list(np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)) if len(sizes) else []
