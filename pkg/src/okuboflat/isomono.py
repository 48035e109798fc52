"""The isomonodromy one-form of an extended Okubo frame.

For ``Y' = A(z) Y`` with ``A(z) = -(z - T)^{-1} B_inf`` the deformation
is carried by

    dY = Omega(z) Y,   Omega(z) = -(z - T)^{-1} Omega~ B_inf,

and compatibility is ``dA = dOmega/dz + [Omega, A]``.  ``dOmega/dz`` is
evaluated in closed form from the resolvent; only the derivative along the
path is a finite difference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ProbeOnSpectrum
from .matkit import DEFAULT_TOL, Tolerances, commutator, fnorm
from .okubo import ExtOkuboFrame, assemble_z, directions, omega_tilde
from .report import ResidualReport, format_float

__all__ = [
    "OneFormSample",
    "deformation_one_form",
    "isomonodromy_residual",
    "default_probes",
    "resolvent",
    "jordan_resolvent",
    "decay_slope",
]


@dataclass(frozen=True)
class OneFormSample:
    """``Omega`` and ``A`` evaluated at one probe point."""

    zProbe: complex
    Omega: np.ndarray
    Aval: np.ndarray


def _tangent(frame: ExtOkuboFrame, direction) -> np.ndarray:
    """A canonical index ``(k, l)`` or a full tangent vector."""
    if isinstance(direction, tuple) and len(direction) == 2 and all(isinstance(x, (int, np.integer)) for x in direction):
        zeta = np.zeros(frame.N, dtype=complex)
        zeta[directions(frame.blocks).index(tuple(int(x) for x in direction))] = 1
        return zeta
    zeta = np.asarray(direction, dtype=complex).reshape(-1)
    if zeta.shape[0] != frame.N:
        raise ValueError(f"direction needs {frame.N} components")
    return zeta


def _check_probe(frame: ExtOkuboFrame, z: complex, tol: Tolerances) -> None:
    ev = frame.leading
    gap = float(np.min(np.abs(ev - z)))
    if gap <= tol.cluster * max(1.0, abs(z), float(np.max(np.abs(ev)))):
        raise ProbeOnSpectrum(f"probe {z} lies on the spectrum of T (gap {gap:.3g})")


def resolvent(frame: ExtOkuboFrame, z: complex) -> np.ndarray:
    """``(z - T)^{-1}`` by a dense solve."""
    return np.linalg.solve(z * np.eye(frame.N) - frame.T, np.eye(frame.N, dtype=complex))


def jordan_resolvent(frame: ExtOkuboFrame, z: complex) -> np.ndarray:
    """``(z - T)^{-1} = P (z - Z)^{-1} P^{-1}`` with the Neumann series on each Toeplitz block."""
    Z = assemble_z(frame.blocks, frame.zCoords)
    out = np.zeros_like(Z)
    o = 0
    for m in frame.blocks:
        blk = Z[o:o + m, o:o + m]
        d = z - blk[0, 0]
        nil = blk - blk[0, 0] * np.eye(m)
        term = np.eye(m, dtype=complex) / d
        acc = term.copy()
        for _ in range(1, m):
            term = nil @ term / d
            acc += term
        out[o:o + m, o:o + m] = acc
        o += m
    return frame.P @ out @ frame.Pinv


def deformation_one_form(frame: ExtOkuboFrame, direction, zProbe: complex,
                         tol: Tolerances = DEFAULT_TOL, route: str = "dense") -> OneFormSample:
    """``Omega(zProbe)`` contracted with ``direction`` and ``A(zProbe)``.

    Parameters
    ----------
    direction : tuple of int or array_like
        Canonical index ``(k, l)`` or a tangent vector in canonical coordinates.
    route : {"dense", "jordan"}
        How the resolvent is evaluated.

    Raises
    ------
    ProbeOnSpectrum
    """
    z = complex(zProbe)
    _check_probe(frame, z, tol)
    R = jordan_resolvent(frame, z) if route == "jordan" else resolvent(frame, z)
    B = frame.sys.B_inf
    Om = omega_tilde(frame, _tangent(frame, direction))
    return OneFormSample(z, -R @ Om @ B, -R @ B)


def default_probes(frame: ExtOkuboFrame, distance: float = 2.0) -> list:
    """Three fixed probes at least ``distance`` away from the convex hull of the spectrum."""
    ev = frame.leading
    c = complex(np.mean(ev))
    r = float(np.max(np.abs(ev - c))) + distance + 1.0
    return [complex(c + r * np.exp(1j * a)) for a in (0.3, 2.4, 4.5)]


def decay_slope(frame: ExtOkuboFrame, direction, radii: Sequence[float] = (1e2, 1e3, 1e4, 1e5, 1e6),
                angle: float = 0.7) -> float:
    """Log-log slope of ``||Omega(r e^{i angle})||`` against ``r`` (``-1`` for a ``1/z`` decay)."""
    vals = [fnorm(deformation_one_form(frame, direction, r * np.exp(1j * angle)).Omega) for r in radii]
    return float(np.polyfit(np.log(radii), np.log(vals), 1)[0])


# antisymmetric central-difference weights on the sample index: sum_k w_k (f[i+k] - f[i-k])
_WEIGHTS = {2: ((1, 0.5),), 4: ((1, 2 / 3), (2, -1 / 12))}


def _diff(f, path, i, order):
    return sum(w * (f(path[i + k]) - f(path[i - k])) for k, w in _WEIGHTS[order])


def isomonodromy_residual(path: Sequence[ExtOkuboFrame], zProbes: Sequence[complex] | None = None,
                          tol: Tolerances = DEFAULT_TOL, order: int = 4) -> ResidualReport:
    """``||dA/ds - (dOmega/dz + [Omega, A])||`` at interior samples of ``path``.

    The parameter ``s`` is the sample index; the tangent ``dz/ds`` and
    ``dA/ds`` are central differences of order ``order`` over neighbouring
    samples, so ``path`` must be uniformly and finely sampled.  Residuals are
    relative to ``||dOmega/dz|| + ||[Omega, A]||``; the direction column
    holds the probe.

    Parameters
    ----------
    zProbes : sequence of complex, optional
        Defaults to :func:`default_probes` of the first frame.
    order : {2, 4}
    """
    if order not in _WEIGHTS:
        raise ValueError("order must be 2 or 4")
    path = list(path)
    report = ResidualReport()
    if not path:
        return report
    probes = [complex(z) for z in (default_probes(path[0]) if zProbes is None else zProbes)]
    half = order // 2
    B = path[0].sys.B_inf
    for i in range(half, len(path) - half):
        fr = path[i]
        zeta = _diff(lambda f: f.zCoords, path, i, order)
        Om = omega_tilde(fr, zeta)
        for z in probes:
            _check_probe(fr, z, tol)
            R = resolvent(fr, z)
            A = -R @ B
            Omega = -R @ Om @ B
            dOmega = R @ R @ Om @ B
            dA = _diff(lambda f: f.sys.connection(z), path, i, order)
            rhs = dOmega + commutator(Omega, A)
            scale = max(fnorm(dOmega) + fnorm(commutator(Omega, A)), 1e-300)
            report.add(i, _probe_label(z), "isomonodromy", fnorm(dA - rhs) / scale)
    return report


def _probe_label(z: complex) -> str:
    im = format_float(z.imag)
    return f"z={format_float(z.real)}{'' if im.startswith('-') else '+'}{im}j"
