"""Printed Painleve data: linear problems, Okubo data and Hamiltonians.

Every printed matrix lives here and nowhere else.  The functions use plain
arithmetic so they evaluate on numbers and on sympy symbols alike; the
transcription test renders them symbolically and compares with an
independently typed golden copy.

Naming: ``a1, a2`` are the exponents at infinity, ``th0, th1`` the
exponents at the finite singular points, ``u`` the overall gauge scalar.
Matrices are nested lists, rows first.
"""

from __future__ import annotations


def _gauge_u(M, u):
    """``diag(u, 1)^{-1} M diag(u, 1)``."""
    return [[M[0][0], M[0][1] / u], [M[1][0] * u, M[1][1]]]


def _outer(col, row, scale=1):
    return [[scale * c * r for r in row] for c in col]


def _det2(M):
    return M[0][0] * M[1][1] - M[0][1] * M[1][0]


def _jordan(sizes_and_values):
    n = sum(s for s, _ in sizes_and_values)
    S = [[0] * n for _ in range(n)]
    o = 0
    for size, val in sizes_and_values:
        for i in range(size):
            S[o + i][o + i] = val
            if i + 1 < size:
                S[o + i][o + i + 1] = 1
        o += size
    return S


# -- PV -------------------------------------------------------------------------


def pv_linear(q, p, t, u, th0, a1, a2):
    """``A0/z + A1/(z-1)^2 + A2/(z-1)``: returns ``(A0, A1, A2)``."""
    a12 = a1 - a2
    A0 = _gauge_u(_outer([p * q + a12, -p],
                         [p * (q - 1) + th0, (p * q + a12) * (q - 1) + th0 * q], 1 / a12), u)
    A1 = _gauge_u(_outer([(p * q - a2) * (q - 1) - a1, p * (1 - q) + a2], [1, q], -t / a12), u)
    A2 = [[-A0[0][0] - a1, -A0[0][1]], [-A0[1][0], -A0[1][1] - a2]]
    return A0, A1, A2


S_V = _jordan([(2, 1), (1, 0)])


def pv_C(q, p, t, th0, th1, a1, a2):
    """Residue matrix ``C_V`` of ``(z - S_V) Psi' = C_V Psi``."""
    _, _, A2 = pv_linear(q, p, t, 1, th0, a1, a2)
    c32 = (q - 1) * (q * (q - 1) * p ** 2 + (a2 - a1 - (th1 + 2 * a2) * q) * p + a2 * (th1 + a2))
    return [
        [th1, -_det2(A2) / t, -(p * q - th1 - a2) / t],
        [t, 0, 1],
        [t * (p * q * (q - 1) - th1 - a1 - a2 * q), c32, th0],
    ]


def pv_tH(q, p, t, th0, a1, a2):
    """``t H_V``."""
    return p * (p + t) * q * (q - 1) + (th0 + a1 - a2) * q * p + (a2 - a1) * p - a2 * t * q


# -- PIV ------------------------------------------------------------------------


def piv_A1_22_printed(a11, t):
    """``(A1)_22`` of PIV as printed; its trace ``t`` does not match ``C_IV``."""
    return t - a11


def piv_A1_22(a11, t):
    """``(A1)_22`` of PIV consistent with ``C_IV`` and ``H_IV`` (trace ``-t``)."""
    return -t - a11


def piv_linear(q, p, t, u, a1, a2, as_printed=False):
    """``A0/z^3 + A1/z^2 + A2/z``: returns ``(A0, A1, A2)``.

    With ``as_printed`` the printed ``(A1)_22`` is used; the default is the
    corrected entry, for which the principal part has a 3-dimensional
    minimal realization.
    """
    a12 = a1 - a2
    A0 = _gauge_u(_outer([p, -p * q + a12], [q, 1], 1 / a12), u)
    a11 = (p * q * (p - q - t) - a12 * p + a1 * q) / a12
    a22 = piv_A1_22_printed(a11, t) if as_printed else piv_A1_22(a11, t)
    A1 = _gauge_u([
        [a11, (p * (p - q - t) + a1) / a12],
        [((p * q - a12) * (-p * q + t * q + a12) + (p * q - a1) * q ** 2) / a12, a22],
    ], u)
    A2 = [[-a1, 0], [0, -a2]]
    return A0, A1, A2


S_IV = _jordan([(3, 0)])


def piv_C(q, p, t, a1, a2):
    """Residue matrix ``C_IV``."""
    return [
        [0, (q + t) * (p * q - a1), -p * (q + t) * (p * q - a1 + a2)],
        [0, p * q - a1, -p * (p * q - a1 + a2)],
        [1, -t, -p * q - a2],
    ]


def piv_H(q, p, t, th0, a1, a2):
    return p * q * (p - q - t) + (a2 - a1) * p - (th0 + a2) * q


# -- PIII -----------------------------------------------------------------------


def piii_linear(q, p, t, u, a1, a2):
    """``A2/z^2 + A1/z + A0``: returns ``(A0, A1, A2)``."""
    r = (p * q - a2) * (p - 1) + a1 * p
    A0 = [[-1, 0], [0, 0]]
    A1 = _gauge_u([[-a1, -q], [-r, -a2]], u)
    A2 = _gauge_u(_outer([1, p], [t * (1 - p), t]), u)
    return A0, A1, A2


S_III = _jordan([(2, 0), (2, 1)])


def piii_G(q, p, t, u, a1, a2):
    return [
        [a1 * u, q, -p * q - a1 + a2, q * (p * q - a2) / t],
        [(1 - p) * t * u, t, -t, p * q],
        [0, q / u, -p * q / u, q * (p * q - a2) / (t * u)],
        [1, 0, -1 / u, 0],
    ]


def piii_Binf(a1, a2):
    return [a2, a2, 0, 0]


def piii_tH(q, p, t, a1, a2):
    """``t H_III``."""
    return p ** 2 * q ** 2 - (q ** 2 - (a1 - a2) * q - t) * p + a2 * q


# -- PII ------------------------------------------------------------------------


def pii_linear(q, p, t, u, a2):
    """``A0 z^2 + A1 z + A2``: returns ``(A0, A1, A2)``."""
    A0 = [[0, 0], [0, 1]]
    A1 = _gauge_u([[0, 1], [p, 0]], u)
    A2 = _gauge_u([[p, -q], [p * q - a2, -p + t]], u)
    return A0, A1, A2


S_II = _jordan([(4, 0)])


def pii_G(q, p, t, u, a2):
    return [
        [-q * u, q / a2 * (q ** 2 - p + t) + 1, 0, q * (p - q ** 2 - t)],
        [u, (p - q ** 2 - t) / a2, 0, q ** 2 - p + t],
        [-p * u / a2, q / a2, 1, 0],
        [0, -1 / a2, 0, 1],
    ]


def pii_Binf_printed(a2):
    """``B_inf`` exactly as printed; see :func:`pii_Binf` for the one in use."""
    return [a2, a2, 0, 0]


def pii_Binf(a2):
    """``B_inf`` matching ``S_II, G_II``.

    The residue at infinity of the twisted system is ``-a2 I`` and the
    exponents of ``B_inf`` must agree with it; the printed ``diag(a2, a2, 0, 0)``
    reproduces neither the reduced connection nor the Hamiltonian flow.
    """
    return [-a2, -a2, 0, 0]


def pii_H(q, p, t, a2):
    return p ** 2 - (q ** 2 + t) * p + a2 * q


# -- PI -------------------------------------------------------------------------


def pi_linear(q, p, t):
    """``A0 z^2 + A1 z + A2``: returns ``(A0, A1, A2)``."""
    A0 = [[0, 1], [0, 0]]
    A1 = [[0, q], [1, 0]]
    A2 = [[-p, q ** 2 + t], [-q, p]]
    return A0, A1, A2


S_I = _jordan([(4, 0), (3, 0)])


def pi_G(q, p, t, lam):
    w = q ** 2 + t
    return [
        [lam, 0, 0, 0, 0, 0, 0],
        [-p, w, p, lam, 0, -w, 0],
        [0, q, 0, 0, lam, -q, 0],
        [0, 1, 0, 0, 0, -1, 0],
        [0, lam, 0, 0, 0, 0, 0],
        [-q, p, q, 0, 0, -p, lam],
        [1, 0, -1, 0, 0, 0, 0],
    ]


def pi_Binf(lam):
    return [lam, lam, 0, 0, 0, 0, 0]


def pi_H(q, p, t):
    return p ** 2 - q ** 3 - t * q
