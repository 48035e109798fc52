import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from okuboflat.errors import ClusterAmbiguity, CompletionFailure, NotRegular, RankAmbiguity, SingularRtilde
from okuboflat.matkit import fnorm, jordan_block, jordanize
from okuboflat.okubo import GOkuboSystem, canonical_frame, rank_reduce
from okuboflat.painleve import default_state, linear_problem, okubo_data
from okuboflat.realize import (Realization, RationalConnection, minimize, probe_points, realization_frame, realize,
                               relative_error, to_okubo)


def cplx(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def two_pole_connection(seed=0):
    """m = 2, a double pole at 0 and a simple pole at 1, with diagonal residue at infinity."""
    rng = np.random.default_rng(seed)
    A0, A1, B0 = cplx(rng, 2, 2), cplx(rng, 2, 2), cplx(rng, 2, 2)
    s = A0 + B0
    B0 = B0 - (s - np.diag(np.diag(s)))
    return RationalConnection.from_poles(2, [(0.0, (A0, A1)), (1.0, (B0,))])


def padded(real, seed=0):
    """Append two states that the input cannot reach."""
    rng = np.random.default_rng(seed)
    n, m = real.N, real.m
    S = sla.block_diag(real.S, np.diag([5.0, 6.0 + 1j]))
    B = np.hstack([real.B, cplx(rng, m, 2)])
    C = np.vstack([real.C, np.zeros((2, m))])
    return Realization(S, B, C, np.eye(n + 2), np.concatenate([real.lambdaOut, [0, 0]]))


def test_connection_validation():
    A = np.diag([1.0, 2.0])
    with pytest.raises(ValueError):
        RationalConnection.from_poles(2, [(0.0, (A,)), (1e-15, (A,))])
    with pytest.raises(ValueError):
        RationalConnection.from_poles(2, [(0.0, (np.ones((2, 2)),))])
    with pytest.raises(ValueError):
        RationalConnection.from_poles(2, [(0.0, ())])
    conn = two_pole_connection()
    assert conn.degree == 3 and [p.r for p in conn.poles] == [1, 0]
    z = 0.3 + 2j
    direct = conn.poles[0].coeffs[0] / z + conn.poles[0].coeffs[1] / z**2 + conn.poles[1].coeffs[0] / (z - 1)
    assert np.allclose(conn.evaluate(z), direct)


def test_simple_pole():
    A = np.diag([0.7, -1.3 + 0.2j])
    real = realize(RationalConnection.from_poles(2, [(0.4, (A,))]))
    assert real.N == 2
    assert np.array_equal(real.S, 0.4 * np.eye(2))
    assert np.array_equal(real.B, -A)
    assert np.array_equal(real.C, np.eye(2))
    assert np.allclose(real.lambdaOut, -np.diag(A))


def test_two_pole_evaluation():
    conn = two_pole_connection()
    real = realize(conn)
    assert real.N == 6
    probes = probe_points([0, 1], 10)
    assert relative_error(conn.evaluate, real.evaluate, probes) < 1e-10


def test_probe_points_avoid_poles():
    pts = probe_points([0, 1], 20, seed=3)
    assert len(pts) == 20
    assert np.min(np.abs(pts[:, None] - np.array([0, 1])[None, :])) > 0.1
    assert np.array_equal(pts, probe_points([0, 1], 20, seed=3))


def test_completion_invariants():
    real = realize(two_pole_connection(1))
    n, m = real.N, real.m
    assert fnorm(real.G @ real.Ginv - np.eye(n)) < 1e-10
    assert np.allclose(real.Ginv[:m], real.B)
    assert np.allclose(real.lambdaOut[:m], np.diag(real.B @ real.C))
    assert np.all(real.lambdaOut[m:] == 0)
    fr = realization_frame(real)
    assert fnorm(fr.Pinv @ fr.T @ fr.P - real.S) < 1e-9
    assert sum(fr.blocks) == n


def test_to_okubo_identity_gauge():
    S = sla.block_diag(jordan_block(0.5, 2), jordan_block(-1.0, 1))
    real = Realization(S, np.eye(1, 3), np.eye(3, 1), np.eye(3), [0.4, 0, 0])
    sys = to_okubo(real, validate=False)
    assert np.array_equal(sys.T, S)
    assert np.array_equal(sys.lam, [0.4, 0, 0])


def test_singular_rtilde_and_completion_failure():
    A = np.diag([1.0, 0.0])
    Ahigh = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(SingularRtilde):
        realize(RationalConnection.from_poles(2, [(0.0, (A, Ahigh))]))
    real = realize(RationalConnection.from_poles(1, [(0.0, (np.eye(1),))]))
    dead = Realization(real.S, np.zeros_like(real.B), real.C, real.G, real.lambdaOut)
    with pytest.raises(CompletionFailure):
        minimize(dead)


# -- minimization ---------------------------------------------------------------


def test_minimal_input_unchanged():
    conn = two_pole_connection(2)
    m1 = minimize(realize(conn))
    assert m1.minimal and m1.N == 6
    assert m1.jordan_spec() == realize(conn).jordan_spec()


def test_pv_raw_realization_minimizes_to_three():
    conn = linear_problem("V", default_state("V"))
    raw = realize(conn)
    assert raw.N == 6
    small = minimize(raw)
    assert small.N == 3
    assert small.jordan_spec().partition() == "21"
    probes = probe_points([p.a for p in conn.poles], 10)
    assert relative_error(conn.evaluate, small.evaluate, probes) < 1e-10


def test_padding_is_removed():
    real = minimize(realize(two_pole_connection(4)))
    big = padded(real)
    assert big.N == real.N + 2
    again = minimize(big)
    assert again.N == real.N
    assert again.jordan_spec().sizes == real.jordan_spec().sizes
    probes = probe_points([0, 1], 10)
    assert relative_error(real.evaluate, again.evaluate, probes) < 1e-10


def test_minimize_idempotent_and_unique():
    conn = linear_problem("V", default_state("V"))
    m1 = minimize(realize(conn))
    m2 = minimize(m1)
    m3 = minimize(padded(m1, seed=9))
    probes = probe_points([p.a for p in conn.poles], 10)
    for other in (m2, m3):
        assert other.N == m1.N
        assert other.jordan_spec().sizes == m1.jordan_spec().sizes
        assert np.allclose(other.jordan_spec().eigenvalues, m1.jordan_spec().eigenvalues, atol=1e-10)
        assert relative_error(m1.evaluate, other.evaluate, probes) < 1e-10


def test_rank_ambiguity():
    A0 = np.diag([0.3, -0.4]).astype(complex)
    with pytest.raises(RankAmbiguity):
        minimize(realize(RationalConnection.from_poles(2, [(0.0, (A0, np.diag([1.0, 1e-4])))])))
    # a discarded state that leaves a visibly split cluster behind
    with pytest.raises(ClusterAmbiguity):
        minimize(realize(RationalConnection.from_poles(2, [(0.0, (A0, np.diag([1.0, 1e-6])))])))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_minimize_preserves_connection(seed):
    conn = two_pole_connection(seed)
    real = realize(conn)
    small = minimize(real)
    probes = probe_points([0, 1], 8, seed=seed)
    assert small.N <= real.N
    assert relative_error(conn.evaluate, small.evaluate, probes) < 1e-9
    assert fnorm(small.G @ small.Ginv - np.eye(small.N)) < 1e-8


# -- Painleve examples -----------------------------------------------------------


def test_piii_realized_spec():
    real = minimize(realize(linear_problem("III", default_state("III"))))
    spec = jordanize(to_okubo(real).T).spec
    assert spec.sizes == (2, 2)
    assert np.allclose(sorted(spec.eigenvalues, key=lambda v: v.real), [0, 1], atol=1e-8)


def test_pi_is_not_regular():
    real = minimize(realize(linear_problem("I", default_state("I"))))
    assert real.N == 7
    assert real.jordan_spec().sizes == (4, 3)
    sys = to_okubo(real)
    with pytest.raises(NotRegular):
        canonical_frame(sys)


def test_pii_matches_printed_data():
    state = default_state("II")
    conn = linear_problem("II", state)
    real = minimize(realize(conn))
    assert real.jordan_spec().blocks == ((0, 4),)
    od = okubo_data("II", state)
    printed = GOkuboSystem(np.linalg.solve(od.G, od.S @ od.G), od.lam)
    assert np.allclose(sorted(real.lambdaOut, key=abs), sorted(od.lam, key=abs))
    probes = probe_points([0], 10)
    a = rank_reduce(to_okubo(real))
    b = rank_reduce(printed)
    assert relative_error(a.evaluate, b.evaluate, probes) < 1e-9
    assert relative_error(conn.evaluate, a.evaluate, probes) < 1e-9
