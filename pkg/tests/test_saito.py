import dataclasses

import numpy as np
import pytest

from okuboflat.errors import JacobianDegenerate, NotRegular, Resonant
from okuboflat.matkit import fnorm
from okuboflat.okubo import ExtOkuboFrame, GOkuboSystem, canonical_frame
from okuboflat.painleve import default_state, okubo_data, okubo_frame
from okuboflat.saito import (Weights, canonical_product_residual, classify_spec, dC_residuals, flat_frame,
                             jacobian_check, make_primitive, potential_sampler, primitive_section_check,
                             regularity_class, saito_from_initial, verify_potential, wdvv_residuals)


def toy_potential(t, extra=0.0):
    """Weights (1/2, 1): ``g = (t1 t2, t2^2/2 + t1^4)``, plus an optional non-homogeneous term."""
    t1, t2 = t
    return np.array([t1 * t2, t2**2 / 2 + t1**4 + extra * t1**3])


def test_weights():
    w = Weights.from_lambda([-0.5, -0.5, 0.0, 0.0])
    assert np.array_equal(w.w, [0.5, 0.5, 1, 1]) and w.N == 4
    with pytest.raises(ValueError):
        Weights([0.3, 0.9])
    with pytest.raises(Resonant):
        Weights([3.0, 1.0])


def test_scalar_case():
    z, lam = 0.8 - 0.3j, 0.2
    sf = flat_frame(ExtOkuboFrame(GOkuboSystem([[z]], [lam]), np.eye(1), (1,), [z]))
    assert sf.t[0] == pytest.approx(-z)
    assert sf.Cmat[0, 0] == pytest.approx(-z)
    assert sf.higgs[0][0, 0] == pytest.approx(1)
    assert sf.g[0] == pytest.approx(z**2 / 2)


def primitive_diagonal(z, lam):
    """``T = P diag(z) P^{-1}`` with a last row of ``P`` that meets every block."""
    n = len(z)
    P = np.eye(n) + np.eye(n, k=-1)
    P[-1] = 1
    sys = GOkuboSystem(P @ np.diag(z) @ np.linalg.inv(P), lam)
    return ExtOkuboFrame(sys, P, (1,) * n, z)


def test_trivial_diagonal_wdvv():
    sf = flat_frame(primitive_diagonal([0.0, 1.0], [0.3, 0.0]))
    assert wdvv_residuals(sf).max() < 1e-10
    assert canonical_product_residual(sf) < 1e-10


def test_pv_higgs_structure(trajectories):
    for fr in trajectories["V"].frames[::5]:
        sf = flat_frame(fr)
        assert fnorm(sf.higgs[-1] - np.eye(3)) < 1e-9
        rep = wdvv_residuals(sf)
        assert rep.max("commute") < 1e-9
        assert set(rep.conditions()) == {"commute", "unit", "symmetry", "homogeneity"}


def test_piii_trajectory_wdvv(trajectories):
    worst = max(wdvv_residuals(flat_frame(fr)).max() for fr in trajectories["III"].frames)
    assert worst < 1e-6


def test_flat_coordinates_are_last_row(trajectories):
    for kind in ("II", "V"):
        sf = flat_frame(trajectories[kind].frames[3])
        w = sf.weights.w
        assert np.allclose(sf.t, sf.Cmat[-1], atol=1e-12, rtol=0)
        assert np.allclose(sf.t, -sf.T[-1] / (1 + w - w[-1]), atol=1e-12, rtol=0)


def test_canonical_product(trajectories):
    for kind in ("III", "V"):
        assert canonical_product_residual(flat_frame(trajectories[kind].frames[0])) < 1e-6


def test_corrupted_higgs_detected(trajectories):
    sf = flat_frame(trajectories["III"].frames[0])
    bad = list(sf.higgs)
    bad[0] = np.array(bad[0])
    bad[0][1, 2] += 1e-3
    rep = wdvv_residuals(dataclasses.replace(sf, higgs=tuple(bad)))
    assert rep.max() > 1e-4


def test_dC_on_pv_frame(trajectories):
    rep = dC_residuals(trajectories["V"].frames[:2])
    assert rep.max() < 1e-5
    assert rep.conditions() == ["dC"]


def test_regularity_classes():
    vi = okubo_frame("VI", default_state("VI"), route="rank4")
    assert classify_spec(regularity_class(vi))["pattern"] == "VI"
    assert regularity_class(okubo_frame("III", default_state("III"))).partition() == "22"
    od = okubo_data("I", default_state("I"))
    info = classify_spec(regularity_class(np.linalg.solve(od.G, od.S @ od.G)))
    assert info == {"partition": "43", "regular": False, "pattern": None, "dim": 7}


def test_primitive_section(trajectories):
    fr = canonical_frame(GOkuboSystem(np.diag([0.0, 1.0, 2.0]), [0.1, 0.2, 0.0]))
    bare = ExtOkuboFrame(fr.sys, np.eye(3), fr.blocks, fr.zCoords)
    ok, values = primitive_section_check(bare)
    assert not ok and values == [0, 0, 1]
    assert not jacobian_check(bare)[0]
    with pytest.raises(JacobianDegenerate):
        flat_frame(bare)
    assert primitive_section_check(trajectories["V"].frames[0])[0]
    with pytest.raises(IndexError):
        primitive_section_check(bare, row=3)


def test_make_primitive_raw_piii():
    raw = okubo_frame("III", default_state("III"), primitive=False)
    assert not primitive_section_check(raw)[0]
    fixed, K = make_primitive(raw)
    assert primitive_section_check(fixed)[0] and jacobian_check(fixed)[0]
    B = np.diag(raw.lam)
    assert fnorm(K @ B - B @ K) < 1e-12
    assert np.allclose(fixed.zCoords, raw.zCoords)
    assert fnorm(fixed.T - K @ raw.T @ np.linalg.inv(K)) < 1e-10
    same, eye = make_primitive(fixed)
    assert same is fixed and np.array_equal(eye, np.eye(4))


def test_saito_from_initial_trivial():
    S = np.diag([0.0, 1.0])
    # e_N would give a non-primitive frame, so the eigenvectors of R are tilted
    V = np.array([[1.0, 1.0], [-1.0, 1.0]])
    R = V @ np.diag([0.3, 0.0]) @ np.linalg.inv(V)
    out = saito_from_initial(S, R, [1, 1], [0.0, 1.0])
    assert len(out) == 2
    assert np.allclose(out[0].t, out[1].t)
    G = np.column_stack([V[:, 0] / np.sqrt(2), V[:, 1]])  # eig returns unit vectors; v is kept as given
    assert np.allclose(out[0].T, np.linalg.solve(G, S @ G))
    assert np.allclose(out[0].weights.w, [1.3, 1.0])
    with pytest.raises(ValueError):
        saito_from_initial(S, R, [1, 0], [0.0, 1.0])
    with pytest.raises(NotRegular):
        saito_from_initial(np.zeros((2, 2)), R, [1, 1], [0.0, 0.0])


def test_verify_potential_quadratic():
    rep = verify_potential(lambda t: np.array([t[0] * t[1], (t[0] ** 2 + t[1] ** 2) / 2]), [0.3, 1.2], Weights([1, 1]))
    assert rep.max() < 1e-8


def test_verify_potential_toy():
    w = Weights([0.5, 1.0])
    t0 = [0.7, -0.4 + 0.2j]
    rep = verify_potential(toy_potential, t0, w)
    assert rep.max() < 1e-6
    assert rep.max("unit") < 1e-6

    def with_C(t, eps=0.0):
        t1, t2 = t
        return toy_potential(t), np.array([[t2, 4 * t1**3 + eps * t2], [t1, t2]])

    rep = verify_potential(with_C, t0, w)
    assert rep.max() < 1e-6 and "Cfit" in rep.conditions()
    assert verify_potential(lambda t: toy_potential(t, 0.5), t0, w).max("homogeneity") > 1e-2
    assert verify_potential(lambda t: with_C(t, 1e-3), t0, w).max("symmetry") > 1e-4


@pytest.mark.parametrize("kind", ["II", "III", "IV"])
def test_verify_potential_pipeline(trajectories, kind):
    fr = trajectories[kind].frames[0]
    sampler = potential_sampler(fr)
    g, _ = sampler(sampler.t0)
    assert np.allclose(g, flat_frame(fr).g)
    assert verify_potential(sampler, sampler.t0, sampler.weights).max() < 1e-4


def test_verify_potential_pipeline_large_coordinates(trajectories):
    # |t| ~ 50 here, so the default relative step is truncation limited; the error is O(h^2)
    sampler = potential_sampler(trajectories["V"].frames[0])
    coarse = verify_potential(sampler, sampler.t0, sampler.weights).max()
    fine = verify_potential(sampler, sampler.t0, sampler.weights, step=1e-5).max()
    assert 50 < coarse / fine < 200
    assert fine < 1e-4
