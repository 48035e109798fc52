import numpy as np
import pytest
import scipy.linalg as sla

from okuboflat.matkit import jordan_block
from okuboflat.okubo import GOkuboSystem, canonical_frame
from okuboflat.painleve import default_state, flow, okubo_path

# criterion number -> (passed, detail); filled by test_acceptance
CRITERIA: dict = {}

TRAJ_SAMPLES = 21
TRAJ_LENGTH = 0.3


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


class Trajectory:
    """Hamiltonian samples and the matching extended Okubo frames."""

    def __init__(self, kind):
        self.kind = kind
        self.state0 = default_state(kind)
        self.times = self.state0.t + np.linspace(0.0, TRAJ_LENGTH, TRAJ_SAMPLES)
        self.ham = flow(kind, self.state0, self.times)
        self.frames = okubo_path(kind, self.state0, self.times)


_CACHE: dict = {}


def trajectory(kind) -> Trajectory:
    if kind not in _CACHE:
        _CACHE[kind] = Trajectory(kind)
    return _CACHE[kind]


@pytest.fixture(scope="session")
def trajectories():
    return {k: trajectory(k) for k in ("II", "III", "IV", "V")}


def random_system(seed=1, jordan=((0.5, 2), (2.0, 1), (-1 + 0.5j, 1)), lam=(0.3 + 0.1j, -0.45, -0.2, 0)):
    rng = np.random.default_rng(seed)
    J = sla.block_diag(*[jordan_block(v, s) for v, s in jordan])
    n = J.shape[0]
    Q = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return GOkuboSystem(Q @ J @ np.linalg.inv(Q), np.asarray(lam, dtype=complex))


@pytest.fixture
def random_frame():
    return canonical_frame(random_system())
