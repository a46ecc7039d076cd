import numpy as np
import pytest

from poselabel import simulator as sim
from poselabel.session import LandmarkTable, PoseTable, Session

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def make_session(cam_xy, landmarks=None, dt_ns=33_333_333, **kwargs) -> Session:
    """Session from planar camera positions and {id: (frames, xy)} observations."""
    cam_xy = np.asarray(cam_xy, dtype=float)
    n = len(cam_xy)
    t = np.arange(n, dtype=np.int64) * dt_ns
    camera = PoseTable(t, np.column_stack([cam_xy, np.zeros(n)]))
    rows_t, rows_id, rows_xyz = [], [], []
    for lid, (frames, xy) in (landmarks or {}).items():
        xy = np.broadcast_to(np.asarray(xy, dtype=float), (len(frames), 2))
        for f, p in zip(frames, xy):
            rows_t.append(t[f])
            rows_id.append(lid)
            rows_xyz.append([p[0], p[1], 0.0])
    order = np.argsort(rows_t, kind="stable")
    lm = LandmarkTable(
        np.asarray(rows_t, dtype=np.int64)[order],
        np.asarray(rows_id, dtype=object)[order],
        np.asarray(rows_xyz, dtype=float).reshape(-1, 3)[order],
    )
    return Session(camera, lm, **kwargs)


@pytest.fixture(scope="session")
def clean_short():
    cfg = sim.preset("clean_short", seed=3)
    session, gt = sim.simulate_session(cfg)
    return cfg, session, gt


@pytest.fixture(scope="session")
def noiseless_short():
    cfg = sim.preset("clean_short", seed=5)
    cfg.odometry_noise_sigma = 0.0
    cfg.landmark_obs_noise_sigma = 0.0
    cfg.wifi.shadowing_sigma = 0.0
    session, gt = sim.simulate_session(cfg)
    return cfg, session, gt


@pytest.fixture(scope="session")
def jump_session():
    cfg = sim.preset("jump", seed=2)
    session, gt = sim.simulate_session(cfg)
    return cfg, session, gt
