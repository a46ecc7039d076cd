import logging

import numpy as np
import pytest

from conftest import make_session
from poselabel import simulator as sim
from poselabel.evaluator import trajectory_error
from poselabel.geometry import SimilarityTransform2D
from poselabel.global_mapper import map_global, median_landmark_positions
from poselabel.session import LandmarkRegistry
from poselabel.trajectory import MappingError, SegmentStatus


def test_median_is_componentwise():
    s = make_session(
        np.zeros((10, 2)),
        {"A": ([0, 1, 2], [[1.0, 1.0], [1.2, 0.9], [100.0, 100.0]]), "B": ([3], [[5.0, -2.0]])},
    )
    med = median_landmark_positions(s)
    assert np.allclose(med["A"], [1.2, 1.0])
    assert np.allclose(med["B"], [5.0, -2.0])


def test_median_skips_unknown_rows():
    s = make_session(np.zeros((10, 2)), {"A": ([0, 1, 2], [[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])})
    s = s.with_landmarks(s.landmarks.with_unknown(np.array([False, False, True])))
    assert np.allclose(median_landmark_positions(s)["A"], [1.5, 1.5])


def test_noiseless_recovers_inverse_transform(noiseless_short):
    cfg, session, gt = noiseless_short
    traj = map_global(session, cfg.registry())
    truth = cfg.initial_acs_transform.inverse()
    assert traj.quality["transform"].isclose(truth, atol=1e-6)
    assert np.abs(traj.xy - gt.xy).max() <= 1e-6
    assert traj.quality["rms_residual"] <= 1e-6


def test_single_mapped_segment_covers_session(clean_short):
    cfg, session, _ = clean_short
    traj = map_global(session, cfg.registry())
    assert len(traj.segments) == 1
    seg = traj.segments[0]
    assert seg.status is SegmentStatus.MAPPED
    assert (seg.start_t, seg.end_t) == session.time_range
    assert len(traj) == len(session.camera)


def test_clean_session_error_small(clean_short):
    cfg, session, gt = clean_short
    assert trajectory_error(map_global(session, cfg.registry()), gt).mean <= 0.1


def test_acs_update_degrades_global():
    cfg = sim.preset("acs_update_2m", seed=1)
    session, gt = sim.simulate_session(cfg)
    assert trajectory_error(map_global(session, cfg.registry()), gt).mean >= 0.5


def test_error_grows_with_update_magnitude():
    means = []
    for m in (0.5, 1.0, 2.0, 4.0):
        cfg = sim.acs_update_scenario(m, seed=4)
        session, gt = sim.simulate_session(cfg)
        means.append(trajectory_error(map_global(session, cfg.registry()), gt).mean)
    assert means == sorted(means)


def test_fewer_than_two_common_landmarks():
    s = make_session(np.zeros((10, 2)), {"A": ([0], [[1.0, 1.0]]), "Z": ([1], [[2.0, 1.0]])})
    reg = LandmarkRegistry({"A": (0, 0), "B": (5, 5)})
    with pytest.raises(MappingError) as err:
        map_global(s, reg)
    assert err.value.code == "E_LANDMARKS"


def test_unregistered_landmarks_are_ignored(caplog):
    t = SimilarityTransform2D(2.0, 0.5, (1.0, -3.0))
    reg = LandmarkRegistry({"A": (0, 0), "B": (10, 0), "C": (0, 5)})
    obs = {k: ([k_i], [t.inverse().apply(reg[k])]) for k_i, k in enumerate(reg.ids())}
    obs["X"] = ([5], [[50.0, 50.0]])
    s = make_session(np.zeros((10, 2)), obs)
    with caplog.at_level(logging.WARNING):
        traj = map_global(s, reg)
    assert "X" in caplog.text
    assert traj.quality["landmarks_used"] == ["A", "B", "C"]
    assert traj.quality["transform"].isclose(t, atol=1e-9)
