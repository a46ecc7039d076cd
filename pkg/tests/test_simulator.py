import filecmp
import math

import numpy as np
import pytest
import yaml

from poselabel import simulator as sim
from poselabel.geometry import SimilarityTransform2D
from poselabel.global_mapper import map_global
from poselabel.session import validate_session, write_session

FRAME_S = 1 / 30


def quiet(cfg):
    cfg.odometry_noise_sigma = 0.0
    cfg.landmark_obs_noise_sigma = 0.0
    cfg.wifi.shadowing_sigma = 0.0
    return cfg


def test_identity_noiseless_camera_equals_truth():
    cfg = quiet(sim.base_scenario(seed=1))
    cfg.initial_acs_transform = SimilarityTransform2D()
    session, gt = sim.simulate_session(cfg)
    assert np.array_equal(session.camera.t, gt.t)
    assert np.array_equal(session.camera.xy, gt.xy)
    lm = session.landmarks
    for lid, pos in cfg.landmarks.items():
        assert np.allclose(lm.xy[lm.landmark_id == lid], pos, atol=1e-12)


def test_rotated_frame_recovered_by_global_fit():
    cfg = quiet(sim.base_scenario(seed=1))
    truth = SimilarityTransform2D(1.0, math.radians(30), (5.0, 5.0))
    cfg.initial_acs_transform = truth
    session, gt = sim.simulate_session(cfg)
    traj = map_global(session, cfg.registry())
    assert traj.quality["transform"].isclose(truth.inverse(), atol=1e-6)


def test_same_seed_same_bytes(tmp_path):
    for d in ("a", "b"):
        session, gt = sim.simulate_session(sim.preset("jump", seed=11))
        write_session(session, tmp_path / d)
        sim.write_ground_truth(gt, tmp_path / d / sim.GROUND_TRUTH_FILE)
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(names) == 6
    _, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
    assert mismatch == [] and errors == []


def test_different_seed_differs():
    a, _ = sim.simulate_session(sim.preset("clean_short", seed=1))
    b, _ = sim.simulate_session(sim.preset("clean_short", seed=2))
    assert a != b


@pytest.mark.parametrize("name, seconds", [("clean_short", 180.0), ("long_walk", 900.0)])
def test_preset_duration(name, seconds):
    cfg = sim.preset(name, seed=0)
    assert cfg.duration == pytest.approx(seconds)
    session, gt = sim.simulate_session(cfg)
    assert abs(gt.t[-1] / 1e9 - seconds) <= FRAME_S
    assert validate_session(session).ok


def test_all_presets_build():
    assert set(sim.preset_scenarios(0)) == set(sim.PRESET_NAMES)
    with pytest.raises(sim.ScenarioError, match="unknown preset"):
        sim.preset("nope")


def test_update_preset_has_one_update_of_magnitude():
    cfg = sim.preset("acs_update_2m", seed=3)
    (u,) = cfg.acs_updates
    assert math.hypot(*u.delta.translation) == pytest.approx(2.0)
    assert u.delta.scale == 1.0 and u.delta.rotation == 0.0


def test_acs_schedule_is_coherent():
    cfg = quiet(sim.preset("acs_update_2m", seed=3))
    session, gt = sim.simulate_session(cfg)
    times, transforms = sim.acs_schedule(cfg)
    idx = np.searchsorted(times, session.camera.t, side="right") - 1
    for k in np.unique(idx):
        sel = idx == k
        assert np.allclose(transforms[k].inverse().apply(session.camera.xy[sel]), gt.xy[sel], atol=1e-9)
    lm = session.landmarks
    lidx = np.searchsorted(times, lm.t, side="right") - 1
    for k in np.unique(lidx):
        sel = lidx == k
        back = transforms[k].inverse().apply(lm.xy[sel])
        expected = np.array([cfg.landmarks[i] for i in lm.landmark_id[sel]])
        assert np.allclose(back, expected, atol=1e-9)


def test_jump_visible_as_single_step():
    cfg = quiet(sim.preset("jump", seed=4))
    session, _ = sim.simulate_session(cfg)
    step = np.linalg.norm(np.diff(session.camera.xy, axis=0), axis=1)
    assert np.sum(step > 0.5) == 1
    assert step.max() == pytest.approx(3.0, abs=FRAME_S * 1.0 + 1e-9)


def test_tracking_loss_visible_for_window():
    cfg = sim.preset("tracking_loss", seed=4)
    session, _ = sim.simulate_session(cfg)
    f = cfg.faults[0]
    lm = session.landmarks
    fi = session.frame_index(lm.t)
    d = np.linalg.norm(lm.xyz - session.camera.xyz[fi], axis=1)
    collapsed = lm.t[(lm.landmark_id == f.landmark_id) & (d == 0)]
    assert collapsed.min() >= f.t0 * 1e9 - 1 and collapsed.max() <= f.t1 * 1e9 + 1
    assert len(collapsed) >= math.floor((f.t1 - f.t0) * 30)


def test_wifi_follows_path_loss_model():
    cfg = quiet(sim.base_scenario(seed=2))
    session, gt = sim.simulate_session(cfg)
    w, wc = session.wifi, cfg.wifi
    assert len(w) > 0
    route = sim.Route(cfg.waypoints, cfg.speed)
    aps = np.array(wc.ap_positions)
    k = np.array([int(b.replace(":", "")[-4:], 16) for b in w.bssid])
    d = np.maximum(np.linalg.norm(route.position(w.t / 1e9) - aps[k], axis=1), 1.0)
    expected = np.round(wc.tx_power_dbm - 10 * wc.pathloss_exponent * np.log10(d))
    assert np.array_equal(w.rss, expected)
    assert w.rss.min() >= wc.min_rss_dbm
    for sid in np.unique(w.scan_id):
        ts = w.t[w.scan_id == sid]
        assert np.all(np.diff(ts) == round(wc.entry_spacing * 1e9))


def test_scan_labels_are_entry_means():
    cfg = sim.base_scenario(seed=2)
    session, gt = sim.simulate_session(cfg)
    route = sim.Route(cfg.waypoints, cfg.speed)
    w = session.wifi
    for sid in np.unique(w.scan_id)[:20]:
        ts = w.t[w.scan_id == sid]
        assert np.allclose(gt.scan_labels[int(sid)], route.position(ts / 1e9).mean(axis=0), atol=1e-12)


def test_control_point_events_at_control_points():
    cfg = sim.base_scenario(seed=2)
    session, gt = sim.simulate_session(cfg)
    ev = session.events.control_points()
    assert len(ev) == len(cfg.control_points)
    pos = sim.Route(cfg.waypoints, cfg.speed).position(ev / 1e9)
    cps = np.array(cfg.control_points)
    assert np.linalg.norm(pos[:, None] - cps[None], axis=-1).min(axis=1).max() < 1e-6


def test_imu_stream():
    cfg = sim.base_scenario(seed=2)
    session, _ = sim.simulate_session(cfg)
    s = session.sensors
    for code in ("ACC", "GYR", "ROT"):
        t = s.t[s.sensor_type == code]
        assert len(t) == pytest.approx(cfg.duration * cfg.imu_rate, abs=1)
    q = s.values[s.sensor_type == "ROT"]
    assert np.allclose(np.linalg.norm(q, axis=1), 1.0)


def test_config_round_trip_through_yaml():
    cfg = sim.preset("tracking_loss", seed=9)
    cfg.faults.append(sim.Jump(30.0, (1.0, -1.0)))
    cfg.acs_updates.append(sim.AcsUpdate(50.0, SimilarityTransform2D(1.01, 0.02, (0.5, 0.0))))
    text = yaml.safe_dump(cfg.to_dict())
    back = sim.ScenarioConfig.from_dict(yaml.safe_load(text))
    assert back.to_dict() == cfg.to_dict()
    a, _ = sim.simulate_session(cfg)
    b, _ = sim.simulate_session(back)
    assert a == b


@pytest.mark.parametrize(
    "change",
    [
        {"speed": 0.0},
        {"waypoints": [[0.0, 0.0]]},
        {"odometry_noise_sigma": -1.0},
        {"faults": [{"tracking_loss": {"t0": 5.0, "t1": 4.0, "landmark_id": "L1"}}]},
        {"faults": [{"teleport": {}}]},
        {"bogus_field": 1},
    ],
)
def test_invalid_config_rejected(change):
    d = sim.base_scenario(seed=0).to_dict()
    d.update(change)
    with pytest.raises(sim.ScenarioError):
        sim.simulate_session(sim.ScenarioConfig.from_dict(d))


def test_ground_truth_file_round_trip(tmp_path, clean_short):
    gt = clean_short[2]
    path = sim.write_ground_truth(gt, tmp_path / "gt.csv")
    back = sim.read_ground_truth(path)
    assert np.array_equal(back.t, gt.t) and np.array_equal(back.xy, gt.xy)
