"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import filecmp
import math
import time

import numpy as np
import pytest
from click.testing import CliRunner
from scipy.optimize import linprog
from scipy.stats import spearmanr

from conftest import ACCEPTANCE_LINES
from poselabel import simulator as sim
from poselabel.annotator import build_fingerprints
from poselabel.cli import main
from poselabel.evaluator import control_point_errors, knn_localize, random_split, trajectory_error
from poselabel.geometry import SimilarityTransform2D, estimate_similarity_ls, estimate_similarity_two_point
from poselabel.global_mapper import map_global
from poselabel.local_mapper import LocalMapperConfig, detect_failures, map_local
from poselabel.session import parse_session, write_session

UNCORRECTED = LocalMapperConfig(correction_enabled=False)


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE_LINES.append(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def random_transform(rng):
    return SimilarityTransform2D(
        float(rng.uniform(0.1, 10.0)), float(rng.uniform(-math.pi, math.pi)), tuple(rng.uniform(-100, 100, 2))
    )


def test_1_umeyama_exactness():
    worst, elapsed = 0.0, 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        truth = random_transform(rng)
        src = rng.uniform(-50, 50, size=(int(rng.integers(2, 51)), 2))
        dst = truth.apply(src)
        t0 = time.perf_counter()
        est = estimate_similarity_ls(src, dst)
        elapsed += time.perf_counter() - t0
        dr = abs(math.remainder(est.rotation - truth.rotation, 2 * math.pi))
        worst = max(worst, abs(est.scale - truth.scale), dr, *np.abs(np.subtract(est.translation, truth.translation)))
    record(1, worst <= 1e-9 and elapsed < 1.0, f"max parameter error {worst:.2e}, {elapsed * 1e3:.1f} ms for 100 fits")


def test_2_two_point_consistency():
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        src = rng.uniform(-50, 50, size=(2, 2))
        dst = random_transform(rng).apply(src) + rng.normal(0, 0.1, size=(2, 2))
        a = estimate_similarity_two_point(src[0], src[1], dst[0], dst[1])
        b = estimate_similarity_ls(src, dst)
        dr = abs(math.remainder(a.rotation - b.rotation, 2 * math.pi))
        worst = max(worst, abs(a.scale - b.scale), dr, *np.abs(np.subtract(a.translation, b.translation)))
    record(2, worst <= 1e-9, f"max parameter disagreement {worst:.2e} over 100 cases")


def test_3_clean_session_closure():
    cfg = sim.preset("clean_short", seed=0)
    session, gt = sim.simulate_session(cfg)
    reg = cfg.registry()
    g = trajectory_error(map_global(session, reg), gt).mean
    lo = trajectory_error(map_local(session, reg), gt).mean

    quiet = sim.preset("clean_short", seed=0)
    quiet.odometry_noise_sigma = 0.0
    quiet.landmark_obs_noise_sigma = 0.0
    qs, qgt = sim.simulate_session(quiet)
    qg = trajectory_error(map_global(qs, reg), qgt).mean
    ql = trajectory_error(map_local(qs, reg), qgt).mean
    ok = g <= 0.10 and lo <= 0.10 and qg <= 1e-6 and ql <= 1e-6
    record(3, ok, f"noisy mean global {g:.3f} m, local {lo:.3f} m; noiseless {qg:.1e} / {ql:.1e} m")


def test_4_acs_update_ordering():
    t0 = time.perf_counter()
    means = {"global": [], "local": [], "local_corrected": []}
    for seed in range(20):
        cfg = sim.preset("acs_update_2m", seed=seed)
        session, _ = sim.simulate_session(cfg)
        reg, cps = cfg.registry(), cfg.control_point_set()
        ev = session.events.control_points()
        for name, traj in (
            ("global", map_global(session, reg)),
            ("local", map_local(session, reg, UNCORRECTED)),
            ("local_corrected", map_local(session, reg)),
        ):
            means[name].append(control_point_errors(traj, ev, cps).mean)
    elapsed = time.perf_counter() - t0
    c, lo, g = (float(np.mean(means[k])) for k in ("local_corrected", "local", "global"))
    ok = c < lo < g and g >= 0.5 and elapsed < 30
    record(4, ok, f"control-point mean corrected {c:.3f} < local {lo:.3f} < global {g:.3f} m, {elapsed:.1f} s")


def test_5_error_grows_with_update_magnitude():
    mags = [0.0, 0.5, 1.0, 2.0, 4.0]
    xs, ys = [], []
    for seed in range(10):
        for m in mags:
            cfg = sim.acs_update_scenario(m, seed=seed) if m > 0 else sim.base_scenario(seed=seed)
            session, gt = sim.simulate_session(cfg)
            xs.append(m)
            ys.append(trajectory_error(map_global(session, cfg.registry()), gt).mean)
    rho = spearmanr(xs, ys).statistic
    per_mag = [float(np.mean(ys[i :: len(mags)])) for i in range(len(mags))]
    record(5, rho > 0.9, f"Spearman {rho:.3f}; mean error by magnitude " + ", ".join(f"{v:.2f}" for v in per_mag))


def _fault_free(traj, session, jump_ts, windows):
    """True if no emitted sample belongs to a segment holding a faulty frame."""
    cam_t = session.camera.t
    last = len(traj.segments) - 1
    for k in np.unique(traj.segment_id):
        seg = traj.segments[k]
        inside = (cam_t >= seg.start_t) & ((cam_t < seg.end_t) | ((k == last) & (cam_t == seg.end_t)))
        ts = cam_t[inside]
        if any(np.any(ts == j) for j in jump_ts):
            return False
        if any(np.any((ts >= a) & (ts <= b)) for a, b in windows):
            return False
    return True


def test_6_failure_recall():
    detected = total = 0
    clean_output = True
    for seed in range(20):
        for name in ("jump", "tracking_loss"):
            cfg = sim.preset(name, seed=seed)
            session, _ = sim.simulate_session(cfg)
            rep = detect_failures(session)
            jump_ts, windows = [], []
            for f in cfg.faults:
                total += 1
                if isinstance(f, sim.Jump):
                    t = int(session.camera.t[np.searchsorted(session.camera.t, round(f.t * 1e9))])
                    jump_ts.append(t)
                    hit = any(abs(tj - t) <= 34_000_000 for tj, _ in rep.jump_events)
                else:
                    a, b = round(f.t0 * 1e9), round(f.t1 * 1e9)
                    windows.append((a, b))
                    hit = any(
                        lid == f.landmark_id and min(e, b) - max(s, a) >= 0.9 * (b - a)
                        for s, e, lid in rep.tracking_loss_intervals
                    )
                detected += hit
            traj = map_local(session, cfg.registry())
            clean_output &= _fault_free(traj, session, jump_ts, windows)

    cfg = sim.preset("running", seed=0)
    session, gt = sim.simulate_session(cfg)
    reg = cfg.registry()
    mc = trajectory_error(map_local(session, reg), gt).max
    mu = trajectory_error(map_local(session, reg, UNCORRECTED), gt).max
    ok = detected == total and clean_output and mc < mu
    record(
        6, ok,
        f"detected {detected}/{total} faults, corrected output fault-free: {clean_output}; "
        f"running max corrected {mc:.2f} < uncorrected {mu:.2f} m",
    )


def test_7_long_walk_stability():
    cfg = sim.preset("long_walk", seed=0)
    session, gt = sim.simulate_session(cfg)
    traj = map_local(session, cfg.registry())
    xy, ok, _ = traj.positions_at(gt.t)
    err = np.linalg.norm(xy - gt.xy, axis=1)
    tsec = gt.t / 1e9
    first = float(np.nanmean(np.where(ok & (tsec < 60), err, np.nan)))
    final = float(np.nanmean(np.where(ok & (tsec > tsec[-1] - 60), err, np.nan)))
    mean = float(err[ok].mean())
    fps = build_fingerprints(traj, session.wifi).fingerprints
    label_err = float(np.mean([np.linalg.norm(fp.label - gt.scan_labels[fp.scan_id]) for fp in fps]))
    passed = mean <= 0.15 and final <= 2 * first
    record(
        7, passed,
        f"mean error {mean:.3f} m (fingerprint labels {label_err:.3f} m); "
        f"first minute {first:.3f}, final minute {final:.3f} m",
    )


def _in_hull(points, q) -> bool:
    n = len(points)
    a_eq = np.vstack([points.T, np.ones(n)])
    res = linprog(np.zeros(n), A_eq=a_eq, b_eq=np.append(q, 1.0), bounds=[(0, None)] * n, method="highs")
    return res.status == 0


def test_8_annotation_correctness():
    worst_slack = -math.inf
    checked = hull_ok = 0
    for name in ("clean_short", "acs_update_2m", "jump", "tracking_loss", "running"):
        for seed in range(3):
            cfg = sim.preset(name, seed=seed)
            session, gt = sim.simulate_session(cfg)
            route = sim.Route(cfg.waypoints, cfg.speed)
            for traj in (map_local(session, cfg.registry()), map_global(session, cfg.registry())):
                sample_err = np.linalg.norm(traj.xy - route.position(traj.t / 1e9), axis=1)
                for fp in build_fingerprints(traj, session.wifi).fingerprints:
                    truth = route.position(fp.t / 1e9).mean(axis=0)
                    i = np.searchsorted(traj.t, fp.t, side="right") - 1
                    frames = np.unique(np.clip(np.concatenate([i, i + 1]), 0, len(traj) - 1))
                    bound = sample_err[frames].max() + cfg.speed / cfg.frame_rate
                    worst_slack = max(worst_slack, np.linalg.norm(fp.label - truth) - bound)
                    hull_ok += _in_hull(fp.positions, fp.label)
                    checked += 1
    ok = worst_slack <= 1e-9 and hull_ok == checked
    record(8, ok, f"{checked} fingerprints, worst (error - bound) {worst_slack:.3f} m, in hull {hull_ok}/{checked}")


def test_9_knn_baseline():
    cfg = sim.preset("long_walk", seed=0)
    assert len(cfg.wifi.ap_positions) == 8 and cfg.wifi.shadowing_sigma == 4.0
    session, _ = sim.simulate_session(cfg)
    fps = build_fingerprints(map_local(session, cfg.registry()), session.wifi).fingerprints
    train, test = random_split(fps, 0.3, seed=0)
    res = knn_localize(train, test, k=5)
    exact = knn_localize(fps, fps, k=1)
    ok = res.stats.median <= 3.0 and exact.stats.max == 0.0 and exact.floor_accuracy == 1.0
    record(
        9, ok,
        f"{len(train)}/{len(test)} split, k=5 median {res.stats.median:.2f} m; "
        f"k=1 train==test max error {exact.stats.max:.1e} m",
    )


def _pipeline(root):
    r = CliRunner()

    def run(*args):
        res = r.invoke(main, ["--seed", "13", *map(str, args)], catch_exceptions=False)
        assert res.exit_code == 0, res.output

    run("simulate", "--preset", "jump", "--out", root / "s")
    run("map", "--session", root / "s", "--landmarks", root / "s" / "site" / "landmarks.csv", "--out", root / "m")
    run("annotate", "--session", root / "s", "--trajectory", root / "m" / "trajectory_local_corrected.csv",
        "--out", root / "a")
    run("evaluate", "--trajectory", root / "m" / "trajectory_global.csv",
        "--trajectory", root / "m" / "trajectory_local_corrected.csv",
        "--ground-truth", root / "s" / "ground_truth.csv", "--fingerprints", root / "a" / "fingerprints.csv",
        "--knn", "--out", root / "e")
    return sorted(p.relative_to(root) for p in root.rglob("*") if p.is_file())


def test_10_round_trip_and_determinism(tmp_path):
    identical = 0
    for name in sim.PRESET_NAMES:
        session, _ = sim.simulate_session(sim.preset(name, seed=1))
        write_session(session, tmp_path / name)
        back = parse_session(tmp_path / name, session.floor_id, session.device_id)
        identical += back == session
    files_a = _pipeline(tmp_path / "run_a")
    files_b = _pipeline(tmp_path / "run_b")
    same = files_a == files_b and all(
        filecmp.cmp(tmp_path / "run_a" / f, tmp_path / "run_b" / f, shallow=False) for f in files_a
    )
    ok = identical == len(sim.PRESET_NAMES) and same
    record(
        10, ok,
        f"round trip identical for {identical}/{len(sim.PRESET_NAMES)} presets; "
        f"pipeline {len(files_a)} files byte-identical: {same}",
    )
