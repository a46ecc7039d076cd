"""Deterministic synthetic sessions with known ground truth.

A walker follows a polyline at constant speed through a floor with surveyed
landmarks. The tracker frame is the building frame pushed through a
similarity transform that changes at discrete update instants. Camera poses
carry a bounded odometry drift; landmark anchors are logged every frame once
they have been seen, with independent noise. Faults overwrite the logs the
way a failing tracker does.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from poselabel.geometry import SimilarityTransform2D
from poselabel.session import (
    ControlPointSet,
    EventTable,
    LandmarkRegistry,
    LandmarkTable,
    PoseTable,
    SensorTable,
    Session,
    SessionFormatError,
    WifiTable,
    atomic_write_rows,
    format_float,
)

GROUND_TRUTH_HEADER = ["t_ns", "x", "y"]
GROUND_TRUTH_FILE = "ground_truth.csv"


class ScenarioError(ValueError):
    code = "E_SCENARIO"


@dataclass(frozen=True)
class AcsUpdate:
    """The tracker frame is post-composed with ``delta`` from ``t`` seconds on."""

    t: float
    delta: SimilarityTransform2D


@dataclass(frozen=True)
class TrackingLoss:
    """Landmark logged at the camera position for ``t0 <= t <= t1`` seconds."""

    t0: float
    t1: float
    landmark_id: str


@dataclass(frozen=True)
class Jump:
    """Tracker frame translated by ``offset`` (metres) from ``t`` seconds on."""

    t: float
    offset: tuple[float, float]


@dataclass
class WifiConfig:
    ap_positions: list[tuple[float, float]] = field(default_factory=list)
    scan_period: float = 2.0
    pathloss_exponent: float = 3.0
    tx_power_dbm: float = -40.0
    shadowing_sigma: float = 4.0
    entry_spacing: float = 0.02
    min_rss_dbm: int = -100


@dataclass
class ScenarioConfig:
    waypoints: list[tuple[float, float]]
    landmarks: dict[str, tuple[float, float]]
    speed: float = 1.0
    frame_rate: float = 30.0
    initial_acs_transform: SimilarityTransform2D = field(default_factory=SimilarityTransform2D)
    odometry_noise_sigma: float = 0.005
    # mean-reversion time of the odometry drift; None gives an unbounded random walk
    odometry_drift_tau: float | None = 5.0
    acs_updates: list[AcsUpdate] = field(default_factory=list)
    landmark_detect_radius: float = 3.0
    landmark_obs_noise_sigma: float = 0.02
    faults: list[TrackingLoss | Jump] = field(default_factory=list)
    wifi: WifiConfig = field(default_factory=WifiConfig)
    control_points: list[tuple[float, float]] = field(default_factory=list)
    imu_rate: float = 10.0
    camera_height: float = 1.4
    landmark_height: float = 1.5
    seed: int = 0
    floor_id: str = "1"
    device_id: str = "sim"

    def validate(self) -> None:
        if not self.speed > 0:
            raise ScenarioError("speed must be positive")
        if not self.frame_rate > 0:
            raise ScenarioError("frame_rate must be positive")
        if len(self.waypoints) < 2:
            raise ScenarioError("need at least 2 waypoints")
        if route_length(self.waypoints) <= 0:
            raise ScenarioError("route has zero length")
        if self.odometry_noise_sigma < 0 or self.landmark_obs_noise_sigma < 0:
            raise ScenarioError("noise levels must be non-negative")
        if self.odometry_drift_tau is not None and not self.odometry_drift_tau > 0:
            raise ScenarioError("odometry_drift_tau must be positive or None")
        for f in self.faults:
            if isinstance(f, TrackingLoss) and not f.t1 >= f.t0:
                raise ScenarioError("tracking loss must have t1 >= t0")

    @property
    def duration(self) -> float:
        return route_length(self.waypoints) / self.speed

    def registry(self) -> LandmarkRegistry:
        return LandmarkRegistry(dict(self.landmarks), self.floor_id)

    def control_point_set(self) -> ControlPointSet:
        return ControlPointSet(np.array(self.control_points, dtype=float).reshape(-1, 2), self.floor_id)

    # -- structured-text form ------------------------------------------------

    def to_dict(self) -> dict:
        def tr(t: SimilarityTransform2D):
            return {"scale": t.scale, "rotation": t.rotation, "translation": list(t.translation)}

        faults = []
        for f in self.faults:
            if isinstance(f, Jump):
                faults.append({"jump": {"t": f.t, "offset": list(f.offset)}})
            else:
                faults.append({"tracking_loss": {"t0": f.t0, "t1": f.t1, "landmark_id": f.landmark_id}})
        return {
            "waypoints": [list(map(float, p)) for p in self.waypoints],
            "landmarks": {k: list(map(float, v)) for k, v in self.landmarks.items()},
            "speed": self.speed,
            "frame_rate": self.frame_rate,
            "initial_acs_transform": tr(self.initial_acs_transform),
            "odometry_noise_sigma": self.odometry_noise_sigma,
            "odometry_drift_tau": self.odometry_drift_tau,
            "acs_updates": [{"t": u.t, "delta": tr(u.delta)} for u in self.acs_updates],
            "landmark_detect_radius": self.landmark_detect_radius,
            "landmark_obs_noise_sigma": self.landmark_obs_noise_sigma,
            "faults": faults,
            "wifi": {**asdict(self.wifi), "ap_positions": [list(map(float, p)) for p in self.wifi.ap_positions]},
            "control_points": [list(map(float, p)) for p in self.control_points],
            "imu_rate": self.imu_rate,
            "camera_height": self.camera_height,
            "landmark_height": self.landmark_height,
            "seed": self.seed,
            "floor_id": self.floor_id,
            "device_id": self.device_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ScenarioConfig:
        d = dict(d)

        def tr(x):
            if x is None:
                return SimilarityTransform2D()
            return SimilarityTransform2D(
                x.get("scale", 1.0), x.get("rotation", 0.0), tuple(x.get("translation", (0.0, 0.0)))
            )

        faults = []
        for f in d.pop("faults", []) or []:
            if "jump" in f:
                faults.append(Jump(float(f["jump"]["t"]), tuple(f["jump"]["offset"])))
            elif "tracking_loss" in f:
                g = f["tracking_loss"]
                faults.append(TrackingLoss(float(g["t0"]), float(g["t1"]), str(g["landmark_id"])))
            else:
                raise ScenarioError(f"unknown fault {f!r}")
        try:
            cfg = cls(
                waypoints=[tuple(p) for p in d.pop("waypoints")],
                landmarks={str(k): tuple(v) for k, v in d.pop("landmarks").items()},
                initial_acs_transform=tr(d.pop("initial_acs_transform", None)),
                acs_updates=[AcsUpdate(float(u["t"]), tr(u["delta"])) for u in d.pop("acs_updates", []) or []],
                faults=faults,
                wifi=WifiConfig(**(d.pop("wifi", None) or {})),
                control_points=[tuple(p) for p in d.pop("control_points", []) or []],
                **d,
            )
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"invalid scenario config: {exc}") from exc
        cfg.wifi.ap_positions = [tuple(p) for p in cfg.wifi.ap_positions]
        return cfg


@dataclass
class GroundTruth:
    t: np.ndarray
    xy: np.ndarray
    scan_labels: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.int64).reshape(-1)
        self.xy = np.asarray(self.xy, dtype=float).reshape(-1, 2)

    def position_at(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.column_stack(
            [np.interp(ts, self.t, self.xy[:, 0]), np.interp(ts, self.t, self.xy[:, 1])]
        )


def write_ground_truth(gt: GroundTruth, path) -> Path:
    f = format_float
    return atomic_write_rows(
        path, GROUND_TRUTH_HEADER, ([str(t), f(x), f(y)] for t, (x, y) in zip(gt.t.tolist(), gt.xy.tolist()))
    )


def read_ground_truth(path) -> GroundTruth:
    import csv

    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if [c.strip() for c in next(reader, [])] != GROUND_TRUTH_HEADER:
            raise SessionFormatError(f"{path.name}: expected header {','.join(GROUND_TRUTH_HEADER)}")
        try:
            rows = [(int(r[0]), float(r[1]), float(r[2])) for r in reader if r]
        except (ValueError, IndexError) as exc:
            raise SessionFormatError(f"{path.name}: {exc}") from exc
    return GroundTruth([r[0] for r in rows], [(r[1], r[2]) for r in rows])


# -- route geometry ----------------------------------------------------------


def route_length(waypoints) -> float:
    w = np.asarray(waypoints, dtype=float)
    return float(np.sum(np.linalg.norm(np.diff(w, axis=0), axis=1)))


class Route:
    """Constant-speed traversal of a polyline."""

    def __init__(self, waypoints, speed: float):
        self.w = np.asarray(waypoints, dtype=float)
        self.speed = float(speed)
        seg = np.linalg.norm(np.diff(self.w, axis=0), axis=1)
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])
        self.length = float(self.cum[-1])

    def position(self, t_s) -> np.ndarray:
        s = np.clip(np.asarray(t_s, dtype=float) * self.speed, 0.0, self.length)
        return np.column_stack([np.interp(s, self.cum, self.w[:, 0]), np.interp(s, self.cum, self.w[:, 1])])

    def heading(self, t_s) -> np.ndarray:
        s = np.clip(np.asarray(t_s, dtype=float) * self.speed, 0.0, self.length)
        k = np.clip(np.searchsorted(self.cum, s, side="right") - 1, 0, len(self.w) - 2)
        d = self.w[k + 1] - self.w[k]
        return np.arctan2(d[:, 1], d[:, 0])

    def passing_times(self, point, tol: float = 1e-6) -> list[float]:
        """Times at which the route passes through ``point``."""
        p = np.asarray(point, dtype=float)
        out = []
        for k in range(len(self.w) - 1):
            a, b = self.w[k], self.w[k + 1]
            ab = b - a
            L2 = float(ab @ ab)
            if L2 == 0:
                continue
            u = float(np.clip((p - a) @ ab / L2, 0.0, 1.0))
            if np.linalg.norm(a + u * ab - p) <= tol:
                t = (self.cum[k] + u * math.sqrt(L2)) / self.speed
                if not out or t - out[-1] > 1e-6:
                    out.append(t)
        return out


def _yaw_quat(yaw: np.ndarray) -> np.ndarray:
    h = 0.5 * np.asarray(yaw)
    z = np.zeros_like(h)
    return np.column_stack([z, z, np.sin(h), np.cos(h)])


def _to_ns(t_s) -> np.ndarray:
    return np.round(np.asarray(t_s, dtype=float) * 1e9).astype(np.int64)


# -- simulation ----------------------------------------------------------------


def acs_schedule(cfg: ScenarioConfig) -> tuple[np.ndarray, list[SimilarityTransform2D]]:
    """Change instants (ns) and the cumulative BCS->ACS transform from each on."""
    changes = [(_to_ns(u.t).item(), u.delta) for u in cfg.acs_updates]
    changes += [
        (_to_ns(f.t).item(), SimilarityTransform2D(translation=tuple(f.offset)))
        for f in cfg.faults
        if isinstance(f, Jump)
    ]
    changes.sort(key=lambda c: c[0])
    times = [np.iinfo(np.int64).min]
    transforms = [cfg.initial_acs_transform]
    for t, delta in changes:
        times.append(t)
        transforms.append(delta.compose(transforms[-1]))
    return np.array(times, dtype=np.int64), transforms


def _apply_schedule(times, transforms, t_ns, pts) -> np.ndarray:
    idx = np.searchsorted(times, t_ns, side="right") - 1
    out = np.empty_like(pts)
    for k in np.unique(idx):
        sel = idx == k
        out[sel] = transforms[k].apply(pts[sel])
    return out


def _scale_at(times, transforms, t_ns) -> np.ndarray:
    idx = np.searchsorted(times, t_ns, side="right") - 1
    return np.array([transforms[k].scale for k in range(len(transforms))])[idx]


def _rotation_at(times, transforms, t_ns) -> np.ndarray:
    idx = np.searchsorted(times, t_ns, side="right") - 1
    return np.array([transforms[k].rotation for k in range(len(transforms))])[idx]


def _drift(rng, n: int, sigma: float, tau: float | None, dt: float) -> np.ndarray:
    steps = rng.normal(0.0, sigma, size=(n, 2)) if sigma > 0 else np.zeros((n, 2))
    steps[0] = 0.0
    if tau is None:
        return np.cumsum(steps, axis=0)
    rho = math.exp(-dt / tau)
    out = np.empty_like(steps)
    acc = np.zeros(2)
    for k in range(n):
        acc = rho * acc + steps[k]
        out[k] = acc
    return out


def simulate_session(cfg: ScenarioConfig) -> tuple[Session, GroundTruth]:
    """Generate a session bundle and its ground truth; pure given ``cfg``."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    route = Route(cfg.waypoints, cfg.speed)
    duration = route.length / cfg.speed
    n = int(math.floor(duration * cfg.frame_rate + 1e-9)) + 1
    t_ns = _to_ns(np.arange(n) / cfg.frame_rate)
    t_s = t_ns / 1e9
    true_xy = route.position(t_s)
    times, transforms = acs_schedule(cfg)
    scale = _scale_at(times, transforms, t_ns)

    drift = _drift(rng, n, cfg.odometry_noise_sigma, cfg.odometry_drift_tau, 1.0 / cfg.frame_rate)
    cam_xy = _apply_schedule(times, transforms, t_ns, true_xy) + drift
    cam_xyz = np.column_stack([cam_xy, cfg.camera_height * scale])
    yaw = route.heading(t_s) + _rotation_at(times, transforms, t_ns)
    camera = PoseTable(t_ns, cam_xyz, _yaw_quat(yaw))

    # landmarks: logged from first detection on, every frame
    lm_frames, lm_ids, lm_xyz = [], [], []
    for lid in sorted(cfg.landmarks):
        pos = np.asarray(cfg.landmarks[lid], dtype=float)
        near = np.flatnonzero(np.linalg.norm(true_xy - pos, axis=1) <= cfg.landmark_detect_radius)
        frames = np.arange(near[0], n) if len(near) else np.zeros(0, dtype=int)
        lost = [f for f in cfg.faults if isinstance(f, TrackingLoss) and f.landmark_id == lid]
        for f in lost:
            window = np.flatnonzero((t_ns >= _to_ns(f.t0)) & (t_ns <= _to_ns(f.t1)))
            frames = np.union1d(frames, window)
        if len(frames) == 0:
            continue
        xy = _apply_schedule(times, transforms, t_ns[frames], np.tile(pos, (len(frames), 1)))
        noise = rng.normal(0.0, cfg.landmark_obs_noise_sigma, size=(len(frames), 3)) \
            if cfg.landmark_obs_noise_sigma > 0 else np.zeros((len(frames), 3))
        xyz = np.column_stack([xy, cfg.landmark_height * scale[frames]]) + noise
        for f in lost:
            hit = (t_ns[frames] >= _to_ns(f.t0)) & (t_ns[frames] <= _to_ns(f.t1))
            xyz[hit] = cam_xyz[frames[hit]]
        lm_frames.append(frames)
        lm_ids += [lid] * len(frames)
        lm_xyz.append(xyz)
    if lm_frames:
        frames = np.concatenate(lm_frames)
        xyz = np.concatenate(lm_xyz)
        order = np.argsort(frames, kind="stable")
        landmarks = LandmarkTable(t_ns[frames[order]], np.asarray(lm_ids, dtype=object)[order], xyz[order])
    else:
        landmarks = LandmarkTable()

    wifi, scan_labels = _simulate_wifi(cfg, route, duration, rng)
    sensors = _simulate_imu(cfg, route, duration, rng)

    ev_t = sorted(
        _to_ns(t).item()
        for cp in cfg.control_points
        for t in route.passing_times(cp)
        if t <= duration
    )
    events = EventTable(ev_t, ["CONTROL_POINT"] * len(ev_t))

    session = Session(
        camera=camera,
        landmarks=landmarks,
        sensors=sensors,
        wifi=wifi,
        events=events,
        floor_id=cfg.floor_id,
        device_id=cfg.device_id,
    )
    return session, GroundTruth(t_ns, true_xy, scan_labels)


def _bssid(k: int) -> str:
    return f"02:00:00:00:{k // 256:02x}:{k % 256:02x}"


def _simulate_wifi(cfg: ScenarioConfig, route: Route, duration: float, rng):
    w = cfg.wifi
    aps = np.asarray(w.ap_positions, dtype=float).reshape(-1, 2)
    if len(aps) == 0 or w.scan_period <= 0:
        return WifiTable(), {}
    span = (len(aps) - 1) * w.entry_spacing
    scan_id, ts, bssid, rss, freq = [], [], [], [], []
    labels = {}
    j = 0
    start = w.scan_period
    while start + span <= duration:
        et = start + np.arange(len(aps)) * w.entry_spacing
        et_ns = _to_ns(et)
        pos = route.position(et_ns / 1e9)
        d = np.maximum(np.linalg.norm(pos - aps, axis=1), 1.0)
        level = w.tx_power_dbm - 10.0 * w.pathloss_exponent * np.log10(d)
        if w.shadowing_sigma > 0:
            level = level + rng.normal(0.0, w.shadowing_sigma, size=len(aps))
        level = np.minimum(np.round(level), 0).astype(np.int64)
        seen = level >= w.min_rss_dbm
        if np.any(seen):
            for k in np.flatnonzero(seen):
                scan_id.append(j)
                ts.append(int(et_ns[k]))
                bssid.append(_bssid(k))
                rss.append(int(level[k]))
                freq.append(2412 + 5 * (k % 13) if k % 2 == 0 else 5180 + 20 * (k % 8))
            labels[j] = pos[seen].mean(axis=0)
        j += 1
        start += w.scan_period
    return WifiTable(scan_id, ts, bssid, rss, freq), labels


def _simulate_imu(cfg: ScenarioConfig, route: Route, duration: float, rng) -> SensorTable:
    if cfg.imu_rate <= 0:
        return SensorTable()
    t = np.arange(0.0, duration, 1.0 / cfg.imu_rate)
    t_ns = _to_ns(t)
    q = _yaw_quat(route.heading(t))
    acc = rng.normal(0.0, 0.05, size=(len(t), 3))
    gyr = rng.normal(0.0, 0.01, size=(len(t), 3))
    nan = np.full((len(t), 1), np.nan)
    ts = np.concatenate([t_ns, t_ns, t_ns])
    types = ["ACC"] * len(t) + ["GYR"] * len(t) + ["ROT"] * len(t)
    vals = np.concatenate([np.hstack([acc, nan]), np.hstack([gyr, nan]), q])
    order = np.argsort(ts, kind="stable")
    return SensorTable(ts[order], np.asarray(types, dtype=object)[order], vals[order])


# -- presets ---------------------------------------------------------------------

FLOOR_W, FLOOR_H = 60.0, 30.0
LOOP_LENGTH = 2 * (FLOOR_W + FLOOR_H)


def _loop_corners():
    return [(0.0, 0.0), (FLOOR_W, 0.0), (FLOOR_W, FLOOR_H), (0.0, FLOOR_H)]


def loop_route(length: float) -> list[tuple[float, float]]:
    """Counter-clockwise laps around the floor corridor, cut at ``length`` metres."""
    corners = _loop_corners()
    pts = [corners[0]]
    walked, k = 0.0, 0
    while walked < length - 1e-12:
        a = np.asarray(corners[k % 4])
        b = np.asarray(corners[(k + 1) % 4])
        seg = float(np.linalg.norm(b - a))
        if walked + seg >= length:
            p = a + (b - a) * ((length - walked) / seg)
            pts.append((float(p[0]), float(p[1])))
            break
        pts.append((float(b[0]), float(b[1])))
        walked += seg
        k += 1
    return pts


def default_landmarks() -> dict[str, tuple[float, float]]:
    """Eight markers on the corridor walls: corners and side midpoints."""
    w, h, c, m = FLOOR_W, FLOOR_H, 0.3, 0.4
    return {
        "L1": (-c, -c),
        "L2": (w / 2, -m),
        "L3": (w + c, -c),
        "L4": (w + m, h / 2),
        "L5": (w + c, h + c),
        "L6": (w / 2, h + m),
        "L7": (-c, h + c),
        "L8": (-m, h / 2),
    }


def default_control_points() -> list[tuple[float, float]]:
    """Midpoints of the corridor pieces between consecutive landmarks."""
    w, h = FLOOR_W, FLOOR_H
    return [
        (w / 4, 0.0),
        (3 * w / 4, 0.0),
        (w, h / 4),
        (w, 3 * h / 4),
        (3 * w / 4, h),
        (w / 4, h),
        (0.0, 3 * h / 4),
        (0.0, h / 4),
    ]


def default_access_points(n: int = 8, inset: float = 1.5) -> list[tuple[float, float]]:
    """``n`` access points spread evenly along the corridor loop, ``inset`` m toward the core."""
    route = Route(loop_route(LOOP_LENGTH), 1.0)
    centre = np.array([FLOOR_W / 2, FLOOR_H / 2])
    out = []
    for k in range(n):
        p = route.position([(k + 0.5) * LOOP_LENGTH / n])[0]
        v = centre - p
        q = p + inset * v / np.linalg.norm(v)
        out.append((float(q[0]), float(q[1])))
    return out


def _random_acs(rng) -> SimilarityTransform2D:
    return SimilarityTransform2D(
        1.0, float(rng.uniform(-math.pi, math.pi)), tuple(rng.uniform(-20.0, 20.0, size=2).tolist())
    )


def _random_direction(rng, magnitude: float) -> tuple[float, float]:
    a = float(rng.uniform(-math.pi, math.pi))
    return (magnitude * math.cos(a), magnitude * math.sin(a))


def base_scenario(duration: float = 180.0, speed: float = 1.0, seed: int = 0) -> ScenarioConfig:
    """Laps of the default floor for ``duration`` seconds, no faults."""
    rng = np.random.default_rng([seed, 7])
    return ScenarioConfig(
        waypoints=loop_route(duration * speed),
        landmarks=default_landmarks(),
        speed=speed,
        initial_acs_transform=_random_acs(rng),
        wifi=WifiConfig(ap_positions=default_access_points()),
        control_points=default_control_points(),
        seed=seed,
    )


# update/fault times sit inside the corridor piece between L5 and L6
# (route metres 90..120 on the first lap), clear of both landmarks
UPDATE_T = 100.0


def acs_update_scenario(magnitude: float, seed: int = 0) -> ScenarioConfig:
    cfg = base_scenario(seed=seed)
    rng = np.random.default_rng([seed, 11])
    delta = SimilarityTransform2D(translation=_random_direction(rng, magnitude))
    cfg.acs_updates = [AcsUpdate(UPDATE_T, delta)]
    return cfg


def tracking_loss_scenario(seed: int = 0, length: float = 2.0) -> ScenarioConfig:
    """Every landmark collapses onto the camera for ``length`` seconds."""
    cfg = base_scenario(seed=seed)
    rng = np.random.default_rng([seed, 13])
    t0 = float(rng.uniform(94.0, 114.0))
    cfg.faults = [TrackingLoss(t0, t0 + length, lid) for lid in sorted(cfg.landmarks)]
    return cfg


def jump_scenario(seed: int = 0, magnitude: float = 3.0, speed: float = 1.0) -> ScenarioConfig:
    cfg = base_scenario(duration=LOOP_LENGTH / speed, speed=speed, seed=seed)
    rng = np.random.default_rng([seed, 17])
    t = float(rng.uniform(95.0, 115.0)) / speed
    cfg.faults = [Jump(t, _random_direction(rng, magnitude))]
    return cfg


PRESET_NAMES = (
    "clean_short",
    "long_walk",
    "acs_update_0.5m",
    "acs_update_1m",
    "acs_update_2m",
    "acs_update_4m",
    "tracking_loss",
    "jump",
    "running",
)


def preset_scenarios(seed: int = 0) -> dict[str, ScenarioConfig]:
    presets = {
        "clean_short": base_scenario(180.0, seed=seed),
        "long_walk": base_scenario(900.0, seed=seed),
    }
    for m in (0.5, 1, 2, 4):
        presets[f"acs_update_{m}m"] = acs_update_scenario(float(m), seed=seed)
    presets["tracking_loss"] = tracking_loss_scenario(seed=seed)
    presets["jump"] = jump_scenario(seed=seed)
    presets["running"] = jump_scenario(seed=seed, speed=3.0)
    return presets


def preset(name: str, seed: int = 0) -> ScenarioConfig:
    presets = preset_scenarios(seed)
    if name not in presets:
        raise ScenarioError(f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}")
    return presets[name]
