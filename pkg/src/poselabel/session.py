"""Session log model and the CSV bundle it is read from / written to.

A session bundle is a directory holding::

    CameraPose.csv    t_ns,x,y,z,qx,qy,qz,qw
    LandmarkPose.csv  t_ns,landmark_id,x,y,z
    Sensors.csv       t_ns,sensor_type,v0,v1,v2,v3
    WiFi.csv          scan_id,t_ns,bssid,rss_dbm,freq_mhz
    Events.csv        t_ns,event_type

Only the first two are required. Streams are stored column-wise as numpy
arrays; timestamps are integer nanoseconds relative to the first camera pose.
"""

from __future__ import annotations

import csv
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable

import numpy as np

log = logging.getLogger(__name__)

CAMERA_FILE = "CameraPose.csv"
LANDMARK_FILE = "LandmarkPose.csv"
SENSOR_FILE = "Sensors.csv"
WIFI_FILE = "WiFi.csv"
EVENT_FILE = "Events.csv"

CAMERA_HEADER = ["t_ns", "x", "y", "z", "qx", "qy", "qz", "qw"]
LANDMARK_HEADER = ["t_ns", "landmark_id", "x", "y", "z"]
SENSOR_HEADER = ["t_ns", "sensor_type", "v0", "v1", "v2", "v3"]
WIFI_HEADER = ["scan_id", "t_ns", "bssid", "rss_dbm", "freq_mhz"]
EVENT_HEADER = ["t_ns", "event_type"]
LANDMARKS_HEADER = ["landmark_id", "x_bcs", "y_bcs", "floor_id"]
CONTROL_POINTS_HEADER = ["x_bcs", "y_bcs", "floor_id"]

# sensor code -> number of values
SENSOR_TYPES = {"ACC": 3, "GYR": 3, "MAG": 3, "ROT": 4}
SENSOR_NAMES = {
    "ACC": "accelerometer",
    "GYR": "gyroscope",
    "MAG": "magnetic_field",
    "ROT": "rotation_vector",
}
EVENT_TYPES = {"CONTROL_POINT"}
RSS_RANGE = (-120, 0)
QUAT_NORM_TOL = 1e-6


class SessionFormatError(ValueError):
    """A session bundle cannot be turned into a valid Session."""

    code = "E_SESSION_FORMAT"


def format_float(x: float) -> str:
    """Shortest round-tripping decimal (never exponent) representation."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    s = repr(x)
    if "e" in s or "E" in s:
        if math.isinf(x):
            return s
        s = np.format_float_positional(x, unique=True, trim="-")
    elif s.endswith(".0"):
        s = s[:-2]
    return s


def _empty(dtype, *shape) -> np.ndarray:
    return np.zeros((0, *shape), dtype=dtype)


def _arrays_equal(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    if a.dtype.kind == "f" or b.dtype.kind == "f":
        return bool(np.array_equal(a, b, equal_nan=True))
    return bool(np.array_equal(a, b))


class _Table:
    """Column-oriented record table; equality is exact (nan == nan)."""

    def __len__(self) -> int:
        return len(getattr(self, fields(self)[0].name))

    def __eq__(self, other) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        return all(
            _arrays_equal(getattr(self, f.name), getattr(other, f.name)) for f in fields(self)
        )

    def take(self, idx):
        return type(self)(**{f.name: getattr(self, f.name)[idx] for f in fields(self)})

    def shifted(self, dt: int):
        return replace(self, t=self.t - np.int64(dt))


@dataclass(frozen=True, eq=False)
class PoseTable(_Table):
    """Camera poses in the tracker frame. ``quat`` rows are nan when absent."""

    t: np.ndarray = field(default_factory=lambda: _empty(np.int64))
    xyz: np.ndarray = field(default_factory=lambda: _empty(float, 3))
    quat: np.ndarray = field(default_factory=lambda: _empty(float, 4))

    def __post_init__(self):
        object.__setattr__(self, "t", np.asarray(self.t, dtype=np.int64).reshape(-1))
        object.__setattr__(self, "xyz", np.asarray(self.xyz, dtype=float).reshape(-1, 3))
        q = np.asarray(self.quat, dtype=float)
        if q.size == 0 and len(self.t):
            q = np.full((len(self.t), 4), np.nan)
        object.__setattr__(self, "quat", q.reshape(-1, 4))

    @property
    def xy(self) -> np.ndarray:
        return self.xyz[:, :2]


@dataclass(frozen=True, eq=False)
class LandmarkTable(_Table):
    """Landmark observations; an unknown observation has nan coordinates."""

    t: np.ndarray = field(default_factory=lambda: _empty(np.int64))
    landmark_id: np.ndarray = field(default_factory=lambda: _empty(object))
    xyz: np.ndarray = field(default_factory=lambda: _empty(float, 3))

    def __post_init__(self):
        object.__setattr__(self, "t", np.asarray(self.t, dtype=np.int64).reshape(-1))
        object.__setattr__(
            self, "landmark_id", np.asarray([str(s) for s in self.landmark_id], dtype=object)
        )
        object.__setattr__(self, "xyz", np.asarray(self.xyz, dtype=float).reshape(-1, 3))

    @property
    def unknown(self) -> np.ndarray:
        return np.isnan(self.xyz).any(axis=1)

    @property
    def xy(self) -> np.ndarray:
        return self.xyz[:, :2]

    def ids(self) -> list[str]:
        return sorted(set(self.landmark_id.tolist()))

    def with_unknown(self, mask) -> LandmarkTable:
        """Copy with the masked observations set to unknown."""
        xyz = self.xyz.copy()
        xyz[np.asarray(mask, dtype=bool)] = np.nan
        return LandmarkTable(self.t.copy(), self.landmark_id.copy(), xyz)


@dataclass(frozen=True, eq=False)
class SensorTable(_Table):
    """IMU records; ``values[:, 3]`` is nan for three-value sensors."""

    t: np.ndarray = field(default_factory=lambda: _empty(np.int64))
    sensor_type: np.ndarray = field(default_factory=lambda: _empty(object))
    values: np.ndarray = field(default_factory=lambda: _empty(float, 4))

    def __post_init__(self):
        object.__setattr__(self, "t", np.asarray(self.t, dtype=np.int64).reshape(-1))
        object.__setattr__(
            self, "sensor_type", np.asarray([str(s) for s in self.sensor_type], dtype=object)
        )
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).reshape(-1, 4))


@dataclass(frozen=True, eq=False)
class WifiTable(_Table):
    """WLAN scan entries; rows sharing ``scan_id`` belong to one scan."""

    scan_id: np.ndarray = field(default_factory=lambda: _empty(np.int64))
    t: np.ndarray = field(default_factory=lambda: _empty(np.int64))
    bssid: np.ndarray = field(default_factory=lambda: _empty(object))
    rss: np.ndarray = field(default_factory=lambda: _empty(np.int64))
    freq: np.ndarray = field(default_factory=lambda: _empty(np.int64))

    def __post_init__(self):
        for name in ("scan_id", "t", "rss", "freq"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.int64).reshape(-1))
        object.__setattr__(self, "bssid", np.asarray([str(s) for s in self.bssid], dtype=object))


@dataclass(frozen=True, eq=False)
class EventTable(_Table):
    t: np.ndarray = field(default_factory=lambda: _empty(np.int64))
    event_type: np.ndarray = field(default_factory=lambda: _empty(object))

    def __post_init__(self):
        object.__setattr__(self, "t", np.asarray(self.t, dtype=np.int64).reshape(-1))
        object.__setattr__(
            self, "event_type", np.asarray([str(s) for s in self.event_type], dtype=object)
        )

    def control_points(self) -> np.ndarray:
        return self.t[self.event_type == "CONTROL_POINT"]


@dataclass(frozen=True, eq=False)
class Session:
    """One single-floor recording: camera track, landmark track and side streams."""

    camera: PoseTable
    landmarks: LandmarkTable = field(default_factory=LandmarkTable)
    sensors: SensorTable = field(default_factory=SensorTable)
    wifi: WifiTable = field(default_factory=WifiTable)
    events: EventTable = field(default_factory=EventTable)
    floor_id: str = "0"
    device_id: str = "unknown"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Session):
            return NotImplemented
        return all(getattr(self, f.name) == getattr(other, f.name) for f in fields(self))

    @property
    def time_range(self) -> tuple[int, int]:
        return int(self.camera.t[0]), int(self.camera.t[-1])

    def frame_index(self, t) -> np.ndarray:
        """Camera frame index for timestamps that are camera timestamps."""
        idx = np.searchsorted(self.camera.t, t)
        return np.minimum(idx, len(self.camera.t) - 1)

    def with_landmarks(self, landmarks: LandmarkTable) -> Session:
        return replace(self, landmarks=landmarks)


@dataclass
class LandmarkRegistry:
    """Surveyed building-frame positions of the landmarks on one floor."""

    positions: dict[str, np.ndarray]
    floor_id: str = "0"

    def __post_init__(self):
        self.positions = {str(k): np.asarray(v, dtype=float)[:2] for k, v in self.positions.items()}

    def __contains__(self, landmark_id) -> bool:
        return landmark_id in self.positions

    def __getitem__(self, landmark_id) -> np.ndarray:
        return self.positions[landmark_id]

    def __len__(self) -> int:
        return len(self.positions)

    def ids(self) -> list[str]:
        return list(self.positions)


@dataclass
class ControlPointSet:
    points: np.ndarray
    floor_id: str = "0"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class RowIssue:
    file: str
    line: int
    message: str

    def __str__(self) -> str:
        return f"{self.file}:{self.line}: {self.message}"


@dataclass
class ParseReport:
    issues: list[RowIssue] = field(default_factory=list)
    rows: dict[str, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.issues)


# -- parsing ---------------------------------------------------------------


def _read_rows(path: Path, header: list[str]):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise SessionFormatError(f"{path.name}: empty file (missing header)")
        if [c.strip() for c in first] != header:
            raise SessionFormatError(
                f"{path.name}: unexpected header {first!r}, expected {','.join(header)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            yield lineno, row


def _parse_file(path, header, convert, report: ParseReport, max_bad_fraction: float):
    good, bad = [], 0
    for lineno, row in _read_rows(path, header):
        try:
            if len(row) != len(header):
                raise ValueError(f"expected {len(header)} columns, got {len(row)}")
            good.append(convert(row))
        except ValueError as exc:
            bad += 1
            report.issues.append(RowIssue(path.name, lineno, str(exc)))
    total = len(good) + bad
    report.rows[path.name] = total
    if total and bad / total > max_bad_fraction:
        raise SessionFormatError(
            f"{path.name}: {bad} of {total} rows malformed (limit {max_bad_fraction:.0%})"
        )
    return good


def _finite(x: str) -> float:
    v = float(x)
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {x!r}")
    return v


def _camera_row(row):
    t = int(row[0])
    xyz = [_finite(v) for v in row[1:4]]
    q = [float(v) if v.strip() else math.nan for v in row[4:8]]
    if not all(math.isnan(v) for v in q):
        if any(math.isnan(v) for v in q):
            raise ValueError("partial quaternion")
        n = math.sqrt(sum(v * v for v in q))
        if abs(n - 1.0) > QUAT_NORM_TOL:
            raise ValueError(f"quaternion norm {n:.9f} is not 1")
    return t, xyz, q


def _landmark_row(row):
    t = int(row[0])
    lid = row[1].strip()
    if not lid:
        raise ValueError("empty landmark_id")
    xyz = [float(v) for v in row[2:5]]
    nan = [math.isnan(v) for v in xyz]
    if any(nan) and not all(nan):
        raise ValueError("partially unknown landmark position")
    if any(math.isinf(v) for v in xyz):
        raise ValueError("infinite landmark coordinate")
    return t, lid, xyz


def _sensor_row(row):
    t = int(row[0])
    code = row[1].strip()
    if code not in SENSOR_TYPES:
        raise ValueError(f"unknown sensor_type {code!r}")
    n = SENSOR_TYPES[code]
    raw = row[2:6]
    if any(not v.strip() for v in raw[:n]) or any(v.strip() for v in raw[n:]):
        raise ValueError(f"{code} takes exactly {n} values")
    vals = [_finite(v) for v in raw[:n]] + [math.nan] * (4 - n)
    return t, code, vals


def _wifi_row(row):
    scan_id, t = int(row[0]), int(row[1])
    bssid = row[2].strip()
    if not bssid:
        raise ValueError("empty bssid")
    rss, freq = int(row[3]), int(row[4])
    if not RSS_RANGE[0] <= rss <= RSS_RANGE[1]:
        raise ValueError(f"rss {rss} dBm outside {RSS_RANGE}")
    return scan_id, t, bssid, rss, freq


def _event_row(row):
    t = int(row[0])
    kind = row[1].strip()
    if kind not in EVENT_TYPES:
        raise ValueError(f"unknown event_type {kind!r}")
    return t, kind


def _stable_sort(table, key=None):
    order = np.argsort(table.t if key is None else key, kind="stable")
    return table.take(order)


def parse_session(
    directory,
    floor_id: str = "0",
    device_id: str = "unknown",
    max_bad_fraction: float = 0.1,
    report: ParseReport | None = None,
) -> Session:
    """Read a session bundle directory.

    Timestamps are shifted so that the first camera pose is at ``t=0``.
    Malformed rows are dropped and listed in ``report``; a file with more
    than ``max_bad_fraction`` bad rows raises :class:`SessionFormatError`, as
    do missing required files and non-increasing camera timestamps.
    """
    d = Path(directory)
    report = report if report is not None else ParseReport()
    for name in (CAMERA_FILE, LANDMARK_FILE):
        if not (d / name).is_file():
            raise SessionFormatError(f"missing required file {name} in {d}")

    cam_rows = _parse_file(d / CAMERA_FILE, CAMERA_HEADER, _camera_row, report, max_bad_fraction)
    if not cam_rows:
        raise SessionFormatError(f"{CAMERA_FILE}: no camera poses")
    cam_t = np.array([r[0] for r in cam_rows], dtype=np.int64)
    if np.any(np.diff(cam_t) <= 0):
        k = int(np.argmax(np.diff(cam_t) <= 0))
        raise SessionFormatError(
            f"{CAMERA_FILE}: non-monotonic timestamps ({cam_t[k]} followed by {cam_t[k + 1]})"
        )
    camera = PoseTable(cam_t, [r[1] for r in cam_rows], [r[2] for r in cam_rows])

    lm_rows = _parse_file(d / LANDMARK_FILE, LANDMARK_HEADER, _landmark_row, report, max_bad_fraction)
    cam_set = set(cam_t.tolist())
    kept = []
    for r in lm_rows:
        if r[0] in cam_set:
            kept.append(r)
        else:
            report.issues.append(
                RowIssue(LANDMARK_FILE, 0, f"timestamp {r[0]} matches no camera pose")
            )
    if lm_rows and (len(lm_rows) - len(kept)) / len(lm_rows) > max_bad_fraction:
        raise SessionFormatError(f"{LANDMARK_FILE}: too many rows without a matching camera pose")
    landmarks = LandmarkTable(
        np.array([r[0] for r in kept], dtype=np.int64),
        [r[1] for r in kept],
        np.array([r[2] for r in kept], dtype=float).reshape(-1, 3),
    )

    sensors = SensorTable()
    if (d / SENSOR_FILE).is_file():
        rows = _parse_file(d / SENSOR_FILE, SENSOR_HEADER, _sensor_row, report, max_bad_fraction)
        sensors = SensorTable(
            np.array([r[0] for r in rows], dtype=np.int64),
            [r[1] for r in rows],
            np.array([r[2] for r in rows], dtype=float).reshape(-1, 4),
        )
    wifi = WifiTable()
    if (d / WIFI_FILE).is_file():
        rows = _parse_file(d / WIFI_FILE, WIFI_HEADER, _wifi_row, report, max_bad_fraction)
        scan_id, t, bssid, rss, freq = (list(col) for col in zip(*rows)) if rows else ([],) * 5
        wifi = WifiTable(scan_id, t, bssid, rss, freq)
    events = EventTable()
    if (d / EVENT_FILE).is_file():
        rows = _parse_file(d / EVENT_FILE, EVENT_HEADER, _event_row, report, max_bad_fraction)
        events = EventTable(np.array([r[0] for r in rows], dtype=np.int64), [r[1] for r in rows])

    t0 = int(cam_t[0])
    if report.issues:
        log.warning("%s: %d malformed rows dropped", d, len(report.issues))
    return Session(
        camera=camera.shifted(t0),
        landmarks=_stable_sort(landmarks.shifted(t0)),
        sensors=_stable_sort(sensors.shifted(t0)),
        wifi=_stable_sort(wifi.shifted(t0)),
        events=_stable_sort(events.shifted(t0)),
        floor_id=str(floor_id),
        device_id=str(device_id),
    )


# -- writing ---------------------------------------------------------------


def atomic_write_rows(path, header: list[str], rows: Iterable[Iterable[str]]) -> Path:
    """Write a CSV via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _opt_float(x: float) -> str:
    return "" if math.isnan(x) else format_float(x)


def write_session(session: Session, directory) -> list[Path]:
    """Write the five CSV files of a session bundle; returns their paths."""
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise SessionFormatError(f"cannot create {d}: {exc}") from exc
    f = format_float
    cam, lm, sen, wifi, ev = (
        session.camera,
        session.landmarks,
        session.sensors,
        session.wifi,
        session.events,
    )
    out = [
        atomic_write_rows(
            d / CAMERA_FILE,
            CAMERA_HEADER,
            (
                [str(t), f(p[0]), f(p[1]), f(p[2])] + [_opt_float(v) for v in q]
                for t, p, q in zip(cam.t.tolist(), cam.xyz.tolist(), cam.quat.tolist())
            ),
        ),
        atomic_write_rows(
            d / LANDMARK_FILE,
            LANDMARK_HEADER,
            (
                [str(t), lid, f(p[0]), f(p[1]), f(p[2])]
                for t, lid, p in zip(lm.t.tolist(), lm.landmark_id, lm.xyz.tolist())
            ),
        ),
        atomic_write_rows(
            d / SENSOR_FILE,
            SENSOR_HEADER,
            (
                [str(t), code] + [_opt_float(v) for v in vals]
                for t, code, vals in zip(sen.t.tolist(), sen.sensor_type, sen.values.tolist())
            ),
        ),
        atomic_write_rows(
            d / WIFI_FILE,
            WIFI_HEADER,
            (
                [str(s), str(t), b, str(r), str(fr)]
                for s, t, b, r, fr in zip(
                    wifi.scan_id.tolist(), wifi.t.tolist(), wifi.bssid, wifi.rss.tolist(), wifi.freq.tolist()
                )
            ),
        ),
        atomic_write_rows(
            d / EVENT_FILE,
            EVENT_HEADER,
            ([str(t), k] for t, k in zip(ev.t.tolist(), ev.event_type)),
        ),
    ]
    return out


# -- site metadata ---------------------------------------------------------


def read_landmarks(path, floor_id: str | None = None) -> LandmarkRegistry:
    """Load ``landmarks.csv``; ``floor_id`` is required if the file spans floors."""
    rows = []
    for lineno, row in _read_rows(Path(path), LANDMARKS_HEADER):
        try:
            rows.append((row[0].strip(), _finite(row[1]), _finite(row[2]), row[3].strip()))
        except (ValueError, IndexError) as exc:
            raise SessionFormatError(f"{Path(path).name}:{lineno}: {exc}") from exc
    floors = sorted({r[3] for r in rows})
    if floor_id is None:
        if len(floors) != 1:
            raise SessionFormatError(f"landmark file covers floors {floors}; choose one")
        floor_id = floors[0]
    positions = {r[0]: (r[1], r[2]) for r in rows if r[3] == str(floor_id)}
    reg = LandmarkRegistry(positions, str(floor_id))
    problems = validate_registry(reg)
    if problems:
        raise SessionFormatError("; ".join(problems))
    return reg


def validate_registry(reg: LandmarkRegistry) -> list[str]:
    problems = []
    if len(reg) < 2:
        problems.append(f"floor {reg.floor_id}: need at least 2 landmarks, found {len(reg)}")
    pts = np.array(list(reg.positions.values())).reshape(-1, 2)
    if len(pts) > 1:
        d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
        d[np.diag_indices(len(pts))] = np.inf
        if np.min(d) <= 0:
            problems.append(f"floor {reg.floor_id}: duplicate landmark positions")
    return problems


def write_landmarks(registry: LandmarkRegistry, path) -> Path:
    return atomic_write_rows(
        path,
        LANDMARKS_HEADER,
        (
            [lid, format_float(p[0]), format_float(p[1]), registry.floor_id]
            for lid, p in registry.positions.items()
        ),
    )


def read_control_points(path, floor_id: str | None = None) -> ControlPointSet:
    rows = []
    for lineno, row in _read_rows(Path(path), CONTROL_POINTS_HEADER):
        try:
            rows.append((_finite(row[0]), _finite(row[1]), row[2].strip()))
        except (ValueError, IndexError) as exc:
            raise SessionFormatError(f"{Path(path).name}:{lineno}: {exc}") from exc
    floors = sorted({r[2] for r in rows})
    if floor_id is None:
        if len(floors) > 1:
            raise SessionFormatError(f"control point file covers floors {floors}; choose one")
        floor_id = floors[0] if floors else "0"
    pts = [(r[0], r[1]) for r in rows if r[2] == str(floor_id)]
    return ControlPointSet(np.array(pts, dtype=float).reshape(-1, 2), str(floor_id))


def write_control_points(cps: ControlPointSet, path) -> Path:
    return atomic_write_rows(
        path,
        CONTROL_POINTS_HEADER,
        ([format_float(x), format_float(y), cps.floor_id] for x, y in cps.points.tolist()),
    )


# -- validation ------------------------------------------------------------


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    coverage: dict[str, tuple[int, int] | None] = field(default_factory=dict)
    landmark_counts: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        out = [f"violation: {v}" for v in self.violations]
        out += [f"warning: {w}" for w in self.warnings]
        for name, rng in self.coverage.items():
            out.append(f"coverage {name}: " + ("empty" if rng is None else f"{rng[0]}..{rng[1]} ns"))
        for lid, n in self.landmark_counts.items():
            out.append(f"landmark {lid}: {n} observations")
        return out


def validate_session(session: Session) -> ValidationReport:
    """Diagnose invariant violations and coverage; never raises."""
    rep = ValidationReport()
    cam = session.camera
    if len(cam) == 0:
        rep.violations.append("no camera poses")
        return rep
    if np.any(np.diff(cam.t) <= 0):
        rep.violations.append("camera timestamps not strictly increasing")
    if cam.t[0] != 0:
        rep.violations.append(f"first camera timestamp is {cam.t[0]}, expected 0")
    if not np.all(np.isfinite(cam.xyz)):
        rep.violations.append("non-finite camera positions")
    has_q = ~np.isnan(cam.quat).all(axis=1)
    if has_q.any():
        norms = np.linalg.norm(cam.quat[has_q], axis=1)
        bad = int(np.sum(np.abs(norms - 1.0) > QUAT_NORM_TOL))
        if bad:
            rep.violations.append(f"{bad} quaternions with norm off by more than {QUAT_NORM_TOL}")

    lm = session.landmarks
    orphan = int(np.sum(~np.isin(lm.t, cam.t)))
    if orphan:
        rep.violations.append(f"{orphan} landmark observations without a camera pose")
    if np.any(lm.landmark_id == ""):
        rep.violations.append("empty landmark id")

    n_types = np.array([SENSOR_TYPES.get(s, -1) for s in session.sensors.sensor_type])
    if np.any(n_types < 0):
        rep.violations.append("unknown sensor types")
    elif len(n_types):
        present = (~np.isnan(session.sensors.values)).sum(axis=1)
        if np.any(present != n_types):
            rep.violations.append("sensor value count does not match sensor type")

    rss = session.wifi.rss
    if np.any((rss < RSS_RANGE[0]) | (rss > RSS_RANGE[1])):
        rep.violations.append("rss outside [-120, 0] dBm")

    for name, t in (
        ("camera", cam.t),
        ("landmarks", lm.t),
        ("sensors", session.sensors.t),
        ("wifi", session.wifi.t),
        ("events", session.events.t),
    ):
        rep.coverage[name] = (int(t.min()), int(t.max())) if len(t) else None

    t0, t1 = session.time_range
    for name, t in (("wifi", session.wifi.t), ("sensors", session.sensors.t), ("events", session.events.t)):
        outside = int(np.sum((t < t0) | (t > t1)))
        if outside:
            rep.warnings.append(
                f"{outside} {name} entries outside the camera time range cannot be annotated"
            )

    known = ~lm.unknown
    for lid in lm.ids():
        n = int(np.sum((lm.landmark_id == lid) & known))
        rep.landmark_counts[lid] = n
        if n == 1:
            rep.warnings.append(f"landmark {lid} observed 1 time")
        elif n == 0:
            rep.warnings.append(f"landmark {lid} has no valid observation")
    return rep
