"""Time-based position labels for sensor records and WiFi scans."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from poselabel.session import (
    SENSOR_HEADER,
    SensorTable,
    SessionFormatError,
    WifiTable,
    atomic_write_rows,
    format_float,
)
from poselabel.trajectory import DEFAULT_CLAMP_NS, MappedTrajectory

FINGERPRINT_HEADER = [
    "scan_id",
    "device_id",
    "floor_id",
    "label_x",
    "label_y",
    "bssid",
    "rss_dbm",
    "entry_x",
    "entry_y",
    "t_ns",
]
LABELED_SENSOR_HEADER = SENSOR_HEADER + ["x", "y", "floor_id", "segment_status"]


def pose_at(traj: MappedTrajectory, t: int, clamp_ns: int = DEFAULT_CLAMP_NS) -> np.ndarray | None:
    """Building-frame position at ``t`` ns, or None if it cannot be resolved."""
    return traj.pose_at(t, clamp_ns)


@dataclass
class LabeledSensors:
    sensors: SensorTable
    xy: np.ndarray
    segment_status: np.ndarray
    floor_id: str
    dropped: int = 0

    def __len__(self) -> int:
        return len(self.sensors)


@dataclass
class Fingerprint:
    scan_id: int
    bssid: list[str]
    rss: np.ndarray
    t: np.ndarray
    positions: np.ndarray
    floor_id: str = "0"
    device_id: str = "unknown"
    label: np.ndarray = field(default=None)

    def __post_init__(self):
        self.rss = np.asarray(self.rss, dtype=np.int64)
        self.t = np.asarray(self.t, dtype=np.int64)
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        if self.label is None:
            self.label = self.positions.mean(axis=0)
        self.label = np.asarray(self.label, dtype=float)

    def rss_map(self) -> dict[str, int]:
        return dict(zip(self.bssid, self.rss.tolist()))


def annotate_sensors(
    traj: MappedTrajectory, sensors: SensorTable, clamp_ns: int = DEFAULT_CLAMP_NS
) -> LabeledSensors:
    order = np.argsort(sensors.t, kind="stable")
    sensors = sensors.take(order)
    xy, ok, seg = traj.positions_at(sensors.t, clamp_ns)
    status = np.array([traj.segments[k].status.value for k in seg[ok]], dtype=object)
    return LabeledSensors(sensors.take(ok), xy[ok], status, traj.floor_id, int(np.sum(~ok)))


@dataclass
class FingerprintResult:
    fingerprints: list[Fingerprint]
    dropped_entries: int = 0
    dropped_scans: int = 0


def build_fingerprints(
    traj: MappedTrajectory,
    wifi: WifiTable,
    device_id: str = "unknown",
    clamp_ns: int = DEFAULT_CLAMP_NS,
    max_lost_fraction: float = 0.5,
) -> FingerprintResult:
    """One labelled fingerprint per scan.

    Each entry is positioned at its own timestamp; the scan label is the mean
    of the entry positions. Scans losing more than ``max_lost_fraction`` of
    their entries are dropped.
    """
    res = FingerprintResult([])
    if len(wifi) == 0:
        return res
    xy, ok, _ = traj.positions_at(wifi.t, clamp_ns)
    for sid in np.unique(wifi.scan_id):
        rows = np.flatnonzero(wifi.scan_id == sid)
        good = rows[ok[rows]]
        lost = len(rows) - len(good)
        res.dropped_entries += lost
        if len(good) == 0 or lost / len(rows) > max_lost_fraction:
            res.dropped_scans += 1
            res.dropped_entries += len(good)
            continue
        res.fingerprints.append(
            Fingerprint(
                scan_id=int(sid),
                bssid=[str(b) for b in wifi.bssid[good]],
                rss=wifi.rss[good],
                t=wifi.t[good],
                positions=xy[good],
                floor_id=traj.floor_id,
                device_id=device_id,
            )
        )
    return res


def write_fingerprints(fingerprints: list[Fingerprint], path) -> Path:
    f = format_float

    def rows():
        for fp in fingerprints:
            lx, ly = fp.label.tolist()
            for b, r, t, (x, y) in zip(fp.bssid, fp.rss.tolist(), fp.t.tolist(), fp.positions.tolist()):
                yield [str(fp.scan_id), fp.device_id, fp.floor_id, f(lx), f(ly), b, str(r), f(x), f(y), str(t)]

    return atomic_write_rows(path, FINGERPRINT_HEADER, rows())


def read_fingerprints(path) -> list[Fingerprint]:
    path = Path(path)
    groups: dict[tuple[str, str, int], list] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if [c.strip() for c in next(reader, [])] != FINGERPRINT_HEADER:
            raise SessionFormatError(f"{path.name}: expected header {','.join(FINGERPRINT_HEADER)}")
        try:
            for row in reader:
                if not row:
                    continue
                key = (row[1], row[2], int(row[0]))
                groups.setdefault(key, []).append(row)
        except ValueError as exc:
            raise SessionFormatError(f"{path.name}: {exc}") from exc
    out = []
    for (device, floor, sid), rows in groups.items():
        out.append(
            Fingerprint(
                scan_id=sid,
                bssid=[r[5] for r in rows],
                rss=[int(r[6]) for r in rows],
                t=[int(r[9]) for r in rows],
                positions=[(float(r[7]), float(r[8])) for r in rows],
                floor_id=floor,
                device_id=device,
                label=np.array([float(rows[0][3]), float(rows[0][4])]),
            )
        )
    return out


def write_labeled_sensors(labeled: LabeledSensors, path) -> Path:
    f = format_float
    s = labeled.sensors

    def rows():
        for t, code, vals, (x, y), st in zip(
            s.t.tolist(), s.sensor_type, s.values.tolist(), labeled.xy.tolist(), labeled.segment_status
        ):
            v = ["" if np.isnan(a) else f(a) for a in vals]
            yield [str(t), code, *v, f(x), f(y), labeled.floor_id, st]

    return atomic_write_rows(path, LABELED_SENSOR_HEADER, rows())
