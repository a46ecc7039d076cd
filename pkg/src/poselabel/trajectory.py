"""Mapped trajectories in the building frame and their CSV form."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from poselabel.geometry import SimilarityTransform2D
from poselabel.session import SessionFormatError, atomic_write_rows, format_float

TRAJECTORY_HEADER = ["t_ns", "x", "y", "segment_id", "status"]
SEGMENTS_HEADER = [
    "segment_id",
    "start_t_ns",
    "end_t_ns",
    "status",
    "reason",
    "start_landmark",
    "end_landmark",
    "scale",
    "rotation",
    "tx",
    "ty",
    "floor_id",
]

DEFAULT_CLAMP_NS = 500_000_000


class Strategy(str, enum.Enum):
    GLOBAL = "global"
    LOCAL = "local"
    LOCAL_CORRECTED = "local_corrected"


class SegmentStatus(str, enum.Enum):
    MAPPED = "mapped"
    EXTRAPOLATED = "extrapolated"
    DISCARDED_TRACKING_LOSS = "discarded_tracking_loss"
    DISCARDED_JUMP = "discarded_jump"
    DISCARDED_DEGENERATE = "discarded_degenerate"

    @property
    def discarded(self) -> bool:
        return self.value.startswith("discarded")


@dataclass(frozen=True)
class SplitPoint:
    t: int
    landmark_id: str
    camera_acs: np.ndarray
    landmark_acs: np.ndarray

    @property
    def distance(self) -> float:
        return float(np.linalg.norm(np.asarray(self.camera_acs) - np.asarray(self.landmark_acs)))


@dataclass
class SegmentRecord:
    """A time slice of the trajectory sharing one transform.

    ``start``/``end`` are None for the head and tail pieces outside the
    first and last split point. The slice covers ``[start_t, end_t)``; the
    final segment of a trajectory also owns ``end_t``.
    """

    start_t: int
    end_t: int
    status: SegmentStatus
    transform: SimilarityTransform2D | None = None
    start: SplitPoint | None = None
    end: SplitPoint | None = None
    reason: str | None = None

    @property
    def discarded(self) -> bool:
        return self.status.discarded


@dataclass
class MappedTrajectory:
    t: np.ndarray
    xy: np.ndarray
    segment_id: np.ndarray
    segments: list[SegmentRecord]
    strategy: Strategy
    floor_id: str = "0"
    quality: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.int64).reshape(-1)
        self.xy = np.asarray(self.xy, dtype=float).reshape(-1, 2)
        self.segment_id = np.asarray(self.segment_id, dtype=np.int64).reshape(-1)
        self.strategy = Strategy(self.strategy)
        if len(self.t) > 1 and np.any(np.diff(self.t) <= 0):
            raise ValueError("trajectory timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def sample_status(self) -> np.ndarray:
        return np.array([self.segments[i].status.value for i in self.segment_id], dtype=object)

    def discarded_mask(self, ts) -> np.ndarray:
        """True where a timestamp falls in the range of a discarded segment."""
        ts = np.asarray(ts, dtype=np.int64)
        bad = np.zeros(ts.shape, dtype=bool)
        last = len(self.segments) - 1
        for k, seg in enumerate(self.segments):
            if seg.discarded:
                hit = (ts >= seg.start_t) & (ts < seg.end_t)
                if k == last:
                    hit |= ts == seg.end_t
                bad |= hit
        return bad

    def positions_at(self, ts, clamp_ns: int = DEFAULT_CLAMP_NS):
        """Interpolated positions for many timestamps.

        Returns ``(xy, ok, segment_id)``; rows with ``ok == False`` have no
        position (inside a discarded segment, or farther than ``clamp_ns``
        outside the sampled range) and carry nan / -1.
        """
        ts = np.atleast_1d(np.asarray(ts, dtype=np.int64))
        out = np.full((len(ts), 2), np.nan)
        seg = np.full(len(ts), -1, dtype=np.int64)
        ok = np.zeros(len(ts), dtype=bool)
        n = len(self.t)
        if n == 0:
            return out, ok, seg
        i = np.searchsorted(self.t, ts, side="right") - 1
        allowed = ~self.discarded_mask(ts)

        before = i < 0
        near = before & (self.t[0] - ts <= clamp_ns) & allowed
        out[near], seg[near], ok[near] = self.xy[0], self.segment_id[0], True

        exact = ~before & (self.t[np.maximum(i, 0)] == ts)
        after = ~before & ~exact & (i == n - 1)
        near = after & (ts - self.t[-1] <= clamp_ns) & allowed
        out[near], seg[near], ok[near] = self.xy[-1], self.segment_id[-1], True

        ex = exact & allowed
        out[ex], seg[ex], ok[ex] = self.xy[i[ex]], self.segment_id[i[ex]], True

        mid = ~before & ~exact & ~after & allowed
        if np.any(mid):
            a = i[mid]
            t0, t1 = self.t[a], self.t[a + 1]
            w = ((ts[mid] - t0) / (t1 - t0))[:, None]
            out[mid] = (1.0 - w) * self.xy[a] + w * self.xy[a + 1]
            seg[mid] = np.where(w[:, 0] < 0.5, self.segment_id[a], self.segment_id[a + 1])
            ok[mid] = True
        return out, ok, seg

    def pose_at(self, t: int, clamp_ns: int = DEFAULT_CLAMP_NS) -> np.ndarray | None:
        xy, ok, _ = self.positions_at([t], clamp_ns)
        return xy[0] if ok[0] else None

    def status_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for s in self.segments:
            counts[s.status.value] = counts.get(s.status.value, 0) + 1
        return counts

    def summary(self) -> str:
        counts = self.status_counts()
        parts = [f"{k}={v}" for k, v in sorted(counts.items())]
        return (
            f"strategy={self.strategy.value} samples={len(self)} segments={len(self.segments)} "
            + " ".join(parts)
        )


def trajectory_paths(directory, strategy: Strategy | str) -> tuple[Path, Path]:
    name = Strategy(strategy).value
    d = Path(directory)
    return d / f"trajectory_{name}.csv", d / f"segments_{name}.csv"


def write_trajectory(traj: MappedTrajectory, directory) -> tuple[Path, Path]:
    """Write ``trajectory_<strategy>.csv`` plus its ``segments_<strategy>.csv`` sidecar."""
    tpath, spath = trajectory_paths(directory, traj.strategy)
    status = traj.sample_status
    f = format_float
    atomic_write_rows(
        tpath,
        TRAJECTORY_HEADER,
        (
            [str(t), f(x), f(y), str(k), s]
            for t, (x, y), k, s in zip(traj.t.tolist(), traj.xy.tolist(), traj.segment_id.tolist(), status)
        ),
    )

    def seg_row(k, s: SegmentRecord):
        tr = s.transform
        params = ["", "", "", ""] if tr is None else [
            f(tr.scale), f(tr.rotation), f(tr.translation[0]), f(tr.translation[1])
        ]
        return [
            str(k),
            str(s.start_t),
            str(s.end_t),
            s.status.value,
            s.reason or "",
            s.start.landmark_id if s.start else "",
            s.end.landmark_id if s.end else "",
        ] + params + [traj.floor_id]

    atomic_write_rows(spath, SEGMENTS_HEADER, (seg_row(k, s) for k, s in enumerate(traj.segments)))
    return tpath, spath


def _read_csv(path: Path, header: list[str]):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or [c.strip() for c in first] != header:
            raise SessionFormatError(f"{path.name}: expected header {','.join(header)}")
        return [r for r in reader if r]


def read_trajectory(path) -> MappedTrajectory:
    """Load a trajectory CSV; the segment sidecar is used when present."""
    path = Path(path)
    name = path.stem
    if not name.startswith("trajectory_"):
        raise SessionFormatError(f"{path.name}: expected a trajectory_<strategy>.csv file")
    strategy = Strategy(name[len("trajectory_"):])
    try:
        rows = _read_csv(path, TRAJECTORY_HEADER)
        t = np.array([int(r[0]) for r in rows], dtype=np.int64)
        xy = np.array([[float(r[1]), float(r[2])] for r in rows]).reshape(-1, 2)
        sid = np.array([int(r[3]) for r in rows], dtype=np.int64)
    except (ValueError, IndexError) as exc:
        raise SessionFormatError(f"{path.name}: {exc}") from exc

    spath = path.with_name(f"segments_{strategy.value}.csv")
    if not spath.is_file():
        raise SessionFormatError(f"missing segment sidecar {spath.name} next to {path.name}")
    segments: list[SegmentRecord] = []
    floor_id = "0"
    try:
        for r in _read_csv(spath, SEGMENTS_HEADER):
            floor_id = r[11]
            tr = None
            if r[7]:
                tr = SimilarityTransform2D(float(r[7]), float(r[8]), (float(r[9]), float(r[10])))
            segments.append(
                SegmentRecord(
                    start_t=int(r[1]),
                    end_t=int(r[2]),
                    status=SegmentStatus(r[3]),
                    transform=tr,
                    reason=r[4] or None,
                    start=_stub_split(r[5], int(r[1])),
                    end=_stub_split(r[6], int(r[2])),
                )
            )
    except (ValueError, IndexError) as exc:
        raise SessionFormatError(f"{spath.name}: {exc}") from exc
    if len(sid) and (sid.min() < 0 or sid.max() >= len(segments)):
        raise SessionFormatError(f"{path.name}: segment ids do not match {spath.name}")
    return MappedTrajectory(t, xy, sid, segments, strategy, floor_id)


def _stub_split(landmark_id: str, t: int) -> SplitPoint | None:
    if not landmark_id:
        return None
    nan2 = np.array([math.nan, math.nan])
    return SplitPoint(t, landmark_id, nan2, nan2)


class MappingError(ValueError):
    """A session cannot be mapped with the requested strategy."""

    def __init__(self, message: str, code: str = "E_MAPPING"):
        super().__init__(message)
        self.code = code
