"""Piecewise mapping between consecutive landmark visits, with failure handling.

The trajectory is cut where the camera passes closest to a landmark. Each
piece between two cuts gets the exact similarity that carries the two
boundary landmarks, as logged at the cut instants, onto their surveyed
positions. Pieces containing a tracker jump, or spanning a moment where
every tracked landmark collapsed onto the camera, are discarded when
correction is enabled.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from poselabel.geometry import DegenerateGeometryError, estimate_similarity_two_point
from poselabel.session import LandmarkRegistry, Session
from poselabel.trajectory import (
    MappedTrajectory,
    MappingError,
    SegmentRecord,
    SegmentStatus,
    SplitPoint,
    Strategy,
)


@dataclass
class LocalMapperConfig:
    proximity_threshold_m: float = 1.0
    jump_threshold_m: float = 0.5
    identity_eps_m: float = 1e-3
    min_run_frames: int = 5
    merge_window_s: float = 1.0
    correction_enabled: bool = True

    @classmethod
    def from_mapping(cls, values: dict) -> LocalMapperConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown local mapper keys: {sorted(unknown)}")
        return cls(**values)


@dataclass
class FailureReport:
    tracking_loss_intervals: list[tuple[int, int, str]] = field(default_factory=list)
    jump_events: list[tuple[int, float]] = field(default_factory=list)
    # landmark rows found collapsed onto the camera
    unknown_mask: np.ndarray | None = None

    def __bool__(self) -> bool:
        return bool(self.tracking_loss_intervals or self.jump_events)


def _runs(flags: np.ndarray, frames: np.ndarray):
    """(start, stop) row ranges of flagged rows on consecutive frames."""
    if len(flags) == 0:
        return []
    joined = np.zeros(len(flags), dtype=bool)
    joined[1:] = flags[1:] & flags[:-1] & (np.diff(frames) == 1)
    starts = np.flatnonzero(flags & ~joined)
    out = []
    for s in starts:
        e = s + 1
        while e < len(flags) and joined[e]:
            e += 1
        out.append((s, e))
    return out


def detect_failures(
    session: Session,
    jump_threshold: float = 0.5,
    identity_eps: float = 1e-3,
    min_run: int = 5,
) -> FailureReport:
    """Find landmark tracking loss and camera jumps.

    Tracking loss is a run of at least ``min_run`` consecutive frames in which
    a landmark's logged position coincides (within ``identity_eps``) with the
    camera position. A jump is a planar step between consecutive camera poses
    longer than ``jump_threshold``.
    """
    cam, lm = session.camera, session.landmarks
    report = FailureReport(unknown_mask=np.zeros(len(lm), dtype=bool))

    if len(lm):
        fi = session.frame_index(lm.t)
        with np.errstate(invalid="ignore"):
            d = np.linalg.norm(lm.xyz - cam.xyz[fi], axis=1)
            close = d <= identity_eps
        intervals = []
        for lid in lm.ids():
            rows = np.flatnonzero(lm.landmark_id == lid)
            for s, e in _runs(close[rows], fi[rows]):
                if e - s >= min_run:
                    report.unknown_mask[rows[s:e]] = True
                    intervals.append((int(lm.t[rows[s]]), int(lm.t[rows[e - 1]]), lid))
        report.tracking_loss_intervals = sorted(intervals)

    if len(cam) > 1:
        step = np.linalg.norm(np.diff(cam.xy, axis=0), axis=1)
        for k in np.flatnonzero(step > jump_threshold):
            report.jump_events.append((int(cam.t[k + 1]), float(step[k])))
    return report


def flag_unknown(session: Session, report: FailureReport) -> Session:
    """Session copy with collapsed landmark observations set to unknown."""
    if report.unknown_mask is None or not report.unknown_mask.any():
        return session
    return session.with_landmarks(session.landmarks.with_unknown(report.unknown_mask))


def detect_split_points(
    session: Session, proximity_threshold: float = 1.0, merge_window_s: float = 1.0
) -> list[SplitPoint]:
    """Frames of closest approach to a landmark, one per proximity interval.

    Unknown observations are ignored. Split points less than
    ``merge_window_s`` apart are merged, keeping the closer approach.
    """
    cam, lm = session.camera, session.landmarks
    if len(lm) == 0:
        return []
    fi = session.frame_index(lm.t)
    known = ~lm.unknown
    candidates: list[SplitPoint] = []
    for lid in lm.ids():
        rows = np.flatnonzero((lm.landmark_id == lid) & known)
        if len(rows) == 0:
            continue
        d = np.linalg.norm(cam.xy[fi[rows]] - lm.xy[rows], axis=1)
        for s, e in _runs(d < proximity_threshold, fi[rows]):
            k = rows[s + int(np.argmin(d[s:e]))]
            f = fi[k]
            candidates.append(SplitPoint(int(cam.t[f]), lid, cam.xy[f].copy(), lm.xy[k].copy()))

    candidates.sort(key=lambda sp: (sp.t, sp.distance))
    window = int(round(merge_window_s * 1e9))
    merged: list[SplitPoint] = []
    for sp in candidates:
        if merged and sp.t - merged[-1].t < window:
            if sp.distance < merged[-1].distance:
                merged[-1] = sp
            continue
        merged.append(sp)
    return merged


def _segment_of(starts: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.searchsorted(starts, t, side="right") - 1


def map_local(
    session: Session,
    registry: LandmarkRegistry,
    config: LocalMapperConfig | None = None,
) -> MappedTrajectory:
    cfg = config or LocalMapperConfig()
    report = detect_failures(
        session, cfg.jump_threshold_m, cfg.identity_eps_m, cfg.min_run_frames
    )
    flagged = flag_unknown(session, report)
    splits = [
        sp
        for sp in detect_split_points(flagged, cfg.proximity_threshold_m, cfg.merge_window_s)
        if sp.landmark_id in registry
    ]
    # repeat visits to one landmark cannot anchor any segment
    n_landmarks = len({sp.landmark_id for sp in splits})
    if len(splits) < 2 or n_landmarks < 2:
        raise MappingError(
            f"fewer than 2 usable split points (found {len(splits)} at {n_landmarks} landmarks)",
            code="E_SPLIT_POINTS",
        )

    cam = session.camera
    t_first, t_last = session.time_range
    segments: list[SegmentRecord] = []
    if splits[0].t > t_first:
        segments.append(
            SegmentRecord(t_first, splits[0].t, SegmentStatus.EXTRAPOLATED, end=splits[0])
        )
    for a, b in zip(splits[:-1], splits[1:]):
        seg = SegmentRecord(a.t, b.t, SegmentStatus.MAPPED, start=a, end=b)
        try:
            seg.transform = estimate_similarity_two_point(
                a.landmark_acs, b.landmark_acs, registry[a.landmark_id], registry[b.landmark_id]
            )
        except DegenerateGeometryError as exc:
            seg.status = SegmentStatus.DISCARDED_DEGENERATE
            seg.reason = f"degenerate landmark pair: {exc}"
        segments.append(seg)
    if splits[-1].t < t_last:
        segments.append(
            SegmentRecord(splits[-1].t, t_last, SegmentStatus.EXTRAPOLATED, start=splits[-1])
        )

    interior = [s for s in segments if s.status is SegmentStatus.MAPPED]
    for seg in segments:
        if seg.status is not SegmentStatus.EXTRAPOLATED:
            continue
        neighbours = interior if seg.end is not None else interior[::-1]
        if neighbours:
            seg.transform = neighbours[0].transform
        else:
            seg.status = SegmentStatus.DISCARDED_DEGENERATE
            seg.reason = "no mapped neighbour to extrapolate from"

    starts = np.array([s.start_t for s in segments], dtype=np.int64)
    frame_seg = _segment_of(starts, cam.t)

    lm = flagged.landmarks
    lost_frames = np.zeros(len(cam), dtype=bool)
    if len(lm):
        fi = flagged.frame_index(lm.t)
        n_obs = np.bincount(fi, minlength=len(cam))
        n_unknown = np.bincount(fi, weights=lm.unknown.astype(float), minlength=len(cam))
        lost_frames = (n_obs > 0) & (n_unknown == n_obs)
    lost_segments = set(frame_seg[lost_frames].tolist())
    jump_segments = set(
        _segment_of(starts, np.array([t for t, _ in report.jump_events], dtype=np.int64)).tolist()
    )

    for k, seg in enumerate(segments):
        if seg.discarded:
            continue
        if k in jump_segments:
            reason, status = "jump", SegmentStatus.DISCARDED_JUMP
        elif k in lost_segments:
            reason, status = "tracking_loss", SegmentStatus.DISCARDED_TRACKING_LOSS
        else:
            continue
        if cfg.correction_enabled:
            seg.status, seg.reason = status, reason
        else:
            seg.reason = f"{reason} (uncorrected)"

    keep = np.array([not segments[k].discarded for k in frame_seg], dtype=bool)
    xy = np.full((len(cam), 2), np.nan)
    for k, seg in enumerate(segments):
        sel = frame_seg == k
        if seg.transform is not None and not seg.discarded and np.any(sel):
            xy[sel] = seg.transform.apply(cam.xy[sel])

    strategy = Strategy.LOCAL_CORRECTED if cfg.correction_enabled else Strategy.LOCAL
    return MappedTrajectory(
        t=cam.t[keep],
        xy=xy[keep],
        segment_id=frame_seg[keep],
        segments=segments,
        strategy=strategy,
        floor_id=session.floor_id,
        quality={"split_points": splits, "failures": report},
    )
