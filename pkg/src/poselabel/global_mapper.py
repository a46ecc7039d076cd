"""Whole-trajectory mapping with one least-squares similarity transform."""

from __future__ import annotations

import logging

import numpy as np

from poselabel.geometry import DegenerateGeometryError, estimate_similarity_ls, rms_residual
from poselabel.session import LandmarkRegistry, Session
from poselabel.trajectory import (
    MappedTrajectory,
    MappingError,
    SegmentRecord,
    SegmentStatus,
    Strategy,
)

log = logging.getLogger(__name__)


def median_landmark_positions(session: Session) -> dict[str, np.ndarray]:
    """Componentwise median of the valid planar observations of each landmark."""
    lm = session.landmarks
    known = ~lm.unknown
    out = {}
    for lid in lm.ids():
        sel = (lm.landmark_id == lid) & known
        if np.any(sel):
            out[lid] = np.median(lm.xy[sel], axis=0)
    return out


def map_global(session: Session, registry: LandmarkRegistry) -> MappedTrajectory:
    medians = median_landmark_positions(session)
    missing = sorted(set(medians) - set(registry.ids()))
    if missing:
        log.warning("landmarks not in registry, ignored: %s", ", ".join(missing))
    common = [lid for lid in sorted(medians) if lid in registry]
    if len(common) < 2:
        raise MappingError(
            f"fewer than 2 common landmarks (found {len(common)})", code="E_LANDMARKS"
        )
    src = np.array([medians[k] for k in common])
    dst = np.array([registry[k] for k in common])
    try:
        transform = estimate_similarity_ls(src, dst)
    except DegenerateGeometryError as exc:
        raise MappingError(f"degenerate landmark geometry: {exc}", code="E_DEGENERATE") from exc

    cam = session.camera
    t0, t1 = session.time_range
    seg = SegmentRecord(t0, t1, SegmentStatus.MAPPED, transform)
    return MappedTrajectory(
        t=cam.t.copy(),
        xy=transform.apply(cam.xy),
        segment_id=np.zeros(len(cam), dtype=np.int64),
        segments=[seg],
        strategy=Strategy.GLOBAL,
        floor_id=session.floor_id,
        quality={
            "rms_residual": rms_residual(transform, src, dst),
            "landmarks_used": common,
            "transform": transform,
        },
    )
