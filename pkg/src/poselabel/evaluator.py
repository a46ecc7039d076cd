"""Labeling-error metrics and a weighted kNN fingerprinting baseline."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from poselabel.annotator import Fingerprint
from poselabel.session import ControlPointSet, atomic_write_rows, format_float
from poselabel.simulator import GroundTruth
from poselabel.trajectory import DEFAULT_CLAMP_NS, MappedTrajectory, SegmentStatus

MISSING_RSS_DBM = -110.0


@dataclass
class ErrorStats:
    per_sample_errors: np.ndarray
    skipped: int = 0
    mean: float = field(init=False)
    median: float = field(init=False)
    max: float = field(init=False)
    count: int = field(init=False)

    def __post_init__(self):
        e = np.asarray(self.per_sample_errors, dtype=float).reshape(-1)
        self.per_sample_errors = e
        self.count = len(e)
        self.mean = float(e.mean()) if len(e) else math.nan
        self.median = float(np.median(e)) if len(e) else math.nan
        self.max = float(e.max()) if len(e) else math.nan


def control_point_errors(
    traj: MappedTrajectory,
    event_times,
    points: ControlPointSet,
    clamp_ns: int = DEFAULT_CLAMP_NS,
) -> ErrorStats:
    """Distance from the mapped position at each button press to the nearest control point."""
    if len(points) == 0:
        raise ValueError("control point set is empty")
    ts = np.asarray(event_times, dtype=np.int64).reshape(-1)
    xy, ok, _ = traj.positions_at(ts, clamp_ns)
    if not np.any(ok):
        return ErrorStats(np.zeros(0), skipped=len(ts))
    d = np.linalg.norm(xy[ok][:, None, :] - points.points[None, :, :], axis=-1)
    return ErrorStats(d.min(axis=1), skipped=int(np.sum(~ok)))


def trajectory_error(
    traj: MappedTrajectory,
    gt: GroundTruth,
    include_extrapolated: bool = False,
    clamp_ns: int = DEFAULT_CLAMP_NS,
) -> ErrorStats:
    """Planar error against ground truth at every resolvable ground-truth instant."""
    if len(traj) == 0 or len(gt.t) == 0 or traj.t[-1] < gt.t[0] or gt.t[-1] < traj.t[0]:
        raise ValueError("trajectory and ground truth time ranges are disjoint")
    xy, ok, seg = traj.positions_at(gt.t, clamp_ns)
    if not include_extrapolated:
        extrap = np.array(
            [s >= 0 and traj.segments[s].status is SegmentStatus.EXTRAPOLATED for s in seg]
        )
        ok &= ~extrap
    e = np.linalg.norm(xy[ok] - gt.xy[ok], axis=1)
    return ErrorStats(e, skipped=int(np.sum(~ok)))


# -- kNN baseline ------------------------------------------------------------------


@dataclass
class KnnResult:
    predictions: np.ndarray
    floors: list[str]
    stats: ErrorStats
    floor_accuracy: float


def rss_matrix(fingerprints: list[Fingerprint], bssids: list[str], fill: float = MISSING_RSS_DBM):
    col = {b: i for i, b in enumerate(bssids)}
    m = np.full((len(fingerprints), len(bssids)), fill, dtype=float)
    for r, fp in enumerate(fingerprints):
        for b, v in zip(fp.bssid, fp.rss.tolist()):
            if b in col:
                m[r, col[b]] = v
    return m


def knn_localize(
    train: list[Fingerprint],
    test: list[Fingerprint],
    k: int = 5,
    fill: float = MISSING_RSS_DBM,
) -> KnnResult:
    """Weighted kNN in RSS space.

    The position estimate is the inverse-distance weighted mean of the ``k``
    nearest training labels; the floor is the neighbours' majority floor.
    Planar errors are only collected for test scans whose floor was correct.
    """
    if not train:
        raise ValueError("empty training set")
    if k < 1:
        raise ValueError("k must be >= 1")
    bssids = sorted({b for fp in train + test for b in fp.bssid})
    x_train = rss_matrix(train, bssids, fill)
    x_test = rss_matrix(test, bssids, fill)
    labels = np.array([fp.label for fp in train]).reshape(-1, 2)
    floors = [fp.floor_id for fp in train]
    k = min(k, len(train))

    preds = np.zeros((len(test), 2))
    pred_floors = []
    errors = []
    correct = 0
    for i, fp in enumerate(test):
        d = np.linalg.norm(x_train - x_test[i], axis=1)
        nn = np.argsort(d, kind="stable")[:k]
        exact = nn[d[nn] == 0]
        if len(exact):
            w = np.zeros(len(nn))
            w[np.isin(nn, exact)] = 1.0
        else:
            w = 1.0 / d[nn]
        preds[i] = (w[:, None] * labels[nn]).sum(axis=0) / w.sum()
        votes = Counter(floors[j] for j in nn)
        best = max(votes.values())
        floor = next(floors[j] for j in nn if votes[floors[j]] == best)
        pred_floors.append(floor)
        if floor == fp.floor_id:
            correct += 1
            errors.append(float(np.linalg.norm(preds[i] - fp.label)))
    acc = correct / len(test) if test else math.nan
    return KnnResult(preds, pred_floors, ErrorStats(np.array(errors), skipped=len(test) - correct), acc)


def random_split(items: list, test_fraction: float, seed: int = 0) -> tuple[list, list]:
    rng = np.random.default_rng(seed)
    idx = rng.permutation(len(items))
    n_test = int(round(test_fraction * len(items)))
    test_idx = set(idx[:n_test].tolist())
    train = [x for i, x in enumerate(items) if i not in test_idx]
    test = [x for i, x in enumerate(items) if i in test_idx]
    return train, test


# -- reports --------------------------------------------------------------------------

METRICS_HEADER = ["evaluation", "column", "mean", "median", "max", "count", "skipped"]


def format_table(title: str, columns: dict[str, ErrorStats]) -> str:
    """Mean / Median / Maximum rows by column, in metres."""
    names = list(columns)
    width = max([12] + [len(n) + 2 for n in names])
    lines = [title, "metric".ljust(10) + "".join(n.rjust(width) for n in names)]
    for label, attr in (("Mean", "mean"), ("Median", "median"), ("Maximum", "max")):
        cells = []
        for n in names:
            v = getattr(columns[n], attr)
            cells.append(("-" if math.isnan(v) else f"{v:.3f}").rjust(width))
        lines.append(label.ljust(10) + "".join(cells))
    lines.append("count".ljust(10) + "".join(str(columns[n].count).rjust(width) for n in names))
    return "\n".join(lines)


def metrics_rows(evaluation: str, columns: dict[str, ErrorStats]) -> list[list[str]]:
    f = format_float
    return [
        [evaluation, name, f(s.mean), f(s.median), f(s.max), str(s.count), str(s.skipped)]
        for name, s in columns.items()
    ]


def write_metrics(rows: list[list[str]], path) -> Path:
    return atomic_write_rows(path, METRICS_HEADER, rows)


def write_plot_data(sources: dict[str, tuple[np.ndarray, np.ndarray]], path) -> Path:
    """Overlay export: one ``source,t_ns,x,y`` row per sample of each source."""
    f = format_float

    def rows():
        for name, (t, xy) in sources.items():
            for ti, (x, y) in zip(np.asarray(t).tolist(), np.asarray(xy).tolist()):
                yield [name, str(ti), f(x), f(y)]

    return atomic_write_rows(path, ["source", "t_ns", "x", "y"], rows())
