"""Planar similarity transforms: algebra and estimation from point correspondences."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEGENERATE_EPS = 1e-6


class DegenerateGeometryError(ValueError):
    """Point configuration does not determine a similarity transform."""


def _wrap_angle(a: float) -> float:
    return math.atan2(math.sin(a), math.cos(a))


@dataclass(frozen=True)
class SimilarityTransform2D:
    """``p -> scale * R(rotation) @ p + translation``.

    Rotation is stored as an angle in radians, wrapped to (-pi, pi].
    """

    scale: float = 1.0
    rotation: float = 0.0
    translation: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive and finite, got {self.scale}")
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "rotation", _wrap_angle(float(self.rotation)))
        tx, ty = self.translation
        object.__setattr__(self, "translation", (float(tx), float(ty)))

    @classmethod
    def identity(cls) -> SimilarityTransform2D:
        return cls()

    @property
    def rotation_matrix(self) -> np.ndarray:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return np.array([[c, -s], [s, c]])

    @property
    def matrix(self) -> np.ndarray:
        """3x3 homogeneous matrix."""
        m = np.eye(3)
        m[:2, :2] = self.scale * self.rotation_matrix
        m[:2, 2] = self.translation
        return m

    def apply(self, points) -> np.ndarray:
        """Transform a single 2-vector or an (N, 2) array."""
        p = np.asarray(points, dtype=float)
        out = self.scale * (p @ self.rotation_matrix.T) + np.asarray(self.translation)
        return out

    __call__ = apply

    def inverse(self) -> SimilarityTransform2D:
        inv_scale = 1.0 / self.scale
        r_inv = self.rotation_matrix.T
        t = -inv_scale * (r_inv @ np.asarray(self.translation))
        return SimilarityTransform2D(inv_scale, -self.rotation, (t[0], t[1]))

    def compose(self, other: SimilarityTransform2D) -> SimilarityTransform2D:
        """Transform equivalent to applying ``other`` first, then ``self``."""
        t = self.scale * (self.rotation_matrix @ np.asarray(other.translation)) + np.asarray(
            self.translation
        )
        return SimilarityTransform2D(
            self.scale * other.scale, self.rotation + other.rotation, (t[0], t[1])
        )

    def __matmul__(self, other: SimilarityTransform2D) -> SimilarityTransform2D:
        return self.compose(other)

    def isclose(self, other: SimilarityTransform2D, atol: float = 1e-9) -> bool:
        return (
            abs(self.scale - other.scale) <= atol
            and abs(_wrap_angle(self.rotation - other.rotation)) <= atol
            and np.allclose(self.translation, other.translation, rtol=0.0, atol=atol)
        )


def apply(transform: SimilarityTransform2D, points) -> np.ndarray:
    return transform.apply(points)


def invert(transform: SimilarityTransform2D) -> SimilarityTransform2D:
    return transform.inverse()


def compose(first: SimilarityTransform2D, second: SimilarityTransform2D) -> SimilarityTransform2D:
    """``apply(compose(T1, T2), p) == apply(T1, apply(T2, p))``."""
    return first.compose(second)


def _as_points(a, name: str) -> np.ndarray:
    p = np.asarray(a, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2:
        raise ValueError(f"{name} must have shape (N, 2), got {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} contains non-finite coordinates")
    return p


def estimate_similarity_ls(src, dst) -> SimilarityTransform2D:
    """Least-squares similarity from ``src`` to ``dst`` (Umeyama, closed form).

    Minimizes ``mean ||dst_i - (s R src_i + t)||^2`` over scale, proper
    rotation and translation. Reflections are excluded through the sign
    correction on the smallest singular direction.
    """
    x = _as_points(src, "src")
    y = _as_points(dst, "dst")
    if x.shape != y.shape:
        raise ValueError(f"src and dst differ in shape: {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise DegenerateGeometryError("need at least 2 correspondences")
    spread = np.max(np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1))
    if spread <= 1e-9:
        raise DegenerateGeometryError("source points are coincident")

    mx, my = x.mean(axis=0), y.mean(axis=0)
    dx, dy = x - mx, y - my
    n = len(x)
    cov = dy.T @ dx / n
    u, d, vt = np.linalg.svd(cov)
    signs = np.ones(2)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        signs[-1] = -1.0
    rot = u @ np.diag(signs) @ vt
    var_x = np.sum(dx**2) / n
    scale = float(np.sum(d * signs) / var_x)
    if scale <= 0:
        raise DegenerateGeometryError("estimated scale is not positive")
    t = my - scale * rot @ mx
    return SimilarityTransform2D(scale, math.atan2(rot[1, 0], rot[0, 0]), (t[0], t[1]))


def estimate_similarity_two_point(
    src_a, src_b, dst_a, dst_b, eps: float = DEGENERATE_EPS
) -> SimilarityTransform2D:
    """Exact similarity mapping ``src_a -> dst_a`` and ``src_b -> dst_b``."""
    pts = [np.asarray(p, dtype=float) for p in (src_a, src_b, dst_a, dst_b)]
    for p in pts:
        if p.shape != (2,) or not np.all(np.isfinite(p)):
            raise ValueError("two-point inputs must be finite 2-vectors")
    sa, sb, da, db = (complex(p[0], p[1]) for p in pts)
    if abs(sb - sa) <= eps:
        raise DegenerateGeometryError("source pair is coincident")
    if abs(db - da) <= eps:
        raise DegenerateGeometryError("destination pair is coincident")
    z = (db - da) / (sb - sa)
    t = da - z * sa
    return SimilarityTransform2D(abs(z), math.atan2(z.imag, z.real), (t.real, t.imag))


def rms_residual(transform: SimilarityTransform2D, src, dst) -> float:
    r = np.asarray(dst, dtype=float) - transform.apply(src)
    return float(np.sqrt(np.mean(np.sum(r**2, axis=1))))
