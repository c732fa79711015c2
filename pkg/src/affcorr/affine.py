"""Closed-form local affine maps between two calibrated views.

The affine map ``A`` is the Jacobian of the plane-induced point transfer
``p1 -> p2`` at ``p1``. With ``H = R - t n^T / d`` and
``s = H31 u1 + H32 v1 + H33`` it splits into a rotation block and two
rank-one terms::

    A = ( R[:2, :2]
          - [u2, v2]^T [R31, R32]
          - (1/d) [tx - u2 tz, ty - v2 tz]^T [nx, ny] ) / s

Two routes are provided: per-entry numerators ``b_ij`` divided by ``s``
(:func:`affine_elementwise`) and the three-term form
(:func:`affine_unified`). :func:`affine_from_homography` differentiates an
arbitrary homography and does not need pose or plane.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, DegeneratePlane, InvalidValue
from .geometry import (
    DEGENERACY_EPS,
    Homography,
    ImagePoint,
    PlaneParams,
    Pose,
    RotationMatrix,
    homography_from_pose_plane,
    plane_distance_from_point,
)


@dataclass(frozen=True)
class AffineMap:
    a11: float
    a12: float
    a21: float
    a22: float

    def __post_init__(self):
        for name in ("a11", "a12", "a21", "a22"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not np.all(np.isfinite(self.entries())):
            raise InvalidValue("affine map has non-finite entries")

    @classmethod
    def from_matrix(cls, m) -> AffineMap:
        m = np.asarray(m, dtype=np.float64).reshape(2, 2)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @classmethod
    def identity(cls) -> AffineMap:
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    def entries(self) -> tuple[float, float, float, float]:
        """Row-major entries."""
        return (self.a11, self.a12, self.a21, self.a22)

    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def __matmul__(self, other: AffineMap) -> AffineMap:
        return AffineMap.from_matrix(self.matrix @ other.matrix)


@dataclass(frozen=True)
class AffineResult:
    """Affine map together with the transferred point, the shared divisor and numerators."""

    affine: AffineMap
    p2: ImagePoint
    s: float
    b: tuple[float, float, float, float]


@dataclass(frozen=True, eq=False)
class AffineDecomposition:
    """The three 2x2 terms of the unified formula, before division by ``s``.

    The two rank-one terms are stored with the sign they carry in the
    formula, i.e. they are *subtracted* from the rotation block.
    """

    rotation_block: np.ndarray
    point_dyad: np.ndarray
    normal_dyad: np.ndarray
    s: float

    def numerators(self) -> np.ndarray:
        return self.rotation_block - self.point_dyad - self.normal_dyad

    def assemble(self) -> AffineMap:
        return AffineMap.from_matrix(self.numerators() / self.s)


def _check_s(s: float) -> float:
    if not abs(s) > DEGENERACY_EPS:
        raise DegenerateDenominator(f"transfer denominator s={s!r} is degenerate")
    return s


def denominator_s(pose: Pose, plane: PlaneParams, p1: ImagePoint) -> float:
    """Third homogeneous coordinate of ``H [u1, v1, 1]^T``.

    Equals ``(r3 - (tz/d) n) . [u1, v1, 1]``, which is also the depth ratio
    ``z2 / z1`` of the scene point seen from both cameras.
    """
    H = homography_from_pose_plane(pose, plane).matrix
    return _check_s(H[2, 0] * p1.u + H[2, 1] * p1.v + H[2, 2])


def affine_elementwise(pose: Pose, plane: PlaneParams, p1: ImagePoint) -> AffineResult:
    H = homography_from_pose_plane(pose, plane).matrix
    s = _check_s(H[2, 0] * p1.u + H[2, 1] * p1.v + H[2, 2])
    u2 = (H[0, 0] * p1.u + H[0, 1] * p1.v + H[0, 2]) / s
    v2 = (H[1, 0] * p1.u + H[1, 1] * p1.v + H[1, 2]) / s

    R, (tx, ty, tz), (nx, ny, _), d = pose.R, pose.t, plane.normal, plane.distance
    b11 = R[0, 0] - u2 * R[2, 0] - (nx / d) * (tx - u2 * tz)
    b12 = R[0, 1] - u2 * R[2, 1] - (ny / d) * (tx - u2 * tz)
    b21 = R[1, 0] - v2 * R[2, 0] - (nx / d) * (ty - v2 * tz)
    b22 = R[1, 1] - v2 * R[2, 1] - (ny / d) * (ty - v2 * tz)
    b = (float(b11), float(b12), float(b21), float(b22))
    affine = AffineMap(b[0] / s, b[1] / s, b[2] / s, b[3] / s)
    return AffineResult(affine, ImagePoint(u2, v2), float(s), b)


def affine_unified(pose: Pose, plane: PlaneParams, p1: ImagePoint, p2: ImagePoint) -> AffineDecomposition:
    """Three-term decomposition at a correspondence ``(p1, p2)``.

    ``p2`` is taken from the caller, so measured matches can be used; it
    only agrees with :func:`affine_elementwise` when ``p2`` is the exact
    transfer of ``p1``.
    """
    s = denominator_s(pose, plane, p1)
    R, t, n, d = pose.R, pose.t, plane.normal, plane.distance
    q2 = p2.as_array()
    rotation_block = np.array(R[:2, :2])
    point_dyad = np.outer(q2, R[2, :2])
    w = t[:2] - q2 * t[2]
    normal_dyad = (n[:2] / d)[np.newaxis, :] * w[:, np.newaxis]
    for m in (rotation_block, point_dyad, normal_dyad):
        m.setflags(write=False)
    return AffineDecomposition(rotation_block, point_dyad, normal_dyad, float(s))


def affine_from_homography(h: Homography, p1: ImagePoint) -> AffineResult:
    """Exact Jacobian of ``p -> project(H [p, 1])`` at ``p1``; invariant to the scale of ``H``."""
    H = h.matrix
    s = H[2, 0] * p1.u + H[2, 1] * p1.v + H[2, 2]
    # Relative test so that lambda*H behaves like H.
    if not abs(s) > DEGENERACY_EPS * np.max(np.abs(H)):
        raise DegenerateDenominator(f"transfer denominator s={s!r} is degenerate")
    u2 = (H[0, 0] * p1.u + H[0, 1] * p1.v + H[0, 2]) / s
    v2 = (H[1, 0] * p1.u + H[1, 1] * p1.v + H[1, 2]) / s
    b = (
        float(H[0, 0] - H[2, 0] * u2),
        float(H[0, 1] - H[2, 1] * u2),
        float(H[1, 0] - H[2, 0] * v2),
        float(H[1, 1] - H[2, 1] * v2),
    )
    affine = AffineMap(b[0] / s, b[1] / s, b[2] / s, b[3] / s)
    return AffineResult(affine, ImagePoint(u2, v2), float(s), b)


def stereo_affine(baseline: float, plane: PlaneParams) -> AffineMap:
    """Affine map for ``R = I``, ``t = [baseline, 0, 0]``; independent of the image point."""
    d = plane.distance
    if abs(d) <= DEGENERACY_EPS:
        raise DegeneratePlane("plane passes through the first camera center")
    nx, ny, _ = plane.normal
    return AffineMap(1.0 - baseline * nx / d, -baseline * ny / d, 0.0, 1.0)


def stereo_affine_at_point(baseline: float, normal, point) -> AffineMap:
    """Standard-stereo map with the plane given by its normal and a point on it.

    Substitutes ``d = -(n . X)``, giving ``a11 = 1 + b nx / (n . X)``.
    """
    n = np.asarray(normal, dtype=np.float64)
    n = n / np.linalg.norm(n)
    nX = -plane_distance_from_point(n, point)
    return AffineMap(1.0 + baseline * n[0] / nX, baseline * n[1] / nX, 0.0, 1.0)


def pure_translation_affine(t, plane: PlaneParams, p1: ImagePoint) -> AffineResult:
    return affine_elementwise(Pose(RotationMatrix.identity(), t), plane, p1)


def pure_rotation_affine(r: RotationMatrix, p1: ImagePoint) -> AffineResult:
    """Affine map of a camera rotating about its center; no plane enters.

    With ``t = 0`` the homography is ``R`` itself, so the normal term
    vanishes and ``s = r3 . [u1, v1, 1]``.
    """
    R = r.matrix
    s = _check_s(R[2, 0] * p1.u + R[2, 1] * p1.v + R[2, 2])
    u2 = (R[0, 0] * p1.u + R[0, 1] * p1.v + R[0, 2]) / s
    v2 = (R[1, 0] * p1.u + R[1, 1] * p1.v + R[1, 2]) / s
    b = (
        float(R[0, 0] - u2 * R[2, 0]),
        float(R[0, 1] - u2 * R[2, 1]),
        float(R[1, 0] - v2 * R[2, 0]),
        float(R[1, 1] - v2 * R[2, 1]),
    )
    affine = AffineMap(b[0] / s, b[1] / s, b[2] / s, b[3] / s)
    return AffineResult(affine, ImagePoint(u2, v2), float(s), b)
