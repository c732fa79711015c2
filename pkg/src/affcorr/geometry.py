"""Value types and basic two-view geometry.

All points live in normalized image coordinates unless stated otherwise.
Planes use the implicit form ``n . X + d = 0`` in the first camera frame,
so a plane through a visible point ``X`` has ``d = -(n . X)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneratePlane,
    InvalidRotation,
    InvalidValue,
    PointAtInfinity,
    ZeroTranslation,
)

#: Hard degeneracy threshold for distances, denominators and homogeneous scales.
DEGENERACY_EPS = 1e-12
#: Tolerance on orthonormality and determinant of rotation matrices.
ROTATION_TOL = 1e-9


def _frozen(a, shape, name) -> np.ndarray:
    arr = np.array(a, dtype=np.float64).reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise InvalidValue(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def skew(v) -> np.ndarray:
    """Cross-product matrix ``[v]x`` such that ``skew(v) @ w == cross(v, w)``."""
    x, y, z = np.asarray(v, dtype=np.float64).reshape(3)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


@dataclass(frozen=True, eq=False)
class RotationMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        R = _frozen(self.matrix, (3, 3), "rotation")
        if np.max(np.abs(R.T @ R - np.eye(3))) > ROTATION_TOL:
            raise InvalidRotation("rotation is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > ROTATION_TOL:
            raise InvalidRotation("rotation has det != +1")
        object.__setattr__(self, "matrix", R)

    @classmethod
    def identity(cls) -> RotationMatrix:
        return cls(np.eye(3))

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> RotationMatrix:
        """Rodrigues' formula. A zero angle gives the identity exactly."""
        axis = np.asarray(axis, dtype=np.float64).reshape(3)
        norm = math.sqrt(float(axis @ axis))
        if norm == 0.0:
            if angle != 0.0:
                raise InvalidValue("zero rotation axis with nonzero angle")
            return cls.identity()
        K = skew(axis / norm)
        R = np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)
        return cls(R)

    @classmethod
    def about_z(cls, theta: float) -> RotationMatrix:
        c, s = math.cos(theta), math.sin(theta)
        return cls([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True, eq=False)
class Pose:
    """Relative pose mapping first-camera coordinates to the second: ``X2 = R X1 + t``."""

    rotation: RotationMatrix
    translation: np.ndarray

    def __post_init__(self):
        if not isinstance(self.rotation, RotationMatrix):
            object.__setattr__(self, "rotation", RotationMatrix(self.rotation))
        object.__setattr__(self, "translation", _frozen(self.translation, (3,), "translation"))

    @classmethod
    def from_arrays(cls, R, t) -> Pose:
        return cls(RotationMatrix(R), t)

    @classmethod
    def identity(cls) -> Pose:
        return cls(RotationMatrix.identity(), np.zeros(3))

    @property
    def R(self) -> np.ndarray:
        return self.rotation.matrix

    @property
    def t(self) -> np.ndarray:
        return self.translation


@dataclass(frozen=True, eq=False)
class PlaneParams:
    """Plane ``normal . X + distance = 0``; the normal is rescaled to unit length."""

    normal: np.ndarray
    distance: float

    def __post_init__(self):
        n = np.array(self.normal, dtype=np.float64).reshape(3)
        d = float(self.distance)
        if not (np.all(np.isfinite(n)) and math.isfinite(d)):
            raise InvalidValue("plane has non-finite parameters")
        norm = math.sqrt(float(n @ n))
        if norm <= DEGENERACY_EPS:
            raise DegeneratePlane("plane normal has zero length")
        n = n / norm
        d = d / norm
        if abs(d) <= DEGENERACY_EPS:
            raise DegeneratePlane("plane passes through the first camera center")
        n.setflags(write=False)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "distance", d)

    @classmethod
    def through_point(cls, normal, point) -> PlaneParams:
        """Plane with the given normal containing ``point``."""
        n = np.asarray(normal, dtype=np.float64).reshape(3)
        n = n / np.linalg.norm(n)
        return cls(n, plane_distance_from_point(n, point))

    def signed_distance(self, point) -> float:
        return float(self.normal @ _xyz(point) + self.distance)


@dataclass(frozen=True)
class ImagePoint:
    u: float
    v: float

    def __post_init__(self):
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "v", float(self.v))
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise InvalidValue("image point has non-finite coordinates")

    def lift(self) -> np.ndarray:
        """Homogeneous lift ``[u, v, 1]``."""
        return np.array([self.u, self.v, 1.0])

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v])


@dataclass(frozen=True)
class ScenePoint:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)


def _xyz(point) -> np.ndarray:
    if isinstance(point, ScenePoint):
        return point.as_array()
    return np.asarray(point, dtype=np.float64).reshape(3)


@dataclass(frozen=True, eq=False)
class Homography:
    """Plane-induced point map between normalized image planes, defined up to scale."""

    matrix: np.ndarray

    def __post_init__(self):
        H = _frozen(self.matrix, (3, 3), "homography")
        if not np.linalg.norm(H) > 0.0:
            raise InvalidValue("homography is the zero matrix")
        object.__setattr__(self, "matrix", H)

    def transfer(self, p: ImagePoint) -> ImagePoint:
        return project(self.matrix @ p.lift())

    def __matmul__(self, other: Homography) -> Homography:
        return Homography(self.matrix @ other.matrix)


@dataclass(frozen=True)
class Intrinsics:
    fx: float
    fy: float
    cx: float = 0.0
    cy: float = 0.0
    skew: float = 0.0

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise InvalidValue("focal lengths must be positive")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.fx, self.skew, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])


@dataclass(frozen=True, eq=False)
class EssentialMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        E = _frozen(self.matrix, (3, 3), "essential matrix")
        sv = np.linalg.svd(E, compute_uv=False)
        if not sv[-1] < 1e-9 * sv[0]:
            raise InvalidValue("essential matrix is not rank 2")
        object.__setattr__(self, "matrix", E)

    def normalized(self) -> EssentialMatrix:
        """Same matrix scaled to unit Frobenius norm."""
        return EssentialMatrix(self.matrix / np.linalg.norm(self.matrix))

    def epipolar_line(self, p1: ImagePoint) -> np.ndarray:
        """Line ``l2 = E p1`` in the second image on which the match of ``p1`` lies."""
        return self.matrix @ p1.lift()

    def epipolar_line_first(self, p2: ImagePoint) -> np.ndarray:
        return self.matrix.T @ p2.lift()

    def epipoles(self) -> tuple[np.ndarray, np.ndarray]:
        """Homogeneous epipoles ``(e1, e2)`` with ``E e1 = 0`` and ``E^T e2 = 0``, unit norm."""
        U, _, Vt = np.linalg.svd(self.matrix)
        return Vt[-1], U[:, -1]


def homography_from_pose_plane(pose: Pose, plane: PlaneParams) -> Homography:
    """Homography ``H = R - t n^T / d`` induced by ``plane`` between the two views."""
    d = plane.distance
    if abs(d) <= DEGENERACY_EPS:
        raise DegeneratePlane("plane passes through the first camera center")
    return Homography(pose.R - np.outer(pose.t, plane.normal) / d)


def project(h) -> ImagePoint:
    """Dehomogenize a 3-vector."""
    x, y, w = np.asarray(h, dtype=np.float64).reshape(3)
    if abs(w) <= DEGENERACY_EPS:
        raise PointAtInfinity("homogeneous scale is zero")
    return ImagePoint(x / w, y / w)


def plane_distance_from_point(normal, x) -> float:
    """Offset ``d = -(n . X)`` of the plane with unit normal ``n`` through ``X``."""
    d = -float(np.asarray(normal, dtype=np.float64).reshape(3) @ _xyz(x))
    if abs(d) < DEGENERACY_EPS:
        raise DegeneratePlane("plane passes through the first camera center")
    return d


def normalize_pixel(k: Intrinsics, pixel: ImagePoint) -> ImagePoint:
    # Triangular back-substitution, no explicit inverse.
    y = (pixel.v - k.cy) / k.fy
    x = (pixel.u - k.cx - k.skew * y) / k.fx
    return ImagePoint(x, y)


def denormalize_pixel(k: Intrinsics, point: ImagePoint) -> ImagePoint:
    return ImagePoint(k.fx * point.u + k.skew * point.v + k.cx, k.fy * point.v + k.cy)


def essential_from_pose(pose: Pose) -> EssentialMatrix:
    """``E = [t]x R``; requires a nonzero baseline."""
    if np.linalg.norm(pose.t) <= DEGENERACY_EPS:
        raise ZeroTranslation("essential matrix undefined for zero translation")
    return EssentialMatrix(skew(pose.t) @ pose.R)


def epipolar_residual(E: EssentialMatrix, p1: ImagePoint, p2: ImagePoint) -> float:
    """Algebraic residual ``p2^T E p1`` with ``E`` scaled to unit Frobenius norm."""
    En = E.matrix / np.linalg.norm(E.matrix)
    return float(p2.lift() @ En @ p1.lift())


def compose_poses(first: Pose, second: Pose) -> Pose:
    """Pose of camera 3 relative to camera 1 given 1->2 (``first``) and 2->3 (``second``)."""
    R = second.R @ first.R
    t = second.R @ first.t + second.t
    return Pose(RotationMatrix(R), t)


def transform_plane(pose: Pose, plane: PlaneParams) -> PlaneParams:
    """Express a first-camera plane in the second camera's frame."""
    n2 = pose.R @ plane.normal
    return PlaneParams(n2, plane.distance - float(n2 @ pose.t))

