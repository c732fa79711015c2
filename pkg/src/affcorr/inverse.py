"""Recover the tangent plane from one affine correspondence and a known pose.

With the unknown ``q = n / d`` every relation between the observed affine
map, the point match and the plane is linear in ``q``:

* affine rows (4):   ``w_i q_j - a_ij tz (p1 . q) = R_ij - p2_i R3j - a_ij (r3 . p1)``
* transfer rows (2): ``w_i (p1 . q)               = R_i . p1 - p2_i (r3 . p1)``

where ``w = t_xy - p2 tz`` and ``p1`` is the homogeneous lift. The stacked
6x3 system is solved in least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .affine import AffineMap
from .errors import DegenerateAffine, IllConditioned, PlaneBehindCamera, UninformativeTranslation
from .geometry import DEGENERACY_EPS, ImagePoint, PlaneParams, Pose

MAX_CONDITIONING = 1e10


@dataclass(frozen=True)
class AffineCorrespondence:
    p1: ImagePoint
    p2: ImagePoint
    affine: AffineMap

    def __post_init__(self):
        if not abs(self.affine.det()) > DEGENERACY_EPS:
            raise DegenerateAffine("affine map is singular")


@dataclass(frozen=True, eq=False)
class NormalEstimate:
    normal: np.ndarray
    distance: float
    residual: float
    conditioning: float

    @property
    def plane(self) -> PlaneParams:
        return PlaneParams(self.normal, self.distance)


def plane_system(pose: Pose, ac: AffineCorrespondence) -> tuple[np.ndarray, np.ndarray]:
    """Linear system ``M q = rhs`` in ``q = n / d``; four affine rows then two transfer rows."""
    R, t = pose.R, pose.t
    p = ac.p1.lift()
    p2 = ac.p2.as_array()
    a = ac.affine.matrix
    r3p = float(R[2] @ p)
    w = t[:2] - p2 * t[2]

    M = np.empty((6, 3))
    rhs = np.empty(6)
    k = 0
    for i in range(2):
        for j in range(2):
            M[k] = -a[i, j] * t[2] * p
            M[k, j] += w[i]
            rhs[k] = R[i, j] - p2[i] * R[2, j] - a[i, j] * r3p
            k += 1
    for i in range(2):
        M[k] = w[i] * p
        rhs[k] = R[i] @ p - p2[i] * r3p
        k += 1
    return M, rhs


def solve_plane_vector(pose: Pose, ac: AffineCorrespondence) -> tuple[np.ndarray, float, float]:
    """Least-squares ``q = n / d`` with its residual norm and singular-value ratio."""
    M, rhs = plane_system(pose, ac)
    q, _, _, sv = np.linalg.lstsq(M, rhs, rcond=None)
    conditioning = math.inf if sv[-1] == 0.0 else float(sv[0] / sv[-1])
    residual = float(np.linalg.norm(M @ q - rhs))
    return q, residual, conditioning


def estimate_normal(pose: Pose, ac: AffineCorrespondence) -> NormalEstimate:
    """Plane through the correspondence, oriented towards the first camera (``d > 0``)."""
    if np.linalg.norm(pose.t) <= DEGENERACY_EPS:
        raise UninformativeTranslation("without translation the affine map does not depend on the plane")
    q, residual, conditioning = solve_plane_vector(pose, ac)
    if not conditioning <= MAX_CONDITIONING:
        raise IllConditioned(f"conditioning {conditioning:.3g} exceeds {MAX_CONDITIONING:.0e}")
    # Ray p1 meets the plane at depth -1 / (q . p1); q is fixed by the data, so
    # flipping (n, d) together cannot change the sign.
    qp = float(q @ ac.p1.lift())
    if not qp < 0.0:
        raise PlaneBehindCamera("recovered plane is not in front of the first camera")
    norm = float(np.linalg.norm(q))
    normal = q / norm
    normal.setflags(write=False)
    return NormalEstimate(normal, 1.0 / norm, residual, conditioning)


def angular_error(n_est, n_true) -> float:
    """Angle in radians between two unit normals, robust for tiny angles."""
    a = np.asarray(n_est, dtype=np.float64)
    b = np.asarray(n_true, dtype=np.float64)
    return float(math.atan2(np.linalg.norm(np.cross(a, b)), float(a @ b)))
