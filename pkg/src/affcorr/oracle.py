"""Independent numerical checks for the closed-form affine maps.

Nothing here uses the closed-form derivative or the ``R - t n^T / d``
homography formula: the Jacobian is approximated by finite differences
of the point warp, and point transfer goes through explicit ray-plane
intersection in 3D.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .affine import AffineMap
from .errors import DegenerateDenominator, InvalidValue, NegativeDepth, RayParallelToPlane
from .geometry import DEGENERACY_EPS, Homography, ImagePoint, PlaneParams, Pose


@dataclass(frozen=True)
class FiniteDiffConfig:
    epsilon: float = 1e-6
    scheme: Literal["central", "forward"] = "central"

    def __post_init__(self):
        if not 1e-10 <= self.epsilon <= 1e-2:
            raise InvalidValue(f"epsilon {self.epsilon} outside [1e-10, 1e-2]")
        if self.scheme not in ("central", "forward"):
            raise InvalidValue(f"unknown finite-difference scheme {self.scheme!r}")


def _warp(H: np.ndarray, u: float, v: float) -> tuple[float, float]:
    w = H[2, 0] * u + H[2, 1] * v + H[2, 2]
    if not abs(w) > DEGENERACY_EPS * np.max(np.abs(H)):
        raise DegenerateDenominator(f"warp undefined at ({u}, {v})")
    return (H[0, 0] * u + H[0, 1] * v + H[0, 2]) / w, (H[1, 0] * u + H[1, 1] * v + H[1, 2]) / w


def fd_jacobian(h: Homography, p1: ImagePoint, cfg: FiniteDiffConfig = FiniteDiffConfig()) -> AffineMap:
    """Finite-difference Jacobian of the homography warp at ``p1``.

    Columns are derivatives with respect to ``u`` and ``v``. The central
    scheme has O(eps**2) truncation error, the forward scheme O(eps).
    """
    H, eps, u, v = h.matrix, cfg.epsilon, p1.u, p1.v
    if cfg.scheme == "central":
        fu_p, fu_m = _warp(H, u + eps, v), _warp(H, u - eps, v)
        fv_p, fv_m = _warp(H, u, v + eps), _warp(H, u, v - eps)
        step = 2.0 * eps
    else:
        fu_m = fv_m = _warp(H, u, v)
        fu_p, fv_p = _warp(H, u + eps, v), _warp(H, u, v + eps)
        step = eps
    return AffineMap(
        (fu_p[0] - fu_m[0]) / step,
        (fv_p[0] - fv_m[0]) / step,
        (fu_p[1] - fu_m[1]) / step,
        (fv_p[1] - fv_m[1]) / step,
    )


def transfer_via_3d(pose: Pose, plane: PlaneParams, p1: ImagePoint) -> ImagePoint:
    """Back-project ``p1`` onto the plane, move the point into camera 2, project it."""
    ray = p1.lift()
    denom = float(plane.normal @ ray)
    if abs(denom) <= DEGENERACY_EPS:
        raise RayParallelToPlane("viewing ray does not meet the plane")
    depth = -plane.distance / denom
    if depth <= 0.0:
        raise NegativeDepth("plane intersection is behind the first camera")
    X2 = pose.R @ (depth * ray) + pose.t
    if X2[2] <= 0.0:
        raise NegativeDepth("scene point is behind the second camera")
    return ImagePoint(X2[0] / X2[2], X2[1] / X2[2])


def relative_error(approx: AffineMap, exact: AffineMap) -> float:
    """Largest entrywise difference, scaled by ``max(1, ||exact||_inf)``."""
    a, e = np.array(approx.entries()), np.array(exact.entries())
    scale = max(1.0, float(np.max(np.sum(np.abs(exact.matrix), axis=1))))
    return float(np.max(np.abs(a - e))) / scale
