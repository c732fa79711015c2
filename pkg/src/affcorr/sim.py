"""Deterministic synthetic two-view scenes.

Random numbers come from numpy's PCG64 bit generator, seeded with
``SeedSequence(seed, spawn_key=(index,))``, and are drawn only through
``Generator.random()``. That pins the stream for a given ``(seed, index)``
independently of platform, of how many scenes are generated and of the
order in which they are generated.

Planes are stored facing the first camera: ``n . X < 0`` for visible
points, so ``d = -(n . X) > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .affine import affine_elementwise, denominator_s
from .errors import AffCorrError, ExhaustedRejection, InvalidValue
from .geometry import ImagePoint, PlaneParams, Pose, RotationMatrix, ScenePoint, plane_distance_from_point
from .records import CorrespondenceRecord

MAX_ATTEMPTS = 10_000
# Point draws tried on one pose/plane before the pose/plane is redrawn.
_POINT_TRIES = 50
MIN_ABS_S = 0.1


@dataclass(frozen=True)
class SimConfig:
    """Sampling bounds. Angles are radians; ``fov`` is the half-width of the
    square window, in normalized coordinates, that ``p1`` is drawn from."""

    seed: int = 0
    scenes: int = 1
    points: int = 1
    rotation_bound: float = 0.5
    translation_bound: float = 1.0
    translation_min: float = 0.0
    depth_range: tuple[float, float] = (0.5, 20.0)
    normal_cone: float = 1.0
    fov: float = 0.5

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise InvalidValue("seed must be an unsigned 64-bit integer")
        if self.scenes < 0 or self.points < 0:
            raise InvalidValue("scene and point counts must be non-negative")
        if self.rotation_bound < 0 or self.normal_cone < 0:
            raise InvalidValue("angle bounds must be non-negative")
        if not 0 <= self.translation_min <= self.translation_bound:
            raise InvalidValue("need 0 <= translation_min <= translation_bound")
        lo, hi = self.depth_range
        if not 0.1 < lo < hi < 100:
            raise InvalidValue("depth range must satisfy 0.1 < min < max < 100")
        if self.normal_cone >= math.pi / 2:
            raise InvalidValue("normal cone half-angle must be below pi/2")
        if not self.fov > 0:
            raise InvalidValue("fov must be positive")


@dataclass(frozen=True)
class PointSample:
    X: ScenePoint
    p1: ImagePoint
    p2: ImagePoint


@dataclass(frozen=True, eq=False)
class SceneSample:
    pose: Pose
    plane: PlaneParams
    points: list[PointSample] = field(default_factory=list)
    seed: int = 0
    index: int = 0

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "index": self.index,
            "R": self.pose.R.ravel().tolist(),
            "t": self.pose.t.tolist(),
            "n": self.plane.normal.tolist(),
            "d": self.plane.distance,
            "points": [
                {"X": [pt.X.x, pt.X.y, pt.X.z], "p1": [pt.p1.u, pt.p1.v], "p2": [pt.p2.u, pt.p2.v]}
                for pt in self.points
            ],
        }


def scene_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _unit_vector(rng: np.random.Generator) -> np.ndarray:
    z = 2.0 * rng.random() - 1.0
    phi = 2.0 * math.pi * rng.random()
    r = math.sqrt(max(0.0, 1.0 - z * z))
    return np.array([r * math.cos(phi), r * math.sin(phi), z])


def _sample_pose_plane(cfg: SimConfig, rng: np.random.Generator) -> tuple[Pose, PlaneParams]:
    axis = _unit_vector(rng)
    R = RotationMatrix.from_axis_angle(axis, cfg.rotation_bound * rng.random())
    direction = _unit_vector(rng)
    length = cfg.translation_min + (cfg.translation_bound - cfg.translation_min) * rng.random()
    t = direction * length

    # Normal within the cone around -z, i.e. facing the first camera.
    cos_theta = 1.0 - rng.random() * (1.0 - math.cos(cfg.normal_cone))
    sin_theta = math.sqrt(max(0.0, 1.0 - cos_theta * cos_theta))
    phi = 2.0 * math.pi * rng.random()
    n = np.array([sin_theta * math.cos(phi), sin_theta * math.sin(phi), -cos_theta])
    lo, hi = cfg.depth_range
    anchor = np.array([0.0, 0.0, lo + (hi - lo) * rng.random()])
    return Pose(R, t), PlaneParams(n, plane_distance_from_point(n, anchor))


def _sample_point(cfg: SimConfig, pose: Pose, plane: PlaneParams, rng: np.random.Generator) -> PointSample | None:
    u = cfg.fov * (2.0 * rng.random() - 1.0)
    v = cfg.fov * (2.0 * rng.random() - 1.0)
    p1 = ImagePoint(u, v)
    ray = p1.lift()
    denom = float(plane.normal @ ray)
    if denom == 0.0:
        return None
    depth = -plane.distance / denom
    lo, hi = cfg.depth_range
    if not lo <= depth <= hi:
        return None
    X = depth * ray
    if not abs(float(plane.normal @ X) + plane.distance) < 1e-12:
        return None
    # Second-camera point scaled by 1/depth; its third coordinate is z2/z1.
    x2 = pose.R @ ray + pose.t / depth
    if not x2[2] > MIN_ABS_S:
        return None
    try:
        if not abs(denominator_s(pose, plane, p1)) > MIN_ABS_S:
            return None
    except AffCorrError:
        return None
    p2 = ImagePoint(x2[0] / x2[2], x2[1] / x2[2])
    return PointSample(ScenePoint(*X.tolist()), p1, p2)


def generate_scene(cfg: SimConfig, index: int) -> SceneSample:
    """Scene ``index`` of the stream defined by ``cfg.seed``; pure in ``(cfg, index)``."""
    rng = scene_rng(cfg.seed, index)
    attempts = 0
    while attempts < MAX_ATTEMPTS:
        pose, plane = _sample_pose_plane(cfg, rng)
        points: list[PointSample] = []
        misses = 0
        while len(points) < cfg.points and misses < _POINT_TRIES and attempts < MAX_ATTEMPTS:
            attempts += 1
            pt = _sample_point(cfg, pose, plane, rng)
            if pt is None:
                misses += 1
            else:
                points.append(pt)
        if len(points) == cfg.points:
            return SceneSample(pose, plane, points, cfg.seed, index)
    raise ExhaustedRejection(f"no valid scene after {MAX_ATTEMPTS} attempts")


def generate_scenes(cfg: SimConfig):
    for index in range(cfg.scenes):
        yield generate_scene(cfg, index)


def scene_to_records(sample: SceneSample) -> list[CorrespondenceRecord]:
    """One record per point with ground-truth ``A`` and ``s``."""
    records = []
    for pt in sample.points:
        res = affine_elementwise(sample.pose, sample.plane, pt.p1)
        records.append(
            CorrespondenceRecord(
                R=tuple(sample.pose.R.ravel().tolist()),
                t=tuple(sample.pose.t.tolist()),
                n=tuple(sample.plane.normal.tolist()),
                d=sample.plane.distance,
                p1=(pt.p1.u, pt.p1.v),
                p2=(pt.p2.u, pt.p2.v),
                A=res.affine.entries(),
                s=res.s,
            )
        )
    return records
