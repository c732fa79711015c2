import numpy as np
import pytest

from affcorr import (
    AffineCorrespondence,
    AffineMap,
    ImagePoint,
    PlaneParams,
    Pose,
    affine_elementwise,
    estimate_normal,
)
from affcorr.errors import DegenerateAffine, PlaneBehindCamera, UninformativeTranslation
from affcorr.inverse import angular_error, plane_system, solve_plane_vector

from conftest import random_rotation, scenes

ORIGIN = ImagePoint(0.0, 0.0)


def correspondence(sc, pt, pose=None):
    res = affine_elementwise(pose or sc.pose, sc.plane, pt.p1)
    return AffineCorrespondence(pt.p1, res.p2, res.affine)


def test_singular_affine_rejected():
    with pytest.raises(DegenerateAffine):
        AffineCorrespondence(ORIGIN, ORIGIN, AffineMap(1.0, 2.0, 2.0, 4.0))


def test_system_is_satisfied_by_truth(scene_pool):
    for sc in scene_pool[:50]:
        q = sc.plane.normal / sc.plane.distance
        M, rhs = plane_system(sc.pose, correspondence(sc, sc.points[0]))
        np.testing.assert_allclose(M @ q, rhs, atol=1e-13)


def test_round_trip(scene_pool):
    for sc in scene_pool:
        if np.linalg.norm(sc.pose.t) < 0.1:
            continue
        for pt in sc.points:
            est = estimate_normal(sc.pose, correspondence(sc, pt))
            assert angular_error(est.normal, sc.plane.normal) < 1e-6
            assert abs(est.distance - sc.plane.distance) / sc.plane.distance < 1e-6
            assert est.residual < 1e-10
            assert abs(np.linalg.norm(est.normal) - 1) < 1e-12


def test_stereo_example_plane_vector():
    pose = Pose.from_arrays(np.eye(3), [0.5, 0.0, 0.0])
    ac = AffineCorrespondence(ORIGIN, ImagePoint(-0.2, 0.0), AffineMap(0.85, 0.0, 0.0, 1.0))
    q, residual, _ = solve_plane_vector(pose, ac)
    assert q[1] == pytest.approx(0.0, abs=1e-15)
    assert q[0] == pytest.approx(0.3, abs=1e-14)
    # The transfer rows pin q_z, which the affine rows cannot see when tz = 0.
    assert q[2] == pytest.approx(0.4, abs=1e-14)
    assert residual < 1e-14
    # That plane (0.6 x + 0.8 z + 2 = 0) lies behind the first camera at p1.
    with pytest.raises(PlaneBehindCamera):
        estimate_normal(pose, ac)


def test_stereo_plane_in_front():
    pose = Pose.from_arrays(np.eye(3), [0.5, 0.0, 0.0])
    plane = PlaneParams([0.6, 0.0, -0.8], 2.0)
    res = affine_elementwise(pose, plane, ORIGIN)
    est = estimate_normal(pose, AffineCorrespondence(ORIGIN, res.p2, res.affine))
    np.testing.assert_allclose(est.normal, [0.6, 0.0, -0.8], atol=1e-14)
    assert est.distance == pytest.approx(2.0, rel=1e-14)


def test_pure_rotation_uninformative(rng):
    pose = Pose(random_rotation(rng, 0.3), np.zeros(3))
    res = affine_elementwise(pose, PlaneParams([0, 0, -1], 3.0), ORIGIN)
    with pytest.raises(UninformativeTranslation):
        estimate_normal(pose, AffineCorrespondence(ORIGIN, res.p2, res.affine))


def test_orientation_convention(scene_pool):
    sc = scene_pool[0]
    est = estimate_normal(sc.pose, correspondence(sc, sc.points[0]))
    X = sc.points[0].X.as_array()
    assert est.distance > 0 and est.normal @ X < 0


def test_scale_consistency(scene_pool):
    for sc in scene_pool[:50]:
        if np.linalg.norm(sc.pose.t) < 0.1:
            continue
        pt = sc.points[0]
        ac = correspondence(sc, pt)
        for lam in (0.25, 3.0):
            scaled_pose = Pose(sc.pose.rotation, lam * sc.pose.t)
            scaled_plane = PlaneParams(sc.plane.normal, lam * sc.plane.distance)
            # A is unchanged when t and d scale together.
            b = affine_elementwise(scaled_pose, scaled_plane, pt.p1).affine
            np.testing.assert_allclose(b.entries(), ac.affine.entries(), rtol=0, atol=1e-13)
            est = estimate_normal(scaled_pose, ac)
            assert angular_error(est.normal, sc.plane.normal) < 1e-9
            assert est.distance == pytest.approx(lam * sc.plane.distance, rel=1e-9)


def test_noise_monotonicity():
    pool = scenes(500, seed=77, translation_min=0.1)
    rng = np.random.default_rng(5)
    medians = []
    for level in (1e-6, 1e-4, 1e-2):
        errors = []
        for sc in pool:
            pt = sc.points[0]
            res = affine_elementwise(sc.pose, sc.plane, pt.p1)
            noisy = AffineMap(*(np.array(res.affine.entries()) + level * rng.normal(size=4)))
            try:
                est = estimate_normal(sc.pose, AffineCorrespondence(pt.p1, res.p2, noisy))
                errors.append(angular_error(est.normal, sc.plane.normal))
            except PlaneBehindCamera:
                errors.append(np.pi)
        medians.append(float(np.median(errors)))
    assert medians[0] <= medians[1] <= medians[2], medians
