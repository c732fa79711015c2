import math

import numpy as np
import pytest

from affcorr import (
    EssentialMatrix,
    Homography,
    ImagePoint,
    Intrinsics,
    PlaneParams,
    Pose,
    RotationMatrix,
    ScenePoint,
    denormalize_pixel,
    essential_from_pose,
    epipolar_residual,
    homography_from_pose_plane,
    normalize_pixel,
    plane_distance_from_point,
    project,
)
from affcorr.errors import DegeneratePlane, InvalidRotation, InvalidValue, PointAtInfinity, ZeroTranslation

from conftest import random_rotation


class TestTypes:
    def test_rotation_rejects_non_orthonormal(self):
        with pytest.raises(InvalidRotation):
            RotationMatrix(np.diag([1.0, 1.0, 1.1]))

    def test_rotation_rejects_reflection(self):
        with pytest.raises(InvalidRotation):
            RotationMatrix(np.diag([1.0, 1.0, -1.0]))

    def test_rotation_zero_angle_is_exact_identity(self):
        R = RotationMatrix.from_axis_angle([0.3, -1.0, 2.0], 0.0)
        assert np.array_equal(R.matrix, np.eye(3))

    def test_pose_rejects_nan_translation(self):
        with pytest.raises(InvalidValue):
            Pose.from_arrays(np.eye(3), [0.0, np.nan, 0.0])

    def test_plane_normalized_jointly(self):
        plane = PlaneParams([0.0, 0.0, 2.0], 4.0)
        np.testing.assert_array_equal(plane.normal, [0.0, 0.0, 1.0])
        assert plane.distance == 2.0
        assert abs(np.linalg.norm(PlaneParams([1.0, 2.0, -3.0], 1.0).normal) - 1.0) < 1e-12

    @pytest.mark.parametrize("d", [0.0, 1e-13])
    def test_plane_through_center(self, d):
        with pytest.raises(DegeneratePlane):
            PlaneParams([0.0, 0.0, 1.0], d)

    def test_values_are_immutable(self):
        plane = PlaneParams([0.0, 0.0, 1.0], 1.0)
        with pytest.raises(ValueError):
            plane.normal[0] = 3.0
        with pytest.raises(AttributeError):
            plane.distance = 2.0

    def test_zero_homography(self):
        with pytest.raises(InvalidValue):
            Homography(np.zeros((3, 3)))

    def test_essential_rank(self):
        with pytest.raises(InvalidValue):
            EssentialMatrix(np.eye(3))

    def test_intrinsics_focal(self):
        with pytest.raises(InvalidValue):
            Intrinsics(0.0, 1.0)


class TestHomography:
    def test_stereo_example(self):
        pose = Pose.from_arrays(np.eye(3), [1.0, 0.0, 0.0])
        H = homography_from_pose_plane(pose, PlaneParams([0, 0, 1], 2.0)).matrix
        expected = np.eye(3)
        expected[0, 2] = -0.5
        np.testing.assert_array_equal(H, expected)

    def test_zero_translation_gives_identity(self, rng):
        plane = PlaneParams(rng.normal(size=3), 3.0)
        H = homography_from_pose_plane(Pose.identity(), plane).matrix
        np.testing.assert_array_equal(H, np.eye(3))

    def test_entries_match_formula(self, rng):
        R = random_rotation(rng)
        t = rng.normal(size=3)
        plane = PlaneParams(rng.normal(size=3), 1.7)
        H = homography_from_pose_plane(Pose(R, t), plane).matrix
        for i in range(3):
            for j in range(3):
                assert H[i, j] == R.matrix[i, j] - t[i] * plane.normal[j] / plane.distance

    def test_transfer_matches_3d_projection(self, scene_pool):
        # Points sampled on the plane and moved rigidly; independent of H.
        for sc in scene_pool[:100]:
            H = homography_from_pose_plane(sc.pose, sc.plane)
            for pt in sc.points:
                X2 = sc.pose.R @ pt.X.as_array() + sc.pose.t
                direct = project(X2)
                got = H.transfer(pt.p1)
                assert abs(got.u - direct.u) < 1e-9 and abs(got.v - direct.v) < 1e-9

    def test_transfer_twenty_points_per_scene(self, rng):
        for _ in range(20):
            R = random_rotation(rng, 0.4)
            t = rng.uniform(-0.5, 0.5, size=3)
            n = np.array([*rng.uniform(-0.4, 0.4, size=2), -1.0])
            X0 = np.array([0.0, 0.0, rng.uniform(3, 8)])
            plane = PlaneParams.through_point(n, X0)
            H = homography_from_pose_plane(Pose(R, t), plane)
            # 20 points on the plane: offsets in its tangent directions.
            basis = np.linalg.svd(plane.normal[None, :])[2][1:]
            for a, b in rng.uniform(-1, 1, size=(20, 2)):
                X = X0 + a * basis[0] + b * basis[1]
                assert abs(plane.signed_distance(X)) < 1e-12
                expected = project(R.matrix @ X + t)
                got = H.transfer(project(X))
                assert abs(got.u - expected.u) < 1e-9 and abs(got.v - expected.v) < 1e-9

    def test_degenerate_plane(self):
        plane = PlaneParams([0, 0, 1], 1.0)
        object.__setattr__(plane, "distance", 0.0)
        with pytest.raises(DegeneratePlane):
            homography_from_pose_plane(Pose.identity(), plane)


class TestProject:
    def test_examples(self):
        assert project([2.0, 4.0, 2.0]) == ImagePoint(1.0, 2.0)
        assert project([0.3, -0.7, 1.0]) == ImagePoint(0.3, -0.7)

    def test_point_at_infinity(self):
        with pytest.raises(PointAtInfinity):
            project([1.0, 1.0, 0.0])


class TestPlaneDistance:
    @pytest.mark.parametrize(
        "n, X, d",
        [
            ([0, 0, 1], (0, 0, 5), -5.0),
            ([0, 0, 1], (3, -2, 5), -5.0),
            ([0.6, 0, 0.8], (1, 0, 1), -1.4),
        ],
    )
    def test_examples(self, n, X, d):
        assert plane_distance_from_point(n, ScenePoint(*X)) == pytest.approx(d, abs=1e-15)

    def test_point_lies_on_plane(self, rng):
        for _ in range(100):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            X = rng.uniform(-5, 5, size=3)
            plane = PlaneParams(n, plane_distance_from_point(n, X))
            assert abs(plane.signed_distance(X)) < 1e-12

    def test_plane_through_center(self):
        with pytest.raises(DegeneratePlane):
            plane_distance_from_point([0, 0, 1], (1.0, 1.0, 0.0))


class TestIntrinsics:
    def test_identity(self):
        assert normalize_pixel(Intrinsics(1.0, 1.0), ImagePoint(3.5, -2.0)) == ImagePoint(3.5, -2.0)

    def test_principal_point(self):
        k = Intrinsics(500.0, 500.0, 320.0, 240.0)
        assert normalize_pixel(k, ImagePoint(320, 240)) == ImagePoint(0.0, 0.0)
        assert normalize_pixel(k, ImagePoint(820, 240)) == ImagePoint(1.0, 0.0)

    def test_matches_matrix_inverse(self, rng):
        k = Intrinsics(700.0, 650.0, 300.0, 200.0, skew=3.0)
        px = ImagePoint(412.0, 93.0)
        expected = np.linalg.solve(k.matrix, [px.u, px.v, 1.0])
        got = normalize_pixel(k, px)
        np.testing.assert_allclose([got.u, got.v], expected[:2], rtol=0, atol=1e-15)

    def test_round_trip(self, rng):
        for _ in range(1000):
            k = Intrinsics(*rng.uniform(100, 2000, size=2), *rng.uniform(0, 1000, size=2), rng.uniform(-5, 5))
            p = ImagePoint(*rng.uniform(-1.5, 1.5, size=2))
            back = normalize_pixel(k, denormalize_pixel(k, p))
            assert abs(back.u - p.u) < 1e-12 and abs(back.v - p.v) < 1e-12


class TestEssential:
    def test_example(self):
        E = essential_from_pose(Pose.from_arrays(np.eye(3), [1.0, 0.0, 0.0])).matrix
        np.testing.assert_array_equal(E, [[0, 0, 0], [0, 0, -1], [0, 1, 0]])

    def test_zero_translation(self):
        with pytest.raises(ZeroTranslation):
            essential_from_pose(Pose.identity())

    def test_residual_on_homography_correspondences(self, scene_pool):
        for sc in scene_pool:
            E = essential_from_pose(sc.pose)
            H = homography_from_pose_plane(sc.pose, sc.plane)
            for pt in sc.points:
                assert abs(epipolar_residual(E, pt.p1, H.transfer(pt.p1))) < 1e-9

    def test_scaled_translation_same_lines(self, rng):
        R = random_rotation(rng)
        t = rng.normal(size=3)
        E1 = essential_from_pose(Pose(R, t)).normalized()
        E2 = essential_from_pose(Pose(R, 3.7 * t)).normalized()
        np.testing.assert_allclose(E1.matrix, E2.matrix, atol=1e-14)
        p = ImagePoint(0.2, -0.1)
        l1, l2 = E1.epipolar_line(p), E2.epipolar_line(p)
        assert np.linalg.norm(np.cross(l1, l2)) < 1e-14

    def test_epipoles(self, rng):
        R = random_rotation(rng)
        t = rng.normal(size=3)
        E = essential_from_pose(Pose(R, t))
        e1, e2 = E.epipoles()
        np.testing.assert_allclose(E.matrix @ e1, 0, atol=1e-12)
        np.testing.assert_allclose(E.matrix.T @ e2, 0, atol=1e-12)
        # e2 is the image of the first camera center, i.e. t up to scale.
        assert np.linalg.norm(np.cross(e2, t)) < 1e-12 * np.linalg.norm(t)
