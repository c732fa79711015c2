import numpy as np
import pytest

from affcorr import (
    FiniteDiffConfig,
    Homography,
    ImagePoint,
    PlaneParams,
    Pose,
    affine_from_homography,
    fd_jacobian,
    homography_from_pose_plane,
    transfer_via_3d,
)
from affcorr.errors import DegenerateDenominator, InvalidValue, NegativeDepth, RayParallelToPlane
from affcorr.oracle import relative_error

ORIGIN = ImagePoint(0.0, 0.0)


def test_config_bounds():
    FiniteDiffConfig(1e-10)
    FiniteDiffConfig(1e-2, "forward")
    for bad in (1e-11, 0.1):
        with pytest.raises(InvalidValue):
            FiniteDiffConfig(bad)
    with pytest.raises(InvalidValue):
        FiniteDiffConfig(1e-6, "backward")


class TestFiniteDifferences:
    @pytest.mark.parametrize("scheme", ["central", "forward"])
    def test_identity(self, rng, scheme):
        for p in rng.uniform(-1, 1, size=(10, 2)):
            a = fd_jacobian(Homography(np.eye(3)), ImagePoint(*p), FiniteDiffConfig(scheme=scheme))
            np.testing.assert_allclose(a.entries(), [1, 0, 0, 1], atol=1e-10)

    def test_affine_warp(self, rng):
        for p in rng.uniform(-1, 1, size=(10, 2)):
            a = fd_jacobian(Homography(np.diag([2.0, 1.0, 1.0])), ImagePoint(*p))
            np.testing.assert_allclose(a.entries(), [2, 0, 0, 1], atol=1e-10)

    def test_agrees_with_closed_form(self, scene_pool):
        for sc in scene_pool:
            H = homography_from_pose_plane(sc.pose, sc.plane)
            for pt in sc.points:
                exact = affine_from_homography(H, pt.p1).affine
                assert relative_error(fd_jacobian(H, pt.p1), exact) < 1e-6

    def test_forward_is_first_order(self, scene_pool):
        sc = scene_pool[0]
        H = homography_from_pose_plane(sc.pose, sc.plane)
        p = sc.points[0].p1
        exact = affine_from_homography(H, p).affine
        e1 = relative_error(fd_jacobian(H, p, FiniteDiffConfig(1e-3, "forward")), exact)
        e2 = relative_error(fd_jacobian(H, p, FiniteDiffConfig(5e-4, "forward")), exact)
        assert 1.5 < e1 / e2 < 2.5

    def test_central_convergence_order(self, scene_pool):
        # Halving eps should cut the error ~4x while truncation dominates.
        ratios = []
        for sc in scene_pool[:40]:
            H = homography_from_pose_plane(sc.pose, sc.plane)
            p = sc.points[0].p1
            exact = np.array(affine_from_homography(H, p).affine.entries())
            eps = 2e-2 / 2
            prev = None
            while eps > 1e-5:
                err = np.max(np.abs(np.array(fd_jacobian(H, p, FiniteDiffConfig(eps)).entries()) - exact))
                if prev is not None and err > 1e-8:
                    ratios.append(prev / err)
                prev = err
                eps /= 2
        ratios = np.array(ratios)
        assert len(ratios) > 40
        assert np.all((ratios >= 3) & (ratios <= 5)), ratios[(ratios < 3) | (ratios > 5)]

    def test_degenerate_sample(self):
        # The line s = 0 passes just beside p1.
        H = Homography([[1.0, 0, 0], [0, 1.0, 0], [1.0, 0, 1e-7]])
        with pytest.raises(DegenerateDenominator):
            fd_jacobian(H, ImagePoint(-1e-7 + 1e-6, 0.0), FiniteDiffConfig(1e-6))

    @pytest.mark.parametrize("lam", [-3.0, 0.01, 7.0])
    def test_scale_invariance(self, scene_pool, lam):
        sc = scene_pool[5]
        H = homography_from_pose_plane(sc.pose, sc.plane)
        for pt in sc.points:
            a = fd_jacobian(H, pt.p1).entries()
            b = fd_jacobian(Homography(lam * H.matrix), pt.p1).entries()
            # Both carry ~1e-10 round-off from the difference quotient.
            np.testing.assert_allclose(a, b, rtol=0, atol=1e-9)


class TestTransfer3D:
    def test_identity(self):
        assert transfer_via_3d(Pose.identity(), PlaneParams([0, 0, 1], -5.0), ORIGIN) == ORIGIN

    def test_baseline(self):
        pose = Pose.from_arrays(np.eye(3), [0.5, 0, 0])
        p2 = transfer_via_3d(pose, PlaneParams([0, 0, 1], -2.0), ORIGIN)
        assert p2 == ImagePoint(0.25, 0.0)

    def test_matches_homography(self, scene_pool):
        for sc in scene_pool:
            H = homography_from_pose_plane(sc.pose, sc.plane)
            for pt in sc.points:
                a, b = transfer_via_3d(sc.pose, sc.plane, pt.p1), H.transfer(pt.p1)
                assert abs(a.u - b.u) < 1e-9 and abs(a.v - b.v) < 1e-9

    @pytest.mark.parametrize("lam", [-3.0, 0.01, 7.0])
    def test_homography_transfer_scale_invariance(self, scene_pool, lam):
        sc = scene_pool[9]
        H = homography_from_pose_plane(sc.pose, sc.plane)
        for pt in sc.points:
            a, b = H.transfer(pt.p1), Homography(lam * H.matrix).transfer(pt.p1)
            assert abs(a.u - b.u) < 1e-12 and abs(a.v - b.v) < 1e-12

    def test_ray_parallel(self):
        with pytest.raises(RayParallelToPlane):
            transfer_via_3d(Pose.identity(), PlaneParams([1, 0, 0], 1.0), ORIGIN)

    def test_behind_first_camera(self):
        with pytest.raises(NegativeDepth):
            transfer_via_3d(Pose.identity(), PlaneParams([0, 0, 1], 5.0), ORIGIN)

    def test_behind_second_camera(self):
        pose = Pose.from_arrays(np.eye(3), [0, 0, -10.0])
        with pytest.raises(NegativeDepth):
            transfer_via_3d(pose, PlaneParams([0, 0, 1], -5.0), ORIGIN)
