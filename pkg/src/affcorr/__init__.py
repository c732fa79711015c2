"""Local affine transformations between two calibrated views."""

from .affine import (
    AffineDecomposition,
    AffineMap,
    AffineResult,
    affine_elementwise,
    affine_from_homography,
    affine_unified,
    denominator_s,
    pure_rotation_affine,
    pure_translation_affine,
    stereo_affine,
    stereo_affine_at_point,
)
from .geometry import (
    EssentialMatrix,
    Homography,
    ImagePoint,
    Intrinsics,
    PlaneParams,
    Pose,
    RotationMatrix,
    ScenePoint,
    compose_poses,
    denormalize_pixel,
    essential_from_pose,
    epipolar_residual,
    homography_from_pose_plane,
    normalize_pixel,
    plane_distance_from_point,
    project,
    transform_plane,
)
from .inverse import AffineCorrespondence, NormalEstimate, estimate_normal
from .oracle import FiniteDiffConfig, fd_jacobian, transfer_via_3d
from .records import CorrespondenceRecord
from .sim import SceneSample, SimConfig, generate_scene, scene_to_records

__version__ = "0.1.0"
