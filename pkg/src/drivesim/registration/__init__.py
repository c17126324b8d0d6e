"""LiDAR-based ego pose correction by point-cloud registration."""

from .cloud import (DynamicBox, FrameAnnotations, PointCloud, load_annotations,
                    load_cloud, save_annotations, save_cloud)
from .register import (ACCEPT_CD, CD_TOL, GROUND_MARGIN, MAX_ITERS,
                       RegistrationResult, chamfer_distance, correct_sequence,
                       filter_frame, register_frame)

__all__ = [
    "PointCloud", "DynamicBox", "FrameAnnotations",
    "load_cloud", "save_cloud", "load_annotations", "save_annotations",
    "chamfer_distance", "filter_frame", "register_frame", "correct_sequence",
    "RegistrationResult",
    "GROUND_MARGIN", "CD_TOL", "MAX_ITERS", "ACCEPT_CD",
]
