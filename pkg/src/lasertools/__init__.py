"""Merge planar laser scans and synthesize virtual scans from point clouds."""

from .core import (
    LaserScan,
    PointCloud3,
    RigidTransform,
    ScanGeometry,
    apply,
    beam_angle,
    compose,
    invert,
)
from .errors import ConfigError, FormatError, FrameError, LaserToolsError, TreeError
from .merger import MergeConfig, default_output_geometry, merge_scans
from .raycast import Scene, Wall, raycast_cloud, raycast_scan
from .scan_convert import DropStats, points_to_scan, scan_to_points, transform_cloud
from .tf_tree import TransformTree
from .virtualizer import VirtualizerConfig, virtualize

__all__ = [
    "ConfigError",
    "DropStats",
    "FormatError",
    "FrameError",
    "LaserScan",
    "LaserToolsError",
    "MergeConfig",
    "PointCloud3",
    "RigidTransform",
    "ScanGeometry",
    "Scene",
    "TransformTree",
    "TreeError",
    "VirtualizerConfig",
    "Wall",
    "apply",
    "beam_angle",
    "compose",
    "default_output_geometry",
    "invert",
    "merge_scans",
    "points_to_scan",
    "raycast_cloud",
    "raycast_scan",
    "scan_to_points",
    "transform_cloud",
    "virtualize",
]

__version__ = "0.1.0"
