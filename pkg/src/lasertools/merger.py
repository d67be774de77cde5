"""Merge several planar scans into one scan in a destination frame.

Every input is expanded to points, re-expressed in the destination frame,
and the union is flattened and re-binned as if measured from the
destination origin. Occlusions at the destination viewpoint are not
modelled, and neither is the height of the source points: anything any
input saw ends up in the merged scan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PointCloud3, ScanGeometry, check_frame
from .errors import FrameError
from .scan_convert import points_to_scan, scan_to_points, transform_cloud
from .tf_tree import TransformTree


@dataclass(frozen=True)
class MergeConfig:
    """Merger settings.

    ``output_geometry=None`` derives the output layout from the inputs (see
    :func:`default_output_geometry`).
    """

    destination_frame: str
    inputs: tuple
    output_geometry: ScanGeometry | None = None
    emit_cloud: bool = False

    def __post_init__(self):
        check_frame(self.destination_frame)
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if not self.inputs:
            raise ValueError("merge needs at least one input")
        if len(set(self.inputs)) != len(self.inputs):
            raise ValueError(f"duplicate merge inputs in {list(self.inputs)}")


def default_output_geometry(scans) -> ScanGeometry:
    """Full circle at the finest input increment, spanning all range bounds."""
    return ScanGeometry.full_circle(
        min(s.angle_increment for s in scans),
        min(s.range_min for s in scans),
        max(s.range_max for s in scans),
    )


def merge_scans(scans, tree: TransformTree, cfg: MergeConfig, z_band=None):
    """Merge ``scans`` into ``cfg.destination_frame``.

    Returns ``(scan, cloud, stats)``. ``cloud`` holds the transformed input
    points with their true heights (before flattening) when
    ``cfg.emit_cloud`` is set, otherwise ``None``. ``z_band`` is passed on
    to :func:`points_to_scan` and is off by default.
    """
    scans = list(scans)
    if not scans:
        raise ValueError("no scans to merge")
    dest = cfg.destination_frame
    # resolve every frame before doing any work
    transforms = []
    for k, s in enumerate(scans):
        if not tree.connected(s.frame, dest):
            raise FrameError(
                f"scan {k} ({cfg.inputs[k] if k < len(cfg.inputs) else '?'}) is in frame "
                f"{s.frame!r}, which cannot be resolved to {dest!r}"
            )
        transforms.append(tree.lookup(s.frame, dest))

    parts = [transform_cloud(scan_to_points(s), t, dest).points
             for s, t in zip(scans, transforms)]
    cloud = PointCloud3(dest, np.concatenate(parts) if parts else np.empty((0, 3)))
    geom = cfg.output_geometry or default_output_geometry(scans)
    merged, stats = points_to_scan(cloud, geom, dest, z_band=z_band)
    return merged, (cloud if cfg.emit_cloud else None), stats
