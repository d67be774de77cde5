"""Synthesize planar scans from a 3D cloud at arbitrary virtual frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LaserScan, PointCloud3, ScanGeometry, check_frame
from .errors import FrameError
from .scan_convert import DropStats, bin_xy
from .tf_tree import TransformTree


@dataclass(frozen=True)
class VirtualizerConfig:
    base_frame: str
    virtual_frames: tuple
    output_geometry: ScanGeometry
    combined_output: bool = False

    def __post_init__(self):
        check_frame(self.base_frame)
        frames = tuple(self.virtual_frames)
        if not frames:
            raise ValueError("at least one virtual frame is required")
        for f in frames:
            check_frame(f)
        dupes = sorted({f for f in frames if frames.count(f) > 1})
        if dupes:
            raise ValueError(f"duplicate virtual frames: {dupes}")
        object.__setattr__(self, "virtual_frames", frames)


def check_frames(cloud_frame, tree: TransformTree, cfg: VirtualizerConfig):
    """Raise FrameError unless every virtual frame is reachable from the cloud."""
    missing = [v for v in cfg.virtual_frames if not tree.connected(cloud_frame, v)]
    if missing:
        raise FrameError(
            f"cannot resolve virtual frame(s) {missing} from cloud frame {cloud_frame!r}"
        )


def virtualize(cloud: PointCloud3, tree: TransformTree, cfg: VirtualizerConfig, z_band=None):
    """One scan per virtual frame, in config order.

    Returns a list of ``(frame, scan, stats)``. All frames are resolved up
    front, so nothing is produced if any of them is unreachable.
    """
    check_frames(cloud.frame, tree, cfg)
    lookups = [(v, tree.lookup(cloud.frame, v)) for v in cfg.virtual_frames]
    geom = cfg.output_geometry
    pts = cloud.points
    out = []
    for v, t in lookups:
        # only the rows of the transform that the flattening needs
        rot = t.rotation_matrix()
        x = pts @ rot[0] + t.translation[0]
        y = pts @ rot[1] + t.translation[1]
        z_drop = 0
        if z_band is not None:
            z = pts @ rot[2] + t.translation[2]
            keep = (z >= z_band[0]) & (z <= z_band[1])
            z_drop = int(keep.size - np.count_nonzero(keep))
            x, y = x[keep], y[keep]
        ranges, stats = bin_xy(x, y, geom)
        if z_drop:
            stats = stats + DropStats(z_band=z_drop)
        out.append((v, LaserScan.from_geometry(v, geom, ranges), stats))
    return out
