"""Exact raycasting against vertical wall segments.

Used to synthesise ground-truth scans and multi-plane clouds. Every range is
a closed-form ray/segment intersection, so results carry no discretisation
error of their own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import LaserScan, PointCloud3, RigidTransform, ScanGeometry

PARALLEL_EPS = 1e-12


@dataclass(frozen=True)
class Wall:
    """Vertical rectangle over the segment ``p0 -> p1`` between two heights."""

    p0: tuple
    p1: tuple
    z_lo: float
    z_hi: float

    def __post_init__(self):
        p0 = tuple(float(v) for v in self.p0)
        p1 = tuple(float(v) for v in self.p1)
        if len(p0) != 2 or len(p1) != 2:
            raise ValueError("wall endpoints must be (x, y) pairs")
        vals = p0 + p1 + (float(self.z_lo), float(self.z_hi))
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"wall coordinates must be finite: {vals}")
        if math.hypot(p1[0] - p0[0], p1[1] - p0[1]) <= 1e-9:
            raise ValueError(f"degenerate wall {p0} -> {p1}")
        if not float(self.z_lo) < float(self.z_hi):
            raise ValueError(f"wall needs z_lo < z_hi, got {self.z_lo}, {self.z_hi}")
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "z_lo", float(self.z_lo))
        object.__setattr__(self, "z_hi", float(self.z_hi))


@dataclass(frozen=True)
class Scene:
    walls: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(self.walls))

    def __add__(self, other: Scene) -> Scene:
        return Scene(self.walls + other.walls)

    @classmethod
    def box(cls, x_min, y_min, x_max, y_max, z_lo, z_hi) -> Scene:
        """Four walls around an axis-aligned rectangle."""
        c = [(x_min, y_min), (x_max, y_min), (x_max, y_max), (x_min, y_max)]
        return cls(tuple(Wall(c[i], c[(i + 1) % 4], z_lo, z_hi) for i in range(4)))

    def arrays(self):
        if not self.walls:
            e = np.empty((0, 2))
            return e, e, np.empty(0), np.empty(0)
        p0 = np.array([w.p0 for w in self.walls])
        p1 = np.array([w.p1 for w in self.walls])
        z = np.array([(w.z_lo, w.z_hi) for w in self.walls])
        return p0, p1, z[:, 0], z[:, 1]


def cast(scene: Scene, origin, directions):
    """Nearest hit distance and wall index for unit ``directions`` ``(N, 3)``.

    Misses give ``(inf, -1)``. Endpoints and height limits are inclusive.
    """
    d = np.asarray(directions, dtype=float).reshape(-1, 3)
    o = np.asarray(origin, dtype=float)
    n = d.shape[0]
    best = np.full(n, np.inf)
    which = np.full(n, -1, dtype=np.int64)
    p0, p1, z_lo, z_hi = scene.arrays()
    for k in range(p0.shape[0]):
        ex, ey = p1[k] - p0[k]
        wx, wy = p0[k, 0] - o[0], p0[k, 1] - o[1]
        det = d[:, 0] * ey - d[:, 1] * ex
        hit = np.abs(det) >= PARALLEL_EPS
        safe = np.where(hit, det, 1.0)
        t = (wx * ey - wy * ex) / safe
        s = (wx * d[:, 1] - wy * d[:, 0]) / safe
        z = o[2] + t * d[:, 2]
        hit &= (t >= 0.0) & (s >= 0.0) & (s <= 1.0) & (z >= z_lo[k]) & (z <= z_hi[k])
        closer = hit & (t < best)
        best[closer] = t[closer]
        which[closer] = k
    return best, which


def _beam_dirs(angles, elevation=0.0):
    ce = math.cos(elevation)
    d = np.empty((angles.size, 3))
    d[:, 0] = ce * np.cos(angles)
    d[:, 1] = ce * np.sin(angles)
    d[:, 2] = math.sin(elevation)
    return d


def _bounded(t, geom):
    return np.where((t >= geom.range_min) & (t <= geom.range_max), t, np.inf)


def raycast_scan(scene: Scene, sensor_pose: RigidTransform, geom: ScanGeometry,
                 frame="laser", return_walls=False):
    """Ground-truth scan from a sensor whose pose in the world is ``sensor_pose``.

    With ``return_walls`` also returns, per beam, the index of the nearest
    wall hit (regardless of range bounds), or -1.
    """
    dirs = _beam_dirs(geom.angles())
    t, which = cast(scene, sensor_pose.translation, dirs @ sensor_pose.rotation_matrix().T)
    scan = LaserScan.from_geometry(frame, geom, _bounded(t, geom))
    if return_walls:
        return scan, which
    return scan


def raycast_cloud(scene: Scene, sensor_pose: RigidTransform, geom: ScanGeometry,
                  elevations, frame="lidar") -> PointCloud3:
    """Multi-plane cloud in the sensor frame, one ring per elevation angle."""
    rot = sensor_pose.rotation_matrix()
    angles = geom.angles()
    rings = []
    for phi in elevations:
        phi = float(phi)
        if not math.isfinite(phi):
            raise ValueError(f"non-finite elevation {phi}")
        dirs = _beam_dirs(angles, phi)
        t = _bounded(cast(scene, sensor_pose.translation, dirs @ rot.T)[0], geom)
        ok = np.isfinite(t)
        rings.append(dirs[ok] * t[ok, None])
    pts = np.concatenate(rings) if rings else np.empty((0, 3))
    return PointCloud3(frame, pts)
