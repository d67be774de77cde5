"""Conversions between planar scans and 3D points.

``points_to_scan`` is the shared back end of both pipelines: points are
flattened onto the x-y plane of the target frame, bucketed into angular bins
by nearest beam centre, and each bin keeps its minimum range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LaserScan, PointCloud3, RigidTransform, ScanGeometry, TWO_PI, apply

__all__ = [
    "DropStats",
    "ScanGeometry",
    "scan_to_points",
    "points_to_scan",
    "transform_cloud",
]

# Ranges this close outside [range_min, range_max] are clamped, not dropped,
# so beams sitting exactly on a bound survive a polar/cartesian round trip.
RANGE_EPS = 1e-9


@dataclass(frozen=True)
class DropStats:
    """Accounting of where every input point went during binning.

    ``binned + bearing + range_low + range_high`` equals the number of
    input points (``z_band`` is only non-zero when the height filter is on).
    """

    binned: int = 0
    bearing: int = 0
    range_low: int = 0
    range_high: int = 0
    z_band: int = 0

    @property
    def dropped(self) -> int:
        return self.bearing + self.range_low + self.range_high + self.z_band

    @property
    def total(self) -> int:
        return self.binned + self.dropped

    def __add__(self, other: DropStats) -> DropStats:
        return DropStats(
            self.binned + other.binned,
            self.bearing + other.bearing,
            self.range_low + other.range_low,
            self.range_high + other.range_high,
            self.z_band + other.z_band,
        )

    def as_dict(self) -> dict:
        return {
            "binned": self.binned,
            "bearing": self.bearing,
            "range_low": self.range_low,
            "range_high": self.range_high,
            "z_band": self.z_band,
        }


def scan_to_points(scan: LaserScan, with_skipped=False):
    """Expand a scan into in-plane points ``(r cos a, r sin a, 0)``.

    Beams without a valid return produce no point. With ``with_skipped`` the
    number of such beams is returned alongside the cloud.
    """
    r = scan.ranges
    ok = np.isfinite(r) & (r >= scan.range_min) & (r <= scan.range_max)
    theta = scan.angles()[ok]
    rk = r[ok]
    pts = np.empty((rk.size, 3))
    pts[:, 0] = rk * np.cos(theta)
    pts[:, 1] = rk * np.sin(theta)
    pts[:, 2] = 0.0
    cloud = PointCloud3(scan.frame, pts)
    if with_skipped:
        return cloud, int(r.size - rk.size)
    return cloud


def transform_cloud(cloud: PointCloud3, t: RigidTransform, new_frame) -> PointCloud3:
    if t.is_identity():
        return PointCloud3(new_frame, cloud.points)
    return PointCloud3(new_frame, apply(t, cloud.points))


def _mod_2pi(a: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """``np.mod(a, 2*pi)`` for values known to lie in ``[lo, hi]``.

    Inside one period either side of zero a conditional shift gives the same
    bits as ``np.mod`` at a fraction of the cost.
    """
    if lo >= -TWO_PI and hi < TWO_PI:
        return np.where(a < 0.0, a + TWO_PI, a + 0.0)  # + 0.0 turns -0.0 into 0.0
    return np.mod(a, TWO_PI)


def bin_indices(bearing: np.ndarray, geom: ScanGeometry) -> np.ndarray:
    """Nearest-beam index for each bearing, or -1 when outside the scan.

    Bearings within half an increment outside ``[angle_min, last beam]`` still
    round onto the end beams; a bearing up to ``angle_max`` maps to the last
    beam even if that is more than half an increment away. Full-circle
    geometries wrap around.
    """
    n = geom.size
    inc = geom.angle_increment
    # bearings come from arctan2, so they lie in [-pi, pi]
    rel = bearing - geom.angle_min
    lo, hi = -np.pi - geom.angle_min, np.pi - geom.angle_min
    if geom.wraps:
        rel = _mod_2pi(rel, lo, hi)
        idx = np.rint(rel / inc).astype(np.int64)
        # n*inc may exceed 2*pi slightly; anything past the end is the first beam
        idx[idx >= n] = 0
        return idx
    # split the uncovered part of the circle halfway, so bearings just
    # below angle_min stay negative instead of wrapping past angle_max
    span = geom.angle_max - geom.angle_min
    half_gap = 0.5 * (TWO_PI - span)
    rel = _mod_2pi(rel + half_gap, lo + half_gap, hi + half_gap) - half_gap
    idx = np.rint(rel / inc).astype(np.int64)
    idx[(idx == n) & (rel <= span)] = n - 1
    idx[(idx < 0) | (idx >= n)] = -1
    return idx


def bin_xy(x: np.ndarray, y: np.ndarray, geom: ScanGeometry):
    """Minimum range per beam for in-plane coordinates; ``(ranges, DropStats)``."""
    rng = np.sqrt(x * x + y * y)
    low = (rng < geom.range_min - RANGE_EPS) | ((x == 0.0) & (y == 0.0))
    high = ~low & (rng > geom.range_max + RANGE_EPS)
    n_low = int(np.count_nonzero(low))
    n_high = int(np.count_nonzero(high))
    if n_low or n_high:
        ok = ~(low | high)
        x, y, rng = x[ok], y[ok], rng[ok]
    idx = bin_indices(np.arctan2(y, x), geom)
    in_fov = idx >= 0
    n_bin = int(np.count_nonzero(in_fov))
    if n_bin < idx.size:
        idx, rng = idx[in_fov], rng[in_fov]

    out = np.full(geom.size, np.inf)
    np.minimum.at(out, idx, np.clip(rng, geom.range_min, geom.range_max))
    stats = DropStats(
        binned=n_bin,
        bearing=int(in_fov.size - n_bin),
        range_low=n_low,
        range_high=n_high,
    )
    return out, stats


def points_to_scan(cloud: PointCloud3, geom: ScanGeometry, frame=None, z_band=None):
    """Flatten ``cloud`` into a scan with ``geom`` as seen from the frame origin.

    The cloud must already be expressed in the scan frame. ``z`` is ignored
    unless ``z_band=(z_lo, z_hi)`` is given, in which case points outside the
    closed band are dropped first.

    Returns ``(scan, DropStats)``.
    """
    if frame is None:
        frame = cloud.frame
    elif frame != cloud.frame:
        raise ValueError(f"cloud is in frame {cloud.frame!r}, not {frame!r}")
    if not isinstance(geom, ScanGeometry):
        raise TypeError(f"expected ScanGeometry, got {type(geom).__name__}")

    pts = cloud.points
    x, y = pts[:, 0], pts[:, 1]
    z_drop = 0
    if z_band is not None:
        z_lo, z_hi = z_band
        keep = (pts[:, 2] >= z_lo) & (pts[:, 2] <= z_hi)
        z_drop = int(keep.size - np.count_nonzero(keep))
        x, y = x[keep], y[keep]
    out, stats = bin_xy(x, y, geom)
    if z_drop:
        stats = stats + DropStats(z_band=z_drop)
    return LaserScan.from_geometry(frame, geom, out), stats

