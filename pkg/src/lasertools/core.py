"""Frame-tagged geometric primitives: rigid transforms, planar scans, clouds.

Transforms follow the ``T_parent_child`` convention: ``apply(T, p)`` takes a
point expressed in the child frame and returns it in the parent frame.
Rotations are stored as unit quaternions ``(w, x, y, z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

# Slack on the beam-count quotient so that spans built as min + (n-1)*inc
# do not lose their last beam to rounding.
_COUNT_EPS = 1e-9


def check_frame(name) -> str:
    """Validate a frame id and return it unchanged."""
    if not isinstance(name, str) or not name:
        raise ValueError(f"frame id must be a non-empty string, got {name!r}")
    if any(c.isspace() for c in name):
        raise ValueError(f"frame id must not contain whitespace: {name!r}")
    return name


# ---------------------------------------------------------------------------
# quaternion helpers


def _qmul(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def _qnormalize(q):
    n = math.sqrt(sum(c * c for c in q))
    if not math.isfinite(n) or n < 1e-12:
        raise ValueError(f"quaternion {q!r} cannot be normalized")
    return tuple(c / n for c in q)


def _qmatrix(q) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


@dataclass(frozen=True)
class RigidTransform:
    """SE(3) pose: rotate by ``rotation`` then add ``translation``."""

    translation: tuple = (0.0, 0.0, 0.0)
    rotation: tuple = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        t = tuple(float(v) for v in self.translation)
        if len(t) != 3 or not all(math.isfinite(v) for v in t):
            raise ValueError(f"translation must be 3 finite numbers, got {self.translation!r}")
        q = tuple(float(v) for v in self.rotation)
        if len(q) != 4:
            raise ValueError(f"rotation must be a (w, x, y, z) quaternion, got {self.rotation!r}")
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "rotation", _qnormalize(q))

    @classmethod
    def identity(cls) -> RigidTransform:
        return cls()

    @classmethod
    def from_translation(cls, x, y, z) -> RigidTransform:
        return cls((x, y, z))

    @classmethod
    def from_xyz_ypr(cls, xyz, ypr) -> RigidTransform:
        """Build from a translation and yaw/pitch/roll in radians.

        The rotation is intrinsic Z (yaw), then Y (pitch), then X (roll),
        i.e. ``R = Rz(yaw) @ Ry(pitch) @ Rx(roll)``.
        """
        yaw, pitch, roll = (float(v) for v in ypr)
        qz = (math.cos(yaw / 2), 0.0, 0.0, math.sin(yaw / 2))
        qy = (math.cos(pitch / 2), 0.0, math.sin(pitch / 2), 0.0)
        qx = (math.cos(roll / 2), math.sin(roll / 2), 0.0, 0.0)
        return cls(tuple(xyz), _qmul(_qmul(qz, qy), qx))

    def rotation_matrix(self) -> np.ndarray:
        return _qmatrix(self.rotation)

    def matrix(self) -> np.ndarray:
        """4x4 homogeneous matrix."""
        m = np.eye(4)
        m[:3, :3] = self.rotation_matrix()
        m[:3, 3] = self.translation
        return m

    def is_identity(self) -> bool:
        return self.translation == (0.0, 0.0, 0.0) and self.rotation == (1.0, 0.0, 0.0, 0.0)

    def inverse(self) -> RigidTransform:
        return invert(self)

    def __matmul__(self, other: RigidTransform) -> RigidTransform:
        return compose(self, other)

    def isclose(self, other: RigidTransform, atol=1e-9) -> bool:
        """Compare as SE(3) elements (q and -q are the same rotation)."""
        dt = max(abs(a - b) for a, b in zip(self.translation, other.translation))
        dq = min(
            max(abs(a - b) for a, b in zip(self.rotation, other.rotation)),
            max(abs(a + b) for a, b in zip(self.rotation, other.rotation)),
        )
        return dt <= atol and dq <= atol


def compose(a: RigidTransform, b: RigidTransform) -> RigidTransform:
    """Return ``a ∘ b``: apply ``b`` first, then ``a``."""
    tb = a.rotation_matrix() @ np.asarray(b.translation)
    t = tuple(float(tb[i]) + a.translation[i] for i in range(3))
    return RigidTransform(t, _qmul(a.rotation, b.rotation))


def invert(t: RigidTransform) -> RigidTransform:
    w, x, y, z = t.rotation
    conj = (w, -x, -y, -z)
    ti = -(_qmatrix(conj) @ np.asarray(t.translation))
    return RigidTransform(tuple(float(v) for v in ti), conj)


def apply(t: RigidTransform, points) -> np.ndarray:
    """Map a point ``(3,)`` or an array of points ``(N, 3)`` through ``t``."""
    p = np.asarray(points, dtype=float)
    if p.shape[-1:] != (3,) or p.ndim > 2:
        raise ValueError(f"expected a point or an (N, 3) array, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise ValueError("cannot transform non-finite coordinates")
    return p @ t.rotation_matrix().T + np.asarray(t.translation)


# ---------------------------------------------------------------------------
# scans


def beam_count(angle_min, angle_max, angle_increment) -> int:
    """Number of beams for an inclusive-endpoint angular span."""
    return int(math.floor((angle_max - angle_min) / angle_increment + _COUNT_EPS)) + 1


def _check_angles(angle_min, angle_max, angle_increment, range_min, range_max):
    vals = (angle_min, angle_max, angle_increment, range_min, range_max)
    try:
        ok = all(not isinstance(v, (str, bool)) and math.isfinite(float(v)) for v in vals)
    except (TypeError, ValueError):
        ok = False
    if not ok:
        raise ValueError(f"scan parameters must be finite numbers, got {vals!r}")
    if angle_increment <= 0:
        raise ValueError(f"angle_increment must be > 0, got {angle_increment}")
    if angle_max < angle_min:
        raise ValueError(f"angle_max ({angle_max}) < angle_min ({angle_min})")
    if not 0 <= range_min < range_max:
        raise ValueError(f"need 0 <= range_min < range_max, got {range_min}, {range_max}")


@dataclass(frozen=True)
class ScanGeometry:
    """Angular layout and range bounds of a planar scan."""

    angle_min: float
    angle_max: float
    angle_increment: float
    range_min: float
    range_max: float

    def __post_init__(self):
        _check_angles(self.angle_min, self.angle_max, self.angle_increment,
                      self.range_min, self.range_max)
        if self.angle_max - self.angle_min > TWO_PI + 1e-9:
            raise ValueError("angular span exceeds a full turn")
        for name in ("angle_min", "angle_max", "angle_increment", "range_min", "range_max"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def full_circle(cls, angle_increment, range_min, range_max) -> ScanGeometry:
        """Geometry covering [-pi, pi) with beams starting at -pi."""
        n = math.ceil(TWO_PI / angle_increment - 1e-9)
        return cls(-math.pi, -math.pi + (n - 1) * angle_increment, angle_increment,
                   range_min, range_max)

    @property
    def size(self) -> int:
        return beam_count(self.angle_min, self.angle_max, self.angle_increment)

    @property
    def wraps(self) -> bool:
        """True when the beams cover the whole circle, so bearings wrap."""
        return self.size * self.angle_increment >= TWO_PI - 1e-9

    def angles(self) -> np.ndarray:
        return self.angle_min + np.arange(self.size) * self.angle_increment


@dataclass(frozen=True, eq=False)
class LaserScan:
    """Planar range scan. ``inf`` marks a beam without a return."""

    frame: str
    angle_min: float
    angle_max: float
    angle_increment: float
    range_min: float
    range_max: float
    ranges: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_frame(self.frame)
        _check_angles(self.angle_min, self.angle_max, self.angle_increment,
                      self.range_min, self.range_max)
        for name in ("angle_min", "angle_max", "angle_increment", "range_min", "range_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        r = np.array(self.ranges, dtype=float).reshape(-1)
        expected = beam_count(self.angle_min, self.angle_max, self.angle_increment)
        if r.size != expected:
            raise ValueError(f"ranges has {r.size} entries, expected {expected} "
                             f"from the angle parameters")
        if np.isnan(r).any():
            raise ValueError("NaN range; use inf for beams without a return")
        finite = r[np.isfinite(r)]
        if (r == -np.inf).any() or (finite < self.range_min).any() or (finite > self.range_max).any():
            raise ValueError(f"ranges must lie in [{self.range_min}, {self.range_max}] or be +inf")
        r.flags.writeable = False
        object.__setattr__(self, "ranges", r)

    @classmethod
    def from_geometry(cls, frame, geom: ScanGeometry, ranges) -> LaserScan:
        return cls(frame, geom.angle_min, geom.angle_max, geom.angle_increment,
                   geom.range_min, geom.range_max, ranges)

    @property
    def geometry(self) -> ScanGeometry:
        return ScanGeometry(self.angle_min, self.angle_max, self.angle_increment,
                            self.range_min, self.range_max)

    def __len__(self):
        return self.ranges.size

    def angles(self) -> np.ndarray:
        return self.angle_min + np.arange(self.ranges.size) * self.angle_increment

    def __eq__(self, other):
        if not isinstance(other, LaserScan):
            return NotImplemented
        return (
            self.frame == other.frame
            and self.geometry == other.geometry
            and np.array_equal(self.ranges, other.ranges)
        )

    __hash__ = None


def beam_angle(scan: LaserScan, i: int) -> float:
    if not 0 <= i < len(scan):
        raise IndexError(f"beam index {i} out of range for {len(scan)} beams")
    return scan.angle_min + i * scan.angle_increment


@dataclass(frozen=True, eq=False)
class PointCloud3:
    """Frame-tagged ``(N, 3)`` array of finite points."""

    frame: str
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_frame(self.frame)
        p = np.array(self.points, dtype=float)
        if p.size == 0:
            p = p.reshape(0, 3)
        if p.ndim != 2 or p.shape[1] != 3:
            raise ValueError(f"points must have shape (N, 3), got {p.shape}")
        bad = ~np.isfinite(p).all(axis=1)
        if bad.any():
            raise ValueError(f"non-finite coordinates at point index {int(np.argmax(bad))}")
        p.flags.writeable = False
        object.__setattr__(self, "points", p)

    def __len__(self):
        return self.points.shape[0]

    def __eq__(self, other):
        if not isinstance(other, PointCloud3):
            return NotImplemented
        return self.frame == other.frame and np.array_equal(self.points, other.points)

    __hash__ = None
