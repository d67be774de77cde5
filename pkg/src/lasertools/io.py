"""File formats: JSON scans, ASCII PCD clouds, YAML configs and scenes.

Floats are written with 17 significant digits so every round trip is
value-exact. Parsers never raise anything but :class:`FormatError` (or its
subclass :class:`ConfigError`) for bad input.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .core import LaserScan, PointCloud3, RigidTransform, ScanGeometry, beam_count, check_frame
from .errors import ConfigError, FormatError, TreeError
from .merger import MergeConfig
from .raycast import Scene, Wall
from .tf_tree import TransformTree
from .virtualizer import VirtualizerConfig

SCAN_KEYS = ("frame", "angle_min", "angle_max", "angle_increment", "range_min", "range_max", "ranges")
GEOMETRY_KEYS = ("angle_min", "angle_max", "angle_increment", "range_min", "range_max")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write(path, text: str):
    """Write ``text`` to ``path`` via a temp file and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_text(path) -> str:
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise FormatError(f"not valid UTF-8 ({e.reason})", f"{path}: byte {e.start}") from None


# ---------------------------------------------------------------------------
# scans (JSON)


def _reject_constant(name):
    raise ValueError(f"{name} is not allowed; write \"inf\" for missing returns")


def _json_loads(text, where):
    try:
        return json.loads(text, parse_constant=_reject_constant, parse_int=float)
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, f"{where}line {e.lineno} col {e.colno}") from None
    except (ValueError, RecursionError) as e:
        raise FormatError(str(e), where.rstrip(": ") or None) from None


def _number(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"expected a number, got {value!r}", key)
    return float(value)


def dumps_scan(scan: LaserScan) -> str:
    """Single-line JSON record for ``scan``."""
    ranges = ", ".join('"inf"' if r == math.inf else fmt(r) for r in scan.ranges)
    head = ", ".join(
        f'"{k}": {fmt(getattr(scan, k))}' for k in GEOMETRY_KEYS
    )
    return f'{{"frame": {json.dumps(scan.frame)}, {head}, "ranges": [{ranges}]}}'


def scan_from_obj(obj, where="") -> LaserScan:
    if not isinstance(obj, dict):
        raise FormatError("scan record must be a JSON object", where or None)
    unknown = sorted(set(obj) - set(SCAN_KEYS))
    if unknown:
        raise FormatError(f"unknown key(s) {unknown}", where or None)
    missing = [k for k in SCAN_KEYS if k not in obj]
    if missing:
        raise FormatError(f"missing key(s) {missing}", where or None)
    frame = obj["frame"]
    try:
        check_frame(frame)
    except ValueError as e:
        raise FormatError(str(e), f"{where}frame") from None
    vals = {k: _number(obj[k], f"{where}{k}") for k in GEOMETRY_KEYS}
    raw = obj["ranges"]
    if not isinstance(raw, list):
        raise FormatError("expected a list", f"{where}ranges")
    ranges = np.empty(len(raw))
    for i, r in enumerate(raw):
        if r == "inf":
            ranges[i] = math.inf
        elif isinstance(r, str):
            raise FormatError(f"unexpected string {r!r}", f"{where}ranges[{i}]")
        else:
            ranges[i] = _number(r, f"{where}ranges[{i}]")
        if math.isnan(ranges[i]):
            raise FormatError("NaN range", f"{where}ranges[{i}]")
    try:
        expected = beam_count(vals["angle_min"], vals["angle_max"], vals["angle_increment"])
    except (ZeroDivisionError, OverflowError, ValueError):
        expected = None
    if expected is not None and vals["angle_increment"] > 0 and expected != len(raw):
        raise FormatError(
            f"ranges has {len(raw)} entries, expected {expected} from the angle parameters",
            f"{where}ranges",
        )
    try:
        return LaserScan(frame=frame, ranges=ranges, **vals)
    except ValueError as e:
        raise FormatError(str(e), where.rstrip(": ") or None) from None


def loads_scan(text: str, where="") -> LaserScan:
    return scan_from_obj(_json_loads(text, where), where)


def read_scan(path) -> LaserScan:
    return loads_scan(_read_text(path), f"{path}: ")


def write_scan(path, scan: LaserScan):
    atomic_write(path, dumps_scan(scan) + "\n")


def dumps_scans(scans) -> str:
    """Multi-record file: one scan record per line."""
    return "".join(dumps_scan(s) + "\n" for s in scans)


def read_scans(path):
    text = _read_text(path)
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.strip():
            out.append(loads_scan(line, f"{path}: line {lineno}: "))
    return out


def write_scans(path, scans):
    atomic_write(path, dumps_scans(scans))


# ---------------------------------------------------------------------------
# clouds (ASCII PCD subset, plus a JSON record for streams)

_PCD_ORDER = ("VERSION", "FIELDS", "SIZE", "TYPE", "COUNT", "WIDTH", "HEIGHT",
              "VIEWPOINT", "POINTS", "DATA")


def dumps_cloud(cloud: PointCloud3) -> str:
    n = len(cloud)
    lines = [
        "# .PCD v0.7 - Point Cloud Data file format",
        f"# frame: {cloud.frame}",
        "VERSION 0.7",
        "FIELDS x y z",
        "SIZE 8 8 8",
        "TYPE F F F",
        "COUNT 1 1 1",
        f"WIDTH {n}",
        "HEIGHT 1",
        "VIEWPOINT 0 0 0 1 0 0 0",
        f"POINTS {n}",
        "DATA ascii",
    ]
    lines += [f"{fmt(x)} {fmt(y)} {fmt(z)}" for x, y, z in cloud.points.tolist()]
    return "\n".join(lines) + "\n"


def _header_int(value, loc, key):
    try:
        v = int(value)
    except ValueError:
        raise FormatError(f"{key} must be an integer, got {value!r}", loc) from None
    if v < 0:
        raise FormatError(f"{key} must be non-negative", loc)
    return v


def loads_cloud(text: str, frame=None, where="") -> PointCloud3:
    """Parse an ASCII PCD with fields ``x y z``.

    The frame comes from a ``# frame: <name>`` comment, or from ``frame``
    when the file has none.
    """
    lines = text.splitlines()
    header = {}
    file_frame = None
    body_start = None
    for lineno, line in enumerate(lines, 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            c = s[1:].strip()
            if c.startswith("frame:"):
                file_frame = c[len("frame:"):].strip()
            continue
        key, *rest = s.split(None, 1)
        rest = rest[0] if rest else ""
        if key not in _PCD_ORDER:
            raise FormatError(f"unexpected header entry {key!r}", f"{where}line {lineno}")
        if key in header:
            raise FormatError(f"repeated header entry {key}", f"{where}line {lineno}")
        header[key] = (rest.split(), lineno)
        if key == "DATA":
            body_start = lineno
            break
    if body_start is None:
        raise FormatError("missing DATA line", where.rstrip(": ") or None)
    for key in ("FIELDS", "TYPE", "WIDTH", "HEIGHT", "POINTS"):
        if key not in header:
            raise FormatError(f"missing {key} header", where.rstrip(": ") or None)

    data, ln = header["DATA"]
    if data != ["ascii"]:
        raise FormatError(f"unsupported PCD data format {' '.join(data)!r}; only ascii is read",
                          f"{where}line {ln}")
    fields, ln = header["FIELDS"]
    if fields != ["x", "y", "z"]:
        raise FormatError(f"FIELDS must be 'x y z', got {' '.join(fields)!r}", f"{where}line {ln}")
    types, ln = header["TYPE"]
    if types != ["F", "F", "F"]:
        raise FormatError("TYPE must be 'F F F'", f"{where}line {ln}")
    if "SIZE" in header:
        sizes, ln = header["SIZE"]
        if len(sizes) != 3 or any(s not in ("4", "8") for s in sizes):
            raise FormatError("SIZE must be three of 4 or 8", f"{where}line {ln}")
    if "COUNT" in header:
        counts, ln = header["COUNT"]
        if counts != ["1", "1", "1"]:
            raise FormatError("COUNT must be '1 1 1'", f"{where}line {ln}")
    dims = {}
    for key in ("WIDTH", "HEIGHT", "POINTS"):
        vals, ln = header[key]
        if len(vals) != 1:
            raise FormatError(f"{key} takes one value", f"{where}line {ln}")
        dims[key] = _header_int(vals[0], f"{where}line {ln}", key)
    if dims["HEIGHT"] != 1:
        raise FormatError("only unorganized clouds (HEIGHT 1) are supported",
                          f"{where}line {header['HEIGHT'][1]}")
    if dims["WIDTH"] != dims["POINTS"]:
        raise FormatError(f"WIDTH {dims['WIDTH']} does not match POINTS {dims['POINTS']}",
                          f"{where}line {header['POINTS'][1]}")

    n = dims["POINTS"]
    rows = []
    for lineno in range(body_start + 1, len(lines) + 1):
        s = lines[lineno - 1].strip()
        if not s:
            continue
        parts = s.split()
        if len(parts) != 3:
            raise FormatError(f"point {len(rows)}: expected 3 values, got {len(parts)}",
                              f"{where}line {lineno}")
        try:
            row = [float(v) for v in parts]
        except ValueError:
            raise FormatError(f"point {len(rows)}: not a number", f"{where}line {lineno}") from None
        if not all(math.isfinite(v) for v in row):
            raise FormatError(f"point {len(rows)} is not finite", f"{where}line {lineno}")
        rows.append(row)
        if len(rows) > n:
            break
    if len(rows) != n:
        raise FormatError(f"header declares {n} points but the file has "
                          f"{'more' if len(rows) > n else len(rows)}", where.rstrip(": ") or None)

    name = file_frame if file_frame is not None else frame
    if name is None:
        raise FormatError("no '# frame: <name>' comment and no frame given",
                          where.rstrip(": ") or None)
    try:
        check_frame(name)
    except ValueError as e:
        raise FormatError(str(e), where.rstrip(": ") or None) from None
    return PointCloud3(name, np.array(rows, dtype=float).reshape(-1, 3))


def read_cloud(path, frame=None) -> PointCloud3:
    return loads_cloud(_read_text(path), frame, f"{path}: ")


def write_cloud(path, cloud: PointCloud3):
    atomic_write(path, dumps_cloud(cloud))


def dumps_cloud_record(cloud: PointCloud3) -> str:
    pts = ", ".join(f"[{fmt(x)}, {fmt(y)}, {fmt(z)}]" for x, y, z in cloud.points.tolist())
    return f'{{"frame": {json.dumps(cloud.frame)}, "points": [{pts}]}}'


def loads_cloud_record(text: str, where="") -> PointCloud3:
    obj = _json_loads(text, where)
    if not isinstance(obj, dict) or set(obj) != {"frame", "points"}:
        raise FormatError("cloud record must be an object with keys frame, points",
                          where.rstrip(": ") or None)
    pts = obj["points"]
    if not isinstance(pts, list):
        raise FormatError("expected a list", f"{where}points")
    for i, p in enumerate(pts):
        if (not isinstance(p, list) or len(p) != 3
                or any(isinstance(v, bool) or not isinstance(v, float) for v in p)):
            raise FormatError("expected [x, y, z]", f"{where}points[{i}]")
    try:
        return PointCloud3(check_frame(obj["frame"]), np.array(pts, dtype=float).reshape(-1, 3))
    except ValueError as e:
        raise FormatError(str(e), where.rstrip(": ") or None) from None


# ---------------------------------------------------------------------------
# YAML helpers


def _yaml_load(text, where):
    try:
        return yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark
        loc = f"{where}line {mark.line + 1} col {mark.column + 1}" if mark else where or None
        raise ConfigError(e.problem or str(e), loc) from None
    except (yaml.YAMLError, ValueError, TypeError, RecursionError) as e:
        raise ConfigError(f"YAML error: {e}", where.rstrip(": ") or None) from None


def _mapping(obj, path, allowed, required=()):
    if not isinstance(obj, dict):
        raise ConfigError("expected a mapping", path or None)
    for k in obj:
        if k not in allowed:
            raise ConfigError("unknown key", f"{path}.{k}" if path else str(k))
    for k in required:
        if k not in obj:
            raise ConfigError("missing required key", f"{path}.{k}" if path else k)
    return obj


def _cfg_number(v, path):
    if isinstance(v, bool):
        raise ConfigError(f"expected a number, got {v!r}", path)
    if isinstance(v, str):
        # plain YAML reads 1e-3 as a string
        try:
            v = float(v)
        except ValueError:
            raise ConfigError(f"expected a number, got {v!r}", path) from None
    if not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"expected a finite number, got {v!r}", path)
    return float(v)


def _cfg_frame(v, path):
    try:
        return check_frame(v)
    except ValueError as e:
        raise ConfigError(str(e), path) from None


def _cfg_str(v, path):
    if not isinstance(v, str) or not v:
        raise ConfigError(f"expected a non-empty string, got {v!r}", path)
    return v


def _cfg_bool(v, path):
    if not isinstance(v, bool):
        raise ConfigError(f"expected true or false, got {v!r}", path)
    return v


def _cfg_list(v, path):
    if not isinstance(v, list):
        raise ConfigError("expected a list", path)
    return v


def _cfg_geometry(obj, path) -> ScanGeometry:
    """Geometry mapping; omit both angle limits for a full circle."""
    _mapping(obj, path, GEOMETRY_KEYS, ("angle_increment", "range_min", "range_max"))
    vals = {k: _cfg_number(obj[k], f"{path}.{k}") for k in GEOMETRY_KEYS if k in obj}
    has = ("angle_min" in vals, "angle_max" in vals)
    try:
        if has == (False, False):
            return ScanGeometry.full_circle(vals["angle_increment"], vals["range_min"],
                                            vals["range_max"])
        if has != (True, True):
            raise ConfigError("give both angle_min and angle_max, or neither", path)
        return ScanGeometry(**vals)
    except (ValueError, OverflowError, ZeroDivisionError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e), path) from None


def _cfg_z_band(v, path):
    v = _cfg_list(v, path)
    if len(v) != 2:
        raise ConfigError("expected [z_lo, z_hi]", path)
    lo, hi = (_cfg_number(x, f"{path}[{i}]") for i, x in enumerate(v))
    if not lo <= hi:
        raise ConfigError("z_lo must not exceed z_hi", path)
    return (lo, hi)


def geometry_to_obj(g: ScanGeometry) -> dict:
    return {k: getattr(g, k) for k in GEOMETRY_KEYS}


# ---------------------------------------------------------------------------
# config


@dataclass
class StaticTransform:
    """One ``parent child x y z yaw pitch roll`` config entry."""

    parent: str
    child: str
    xyz: tuple
    ypr: tuple

    def line(self) -> str:
        nums = " ".join(repr(float(v)) for v in (*self.xyz, *self.ypr))
        return f"{self.parent} {self.child} {nums}"


def parse_transform_line(text: str, path="transforms") -> StaticTransform:
    """Parse a transform entry.

    Accepts ``parent child x y z yaw pitch roll`` or the static transform
    publisher order ``x y z yaw pitch roll parent child [period_ms]``; the
    period is ignored.
    """
    if not isinstance(text, str):
        raise ConfigError(f"expected a transform string, got {text!r}", path)
    tok = text.split()

    def isnum(s):
        try:
            float(s)
            return True
        except ValueError:
            return False

    frames_first = len(tok) == 8 and all(isnum(t) for t in tok[2:])
    if frames_first:
        parent, child, nums = tok[0], tok[1], tok[2:]
    elif len(tok) in (8, 9) and all(isnum(t) for t in tok[:6]):
        nums, parent, child = tok[:6], tok[6], tok[7]
        if len(tok) == 9:
            _cfg_number(tok[8], path)
    else:
        raise ConfigError("expected 'parent child x y z yaw pitch roll' or "
                          "'x y z yaw pitch roll parent child [period_ms]'", path)
    vals = [_cfg_number(v, path) for v in nums]
    return StaticTransform(_cfg_frame(parent, path), _cfg_frame(child, path),
                           tuple(vals[:3]), tuple(vals[3:]))


@dataclass
class Config:
    """Parsed configuration file.

    Output/input paths are resolved against the config file's directory.
    """

    tree: TransformTree
    transforms: list = field(default_factory=list)
    merge: MergeConfig | None = None
    virtualize: VirtualizerConfig | None = None
    scan_output: str | None = None
    cloud_output: str | None = None
    cloud_input: str | None = None
    virtual_output: str | None = None
    merge_z_band: tuple | None = None
    virtualize_z_band: tuple | None = None


_TOP_KEYS = ("transforms", "merge", "virtualize")
_MERGE_KEYS = ("destination_frame", "inputs", "scan_output", "cloud_output", "geometry", "z_band")
_VIRT_KEYS = ("cloud_input", "base_frame", "virtual_frames", "combined_output", "scan_output",
              "geometry", "z_band")


def parse_config(text: str, base_dir=None, where="") -> Config:
    obj = _yaml_load(text, where)
    if obj is None:
        obj = {}
    _mapping(obj, "", _TOP_KEYS)
    base = Path(base_dir) if base_dir is not None else None

    def resolve(p):
        return str(base / p) if base is not None else p

    tree = TransformTree()
    transforms = []
    for i, entry in enumerate(_cfg_list(obj.get("transforms") or [], "transforms")):
        kp = f"transforms[{i}]"
        st = parse_transform_line(entry, kp)
        try:
            tree.add_static_transform(st.parent, st.child, st.xyz, st.ypr)
        except (TreeError, ValueError) as e:
            raise ConfigError(str(e), kp) from None
        transforms.append(st)
    cfg = Config(tree=tree.freeze(), transforms=transforms)

    if "merge" in obj:
        m = _mapping(obj["merge"], "merge", _MERGE_KEYS, ("destination_frame", "inputs"))
        inputs = [_cfg_str(v, f"merge.inputs[{i}]")
                  for i, v in enumerate(_cfg_list(m["inputs"], "merge.inputs"))]
        if not inputs:
            raise ConfigError("at least one input is required", "merge.inputs")
        if len(set(inputs)) != len(inputs):
            raise ConfigError("duplicate input", "merge.inputs")
        if "scan_output" in m:
            cfg.scan_output = resolve(_cfg_str(m["scan_output"], "merge.scan_output"))
        if "cloud_output" in m:
            cfg.cloud_output = resolve(_cfg_str(m["cloud_output"], "merge.cloud_output"))
        geom = _cfg_geometry(m["geometry"], "merge.geometry") if "geometry" in m else None
        if "z_band" in m:
            cfg.merge_z_band = _cfg_z_band(m["z_band"], "merge.z_band")
        cfg.merge = MergeConfig(
            destination_frame=_cfg_frame(m["destination_frame"], "merge.destination_frame"),
            inputs=tuple(inputs),
            output_geometry=geom,
            emit_cloud=cfg.cloud_output is not None,
        )

    if "virtualize" in obj:
        v = _mapping(obj["virtualize"], "virtualize", _VIRT_KEYS,
                     ("base_frame", "virtual_frames", "geometry"))
        frames = [_cfg_frame(f, f"virtualize.virtual_frames[{i}]")
                  for i, f in enumerate(_cfg_list(v["virtual_frames"], "virtualize.virtual_frames"))]
        if not frames:
            raise ConfigError("at least one virtual frame is required", "virtualize.virtual_frames")
        for i, f in enumerate(frames):
            if f in frames[:i]:
                raise ConfigError(f"duplicate virtual frame {f!r}", f"virtualize.virtual_frames[{i}]")
        if "cloud_input" in v:
            cfg.cloud_input = resolve(_cfg_str(v["cloud_input"], "virtualize.cloud_input"))
        if "scan_output" in v:
            cfg.virtual_output = resolve(_cfg_str(v["scan_output"], "virtualize.scan_output"))
        if "z_band" in v:
            cfg.virtualize_z_band = _cfg_z_band(v["z_band"], "virtualize.z_band")
        cfg.virtualize = VirtualizerConfig(
            base_frame=_cfg_frame(v["base_frame"], "virtualize.base_frame"),
            virtual_frames=tuple(frames),
            output_geometry=_cfg_geometry(v["geometry"], "virtualize.geometry"),
            combined_output=_cfg_bool(v.get("combined_output", False), "virtualize.combined_output"),
        )
    return cfg


def read_config(path) -> Config:
    path = Path(path)
    try:
        text = _read_text(path)
    except FormatError as e:
        raise ConfigError(str(e)) from None
    return parse_config(text, path.parent, f"{path}: ")


def config_to_obj(cfg: Config) -> dict:
    """Inverse of :func:`parse_config` (paths are written as stored)."""
    obj = {}
    if cfg.transforms:
        obj["transforms"] = [t.line() for t in cfg.transforms]
    if cfg.merge is not None:
        m = {"destination_frame": cfg.merge.destination_frame, "inputs": list(cfg.merge.inputs)}
        if cfg.scan_output is not None:
            m["scan_output"] = cfg.scan_output
        if cfg.cloud_output is not None:
            m["cloud_output"] = cfg.cloud_output
        if cfg.merge.output_geometry is not None:
            m["geometry"] = geometry_to_obj(cfg.merge.output_geometry)
        if cfg.merge_z_band is not None:
            m["z_band"] = list(cfg.merge_z_band)
        obj["merge"] = m
    if cfg.virtualize is not None:
        v = {"base_frame": cfg.virtualize.base_frame,
             "virtual_frames": list(cfg.virtualize.virtual_frames),
             "combined_output": cfg.virtualize.combined_output,
             "geometry": geometry_to_obj(cfg.virtualize.output_geometry)}
        if cfg.cloud_input is not None:
            v["cloud_input"] = cfg.cloud_input
        if cfg.virtual_output is not None:
            v["scan_output"] = cfg.virtual_output
        if cfg.virtualize_z_band is not None:
            v["z_band"] = list(cfg.virtualize_z_band)
        obj["virtualize"] = v
    return obj


def dumps_config(cfg: Config) -> str:
    return yaml.safe_dump(config_to_obj(cfg), sort_keys=False)


def write_config(path, cfg: Config):
    atomic_write(path, dumps_config(cfg))


# ---------------------------------------------------------------------------
# scenes


@dataclass
class SensorSpec:
    """A simulated sensor in a scene file.

    ``elevations`` set means a multi-plane cloud, otherwise a planar scan.
    """

    frame: str
    pose: RigidTransform
    geometry: ScanGeometry
    elevations: tuple | None = None
    output: str | None = None

    @property
    def filename(self) -> str:
        if self.output:
            return self.output
        return f"{self.frame}.pcd" if self.elevations is not None else f"{self.frame}.json"


def parse_scene(text: str, where=""):
    """Parse a scene file into ``(Scene, [SensorSpec, ...])``."""
    obj = _yaml_load(text, where)
    _mapping(obj, "", ("walls", "sensors"), ("walls",))
    walls = []
    for i, w in enumerate(_cfg_list(obj["walls"], "walls")):
        kp = f"walls[{i}]"
        _mapping(w, kp, ("p0", "p1", "z"), ("p0", "p1", "z"))
        pts = []
        for key in ("p0", "p1", "z"):
            xs = _cfg_list(w[key], f"{kp}.{key}")
            if len(xs) != 2:
                raise ConfigError("expected two numbers", f"{kp}.{key}")
            pts.append(tuple(_cfg_number(x, f"{kp}.{key}[{j}]") for j, x in enumerate(xs)))
        try:
            walls.append(Wall(pts[0], pts[1], *pts[2]))
        except ValueError as e:
            raise ConfigError(str(e), kp) from None
    sensors = []
    seen = set()
    for i, s in enumerate(_cfg_list(obj.get("sensors") or [], "sensors")):
        kp = f"sensors[{i}]"
        _mapping(s, kp, ("frame", "pose", "geometry", "elevations", "output"),
                 ("frame", "pose", "geometry"))
        frame = _cfg_frame(s["frame"], f"{kp}.frame")
        pose = _cfg_list(s["pose"], f"{kp}.pose")
        if len(pose) != 6:
            raise ConfigError("expected [x, y, z, yaw, pitch, roll]", f"{kp}.pose")
        pose = [_cfg_number(x, f"{kp}.pose[{j}]") for j, x in enumerate(pose)]
        elev = None
        if "elevations" in s:
            elev = tuple(_cfg_number(x, f"{kp}.elevations[{j}]")
                         for j, x in enumerate(_cfg_list(s["elevations"], f"{kp}.elevations")))
        out = _cfg_str(s["output"], f"{kp}.output") if "output" in s else None
        spec = SensorSpec(frame, RigidTransform.from_xyz_ypr(pose[:3], pose[3:]),
                          _cfg_geometry(s["geometry"], f"{kp}.geometry"), elev, out)
        if spec.filename in seen:
            raise ConfigError(f"two sensors write {spec.filename!r}", kp)
        if "/" in spec.filename or spec.filename.startswith("."):
            raise ConfigError(f"output must be a plain file name, got {spec.filename!r}", kp)
        seen.add(spec.filename)
        sensors.append(spec)
    return Scene(tuple(walls)), sensors


def read_scene(path):
    try:
        text = _read_text(path)
    except FormatError as e:
        raise ConfigError(str(e)) from None
    return parse_scene(text, f"{path}: ")
