import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
import yaml

from lasertools import LaserScan, PointCloud3
from lasertools import io
from lasertools.errors import ConfigError, FormatError

from oracles import pose_matrix

frame_names = st.from_regex(r"[A-Za-z_/][A-Za-z0-9_/]{0,15}", fullmatch=True)
finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6)


def random_scan(rng, frame="laser"):
    inc = rng.uniform(1e-3, 0.2)
    amin = rng.uniform(-math.pi, 0)
    n = int(rng.integers(1, 400))
    amax = amin + (n - 1) * inc
    rmin, rmax = sorted(rng.uniform(0, 60, 2))
    ranges = rng.uniform(rmin, rmax, n)
    ranges[rng.random(n) < 0.2] = np.inf
    ranges[rng.random(n) < 0.05] = rmin
    return LaserScan(frame, amin, amax, inc, rmin, rmax, ranges)


def same_scan_bits(a, b):
    assert a.frame == b.frame
    for k in io.GEOMETRY_KEYS:
        assert np.float64(getattr(a, k)).tobytes() == np.float64(getattr(b, k)).tobytes(), k
    assert a.ranges.tobytes() == b.ranges.tobytes()


# -- scans -----------------------------------------------------------------


def test_scan_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    for k in range(50):
        s = random_scan(rng, f"frame_{k}")
        p = tmp_path / "s.json"
        io.write_scan(p, s)
        same_scan_bits(io.read_scan(p), s)


def test_scan_inf_token(tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"frame": "f", "angle_min": 0, "angle_max": 1, "angle_increment": 0.5, '
                 '"range_min": 0, "range_max": 5, "ranges": [1, "inf", 2.5]}')
    s = io.read_scan(p)
    assert s.ranges[1] == math.inf
    assert s.ranges.tolist()[::2] == [1.0, 2.5]


def test_scan_negative_zero_survives():
    s = LaserScan("f", -0.0, 1.0, 0.5, 0.0, 5.0, [np.inf, 1.0, 2.0])
    back = io.loads_scan(io.dumps_scan(s))
    assert math.copysign(1.0, back.angle_min) == -1.0


@pytest.mark.parametrize("text, fragment", [
    ('{"frame": "f", "angle_min": 0, "angle_max": 1, "angle_increment": 0.5, '
     '"range_min": 0, "range_max": 5, "ranges": [1, 2]}', "expected 3"),
    ('{"frame": "f", "angle_min": 0, "angle_max": 1, "angle_increment": 0.5, '
     '"range_min": 0, "range_max": 5, "ranges": [1, NaN, 2]}', "NaN"),
    ('{"frame": "f", "angle_min": 0, "angle_max": 1, "angle_increment": 0.5, '
     '"range_min": 0, "range_max": 5, "ranges": [1, "nan", 2]}', "ranges[1]"),
    ('{"frame": "f", "angle_min": "0", "angle_max": 1, "angle_increment": 0.5, '
     '"range_min": 0, "range_max": 5, "ranges": [1, 1, 2]}', "angle_min"),
    ('{"frame": "f", "angle_min": 0, "angle_max": 1, "angle_increment": 0.5, '
     '"range_min": 0, "range_max": 5, "ranges": [1, 1, 2], "intensities": []}', "unknown"),
    ('{"frame": "f"}', "missing"),
    ('{"frame": "has space", "angle_min": 0, "angle_max": 1, "angle_increment": 0.5, '
     '"range_min": 0, "range_max": 5, "ranges": [1, 1, 2]}', "frame"),
    ('{"frame": "f",\n "angle_min": }', "line 2"),
    ('[]', "object"),
])
def test_scan_errors(text, fragment):
    with pytest.raises(FormatError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        io.loads_scan(text)


def test_multi_record(tmp_path):
    rng = np.random.default_rng(1)
    scans = [random_scan(rng, f"s{k}") for k in range(4)]
    p = tmp_path / "all.jsonl"
    io.write_scans(p, scans)
    back = io.read_scans(p)
    assert [s.frame for s in back] == ["s0", "s1", "s2", "s3"]
    for a, b in zip(back, scans):
        same_scan_bits(a, b)


# -- clouds ----------------------------------------------------------------


def test_cloud_round_trip(tmp_path):
    c = PointCloud3("velodyne", [[0.1, -2.5, 3e-17], [1e300, -0.0, 5], [1 / 3, 2 / 3, -7]])
    p = tmp_path / "c.pcd"
    io.write_cloud(p, c)
    back = io.read_cloud(p)
    assert back.frame == "velodyne"
    assert back.points.tobytes() == c.points.tobytes()


def test_cloud_foreign_pcd_needs_frame(tmp_path):
    p = tmp_path / "c.pcd"
    p.write_text("VERSION .7\nFIELDS x y z\nSIZE 4 4 4\nTYPE F F F\nCOUNT 1 1 1\n"
                 "WIDTH 2\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS 2\nDATA ascii\n1 2 3\n4 5 6\n")
    with pytest.raises(FormatError, match="frame"):
        io.read_cloud(p)
    assert len(io.read_cloud(p, frame="lidar")) == 2


@pytest.mark.parametrize("body, fragment", [
    ("WIDTH 5\nHEIGHT 1\nPOINTS 5\nDATA ascii\n1 2 3\n1 2 3\n1 2 3\n1 2 3\n", "declares 5"),
    ("WIDTH 3\nHEIGHT 1\nPOINTS 3\nDATA ascii\n1 2 3\nnan 2 3\n1 2 3\n", "point 1"),
    ("WIDTH 1\nHEIGHT 1\nPOINTS 1\nDATA binary\n", "unsupported"),
    ("WIDTH 2\nHEIGHT 1\nPOINTS 3\nDATA ascii\n1 2 3\n", "does not match"),
    ("WIDTH 1\nHEIGHT 1\nPOINTS 1\nDATA ascii\n1 2\n", "expected 3"),
    ("WIDTH 1\nHEIGHT 1\nPOINTS 1\n", "DATA"),
])
def test_cloud_errors(body, fragment):
    text = "# frame: f\nFIELDS x y z\nTYPE F F F\n" + body
    with pytest.raises(FormatError, match=fragment):
        io.loads_cloud(text)


def test_cloud_record_round_trip():
    c = PointCloud3("v", np.random.default_rng(2).normal(size=(20, 3)))
    back = io.loads_cloud_record(io.dumps_cloud_record(c))
    assert back.points.tobytes() == c.points.tobytes() and back.frame == "v"


# -- config ------------------------------------------------------------------


CONFIG = """\
transforms:
  - laser_frame scan1 0 0 0 0 0.3 0
  - 0 0 0.2 1.0 0 0 base_link laser_frame 1000
merge:
  destination_frame: base_link
  inputs: [front, rear]
  scan_output: merged.json
  cloud_output: merged.pcd
virtualize:
  base_frame: base_link
  virtual_frames: [scan1]
  combined_output: true
  geometry:
    angle_increment: 0.01
    range_min: 0.1
    range_max: 30
"""


def test_config_parse(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text(CONFIG)
    cfg = io.read_config(p)
    assert cfg.tree.frozen
    np.testing.assert_allclose(cfg.tree.lookup("scan1", "laser_frame").matrix(),
                               pose_matrix((0, 0, 0), (0, 0.3, 0)), atol=1e-12)
    assert cfg.merge.inputs == ("front", "rear") and cfg.merge.emit_cloud
    assert cfg.merge.output_geometry is None
    assert cfg.scan_output == str(tmp_path / "merged.json")
    assert cfg.virtualize.combined_output
    assert cfg.virtualize.output_geometry.wraps


def test_config_empty_transforms_same_frame():
    cfg = io.parse_config("merge:\n  destination_frame: laser\n  inputs: [a]\n")
    assert cfg.tree.lookup("laser", "laser").is_identity()


@pytest.mark.parametrize("text, fragment", [
    ("transforms:\n  - a b 0 0 0 0 0 0\n  - b a 0 0 0 0 0 0\n", r"transforms\[1\].*duplicate"),
    ("transforms:\n  - a b 0 0 0 0 0 0\n  - b c 0 0 0 0 0 0\n  - c a 1 0 0 0 0 0\n", "cycle"),
    ("merge:\n  destination_frame: a\n  inputs: [x]\n  colour: red\n", r"merge\.colour"),
    ("merge:\n  inputs: [x]\n", r"merge\.destination_frame"),
    ("virtualize:\n  base_frame: a\n  virtual_frames: [b]\n", r"virtualize\.geometry"),
    ("virtualize:\n  base_frame: a\n  virtual_frames: [b, b]\n  geometry: {angle_increment: 0.1, "
     "range_min: 0, range_max: 1}\n", "duplicate"),
    ("transforms:\n  - a b 0 0 0\n", r"transforms\[0\]"),
    ("bogus: 1\n", "bogus"),
    ("merge: [\n", "line"),
    ("merge:\n  destination_frame: a\n  inputs: [x]\n  geometry: {angle_min: 0, angle_increment: 0.1, "
     "range_min: 0, range_max: 1}\n", "angle_max"),
])
def test_config_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        io.parse_config(text)


def test_transform_line_orders():
    a = io.parse_transform_line("laser_frame scan1 0 0 0 0 0.3 0")
    b = io.parse_transform_line("0 0 0 0 0.3 0 laser_frame scan1 1000")
    assert a == b
    assert a.ypr == (0.0, 0.3, 0.0)


def random_config(rng, base_dir=None):
    frames = [f"f{k}" for k in range(int(rng.integers(1, 8)))]
    transforms = []
    for k in range(1, len(frames)):
        parent = frames[int(rng.integers(k))]
        transforms.append(io.StaticTransform(parent, frames[k], tuple(rng.normal(size=3)),
                                             tuple(rng.uniform(-math.pi, math.pi, 3))))
    text = {"transforms": [t.line() for t in transforms]}
    g = {"angle_min": float(rng.uniform(-3, 0)), "angle_max": float(rng.uniform(0, 3)),
         "angle_increment": float(rng.uniform(0.001, 0.1)), "range_min": float(rng.uniform(0, 1)),
         "range_max": float(rng.uniform(2, 100))}
    if rng.random() < 0.7:
        text["merge"] = {"destination_frame": frames[0], "inputs": [f"in{k}" for k in range(3)],
                         "geometry": g}
        if rng.random() < 0.5:
            text["merge"]["cloud_output"] = "c.pcd"
    if rng.random() < 0.7:
        text["virtualize"] = {"base_frame": frames[0], "virtual_frames": frames[::-1],
                              "combined_output": bool(rng.random() < 0.5), "geometry": g,
                              "z_band": sorted(rng.normal(size=2).tolist())}
    return io.parse_config(yaml.safe_dump(text), base_dir)


def test_config_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(50):
        cfg = random_config(rng)
        back = io.parse_config(io.dumps_config(cfg))
        assert io.config_to_obj(back) == io.config_to_obj(cfg)
        for p, c, t in cfg.tree.edges:
            assert back.tree.lookup(c, p).isclose(t, atol=1e-12)


# -- scenes -----------------------------------------------------------------


def test_scene_parse():
    scene, sensors = io.parse_scene(
        "walls:\n  - {p0: [2, -5], p1: [2, 5], z: [-1, 1]}\n"
        "sensors:\n  - frame: front\n    pose: [0, 0, 0.3, 0, 0, 0]\n"
        "    geometry: {angle_min: -1, angle_max: 1, angle_increment: 0.5, range_min: 0, range_max: 9}\n"
        "  - frame: velo\n    pose: [0, 0, 1, 0, 0, 0]\n    elevations: [-0.1, 0, 0.1]\n"
        "    geometry: {angle_increment: 0.1, range_min: 0, range_max: 9}\n")
    assert len(scene.walls) == 1
    assert [s.filename for s in sensors] == ["front.json", "velo.pcd"]


@pytest.mark.parametrize("text", [
    "walls:\n  - {p0: [0, 0], p1: [0, 0], z: [0, 1]}\n",
    "walls:\n  - {p0: [0, 0], p1: [1, 0]}\n",
    "walls: []\nsensors:\n  - {frame: a, pose: [0, 0, 0], geometry: {angle_increment: 1, range_min: 0, range_max: 1}}\n",
    "walls: []\nsensors:\n  - {frame: a, pose: [0, 0, 0, 0, 0, 0], output: ../x.json, "
    "geometry: {angle_increment: 1, range_min: 0, range_max: 1}}\n",
])
def test_scene_errors(text):
    with pytest.raises(ConfigError):
        io.parse_scene(text)


# -- totality -------------------------------------------------------------------


PARSERS = [
    lambda t: io.loads_scan(t),
    lambda t: io.loads_cloud(t, frame="f"),
    lambda t: io.loads_cloud_record(t),
    lambda t: io.parse_config(t),
    lambda t: io.parse_scene(t),
]


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=300), st.integers(0, len(PARSERS) - 1))
def test_parsers_total_on_text(text, which):
    try:
        PARSERS[which](text)
    except FormatError:
        pass


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=200))
def test_read_total_on_bytes(tmp_path_factory, data):
    p = tmp_path_factory.mktemp("fuzz") / "f"
    p.write_bytes(data)
    for reader in (io.read_scan, io.read_cloud, io.read_config, io.read_scene, io.read_scans):
        try:
            reader(p)
        except FormatError:
            pass
