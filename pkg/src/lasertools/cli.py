"""Command line entry point.

Exit codes: 0 success, 2 configuration/usage error, 3 I/O error (missing,
unreadable or malformed input, unwritable output), 4 frame resolution
error, 5 stream mode produced no output.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .errors import ConfigError, FormatError, FrameError
from .merger import merge_scans
from .raycast import raycast_cloud, raycast_scan
from .virtualizer import check_frames, virtualize

log = logging.getLogger("lasertools")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_FRAME = 4
EXIT_NO_OUTPUT = 5


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _load_config(args):
    if not args.config:
        raise CliError(EXIT_CONFIG, "--config is required")
    try:
        return io.read_config(args.config)
    except FileNotFoundError:
        raise CliError(EXIT_CONFIG, f"config file not found: {args.config}") from None
    except OSError as e:
        raise CliError(EXIT_CONFIG, f"cannot read config {args.config}: {e.strerror}") from None
    except FormatError as e:
        raise CliError(EXIT_CONFIG, f"invalid config: {e}") from None


def _read_input(reader, path, *extra):
    try:
        return reader(path, *extra)
    except FileNotFoundError:
        raise CliError(EXIT_IO, f"input file not found: {path}") from None
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read {path}: {e.strerror}") from None
    except FormatError as e:
        raise CliError(EXIT_IO, f"malformed input: {e}") from None


def _write(writes):
    """Run ``(writer, path, value)`` triples; all computation is already done."""
    for writer, path, value in writes:
        try:
            writer(path, value)
        except OSError as e:
            raise CliError(EXIT_IO, f"cannot write {path}: {e.strerror or e}") from None


def _log_stats(label, stats):
    log.info("%s: %s", label, " ".join(f"{k}={v}" for k, v in stats.as_dict().items()))


# ---------------------------------------------------------------------------
# batch computations shared by file and stream modes


def _do_merge(cfg, scans):
    try:
        return merge_scans(scans, cfg.tree, cfg.merge, z_band=cfg.merge_z_band)
    except FrameError as e:
        raise CliError(EXIT_FRAME, f"frame resolution failed: {e}") from None


def _do_virtualize(cfg, cloud):
    try:
        return virtualize(cloud, cfg.tree, cfg.virtualize, z_band=cfg.virtualize_z_band)
    except FrameError as e:
        raise CliError(EXIT_FRAME, f"frame resolution failed: {e}") from None


# ---------------------------------------------------------------------------
# subcommands


def run_merge(args) -> int:
    cfg = _load_config(args)
    if cfg.merge is None:
        raise CliError(EXIT_CONFIG, "config has no 'merge' section")
    if args.stream:
        return run_stream(args, cfg)
    n = len(cfg.merge.inputs)
    if len(args.inputs) != n:
        raise CliError(EXIT_CONFIG, f"expected {n} input scan file(s) for inputs "
                                    f"{list(cfg.merge.inputs)}, got {len(args.inputs)}")
    scans = [_read_input(io.read_scan, p) for p in args.inputs]
    merged, cloud, stats = _do_merge(cfg, scans)
    _log_stats("merge", stats)
    out = args.output or cfg.scan_output
    writes = []
    if out:
        writes.append((io.write_scan, out, merged))
    if cloud is not None:
        writes.append((io.write_cloud, cfg.cloud_output, cloud))
    _write(writes)
    if not out:
        sys.stdout.write(io.dumps_scan(merged) + "\n")
    return EXIT_OK


def run_virtualize(args) -> int:
    cfg = _load_config(args)
    if cfg.virtualize is None:
        raise CliError(EXIT_CONFIG, "config has no 'virtualize' section")
    if args.stream:
        return run_stream(args, cfg)
    if len(args.inputs) > 1:
        raise CliError(EXIT_CONFIG, "virtualize takes a single cloud file")
    src = args.inputs[0] if args.inputs else cfg.cloud_input
    if not src:
        raise CliError(EXIT_CONFIG, "no cloud input given (argument or virtualize.cloud_input)")
    out = args.output or cfg.virtual_output
    combined = cfg.virtualize.combined_output
    if not combined and not out:
        raise CliError(EXIT_CONFIG, "separate virtual scans need an output directory (-o)")

    cloud = _read_input(io.read_cloud, src)
    results = _do_virtualize(cfg, cloud)
    for frame, _, stats in results:
        _log_stats(f"virtualize {frame}", stats)
    scans = [scan for _, scan, _ in results]
    if combined:
        if out:
            _write([(io.write_scans, out, scans)])
        else:
            sys.stdout.write(io.dumps_scans(scans))
        return EXIT_OK
    outdir = Path(out)
    if not outdir.is_dir():
        raise CliError(EXIT_IO, f"output directory does not exist: {outdir}")
    _write([(io.write_scan, outdir / f"{frame}.json", scan) for frame, scan, _ in results])
    return EXIT_OK


def run_gen_scene(args) -> int:
    if len(args.inputs) != 1:
        raise CliError(EXIT_CONFIG, "gen-scene takes exactly one scene file")
    path = args.inputs[0]
    try:
        scene, sensors = io.read_scene(path)
    except FileNotFoundError:
        raise CliError(EXIT_IO, f"scene file not found: {path}") from None
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read {path}: {e.strerror}") from None
    except FormatError as e:
        raise CliError(EXIT_CONFIG, f"invalid scene: {e}") from None
    outdir = Path(args.output or ".")
    if not outdir.is_dir():
        raise CliError(EXIT_IO, f"output directory does not exist: {outdir}")
    writes = []
    for s in sensors:
        if s.elevations is not None:
            cloud = raycast_cloud(scene, s.pose, s.geometry, s.elevations, frame=s.frame)
            writes.append((io.write_cloud, outdir / s.filename, cloud))
            log.info("%s: %d points", s.frame, len(cloud))
        else:
            scan = raycast_scan(scene, s.pose, s.geometry, frame=s.frame)
            writes.append((io.write_scan, outdir / s.filename, scan))
            log.info("%s: %d beams", s.frame, len(scan))
    _write(writes)
    return EXIT_OK


def run_check_config(args) -> int:
    cfg = _load_config(args)
    log.warning("transforms: %d edge(s) over %d frame(s)", len(cfg.tree), len(cfg.tree.frames))
    if cfg.merge is not None:
        dest = cfg.merge.destination_frame
        if len(cfg.tree) and dest not in cfg.tree:
            log.warning("merge: destination_frame %r is not in the transform tree; only inputs "
                        "already in that frame can be merged", dest)
        else:
            log.warning("merge: ok (%d input(s) -> %s)", len(cfg.merge.inputs), dest)
    if cfg.virtualize is not None:
        try:
            check_frames(cfg.virtualize.base_frame, cfg.tree, cfg.virtualize)
        except FrameError as e:
            raise CliError(EXIT_FRAME, f"virtualize: {e}") from None
        log.warning("virtualize: ok (%d virtual frame(s) via %s)",
                    len(cfg.virtualize.virtual_frames), cfg.virtualize.base_frame)
    if cfg.merge is None and cfg.virtualize is None:
        log.warning("config has neither a merge nor a virtualize section")
    return EXIT_OK


# ---------------------------------------------------------------------------
# stream mode


def _batches(lines):
    """Yield ``(first_line_no, [(line_no, text), ...], terminated)`` per batch."""
    batch = []
    for lineno, line in enumerate(lines, 1):
        if line.strip():
            batch.append((lineno, line))
        elif batch:
            yield batch[0][0], batch, True
            batch = []
    if batch:
        yield batch[0][0], batch, False


def run_stream(args, cfg, stdin=None, stdout=None) -> int:
    """Process blank-line separated batches of JSON records from stdin.

    Merge batches hold one scan per configured input, in input order, and
    produce one merged scan line. Virtualize batches hold one cloud record
    and produce one scan line per virtual frame followed by a blank line.
    """
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    merging = args.command == "merge"
    expected = len(cfg.merge.inputs) if merging else 1
    done = 0
    for number, (_, records, terminated) in enumerate(_batches(stdin), 1):
        if not terminated and len(records) < expected:
            log.warning("batch %d: incomplete at end of input (%d of %d records); dropped",
                        number, len(records), expected)
            continue
        if len(records) != expected:
            log.warning("batch %d: expected %d record(s), got %d; skipped",
                        number, expected, len(records))
            continue
        try:
            if merging:
                scans = [io.loads_scan(text, f"line {ln}: ") for ln, text in records]
                merged, _, stats = _do_merge(cfg, scans)
                _log_stats(f"batch {number}", stats)
                out = io.dumps_scan(merged) + "\n"
            else:
                ln, text = records[0]
                cloud = io.loads_cloud_record(text, f"line {ln}: ")
                results = _do_virtualize(cfg, cloud)
                out = io.dumps_scans(scan for _, scan, _ in results) + "\n"
        except FormatError as e:
            log.warning("batch %d: malformed record: %s; skipped", number, e)
            continue
        except CliError as e:
            log.warning("batch %d: %s; skipped", number, e)
            continue
        stdout.write(out)
        stdout.flush()
        done += 1
    if done == 0:
        log.error("no batch produced output")
        return EXIT_NO_OUTPUT
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file")
    common.add_argument("-o", "--output", help="output file or directory")
    common.add_argument("--stream", action="store_true",
                        help="read line-delimited JSON batches from stdin")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="more diagnostics on stderr (repeatable)")

    parser = argparse.ArgumentParser(
        prog="lasertools",
        description="Merge planar laser scans and synthesize virtual scans from point clouds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("merge", parents=[common], help="merge several scans into one")
    p.add_argument("inputs", nargs="*", help="scan files, one per configured input, in order")
    p = sub.add_parser("virtualize", parents=[common], help="virtual scans from a cloud")
    p.add_argument("inputs", nargs="*", help="PCD cloud file (default: virtualize.cloud_input)")
    p = sub.add_parser("gen-scene", parents=[common], help="raycast scans/clouds from a scene")
    p.add_argument("inputs", nargs="*", help="scene file")
    p = sub.add_parser("check-config", parents=[common], help="validate a configuration")
    p.set_defaults(inputs=[])
    return parser


COMMANDS = {
    "merge": run_merge,
    "virtualize": run_virtualize,
    "gen-scene": run_gen_scene,
    "check-config": run_check_config,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("lasertools: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(level)
    log.propagate = False
    if args.stream and args.inputs:
        log.error("--stream cannot be combined with input files")
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except CliError as e:
        log.error("%s", e)
        return e.code
    except ConfigError as e:
        log.error("%s", e)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
