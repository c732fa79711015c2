"""``affcorr`` command line: simulate, affine, validate, estimate-normal.

Records are line-delimited JSON (see :mod:`affcorr.records`). Records that
cannot be processed go to a sidecar stream (``--sidecar``, default standard
error) as ``{"line": n, "reason": code, "message": ...}`` and processing
continues.

Exit codes: 0 success, 1 record or validation failures, 2 usage error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
import time
from typing import IO, Iterator

import numpy as np

from . import kernels
from .affine import AffineMap, affine_elementwise
from .errors import AffCorrError
from .inverse import AffineCorrespondence, angular_error, estimate_normal
from .records import CorrespondenceRecord, dumps
from .sim import SimConfig, generate_scene, scene_to_records

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class CliIOError(Exception):
    pass


@contextlib.contextmanager
def _open(path: str, mode: str, default: IO[str]):
    if path == "-":
        yield default
        return
    try:
        fh = open(path, mode, encoding="utf-8")
    except OSError as exc:
        raise CliIOError(f"cannot open {path}: {exc.strerror}") from None
    with fh:
        yield fh


def _lines(fh: IO[str]) -> Iterator[tuple[int, str]]:
    for ln, line in enumerate(fh, start=1):
        line = line.strip()
        if line:
            yield ln, line


def _sidecar_entry(ln: int, exc: AffCorrError, raw: str) -> str:
    return dumps({"line": ln, "reason": exc.reason, "message": str(exc), "input": raw})


def _parse(line: str, require) -> tuple[dict, CorrespondenceRecord]:
    rec = CorrespondenceRecord.from_json(line, require)
    return json.loads(line), rec


def _u64(text: str) -> int:
    try:
        val = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return val


def _nonneg_int(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid count {text!r}") from None
    if val < 0:
        raise argparse.ArgumentTypeError("count must be non-negative")
    return val


def _pos_float(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not (math.isfinite(val) and val > 0):
        raise argparse.ArgumentTypeError("value must be positive and finite")
    return val


def _nonneg_float(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not (math.isfinite(val) and val >= 0):
        raise argparse.ArgumentTypeError("value must be non-negative and finite")
    return val


# -- subcommands -------------------------------------------------------------


def cmd_simulate(args, stdout, stderr) -> int:
    try:
        cfg = SimConfig(
            seed=args.seed,
            scenes=args.scenes,
            points=args.points,
            rotation_bound=args.rotation_bound,
            translation_bound=args.translation_bound,
            translation_min=args.translation_min,
            depth_range=(args.depth_min, args.depth_max),
            normal_cone=args.normal_cone,
            fov=args.fov,
        )
    except AffCorrError as exc:
        print(f"affcorr simulate: {exc}", file=stderr)
        return EXIT_USAGE
    with _open(args.out, "w", stdout) as out:
        for index in range(cfg.scenes):
            try:
                scene = generate_scene(cfg, index)
            except AffCorrError as exc:
                print(f"affcorr simulate: scene {index}: {exc}", file=stderr)
                return EXIT_USAGE
            for rec in scene_to_records(scene):
                out.write(rec.to_json() + "\n")
    return EXIT_OK


def cmd_affine(args, stdout, stderr) -> int:
    failed = 0
    with _open(args.inp, "r", args.stdin) as inp, _open(args.out, "w", stdout) as out, _open(
        args.sidecar, "w", stderr
    ) as side:
        for ln, line in _lines(inp):
            try:
                raw, rec = _parse(line, ("R", "t", "n", "d", "p1"))
                res = affine_elementwise(rec.pose(), rec.plane(), rec.point1())
            except AffCorrError as exc:
                failed += 1
                side.write(_sidecar_entry(ln, exc, line) + "\n")
                continue
            raw["A"] = list(res.affine.entries())
            raw["p2"] = [res.p2.u, res.p2.v]
            raw["s"] = res.s
            out.write(dumps(raw) + "\n")
    return EXIT_FAIL if failed else EXIT_OK


def _scaled_rows(A: np.ndarray) -> np.ndarray:
    """Per-row ``max(1, ||A||_inf)`` for (N, 4) row-major affine entries."""
    rows = np.maximum(np.abs(A[:, 0]) + np.abs(A[:, 1]), np.abs(A[:, 2]) + np.abs(A[:, 3]))
    return np.maximum(1.0, rows)


def validate_records(records: list[tuple[int, CorrespondenceRecord]], eps: float, tol_fd: float,
                     tol_algebraic: float, tol_transfer: float) -> tuple[dict, list[dict]]:
    """Check every record through all computation routes.

    Returns the aggregate error maxima and the list of per-record failures.
    """
    stats = {
        "max_algebraic_error": 0.0,
        "max_fd_error": 0.0,
        "max_transfer_error": 0.0,
        "max_record_affine_error": 0.0,
    }
    failures: list[dict] = []
    if not records:
        return stats, failures

    R = np.array([r.R for _, r in records])
    t = np.array([r.t for _, r in records])
    n = np.array([r.n for _, r in records])
    d = np.array([r.d for _, r in records])
    p1 = np.array([r.p1 for _, r in records])
    out = kernels.check_batch(R, t, n, d, p1, eps)

    status = out["status"]
    A = out["A_elem"]
    scale = _scaled_rows(A)
    alg = np.maximum(
        np.max(np.abs(A - out["A_unified"]), axis=1),
        np.max(np.abs(A - out["A_hom"]) / scale[:, None], axis=1),
    )
    fd = np.max(np.abs(out["A_fd"] - out["A_hom"]), axis=1) / scale
    transfer = np.max(np.abs(out["p2"] - out["p2_3d"]), axis=1)

    for k, (ln, rec) in enumerate(records):
        if status[k] != kernels.OK:
            failures.append({"line": ln, "reason": kernels.STATUS_REASONS[int(status[k])]})
            continue
        problems = []
        stats["max_algebraic_error"] = max(stats["max_algebraic_error"], float(alg[k]))
        stats["max_fd_error"] = max(stats["max_fd_error"], float(fd[k]))
        stats["max_transfer_error"] = max(stats["max_transfer_error"], float(transfer[k]))
        if not alg[k] <= tol_algebraic:
            problems.append(("path-mismatch", float(alg[k])))
        if not fd[k] <= tol_fd:
            problems.append(("fd-mismatch", float(fd[k])))
        if not transfer[k] <= tol_transfer:
            problems.append(("transfer-mismatch", float(transfer[k])))
        if rec.A is not None:
            err = float(np.max(np.abs(np.array(rec.A) - A[k])) / scale[k])
            stats["max_record_affine_error"] = max(stats["max_record_affine_error"], err)
            if not err <= tol_algebraic:
                problems.append(("affine-mismatch", err))
        if rec.p2 is not None:
            err = float(np.max(np.abs(np.array(rec.p2) - out["p2"][k])))
            stats["max_transfer_error"] = max(stats["max_transfer_error"], err)
            if not err <= tol_transfer:
                problems.append(("p2-mismatch", err))
        if problems:
            failures.append(
                {"line": ln, "reason": problems[0][0], "errors": {name: err for name, err in problems}}
            )
    return stats, failures


def cmd_validate(args, stdout, stderr) -> int:
    start = time.perf_counter()
    parsed: list[tuple[int, CorrespondenceRecord]] = []
    failures: list[dict] = []
    processed = 0
    with _open(args.inp, "r", args.stdin) as inp:
        for ln, line in _lines(inp):
            processed += 1
            try:
                parsed.append((ln, CorrespondenceRecord.from_json(line)))
            except AffCorrError as exc:
                failures.append({"line": ln, "reason": exc.reason, "message": str(exc)})
    stats, record_failures = validate_records(parsed, args.eps, args.tol_fd, args.tol_algebraic, args.tol_transfer)
    failures = sorted(failures + record_failures, key=lambda f: f["line"])
    report = {
        "records": processed,
        "failures": len(failures),
        **stats,
        "tolerances": {"fd": args.tol_fd, "algebraic": args.tol_algebraic, "transfer": args.tol_transfer},
        "eps": args.eps,
        "backend": kernels.BACKEND,
        "wall_time_s": time.perf_counter() - start,
        "failed": failures,
    }
    with _open(args.out, "w", stdout) as out:
        out.write(json.dumps(report, indent=2) + "\n")
    return EXIT_FAIL if failures else EXIT_OK


def cmd_estimate_normal(args, stdout, stderr) -> int:
    failed = 0
    with _open(args.inp, "r", args.stdin) as inp, _open(args.out, "w", stdout) as out, _open(
        args.sidecar, "w", stderr
    ) as side:
        for ln, line in _lines(inp):
            try:
                raw, rec = _parse(line, ("R", "t", "p1", "p2", "A"))
                ac = AffineCorrespondence(rec.point1(), rec.point2(), AffineMap(*rec.A))
                est = estimate_normal(rec.pose(), ac)
            except AffCorrError as exc:
                failed += 1
                side.write(_sidecar_entry(ln, exc, line) + "\n")
                continue
            raw["n_est"] = est.normal.tolist()
            raw["d_est"] = est.distance
            raw["residual"] = est.residual
            raw["conditioning"] = est.conditioning
            if rec.n is not None and rec.d is not None:
                truth = rec.plane()
                raw["angular_error"] = angular_error(est.normal, truth.normal)
                raw["d_rel_error"] = abs(est.distance - truth.distance) / abs(truth.distance)
            out.write(dumps(raw) + "\n")
    return EXIT_FAIL if failed else EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affcorr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def stream_flags(p, inp=True, out=True, sidecar=False):
        if inp:
            p.add_argument("--in", dest="inp", default="-", help="input records ('-' for stdin)")
        if out:
            p.add_argument("--out", default="-", help="output path ('-' for stdout)")
        if sidecar:
            p.add_argument("--sidecar", default="-", help="failed-record stream ('-' for stderr)")

    p = sub.add_parser("simulate", help="generate synthetic correspondence records")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--scenes", type=_nonneg_int, default=1)
    p.add_argument("--points", type=_nonneg_int, default=1)
    p.add_argument("--rotation-bound", type=_nonneg_float, default=0.5, help="radians")
    p.add_argument("--translation-bound", type=_nonneg_float, default=1.0)
    p.add_argument("--translation-min", type=_nonneg_float, default=0.0)
    p.add_argument("--depth-min", type=_pos_float, default=0.5)
    p.add_argument("--depth-max", type=_pos_float, default=20.0)
    p.add_argument("--normal-cone", type=_nonneg_float, default=1.0, help="half-angle, radians")
    p.add_argument("--fov", type=_pos_float, default=0.5, help="half-width of the p1 window")
    stream_flags(p, inp=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("affine", help="compute A, p2 and s for each record")
    stream_flags(p, sidecar=True)
    p.set_defaults(func=cmd_affine)

    p = sub.add_parser("validate", help="cross-check closed form against the numerical oracles")
    stream_flags(p)
    p.add_argument("--eps", type=_pos_float, default=1e-6, help="finite-difference step")
    p.add_argument("--tol-fd", type=_pos_float, default=1e-6)
    p.add_argument("--tol-algebraic", type=_pos_float, default=1e-14)
    p.add_argument("--tol-transfer", type=_pos_float, default=1e-9)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("estimate-normal", help="recover the tangent plane from pose and affine map")
    stream_flags(p, sidecar=True)
    p.set_defaults(func=cmd_estimate_normal)
    return parser


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.stdin = stdin or sys.stdin
    if getattr(args, "eps", 1e-6) > 1e-2 or getattr(args, "eps", 1e-6) < 1e-10:
        print("affcorr: --eps must lie in [1e-10, 1e-2]", file=stderr)
        return EXIT_USAGE
    try:
        return args.func(args, stdout, stderr)
    except CliIOError as exc:
        print(f"affcorr: {exc}", file=stderr)
        return EXIT_IO
    except (BrokenPipeError, UnicodeDecodeError, OSError) as exc:
        print(f"affcorr: I/O error: {exc}", file=stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
