"""Command-line front end: ``critset {classify,curve,build,verify,sample}``.

Exit codes:
    classify  0 ok, 1 malformed input, 2 inconclusive degree estimate
    curve     0 ok, 1 bad level/index/corner, 4 round-trip mismatch
    build     0 ok, 1 malformed config, 3 target refused
    verify    0 all entries pass, 1 malformed config, 3 target refused, 4 some entry failed
    sample    0 ok, 1 malformed config, 3 target refused
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .builder import build, grid_rows, verify_construction
from .gapset import GapSet, GapSetError, InconclusiveError, cantor_gapset, estimate_degree, gap_sum
from .sfc import (
    CurveError,
    DyadicCube,
    DyadicInterval,
    cube_preimage,
    curve_point,
    dn_check,
    dn_constant,
    interval_to_cube,
    max_level,
)
from .target import ConstructionRefused

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCONCLUSIVE = 2
EXIT_REFUSED = 3
EXIT_FAILED = 4

# extra explicit levels of a generated target beyond the evaluation cap
GENERATOR_MARGIN = 10


class ConfigError(ValueError):
    pass


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, numpy scalars become Python ones."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "infinity" if x > 0 else "-infinity"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _write_text(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8", newline="\n")


def _read_json(path: str | None):
    if path is None:
        raise ConfigError("--input is required")
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _target_from(spec, depth: int) -> GapSet:
    if not isinstance(spec, dict):
        raise ConfigError("target must be a JSON object")
    if "cantor" in spec:
        gen = spec["cantor"]
        ratio = float(gen.get("ratio", 1.0 / 3.0))
        levels = int(gen.get("depth", depth + 1 + GENERATOR_MARGIN))
        return cantor_gapset(ratio, levels)
    return GapSet.from_json(spec)


def load_config(args) -> dict:
    """Merge the JSON config at ``--input`` with command-line overrides."""
    raw = _read_json(args.input) if args.input else {}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    cfg = {
        "n": raw.get("n", 1),
        "s": raw.get("s"),
        "depth": raw.get("depth", 6),
        "seed": raw.get("seed", 0),
        "sample_budget": raw.get("sample_budget", 10_000),
        "target": raw.get("target", {"cantor": {"ratio": 1.0 / 3.0}}),
    }
    for key, flag in (("n", "n"), ("s", "s"), ("depth", "depth"), ("seed", "seed"), ("sample_budget", "budget")):
        value = getattr(args, flag, None)
        if value is not None:
            cfg[key] = value
    try:
        cfg["n"], cfg["depth"], cfg["seed"] = int(cfg["n"]), int(cfg["depth"]), int(cfg["seed"])
        cfg["sample_budget"] = int(cfg["sample_budget"])
        if cfg["s"] is None:
            raise ConfigError("s is required (config key or --s)")
        cfg["s"] = float(cfg["s"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    if cfg["n"] < 1 or cfg["depth"] < 0 or cfg["sample_budget"] < 0:
        raise ConfigError("n must be >= 1, depth and sample_budget >= 0")
    return cfg


def _build_from(cfg: dict):
    target = _target_from(cfg["target"], cfg["depth"])
    return build(target, cfg["n"], cfg["s"], cfg["depth"])


# ---------------------------------------------------------------- subcommands


def cmd_classify(args) -> int:
    A = GapSet.from_json(_read_json(args.input))
    ts = args.t or [1.0, 1.5, 2.0]
    out = {
        "measure": A.measure(),
        "is_measure_zero": A.is_measure_zero(args.tol),
        "gap_count": A.n_gaps,
        "gap_sums": {},
        "is_zero_k": {},
    }
    for t in ts:
        ds = gap_sum(A, t)
        out["gap_sums"][repr(t)] = {"value": ds.value, "tail_estimate": ds.tail_estimate,
                                    "total_estimate": ds.total_estimate}
    status = EXIT_OK
    try:
        degree = estimate_degree(A)
        out["degree_estimate"] = degree
    except InconclusiveError as exc:
        degree = None
        out["degree_estimate"] = None
        out["diagnostic"] = str(exc)
        status = EXIT_INCONCLUSIVE
    for t in ts:
        # a 0_t set needs measure zero and a convergent series at exponent t
        out["is_zero_k"][repr(t)] = None if degree is None else bool(out["is_measure_zero"] and t < degree)
    _write_text(dumps(out), args.output)
    return status


def cmd_curve(args) -> int:
    n = args.n
    if args.mode == "point":
        t = 0.0 if args.t is None else args.t
        depth = args.depth if args.depth is not None else min(max_level(n) - 1, 20)
        out = {"n": n, "t": t, "depth": depth, "point": curve_point(n, t, depth).tolist()}
    elif args.mode == "encode":
        cube = interval_to_cube(n, DyadicInterval(args.level, args.index))
        out = {"interval": {"level": args.level, "index": args.index},
               "cube": {"level": cube.level, "corner": list(cube.corner)}}
    elif args.mode == "decode":
        if args.corner is None:
            raise CurveError("--corner is required for decode")
        cube = DyadicCube(n, args.level, tuple(args.corner))
        iv = cube_preimage(n, cube)
        out = {"cube": {"level": cube.level, "corner": list(cube.corner)},
               "interval": {"level": iv.level, "index": iv.index}}
    elif args.mode == "roundtrip":
        if args.level % n:
            raise CurveError(f"interval level {args.level} is not divisible by n={n}")
        count, bad = 1 << args.level, 0
        for index in range(count):
            cube = interval_to_cube(n, DyadicInterval(args.level, index))
            bad += cube_preimage(n, cube).index != index
        out = {"n": n, "level": args.level, "intervals": count, "mismatches": bad}
        _write_text(dumps(out), args.output)
        return EXIT_OK if bad == 0 else EXIT_FAILED
    else:
        pairs = args.budget if args.budget is not None else 100_000
        w = dn_check(n, pairs, seed=args.seed or 0)
        bound = dn_constant(n)
        out = {"n": n, "pairs": pairs, "K_empirical": w.modulus, "K_bound": bound,
               "witness": list(w.pair), "violations": int(w.modulus > bound)}
    _write_text(dumps(out), args.output)
    return EXIT_OK


def cmd_build(args) -> int:
    cfg = load_config(args)
    params = _build_from(cfg)
    out = {"constants": params.constants(), "sequence": params.seq.to_json(),
           "tree": params.tree.to_json(max_depth=min(params.cap, 4))}
    _write_text(dumps(out), args.output)
    return EXIT_OK


def _grid_csv(params, per_axis: int) -> str:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{i + 1}" for i in range(params.n)] + ["f", "grad_norm"])
    for row in grid_rows(params, per_axis):
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def cmd_verify(args) -> int:
    cfg = load_config(args)
    params = _build_from(cfg)
    report = verify_construction(params, cfg["sample_budget"], cfg["seed"])
    payload = report.to_json()
    if not report.passed:
        payload["failed"] = [e.name for e in report.failures()]
    _write_text(dumps(payload), args.output)
    if args.grid_output:
        _write_text(_grid_csv(params, args.grid), args.grid_output)
    for entry in report.failures():
        print(f"FAIL {entry.name}: measured {entry.measured:.6g} > bound {entry.bound:.6g}"
              f" at {entry.witness}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_sample(args) -> int:
    cfg = load_config(args)
    params = _build_from(cfg)
    _write_text(_grid_csv(params, args.grid), args.output)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="critset", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="degree sums and degree estimate of a gap set")
    p.add_argument("--input", required=True, help="gap-set JSON")
    p.add_argument("--output")
    p.add_argument("--t", type=float, nargs="*", help="exponents for the degree sums")
    p.add_argument("--tol", type=float, default=1e-12, help="measure-zero tolerance")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("curve", help="space-filling curve codec and modulus check")
    p.add_argument("--mode", choices=["point", "encode", "decode", "roundtrip", "modulus"], default="modulus")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--t", type=float)
    p.add_argument("--depth", type=int)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--corner", type=int, nargs="+")
    p.add_argument("--budget", type=int, help="number of random pairs for --mode modulus")
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.set_defaults(func=cmd_curve)

    for name, func, text in (("build", cmd_build, "build the construction and dump its constants"),
                             ("verify", cmd_verify, "build and verify; exit 4 on any failed entry"),
                             ("sample", cmd_sample, "write f and |Df| on a regular grid as CSV")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--input", help="config JSON {n, s, depth, target, seed, sample_budget}")
        p.add_argument("--output")
        p.add_argument("--n", type=int)
        p.add_argument("--s", type=float)
        p.add_argument("--depth", type=int)
        p.add_argument("--budget", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--grid", type=int, default=101, help="grid points per axis")
        if name == "verify":
            p.add_argument("--grid-output", help="optional CSV grid path")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    paths = [p for p in (getattr(args, "input", None), getattr(args, "output", None),
                         getattr(args, "grid_output", None)) if p]
    if len(set(paths)) != len(paths):
        print("error: input and output paths must differ", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ConstructionRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (ConfigError, GapSetError, CurveError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
