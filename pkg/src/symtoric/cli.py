"""Command line interface and fan-file (de)serialization."""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analytic import DEFAULT_SEED
from .catalog import FamilySpec, enumerate_smooth_fano_surfaces, family_fan
from .certify import certify, format_fraction, summary_lines
from .fan import Fan, build_fan, validate_smooth_fano
from .polytope import barycenter, polytope_from_fan
from .symmetry import fan_automorphisms, is_symmetric

ALLOWED_FIELDS = ("dim", "rays", "max_cones", "name")
FAN_SUFFIXES = (".fan", ".json")


class FanFileError(ValueError):
    """Malformed or inconsistent fan file."""


@dataclass(frozen=True)
class FanFile:
    dim: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...] | None = None
    name: str | None = None

    def to_fan(self) -> Fan:
        return build_fan(self.dim, self.rays, self.max_cones, name=self.name or "")


def _no_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise FanFileError(f"duplicate field {k!r}")
        out[k] = v
    return out


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_fan_file(text: str) -> FanFile:
    """Strictly parse the JSON fan format; errors carry line and column when syntactic."""
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise FanFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise FanFileError("top level must be a JSON object")
    unknown = sorted(set(data) - set(ALLOWED_FIELDS))
    if unknown:
        raise FanFileError(f"unknown field(s): {', '.join(unknown)}")
    for key in ("dim", "rays"):
        if key not in data:
            raise FanFileError(f"missing field {key!r}")

    dim = data["dim"]
    if not _is_int(dim) or dim < 1:
        raise FanFileError("dim must be a positive integer")
    rays = data["rays"]
    if not isinstance(rays, list) or not rays:
        raise FanFileError("rays must be a nonempty list")
    for i, r in enumerate(rays):
        if not isinstance(r, list) or not all(_is_int(x) for x in r):
            raise FanFileError(f"ray {i} must be a list of integers")
        if len(r) != dim:
            raise FanFileError(f"dimension mismatch: ray {i} has length {len(r)}, expected {dim}")
        if not any(r):
            raise FanFileError(f"ray {i} is zero")

    cones = data.get("max_cones")
    if cones is not None:
        if not isinstance(cones, list):
            raise FanFileError("max_cones must be a list")
        for j, c in enumerate(cones):
            if not isinstance(c, list) or not all(_is_int(x) for x in c):
                raise FanFileError(f"cone {j} must be a list of integers")
            for x in c:
                if not 0 <= x < len(rays):
                    raise FanFileError(f"index {x} out of range")
            if len(c) != dim:
                raise FanFileError(f"dimension mismatch: cone {j} has {len(c)} rays, expected {dim}")
        cones = tuple(tuple(c) for c in cones)

    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise FanFileError("name must be a string")
    return FanFile(dim, tuple(tuple(r) for r in rays), cones, name)


def fan_file_from_fan(fan: Fan) -> FanFile:
    return FanFile(fan.dim, fan.rays, fan.max_cones, fan.name or None)


def serialize_fan_file(ff: FanFile) -> str:
    data: dict = {"dim": ff.dim, "rays": [list(r) for r in ff.rays]}
    if ff.max_cones is not None:
        data["max_cones"] = [list(c) for c in ff.max_cones]
    if ff.name is not None:
        data["name"] = ff.name
    return json.dumps(data, sort_keys=True) + "\n"


def serialize_fan(fan: Fan) -> str:
    return serialize_fan_file(fan_file_from_fan(fan))


def load_fan(path) -> Fan:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FanFileError(f"cannot read {path}: {exc}") from None
    try:
        return parse_fan_file(text).to_fan()
    except FanFileError:
        raise
    except ValueError as exc:
        raise FanFileError(str(exc)) from None


def to_jsonable(obj):
    """Fractions to "p/q" strings, floats to 12 significant digits, numpy to Python."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.12g}")
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False)


# commands ---------------------------------------------------------------


def cmd_check(args) -> int:
    fan = load_fan(args.file)
    report = validate_smooth_fano(fan)
    if args.json:
        print(dumps(report.to_dict()))
        return 0
    for key, value in report.to_dict().items():
        if key != "diagnostics":
            print(f"{key}: {'yes' if value else 'no'}")
    for d in report.diagnostics:
        print(f"  {d}")
    return 0


def cmd_certify(args) -> int:
    fan = load_fan(args.file)
    report = certify(fan, analytic=args.analytic, seed=args.seed, necessary_only=args.necessary_only)
    if args.json:
        print(dumps(report.to_dict()))
    else:
        print("\n".join(summary_lines(report)))
    return 0


def cmd_symmetry(args) -> int:
    fan = load_fan(args.file)
    report = validate_smooth_fano(fan, probes=0)
    if not report.is_fano:
        raise FanFileError("not a smooth toric Fano fan: " + "; ".join(report.diagnostics))
    group = fan_automorphisms(fan)
    verdict = is_symmetric(fan, group)
    if args.json:
        print(dumps({
            "group_order": group.order,
            "generators": [list(map(list, g.matrix)) for g in group.generators],
            "is_symmetric": verdict.is_symmetric,
            "fixed_space_basis": [list(v) for v in verdict.fixed_space_basis],
        }))
        return 0
    print(f"automorphism group order: {group.order}")
    for g in group.generators:
        print("generator: " + " ".join(str(list(row)) for row in g.matrix))
    if verdict.is_symmetric:
        print("symmetric: yes")
    else:
        for v in verdict.fixed_space_basis:
            print("invariant vector: (" + ", ".join(format_fraction(x) for x in v) + ")")
        print("symmetric: no")
    return 0


def cmd_barycenter(args) -> int:
    fan = load_fan(args.file)
    try:
        b = barycenter(polytope_from_fan(fan))
    except ValueError as exc:
        raise FanFileError(str(exc)) from None
    print("(" + ", ".join(format_fraction(x) for x in b.point) + ")")
    return 0


def cmd_catalog(args) -> int:
    try:
        spec = FamilySpec(args.family, tuple(args.params))
    except ValueError as exc:
        raise FanFileError(str(exc)) from None
    sys.stdout.write(serialize_fan(family_fan(spec)))
    return 0


def cmd_classify(args) -> int:
    rows = []
    for fan in enumerate_smooth_fano_surfaces():
        r = certify(fan)
        rows.append((fan, r))
    if args.json:
        print(dumps([
            {
                "name": fan.name,
                "rays": [list(x) for x in fan.rays],
                "symmetric": r.symmetric.is_symmetric,
                "barycenter": list(r.barycenter.point),
                "r_centrally_symmetric": r.r_centrally_symmetric,
                "verdict": r.verdict,
            }
            for fan, r in rows
        ]))
        return 0
    print(f"{'name':<8}{'rays':>5}  {'symmetric':<10}{'barycenter':<16}verdict")
    for fan, r in rows:
        point = "(" + ", ".join(format_fraction(x) for x in r.barycenter.point) + ")"
        sym = "yes" if r.symmetric.is_symmetric else "no"
        print(f"{fan.name:<8}{len(fan.rays):>5}  {sym:<10}{point:<16}{r.verdict}")
    print(f"{len(rows)} classes, {sum(r.symmetric.is_symmetric for _, r in rows)} symmetric")
    return 0


def _certify_path(path: str, analytic: bool, seed: int) -> tuple[str, dict | None, str | None]:
    try:
        report = certify(load_fan(path), analytic=analytic, seed=seed)
    except (FanFileError, ValueError) as exc:
        return path, None, str(exc)
    return path, to_jsonable(report.to_dict()), None


def cmd_batch(args) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        raise FanFileError(f"{directory} is not a directory")
    paths = sorted(str(p) for p in directory.iterdir() if p.suffix in FAN_SUFFIXES and p.is_file())
    if args.jobs < 1:
        raise FanFileError("--jobs must be at least 1")
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(_certify_path, paths, [args.analytic] * len(paths), [args.seed] * len(paths)))
    failed = False
    if args.json:
        out = {}
        for path, report, error in results:
            out[Path(path).name] = report if error is None else {"error": error}
            failed |= error is not None
        print(dumps(out))
    else:
        for path, report, error in results:
            name = Path(path).name
            if error is not None:
                failed = True
                print(f"{name}: error: {error}")
            else:
                print(f"{name}: {report['verdict']}")
    return 2 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symtoric", description="Certify Einstein-Kähler metrics on symmetric toric Fano manifolds."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a fan file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("certify", help="run the certification pipeline")
    p.add_argument("file")
    p.add_argument("--analytic", action="store_true", help="attach numerical evidence")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--json", action="store_true")
    p.add_argument("--necessary-only", action="store_true", help="skip the automorphism search")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("symmetry", help="automorphism group and symmetric test")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_symmetry)

    p = sub.add_parser("barycenter", help="exact barycenter of the polytope")
    p.add_argument("file")
    p.set_defaults(func=cmd_barycenter)

    p = sub.add_parser("catalog", help="emit a family fan (V k | S m k | X m k | W m)")
    p.add_argument("family", choices=["V", "S", "X", "W"])
    p.add_argument("params", type=int, nargs="+")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("classify-surfaces", help="enumerate smooth toric Fano surfaces")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("batch", help="certify every .fan/.json file in a directory")
    p.add_argument("dir")
    p.add_argument("--jobs", type=int, default=4)
    p.add_argument("--analytic", action="store_true")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    try:
        return args.func(args)
    except FanFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
