"""Command-line interface.

Every subcommand reads a scene document. Results go to stdout as JSON or
CSV with 12 significant digits; errors go to stderr as one JSON record per
line. Exit status is 0 on success, 2 on validation errors and 3 on numeric
failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Optional, TextIO

import numpy as np

from .diagram import Arrangement, estimate_density
from .errors import HypowError, InvariantViolation, NumericError, SchemaError
from .inversion import InversionSphere, hyperbolic_invert_cycle, hyperbolic_invert_point
from .model import GeneralizedSphere, Kind, ModelPoint, ModelSurface, Plane
from .power import sample_secant_products, signed_power
from .radical import radical_center, radical_surface
from .scene import Scene, load_scene
from .svg import render_svg

SEED_ENV = "HYPOW_SEED"
SIG_DIGITS = 12


def g12(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, f".{SIG_DIGITS}g")
    return str(v)


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return float(format(v, f".{SIG_DIGITS}g")) if math.isfinite(v) else g12(v)
    return v


def dump_json(obj: Any) -> str:
    return json.dumps(_jsonable(obj))


def surface_dict(S: ModelSurface) -> dict:
    if isinstance(S, Plane):
        return {"normal": list(S.unit_normal), "offset": S.offset}
    return {"center": list(S.center), "radius": S.radius}


def sphere_dict(S: GeneralizedSphere) -> dict:
    out: dict = {"kind": S.kind.value, "carrier": surface_dict(S.surface)}
    if S.kind is Kind.SPHERE:
        out.update(center=list(S.center.coords), radius_h=S.radius_h)
    elif S.kind is Kind.HOROSPHERE:
        out.update(ideal=list(S.ideal.coords))
    elif S.kind is Kind.BRANCH:
        out.update(baseline=surface_dict(S.baseline.surface), distance_h=S.distance_h, side=S.side)
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # pragma: no cover - exercised through run_command
        raise SchemaError(f"arguments: {message}")


def _vector_arg(text: str, what: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise SchemaError(f"arguments: {what} must be comma-separated numbers, got {text!r}") from None


def _point(scene: Scene, text: str) -> ModelPoint:
    if text in scene.points:
        return scene.points[text]
    v = _vector_arg(text, "--point")
    if v.shape[0] != scene.dimension:
        raise SchemaError(f"arguments: --point needs {scene.dimension} coordinates")
    try:
        return ModelPoint(v)
    except HypowError as e:
        raise InvariantViolation(f"--point: {e}") from e


def _names(text: str, count: int, flag: str) -> list[str]:
    parts = text.split(",")
    if len(parts) != count:
        raise SchemaError(f"arguments: {flag} expects {count} comma-separated names")
    return parts


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SchemaError(f"environment: {SEED_ENV} must be an integer, got {raw!r}") from None


def _write_csv(rows: list, header: list, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([g12(x) for x in r])


def _sub_scene(scene: Scene, names: list[str], radical: tuple = ()) -> Scene:
    objs = {n: scene.objects[n] for n in names}
    return Scene(scene.dimension, objs, {}, {}, radical, None, scene.style)


# ---------------------------------------------------------------------------
# subcommands


def cmd_power(args, scene: Scene, out: TextIO) -> int:
    P = _point(scene, args.point)
    v = signed_power(P, scene.object(args.object))
    out.write(dump_json(v.as_dict()) + "\n")
    return 0


def cmd_secant_check(args, scene: Scene, out: TextIO) -> int:
    P = _point(scene, args.point)
    S = scene.object(args.object)
    rng = np.random.default_rng(args.seed)
    samples = sample_secant_products(P, S, args.samples, rng)
    prods = [s.product for s in samples]
    finite = [p for p in prods if math.isfinite(p)]
    spread = max(finite) - min(finite) if finite else math.nan
    ref = signed_power(P, S)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            _write_csv(
                [(i, s.product, s.regimes[0], s.regimes[1]) for i, s in enumerate(samples)],
                ["index", "product", "first", "second"],
                fh,
            )
    report = {
        "object": args.object,
        "samples": len(samples),
        "seed": args.seed,
        "reference_product": ref.product,
        "min_product": min(finite) if finite else math.nan,
        "max_product": max(finite) if finite else math.nan,
        "max_spread": spread,
        "cross_branch": sum(s.cross_branch for s in samples),
        "tolerance": args.tol,
        "pass": bool(finite) and spread < args.tol,
    }
    out.write(dump_json(report) + "\n")
    if not report["pass"]:
        raise NumericError(f"secant products spread {spread!r} exceeds {args.tol!r}")
    return 0


def cmd_invert(args, scene: Scene, out: TextIO) -> int:
    c = _point(scene, args.center)
    w = InversionSphere(c, args.radius)
    if (args.point is None) == (args.object is None):
        raise SchemaError("arguments: give exactly one of --point or --object")
    if args.point is not None:
        img = hyperbolic_invert_point(w, _point(scene, args.point))
        out.write(dump_json({"point": list(img.coords)}) + "\n")
    else:
        img = hyperbolic_invert_cycle(w, scene.object(args.object))
        out.write(dump_json(sphere_dict(img)) + "\n")
    return 0


def cmd_radical(args, scene: Scene, out: TextIO) -> int:
    a, b = _names(args.pair, 2, "--pair")
    res = radical_surface(scene.object(a), scene.object(b))
    carrier = surface_dict(res.hyperplane.surface) if res.hyperplane is not None else None
    out.write(dump_json({"pair": [a, b], "variant": res.variant.value, "carrier": carrier}) + "\n")
    if args.svg:
        Path(args.svg).write_text(render_svg(_sub_scene(scene, [a, b], ((a, b),))), encoding="utf-8")
    return 0


def cmd_radical_center(args, scene: Scene, out: TextIO) -> int:
    names = _names(args.triple, 3, "--triple")
    P = radical_center(*(scene.object(n) for n in names))
    out.write(dump_json({"triple": names, "point": list(P.coords)}) + "\n")
    if args.svg:
        pairs = ((names[0], names[1]), (names[0], names[2]), (names[1], names[2]))
        sub = _sub_scene(scene, names, pairs)
        sub = Scene(sub.dimension, sub.objects, {"center": P}, {}, pairs, None, sub.style)
        Path(args.svg).write_text(render_svg(sub), encoding="utf-8")
    return 0


def _arrangement(scene: Scene, clip_text: Optional[str]) -> tuple[Arrangement, list[str]]:
    names = [n for n in sorted(scene.objects) if scene.objects[n].kind is not Kind.GEODESIC]
    clip = scene.clip
    if clip_text is not None:
        v = _vector_arg(clip_text, "--clip")
        if v.shape[0] != 3:
            raise SchemaError("arguments: --clip expects x,y,radius_h")
        clip = (ModelPoint(v[:2]), float(v[2]))
    if clip is None:
        raise SchemaError("$.clip: density estimation needs a clip disk (scene 'clip' or --clip)")
    return Arrangement(scene.dimension, {i: scene.objects[n].sphere for i, n in enumerate(names)}, clip), names


def cmd_diagram(args, scene: Scene, out: TextIO) -> int:
    A, names = _arrangement(scene, args.clip)
    report = estimate_density(A, args.samples, args.seed, workers=args.workers)
    header = ["id", "name", *report.CSV_HEADER[1:]]
    rows = []
    for row in report.rows():
        name = names[row[0]] if row[0] != "all" else "all"
        rows.append((row[0], name, *row[1:]))
    buf = io.StringIO()
    _write_csv(rows, header, buf)
    out.write(buf.getvalue())

    pairs = tuple((names[i], names[j]) for i in range(len(names)) for j in range(i + 1, len(names)))
    dscene = Scene(scene.dimension, {n: scene.objects[n] for n in names}, scene.points, {}, pairs, A.clip, scene.style)
    svg = render_svg(dscene) if (args.svg or args.out_dir) else None
    if args.svg:
        Path(args.svg).write_text(svg, encoding="utf-8")
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / "cells.csv").write_text(buf.getvalue(), encoding="utf-8")
        (d / "diagram.svg").write_text(svg, encoding="utf-8")
        from .figures import diagram_figure

        diagram_figure(A, report, str(d / "diagram.png"), seed=args.seed)
    return 0


def cmd_render(args, scene: Scene, out: TextIO) -> int:
    svg = render_svg(scene)
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8")
    else:
        out.write(svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hypow", description="Power of a point, inversion and radical axes in the Poincare ball.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--scene", required=True, help="scene JSON file")
        sp.set_defaults(func=fn)
        return sp

    sp = add("power", cmd_power, "signed power of a point with respect to an object")
    sp.add_argument("--point", required=True, help="point name or comma-separated coordinates")
    sp.add_argument("--object", required=True)

    sp = add("secant-check", cmd_secant_check, "check that secant products agree")
    sp.add_argument("--point", required=True)
    sp.add_argument("--object", required=True)
    sp.add_argument("--samples", type=int, default=64)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--csv", help="write the individual products here")

    sp = add("invert", cmd_invert, "hyperbolic inversion of a point or an object")
    sp.add_argument("--center", required=True, help="point name or coordinates of the inversion center")
    sp.add_argument("--radius", type=float, required=True, help="hyperbolic radius")
    sp.add_argument("--point")
    sp.add_argument("--object")

    sp = add("radical", cmd_radical, "radical locus of two objects")
    sp.add_argument("--pair", required=True, help="two object names, comma-separated")
    sp.add_argument("--svg")

    sp = add("radical-center", cmd_radical_center, "radical center of three objects (plane only)")
    sp.add_argument("--triple", required=True, help="three object names, comma-separated")
    sp.add_argument("--svg")

    sp = add("diagram", cmd_diagram, "power diagram cells and Monte Carlo densities")
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--clip", help="x,y,radius_h; overrides the scene clip disk")
    sp.add_argument("--svg")
    sp.add_argument("--out-dir", help="write cells.csv, diagram.svg and diagram.png here")

    sp = add("render", cmd_render, "render the scene as SVG")
    sp.add_argument("--out")
    return p


def error_record(e: BaseException) -> str:
    if isinstance(e, HypowError):
        kind = "validation" if e.exit_code == 2 else "numeric"
        return json.dumps({"error": e.code, "kind": kind, "message": str(e)})
    return json.dumps({"error": type(e).__name__, "kind": "internal", "message": str(e)})


def run_command(argv: list[str], stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        if getattr(args, "samples", 2) < 1:
            raise SchemaError("arguments: --samples must be positive")
        scene = load_scene(args.scene)
        return args.func(args, scene, out)
    except HypowError as e:
        err.write(error_record(e) + "\n")
        return e.exit_code
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except (ValueError, ArithmeticError, OSError) as e:
        err.write(error_record(e) + "\n")
        return 3


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
