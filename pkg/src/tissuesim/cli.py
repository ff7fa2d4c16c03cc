"""Command-line interface.

    tissuesim mesh      --mask tissue.pgm --threshold 128 --spacing 0.2 --out mesh.json
    tissuesim mesh      --polygon shape.json --spacing 0.2 --out mesh.json
    tissuesim simulate  --scenario exp.json --out results/ [--frame-stride N]
    tissuesim angles    --scenario exp.json --out results/ --angle 0 --angle 30

`simulate` writes energy.csv, frames/*.svg and final_state.json; `angles`
repeats an insertion-style scenario once per angle (subdirectory each) and
adds a comparison.csv of the total-energy columns.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .csvio import write_comparison_csv
from .meshgen import Polygon, cull_outside, delaunay, load_polygon, sample_points, save_mesh
from .pgm import load_mask_file
from .runner import build_mesh, run, write_outputs
from .scenario import MeshSource, ScenarioError, load_scenario
from . import meshgen


def _cmd_mesh(args) -> int:
    if (args.mask is None) == (args.polygon is None):
        raise ScenarioError("exactly one of --mask or --polygon is required")
    if args.mask is not None:
        if args.threshold is None:
            raise ScenarioError("--threshold is required with --mask")
        source = MeshSource(kind="mask", path=Path(args.mask), threshold=args.threshold, spacing=args.spacing)
        if not source.path.is_file():
            raise ScenarioError(f"mask file not found: {source.path}")
    else:
        source = MeshSource(kind="polygon", path=Path(args.polygon), spacing=args.spacing)
        if not source.path.is_file():
            raise ScenarioError(f"polygon file not found: {source.path}")
    mesh = build_mesh(source)
    save_mesh(mesh, args.out)
    print(f"wrote {args.out}: {len(mesh.vertices)} vertices, {len(mesh.triangles)} triangles")
    return 0


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    out_dir = Path(args.out) if args.out else scenario.output_dir
    if out_dir is None:
        raise ScenarioError("no output directory: pass --out or set output.directory")
    if args.frame_stride is not None:
        from dataclasses import replace

        scenario = replace(scenario, frame_stride=args.frame_stride)
    output = run(scenario)
    write_outputs(output, scenario, out_dir)
    print(f"wrote {out_dir}: {len(output.energy_series)} steps, {len(output.frames)} frames")
    return 0


def _cmd_angles(args) -> int:
    scenario = load_scenario(args.scenario)
    out_dir = Path(args.out) if args.out else scenario.output_dir
    if out_dir is None:
        raise ScenarioError("no output directory: pass --out or set output.directory")
    if args.frame_stride is not None:
        from dataclasses import replace

        scenario = replace(scenario, frame_stride=args.frame_stride)
    labels = args.angle
    totals = []
    for label in labels:
        try:
            angle = float(label)
        except ValueError:
            raise ScenarioError(f"--angle {label!r} is not a number") from None
        angled = scenario.with_angle(angle)
        output = run(angled)
        write_outputs(output, angled, out_dir / f"angle_{label}")
        totals.append([r.total for r in output.energy_series])
    write_comparison_csv(labels, totals, out_dir / "comparison.csv")
    print(f"wrote {out_dir}: {len(labels)} angle runs + comparison.csv")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tissuesim", description="Deterministic 2D soft-tissue simulation"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mesh", help="triangulate a mask or polygon into a mesh document")
    p.add_argument("--mask", metavar="PATH", help="PGM (P2/P5) tissue image")
    p.add_argument("--threshold", metavar="N", type=int, help="tissue gray level (0-255, inclusive)")
    p.add_argument("--polygon", metavar="PATH", help="polygon JSON with a 'vertices' key")
    p.add_argument("--spacing", metavar="X", type=float, required=True, help="sample pitch, world units")
    p.add_argument("--out", metavar="PATH", required=True, help="mesh JSON destination")
    p.set_defaults(func=_cmd_mesh)

    p = sub.add_parser("simulate", help="run a scenario")
    p.add_argument("--scenario", metavar="PATH", required=True)
    p.add_argument("--out", metavar="DIR", help="output directory (default: scenario output.directory)")
    p.add_argument("--frame-stride", metavar="N", type=int)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("angles", help="run one insertion scenario at several angles")
    p.add_argument("--scenario", metavar="PATH", required=True)
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--frame-stride", metavar="N", type=int)
    p.add_argument(
        "--angle",
        metavar="DEG",
        action="append",
        required=True,
        help="insertion angle, repeatable; column labels use the value as given",
    )
    p.set_defaults(func=_cmd_angles)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
