"""Command line: ``render``, ``scaling`` and ``distribution``.

Exit status is 0 on success, 2 on a configuration error and 3 on an I/O error.
"""
from __future__ import annotations

import argparse
import sys

from .pipeline import MODES, RenderJob, emit_distribution, render, render_quantum, run_scaling_experiment
from .scene import load_scene

EXIT_CONFIG = 2
EXIT_IO = 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qraytrace", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("render", help="render a scene with one of the three arms")
    r.add_argument("--mode", choices=MODES, default="quantum")
    r.add_argument("--scene", required=True)
    r.add_argument("--out", required=True, help="output binary PPM")
    r.add_argument("--depth", type=int, default=2)
    r.add_argument("--path-bits", type=int, default=8)
    r.add_argument("--comparator-bits", type=int, default=8)
    r.add_argument("--counting-bits", type=int, default=10)
    r.add_argument("--value-bits", type=int, default=0, help="colours live in [0, 2**value_bits)")
    r.add_argument("--reps", type=int, default=8)
    r.add_argument("--rays", type=int, default=64)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--diag", help="per pixel-channel diagnostics CSV (quantum mode)")
    r.add_argument("--linear-csv", help="linear radiance dump x,y,r,g,b")
    r.add_argument("--circuit", action="store_true", help="sample outcomes from the statevector simulator")

    s = sub.add_parser("scaling", help="error against query budget for both arms")
    s.add_argument("--scene", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--reps", type=int, default=8)
    s.add_argument("--path-bits", type=int, default=20)
    s.add_argument("--comparator-bits", type=int, default=14)
    s.add_argument("--min-t", type=int, default=4)
    s.add_argument("--max-t", type=int, default=10)
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)

    d = sub.add_parser("distribution", help="dump the counting outcome law as CSV")
    d.add_argument("--theta", type=float, required=True)
    d.add_argument("--t-bits", type=int, required=True)
    d.add_argument("--out", required=True)
    return p


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "render":
            job = RenderJob(args.scene, args.mode, args.depth, args.path_bits, args.comparator_bits,
                            args.counting_bits, args.reps, args.rays, args.seed, args.value_bits,
                            args.circuit, args.out, args.diag, args.linear_csv)
            if job.mode == "quantum":
                render_quantum(job)
            else:
                render(job)
        elif args.command == "scaling":
            report = run_scaling_experiment(
                load_scene(args.scene), range(args.min_t, args.max_t + 1), args.trials, args.reps,
                args.path_bits, args.comparator_bits, args.depth, seed=args.seed)
            report.to_csv(args.out)
            print(report.summary())
        else:
            emit_distribution(args.theta, 1 << args.t_bits, args.out)
    except OSError as exc:
        print(f"qraytrace: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:  # ConfigError and SceneError included
        print(f"qraytrace: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


def main():
    sys.exit(run())

