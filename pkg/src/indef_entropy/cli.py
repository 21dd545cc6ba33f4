"""Command line front end.

    indef-entropy <verb> [--scenario FILE] [--seed N] [--out DIR]
                         [--i-max N] [--tol-quadrature X] [--tol-conv X]

Verbs: ``check`` (identity and property suites), ``solve`` (interpolation
plus entropy identities), ``szego`` (limit experiment), ``gen`` (emit a
scenario file from a seed).  Exit status 0 means every requested experiment
passed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .scenario import (
    ALL_EXPERIMENTS,
    Scenario,
    default_scenario,
    run_scenario,
)

_VERB_EXPERIMENTS = {
    "check": ("identity_suite",),
    "solve": ("interpolation", "entropy_identity", "outer_check"),
    "szego": ("szego",),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="indef-entropy",
        description="Indefinite Toeplitz interpolation / entropy / Szego runner",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in ("check", "solve", "szego", "gen"):
        sp = sub.add_parser(verb)
        sp.add_argument("--scenario", metavar="FILE", default=None)
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--kappa", type=int, default=0,
                        help="negative index target for generated instances")
        sp.add_argument("--out", metavar="DIR", default="reports")
        sp.add_argument("--i-max", type=int, default=32)
        sp.add_argument("--tol-quadrature", type=float, default=None)
        sp.add_argument("--tol-conv", type=float, default=None)
    return parser


def _load_scenario(args, experiments) -> Scenario:
    if args.scenario is not None:
        with open(args.scenario) as fh:
            data = json.load(fh)
        data["output_dir"] = args.out
        if experiments is not None:
            data["experiments"] = list(experiments)
        data.setdefault("i_max", args.i_max)
        scenario = Scenario.from_json(data)
    else:
        scenario = default_scenario(
            args.seed,
            kappa_target=args.kappa,
            experiments=experiments or ALL_EXPERIMENTS,
            output_dir=args.out,
            i_max=args.i_max,
        )
    tol = dict(scenario.tolerances)
    if args.tol_quadrature is not None:
        tol["quadrature"] = args.tol_quadrature
    if args.tol_conv is not None:
        tol["conv"] = args.tol_conv
    return Scenario(
        seed=scenario.seed,
        p=scenario.p,
        n=scenario.n,
        instance=scenario.instance,
        parameter=scenario.parameter,
        experiments=scenario.experiments,
        tolerances=tol,
        output_dir=args.out,
        i_max=args.i_max if args.scenario is None else scenario.i_max,
        depth=scenario.depth,
    )


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.verb == "gen":
        scenario = _load_scenario(args, None)
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "scenario.json")
        with open(path, "w") as fh:
            json.dump(scenario.to_json(), fh, sort_keys=True, indent=2)
            fh.write("\n")
        print(path)
        return 0
    scenario = _load_scenario(args, _VERB_EXPERIMENTS[args.verb])
    status = run_scenario(scenario)
    report = os.path.join(scenario.output_dir, "report.json")
    print(f"{'PASS' if status == 0 else 'FAIL'}: report at {report}")
    return status


if __name__ == "__main__":
    sys.exit(main())
