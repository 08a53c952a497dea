"""Command-line entry point.

Exit codes: 0 success, 1 a check failed, 2 bad configuration, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .config import Scenario, SweepSpec, preset
from .errors import ConfigError, EigenSolverError, NumericalAbort
from .experiments import (RunResult, cmd_convergence, cmd_run, cmd_spectrum, cmd_sweep,
                          cmd_verify, to_csv, write_sweep)
from .model import Ancilla, Conventional

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3


def _emit(text: str, out: Path | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)
    logging.info("wrote %s", out / name)


def load_scenario(args: argparse.Namespace) -> Scenario:
    scn = Scenario.load(args.config) if args.config else Scenario()
    if getattr(args, "driver", None) == "conventional":
        scn = scn.replace(driver=Conventional())
    elif getattr(args, "driver", None) == "ancilla" and not isinstance(scn.driver, Ancilla):
        scn = scn.replace(driver=Ancilla())
    if getattr(args, "c", None) is not None:
        scn = scn.replace(driver=Ancilla(args.c))
    bath = {k: getattr(args, k) for k in ("gz", "gx") if getattr(args, k, None) is not None}
    if bath:
        scn = scn.replace(bath=dataclasses.replace(scn.bath, **bath))
    if getattr(args, "dt", None) is not None:
        scn = scn.replace(dt=args.dt)
    return scn


def run_spectrum(args) -> int:
    table, plot = cmd_spectrum(load_scenario(args), args.points)
    _emit(table, args.out, "spectrum.csv")
    if args.out is not None:
        _emit(plot, args.out, "spectrum.svg")
    return EXIT_OK


def run_single(args) -> int:
    res = cmd_run(load_scenario(args))
    if args.format == "json":
        text = json.dumps(dataclasses.asdict(res), indent=2) + "\n"
    else:
        text = to_csv(list(RunResult.HEADER), [res.row()])
    _emit(text, args.out, f"run.{args.format}")
    return EXIT_OK


def run_sweep(args) -> int:
    template = load_scenario(args)
    if args.sweep:
        try:
            spec = SweepSpec.from_dict(json.loads(Path(args.sweep).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read sweep spec {args.sweep}: {exc}") from exc
    else:
        spec = preset(args.preset)
    if args.num is not None:
        spec = dataclasses.replace(spec, axis1=dataclasses.replace(spec.axis1, num=args.num[0]),
                                   axis2=dataclasses.replace(spec.axis2, num=args.num[1]))
    if args.dt is not None:
        spec = dataclasses.replace(spec, dt=args.dt)
    result = cmd_sweep(template, spec, args.out, args.parallel)
    if args.out is not None:
        write_sweep(result, args.out)
    else:
        sys.stdout.write(result.csv())
    failed = [r for r in result.rows if r["status"] != "ok"]
    if failed:
        logging.warning("%d grid points failed", len(failed))
        return EXIT_ABORT
    return EXIT_OK


def run_verify(args) -> int:
    report = cmd_verify(load_scenario(args) if args.config else None)
    _emit(json.dumps(report, indent=2, default=float) + "\n", args.out, "verify.json")
    return EXIT_OK if report["pass"] else EXIT_CHECK


def run_convergence(args) -> int:
    scn = load_scenario(args)
    rep = cmd_convergence(scn)
    ok = rep["final_change"] <= args.tolerance
    rep.update(tolerance=args.tolerance, converged=ok)
    _emit(json.dumps(rep, indent=2) + "\n", args.out, "convergence.json")
    return EXIT_OK if ok else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pairanneal",
                                     description="Ancilla-pair annealing driver under a common bath.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, overrides=True):
        p.add_argument("--config", type=Path, help="scenario JSON file")
        p.add_argument("--out", type=Path, help="output directory (default: stdout)")
        if overrides:
            p.add_argument("--dt", type=float, help="RK4 step in ns")
            p.add_argument("--driver", choices=("ancilla", "conventional"))
            p.add_argument("--c", type=float, help="pair-driver coefficient (implies ancilla)")
            p.add_argument("--gz", type=float, help="uniform longitudinal coupling")
            p.add_argument("--gx", type=float, help="uniform transverse coupling")

    p = sub.add_parser("spectrum", help="instantaneous eigenvalues along the anneal")
    common(p)
    p.add_argument("--points", type=int, default=101)
    p.set_defaults(func=run_spectrum)

    p = sub.add_parser("run", help="one open-system anneal")
    common(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=run_single)

    p = sub.add_parser("sweep", help="two-axis grid of paired runs")
    common(p)
    p.add_argument("--preset", choices=("fig2", "fig3", "fig4"), default="fig2")
    p.add_argument("--sweep", type=Path, help="sweep spec JSON (overrides --preset)")
    p.add_argument("--num", type=int, nargs=2, metavar=("N1", "N2"),
                   help="override the point counts of both axes")
    p.add_argument("--parallel", type=int, default=1)
    p.set_defaults(func=run_sweep)

    p = sub.add_parser("verify", help="structural self-checks, JSON report")
    common(p, overrides=False)
    p.set_defaults(func=run_verify)

    p = sub.add_parser("convergence", help="population change at t=T when dt is halved")
    common(p)
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.set_defaults(func=run_convergence)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalAbort, EigenSolverError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
