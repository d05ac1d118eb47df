"""Command-line entry point: ``bankdyn <command> [options]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, dump_config, load_config
from .errors import BankDynError, ConfigError
from .integrator import COMPLETED, integrate
from .model import BankState, classify_region, singularity_loci
from .output import (
    Series,
    SeriesBundle,
    derived_series,
    render_svg_lines,
    trajectory_charts,
    write_table,
    write_trajectory_csv,
)
from .scenario import ScenarioResult, compare_sets, run_set

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, help="run configuration file (INI sections)")
    parser.add_argument("--out-dir", default=default if suppress else "out", help="output directory")
    parser.add_argument("--svg", action="store_true", default=default if suppress else False,
                        help="also write SVG charts")
    parser.add_argument("--workers", type=int, default=default,
                        help="parallel processes for sweeps (overrides config)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bankdyn", description="Bank deposit/loan dynamics and reserve requirements.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("loci", help="print singularity locus coefficients and t=0 boundaries")
    _global_options(p, suppress=True)

    p = sub.add_parser("simulate", help="integrate one trajectory")
    _global_options(p, suppress=True)
    p.add_argument("--d0", type=float, required=True, help="initial deposit volume")
    p.add_argument("--l0", type=float, required=True, help="initial loan volume")
    p.add_argument("--t0", type=float, default=0.0, help="start time (years)")
    p.add_argument("--name", default="simulate", help="output file stem")

    for name, text in (("sweep", "run scenario sets, write per-scenario CSVs and comparisons"),
                       ("gwm", "reserve reports and integrated LDR reserve"),
                       ("validate", "demand-slope diagnosis of each scenario")):
        p = sub.add_parser(name, help=text)
        _global_options(p, suppress=True)
        p.add_argument("--set", dest="set_name", default="all", help="set name from the config, or 'all'")

    p = sub.add_parser("config", help="print the effective configuration")
    _global_options(p, suppress=True)
    return parser


def _loci(cfg: RunConfig, args) -> int:
    deposit, loan = singularity_loci(cfg.params, cfg.rates)
    print(f"k = {deposit.k:.6g}")
    for name, loc in (("deposit", deposit), ("loan", loan)):
        print(f"{name} locus: k(D+L) = {loc.c0:.6g} {loc.cs:+.6g} sin(2 pi {loc.freq:g} t) "
              f"{loc.cc:+.6g} cos(2 pi {loc.freq:g} t)")
    b_dep, b_loan = deposit.boundary_volume(0.0), loan.boundary_volume(0.0)
    lo, hi = sorted((b_dep, b_loan))
    print(f"t=0 boundaries: D+L = {b_dep:.6g} (deposit), D+L = {b_loan:.6g} (loan)")
    print(f"regions at t=0: 1 if D+L < {lo:.6g}; 2 if {lo:.6g} < D+L < {hi:.6g}; 3 if D+L > {hi:.6g}")
    return EXIT_OK


def _charts(derived, cfg: RunConfig, out: Path, stem: str) -> None:
    kinds = ("volumes", "rates", "phase", "ldr", "gwm")
    for kind, bundle in zip(kinds, trajectory_charts(derived, cfg.regulation, stem)):
        render_svg_lines(bundle, out / f"{stem}_{kind}.svg")


def _simulate(cfg: RunConfig, args) -> int:
    out = Path(args.out_dir)
    state0 = BankState(args.t0, args.d0, args.l0)
    region = classify_region(singularity_loci(cfg.params, cfg.rates), args.d0, args.l0, args.t0,
                             cfg.integrator.singular_eps)
    traj = integrate(cfg.params, cfg.rates, state0, cfg.integrator)
    derived = derived_series(cfg.params, cfg.rates, cfg.regulation, traj)
    path = write_trajectory_csv(traj, derived, out / f"{args.name}.csv")
    if args.svg:
        _charts(derived, cfg, out, args.name)
    print(f"region {region}, {len(traj)} samples, termination={traj.termination}, t_final={traj.t[-1]:.6g}")
    for ev in traj.events:
        print(f"event: {ev.which} locus at t={ev.t_star:.10g} (D={ev.D:.6g}, L={ev.L:.6g}, |alpha|={ev.residual:.2e})")
    print(f"wrote {path}")
    return EXIT_OK if traj.termination == COMPLETED else EXIT_RUNTIME


def _selected_sets(cfg: RunConfig, name: str):
    sets = cfg.scenario.sets()
    if name == "all":
        return sets
    chosen = [s for s in sets if s.name == name]
    if not chosen:
        raise ConfigError(f"no scenario set named {name!r} (have: {', '.join(s.name for s in sets)})")
    return chosen


def _run_sets(cfg: RunConfig, args) -> dict[str, list[ScenarioResult]]:
    workers = args.workers if args.workers else cfg.scenario.workers
    return {
        s.name: run_set(cfg.params, cfg.rates, cfg.regulation, s, cfg.integrator,
                        theta=cfg.scenario.theta, workers=workers)
        for s in _selected_sets(cfg, args.set_name)
    }


def _status(results: dict[str, list[ScenarioResult]]) -> int:
    ok = all(r.termination == COMPLETED for rs in results.values() for r in rs)
    return EXIT_OK if ok else EXIT_RUNTIME


def _write_comparisons(results, out: Path) -> None:
    names = list(results)
    header = ("label", "ldr0_a", "ldr0_b", "D0_a", "L0_a", "D0_b", "L0_b", "integrated_gwm_a",
              "integrated_gwm_b", "gwm_difference", "ldr_min_a", "ldr_max_a", "ldr_min_b", "ldr_max_b")
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            rows = [(r.label, r.ldr0_a, r.ldr0_b, *r.initial_a, *r.initial_b, r.integrated_gwm_a,
                     r.integrated_gwm_b, r.gwm_difference, r.ldr_min_a, r.ldr_max_a, r.ldr_min_b, r.ldr_max_b)
                    for r in compare_sets(results[a], results[b])]
            write_table(out / f"compare_{a}_{b}.csv", header, rows)


def _set_charts(cfg: RunConfig, set_name: str, results: list[ScenarioResult], out: Path) -> None:
    ldr = [Series(r.label, r.reserves.t, r.reserves.ldr) for r in results if r.reserves is not None]
    gwm = [Series(r.label, r.reserves.t, r.reserves.gwm_ldr) for r in results if r.reserves is not None]
    phase = [Series(r.label, r.trajectory.D, r.trajectory.L) for r in results if r.trajectory is not None]
    reg = cfg.regulation
    if ldr:
        render_svg_lines(SeriesBundle(f"{set_name}: LDR", "t (years)", "L/D", ldr,
                                      guides=[("lambda_l", reg.lambda_l), ("lambda_u", reg.lambda_u)]),
                         out / f"{set_name}_ldr.svg")
        render_svg_lines(SeriesBundle(f"{set_name}: LDR reserve", "t (years)", "GWM", gwm),
                         out / f"{set_name}_gwm.svg")
    if phase:
        render_svg_lines(SeriesBundle(f"{set_name}: L against D", "D", "L", phase), out / f"{set_name}_phase.svg")


def _sweep(cfg: RunConfig, args) -> int:
    out = Path(args.out_dir)
    results = _run_sets(cfg, args)
    summary = []
    for set_name, rs in results.items():
        for r in rs:
            if r.trajectory is not None:
                derived = derived_series(cfg.params, cfg.rates, cfg.regulation, r.trajectory)
                write_trajectory_csv(r.trajectory, derived, out / f"{set_name}_{r.label}.csv")
            ev = r.trajectory.events[0] if r.trajectory is not None and r.trajectory.events else None
            summary.append((set_name, r.label, r.ratio, r.initial.D, r.initial.L,
                            r.region if r.region is not None else "", r.termination,
                            len(r.trajectory) if r.trajectory is not None else 0,
                            float(r.trajectory.t[-1]) if r.trajectory is not None else "",
                            ev.which if ev else "", ev.t_star if ev else ""))
            print(f"{set_name} {r.label}: ratio={r.ratio:g} region={r.region} termination={r.termination}"
                  + (f" ({'; '.join(r.errors)})" if r.errors else ""))
        if args.svg:
            _set_charts(cfg, set_name, rs, out)
    write_table(out / "sweep_summary.csv",
                ("set", "label", "ratio", "D0", "L0", "region", "termination", "samples", "t_final",
                 "event", "event_t"), summary)
    _write_comparisons(results, out)
    return _status(results)


def _gwm(cfg: RunConfig, args) -> int:
    out = Path(args.out_dir)
    results = _run_sets(cfg, args)
    rows = []
    for set_name, rs in results.items():
        for r in rs:
            rep = r.reserves
            if rep is None:
                rows.append((set_name, r.label, r.ratio, "", "", "", r.termination))
                continue
            write_table(out / f"{set_name}_{r.label}_reserves.csv",
                        ("t", "lambda", "gwm_ldr", "reserve_primary", "reserve_secondary", "reserve_total"),
                        rep.rows)
            rows.append((set_name, r.label, r.ratio, rep.integrated_gwm, float(rep.ldr.min()),
                         float(rep.ldr.max()), r.termination))
            print(f"{set_name} {r.label}: integrated GWM = {rep.integrated_gwm:.6g} over "
                  f"[{rep.t[0]:g}, {rep.t[-1]:.6g}] ({r.termination})")
        if args.svg:
            _set_charts(cfg, set_name, rs, out)
    write_table(out / "gwm_summary.csv",
                ("set", "label", "ratio", "integrated_gwm", "ldr_min", "ldr_max", "termination"), rows)
    _write_comparisons(results, out)
    return _status(results)


def _validate(cfg: RunConfig, args) -> int:
    out = Path(args.out_dir)
    results = _run_sets(cfg, args)
    rows = []
    for set_name, rs in results.items():
        for r in rs:
            d = r.diagnosis
            if d is None:
                rows.append((set_name, r.label, "", "", "", "", "invalid", "", r.termination))
                print(f"{set_name} {r.label}: no diagnosis ({'; '.join(r.errors)})")
                continue
            rows.append((set_name, r.label, d.loan_corr, d.deposit_corr, str(d.loan_ok).lower(),
                         str(d.deposit_ok).lower(), d.verdict, str(d.zero_variance).lower(), r.termination))
            print(f"{set_name} {r.label}: loan_corr={d.loan_corr:+.3f} deposit_corr={d.deposit_corr:+.3f} "
                  f"-> {d.verdict}")
    write_table(out / "validation.csv",
                ("set", "label", "loan_corr", "deposit_corr", "loan_ok", "deposit_ok", "verdict",
                 "zero_variance", "termination"), rows)
    return _status(results)


def _print_config(cfg: RunConfig, args) -> int:
    print(dump_config(cfg), end="")
    return EXIT_OK


COMMANDS = {
    "loci": _loci,
    "simulate": _simulate,
    "sweep": _sweep,
    "gwm": _gwm,
    "validate": _validate,
    "config": _print_config,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except (BankDynError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def cli_dispatch(argv) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
