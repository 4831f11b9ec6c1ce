"""Command-line entry point.

Exit codes: 0 success/PASS, 1 FAIL verdict, 2 usage or configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, parse_config
from .diagnostics import energy_series
from .errors import BudgetError, ConfigError, DomainError, InvalidArgumentError, NumericalFailure, UnsupportedRegimeError
from .output import write_csv, write_stability, write_timeseries
from .scenarios import check_admissibility, make_scenario, mms_convergence
from .solver import simulate
from .studies import equivalence_table, fit_exponent, reference_run, wsu_run

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

COMMANDS = ("simulate", "equiv", "wsu-check", "sweep", "mms", "admissibility")


def _fmt(x):
    return repr(float(x))


def cmd_simulate(cfg: RunConfig, out: Path) -> int:
    scen = make_scenario(cfg.kind, cfg.grid, cfg.params, cfg.knobs, cfg.label, cfg.controls.density_floor)
    form = cfg.command.formulation
    traj = simulate(scen, cfg.controls, form)
    energies = energy_series(traj, cfg.grid, cfg.params, cfg.controls.density_floor)
    write_timeseries(traj, cfg.grid, out, energies=energies, floor=cfg.controls.density_floor)
    print(f"simulate: {form.value} steps={traj.steps} snapshots={len(traj)} "
          f"E0={_fmt(energies[0].total)} E_end={_fmt(energies[-1].total)}")
    return EXIT_OK


def cmd_equiv(cfg: RunConfig, out: Path) -> int:
    rows = equivalence_table(cfg.kind, cfg.knobs, cfg.grid, cfg.params, cfg.controls, cfg.command.levels or 3)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "equiv.csv", ["cells", "l2_distance", "ratio"], rows)
    for cells, d, ratio in rows:
        print(f"equiv: cells={cells} l2_distance={_fmt(d)} ratio={_fmt(ratio)}")
    return EXIT_OK


def _verdict(run) -> str:
    r = run.report
    return f"WSU: {'PASS' if r.passed else 'FAIL'} sup_H={_fmt(r.sup_H)} max_violation={_fmt(r.max_violation)}"


def cmd_wsu_check(cfg: RunConfig, out: Path) -> int:
    c = cfg.command
    run = wsu_run(cfg.kind, cfg.knobs, cfg.grid, cfg.params, cfg.controls, c.eps[0], target=c.target,
                  pert_k=c.pert_k, tol_abs=c.tolerance, tol_rel=c.tolerance_rel, refinement=c.refinement)
    out.mkdir(parents=True, exist_ok=True)
    write_stability(run.report, out / "stability.csv")
    print(_verdict(run))
    return EXIT_OK if run.passed else EXIT_FAIL


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    c = cfg.command
    ref = reference_run(cfg.kind, cfg.knobs, cfg.grid, cfg.params, cfg.controls, c.refinement)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, eps in enumerate(c.eps):
        run = wsu_run(cfg.kind, cfg.knobs, cfg.grid, cfg.params, cfg.controls, eps, target=c.target,
                      pert_k=c.pert_k, tol_abs=c.tolerance, tol_rel=c.tolerance_rel, reference=ref)
        sub = out / f"eps_{i}"
        sub.mkdir(exist_ok=True)
        write_stability(run.report, sub / "stability.csv")
        r = run.report
        rows.append((eps, r.H[0], r.sup_H, r.max_violation, "PASS" if run.passed else "FAIL"))
        print(f"sweep: eps={_fmt(eps)} {_verdict(run)}")
    exponent = fit_exponent([r[0] for r in rows], [r[2] for r in rows])
    write_csv(out / "sweep.csv", ["eps", "H0", "sup_H", "max_violation", "verdict"], rows)
    print(f"sweep: fitted exponent={_fmt(exponent)}")
    return EXIT_OK if all(r[4] == "PASS" for r in rows) else EXIT_FAIL


def cmd_mms(cfg: RunConfig, out: Path) -> int:
    table = mms_convergence(cfg.command.levels or 4, cfg.controls, cfg.params, cfg.command.formulation,
                            base_cells=cfg.grid.cells)
    nan = float("nan")
    rows = []
    for k, n in enumerate(table.cells):
        o_r = table.order_rho[k - 1] if k else nan
        o_v = table.order_vel[k - 1] if k else nan
        rows.append((n, table.err_rho[k], table.err_vel[k], o_r, o_v))
        print(f"mms: cells={n} err_rho={_fmt(table.err_rho[k])} err_vel={_fmt(table.err_vel[k])} "
              f"order_rho={_fmt(o_r)} order_vel={_fmt(o_v)}")
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "mms.csv", ["cells", "err_rho", "err_vel", "order_rho", "order_vel"], rows)
    ok = all(o >= 0.9 for o in table.order_rho + table.order_vel)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_admissibility(cfg: RunConfig, out: Path) -> int:
    scen = make_scenario(cfg.kind, cfg.grid, cfg.params, cfg.knobs, cfg.label, cfg.controls.density_floor)
    rep = check_admissibility(scen, cfg.controls.density_floor)
    header = ["mass_l1", "rho_lgamma", "kinetic_l2", "effective_l2", "weighted_l2plus", "admissible"]
    row = [rep.mass_l1, rep.rho_lgamma, rep.kinetic_l2, rep.effective_l2, rep.weighted_l2plus, rep.admissible]
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "admissibility.csv", header, [row])
    print("admissibility: " + " ".join(f"{h}={v if isinstance(v, bool) else _fmt(v)}" for h, v in zip(header, row)))
    return EXIT_OK if rep.admissible else EXIT_FAIL


HANDLERS = {
    "simulate": cmd_simulate,
    "equiv": cmd_equiv,
    "wsu-check": cmd_wsu_check,
    "sweep": cmd_sweep,
    "mms": cmd_mms,
    "admissibility": cmd_admissibility,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nswsu", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path, help="run configuration file")
        p.add_argument("--out", type=Path, default=None, help="output directory (overrides [output] directory)")
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    try:
        text = args.config.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        cfg = parse_config(text)
        out = args.out if args.out is not None else Path(cfg.out_dir)
        return HANDLERS[args.command](cfg, out)
    except (ConfigError, InvalidArgumentError, DomainError, UnsupportedRegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, BudgetError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Exception as exc:  # noqa: BLE001 - the exit-code contract must be total
        print(f"numerical failure (unexpected): {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
