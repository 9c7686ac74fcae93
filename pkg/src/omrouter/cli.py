"""Command-line interface: steady state, spectra, routing, sweeps, figures.

Every subcommand writes ``resolved.cfg`` (the fully resolved configuration)
into the output directory next to its data files; re-running any command
from that echo reproduces the outputs byte for byte.  CSV files use a comma
separator, one header row with bracketed units, LF line endings, and
17-significant-digit scientific floats.

Exit codes: 0 success, 1 physics/convergence failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import power_sweep, routing_report, window_splitting
from .config import RunConfig, parse_config
from .errors import AnalysisError, ConfigError, RouterError
from .response import closed_vs_oracle_deviation, scan_spectrum
from .steady import enumerate_branches, solve_steady_state

__all__ = ["main", "run_figure"]

_ORACLE_GRID_POINTS = 2001
_ORACLE_GRID_SPAN = (0.5, 1.5)
_ORACLE_TOL = 1e-9


def _fmt(value: float) -> str:
    return f"{value:.16e}"


def _solve(cfg: RunConfig, params):
    seed = 0.0 if cfg.branch_policy == "direct" else None
    return solve_steady_state(params, q_seed=seed, ramp_steps=cfg.ramp_steps,
                              n_scan=cfg.scan_points,
                              residual_tol=cfg.residual_tol)


def _prepare_outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    echo = "\n".join(cfg.echo_lines()) + "\n"
    (out / "resolved.cfg").write_text(echo, encoding="utf-8", newline="\n")
    return out


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) if isinstance(v, float) else str(v)
                                  for v in row) + "\n")


def _spectrum_grid(cfg: RunConfig) -> np.ndarray:
    return cfg.omega_m * np.linspace(cfg.spectrum_min, cfg.spectrum_max,
                                     cfg.spectrum_points)


def _report_kwargs(cfg: RunConfig) -> dict:
    return dict(window_frac=cfg.splitting_window,
                n_points=cfg.splitting_points,
                r_reflect_min=cfg.r_reflect_min,
                t_transmit_min=cfg.t_transmit_min,
                method=cfg.method)


def _cmd_steady(cfg: RunConfig) -> int:
    _prepare_outdir(cfg)
    params = cfg.system_params()
    branches = enumerate_branches(params, n_scan=cfg.scan_points)
    state = _solve(cfg, params)
    print(f"branches ({len(branches)}):")
    for i, q in enumerate(branches):
        marker = " *" if i == state.branch_index else ""
        print(f"  [{i}] q = {_fmt(q)} m{marker}")
    print(f"q_s      = {_fmt(state.q_s)} m")
    print(f"p_s      = {_fmt(state.p_s)} kg*m/s")
    print(f"a_s      = {state.a_s!r}  (|a_s|^2 = {_fmt(abs(state.a_s)**2)})")
    print(f"c_s      = {state.c_s!r}  (|c_s|^2 = {_fmt(abs(state.c_s)**2)})")
    print(f"delta1   = {_fmt(state.delta1)} rad/s")
    print(f"delta2   = {_fmt(state.delta2)} rad/s")
    print(f"residual = {state.residual:.3e}")
    for note in state.warnings:
        print(f"warning: {note}")
    return 0


def _cmd_spectrum(cfg: RunConfig) -> int:
    out = _prepare_outdir(cfg)
    params = cfg.system_params()
    state = _solve(cfg, params)
    grid = _spectrum_grid(cfg)
    result = scan_spectrum(params, grid, method=cfg.method, state=state)
    path = out / "spectrum.csv"
    _write_csv(path,
               ["omega_over_omega_m[1]", "reflection[1]", "transmission[1]",
                "s_thermal[1]", "s_vacuum[1]"],
               ((p.omega / cfg.omega_m, p.r_refl, p.t_trans, p.s_thermal,
                 p.s_vacuum) for p in result.points))
    for index, omega, message in result.errors:
        print(f"warning: node {index} (omega={omega!r}): {message}",
              file=sys.stderr)
    print(f"wrote {path}")
    return 0


def _cmd_route(cfg: RunConfig) -> int:
    out = _prepare_outdir(cfg)
    params = cfg.system_params()
    state = _solve(cfg, params)
    report = routing_report(params, state=state, **_report_kwargs(cfg))
    try:
        omega0_window = window_splitting(
            params, mode=cfg.splitting_mode, state=state,
            window_frac=cfg.splitting_window, n_points=cfg.splitting_points,
            method=cfg.method)
    except AnalysisError:
        omega0_window = None
    wm = cfg.omega_m
    print(f"pump_on   = {report.pump_on}")
    print(f"center    = {_fmt(report.center)} rad/s "
          f"({report.center / wm:.6f} omega_m)")
    print(f"omega0    = {_fmt(report.omega0)} rad/s "
          f"({report.omega0 / wm:.6f} omega_m)")
    if omega0_window is not None:
        print(f"omega0 by {cfg.splitting_mode} = {_fmt(omega0_window)} rad/s")
    print(f"degenerate = {report.degenerate}")
    for port in report.ports:
        print(f"  {port.label:<14} omega/omega_m = {port.omega / wm:.6f}  "
              f"R = {port.r_value:.6f}  T = {port.t_value:.6f}  "
              f"threshold_met = {port.threshold_met}")
    payload = {
        "pump_on": report.pump_on,
        "center": report.center,
        "omega0": report.omega0,
        "omega0_window": omega0_window,
        "splitting_mode": cfg.splitting_mode,
        "degenerate": report.degenerate,
        "ports": [{"label": p.label, "omega": p.omega, "r": p.r_value,
                   "t": p.t_value, "threshold_met": p.threshold_met}
                  for p in report.ports],
    }
    path = out / "routing_report.json"
    path.write_text(json.dumps(payload, indent=2) + "\n",
                    encoding="utf-8", newline="\n")
    print(f"wrote {path}")
    return 0


def _cmd_sweep_power(cfg: RunConfig) -> int:
    out = _prepare_outdir(cfg)
    params = cfg.system_params()
    result = power_sweep(params, cfg.sweep_powers,
                         pin_optical=cfg.pin_optical,
                         pin_microwave=cfg.pin_microwave,
                         **_report_kwargs(cfg))
    messages = {i: msg for i, _, msg in result.errors}

    def row_values(i, row):
        ports = {p.label: p for p in row.ports}
        center = ports.get("transmit") or ports.get("reflect")
        lower = ports.get("reflect-lower")
        upper = ports.get("reflect-upper")
        nan = float("nan")
        return (row.power_p, row.omega0,
                center.omega if center else nan,
                center.r_value if center else nan,
                center.t_value if center else nan,
                lower.omega if lower else nan,
                lower.r_value if lower else nan,
                upper.omega if upper else nan,
                upper.r_value if upper else nan,
                "error" if i in messages else "ok")

    path = out / "sweep_power.csv"
    _write_csv(path,
               ["power_p[W]", "omega0[rad/s]", "center_omega[rad/s]",
                "center_r[1]", "center_t[1]", "lower_omega[rad/s]",
                "lower_r[1]", "upper_omega[rad/s]", "upper_r[1]", "status"],
               (row_values(i, row) for i, row in enumerate(result.rows)))
    for i, power, message in result.errors:
        print(f"warning: row {i} (power_p={power!r}): {message}",
              file=sys.stderr)
    print(f"wrote {path}")
    return 0


def run_figure(figure_id: str, cfg: RunConfig) -> list[Path]:
    """Produce the CSV files behind one of the bundled demo figures.

    ``fig2``: reflection and transmission vs omega/omega_m with the
    microwave pump off and on.  ``fig3``: transmission at each configured
    microwave power.  ``fig4``: vacuum and thermal output noise.
    """
    out = _prepare_outdir(cfg)
    grid = _spectrum_grid(cfg)
    axis = grid / cfg.omega_m
    written: list[Path] = []

    def scan_for(power_p=None):
        params = cfg.system_params(power_p=power_p)
        state = _solve(cfg, params)
        return scan_spectrum(params, grid, method=cfg.method, state=state)

    if figure_id == "fig2":
        off = scan_for(power_p=0.0)
        on = scan_for()
        for name, column in (("reflection", "r_refl"),
                             ("transmission", "t_trans")):
            path = out / f"fig2_{name}.csv"
            tag = name[0]
            _write_csv(path,
                       ["omega_over_omega_m[1]", f"{tag}_pump_off[1]",
                        f"{tag}_pump_on[1]"],
                       zip(axis.tolist(), off.column(column).tolist(),
                           on.column(column).tolist()))
            written.append(path)
    elif figure_id == "fig3":
        columns = [(p, scan_for(power_p=p).column("t_trans"))
                   for p in cfg.fig3_powers]
        path = out / "fig3_transmission.csv"
        header = ["omega_over_omega_m[1]"]
        header += [f"t_at_{p:.6g}W[1]" for p, _ in columns]
        rows = zip(axis.tolist(), *(c.tolist() for _, c in columns))
        _write_csv(path, header, rows)
        written.append(path)
    elif figure_id == "fig4":
        on = scan_for()
        path = out / "fig4_noise.csv"
        _write_csv(path,
                   ["omega_over_omega_m[1]", "s_vacuum[1]", "s_thermal[1]"],
                   zip(axis.tolist(), on.column("s_vacuum").tolist(),
                       on.column("s_thermal").tolist()))
        written.append(path)
    else:
        raise ConfigError(f"unknown figure id {figure_id!r}")
    return written


def _cmd_figure(cfg: RunConfig, figure_id: str) -> int:
    for path in run_figure(figure_id, cfg):
        print(f"wrote {path}")
    return 0


def _cmd_validate(cfg: RunConfig) -> int:
    _prepare_outdir(cfg)
    params = cfg.system_params()
    state = _solve(cfg, params)
    lo, hi = _ORACLE_GRID_SPAN
    grid = cfg.omega_m * np.linspace(lo, hi, _ORACLE_GRID_POINTS)
    devs = closed_vs_oracle_deviation(params, state, grid)
    for name in ("e1", "f1", "e2", "f2", "v"):
        print(f"max relative deviation {name}: {devs[name]:.3e}")
    print(f"max relative deviation overall: {devs['max']:.3e} "
          f"(tolerance {_ORACLE_TOL:.0e})")
    if devs["max"] >= _ORACLE_TOL:
        print("validation FAILED", file=sys.stderr)
        return 1
    print("validation passed")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omrouter",
        description="Hybrid microwave/optical photon-router simulator.")
    parser.add_argument("--config", metavar="PATH",
                        help="configuration file (key = value lines)")
    parser.add_argument("--set", dest="overrides", action="append",
                        default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    parser.add_argument("--out", metavar="DIR",
                        help="output directory (overrides output_dir)")
    parser.add_argument("--oracle", action="store_true",
                        help="evaluate responses via the matrix-solve path")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("steady", help="print the steady state and all branches")
    sub.add_parser("spectrum", help="emit the spectrum CSV over the "
                                    "configured grid")
    sub.add_parser("route", help="print and save the routing report")
    sub.add_parser("sweep-power", help="routing behaviour vs microwave power")
    fig = sub.add_parser("figure", help="reproduce a bundled demo figure")
    fig.add_argument("figure_id", choices=("fig2", "fig3", "fig4"))
    sub.add_parser("validate", help="closed-form vs matrix-solve "
                                    "equivalence check")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.oracle:
        overrides.append("oracle=true")
    if args.out is not None:
        overrides.append(f"output_dir={args.out}")
    try:
        cfg = parse_config(args.config, overrides)
        if args.command == "steady":
            return _cmd_steady(cfg)
        if args.command == "spectrum":
            return _cmd_spectrum(cfg)
        if args.command == "route":
            return _cmd_route(cfg)
        if args.command == "sweep-power":
            return _cmd_sweep_power(cfg)
        if args.command == "figure":
            return _cmd_figure(cfg, args.figure_id)
        if args.command == "validate":
            return _cmd_validate(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except RouterError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
