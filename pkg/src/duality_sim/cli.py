"""Command-line front end.

Exit codes: 0 success, 1 usage/config error, 2 invariant violation, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from typing import Optional

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .emission import detection_rate, detection_rate_polarized, relative_phase
from .errors import NumericalError, ValidationError
from .fringes import (
    estimate_distinguishability,
    estimate_visibility,
    simulate_counts,
    uniform_angles,
)
from .report import duality_report, purity_sweep
from .source_state import purity
from .stokes import DEFAULT_GRID, MIN_GRID, polarization_visibilities, stokes_sweep

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3
DEFAULT_ANGLES = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _num(x) -> str:
    return repr(float(x))


def _num15(x) -> str:
    return format(float(x), ".15g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(args, table: str, summary: str = "") -> None:
    """Write the CSV table to --out (or stdout) and the summary to stdout."""
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(table)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(table)
        if summary:
            sys.stdout.write("\n" + summary)


def _need_source(cfg: RunConfig):
    if cfg.source is None:
        raise ConfigError(f"{cfg.path}: a 'source' section is required for this command")
    return cfg.source


def _scan_angles(cfg: RunConfig, args, default: int):
    """Explicit angle list, or a uniform grid starting at the geometric phase (0 without geometry)."""
    if args.angles is None and isinstance(cfg.angles, np.ndarray):
        return cfg.angles
    n = args.angles if args.angles is not None else (cfg.angles or default)
    offset = relative_phase(cfg.geometry) if cfg.geometry is not None else 0.0
    return uniform_angles(n, offset)


def cmd_report(cfg: RunConfig, args) -> str:
    state = _need_source(cfg)
    rep = duality_report(state, cfg.modes)
    line = (
        f"mode={rep.mode} V={_num(rep.visibility)} D={_num(rep.distinguishability)} "
        f"mu={_num(rep.purity)} residual={_num(rep.residual)}\n"
    )
    if cfg.geometry is not None:
        theta = relative_phase(cfg.geometry)
        rate = detection_rate(state, theta) if cfg.modes is None else detection_rate_polarized(state, cfg.modes, theta)
        line += f"theta={_num(theta)} rate={_num(rate)}\n"
    if args.out:
        table = _csv(
            ["mode", "V", "D", "mu", "residual"],
            [[rep.mode, _num(rep.visibility), _num(rep.distinguishability), _num(rep.purity), _num(rep.residual)]],
        )
        with open(args.out, "w", newline="") as fh:
            fh.write(table)
    sys.stdout.write(line)
    return line


def cmd_fringes(cfg: RunConfig, args) -> None:
    state = _need_source(cfg)
    angles = _scan_angles(cfg, args, DEFAULT_ANGLES)
    if cfg.modes is None:
        rates = detection_rate(state, angles)
    else:
        rates = detection_rate_polarized(state, cfg.modes, angles)
    _emit(args, _csv(["theta", "rate"], [[_num15(t), _num15(r)] for t, r in zip(angles, rates)]))


def cmd_montecarlo(cfg: RunConfig, args) -> None:
    state = _need_source(cfg)
    sim = cfg.simulation
    if sim is None:
        raise ConfigError(f"{cfg.path}: a 'simulation' section is required for montecarlo")
    seed = args.seed if args.seed is not None else sim.seed
    if seed is None:
        raise ConfigError(f"{cfg.where('simulation')}: simulation.seed is required (or pass --seed)")
    if sim.mean_total <= 0:
        raise ConfigError(f"{cfg.where('simulation', 'mean_total')}: mean_total must be positive")
    if args.angles is None and sim.angles is not None:
        args.angles = sim.angles
    angles = _scan_angles(cfg, args, DEFAULT_ANGLES)

    data = simulate_counts(state, cfg.modes, angles, sim.mean_total, seed)
    v_hat, v_err = estimate_visibility(data)
    d_hat, d_err = estimate_distinguishability(data)
    resid = v_hat**2 + d_hat**2 - purity(state) ** 2
    resid_err = float(np.hypot(2 * v_hat * v_err, 2 * d_hat * d_err))

    table = _csv(["theta", "counts"], [[_num(t), str(int(c))] for t, c in zip(data.angles, data.counts)])
    summary = (
        f"V_hat,{_num(v_hat)},{_num(v_err)}\n"
        f"D_hat,{_num(d_hat)},{_num(d_err)}\n"
        f"residual_hat,{_num(resid)},{_num(resid_err)}\n"
    )
    _emit(args, table, summary)


def cmd_stokes(cfg: RunConfig, args) -> None:
    state = _need_source(cfg)
    if cfg.modes is None:
        raise ConfigError(f"{cfg.path}: a 'modes' section is required for stokes")
    n = args.angles or DEFAULT_GRID
    if n < MIN_GRID:
        raise UsageError(f"stokes needs at least {MIN_GRID} angles (got {n})")
    theta, s = stokes_sweep(state, cfg.modes, n)
    vis = polarization_visibilities(state, cfg.modes, n)
    table = _csv(["theta", "S0", "S1", "S2", "S3"], [[_num(t)] + [_num(x) for x in row] for t, row in zip(theta, np.stack(s, axis=1))])
    summary = _csv(["V0", "V1", "V2", "V3", "VP"], [[_num(x) for x in vis.as_tuple()]])
    _emit(args, table, summary)


def cmd_sweep(cfg: RunConfig, args) -> None:
    sw = cfg.sweep
    if sw is None:
        raise ConfigError(f"{cfg.path}: a 'sweep' section is required for sweep")
    reports = purity_sweep(sw.p_a, sw.mixing, cfg.modes, sw.phase)
    rows = [
        [_num(m), _num(r.visibility), _num(r.distinguishability), _num(r.purity), _num(r.residual)]
        for m, r in zip(sw.mixing, reports)
    ]
    _emit(args, _csv(["mixing", "V", "D", "mu", "residual"], rows))


COMMANDS = {
    "report": (cmd_report, "print V, D, mu_S and the Pythagorean residual"),
    "fringes": (cmd_fringes, "tabulate the detection rate over theta"),
    "montecarlo": (cmd_montecarlo, "simulate photon counts and estimate V, D"),
    "stokes": (cmd_stokes, "sweep Stokes parameters and polarization visibilities"),
    "sweep": (cmd_sweep, "duality reports across a mixing sweep"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="duality-sim", description="Two-atom single-photon duality simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", help="write the CSV table to this path")
        p.add_argument("--angles", type=int, help="number of uniform theta points")
        p.add_argument("--seed", type=int, help="RNG seed (overrides the config)")
    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.angles is not None and args.angles < 1:
            raise UsageError("--angles must be positive")
        cfg = load_config(args.config)
        COMMANDS[args.command][0](cfg, args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
