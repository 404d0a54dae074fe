"""Command-line runner: curves, optimisation, table reproduction, oracle checks."""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import gaussian as g
from .detection import parametric_readout_error
from .fock import TruncationError
from .interferometer import InterferometerConfig, Topology
from .sensitivity import (
    SqueezeRegime,
    closed_form_alpha_sq,
    config_for,
    optimize_displacement,
    peak_and_width,
    sweep,
    table1,
    tradeoff_report,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

COMMANDS = ("curve", "optimize", "table1", "verify", "readout", "tradeoff")
CURVE_COLUMNS = ("phi", "dphi_sq", "gain", "var_y", "flag")
TABLE_COLUMNS = (
    "regime", "scheme", "alpha_sq", "dphi0_sq", "width_sq",
    "reference_dphi0_sq", "reference_width_sq", "rel_err_peak", "rel_err_width",
)


class ConfigError(ValueError):
    pass


class NumericFailure(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str
    topology: str = "single"
    squeeze: str = "r0"
    scheme: str = "homodyne"
    n_mean: float = 10.0
    phi_min: float = -0.5
    phi_max: float = 0.5
    phi_steps: int = 101
    fock_dim: int = None
    output: str = None
    format: str = "csv"
    alpha: float = None
    r: float = None
    R: float = None
    gt: float = 1.0
    probe_squeeze: float = 0.0
    signal_alpha: float = 0.0
    signal_r: float = 0.0

    def __post_init__(self):
        floats = ("n_mean", "phi_min", "phi_max", "alpha", "r", "R", "gt",
                  "probe_squeeze", "signal_alpha", "signal_r")
        for name in floats + ("phi_steps", "fock_dim"):
            value = getattr(self, name)
            if value is None:
                continue
            try:
                if name in floats:
                    value = float(value)
                else:
                    if float(value) != int(value):
                        raise ValueError
                    value = int(value)
            except (TypeError, ValueError):
                raise ConfigError(f"{name} has invalid value {value!r}") from None
            setattr(self, name, value)

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.topology not in ("single", "two"):
            raise ConfigError("topology must be 'single' or 'two'")
        if self.squeeze not in ("r0", "anti"):
            raise ConfigError("squeeze must be 'r0' or 'anti'")
        if self.topology == "single" and self.squeeze != "r0":
            raise ConfigError("antisymmetric squeezing needs the two-arm topology")
        if self.scheme not in ("homodyne", "threshold"):
            raise ConfigError("scheme must be 'homodyne' or 'threshold'")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be 'csv' or 'json'")
        if not self.n_mean >= 0:
            raise ConfigError("n must be non-negative")
        if not self.phi_min < self.phi_max:
            raise ConfigError("phi-min must be below phi-max")
        if self.phi_steps < 1:
            raise ConfigError("phi-steps must be at least 1")
        if self.fock_dim is not None and self.fock_dim < 4:
            raise ConfigError("fock-dim must be at least 4")
        if self.command == "table1" and self.n_mean < 1:
            raise ConfigError("table1 needs n >= 1")
        if self.command == "tradeoff" and self.n_mean < 4:
            raise ConfigError("tradeoff needs n >= 4")
        if self.command == "readout" and not self.gt > 0:
            raise ConfigError("gt must be positive")

    @property
    def regime(self):
        if self.topology == "single":
            return SqueezeRegime.SINGLE_ARM
        return SqueezeRegime.TWO_ARM_R0 if self.squeeze == "r0" else SqueezeRegime.TWO_ARM_ANTI

    @property
    def explicit_state(self):
        return self.alpha is not None or self.r is not None or self.R is not None


def fmt(value):
    """Fixed 12-significant-digit text for numbers; other values pass through."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, int, np.floating, np.integer)):
        return format(float(value), ".12g")
    if value is None:
        return ""
    return str(value)


def _json_value(value):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(format(value, ".12g"))


def render(rows, columns, kind):
    if kind == "json":
        data = [{c: _json_value(row[c]) for c in columns} for row in rows]
        return json.dumps(data, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def _interferometer(cfg):
    if cfg.explicit_state:
        alpha = cfg.alpha or 0.0
        r = cfg.r or 0.0
        R = cfg.R or 0.0
        topo = Topology(cfg.topology)
        try:
            return InterferometerConfig(topo, alpha, r, R)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    alpha_sq = optimize_displacement(cfg.n_mean, cfg.regime, cfg.scheme)
    return config_for(cfg.n_mean, cfg.regime, alpha_sq)


def cmd_curve(cfg):
    icfg = _interferometer(cfg)
    grid = np.linspace(cfg.phi_min, cfg.phi_max, cfg.phi_steps)
    curve = sweep(icfg, cfg.scheme, grid)
    if all(f == "nosens" for f in curve.flags):
        raise NumericFailure("no phase sensitivity anywhere on the grid")
    rows = [
        dict(phi=p, dphi_sq=d, gain=k, var_y=v, flag=f)
        for p, d, k, v, f in zip(curve.phi_grid, curve.dphi_sq, curve.gain, curve.variance_y, curve.flags)
    ]
    return rows, CURVE_COLUMNS


def cmd_optimize(cfg):
    alpha_sq = optimize_displacement(cfg.n_mean, cfg.regime, cfg.scheme)
    fig = peak_and_width(config_for(cfg.n_mean, cfg.regime, alpha_sq), cfg.scheme, cfg.n_mean)
    if not math.isfinite(fig.dphi0_sq):
        raise NumericFailure("no phase sensitivity at the optimum")
    closed, exact = closed_form_alpha_sq(cfg.n_mean, cfg.regime, cfg.scheme)
    row = dict(
        topology=cfg.topology, squeeze=cfg.squeeze, scheme=cfg.scheme, n_mean=cfg.n_mean,
        alpha_sq=alpha_sq, closed_form_alpha_sq=closed, closed_form_exact=exact,
        dphi0_sq=fig.dphi0_sq, width_sq=fig.width_sq, flagged=fig.flagged,
    )
    return [row], tuple(row)


def cmd_table1(cfg):
    rows = []
    for e in table1(cfg.n_mean):
        rows.append(dict(
            regime=e.regime.value, scheme=e.scheme.value,
            alpha_sq=e.figure.alpha_sq_opt, dphi0_sq=e.figure.dphi0_sq, width_sq=e.figure.width_sq,
            reference_dphi0_sq=e.reference_dphi0_sq, reference_width_sq=e.reference_width_sq,
            rel_err_peak=e.rel_err_peak, rel_err_width=e.rel_err_width,
        ))
    return rows, TABLE_COLUMNS


def cmd_tradeoff(cfg):
    rows = [
        dict(regime=t.regime.value, scheme=t.scheme.value,
             log_n_width=t.log_n_width, log2_n_dphi0=t.log2_n_peak, difference=t.difference)
        for t in tradeoff_report(cfg.n_mean)
    ]
    return rows, ("regime", "scheme", "log_n_width", "log2_n_dphi0", "difference")


def cmd_readout(cfg):
    prep = g.make_squeeze(0, cfg.signal_r).then(g.make_displacement(0, cfg.signal_alpha))
    signal = g.apply(g.vacuum(1), prep)
    probe_var = 0.5 * math.exp(-2.0 * cfg.probe_squeeze)
    err = parametric_readout_error(cfg.gt, signal, probe_var)
    row = dict(gt=cfg.gt, probe_squeeze=cfg.probe_squeeze, signal_alpha=cfg.signal_alpha,
               signal_r=cfg.signal_r, delta_meas_sq=err)
    return [row], tuple(row)


def cmd_verify(cfg):
    from .verification import run_checks

    checks = run_checks(cfg.fock_dim)
    rows = [dict(check=c.name, residual=c.residual, tol=c.tol, passed=c.passed) for c in checks]
    return rows, ("check", "residual", "tol", "passed")


DISPATCH = dict(
    curve=cmd_curve, optimize=cmd_optimize, table1=cmd_table1,
    verify=cmd_verify, readout=cmd_readout, tradeoff=cmd_tradeoff,
)


def run(cfg):
    """Execute ``cfg``; returns ``(exit_status, text)``."""
    cfg.validate()
    rows, columns = DISPATCH[cfg.command](cfg)
    status = EXIT_OK
    if cfg.command == "verify" and not all(r["passed"] for r in rows):
        status = EXIT_NUMERIC
    return status, render(rows, columns, cfg.format)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values; flags take precedence")
    common.add_argument("--topology", choices=("single", "two"))
    common.add_argument("--squeeze", choices=("r0", "anti"), help="two-arm squeezing: R=0 or R=-r")
    common.add_argument("--scheme", choices=("homodyne", "threshold"))
    common.add_argument("--n", dest="n_mean", type=float, help="mean photon budget N")
    common.add_argument("--phi-min", type=float)
    common.add_argument("--phi-max", type=float)
    common.add_argument("--phi-steps", type=int)
    common.add_argument("--fock-dim", type=int)
    common.add_argument("--alpha", type=float, help="explicit displacement (skips optimisation)")
    common.add_argument("--r", type=float, help="explicit squeeze factor")
    common.add_argument("--R", type=float, help="explicit bright-port squeeze factor")
    common.add_argument("--gt", type=float)
    common.add_argument("--probe-squeeze", type=float)
    common.add_argument("--signal-alpha", type=float)
    common.add_argument("--signal-r", type=float)
    common.add_argument("--output", "-o", help="output file (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="phasesens", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = dict(
        curve="squared phase error over a phase grid",
        optimize="optimal displacement share and figures of merit",
        table1="peak error and width for every configuration",
        verify="Gaussian engine versus truncated Fock oracle",
        readout="parametric readout error of the threshold observable",
        tradeoff="peak-width trade-off on a log scale",
    )
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


_FIELDS = {f.name for f in fields(RunConfig)}


def config_from_args(args):
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in data.items():
            key = key.replace("-", "_")
            if key == "n":
                key = "n_mean"
            if key not in _FIELDS or key == "command":
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = value
    for key, value in vars(args).items():
        if key in _FIELDS and key != "command" and value is not None:
            values[key] = value
    try:
        return RunConfig(command=args.command, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        status, text = run(cfg)
    except ConfigError as exc:
        print(f"phasesens: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFailure, TruncationError) as exc:
        print(f"phasesens: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"phasesens: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
