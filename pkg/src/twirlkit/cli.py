"""Command-line harness: ``twirlkit <subcommand> [options]``.

Every subcommand writes CSV (to ``--out`` or stdout).  Settings come from
built-in defaults, then an optional ``key = value`` config file, then flags.

Exit codes: 0 success, 2 bad configuration or input, 3 non-CPTP channel.
"""
import argparse
import configparser
import contextlib
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import backaction, ctqec, lindblad
from .channel import amplitude_damping, load_channel
from .errors import ConfigurationError, TwirlkitError, ValidationError
from .twirl import ad_twirl_probs, twirl_diagonal, write_pauli_csv

EXIT_OK, EXIT_CONFIG, EXIT_INVALID = 0, 2, 3


@dataclass(frozen=True)
class ExperimentConfig:
    t1: float = 1.0
    t_step: float = 0.01
    horizon: float = 2.0
    qubit_range: tuple = (1, 4)
    beta_grid: tuple = (0.0, 1.0, 10.0, 100.0)
    dt: float = 1e-3
    fd_step: float = 1e-4
    threshold_rule: str = "px"
    output_path: str = "-"
    t_grid: tuple = field(default=())

    def validate(self):
        for name in ("t1", "t_step", "horizon", "dt", "fd_step"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigurationError(f"{name} must be positive, got {value}")
        lo, hi = self.qubit_range
        if not 1 <= lo <= hi <= 5:
            raise ConfigurationError(f"qubit range {lo}..{hi} must lie within 1..5")
        if self.fd_step >= self.t_step:
            raise ConfigurationError(f"fd_step {self.fd_step} must be smaller than t_step {self.t_step}")
        if self.threshold_rule not in backaction.THRESHOLD_RULES:
            raise ConfigurationError(f"threshold must be one of {backaction.THRESHOLD_RULES}")
        if any(b < 0 for b in self.beta_grid):
            raise ConfigurationError("beta values must be nonnegative")
        return self


def _parse_range(text):
    parts = text.replace("..", " ").split()
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise ConfigurationError(f"qubit range must look like 'a..b', got {text!r}")
    return tuple(int(p) for p in parts)


def _parse_floats(text):
    items = [s.strip() for s in text.split(",") if s.strip()]
    return tuple(float(s) for s in items)


_KEYS = {
    "t1": ("t1", float),
    "t_step": ("t_step", float),
    "horizon": ("horizon", float),
    "qubits": ("qubit_range", _parse_range),
    "beta": ("beta_grid", _parse_floats),
    "dt": ("dt", float),
    "fd_step": ("fd_step", float),
    "threshold": ("threshold_rule", str),
    "out": ("output_path", str),
    "t_grid": ("t_grid", _parse_floats),
}


def read_config(path):
    """Parse a flat ``key = value`` file into ``ExperimentConfig`` field overrides."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[config]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    overrides = {}
    for key, value in parser["config"].items():
        norm = key.replace("-", "_")
        if norm not in _KEYS:
            raise ConfigurationError(f"unknown config key {key!r}")
        name, conv = _KEYS[norm]
        try:
            overrides[name] = conv(value)
        except ValueError as exc:
            raise ConfigurationError(f"bad value for {key}: {value!r}") from exc
    return overrides


def build_config(args):
    cfg = ExperimentConfig()
    if args.config:
        cfg = replace(cfg, **read_config(args.config))
    flag_values = {
        "t1": args.t1,
        "t_step": args.t_step,
        "horizon": args.horizon,
        "qubits": args.qubits,
        "beta": args.beta,
        "dt": args.dt,
        "fd_step": args.fd_step,
        "threshold": args.threshold,
        "out": args.out,
        "t_grid": getattr(args, "t_grid", None),
    }
    overrides = {}
    for key, raw in flag_values.items():
        if raw is None:
            continue
        name, conv = _KEYS[key]
        try:
            overrides[name] = conv(raw) if isinstance(raw, str) else raw
        except ValueError as exc:
            raise ConfigurationError(f"bad value for --{key.replace('_', '-')}: {raw!r}") from exc
    return replace(cfg, **overrides).validate()


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


# -- subcommands --------------------------------------------------------------


def load_channel_source(source):
    """``"ad:<lambda>"`` for amplitude damping, anything else is a channel file path."""
    if source.startswith("ad:"):
        try:
            lam = float(source[3:])
        except ValueError as exc:
            raise ConfigurationError(f"cannot parse damping probability in {source!r}") from exc
        return amplitude_damping(lam)
    try:
        return load_channel(source)
    except ValidationError:
        raise
    except (OSError, ValueError) as exc:
        raise ConfigurationError(f"cannot load channel {source!r}: {exc}") from exc


def cmd_twirl(cfg, source):
    ch = load_channel_source(source)
    pc = twirl_diagonal(ch)
    with _output(cfg.output_path) as fh:
        write_pauli_csv(pc, fh)


def cmd_lindblad(cfg):
    times = cfg.t_grid if cfg.t_grid else tuple(cfg.t1 * x for x in (0.1, 0.5, 1.0, 2.0))
    rows = lindblad.lindblad_scan(cfg.t1, times, cfg.fd_step)
    with _output(cfg.output_path) as fh:
        lindblad.write_lindblad_csv(rows, fh)


def cmd_backaction(cfg):
    lo, hi = cfg.qubit_range
    scans = [
        backaction.backaction_scan(n, cfg.t1, cfg.t_step, cfg.horizon, cfg.threshold_rule)
        for n in range(lo, hi + 1)
    ]
    with _output(cfg.output_path) as fh:
        backaction.write_backaction_csv(scans, fh)


def cmd_fixedpoint(cfg, lam=None):
    if lam is None:
        p1 = backaction.pta_step_probs(cfg.t1, cfg.t_step).single_step
    else:
        p1 = tuple(ad_twirl_probs(lam))
    orbit = backaction.iterate_to_fixed_point(p1, tol=1e-10, max_iter=100_000)
    with _output(cfg.output_path) as fh:
        fh.write("iteration,p1,p2,p3,p4\n")
        for k, row in enumerate(orbit):
            fh.write(f"{k}," + ",".join(f"{x:.12g}" for x in row) + "\n")


def cmd_ctqec(cfg):
    comps = [ctqec.compare_noise_models(cfg.t1, beta, cfg.horizon, cfg.dt, cfg.t_step) for beta in cfg.beta_grid]
    with _output(cfg.output_path) as fh:
        ctqec.write_ctqec_csv(comps, fh)


# -- argument parsing ---------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--t1", type=float)
    common.add_argument("--t-step", dest="t_step", type=float)
    common.add_argument("--horizon", type=float)
    common.add_argument("--qubits", help="inclusive range a..b")
    common.add_argument("--beta", help="comma-separated correction rates")
    common.add_argument("--dt", type=float)
    common.add_argument("--fd-step", dest="fd_step", type=float)
    common.add_argument("--threshold", choices=backaction.THRESHOLD_RULES)
    common.add_argument("--out", help="output CSV path (default stdout)")

    parser = argparse.ArgumentParser(prog="twirlkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("twirl", parents=[common], help="twirl a channel into Pauli probabilities")
    p.add_argument("channel", help="'ad:<lambda>' or a Kraus channel file")
    p = sub.add_parser("lindblad", parents=[common], help="extract the amplitude-damping generator")
    p.add_argument("--t-grid", dest="t_grid", help="comma-separated snapshot times")
    sub.add_parser("backaction", parents=[common], help="no-excitation probabilities and divergence times")
    p = sub.add_parser("fixedpoint", parents=[common], help="iterate the twirled map to its fixed point")
    p.add_argument("--lambda", dest="lam", type=float, help="damping probability (overrides t1/t-step)")
    sub.add_parser("ctqec", parents=[common], help="error-corrected fidelity, exact vs twirled noise")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
        if args.command == "lindblad" and args.t_grid is not None and not cfg.t_grid:
            raise ConfigurationError("--t-grid is empty")
        if args.command == "twirl":
            cmd_twirl(cfg, args.channel)
        elif args.command == "lindblad":
            cmd_lindblad(cfg)
        elif args.command == "backaction":
            cmd_backaction(cfg)
        elif args.command == "fixedpoint":
            if args.lam is not None and not 0 <= args.lam <= 1:
                raise ConfigurationError(f"--lambda must lie in [0, 1], got {args.lam}")
            cmd_fixedpoint(cfg, args.lam)
        elif args.command == "ctqec":
            cmd_ctqec(cfg)
    except ValidationError as exc:
        print(f"twirlkit: invalid channel: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (TwirlkitError, ValueError) as exc:
        print(f"twirlkit: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK
