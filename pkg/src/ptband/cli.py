"""Command line entry point ``ptband``.

Exit codes: 0 success, 1 configuration error, 2 invariant-suite failure,
3 abort on an exceptional (defective) mode.
"""

import argparse
import os
import re
import sys

import numpy as np

from .bloch import ExceptionalModeError
from .counterpart import NoCounterpartError
from .experiments import (
    FIGURES,
    ConfigError,
    ExperimentConfig,
    figure_configs,
    format_report,
    load_config,
    report_json,
    run_checks,
    run_counterpart,
    run_evolution,
    run_modes,
    run_norms,
    run_spectrum,
)

EXIT_OK, EXIT_CONFIG, EXIT_SUITE, EXIT_EXCEPTIONAL = 0, 1, 2, 3

_ANGLE = re.compile(r"^\s*([+-]?)\s*(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(text):
    """Float or a multiple of pi such as ``pi/2``, ``-3pi/8``, ``0.5*pi``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}")
    sign, coef, den = m.groups()
    value = (float(coef) if coef else 1.0) * np.pi / (float(den) if den else 1.0)
    return -value if sign == "-" else value


def _common(p):
    src = p.add_argument_group("config source")
    src.add_argument("--config", help="JSON experiment config")
    src.add_argument("--figure", choices=FIGURES, help="bundled config for a figure")
    m = p.add_argument_group("model")
    m.add_argument("--J", type=float)
    m.add_argument("--delta", type=float)
    m.add_argument("--gamma", type=float)
    m.add_argument("--N", type=int)
    m.add_argument("--boundary", choices=["periodic", "open", "open_seam"])
    w = p.add_argument_group("packet")
    w.add_argument("--alpha", type=float)
    w.add_argument("--k0", type=parse_angle)
    w.add_argument("--N-A", dest="N_A", type=int)
    t = p.add_argument_group("time grid")
    t.add_argument("--unit", choices=["T_rev", "T_cir", "J"])
    t.add_argument("--duration", type=float)
    t.add_argument("--samples-per-period", type=int)
    t.add_argument("--snapshots", type=lambda s: [float(x) for x in s.split(",") if x.strip()])
    o = p.add_argument_group("run")
    o.add_argument("--engine", choices=["spectral", "direct"])
    o.add_argument("--out", dest="directory", help="output directory")
    o.add_argument("--prefix")
    o.add_argument("--svg", action="store_true", default=None)
    o.add_argument("--seed", type=int)
    o.add_argument("--n-random", type=int)
    o.add_argument("--dump-config", action="store_true",
                   help="print the resolved config as JSON and exit")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ptband",
        description="Non-Hermitian PT-symmetric dimerized ring: spectra, modes, dynamics, checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "spectrum": "band energies and lambda_k on the momentum grid",
        "modes": "Bloch-mode transformation coefficients",
        "evolve": "Gaussian packet evolution: snapshots and norm/centre/width series",
        "norms": "Dirac norm by closed form and both engines, biorthogonal norm",
        "counterpart": "Hermitian counterpart family with the same spectrum",
        "check": "run the invariant suites (text and JSON report)",
    }
    for name, text in helps.items():
        _common(sub.add_parser(name, help=text, description=text))
    return parser


def _apply_overrides(cfg, args):
    d = cfg.to_dict()
    for key in ("J", "delta", "gamma", "N", "boundary"):
        if getattr(args, key) is not None:
            d["model"][key] = getattr(args, key)
    for key in ("alpha", "k0", "N_A"):
        if getattr(args, key) is not None:
            d["packet"][key] = getattr(args, key)
    for key in ("unit", "duration", "samples_per_period", "snapshots"):
        if getattr(args, key) is not None:
            d["time"][key] = getattr(args, key)
    for key in ("directory", "prefix", "svg"):
        if getattr(args, key) is not None:
            d["output"][key] = getattr(args, key)
    if args.engine is not None:
        d["engine"] = args.engine
    if args.seed is not None:
        d["seed"] = args.seed
    if args.n_random is not None:
        d["n_random"] = args.n_random
    return ExperimentConfig.from_dict(d)


def resolve_configs(args):
    if args.config and args.figure:
        raise ConfigError("--config and --figure are mutually exclusive")
    if args.config:
        base = [load_config(args.config)]
    elif args.figure:
        base = figure_configs(args.figure)
    else:
        base = [ExperimentConfig()]
    return [_apply_overrides(cfg, args) for cfg in base]


def _run_one(command, cfg, out):
    if command == "spectrum":
        out.write(run_spectrum(cfg) + "\n")
    elif command == "modes":
        out.write(run_modes(cfg) + "\n")
    elif command == "evolve":
        snap, series, svgs = run_evolution(cfg)
        for path in (snap, series, *svgs):
            out.write(path + "\n")
    elif command == "norms":
        out.write(run_norms(cfg) + "\n")
    elif command == "counterpart":
        path, family = run_counterpart(cfg)
        c = family.canonical
        out.write(f"{path}\ncanonical: Je={c.Je:.17g} delta_e={c.delta_e:.17g} Ve={c.Ve:.17g}\n"
                  f"delta_e range: [0, {family.delta_e_max:.17g}]\n")
    elif command == "check":
        results = run_checks(cfg)
        text = format_report(results)
        out.write(text)
        os.makedirs(cfg.output.directory, exist_ok=True)
        with open(cfg.output_path("checks.txt"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        with open(cfg.output_path("checks.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report_json(results, cfg))
        return all(r.passed for r in results)
    return True


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        configs = resolve_configs(args)
        if args.dump_config:
            for cfg in configs:
                out.write(cfg.to_json())
            return EXIT_OK
        ok = True
        for cfg in configs:
            ok &= _run_one(args.command, cfg, out)
    except (ConfigError, NoCounterpartError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except ExceptionalModeError as exc:
        sys.stderr.write(f"exceptional mode: {exc}\n")
        return EXIT_EXCEPTIONAL
    return EXIT_OK if ok else EXIT_SUITE


if __name__ == "__main__":
    sys.exit(main())
