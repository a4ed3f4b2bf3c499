"""Command-line entry point: ``conceptor-ccl <subcommand> [options]``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import CclError, ConfigError

SUBCOMMANDS = ("interpolate", "degrade", "distort", "conceptor-dump")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conceptor-ccl",
                                     description="Conceptor control loop experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="key=value config file with experiment sections")
        sp.add_argument("--seed", type=_u64)
        sp.add_argument("--out", type=Path)
        sp.add_argument("--mode", choices=("static", "ccl", "both"))
        if name == "conceptor-dump":
            sp.add_argument("--experiment", choices=("interpolate", "degrade", "distort"),
                            help="which experiment's targets to dump (default: the config's section)")
        else:
            sp.add_argument("--no-plots", action="store_true", help="skip PNG rendering")
    return parser


def resolve_config(args, experiment: str | None):
    from .experiments import ExperimentConfig, load_config

    if args.config is not None:
        cfg = load_config(args.config, experiment)
    else:
        cfg = ExperimentConfig.for_experiment(experiment or "interpolate")
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = str(args.out)
    if args.mode is not None:
        cfg.mode = args.mode
    return cfg.validate()


def dump_conceptors(cfg) -> list[Path]:
    """Train the experiment's target conceptor(s) and write them to ``cfg.out``."""
    import numpy as np

    from .conceptor import save_conceptor
    from .experiments import Table, emit_csv
    from .reservoir import save_params

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if cfg.experiment == "interpolate":
        from .experiments.interpolation import train_pair

        for t1 in cfg.t1:
            p, _, c0, c1, _ = train_pair(cfg, t1)
            for period, c in ((cfg.t0, c0), (t1, c1)):
                path = out / f"conceptor_T{period:g}.csv"
                save_conceptor(c, path)
                written.append(path)
        save_params(p, out / "reservoir.npz")
        written.append(out / "reservoir.npz")
    elif cfg.experiment == "degrade":
        from .experiments.degradation import train

        p, _, c_target, _ = train(cfg)
        save_conceptor(c_target, out / "conceptor_target.csv")
        save_params(p, out / "reservoir.npz")
        written += [out / "conceptor_target.csv", out / "reservoir.npz"]
    else:
        from .rfc import rfc_init, train_layer
        from .signals import gen_two_sine

        weights = rfc_init(cfg.n, cfg.n_rfc, cfg.rho, cfg.rho_in, cfg.rho_b, 1, cfg.seed)
        c_target, _ = train_layer(weights, gen_two_sine(cfg.train_length + 1, cfg.periods).data,
                                  cfg.aperture, cfg.ridge_reg, cfg.washout)
        table = Table(["index", "c"], [(i, float(v)) for i, v in enumerate(np.asarray(c_target.c))])
        written.append(emit_csv(table, out / "rfc_target.csv"))
    return written


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "conceptor-dump":
            cfg = resolve_config(args, args.experiment)
            for path in dump_conceptors(cfg):
                print(path)
            return 0
        from .experiments import RUNNERS, write_record

        cfg = resolve_config(args, args.command)
        record = RUNNERS[cfg.experiment](cfg)
        for path in write_record(record, cfg.out, plots=not args.no_plots):
            print(path)
        return 0
    except CclError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ConfigError):
            err["field"] = exc.field
        print(json.dumps(err), file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1


if __name__ == "__main__":
    sys.exit(main())
