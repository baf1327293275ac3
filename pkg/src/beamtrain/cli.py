"""Command-line interface: ``beamtrain {run,train,presets,validate}``.

Exit codes: 0 success, 2 invalid arguments or config, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .channel import profile_by_name
from .config import (
    PRESETS,
    ConfigError,
    apply_overrides,
    build_configs,
    load_panels,
    panel_to_json,
    parse_override,
    preset_panels,
)
from .experiment import (
    array_gain,
    curve_rows,
    curves_to_csv,
    fmt_float,
    run_experiment,
    to_db,
    train_once,
    trials_to_csv,
)
from .training import DegenerateInputError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _snr_arg(text):
    if text.strip().lower() in ("inf", "+inf"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid SNR {text!r}") from None


def _add_config_source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS), help="built-in config")
    src.add_argument("--config", metavar="PATH", help="JSON config file")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--trials", type=int, help="trials per cell (overrides the config)")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="dotted-key override, may repeat")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamtrain",
        description="Joint Tx/Rx beamforming training simulator (SGV / STV).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo experiment")
    _add_config_source(run)
    run.add_argument("-o", "--output", default="-",
                     help="results file ('-' for stdout, the default)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--trials-csv", metavar="PATH", help="also write per-trial records")
    run.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: $BEAMTRAIN_THREADS, 0 = auto)")

    tr = sub.add_parser("train", help="train once on one sampled channel")
    tr.add_argument("--scheme", required=True, type=str.upper, choices=("SGV", "STV"))
    tr.add_argument("--channel", required=True, type=str.lower, choices=("los", "nlos"))
    tr.add_argument("--m", required=True, type=int, help="transmit antennas")
    tr.add_argument("--n", required=True, type=int, help="receive antennas")
    tr.add_argument("--epsilon", required=True, type=int)
    tr.add_argument("--snr-db", required=True, type=_snr_arg)
    tr.add_argument("--seed", required=True, type=int)

    sub.add_parser("presets", help="list built-in configs")

    val = sub.add_parser("validate", help="check a config without running it")
    _add_config_source(val)
    return parser


def _resolve(args) -> list:
    panels = preset_panels(args.preset) if args.preset else load_panels(args.config)
    overrides = [parse_override(o) for o in args.overrides]
    if args.seed is not None:
        overrides.insert(0, (["master_seed"], args.seed))
    if args.trials is not None:
        overrides.insert(0, (["trials"], args.trials))
    return build_configs(apply_overrides(panels, overrides))


def _summary(points) -> str:
    head = f"{'profile':<7} {'M':>3} {'N':>3} {'scheme':<6} {'eps':>3} {'snr_db':>7} " \
           f"{'gain_db':>9} {'bound_db':>9} {'trials':>6}"
    lines = [head, "-" * len(head)]
    for row in curve_rows(points):
        scheme, eps, snr, gain, bound, trials, profile, m, n, _ = row
        lines.append(f"{profile:<7} {m:>3} {n:>3} {scheme:<6} {eps:>3} {snr:>7} "
                     f"{gain:>9} {bound:>9} {trials:>6}")
    return "\n".join(lines)


def _points_json(points) -> str:
    def num(x):
        return fmt_float(x) if math.isinf(x) or math.isnan(x) else float(fmt_float(x))

    rows = [
        {"scheme": p.scheme.value, "epsilon": p.epsilon, "snr_db": num(p.snr_db),
         "mean_gain_db": num(p.mean_gain_db), "mean_bound_db": num(p.mean_bound_db),
         "trials": p.trials, "profile": p.profile, "m_tx": p.m_tx, "n_rx": p.n_rx,
         "failed": p.failed}
        for p in points
    ]
    return json.dumps({"points": rows}, indent=2) + "\n"


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_run(args) -> int:
    configs = _resolve(args)
    if args.threads is not None and args.threads < 0:
        raise ConfigError("--threads must be nonnegative")
    results = [run_experiment(cfg, args.threads) for cfg in configs]
    points = [p for res in results for p in res.points]
    text = curves_to_csv(points) if args.format == "csv" else _points_json(points)
    _write(args.output, text)
    if args.trials_csv:
        _write(args.trials_csv, trials_to_csv(results))
    failed = sum(res.failed_trials for res in results)
    # keep stdout clean for the results when they are streamed there
    out = sys.stderr if args.output == "-" else sys.stdout
    print(_summary(points), file=out)
    if failed:
        print(f"warning: {failed} failed trial(s) excluded from the means", file=out)
    return EXIT_OK


def cmd_train(args) -> int:
    for name in ("m", "n", "epsilon"):
        if getattr(args, name) < 1:
            raise ConfigError(f"--{name} must be a positive integer")
    if not 0 <= args.seed < 2**64:
        raise ConfigError("--seed must fit in 64 unsigned bits")
    profile = profile_by_name(args.channel)
    try:
        _, h, res, bound = train_once(profile, args.m, args.n, args.scheme,
                                      args.epsilon, args.snr_db, args.seed)
    except DegenerateInputError as exc:
        print(f"error: degenerate measurement: {exc}", file=sys.stderr)
        return 1
    out = res.to_dict()
    out["scheme"] = args.scheme
    gain = array_gain(h, res.t, res.r)
    out["gain_linear"] = gain
    out["gain_db"] = to_db(gain)
    out["svd_bound_linear"] = bound
    out["svd_bound_db"] = to_db(bound)
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_presets(args) -> int:
    listing = {
        name: {
            "description": spec["description"],
            "panels": [panel_to_json(c) for c in build_configs(preset_panels(name))],
        }
        for name, spec in PRESETS.items()
    }
    print(json.dumps(listing, indent=2))
    return EXIT_OK


def cmd_validate(args) -> int:
    configs = _resolve(args)
    cells = sum(len(c.cells()) for c in configs)
    print(f"ok: {len(configs)} panel(s), {cells} cell(s)")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "train": cmd_train, "presets": cmd_presets,
            "validate": cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
