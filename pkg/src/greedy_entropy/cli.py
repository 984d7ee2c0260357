"""Command-line entry point: ``greedy-entropy <subcommand> [options]``."""
import argparse
import logging
import sys

from .experiments import ConfigError, ExperimentConfig, run_experiment

SUBCOMMANDS = ("rbm-theorem2", "lp-example", "oga-bounds", "pde", "selftest")


def build_parser():
    ap = argparse.ArgumentParser(prog="greedy-entropy",
                                 description="Greedy algorithms versus entropy numbers: verification experiments.")
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", help="flat 'key = value' config file; flags override its keys")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="output directory for CSV, SVG and JSON files")
    ap.add_argument("--nmax", type=int, help="largest n (0 keeps the experiment default)")
    ap.add_argument("--gamma", type=float, help="weak greedy parameter in (0, 1]")
    ap.add_argument("--p", help="l_p exponent(s) for lp-example, comma separated")
    ap.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    ap.add_argument("-q", "--quiet", action="store_true", help="only print failed verdicts")
    return ap


def resolve_config(args):
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    over = {"experiment": args.subcommand}
    for flag, key in (("seed", "seed"), ("out", "out"), ("nmax", "n_max"), ("gamma", "gamma"), ("p", "p")):
        v = getattr(args, flag)
        if v is not None:
            over[key] = str(v)
    return ExperimentConfig.from_mapping(over, base=cfg).validate()


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    if args.dump_config:
        sys.stdout.write(cfg.dumps())
        return 0
    ok = True
    for rep in run_experiment(cfg):
        paths = rep.write(cfg.out)
        print(f"== {rep.experiment} ({rep.runtime:.1f} s) -> {cfg.out}")
        for ln in rep.summary_lines():
            if not args.quiet or ln.startswith("FAIL"):
                print("  " + ln)
        for s in rep.slopes:
            if not args.quiet:
                print(f"  slope {s['name']}: {s['slope']:.4f} over n in {s['window']}")
        for e in rep.errors:
            print(f"  error in {e['stage']}: {e['error']}")
        print(f"  wrote {len(paths)} files; hard verdicts {'pass' if rep.passed else 'FAIL'}")
        ok &= rep.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
