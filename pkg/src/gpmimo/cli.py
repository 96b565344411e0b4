"""Command-line interface: `gpmimo run` and `gpmimo timing`."""

import argparse
import json
import sys

from .experiment import ExperimentConfig, run_experiment, timing_scan


def _parse_list(text, cast):
    return [cast(tok) for tok in text.split(",") if tok.strip()]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gpmimo",
        description="Correlated-MIMO channel estimation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a Monte Carlo experiment sweep")
    run_p.add_argument("--config", help="JSON config file (flags below override it)")
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--trials", type=int)
    run_p.add_argument("--out", dest="output_dir", help="output directory")
    run_p.add_argument("--model", choices=["kronecker", "weichselberger"])
    run_p.add_argument("--estimators", help="comma list, e.g. SC_GPR,RQ_GPR,LS")
    run_p.add_argument("--snr-db", help="comma list of SNR points in dB")
    run_p.add_argument("--strides", help="comma list of activation strides")
    run_p.add_argument("--shape", help="grid as RXxTX, e.g. 36x36")
    run_p.add_argument("--fit-iters", type=int, help="marginal-likelihood budget")
    run_p.add_argument(
        "--dump-errors",
        action="store_true",
        default=None,
        help="also write errors.csv with raw per-entry errors",
    )

    timing_p = sub.add_parser("timing", help="wall-time scaling scan")
    timing_p.add_argument("--sizes", default="12,18,24", help="comma list of grid sides")
    timing_p.add_argument("--stride", type=int, default=2)
    timing_p.add_argument("--reps", type=int, default=5)
    timing_p.add_argument("--seed", type=int, default=777)
    timing_p.add_argument("--snr-db", type=float, default=0.0)
    timing_p.add_argument("--learned-grid", type=int, default=36)
    timing_p.add_argument("--learned-stride", type=int, default=4)
    timing_p.add_argument("--learned-iters", type=int, default=20)
    timing_p.add_argument("--out", help="write the timing table as JSON")
    return parser


def _run(args):
    data = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    overrides = {
        "seed": args.seed,
        "trials": args.trials,
        "output_dir": args.output_dir,
        "model": args.model,
        "dump_errors": args.dump_errors,
    }
    if args.estimators:
        overrides["estimators"] = _parse_list(args.estimators, str)
    if args.snr_db:
        overrides["snr_db"] = _parse_list(args.snr_db, float)
    if args.strides:
        overrides["strides"] = _parse_list(args.strides, int)
    if args.shape:
        rx, tx = args.shape.lower().split("x")
        overrides["n_rx"], overrides["n_tx"] = int(rx), int(tx)
    if args.fit_iters is not None:
        fit = dict(data.get("fit", {}))
        fit["max_iters"] = args.fit_iters
        overrides["fit"] = fit
    data.update({k: v for k, v in overrides.items() if v is not None})

    cfg = ExperimentConfig.from_dict(data)
    paths = run_experiment(cfg, progress=lambda msg: print(msg, flush=True))
    print(f"wrote {paths['results']}")
    print(f"wrote {paths['summary']}")
    print(f"wrote {paths['meta']}")
    if paths["errors"]:
        print(f"wrote {paths['errors']}")
    return 0


def _timing(args):
    table = timing_scan(
        _parse_list(args.sizes, int),
        stride=args.stride,
        reps=args.reps,
        snr_db=args.snr_db,
        seed=args.seed,
        learned_grid=args.learned_grid,
        learned_stride=args.learned_stride,
        learned_iters=args.learned_iters,
    )
    print(f"{'estimator':<10} {'grid':>5} {'P':>6} {'median ms':>12}")
    for row in table["rows"]:
        print(
            f"{row['estimator']:<10} {row['grid']:>5} {row['P']:>6} "
            f"{row['median_ms']:>12.3f}"
        )
    for estimator, slope in table["slopes"].items():
        print(f"log-log slope {estimator}: {slope:.2f}")
    learned = table["learned"]
    print(
        f"learned RBF ({learned['iters']} iters, P={learned['P']}): "
        f"{learned['rbf_ms']:.1f} ms vs SC {learned['sc_ms']:.1f} ms "
        f"(x{learned['ratio']:.1f})"
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(table, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.out}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _run(args)
    return _timing(args)


if __name__ == "__main__":
    sys.exit(main())
