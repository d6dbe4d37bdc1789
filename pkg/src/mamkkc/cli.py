"""Command-line entry point: ``mamkkc --data X.csv --labels y.txt --clusters 3 --out runs/``."""
import argparse
import logging
import sys

from . import bench
from .errors import InputError, NumericalError

log = logging.getLogger("mamkkc")


def str2bool(text):
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser():
    p = argparse.ArgumentParser(
        prog="mamkkc", description="Manifold adaptive multiple kernel k-means clustering."
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="feature CSV, one sample per row")
    src.add_argument("--kernel-dir", help="directory of precomputed kernel matrix files")
    p.add_argument("--labels", help="ground-truth labels, one per line")
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--tau", type=int, default=bench.manifold_graph.DEFAULT_TAU)
    p.add_argument("--lambda-grid", default="1.0:2.0:0.1", help="a:b:step or comma list")
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--kmeans-restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale-features", type=str2bool, default=True)
    p.add_argument("--normalize-rows", type=str2bool, default=False)
    p.add_argument("--random-init", type=str2bool, default=False)
    p.add_argument("--baseline", choices=bench.BASELINES)
    p.add_argument("--out", help="output directory for CSV reports")
    p.add_argument("--trace", type=str2bool, default=False)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args):
    return bench.RunConfig(
        clusters=args.clusters,
        data=args.data,
        kernel_dir=args.kernel_dir,
        labels=args.labels,
        tau=args.tau,
        lambdas=bench.parse_lambda_grid(args.lambda_grid),
        restarts=args.restarts,
        seed=args.seed,
        kmeans_restarts=args.kmeans_restarts,
        out=args.out,
        scale_features=args.scale_features,
        normalize_rows=args.normalize_rows,
        random_init=args.random_init,
        baseline=args.baseline,
        trace=args.trace,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = config_from_args(args)
        if config.baseline:
            report = bench.run_baseline(config)
        else:
            report = bench.run_experiment(config)
    except (InputError, OSError) as exc:
        log.error("%s", exc)
        return 1
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return 2
    print(bench.format_summary(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
