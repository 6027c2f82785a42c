import argparse
import logging
import sys

from tasks import OUTPUT_FORMATS, REPORT_DIR, RunConfig, load_settings, setup_logging
from tasks.density import KINDS, cmd_density
from tasks.moments import METHODS, cmd_moments
from tasks.sample import cmd_sample
from tasks.verify import SUITES, cmd_verify
from triangles.errors import DomainError
from triangles.models import ModelId
from triangles.montecarlo import DEFAULT_CHUNK_SIZE

EXIT_USAGE = 2

MODEL_CHOICES = [model.value for model in ModelId]


def _common_flags(settings):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=10_000, help="Number of samples or latent draws")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed of the Monte Carlo streams")
    common.add_argument("--grid", type=int, default=128, help="Grid points per axis")
    common.add_argument("--tol", type=float, default=1e-10, help="Quadrature tolerance")
    common.add_argument("--format", choices=OUTPUT_FORMATS, default="csv", help="Output format")
    common.add_argument("--threads", type=int, default=settings.get("threads"),
                        help="Worker threads (default: TRI_THREADS or the machine's CPU count)")
    common.add_argument("--chunk-size", type=int, default=settings.get("chunk_size") or DEFAULT_CHUNK_SIZE,
                        help="Samples per Monte Carlo chunk; part of the reproducibility key")
    common.add_argument("--out", default=None, help="Output file (default: stdout)")
    return common


def build_parser(settings=None):
    settings = settings or {}
    common = _common_flags(settings)
    parser = argparse.ArgumentParser(description="Random triangles under six constraint models.")
    commands = parser.add_subparsers(dest="subcommand", required=True)

    def model_flag(sub):
        sub.add_argument("--model", type=str.lower, choices=MODEL_CHOICES, required=True,
                         help="Triangle model (m1..m6)")

    sample = commands.add_parser("sample", parents=[common], help="Draw triangles")
    model_flag(sample)

    density = commands.add_parser("density", parents=[common], help="Density grid or univariate curve")
    model_flag(density)
    density.add_argument("--kind", choices=KINDS, required=True)
    density.add_argument("--var", default=None, help="Univariate selector (a, b, c, alpha, beta, gamma)")

    moments = commands.add_parser("moments", parents=[common], help="Tabulated moments of a model")
    model_flag(moments)
    moments.add_argument("--method", choices=METHODS, default="closed")

    verify = commands.add_parser("verify", parents=[common], help="Run verification suites")
    verify.add_argument("--suite", choices=SUITES + ("all",), default="all")
    verify.add_argument("--report-dir", nargs="?", const=REPORT_DIR, default=None,
                        help=f"Also save the report as timestamped JSON and CSV files (default dir: {REPORT_DIR})")
    return parser


def config_from_args(args):
    return RunConfig(
        subcommand=args.subcommand,
        model=ModelId.parse(args.model) if getattr(args, "model", None) else None,
        n=args.n,
        seed=args.seed,
        grid_points=args.grid,
        tolerance=args.tol,
        output_format=args.format,
        threads=args.threads,
        chunk_size=args.chunk_size,
        out=args.out,
    )


def dispatch(config, args):
    if config.subcommand == "sample":
        return cmd_sample(config)
    if config.subcommand == "density":
        return cmd_density(config, args.kind, args.var)
    if config.subcommand == "moments":
        return cmd_moments(config, args.method)
    return cmd_verify(config, args.suite, args.report_dir)


def main(argv=None):
    """Run one subcommand; returns the process exit code."""
    try:
        settings = load_settings()
    except DomainError as e:
        setup_logging()
        logging.error(str(e))
        return EXIT_USAGE
    setup_logging(settings["log_level"])

    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    try:
        config = config_from_args(args)
        return dispatch(config, args)
    except DomainError as e:
        parser.print_usage(sys.stderr)
        logging.error(f"{args.subcommand}: {str(e)}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
