import argparse
import sys
from collections.abc import Callable, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from arpersist.chains import ChainKind, SimConfig, estimate_expected_T, estimate_tail
from arpersist.errors import ArpersistError
from arpersist.exact_r import (
    cdf_grid,
    cell_index,
    drift_threshold,
    expected_T_exact,
    harmonic_table,
    tail_table,
)
from arpersist.harness import (
    MONTE_CARLO_EXPERIMENTS,
    Experiment,
    ExperimentName,
    write_csv,
    write_json,
)
from arpersist.innovations import LogTail, classify, parse_model
from arpersist.zlimit import ZParams, t0_tail

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFICATION = 3

EXPECTED_T_HORIZON = 100_000


class _Parser(argparse.ArgumentParser):
    """Argument parser reporting usage errors with exit status 1."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        message = f"Expected comma separated integers but got {text!r}."
        raise argparse.ArgumentTypeError(message) from e
    if not values:
        raise argparse.ArgumentTypeError("Expected a non-empty list.")
    return values


def _float_grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        message = f"Expected comma separated numbers but got {text!r}."
        raise argparse.ArgumentTypeError(message) from e


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"Expected positive integer but got {value}.")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"Expected an unsigned 64-bit seed but got {value}.")
    return value


def _add_logging(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("-v", "--verbose", action="store_true", help="Log debug messages.")
    group.add_argument("-q", "--quiet", action="store_true", help="Log warnings only.")


def _add_model(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "--model",
        required=required,
        help="Innovation model, e.g. log-tail:c=0.5, pareto:alpha=2,scale=1, discrete:file=PATH.",
    )


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="CSV output path; standard output when omitted.")


def _add_mc(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--reps", type=_positive, required=required, help="Monte Carlo replicates.")
    parser.add_argument("--seed", type=_seed, help="Master seed, required with --reps.")
    parser.add_argument(
        "--threads", type=_positive, help="Worker threads; affects speed, never results."
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="arpersist",
        description="Recurrence times and scaling limits of heavy-tailed autoregressive chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    simulate = sub.add_parser("simulate", help="Monte Carlo tail of the return time.")
    _add_model(simulate)
    simulate.add_argument(
        "--kind",
        choices=[kind.value for kind in ChainKind],
        default=ChainKind.RANDOM_EXCHANGE.value,
        help="Chain to simulate.",
    )
    simulate.add_argument("--x0", type=float, required=True, help="Threshold on the log scale.")
    simulate.add_argument("--A", type=float, default=2.0, help="Base of the log scale.")
    simulate.add_argument("--start", type=float, required=True, help="Starting point.")
    simulate.add_argument("--ngrid", type=_grid, help="Steps n, comma separated.")
    simulate.add_argument("--nmax", type=_positive, help="Use the grid 1..nmax.")
    _add_mc(simulate, required=True)
    _add_output(simulate)
    _add_logging(simulate)

    exact = sub.add_parser("exact-tail", help="Exact tail table of the random exchange chain.")
    _add_model(exact)
    exact.add_argument("--x0", type=float, required=True, help="Threshold.")
    exact.add_argument("--nmax", type=_positive, required=True, help="Last step of the table.")
    _add_output(exact)
    _add_logging(exact)

    harmonic = sub.add_parser("harmonic", help="Harmonic function table.")
    _add_model(harmonic)
    harmonic.add_argument("--x0", type=float, required=True, help="Threshold.")
    harmonic.add_argument("--nmax", type=_positive, required=True, help="Last cell of the table.")
    _add_output(harmonic)
    _add_logging(harmonic)

    expected = sub.add_parser("expected-t", help="Expected return time.")
    _add_model(expected)
    expected.add_argument("--x0", type=float, required=True, help="Threshold.")
    expected.add_argument("--start", type=float, required=True, help="Starting point.")
    expected.add_argument(
        "--kind",
        choices=[kind.value for kind in ChainKind],
        default=ChainKind.RANDOM_EXCHANGE.value,
        help="Chain for the Monte Carlo estimate.",
    )
    expected.add_argument("--A", type=float, default=2.0, help="Base of the log scale.")
    _add_mc(expected, required=False)
    _add_logging(expected)

    zlaw = sub.add_parser("zlaw", help="Tail of the hitting time of zero by the limit process.")
    zlaw.add_argument("--c", type=float, required=True, help="Index 0 < c < 1.")
    zlaw.add_argument("--start", type=float, default=1.0, help="Starting point z > 0.")
    zlaw.add_argument("--ngrid", type=_float_grid, required=True, help="Times t, comma separated.")
    _add_output(zlaw)
    _add_logging(zlaw)

    classify_cmd = sub.add_parser("classify", help="Recurrence class of the chains.")
    _add_model(classify_cmd)
    classify_cmd.add_argument(
        "--eps", type=float, help="Also report the drift threshold of U_0 + U_eps (log-tail)."
    )
    classify_cmd.add_argument("--A", type=float, default=2.0, help="Base of the log scale.")
    classify_cmd.add_argument(
        "--nmax", type=_positive, default=1000, help="Last level of the drift scan."
    )
    _add_logging(classify_cmd)

    verify = sub.add_parser("verify", help="Run a verification experiment.")
    verify.add_argument("experiment", choices=[name.value for name in ExperimentName])
    _add_model(verify, required=False)
    verify.add_argument("--x0", type=float, help="Threshold.")
    verify.add_argument("--A", type=float, help="Base of the log scale.")
    verify.add_argument("--start", type=float, help="Starting point.")
    verify.add_argument("--ngrid", type=_grid, help="Steps n, comma separated.")
    verify.add_argument("--tol", type=float, help="Experiment tolerance.")
    _add_mc(verify, required=False)
    _add_output(verify)
    verify.add_argument("--json", help="JSON record output path.")
    _add_logging(verify)
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = "DEBUG" if args.verbose else "WARNING" if args.quiet else "INFO"
    logger.remove()
    logger.add(sys.stderr, level=level)


def _emit(write: Callable[[object], None], out: str | None) -> None:
    write(out if out is not None else sys.stdout)


def _write_frame(frame: pd.DataFrame, out: str | None) -> None:
    _emit(
        lambda target: frame.to_csv(target, index=False, float_format="%.17g", lineterminator="\n"),
        out,
    )


def _require_seed(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.seed is None:
        parser.error(f"{args.command} needs --seed for Monte Carlo replicates.")


def _run_simulate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    _require_seed(parser, args)
    if args.ngrid is None and args.nmax is None:
        parser.error("simulate needs --ngrid or --nmax.")
    n_grid = args.ngrid if args.ngrid is not None else list(range(1, args.nmax + 1))
    config = SimConfig(
        A=args.A,
        x0_log=args.x0,
        start_log=args.start,
        horizon_cap=max(max(n_grid), 1),
        master_seed=args.seed,
        replicates=args.reps,
    )
    estimates = estimate_tail(
        ChainKind(args.kind), parse_model(args.model), config, n_grid, args.threads
    )
    frame = pd.DataFrame(
        {
            "n": [e.n for e in estimates],
            "p_hat": [e.p_hat for e in estimates],
            "std_err": [e.std_err for e in estimates],
            "replicates": [e.replicates for e in estimates],
        }
    )
    _write_frame(frame, args.out)
    return EXIT_OK


def _run_exact_tail(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    grid = cdf_grid(parse_model(args.model), args.x0, args.nmax)
    _emit(tail_table(grid, args.nmax).write_csv, args.out)
    return EXIT_OK


def _run_harmonic(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    grid = cdf_grid(parse_model(args.model), args.x0, args.nmax)
    _emit(harmonic_table(grid, args.nmax).write_csv, args.out)
    return EXIT_OK


def _run_expected_t(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    model = parse_model(args.model)
    if args.reps is not None:
        _require_seed(parser, args)
        config = SimConfig(
            A=args.A,
            x0_log=args.x0,
            start_log=args.start,
            horizon_cap=EXPECTED_T_HORIZON,
            master_seed=args.seed,
            replicates=args.reps,
        )
        estimate = estimate_expected_T(ChainKind(args.kind), model, config, args.threads)
        print(f"{estimate.mean!r} {estimate.std_err!r}")
        return EXIT_OK
    grid = cdf_grid(model, args.x0, cell_index(args.x0, args.start) + 1)
    print(repr(expected_T_exact(grid, args.start)))
    return EXIT_OK


def _run_zlaw(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    params = ZParams(args.c)
    times = np.asarray(args.ngrid, dtype=float)
    frame = pd.DataFrame({"t": times, "tail": np.atleast_1d(t0_tail(params, args.start, times))})
    _write_frame(frame, args.out)
    return EXIT_OK


def _run_classify(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    model = parse_model(args.model)
    print(classify(model).value)
    if args.eps is not None:
        if not isinstance(model, LogTail):
            parser.error("--eps needs a log-tail model.")
        levels = [float(z) for z in range(1, args.nmax + 1)]
        threshold = drift_threshold(model, args.A, args.eps, levels)
        print("none" if threshold is None else repr(threshold))
    return EXIT_OK


def _run_verify(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    name = ExperimentName(args.experiment)
    if name in MONTE_CARLO_EXPERIMENTS:
        _require_seed(parser, args)
    experiment = Experiment(name).set_threads(args.threads)
    if args.model is not None:
        experiment.set_model(parse_model(args.model))
    setters = (
        (args.x0, experiment.set_x0),
        (args.A, experiment.set_A),
        (args.start, experiment.set_start),
        (args.ngrid, experiment.set_n_grid),
        (args.reps, experiment.set_replicates),
        (args.seed, experiment.set_seed),
        (args.tol, experiment.set_tol),
    )
    for value, setter in setters:
        if value is not None:
            setter(value)
    record = experiment.run()
    _emit(lambda target: write_csv(record, target), args.out)
    if args.json is not None:
        write_json(record, args.json)
    for row in record.rows:
        if row.cause:
            logger.error(f"{row.criterion}: {row.cause}")
    if record.rows and all(row.cause for row in record.rows):
        return EXIT_NUMERICAL
    return EXIT_OK if record.passed else EXIT_VERIFICATION


COMMANDS: dict[str, Callable[[argparse.ArgumentParser, argparse.Namespace], int]] = {
    "simulate": _run_simulate,
    "exact-tail": _run_exact_tail,
    "harmonic": _run_harmonic,
    "expected-t": _run_expected_t,
    "zlaw": _run_zlaw,
    "classify": _run_classify,
    "verify": _run_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv`` and dispatch to a subcommand.

    Returns:
        0 on success and after ``--help``, 1 on usage errors, 2 on numerical failures and 3
        when a verification row fails.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _configure_logging(args)
        return COMMANDS[args.command](parser, args)
    except SystemExit as e:
        return EXIT_OK if e.code is None else int(e.code)
    except ArpersistError as e:
        logger.error(str(e))
        return EXIT_NUMERICAL
    except ValueError as e:
        print(f"arpersist: error: {e}", file=sys.stderr)
        return EXIT_USAGE
