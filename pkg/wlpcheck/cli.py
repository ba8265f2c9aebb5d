#!/usr/bin/env python
"""wlpcheck command line interface.

Every subcommand accepts the global flags; values not given on the command line are taken from the
``WLPCHECK_*`` environment variables (see ``wlpcheck.settings``).

Exit codes: 0 when everything was determined, 1 when something stayed undetermined, 2 on a failed
verification or a mismatch against the expectations.
"""

import argparse
import json
import logging
import sys
import typing

import attr
import cattr
import logzero
from logzero import logger

from . import __version__
from .cache import DimensionCache
from .certificates import SPORADIC_CASES, degree_witness, parse_case, sporadic_certificate
from .classify import VERDICT_UNDETERMINED, ClassifyOptions, classify_grid
from .delta_analysis import stilde, stilde_integer
from .exact_linalg import PrimeField
from .exceptions import NoValidSException, VerificationException
from .hilbert_engine import (
    moment_spec,
    random_spec,
    series_agreement,
    socle_degree,
    wlp_rank_profile,
)
from .report import find_mismatches, load_expectations, render
from .series_core import froberg_bracket, s_formula
from .settings import (
    FORMAT_CHOICES,
    FORMAT_JSON,
    SPEC_CHOICES,
    SPEC_MOMENT,
    Settings,
    setup_sentry,
)

#: Exit code: all results determined.
EXIT_OK = 0
#: Exit code: some result undetermined or a target not reached.
EXIT_UNDETERMINED = 1
#: Exit code: verification failed or results contradict the expectations.
EXIT_VERIFICATION = 2

#: Global flags mapped onto ``Settings`` fields.
SETTINGS_FLAGS = (
    "primes",
    "seed",
    "spec",
    "format",
    "cache",
    "jobs",
    "trials",
    "dense_threshold",
)


@attr.s(frozen=True, auto_attribs=True)
class Config:
    """Configuration of one wlpcheck invocation."""

    #: The subcommand to run.
    command: str
    #: Effective settings after applying the command line flags.
    settings: Settings
    #: Subcommand arguments.
    args: typing.Dict[str, typing.Any] = attr.Factory(dict)


#: Converter for printing results as JSON.
converter = cattr.Converter()


def merge_settings(settings: Settings, args: typing.Dict[str, typing.Any]) -> Settings:
    """Return ``settings`` overridden by the flags that were given."""
    overrides = {key: args[key] for key in SETTINGS_FLAGS if args.get(key) is not None}
    if "primes" in overrides:
        overrides["primes"] = tuple(overrides["primes"])
    return attr.evolve(settings, **overrides)


def _emit(config: Config, payload: typing.Dict[str, typing.Any], markdown: typing.List[str]):
    if config.settings.format == FORMAT_JSON:
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(markdown))


def _fields(config: Config) -> typing.List[PrimeField]:
    return [PrimeField(p) for p in config.settings.primes]


def _spec(config: Config, n: int, m: int, d: int, field: PrimeField):
    if config.settings.spec == SPEC_MOMENT:
        return moment_spec(n, m, d)
    else:
        return random_spec(n, m, d, config.settings.seed, field)


def _cache(config: Config):
    return DimensionCache(config.settings.cache) if config.settings.cache else None


def run_series(config: Config) -> int:
    n, m, d = config.args["n"], config.args["m"], config.args["d"]
    series = froberg_bracket(n, [d] * m, config.args.get("cap"))
    payload = {"n": n, "m": m, "d": d, "coeffs": list(series.coeffs), "truncated": series.truncated}
    _emit(config, payload, [" ".join(str(c) for c in series.coeffs)])
    return EXIT_OK


def run_sdeg(config: Config) -> int:
    rows = []
    for n in range(1, config.args["n_max"] + 1):
        for d in range(2, config.args["d_max"] + 1):
            try:
                raw, integer = str(stilde(n, d)), stilde_integer(n, d)
            except NoValidSException:
                raw, integer = None, None
            rows.append(
                {"n": n, "d": d, "s": s_formula(n, d), "stilde": raw, "stilde_integer": integer}
            )
    markdown = ["| n | d | s | stilde | stilde (integer) |", "|---|---|---|---|---|"]
    template = "| %(n)d | %(d)d | %(s)d | %(stilde)s | %(stilde_integer)s |"
    markdown += [template % row for row in rows]
    _emit(config, {"rows": rows}, markdown)
    return EXIT_OK


def run_hilbert(config: Config) -> int:
    n, m, d = config.args["n"], config.args["m"], config.args["d"]
    fields = _fields(config)
    spec = _spec(config, n, m, d, fields[0])
    series = series_agreement(
        spec, fields, cache=_cache(config), dense_threshold=config.settings.dense_threshold
    )
    payload = {
        "n": n,
        "m": m,
        "d": d,
        "series": series,
        "socle_degree": socle_degree(series),
        "primes": list(config.settings.primes),
    }
    _emit(config, payload, [" ".join(str(c) for c in series)])
    return EXIT_OK


def run_wlp(config: Config) -> int:
    n, d = config.args["n"], config.args["d"]
    field = _fields(config)[0]
    spec = _spec(config, n, n + 1, d, field)
    profile = wlp_rank_profile(
        n, d, spec, field, config.settings.seed, dense_threshold=config.settings.dense_threshold
    )
    markdown = ["| degree | dim A_i | dim A_i+1 | rank | maximal |", "|---|---|---|---|---|"]
    markdown += [
        "| %d | %d | %d | %d | %s |"
        % (row.degree, row.dim_source, row.dim_target, row.rank, "yes" if row.maximal else "no")
        for row in profile.rows
    ]
    markdown.append("")
    markdown.append("verdict: %s %s" % (profile.verdict, profile.deficient or ""))
    _emit(config, converter.unstructure(profile), markdown)
    return EXIT_OK


def run_witness(config: Config) -> int:
    n, d = config.args["n"], config.args["d"]
    results = [degree_witness(n, d, field) for field in _fields(config)]
    payload = {
        "n": n,
        "d": d,
        "degree": results[0].degree,
        "methods": [r.method for r in results],
        "terms": [len(r.form.values) for r in results],
        "socle_value": results[0].socle_value,
    }
    markdown = [
        "witness for n=%d, d=%d: degree %d, %s, %d terms, socle value %s"
        % (n, d, r.degree, r.method, len(r.form.values), r.socle_value)
        for r in results
    ]
    _emit(config, payload, markdown)
    return EXIT_OK


def run_sporadic(config: Config) -> int:
    case = parse_case(config.args["case"])
    cache = _cache(config)
    results = [
        sporadic_certificate(
            case,
            field,
            exhaustive=config.args.get("exhaustive", False),
            full_series=config.args.get("full_series", False),
            seed=config.settings.seed,
            cache=cache,
        )
        for field in _fields(config)
    ]
    markdown = ["| prime | degree | span | quotient | target | expected | families |"]
    markdown.append("|---|---|---|---|---|---|---|")
    for field, r in zip(_fields(config), results):
        markdown.append(
            "| %d | %d | %d | %d | %d | %d | %d |"
            % (
                field.p,
                r.degree,
                r.span_dim,
                r.quotient_dim,
                r.target,
                r.expected,
                r.families_tried,
            )
        )
    _emit(config, {"results": [converter.unstructure(r) for r in results]}, markdown)
    if any(r.series_matches is False for r in results):
        raise VerificationException("Hilbert series of %s differs from the tabulated one" % (case,))
    if not all(r.matched for r in results):
        logger.warning("Target %d not reached for %s", SPORADIC_CASES[case].target, case)
        return EXIT_UNDETERMINED
    return EXIT_OK


def run_classify(config: Config) -> int:
    settings = config.settings
    options = ClassifyOptions(
        primes=settings.primes,
        seed=settings.seed,
        trials=settings.trials,
        spec_kind=settings.spec,
        cache_path=settings.cache,
        jobs=settings.jobs,
        exhaustive=config.args.get("exhaustive", False),
        skip_heavy=config.args.get("skip_heavy", False),
        dense_threshold=settings.dense_threshold,
    )
    records = classify_grid(config.args["n_max"], config.args["d_max"], options)
    sys.stdout.write(render(records, settings.format))
    if config.args.get("expect"):
        mismatches = find_mismatches(records, load_expectations(config.args["expect"]))
        for n, d, expected, actual in mismatches:
            logger.error("Cell n=%d, d=%d: expected %s but got %s", n, d, expected, actual)
        if mismatches:
            return EXIT_VERIFICATION
    if any(record.verdict == VERDICT_UNDETERMINED for record in records):
        return EXIT_UNDETERMINED
    return EXIT_OK


#: Subcommand implementations.
COMMANDS = {
    "series": run_series,
    "sdeg": run_sdeg,
    "hilbert": run_hilbert,
    "wlp": run_wlp,
    "witness": run_witness,
    "sporadic": run_sporadic,
    "classify": run_classify,
}


def run(config: Config) -> int:
    logger.info("Starting wlpcheck %s...", config.command)
    logger.info("config = %s", config)
    try:
        result = COMMANDS[config.command](config)
    except VerificationException as e:
        logger.error("Verification failed: %s", e)
        return EXIT_VERIFICATION
    logger.info("All done. Have a nice day!")
    return result


def _global_parser() -> argparse.ArgumentParser:
    # suppressed defaults keep subcommand parsers from overwriting flags given before them
    parser = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    group = parser.add_argument_group("global arguments")
    group.add_argument(
        "--prime",
        dest="primes",
        type=int,
        action="append",
        help="Prime to compute modulo; repeat for several.",
    )
    group.add_argument("--seed", type=int, help="Seed of all random streams.")
    group.add_argument("--spec", choices=SPEC_CHOICES, help="Specialization kind.")
    group.add_argument("--format", choices=FORMAT_CHOICES, help="Output format.")
    group.add_argument("--cache", help="Path to the dimension cache file.")
    group.add_argument("--jobs", type=int, help="Number of worker processes.")
    group.add_argument("--trials", type=int, help="Number of specializations per prime.")
    group.add_argument(
        "--dense-threshold",
        type=int,
        help="Column count below which elimination is dense right away.",
    )
    group.add_argument("--verbose", action="store_true", help="Enable debug output.")
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _global_parser()
    parser = argparse.ArgumentParser(prog="wlpcheck", parents=[common])
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    def add(name, help):
        return subparsers.add_parser(name, help=help, parents=[common])

    series = add("series", help="Print the expected (bracket) series.")
    series.add_argument("n", type=int, help="Number of variables.")
    series.add_argument("m", type=int, help="Number of forms.")
    series.add_argument("d", type=int, help="Degree of the powers.")
    series.add_argument("--cap", type=int, help="Truncate after this degree.")

    sdeg = add("sdeg", help="Tabulate the socle degree and its difference sequence bound.")
    sdeg.add_argument("--n-max", type=int, required=True)
    sdeg.add_argument("--d-max", type=int, required=True)

    hilbert = add("hilbert", help="Compute the Hilbert series of one quotient.")
    hilbert.add_argument("n", type=int)
    hilbert.add_argument("m", type=int)
    hilbert.add_argument("d", type=int)

    wlp = add("wlp", help="Rank profile of a random linear form on R_{n,n+1,d}.")
    wlp.add_argument("n", type=int)
    wlp.add_argument("d", type=int)

    witness = add("witness", help="Build and verify a socle degree witness of R_{n,n+2,d}.")
    witness.add_argument("n", type=int)
    witness.add_argument("d", type=int)

    sporadic = add("sporadic", help="Certificate for one of the sporadic cases.")
    sporadic.add_argument(
        "case", help="One of %s." % ", ".join("%d,%d,%d" % case for case in SPORADIC_CASES)
    )
    sporadic.add_argument("--exhaustive", default=False, action="store_true")
    sporadic.add_argument(
        "--full-series",
        default=False,
        action="store_true",
        help="Also compare the full Hilbert series.",
    )

    classify = add("classify", help="Classify all cells of a grid.")
    classify.add_argument("--n-max", type=int, required=True)
    classify.add_argument("--d-max", type=int, required=True)
    classify.add_argument("--expect", help="'builtin' or path of an NDJSON expectations file.")
    classify.add_argument("--exhaustive", default=False, action="store_true")
    classify.add_argument(
        "--skip-heavy",
        default=False,
        action="store_true",
        help="Leave cells needing the largest certificate undetermined.",
    )
    return parser


def main(argv=None):
    parser = build_parser()

    logzero.formatter(
        logzero.LogFormatter(fmt="%(color)s[%(levelname)1.1s %(asctime)s]%(end_color)s %(message)s")
    )

    args = vars(parser.parse_args(argv))
    logzero.loglevel(logging.DEBUG if args.pop("verbose", False) else logging.INFO)
    settings = merge_settings(Settings.from_env(), args)
    setup_sentry(settings)
    command = args.pop("command")
    for key in SETTINGS_FLAGS:
        args.pop(key, None)
    return run(Config(command=command, settings=settings, args=args))


if __name__ == "__main__":
    sys.exit(main())
