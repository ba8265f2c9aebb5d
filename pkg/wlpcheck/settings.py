"""
Settings for the wlpcheck command line tool.

Values are taken from the environment (optionally pre-loaded from a ``.env`` file) and every
variable carries the ``WLPCHECK_`` prefix.  Command line flags override what is configured here.
"""

import typing

import attr
import environ
from dotenv import load_dotenv

#: Prefix of all environment variables read by wlpcheck.
ENV_PREFIX = "WLPCHECK_"

#: The two largest primes below 2^30, used when no ``--prime`` is given.
DEFAULT_PRIMES = (1073741789, 1073741783)
#: Default seed for random specializations and random linear forms.
DEFAULT_SEED = 20201020
#: Default number of specializations per prime for generic estimates.
DEFAULT_TRIALS = 2
#: Matrices with fewer columns than this are eliminated densely right away.
DEFAULT_DENSE_THRESHOLD = 4000

#: Specialization kind: points on the moment curve.
SPEC_MOMENT = "moment"
#: Specialization kind: seeded random coefficients.
SPEC_RANDOM = "random"
#: Allowed specialization kinds.
SPEC_CHOICES = (SPEC_MOMENT, SPEC_RANDOM)

#: Output format: newline-delimited JSON.
FORMAT_JSON = "json"
#: Output format: Markdown table.
FORMAT_MARKDOWN = "markdown"
#: Allowed output formats.
FORMAT_CHOICES = (FORMAT_JSON, FORMAT_MARKDOWN)


@attr.s(frozen=True, auto_attribs=True)
class Settings:
    """Configuration defaults of wlpcheck, as read from the environment."""

    #: Primes to compute modulo.
    primes: typing.Tuple[int, ...] = DEFAULT_PRIMES
    #: Seed for all random streams.
    seed: int = DEFAULT_SEED
    #: Specialization kind for ``hilbert`` and ``wlp``.
    spec: str = attr.ib(default=SPEC_MOMENT, validator=attr.validators.in_(SPEC_CHOICES))
    #: Report format.
    format: str = attr.ib(default=FORMAT_MARKDOWN, validator=attr.validators.in_(FORMAT_CHOICES))
    #: Path to the NDJSON dimension cache, empty for none.
    cache: str = ""
    #: Number of worker processes.
    jobs: int = 1
    #: Number of specializations per prime.
    trials: int = DEFAULT_TRIALS
    #: Column count below which elimination is dense without a sparse pre-pass.
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD
    #: Whether or not to report errors to Sentry.
    enable_sentry: bool = False
    #: The Sentry DSN to report to.
    sentry_dsn: str = attr.ib(default="", repr=lambda value: repr("%s%s" % (value[:8], "***")))

    @classmethod
    def from_env(cls, read_dot_env=True):
        """Return ``Settings`` from the ``WLPCHECK_*`` environment variables."""
        if read_dot_env:
            load_dotenv()
        env = environ.Env()
        return cls(
            primes=tuple(env.list(ENV_PREFIX + "PRIMES", cast=int, default=list(DEFAULT_PRIMES))),
            seed=env.int(ENV_PREFIX + "SEED", default=DEFAULT_SEED),
            spec=env.str(ENV_PREFIX + "SPEC", default=SPEC_MOMENT),
            format=env.str(ENV_PREFIX + "FORMAT", default=FORMAT_MARKDOWN),
            cache=env.str(ENV_PREFIX + "CACHE", default=""),
            jobs=env.int(ENV_PREFIX + "JOBS", default=1),
            trials=env.int(ENV_PREFIX + "TRIALS", default=DEFAULT_TRIALS),
            dense_threshold=env.int(
                ENV_PREFIX + "DENSE_THRESHOLD", default=DEFAULT_DENSE_THRESHOLD
            ),
            enable_sentry=env.bool(ENV_PREFIX + "ENABLE_SENTRY", default=False),
            sentry_dsn=env.str(ENV_PREFIX + "SENTRY_DSN", default=""),
        )


def setup_sentry(settings: Settings):
    """Initialize the Sentry client if enabled in ``settings``."""
    if settings.enable_sentry:
        import sentry_sdk

        sentry_sdk.init(settings.sentry_dsn)
        return True
    return False
