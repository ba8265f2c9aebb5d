"""Decide the WLP for ``R_{n,n+1,d}`` by an ordered chain of evidence.

The chain is tried in this order:

1. the classical cases ``n <= 3`` and ``d = 1``, backed by a rank profile,
2. a failing family from the difference sequence bound,
3. a sporadic certificate one variable down, sandwiched between certificate span and quotient,
4. a direct rank profile of multiplication by a random linear form.

A maximal rank profile proves the WLP.  A deficient one is kept as evidence but proves nothing
for general forms, so a cell that none of the failure proofs decides is ``undetermined``.
"""

import concurrent.futures
import time
import typing

import attr
from logzero import logger

from .cache import CacheEntry, DimensionCache
from .certificates import HEAVY_CASES, SPORADIC_CASES, sporadic_certificate
from .delta_analysis import (
    EVIDENCE_KNOWN_RESULT,
    EVIDENCE_RANK_WITNESS,
    EVIDENCE_SPORADIC,
    FailureEvidence,
    fails_by_lemma3,
)
from .exact_linalg import PrimeField
from .hilbert_engine import (
    PROFILE_ALL_MAXIMAL,
    IdealSpec,
    moment_spec,
    random_moment_spec,
    random_spec,
    wlp_rank_profile,
)
from .settings import (
    DEFAULT_DENSE_THRESHOLD,
    DEFAULT_PRIMES,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    SPEC_CHOICES,
    SPEC_MOMENT,
)

#: Verdict: the WLP holds.
VERDICT_HOLDS = "holds"
#: Verdict: the WLP fails.
VERDICT_FAILS = "fails"
#: Verdict: no evidence decided the cell.
VERDICT_UNDETERMINED = "undetermined"
#: Allowed verdicts.
VERDICT_CHOICES = (VERDICT_HOLDS, VERDICT_FAILS, VERDICT_UNDETERMINED)

#: Pairs with ``n >= 4`` and ``d >= 2`` where the WLP holds.
HOLDS_EXCEPTIONS = ((4, 2), (5, 2), (5, 3), (7, 2))

#: Caveat attached to results computed modulo primes without full confirmation.
CAVEAT_MOD_P = "computed modulo p; valid in characteristic zero up to prime/specialization luck"


@attr.s(frozen=True, auto_attribs=True)
class ClassifyOptions:
    """Options of ``classify()`` and ``classify_grid()``."""

    primes: typing.Tuple[int, ...] = attr.ib(default=DEFAULT_PRIMES, converter=tuple)
    seed: int = DEFAULT_SEED
    #: Number of specializations per prime.
    trials: int = DEFAULT_TRIALS
    spec_kind: str = attr.ib(default=SPEC_MOMENT, validator=attr.validators.in_(SPEC_CHOICES))
    cache_path: str = ""
    jobs: int = 1
    #: Enumerate all cover families instead of stopping at the target dimension.
    exhaustive: bool = False
    #: Leave cells needing a heavy certificate undetermined.
    skip_heavy: bool = False
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD


@attr.s(frozen=True, auto_attribs=True)
class ClassificationRecord:
    """Verdict for one ``(n, d)`` with the evidence that decided it."""

    n: int
    d: int
    verdict: str = attr.ib(validator=attr.validators.in_(VERDICT_CHOICES))
    evidence: typing.List[FailureEvidence] = attr.Factory(list)
    #: Whether the deciding computation agreed at >= 2 primes and >= 2 specializations.
    confirmed: bool = False
    caveat: str = ""
    #: Wall-clock seconds per evidence step.
    timings: typing.Dict[str, float] = attr.Factory(dict)


def expected_verdict(n: int, d: int) -> str:
    """Return the verdict of the closed-form classification."""
    if n <= 3 or d == 1 or (n, d) in HOLDS_EXCEPTIONS:
        return VERDICT_HOLDS
    else:
        return VERDICT_FAILS


def _specializations(
    n: int, m: int, d: int, field: PrimeField, options: ClassifyOptions, moment_only: bool = False
) -> typing.Iterator[IdealSpec]:
    """Yield ``options.trials`` specializations, the first on the fixed moment curve if moment."""
    for trial in range(max(options.trials, 1)):
        if options.spec_kind == SPEC_MOMENT or moment_only:
            if trial == 0:
                yield moment_spec(n, m, d)
            else:
                yield random_moment_spec(n, m, d, options.seed + trial, field)
        else:
            yield random_spec(n, m, d, options.seed + trial, field)


def _is_confirmed(options: ClassifyOptions) -> bool:
    return len(set(options.primes)) >= 2 and options.trials >= 2


def _rank_evidence(n: int, d: int, options: ClassifyOptions):
    """Return ``(all_maximal, evidence, consistent)`` from rank profiles at all primes and specs."""
    verdicts = []
    deficient: typing.List[int] = []
    for prime in options.primes:
        field = PrimeField(prime)
        for spec in _specializations(n, n + 1, d, field, options):
            profile = wlp_rank_profile(
                n, d, spec, field, options.seed, dense_threshold=options.dense_threshold
            )
            verdicts.append(profile.verdict)
            deficient = deficient or profile.deficient
    all_maximal = all(v == PROFILE_ALL_MAXIMAL for v in verdicts)
    if all_maximal:
        detail = "multiplication has maximal rank in every degree (%d runs)" % len(verdicts)
    else:
        detail = "multiplication deficient in degrees %s" % deficient
    evidence = FailureEvidence(
        kind=EVIDENCE_RANK_WITNESS,
        base_pair=(n, d),
        detail=detail,
        values={"runs": len(verdicts), "maximal_runs": verdicts.count(PROFILE_ALL_MAXIMAL)},
    )
    return all_maximal, evidence, len(set(verdicts)) == 1


def _sporadic_evidence(case, options: ClassifyOptions, cache):
    """Return ``(sandwich_holds, evidence, consistent)`` for one sporadic case."""
    n, m, d = case
    results = []
    for prime in options.primes:
        field = PrimeField(prime)
        for spec in _specializations(n, m, d, field, options, moment_only=True):
            results.append(
                sporadic_certificate(
                    case,
                    field,
                    spec=spec,
                    exhaustive=options.exhaustive,
                    seed=options.seed,
                    cache=cache,
                )
            )
    first = results[0]
    sandwich = all(r.sandwich for r in results)
    evidence = FailureEvidence(
        kind=EVIDENCE_SPORADIC,
        base_pair=(n, d),
        detail="socle %d in degree %d, expected %d"
        % (first.quotient_dim, first.degree, first.expected),
        values={
            "degree": first.degree,
            "span_dim": first.span_dim,
            "quotient_dim": first.quotient_dim,
            "expected": first.expected,
        },
    )
    consistent = len({(r.span_dim, r.quotient_dim) for r in results}) == 1
    return sandwich, evidence, consistent


def _open_cache(options: ClassifyOptions, buffered: bool = False):
    if not options.cache_path:
        return None
    return DimensionCache(options.cache_path, buffered=buffered)


def classify(
    n: int, d: int, options: ClassifyOptions = ClassifyOptions(), cache=None
) -> ClassificationRecord:
    """Return the classification record for ``R_{n,n+1,d}``."""
    cache = cache if cache is not None else _open_cache(options)
    timings: typing.Dict[str, float] = {}
    evidence: typing.List[FailureEvidence] = []
    confirmed = _is_confirmed(options)

    def done(verdict, confirmed):
        caveat = "" if confirmed or verdict == VERDICT_UNDETERMINED else CAVEAT_MOD_P
        record = ClassificationRecord(n, d, verdict, evidence, confirmed, caveat, timings)
        logger.info("Cell n=%d, d=%d: %s (confirmed=%s)", n, d, verdict, confirmed)
        return record

    if n <= 3 or d == 1:
        evidence.append(
            FailureEvidence(
                kind=EVIDENCE_KNOWN_RESULT,
                base_pair=(n, d),
                detail="linear generators" if d == 1 else "at most three variables",
            )
        )
        start = time.perf_counter()
        all_maximal, rank_evidence, consistent = _rank_evidence(n, d, options)
        timings["rank_profile"] = time.perf_counter() - start
        evidence.append(rank_evidence)
        if not all_maximal:
            logger.warning("Rank profile contradicts the known result for n=%d, d=%d", n, d)
            return done(VERDICT_UNDETERMINED, False)
        return done(VERDICT_HOLDS, confirmed and consistent)

    start = time.perf_counter()
    lemma = fails_by_lemma3(n, d)
    timings["lemma_family"] = time.perf_counter() - start
    if lemma is not None:
        evidence.append(lemma)
        return done(VERDICT_FAILS, True)

    case = (n - 1, n + 1, d)
    if case in SPORADIC_CASES:
        if options.skip_heavy and case in HEAVY_CASES:
            logger.info("Skipping heavy certificate %s", case)
            return done(VERDICT_UNDETERMINED, False)
        start = time.perf_counter()
        sandwich, sporadic_evidence, consistent = _sporadic_evidence(case, options, cache)
        timings["sporadic_certificate"] = time.perf_counter() - start
        evidence.append(sporadic_evidence)
        if sandwich:
            return done(VERDICT_FAILS, confirmed and consistent)
        logger.warning("Certificate sandwich not closed for %s", case)

    start = time.perf_counter()
    all_maximal, rank_evidence, consistent = _rank_evidence(n, d, options)
    timings["rank_profile"] = time.perf_counter() - start
    evidence.append(rank_evidence)
    if all_maximal:
        return done(VERDICT_HOLDS, confirmed and consistent)
    logger.warning("No failure proof for n=%d, d=%d; rank deficiency alone is not one", n, d)
    return done(VERDICT_UNDETERMINED, False)


def _classify_cell(
    args: typing.Tuple[int, int, ClassifyOptions]
) -> typing.Tuple[ClassificationRecord, typing.List[CacheEntry]]:
    """Worker entry point: classify with a buffered cache and return the new cache entries."""
    n, d, options = args
    cache = _open_cache(options, buffered=True)
    record = classify(n, d, options, cache=cache)
    return record, (cache.pending if cache is not None else [])


def classify_grid(
    n_max: int, d_max: int, options: ClassifyOptions = ClassifyOptions()
) -> typing.List[ClassificationRecord]:
    """Classify all cells ``1 <= n <= n_max``, ``1 <= d <= d_max``, ordered by ``(n, d)``."""
    cells = [(n, d) for n in range(1, n_max + 1) for d in range(1, d_max + 1)]
    logger.info("Classifying %d cells with %d job(s)", len(cells), options.jobs)
    if options.jobs <= 1:
        cache = _open_cache(options)
        return [classify(n, d, options, cache=cache) for n, d in cells]

    cache = _open_cache(options)
    results = {}
    with concurrent.futures.ProcessPoolExecutor(max_workers=options.jobs) as executor:
        futures = {executor.submit(_classify_cell, (n, d, options)): (n, d) for n, d in cells}
        for future in concurrent.futures.as_completed(futures):
            results[futures[future]] = future.result()
    records = []
    for cell in cells:
        record, entries = results[cell]
        if cache is not None:
            cache.extend(entries)
        records.append(record)
    return records
