"""Difference sequence bounds on the socle degree and the resulting failure families.

The hypotheses are checked on ``Delta`` of the coefficients of ``(1 + t + ... + t^(d-1))^n``.  All
half-integer index arithmetic is done in doubled units.
"""

import functools
import math
import typing

import attr
import numpy as np
from logzero import logger

from .exceptions import NoValidSException
from .series_core import HalfInt, IntSeq, delta_seq, s_formula

#: Violation kind: ``s`` too large for the sequence length.
VIOLATION_RANGE = "range"
#: Violation kind: ``Delta`` not decreasing in the middle range.
VIOLATION_EQ_ONE = "eq_one"
#: Violation kind: mirrored comparison around ``s`` failed.
VIOLATION_EQ_TWO = "eq_two"

#: Evidence kind: the pair lies in a family failing by the difference sequence bound.
EVIDENCE_LEMMA_FAMILY = "lemma_family"
#: Evidence kind: inverse system certificate for one of the sporadic cases.
EVIDENCE_SPORADIC = "sporadic_certificate"
#: Evidence kind: classical result (few variables or linear generators).
EVIDENCE_KNOWN_RESULT = "known_result"
#: Evidence kind: explicit rank computation of the multiplication maps.
EVIDENCE_RANK_WITNESS = "rank_witness"
#: Allowed evidence kinds.
EVIDENCE_CHOICES = (
    EVIDENCE_LEMMA_FAMILY,
    EVIDENCE_SPORADIC,
    EVIDENCE_KNOWN_RESULT,
    EVIDENCE_RANK_WITNESS,
)

#: ``almost_classification`` outcome: a failing family covers the pair.
CLASS_FAILS_BY_BOUND = "fails_by_bound"
#: ``almost_classification`` outcome: no family covers the pair.
CLASS_POSSIBLE_EXCEPTION = "possible_exception"


@attr.s(frozen=True, auto_attribs=True)
class LemmaHypothesisReport:
    """Outcome of ``check_lemma1_hypotheses()``."""

    n: int
    d: int
    s: HalfInt
    range_ok: bool
    eq_one_ok: bool
    eq_two_ok: bool
    #: ``(index, kind)`` of the first violation found, range check first.
    first_violation: typing.Optional[typing.Tuple[int, str]] = None

    @property
    def passed(self):
        return self.range_ok and self.eq_one_ok and self.eq_two_ok


@attr.s(frozen=True, auto_attribs=True)
class FailureEvidence:
    """One entry of an evidence chain."""

    kind: str = attr.ib(validator=attr.validators.in_(EVIDENCE_CHOICES))
    #: ``(n0, d)`` of the base case or certificate the evidence refers to.
    base_pair: typing.Optional[typing.Tuple[int, int]] = None
    detail: str = ""
    #: Numbers backing the evidence, e.g. ``{"stilde_doubled": 4, "s": 3}``.
    values: typing.Dict[str, int] = attr.Factory(dict)


@functools.lru_cache(maxsize=None)
def power_sum_coeffs(n: int, d: int) -> IntSeq:
    """Return the coefficients of ``(1 + t + ... + t^(d-1))^n``.

    >>> power_sum_coeffs(3, 3).values
    (1, 3, 6, 7, 6, 3, 1)
    """
    coeffs = [1]
    for _ in range(n):
        nxt = [0] * (len(coeffs) + d - 1)
        for i, c in enumerate(coeffs):
            for k in range(d):
                nxt[i + k] += c
        coeffs = nxt
    return IntSeq(coeffs)


@functools.lru_cache(maxsize=None)
def _delta_ranks(n: int, d: int) -> typing.Tuple[np.ndarray, int]:
    """Return ``Delta`` replaced by its rank among the distinct values, and the rank of zero.

    Ranks compare like the values and fit into ``int64`` while the values do not.
    """
    values = delta_seq(power_sum_coeffs(n, d)).values
    distinct = sorted(set(values) | {0})
    rank_of = {value: i for i, value in enumerate(distinct)}
    return np.array([rank_of[v] for v in values], dtype=np.int64), rank_of[0]


def _take(ranks: np.ndarray, zero_rank: int, idx: np.ndarray) -> np.ndarray:
    valid = (idx >= 0) & (idx < len(ranks))
    return np.where(valid, ranks[np.clip(idx, 0, len(ranks) - 1)], zero_rank)


def check_lemma1_hypotheses(n: int, d: int, s: HalfInt) -> LemmaHypothesisReport:
    """Check the induction hypotheses for ``s`` on ``Delta`` of ``power_sum_coeffs(n, d)``.

    The range condition is ``n (d - 1) / 2 - s >= (d - 1) / 2``.  The first family requires
    ``Delta_i >= Delta_{i+1}`` for ``s <= i <= (d - 1) n - s``, the second ``Delta_{s-j} >=
    Delta_{s+j+1}`` for ``0 <= j <= s``, both for integer indices only.
    """
    ranks, zero_rank = _delta_ranks(n, d)
    s2 = s.doubled
    first_violation = None

    range_ok = s2 <= (n - 1) * (d - 1)
    if not range_ok:
        first_violation = (s2, VIOLATION_RANGE)

    lo = -(-s2 // 2)
    hi = ((d - 1) * n * 2 - s2) // 2
    idx = np.arange(lo, hi + 1, dtype=np.int64)
    bad = np.flatnonzero(_take(ranks, zero_rank, idx) < _take(ranks, zero_rank, idx + 1))
    eq_one_ok = not len(bad)
    if not eq_one_ok and first_violation is None:
        first_violation = (int(idx[bad[0]]), VIOLATION_EQ_ONE)

    # i = s - j runs over the integers in [0, s]; the partner index is s + j + 1 = 2s + 1 - i
    idx = np.arange(0, s2 // 2 + 1, dtype=np.int64)
    bad = np.flatnonzero(_take(ranks, zero_rank, idx) < _take(ranks, zero_rank, s2 + 1 - idx))
    eq_two_ok = not len(bad)
    if not eq_two_ok and first_violation is None:
        first_violation = (int(idx[bad[0]]), VIOLATION_EQ_TWO)

    return LemmaHypothesisReport(n, d, s, range_ok, eq_one_ok, eq_two_ok, first_violation)


def _stilde_scan(n: int, d: int, step: int) -> HalfInt:
    # stilde(n, d) belongs to R_{n,n+2,d}, hence the hypotheses on the (n + 2)-th power
    for s2 in range(0, (n + 1) * (d - 1) + 1, step):
        if check_lemma1_hypotheses(n + 2, d, HalfInt(s2)).passed:
            return HalfInt(s2)
    raise NoValidSException("No s satisfies the hypotheses for n=%d, d=%d" % (n, d))


@functools.lru_cache(maxsize=None)
def stilde(n: int, d: int) -> HalfInt:
    """Return the least half-integer ``s`` satisfying the hypotheses for ``R_{n,n+2,d}``.

    >>> stilde(6, 5), stilde(12, 2)
    (HalfInt(doubled=24), HalfInt(doubled=10))
    """
    return _stilde_scan(n, d, 1)


@functools.lru_cache(maxsize=None)
def stilde_integer(n: int, d: int) -> int:
    """Return the least integer ``s`` satisfying the hypotheses for ``R_{n,n+2,d}``."""
    return _stilde_scan(n, d, 2).floor()


def lemma2_g(d: int, j: int) -> int:
    """Return ``C(j + 2, 2) - 4 C(j + 2 - d, 2)`` with ``C(x, 2) = 0`` for ``x < 2``."""

    def binom2(x):
        return math.comb(x, 2) if x >= 2 else 0

    return binom2(j + 2) - 4 * binom2(j + 2 - d)


def prop2_bound(n: int, d: int) -> HalfInt:
    """Return ``floor(4 (d - 1) / 3) + (n - 2) (d - 1) / 2``."""
    return HalfInt(2 * (4 * (d - 1) // 3) + (n - 2) * (d - 1))


def fails_by_lemma3(N: int, d: int) -> typing.Optional[FailureEvidence]:
    """Return evidence that ``R_{N,N+1,d}`` fails the WLP by a difference sequence family.

    A base ``b`` with ``stilde_integer(b, d) < s(b, d)`` makes ``R_{b+1+k,b+2+k,d}`` fail for all
    even ``k >= 0``.  Bases are searched upwards among ``2 <= b <= N - 1`` with matching parity.
    """
    for base in range(2 + (N - 1) % 2, N, 2):
        try:
            s_int = stilde_integer(base, d)
        except NoValidSException:
            logger.debug("No integer s for base %d, d=%d", base, d)
            continue
        s_val = s_formula(base, d)
        if s_int < s_val:
            raw = stilde(base, d)
            return FailureEvidence(
                kind=EVIDENCE_LEMMA_FAMILY,
                base_pair=(base, d),
                detail="stilde(%d,%d)=%s < s(%d,%d)=%d" % (base, d, raw, base, d, s_val),
                values={"stilde_doubled": raw.doubled, "stilde_integer": s_int, "s": s_val},
            )
    return None


def family_members(base: int, d: int, n_max: int) -> typing.List[typing.Tuple[int, int]]:
    """Return the ``(N, d)`` pairs with ``N <= n_max`` covered by ``base``."""
    return [(N, d) for N in range(base + 1, n_max + 1, 2)]


def almost_classification(N: int, d: int) -> str:
    """Return ``CLASS_FAILS_BY_BOUND`` or ``CLASS_POSSIBLE_EXCEPTION`` for ``R_{N,N+1,d}``."""
    if fails_by_lemma3(N, d) is not None:
        return CLASS_FAILS_BY_BOUND
    else:
        return CLASS_POSSIBLE_EXCEPTION


def exception_list(
    n_range: typing.Iterable[int], d_range: typing.Iterable[int]
) -> typing.List[typing.Tuple[int, int]]:
    """Return the ``(N, d)`` pairs not covered by any failing family."""
    d_values = list(d_range)
    result = []
    for N in n_range:
        for d in d_values:
            if almost_classification(N, d) == CLASS_POSSIBLE_EXCEPTION:
                result.append((N, d))
    logger.debug("Found %d possible exceptions", len(result))
    return result
