"""Exact integer power series: products of ``(1 - t^d)`` over powers of ``(1 - t)``.

All coefficients are Python integers, so nothing wraps around however far a series is expanded.
"""

import itertools
import typing

import attr

from .exceptions import UnboundedSeriesException, ZeroSeriesException


@attr.s(frozen=True, auto_attribs=True, order=True)
class HalfInt:
    """Non-negative half-integer stored as twice its value.

    >>> HalfInt(5)
    HalfInt(doubled=5)
    >>> str(HalfInt.of(3) + HalfInt(1))
    '7/2'
    """

    #: Twice the represented value.
    doubled: int

    @classmethod
    def of(cls, value: int):
        """Return the ``HalfInt`` for the integer ``value``."""
        return cls(2 * value)

    @property
    def is_integer(self):
        return self.doubled % 2 == 0

    def floor(self):
        return self.doubled // 2

    def ceil(self):
        return -(-self.doubled // 2)

    def __add__(self, other):
        if isinstance(other, int):
            other = HalfInt.of(other)
        return HalfInt(self.doubled + other.doubled)

    def __str__(self):
        if self.is_integer:
            return str(self.doubled // 2)
        else:
            return "%d/2" % self.doubled


@attr.s(frozen=True, auto_attribs=True)
class IntSeq:
    """Integer sequence starting at index ``offset``, zero everywhere else."""

    values: typing.Tuple[int, ...] = attr.ib(converter=tuple)
    offset: int = 0

    def __getitem__(self, index):
        pos = index - self.offset
        if 0 <= pos < len(self.values):
            return self.values[pos]
        return 0

    def __len__(self):
        return len(self.values)

    @property
    def last(self):
        """Index of the last stored entry."""
        return self.offset + len(self.values) - 1


@attr.s(frozen=True, auto_attribs=True)
class TruncatedSeries:
    """Coefficients ``coeffs[0..D]`` of a Hilbert series, possibly cut by the bracket."""

    coeffs: typing.Tuple[int, ...] = attr.ib(converter=tuple)
    #: Whether the series was cut in front of its first non-positive coefficient.
    truncated: bool = False

    def coefficient(self, index):
        if 0 <= index < len(self.coeffs):
            return self.coeffs[index]
        return 0

    def __len__(self):
        return len(self.coeffs)


def raw_product(n: int, degrees: typing.Sequence[int], cap: int) -> IntSeq:
    """Return coefficients of ``prod(1 - t^d_i) / (1 - t)^n`` up to degree ``cap``.

    >>> raw_product(3, [2, 2, 2, 2], 4).values
    (1, 3, 2, -2, -3)
    """
    coeffs = [1] + [0] * cap
    for d in degrees:
        for i in range(cap, d - 1, -1):
            coeffs[i] -= coeffs[i - d]
    for _ in range(n):
        coeffs = list(itertools.accumulate(coeffs))
    return IntSeq(coeffs)


def _cut(values: typing.Sequence[int]) -> typing.Tuple[typing.List[int], bool]:
    """Return ``values`` up to the first non-positive entry and whether one was found."""
    for i, value in enumerate(values):
        if value <= 0:
            return list(values[:i]), True
    return list(values), False


def froberg_bracket(n: int, degrees: typing.Sequence[int], cap: typing.Optional[int] = None):
    """Return ``[prod(1 - t^d_i) / (1 - t)^n]``, cut before the first non-positive coefficient.

    Without ``cap`` the expansion runs until that coefficient shows up, which requires more forms
    than variables.
    """
    if cap is None:
        if len(degrees) <= n:
            raise UnboundedSeriesException(
                "Series for %d forms in %d variables has no non-positive coefficient"
                % (len(degrees), n)
            )
        # numerator / (1 - t)^n is a polynomial of degree sum(degrees) - n
        cap = sum(degrees) - n + 1
    coeffs, truncated = _cut(raw_product(n, degrees, cap).values)
    return TruncatedSeries(coeffs, truncated)


def series_quotient_by_form(series: TruncatedSeries, d: int) -> TruncatedSeries:
    """Return ``[(1 - t^d) * S]`` for a finite series ``S``."""
    values = list(series.coeffs) + [0] * (d + 1)
    for i in range(len(values) - 1, d - 1, -1):
        values[i] -= values[i - d]
    coeffs, truncated = _cut(values)
    return TruncatedSeries(coeffs, truncated)


def s_formula(n: int, d: int) -> int:
    """Return the socle degree ``s(n, d)`` of ``n`` variables modulo ``n + 2`` general powers.

    >>> s_formula(6, 5), s_formula(12, 3), s_formula(5, 2)
    (13, 12, 3)
    """
    if n % 2 == 1:
        return (n + 1) * (d - 1) // 2
    else:
        return n * (n + 2) * (d - 1) // (2 * (n + 1))


def delta_seq(seq: IntSeq) -> IntSeq:
    """Return the difference sequence ``a_0, a_1 - a_0, ..., a_n - a_{n-1}, -a_n``.

    >>> delta_seq(IntSeq([1, 2, 1])).values
    (1, 1, -1, -1)
    """
    values = seq.values
    result = [values[0] if values else 0]
    result += [values[i] - values[i - 1] for i in range(1, len(values))]
    result.append(-values[-1] if values else 0)
    return IntSeq(result, seq.offset)


def series_degree(series: TruncatedSeries) -> int:
    """Return the index of the last stored coefficient."""
    if not series.coeffs:
        raise ZeroSeriesException("The zero series has no degree")
    return len(series.coeffs) - 1


def lex_at_least(actual: typing.Sequence[int], expected: typing.Sequence[int]) -> bool:
    """Return whether ``actual`` is lexicographically at least ``expected``.

    Missing trailing coefficients count as zero.
    """
    length = max(len(actual), len(expected))
    for i in range(length):
        lhs = actual[i] if i < len(actual) else 0
        rhs = expected[i] if i < len(expected) else 0
        if lhs != rhs:
            return lhs > rhs
    return True
