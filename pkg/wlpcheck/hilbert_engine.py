"""Hilbert functions of ``k[x_1..x_n] / (l_1^d, ..., l_m^d)`` at concrete specializations.

Dimensions are computed from Macaulay matrices.  When the first ``n`` forms are independent the
computation moves to the chart where they are the variables, i.e. into ``k[y] / (y_1^d, ...,
y_n^d)``, and only the remaining ``m - n`` powers contribute rows.  The inverse system path builds
the contraction constraints ``l_i^d o F = 0`` instead and serves as an independent check.
"""

import hashlib
import json
import math
import typing

import attr
import numpy as np
from logzero import logger

from .apolar_poly import GradedForm, monomial_basis, moment_form, power
from .cache import CacheEntry, DimensionCache
from .exact_linalg import PrimeField, SparseMatrix, inverse_mod, matmul_mod, rank
from .exceptions import (
    NonArtinianException,
    RepeatedNodesException,
    SizeMismatchException,
    VerificationException,
    ZeroFormException,
)
from .series_core import froberg_bracket, lex_at_least, s_formula
from .settings import DEFAULT_DENSE_THRESHOLD

#: Provenance: forms on the moment curve at given parameters.
PROVENANCE_MOMENT = "moment"
#: Provenance: forms with seeded random coefficients.
PROVENANCE_RANDOM = "random"
#: Provenance: forms restricted to a hyperplane.
PROVENANCE_RESTRICTED = "restricted"
#: Allowed provenances.
PROVENANCE_CHOICES = (PROVENANCE_MOMENT, PROVENANCE_RANDOM, PROVENANCE_RESTRICTED)

#: Chart selection: complete intersection chart if possible, else full.
CHART_AUTO = "auto"
#: Chart: quotient of ``k[y] / (y_1^d, ..., y_n^d)``.
CHART_CI = "ci"
#: Chart: plain Macaulay matrix in ``k[x]``.
CHART_FULL = "full"
#: Allowed chart arguments.
CHART_CHOICES = (CHART_AUTO, CHART_CI, CHART_FULL)

#: Rank profile verdict: every multiplication map has maximal rank.
PROFILE_ALL_MAXIMAL = "all_maximal"
#: Rank profile verdict: some multiplication map is deficient.
PROFILE_DEFICIENT = "deficient"


@attr.s(frozen=True, auto_attribs=True)
class IdealSpec:
    """Specialization of ``m`` linear forms in ``n`` variables raised to the power ``d``."""

    n: int
    d: int
    #: Integer coefficient vectors, reduced modulo the prime at use.
    forms: typing.Tuple[typing.Tuple[int, ...], ...] = attr.ib(
        converter=lambda fs: tuple(tuple(int(c) for c in f) for f in fs)
    )
    provenance: str = attr.ib(validator=attr.validators.in_(PROVENANCE_CHOICES))
    #: Moment parameters or ``(seed,)``.
    params: typing.Tuple[int, ...] = attr.ib(default=(), converter=tuple)

    @forms.validator
    def _check_forms(self, _attribute, value):
        if not value:
            raise SizeMismatchException("Need at least one form")
        if any(len(f) != self.n for f in value):
            raise SizeMismatchException("All forms need %d coefficients" % self.n)

    @property
    def m(self):
        return len(self.forms)

    def reduced_forms(self, field: PrimeField) -> np.ndarray:
        return field.reduce(np.asarray(self.forms, dtype=object))


def moment_spec(n: int, m: int, d: int, alphas: typing.Optional[typing.Sequence[int]] = None):
    """Return forms ``(1, a, ..., a^(n-1))`` for ``a`` in ``alphas`` (default ``0..m-1``)."""
    alphas = list(range(m)) if alphas is None else list(alphas)
    if len(alphas) != m:
        raise SizeMismatchException("Need %d parameters, got %d" % (m, len(alphas)))
    if len(set(alphas)) != m:
        raise RepeatedNodesException("Moment parameters must be distinct: %s" % alphas)
    forms = [moment_form(n, a).coeffs for a in alphas]
    return IdealSpec(n, d, forms, PROVENANCE_MOMENT, alphas)


def random_moment_spec(n: int, m: int, d: int, seed: int, field: PrimeField):
    """Return a moment curve specialization at distinct seeded random parameters."""
    rng = field.rng(seed)
    alphas: typing.List[int] = []
    while len(alphas) < m:
        value = int(rng.integers(0, field.p))
        if value not in alphas:
            alphas.append(value)
    forms = [moment_form(n, a, field).coeffs for a in alphas]
    return IdealSpec(n, d, forms, PROVENANCE_MOMENT, alphas)


def random_spec(n: int, m: int, d: int, seed: int, field: PrimeField):
    """Return ``m`` forms with seeded random coefficients."""
    coeffs = field.random_elements(seed, m * n).reshape(m, n)
    return IdealSpec(n, d, coeffs.tolist(), PROVENANCE_RANDOM, (seed,))


def restrict_spec(spec: IdealSpec, l: typing.Sequence[int], field: PrimeField) -> IdealSpec:
    """Return the forms on the hyperplane ``l = 0``, in ``n - 1`` variables.

    The last variable with nonzero coefficient in ``l`` is eliminated.
    """
    p = field.p
    l = [int(c) % p for c in l]
    if not any(l):
        raise ZeroFormException("Cannot restrict to the hyperplane of the zero form")
    t = max(i for i, c in enumerate(l) if c)
    inv = pow(l[t], -1, p)
    forms = []
    for form in spec.reduced_forms(field).tolist():
        ratio = form[t] * inv % p
        forms.append([(form[i] - ratio * l[i]) % p for i in range(spec.n) if i != t])
    return IdealSpec(spec.n - 1, spec.d, forms, PROVENANCE_RESTRICTED, spec.params)


def provenance_digest(spec: IdealSpec, field: PrimeField) -> str:
    """Return the SHA-256 digest of the reduced specialization."""
    payload = {
        "d": spec.d,
        "forms": spec.reduced_forms(field).tolist(),
        "n": spec.n,
        "provenance": spec.provenance,
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _linear(coeffs, n: int, field: PrimeField) -> GradedForm:
    terms = {}
    for i, c in enumerate(coeffs):
        if int(c) % field.p:
            unit = [0] * n
            unit[i] = 1
            terms[tuple(unit)] = int(c)
    return GradedForm.from_terms(n, 1, terms, field)


@attr.s(frozen=True, auto_attribs=True, eq=False)
class _Generator:
    degree: int
    exps: np.ndarray
    values: np.ndarray


@attr.s(frozen=True, auto_attribs=True, eq=False)
class Chart:
    """Coordinates and generators used to build Macaulay matrices."""

    name: str
    n: int
    #: Exponent bound of the ambient monomials, ``d - 1`` in the complete intersection chart.
    bound: typing.Optional[int]
    generators: typing.Tuple[_Generator, ...]
    #: Maps coefficient row vectors of linear forms into chart coordinates.
    transform: np.ndarray

    def linear(self, coeffs, field: PrimeField) -> _Generator:
        """Return the linear form ``coeffs`` in chart coordinates as a generator."""
        row = matmul_mod(field.reduce(np.asarray([coeffs], dtype=object)), self.transform, field.p)
        return _as_generator(_linear(row[0], self.n, field), self.bound)

    def ambient_dim(self, j: int) -> int:
        if j < 0:
            return 0
        return len(monomial_basis(self.n, j, self.bound))


def _as_generator(form: GradedForm, bound: typing.Optional[int]) -> _Generator:
    exps, values = form.exps, form.values
    if bound is not None and len(exps):
        keep = exps.max(axis=1) <= bound
        exps, values = exps[keep], values[keep]
    return _Generator(form.degree, exps, values)


def make_chart(spec: IdealSpec, field: PrimeField, chart: str = CHART_AUTO) -> Chart:
    """Return the chart for ``spec``; ``CHART_AUTO`` picks the complete intersection chart when the
    first ``n`` forms are independent."""
    if chart not in CHART_CHOICES:
        raise SizeMismatchException("Unknown chart %s" % chart)
    n, d, p = spec.n, spec.d, field.p
    forms = spec.reduced_forms(field)
    if chart != CHART_FULL and spec.m >= n:
        inverse = inverse_mod(forms[:n], field)
        if inverse is not None:
            rest = matmul_mod(forms[n:], inverse, p) if spec.m > n else np.zeros((0, n), np.int64)
            gens = tuple(_as_generator(power(_linear(w, n, field), d), d - 1) for w in rest)
            return Chart(CHART_CI, n, d - 1, gens, inverse)
        logger.debug("First %d forms are dependent modulo %d, using the full chart", n, p)
    if chart == CHART_CI:
        raise SizeMismatchException("Complete intersection chart not available for this spec")
    gens = tuple(_as_generator(power(_linear(f, n, field), d), None) for f in forms)
    return Chart(CHART_FULL, n, None, gens, np.eye(n, dtype=np.int64))


def macaulay_matrix(chart: Chart, generators, j: int, field: PrimeField) -> SparseMatrix:
    """Return the rows ``mu * g`` for generators ``g`` and monomials ``mu`` with ``deg = j``."""
    target = monomial_basis(chart.n, j, chart.bound)
    rows, cols, vals = [], [], []
    offset = 0
    for gen in generators:
        if j < gen.degree or not len(gen.exps):
            continue
        mult = monomial_basis(chart.n, j - gen.degree, chart.bound)
        if not len(mult):
            continue
        keys = target.keys_of(mult.exps)[:, None] + target.keys_of(gen.exps)[None, :]
        idx, found = target.lookup(keys.ravel())
        row_idx = np.repeat(np.arange(len(mult), dtype=np.int64) + offset, len(gen.exps))
        rows.append(row_idx[found])
        cols.append(idx[found])
        vals.append(np.tile(gen.values, len(mult))[found])
        offset += len(mult)
    if not rows:
        return SparseMatrix.from_coo([], [], [], (0, len(target)), field)
    return SparseMatrix.from_coo(
        np.concatenate(rows),
        np.concatenate(cols),
        np.concatenate(vals),
        (offset, len(target)),
        field,
    )


def quotient_dim(
    spec: IdealSpec,
    j: int,
    field: PrimeField,
    chart: str = CHART_AUTO,
    cache: typing.Optional[DimensionCache] = None,
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD,
    prepared: typing.Optional[Chart] = None,
) -> int:
    """Return ``dim (R/I)_j`` at this specialization."""
    if j < 0:
        return 0
    if j < spec.d:
        return math.comb(spec.n - 1 + j, j)
    the_chart = prepared or make_chart(spec, field, chart)
    digest = provenance_digest(spec, field) if cache is not None else None
    if cache is not None:
        hit = cache.get(spec.n, spec.m, spec.d, j, field.p, digest, the_chart.name)
        if hit is not None:
            return hit
    mat = macaulay_matrix(the_chart, the_chart.generators, j, field)
    logger.debug(
        "Macaulay matrix in degree %d: %d x %d (%s)", j, mat.nrows, mat.ncols, the_chart.name
    )
    dim = the_chart.ambient_dim(j) - rank(mat, field, dense_threshold=dense_threshold)
    if cache is not None:
        cache.put(CacheEntry(the_chart.name, spec.d, dim, j, spec.m, spec.n, field.p, digest))
    return dim


def contraction_matrix(spec: IdealSpec, j: int, field: PrimeField) -> SparseMatrix:
    """Return the stacked matrices of ``F -> l_i^d o F`` from degree ``j`` to ``j - d``.

    The entry at ``(gamma, gamma + beta)`` is ``d! prod C(gamma_t + beta_t, beta_t) c^beta``.
    """
    n, d, p = spec.n, spec.d, field.p
    source = monomial_basis(n, j)
    lower = monomial_basis(n, j - d)
    betas = monomial_basis(n, d).exps
    binom = np.array(
        [[math.comb(a, b) % p for b in range(j + 1)] for a in range(j + 1)], dtype=np.int64
    )
    # gamma + beta indexed as (gamma, beta)
    alphas = lower.exps[:, None, :] + betas[None, :, :]
    weights = np.ones(alphas.shape[:2], dtype=np.int64)
    for t in range(n):
        weights = weights * binom[alphas[:, :, t], betas[None, :, t]] % p
    weights = weights * (math.factorial(d) % p) % p
    cols = source.lookup(source.keys_of(alphas.reshape(-1, n)))[0]
    rows, all_cols, vals = [], [], []
    for i, form in enumerate(spec.reduced_forms(field).tolist()):
        powers = np.ones(len(betas), dtype=np.int64)
        for t in range(n):
            factor = np.array([pow(form[t], int(e), p) for e in betas[:, t]], dtype=np.int64)
            powers = powers * factor % p
        rows.append(np.repeat(np.arange(len(lower), dtype=np.int64) + i * len(lower), len(betas)))
        all_cols.append(cols)
        vals.append((weights * powers[None, :] % p).ravel())
    return SparseMatrix.from_coo(
        np.concatenate(rows),
        np.concatenate(all_cols),
        np.concatenate(vals),
        (spec.m * len(lower), len(source)),
        field,
    )


def inverse_dim(spec: IdealSpec, j: int, field: PrimeField, **kwargs) -> int:
    """Return ``dim [I^{-1}]_j``, the kernel dimension of the contraction constraints."""
    if j < 0:
        return 0
    if j < spec.d:
        return math.comb(spec.n - 1 + j, j)
    mat = contraction_matrix(spec, j, field)
    return mat.ncols - rank(mat, field, **kwargs)


def degree_cap(n: int, d: int) -> int:
    return 3 * s_formula(n, d) + 3


def hilbert_series_of(
    spec: IdealSpec,
    field: PrimeField,
    chart: str = CHART_AUTO,
    cache: typing.Optional[DimensionCache] = None,
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD,
) -> typing.List[int]:
    """Return the Hilbert function ``[dim A_0, ..., dim A_D]`` with ``A_D`` the last nonzero."""
    if spec.m < spec.n:
        raise NonArtinianException(
            "%d forms in %d variables never give an artinian quotient" % (spec.m, spec.n)
        )
    the_chart = make_chart(spec, field, chart)
    cap = degree_cap(spec.n, spec.d)
    series: typing.List[int] = []
    for j in range(cap + 1):
        dim = quotient_dim(
            spec, j, field, cache=cache, dense_threshold=dense_threshold, prepared=the_chart
        )
        if not dim:
            logger.info("Series for n=%d, m=%d, d=%d: %s", spec.n, spec.m, spec.d, series)
            return series
        series.append(dim)
    raise NonArtinianException("Quotient nonzero beyond degree cap %d" % cap)


def socle_degree(series: typing.Sequence[int]) -> int:
    return len(series) - 1


def check_lower_bound(series: typing.Sequence[int], n: int, m: int, d: int):
    """Raise ``VerificationException`` if ``series`` is lexicographically below the bracket."""
    cap = None if m > n else len(series)
    expected = froberg_bracket(n, [d] * m, cap).coeffs
    if not lex_at_least(series, expected):
        raise VerificationException(
            "Series %s is lexicographically below the expected %s" % (list(series), list(expected))
        )


def series_agreement(
    spec: IdealSpec, fields: typing.Sequence[PrimeField], **kwargs
) -> typing.List[int]:
    """Return the series computed at every prime in ``fields``, requiring them to agree."""
    results = [hilbert_series_of(spec, field, **kwargs) for field in fields]
    for field, series in zip(fields[1:], results[1:]):
        if series != results[0]:
            raise VerificationException(
                "Series differ between primes %d and %d: %s vs %s"
                % (fields[0].p, field.p, results[0], series)
            )
    check_lower_bound(results[0], spec.n, spec.m, spec.d)
    return results[0]


@attr.s(frozen=True, auto_attribs=True)
class RankRow:
    """Rank of ``x l: A_i -> A_{i+1}``."""

    degree: int
    dim_source: int
    dim_target: int
    rank: int

    @property
    def maximal(self):
        return self.rank == min(self.dim_source, self.dim_target)


@attr.s(frozen=True, auto_attribs=True)
class RankProfile:
    """Ranks of multiplication by a linear form in every degree."""

    rows: typing.List[RankRow]
    verdict: str
    deficient: typing.List[int] = attr.Factory(list)


def wlp_rank_profile(
    n: int,
    d: int,
    spec: IdealSpec,
    field: PrimeField,
    seed: int,
    chart: str = CHART_AUTO,
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD,
) -> RankProfile:
    """Return the ranks of multiplication by a seeded random linear form on ``R_{n,n+1,d}``.

    The rank of ``x l`` from degree ``i`` is ``rank [I_{i+1}; l R_i] - rank I_{i+1}``.
    """
    if spec.n != n or spec.d != d or spec.m != n + 1:
        raise SizeMismatchException("Rank profile needs n + 1 forms of degree d in n variables")
    the_chart = make_chart(spec, field, chart)
    ell = the_chart.linear(field.random_nonzero(seed, n).tolist(), field)

    ideal_rank: typing.Dict[int, int] = {}

    def dim_at(j):
        if j not in ideal_rank:
            mat = macaulay_matrix(the_chart, the_chart.generators, j, field)
            ideal_rank[j] = rank(mat, field, dense_threshold=dense_threshold)
        return the_chart.ambient_dim(j) - ideal_rank[j]

    rows = []
    cap = degree_cap(n, d)
    i = 0
    while dim_at(i):
        if i > cap:
            raise NonArtinianException("Quotient nonzero beyond degree cap %d" % cap)
        mixed = macaulay_matrix(the_chart, the_chart.generators + (ell,), i + 1, field)
        dim_target = dim_at(i + 1)
        mult_rank = rank(mixed, field, dense_threshold=dense_threshold) - ideal_rank[i + 1]
        rows.append(RankRow(i, dim_at(i), dim_target, mult_rank))
        i += 1
    deficient = [row.degree for row in rows if not row.maximal]
    verdict = PROFILE_DEFICIENT if deficient else PROFILE_ALL_MAXIMAL
    logger.info("Rank profile for n=%d, d=%d: %s %s", n, d, verdict, deficient)
    return RankProfile(rows, verdict, deficient)


@attr.s(frozen=True, auto_attribs=True)
class DimEstimate:
    """Generic dimension estimate: the minimum over specializations and primes."""

    value: int
    samples: typing.List[int]
    #: Whether all samples agreed; otherwise a re-run with more trials is advised.
    agreed: bool
    #: Always true: specializing can only raise quotient dimensions.
    upper_bound: bool = True


def generic_dim_estimate(
    n: int,
    m: int,
    d: int,
    j: int,
    trials: int,
    primes: typing.Sequence[int],
    seed: int = 0,
    **kwargs
) -> DimEstimate:
    """Return the minimum of ``quotient_dim`` over ``trials`` random specializations per prime."""
    samples = []
    for prime in primes:
        field = PrimeField(prime)
        for trial in range(trials):
            spec = random_spec(n, m, d, seed + trial, field)
            samples.append(quotient_dim(spec, j, field, **kwargs))
    value = min(samples)
    agreed = len(set(samples)) == 1
    if not agreed:
        logger.warning(
            "Specializations disagree for n=%d, m=%d, d=%d, j=%d: %s", n, m, d, j, samples
        )
    return DimEstimate(value, samples, agreed)
