"""Explicit inverse system forms: sporadic certificates and socle degree witnesses.

All forms are built for the moment curve specialization ``l_i = sum_j alpha_i^(j-1) x_j``.  A factor
``F_S`` for a subset ``S`` of the forms is the mixed determinant form killed linearly by the
forms in ``S`` and by the squares of all other forms on the curve.
"""

import itertools
import math
import typing

import attr
import numpy as np
from logzero import logger

from .apolar_poly import (
    GradedForm,
    LinearForm,
    annihilates,
    hankel_form,
    mixed_form,
    multiply,
    power,
    product,
)
from .exact_linalg import IncrementalSpan, PrimeField, kernel_basis
from .exceptions import (
    InfeasibleSizesException,
    ParityException,
    SizeMismatchException,
    VerificationException,
)
from .hilbert_engine import (
    PROVENANCE_MOMENT,
    IdealSpec,
    contraction_matrix,
    hilbert_series_of,
    moment_spec,
    quotient_dim,
)
from .series_core import froberg_bracket, s_formula

#: Largest ambient dimension for which the socle value of a witness is computed.
SOCLE_VALUE_LIMIT = 20000
#: Default number of random families tried before giving up.
DEFAULT_MAX_FAMILIES = 5000


@attr.s(frozen=True, auto_attribs=True)
class SporadicCase:
    """Subset sizes and expectations for one sporadic ``(n, m, d)``."""

    n: int
    m: int
    d: int
    sizes: typing.Tuple[int, ...]
    multiplicity: int
    #: Socle value of the actual algebra.
    target: int
    #: Full Hilbert series of the actual algebra.
    series: typing.Tuple[int, ...]


#: The six cases whose Hilbert series differs from the expected one in the last coefficient.
SPORADIC_CASES = {
    (4, 6, 5): SporadicCase(
        4, 6, 5, (3, 3, 3, 1, 1, 1), 2, 14, (1, 4, 10, 20, 35, 50, 60, 60, 45, 14)
    ),
    (6, 8, 3): SporadicCase(6, 8, 3, (5, 5, 3, 3), 2, 43, (1, 6, 21, 48, 78, 84, 43)),
    (8, 10, 2): SporadicCase(8, 10, 2, (5, 5), 1, 16, (1, 8, 26, 40, 16)),
    (8, 10, 3): SporadicCase(
        8, 10, 3, (5, 5, 5, 5), 2, 171, (1, 8, 36, 110, 250, 432, 561, 492, 171)
    ),
    (10, 12, 2): SporadicCase(10, 12, 2, (5, 7), 1, 32, (1, 10, 43, 100, 121, 32)),
    (10, 12, 3): SporadicCase(
        10, 12, 3, (5, 5, 7, 7), 2, 683, (1, 10, 55, 208, 595, 1342, 2431, 3520, 3916, 2860, 683)
    ),
}

#: Cases whose computation is too expensive for quick runs.
HEAVY_CASES = ((10, 12, 3),)


def _canonical(subsets) -> typing.Tuple[typing.Tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(s)) for s in subsets), key=lambda s: (len(s), s)))


@attr.s(frozen=True, auto_attribs=True)
class CoverFamily:
    """Subsets of ``{0, ..., m - 1}`` covering every element exactly ``multiplicity`` times."""

    m: int
    subsets: typing.Tuple[typing.Tuple[int, ...], ...] = attr.ib(converter=_canonical)
    multiplicity: int = 2

    @subsets.validator
    def _check_cover(self, _attribute, value):
        counts = [0] * self.m
        for subset in value:
            if len(set(subset)) != len(subset):
                raise InfeasibleSizesException("Subset %s repeats an element" % (subset,))
            for i in subset:
                counts[i] += 1
        if any(c != self.multiplicity for c in counts):
            raise InfeasibleSizesException(
                "Elements must be covered exactly %d times: %s" % (self.multiplicity, counts)
            )

    @property
    def sizes(self):
        return tuple(len(s) for s in self.subsets)


def _check_sizes(m: int, sizes: typing.Sequence[int], multiplicity: int):
    if sum(sizes) != multiplicity * m or any(s < 0 or s > m for s in sizes):
        raise InfeasibleSizesException(
            "Sizes %s cannot cover %d elements %d times" % (list(sizes), m, multiplicity)
        )


def iter_cover_families(
    m: int, sizes: typing.Sequence[int], multiplicity: int = 2
) -> typing.Iterator[CoverFamily]:
    """Yield all cover families with the given subset sizes, each once, in a fixed order."""
    _check_sizes(m, sizes, multiplicity)
    sizes = sorted(sizes)
    slots: typing.List[typing.List[int]] = [[] for _ in sizes]
    seen = set()

    def place(element):
        if element == m:
            key = _canonical(slots)
            if key not in seen:
                seen.add(key)
                yield CoverFamily(m, key, multiplicity)
            return
        remaining = m - element
        open_slots = [i for i, s in enumerate(sizes) if len(slots[i]) < s]
        for chosen in itertools.combinations(open_slots, multiplicity):
            # slots of equal size with equal contents are interchangeable
            if any(
                i > 0
                and sizes[i] == sizes[i - 1]
                and slots[i] == slots[i - 1]
                and (i - 1) not in chosen
                for i in chosen
            ):
                continue
            for i in chosen:
                slots[i].append(element)
            # each slot must still be fillable by the elements left
            if all(sizes[i] - len(slots[i]) <= remaining - 1 for i in range(len(sizes))):
                yield from place(element + 1)
            for i in chosen:
                slots[i].pop()

    yield from place(0)


def enumerate_cover_families(
    m: int, sizes: typing.Sequence[int], multiplicity: int = 2
) -> typing.List[CoverFamily]:
    """Return all cover families, deduplicated up to reordering of equal-size subsets."""
    return list(iter_cover_families(m, sizes, multiplicity))


def random_cover_families(
    m: int,
    sizes: typing.Sequence[int],
    multiplicity: int,
    seed: int,
    max_attempts: int = 100000,
) -> typing.Iterator[CoverFamily]:
    """Yield distinct cover families drawn from a seeded random stream."""
    _check_sizes(m, sizes, multiplicity)
    rng = np.random.Generator(np.random.PCG64(seed))
    pool = np.repeat(np.arange(m), multiplicity)
    bounds = np.cumsum([0] + list(sizes))
    seen = set()
    for _ in range(max_attempts):
        perm = rng.permutation(pool)
        subsets = [perm[bounds[i] : bounds[i + 1]].tolist() for i in range(len(sizes))]
        if any(len(set(s)) != len(s) for s in subsets):
            continue
        key = _canonical(subsets)
        if key in seen:
            continue
        seen.add(key)
        yield CoverFamily(m, key, multiplicity)


def _spec_alphas(spec: IdealSpec) -> typing.List[int]:
    if spec.provenance != PROVENANCE_MOMENT or len(spec.params) != spec.m:
        raise SizeMismatchException("Certificates need a moment curve specialization")
    return list(spec.params)


def subset_factor(
    n: int, subset: typing.Sequence[int], alphas: typing.Sequence[int], field: PrimeField
) -> GradedForm:
    """Return ``F_S``, of degree ``(n + 1 - |S|) / 2``."""
    if (n + 1 - len(subset)) % 2:
        raise ParityException("Subset size %d has the wrong parity for n=%d" % (len(subset), n))
    k = (n + 1 - len(subset)) // 2
    return mixed_form(n, k, [alphas[i] for i in subset], field)


def verify_annihilation(form: GradedForm, spec: IdealSpec, field: PrimeField):
    """Raise ``VerificationException`` unless every ``l_i^d`` kills ``form``."""
    for i, coeffs in enumerate(spec.reduced_forms(field).tolist()):
        if not annihilates(LinearForm(coeffs), spec.d, form):
            raise VerificationException("Form %d of the specialization does not annihilate" % i)


def certificate_form(
    family: CoverFamily,
    spec: IdealSpec,
    field: PrimeField,
    factor_cache: typing.Optional[dict] = None,
    verify: bool = True,
) -> GradedForm:
    """Return ``prod F_S`` over the subsets of ``family``, checked against all ``l_i^d``."""
    if family.m != spec.m:
        raise SizeMismatchException("Family covers %d forms, spec has %d" % (family.m, spec.m))
    alphas = _spec_alphas(spec)
    cache = factor_cache if factor_cache is not None else {}
    factors = []
    for subset in family.subsets:
        if subset not in cache:
            cache[subset] = subset_factor(spec.n, subset, alphas, field)
        factors.append(cache[subset])
    form = product(factors)
    if verify:
        verify_annihilation(form, spec, field)
    return form


@attr.s(frozen=True, auto_attribs=True)
class CertificateResult:
    """Outcome of ``sporadic_certificate()``."""

    case: typing.Tuple[int, int, int]
    degree: int
    #: Dimension spanned by certificate forms, a lower bound for the generic value.
    span_dim: int
    #: Dimension of the specialized quotient, an upper bound for the generic value.
    quotient_dim: int
    target: int
    #: Coefficient of the expected series in ``degree``.
    expected: int
    matched: bool
    families_tried: int
    #: Whether the full series was compared and agreed, ``None`` if not compared.
    series_matches: typing.Optional[bool] = None

    @property
    def sandwich(self):
        """Whether lower and upper bound agree and differ from the expected coefficient."""
        return self.span_dim == self.quotient_dim and self.quotient_dim != self.expected


def parse_case(text: str) -> typing.Tuple[int, int, int]:
    """Parse ``"10,12,3"`` into a case key."""
    case = tuple(int(x) for x in text.split(","))
    if case not in SPORADIC_CASES:
        raise SizeMismatchException(
            "Unknown case %s, choose from %s" % (text, sorted(SPORADIC_CASES))
        )
    return case


def sporadic_certificate(
    case: typing.Tuple[int, int, int],
    field: PrimeField,
    spec: typing.Optional[IdealSpec] = None,
    exhaustive: bool = False,
    full_series: bool = False,
    seed: int = 0,
    max_families: int = DEFAULT_MAX_FAMILIES,
    cache=None,
) -> CertificateResult:
    """Span certificate forms in the socle degree of one sporadic case.

    Families are enumerated completely for up to eight forms and sampled otherwise.  The search
    stops once the target dimension is reached.  With ``exhaustive`` every family is enumerated
    and used, whatever the number of forms.
    """
    info = SPORADIC_CASES[case]
    n, m, d = case
    spec = spec or moment_spec(n, m, d)
    degree = sum((n + 1 - s) // 2 for s in info.sizes)
    expected = froberg_bracket(n, [d] * m).coefficient(degree)
    upper = quotient_dim(spec, degree, field, cache=cache)
    logger.info(
        "Case %s: quotient dimension %d in degree %d, expected %d", case, upper, degree, expected
    )

    if m <= 8 or exhaustive:
        families = iter_cover_families(m, info.sizes, info.multiplicity)
    else:
        families = random_cover_families(m, info.sizes, info.multiplicity, seed)
    span = IncrementalSpan(math.comb(n - 1 + degree, degree), field)
    factor_cache: dict = {}
    tried = 0
    for family in families:
        if not exhaustive and (span.dim >= info.target or tried >= max_families):
            break
        form = certificate_form(family, spec, field, factor_cache)
        tried += 1
        if span.add([(form.indices, form.values)]):
            logger.debug("Family %d raised the span to %d", tried, span.dim)
    logger.info(
        "Case %s: span %d of target %d after %d families", case, span.dim, info.target, tried
    )

    series_matches = None
    if full_series:
        series_matches = tuple(hilbert_series_of(spec, field, cache=cache)) == info.series
    return CertificateResult(
        case=case,
        degree=degree,
        span_dim=span.dim,
        quotient_dim=upper,
        target=info.target,
        expected=expected,
        matched=span.dim == info.target,
        families_tried=tried,
        series_matches=series_matches,
    )


def _even_factor(n: int, i: int, alphas, field) -> GradedForm:
    """Return ``F_i``, killed linearly by ``l_i`` and by the squares of all forms."""
    return mixed_form(n, n // 2, [alphas[i]], field)


def _witness_form(n: int, d: int, alphas: typing.Sequence[int], field: PrimeField) -> GradedForm:
    """Return the witness form for ``R_{n,n+2,d}`` with forms at ``alphas`` (0-based)."""
    if d == 1:
        return GradedForm.constant(n, 1, field)
    if n % 2 == 1:
        return power(hankel_form(n, field), d - 1)
    if d == 2:
        return _even_factor(n, 0, alphas, field)
    if d == 3:
        return power(_even_factor(n, 0, alphas, field), 2)
    if d <= n + 1:
        # G is killed linearly by l_d, ..., l_{n+2} and, for odd d, also by l_{d-1}
        k = s_formula(d - 3, 2)
        annihilators = list(range(d - 1, n + 2))
        if d % 2 == 1:
            annihilators = [d - 2] + annihilators
        g = mixed_form(n, k, [alphas[i] for i in annihilators], field)
        return product([g] + [_even_factor(n, i, alphas, field) for i in range(d - 1)])
    a, c = divmod(d - 1, n + 1)
    c += 1
    full = product([_even_factor(n, i, alphas, field) for i in range(n + 2)])
    return multiply(_witness_form(n, c, alphas, field), power(full, a))


@attr.s(frozen=True, auto_attribs=True, eq=False)
class WitnessResult:
    """A verified nonzero form in the socle degree of ``R_{n,n+2,d}``."""

    n: int
    d: int
    form: GradedForm
    degree: int
    #: ``"construction"`` or ``"kernel"``.
    method: str
    #: ``dim A_s`` of the specialized algebra if computed.
    socle_value: typing.Optional[int] = None


def witness_by_kernel(spec: IdealSpec, degree: int, field: PrimeField) -> GradedForm:
    """Return the first kernel vector of the contraction constraints in ``degree``."""
    basis = kernel_basis(contraction_matrix(spec, degree, field), field)
    if not len(basis):
        raise VerificationException("Inverse system is zero in degree %d" % degree)
    return GradedForm.from_dense(spec.n, degree, basis[0], field)


def degree_witness(
    n: int,
    d: int,
    field: PrimeField,
    spec: typing.Optional[IdealSpec] = None,
    fallback: bool = True,
    socle_value: bool = True,
) -> WitnessResult:
    """Return a nonzero form of degree ``s(n, d)`` killed by all ``n + 2`` powers ``l_i^d``."""
    spec = spec or moment_spec(n, n + 2, d)
    alphas = _spec_alphas(spec)
    expected = s_formula(n, d)
    method = "construction"
    try:
        form = _witness_form(n, d, alphas, field)
        if form.is_zero() or form.degree != expected:
            raise VerificationException(
                "Witness for n=%d, d=%d has degree %d, expected %d" % (n, d, form.degree, expected)
            )
        verify_annihilation(form, spec, field)
    except VerificationException as e:
        if not fallback:
            raise
        logger.warning("Construction failed (%s), extracting a kernel vector instead", e)
        form = witness_by_kernel(spec, expected, field)
        verify_annihilation(form, spec, field)
        method = "kernel"
    value = None
    if socle_value and math.comb(n - 1 + expected, expected) <= SOCLE_VALUE_LIMIT:
        value = quotient_dim(spec, expected, field)
    logger.info("Witness for n=%d, d=%d in degree %d (%s)", n, d, expected, method)
    return WitnessResult(n, d, form, expected, method, value)
