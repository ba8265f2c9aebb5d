"""Homogeneous forms over a prime field, the apolarity action and determinantal forms.

Forms live in the dual ring ``k[X_1, ..., X_n]`` (or in the ring itself, the representation is the
same) and are stored sparsely against the graded reverse lexicographic basis of their degree.  A
linear form ``l = sum c_i x_i`` acts on the dual ring as ``sum c_i d/dX_i``.
"""

import functools
import itertools
import math
import typing

import attr
import numpy as np
from logzero import logger

from .exact_linalg import PrimeField, SparseMatrix, det_mod, rank
from .exceptions import (
    EvenArityException,
    RepeatedNodesException,
    SizeMismatchException,
    VerificationException,
    ZeroFormException,
)

#: Largest monomial key; keys are exponent vectors read in base ``degree + 1``.
MAX_KEY = 2 ** 62
#: Number of coefficient products formed at once in ``multiply()``.
PRODUCT_CHUNK = 1 << 22


@attr.s(frozen=True, auto_attribs=True, eq=False)
class MonomialBasis:
    """Monomials of degree ``degree`` in ``n`` variables, optionally with exponents ``<= bound``.

    Rows of ``exps`` are ordered by descending graded reverse lexicographic order, so ``X_1^degree``
    comes first.
    """

    n: int
    degree: int
    bound: typing.Optional[int]
    #: Exponent vectors, one per row.
    exps: np.ndarray
    #: Radix of the keys.
    radix: int
    #: Keys of ``exps`` in ascending order and the matching row numbers.
    sorted_keys: np.ndarray
    sorted_rows: np.ndarray

    def __len__(self):
        return self.exps.shape[0]

    def keys_of(self, exps: np.ndarray) -> np.ndarray:
        return np.asarray(exps, dtype=np.int64) @ (self.radix ** np.arange(self.n, dtype=np.int64))

    def lookup(self, keys: np.ndarray) -> typing.Tuple[np.ndarray, np.ndarray]:
        """Return row numbers of ``keys`` and a mask of the keys present in the basis."""
        keys = np.asarray(keys, dtype=np.int64)
        if not len(self.sorted_keys):
            return np.zeros(len(keys), dtype=np.int64), np.zeros(len(keys), dtype=bool)
        pos = np.clip(np.searchsorted(self.sorted_keys, keys), 0, len(self.sorted_keys) - 1)
        found = self.sorted_keys[pos] == keys
        return self.sorted_rows[pos], found

    def index_of(self, exps) -> np.ndarray:
        """Return the row numbers of the exponent vectors ``exps``."""
        exps = np.atleast_2d(np.asarray(exps, dtype=np.int64))
        if exps.shape[1] != self.n or np.any(exps.sum(axis=1) != self.degree):
            raise SizeMismatchException("Exponent vectors do not belong to this basis")
        rows, found = self.lookup(self.keys_of(exps))
        if not np.all(found):
            raise SizeMismatchException("Exponent vector exceeds the basis bound %s" % self.bound)
        return rows

    def exponents(self, index: int) -> typing.Tuple[int, ...]:
        return tuple(int(e) for e in self.exps[index])


def _all_exponents(n: int, degree: int) -> np.ndarray:
    if degree < 0:
        return np.zeros((0, n), dtype=np.int64)
    if n == 1:
        return np.array([[degree]], dtype=np.int64)
    rows = []
    # stars and bars: positions of the n - 1 bars among degree + n - 1 slots
    for bars in itertools.combinations(range(degree + n - 1), n - 1):
        prev = -1
        row = []
        for bar in bars:
            row.append(bar - prev - 1)
            prev = bar
        row.append(degree + n - 2 - prev)
        rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(-1, n)


@functools.lru_cache(maxsize=256)
def monomial_basis(n: int, degree: int, bound: typing.Optional[int] = None) -> MonomialBasis:
    """Return the (cached) monomial basis."""
    radix = max(degree, 0) + 1
    if radix ** n >= MAX_KEY:
        raise SizeMismatchException(
            "Monomial keys for n=%d, degree=%d exceed 62 bits" % (n, degree)
        )
    exps = _all_exponents(n, degree)
    if bound is not None and len(exps):
        exps = exps[exps.max(axis=1) <= bound]
    if len(exps):
        # last variable is the primary key, ascending, which is descending grevlex
        exps = exps[np.lexsort(exps.T)]
    keys = exps @ (radix ** np.arange(n, dtype=np.int64))
    order = np.argsort(keys, kind="stable")
    return MonomialBasis(n, degree, bound, exps, radix, keys[order], order.astype(np.int64))


@attr.s(frozen=True, auto_attribs=True)
class LinearForm:
    """Linear form ``sum c_i x_i`` with integer coefficients."""

    coeffs: typing.Tuple[int, ...] = attr.ib(converter=lambda xs: tuple(int(x) for x in xs))

    @coeffs.validator
    def _check_coeffs(self, _attribute, value):
        if not any(value):
            raise ZeroFormException("Linear form must not be zero")

    @property
    def n(self):
        return len(self.coeffs)

    def reduced(self, field: PrimeField) -> "LinearForm":
        return LinearForm([c % field.p for c in self.coeffs])


@attr.s(frozen=True, auto_attribs=True, eq=False)
class GradedForm:
    """Homogeneous form of degree ``degree`` in ``n`` variables modulo ``p``.

    ``indices`` are sorted row numbers into ``monomial_basis(n, degree)``; ``values`` hold the
    nonzero coefficients.
    """

    n: int
    degree: int
    p: int
    indices: np.ndarray
    values: np.ndarray

    @classmethod
    def collect(cls, n: int, degree: int, p: int, indices, values) -> "GradedForm":
        """Build a form from possibly repeated ``(index, value)`` entries, summing repeats."""
        indices = np.asarray(indices, dtype=np.int64)
        values = np.asarray(values, dtype=np.int64) % p
        if not len(indices):
            return cls(n, degree, p, indices, values)
        order = np.argsort(indices, kind="stable")
        indices, values = indices[order], values[order]
        uniq, start = np.unique(indices, return_index=True)
        sums = np.add.reduceat(values, start) % p
        keep = sums != 0
        return cls(n, degree, p, uniq[keep], sums[keep])

    @classmethod
    def zero(cls, n: int, degree: int, field: PrimeField) -> "GradedForm":
        return cls.collect(n, degree, field.p, [], [])

    @classmethod
    def constant(cls, n: int, value: int, field: PrimeField) -> "GradedForm":
        return cls.collect(n, 0, field.p, [0], [value])

    @classmethod
    def variable(cls, n: int, i: int, field: PrimeField) -> "GradedForm":
        """Return ``X_{i+1}``."""
        exps = np.zeros(n, dtype=np.int64)
        exps[i] = 1
        return cls.from_terms(n, 1, {tuple(exps): 1}, field)

    @classmethod
    def from_terms(cls, n: int, degree: int, terms: typing.Dict[tuple, int], field: PrimeField):
        """Build from a mapping of exponent tuples to integer coefficients."""
        if not terms:
            return cls.zero(n, degree, field)
        exps = np.array(list(terms.keys()), dtype=np.int64).reshape(-1, n)
        values = [int(v) % field.p for v in terms.values()]
        return cls.collect(n, degree, field.p, monomial_basis(n, degree).index_of(exps), values)

    @classmethod
    def from_dense(cls, n: int, degree: int, vector, field: PrimeField):
        vector = field.reduce(np.asarray(vector, dtype=np.int64))
        nz = np.flatnonzero(vector)
        return cls(n, degree, field.p, nz.astype(np.int64), vector[nz])

    @classmethod
    def from_linear(cls, l: LinearForm, field: PrimeField) -> "GradedForm":
        terms = {}
        for i, c in enumerate(l.coeffs):
            exps = [0] * l.n
            exps[i] = 1
            terms[tuple(exps)] = c
        return cls.from_terms(l.n, 1, terms, field)

    @property
    def basis(self) -> MonomialBasis:
        return monomial_basis(self.n, self.degree)

    @property
    def exps(self) -> np.ndarray:
        """Exponent vectors of the stored terms."""
        return self.basis.exps[self.indices]

    def terms(self) -> typing.Dict[typing.Tuple[int, ...], int]:
        return {tuple(int(e) for e in row): int(v) for row, v in zip(self.exps, self.values)}

    def is_zero(self):
        return not len(self.values)

    def to_dense(self) -> np.ndarray:
        result = np.zeros(len(self.basis), dtype=np.int64)
        result[self.indices] = self.values
        return result

    def scale(self, factor: int) -> "GradedForm":
        values = self.values * (int(factor) % self.p) % self.p
        return GradedForm.collect(self.n, self.degree, self.p, self.indices, values)

    def add(self, other: "GradedForm") -> "GradedForm":
        _check_compatible(self, other)
        if self.degree != other.degree:
            raise SizeMismatchException(
                "Cannot add forms of degrees %d and %d" % (self.degree, other.degree)
            )
        return GradedForm.collect(
            self.n,
            self.degree,
            self.p,
            np.concatenate([self.indices, other.indices]),
            np.concatenate([self.values, other.values]),
        )

    def __eq__(self, other):
        if not isinstance(other, GradedForm):
            return NotImplemented
        return (
            (self.n, self.degree, self.p) == (other.n, other.degree, other.p)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.n, self.degree, self.p, self.indices.tobytes(), self.values.tobytes()))

    def __repr__(self):
        return "GradedForm(n=%d, degree=%d, terms=%d)" % (self.n, self.degree, len(self.values))


def _check_compatible(lhs: GradedForm, rhs: GradedForm):
    if lhs.n != rhs.n or lhs.p != rhs.p:
        raise SizeMismatchException("Forms live in different rings")


def multiply(lhs: GradedForm, rhs: GradedForm) -> GradedForm:
    """Return the product of two homogeneous forms."""
    _check_compatible(lhs, rhs)
    n, p = lhs.n, lhs.p
    degree = lhs.degree + rhs.degree
    if lhs.is_zero() or rhs.is_zero():
        return GradedForm(n, degree, p, np.zeros(0, np.int64), np.zeros(0, np.int64))
    target = monomial_basis(n, degree)
    keys_l = target.keys_of(lhs.exps)
    keys_r = target.keys_of(rhs.exps)
    chunk = max(1, PRODUCT_CHUNK // len(keys_l))
    parts_idx, parts_val = [], []
    for start in range(0, len(keys_r), chunk):
        keys = (keys_l[:, None] + keys_r[None, start : start + chunk]).ravel()
        vals = (lhs.values[:, None] * rhs.values[None, start : start + chunk] % p).ravel()
        rows, _ = target.lookup(keys)
        part = GradedForm.collect(n, degree, p, rows, vals)
        parts_idx.append(part.indices)
        parts_val.append(part.values)
    return GradedForm.collect(n, degree, p, np.concatenate(parts_idx), np.concatenate(parts_val))


def power(form: GradedForm, e: int) -> GradedForm:
    """Return ``form^e`` by repeated squaring."""
    result = GradedForm.collect(form.n, 0, form.p, [0], [1])
    base = form
    while e:
        if e & 1:
            result = multiply(result, base)
        e >>= 1
        if e:
            base = multiply(base, base)
    return result


def product(forms: typing.Iterable[GradedForm]) -> GradedForm:
    """Return the product of ``forms``, multiplied left to right."""
    forms = list(forms)
    result = forms[0]
    for form in forms[1:]:
        result = multiply(result, form)
    return result


def linear_power(l: LinearForm, d: int, field: PrimeField) -> GradedForm:
    """Return ``l^d`` as a form."""
    return power(GradedForm.from_linear(l, field), d)


def _derive(l: LinearForm, form: GradedForm) -> GradedForm:
    """Return ``l o form`` for a single application of the linear form."""
    n, p = form.n, form.p
    if form.degree == 0 or form.is_zero():
        return GradedForm(n, form.degree - 1, p, np.zeros(0, np.int64), np.zeros(0, np.int64))
    exps = form.exps
    target = monomial_basis(n, form.degree - 1)
    parts_idx, parts_val = [], []
    for i, c in enumerate(l.coeffs):
        c %= p
        if not c:
            continue
        mask = exps[:, i] > 0
        if not np.any(mask):
            continue
        lowered = exps[mask].copy()
        factors = lowered[:, i] % p
        lowered[:, i] -= 1
        parts_idx.append(target.index_of(lowered))
        parts_val.append(form.values[mask] * factors % p * c % p)
    if not parts_idx:
        return GradedForm(n, form.degree - 1, p, np.zeros(0, np.int64), np.zeros(0, np.int64))
    return GradedForm.collect(
        n, form.degree - 1, p, np.concatenate(parts_idx), np.concatenate(parts_val)
    )


def contract(l: LinearForm, e: int, form: GradedForm) -> GradedForm:
    """Return ``l^e o form`` where ``x_i`` acts as ``d/dX_i``.

    For ``e > deg(form)`` the result is the zero form (of negative degree).
    """
    if l.n != form.n:
        raise SizeMismatchException("Linear form has %d variables, form has %d" % (l.n, form.n))
    result = form
    for _ in range(e):
        result = _derive(l, result)
    return result


def annihilates(l: LinearForm, e: int, form: GradedForm) -> bool:
    """Return whether ``l^e o form = 0``."""
    return contract(l, e, form).is_zero()


def moment_form(n: int, alpha: int, field: typing.Optional[PrimeField] = None) -> LinearForm:
    """Return ``(1, alpha, ..., alpha^(n-1))``, reduced when ``field`` is given."""
    if field is not None:
        return LinearForm([pow(alpha, j, field.p) for j in range(n)])
    return LinearForm([alpha ** j for j in range(n)])


def _permutation_sign(perm: typing.Sequence[int]) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def determinant_form(
    n: int,
    const_rows: typing.Sequence[typing.Sequence[int]],
    var_rows: typing.Sequence[typing.Sequence[typing.Tuple[int, int]]],
    field: PrimeField,
) -> GradedForm:
    """Return the determinant of a square matrix of constant rows followed by variable rows.

    Entries of a variable row are ``(i, c)`` pairs standing for ``c X_{i+1}``.  The determinant is
    expanded along the variable rows.
    """
    p = field.p
    size = len(const_rows) + len(var_rows)
    if any(len(row) != size for row in list(const_rows) + list(var_rows)):
        raise SizeMismatchException("Determinant form needs a square matrix of size %d" % size)
    k = len(var_rows)
    var_positions = list(range(len(const_rows), size))
    terms: typing.Dict[typing.Tuple[int, ...], int] = {}
    for cols in itertools.combinations(range(size), k):
        rest = [c for c in range(size) if c not in cols]
        minor = det_mod([[row[c] for c in rest] for row in const_rows], field) if rest else 1
        if not minor:
            continue
        sign = (-1) ** (sum(var_positions) + sum(cols))
        for perm in itertools.permutations(range(k)):
            coeff = sign * _permutation_sign(perm) * minor
            exps = [0] * n
            for r, pos in enumerate(perm):
                var, c = var_rows[r][cols[pos]]
                coeff = coeff * c % p
                exps[var] += 1
            if coeff:
                key = tuple(exps)
                terms[key] = (terms.get(key, 0) + coeff) % p
    return GradedForm.from_terms(n, k, {key: v for key, v in terms.items() if v}, field)


def _check_distinct(values: typing.Sequence[int], field: PrimeField):
    reduced = [v % field.p for v in values]
    if len(set(reduced)) != len(reduced):
        raise RepeatedNodesException("Nodes must be pairwise distinct: %s" % (list(values),))


def mixed_form(n: int, k: int, alphas: typing.Sequence[int], field: PrimeField) -> GradedForm:
    """Return the degree ``k`` form with Vandermonde rows for ``alphas`` and ``k`` shifted rows.

    The matrix has size ``n - k + 1``: rows ``(1, a, ..., a^(n-k))`` for each ``a`` in ``alphas``
    followed by rows ``(X_j, ..., X_{j+n-k})`` for ``j = 1..k``.
    """
    if not (0 < k and 2 * k <= n + 1):
        raise SizeMismatchException("Need 0 < k <= (n + 1) / 2 for n=%d, k=%d" % (n, k))
    if len(alphas) != n - 2 * k + 1:
        raise SizeMismatchException(
            "Need %d nodes for n=%d, k=%d but got %d" % (n - 2 * k + 1, n, k, len(alphas))
        )
    _check_distinct(alphas, field)
    size = n - k + 1
    const_rows = [[pow(a, c, field.p) for c in range(size)] for a in alphas]
    var_rows = [[(j + c, 1) for c in range(size)] for j in range(k)]
    form = determinant_form(n, const_rows, var_rows, field)
    if form.is_zero():
        logger.warning("Mixed form for n=%d, k=%d vanishes; degenerate nodes %s", n, k, alphas)
    return form


def hankel_form(n: int, field: PrimeField) -> GradedForm:
    """Return the Hankel determinant ``det(X_{i+j-1})`` of size ``(n + 1) / 2`` for odd ``n``."""
    if n % 2 == 0:
        raise EvenArityException("Hankel form requires odd n, got %d" % n)
    return mixed_form(n, (n + 1) // 2, [], field)


def general_position_form(n: int, a: typing.Sequence[int], field: PrimeField) -> GradedForm:
    """Return the form of degree ``(n + 1) / 2`` killed by the squares of ``x_i``, ``sum x_i``
    and ``sum a_i x_i``.

    Row ``i`` of the determinant is ``X_i, a_i X_i, ..., a_i^(k-1) X_i, a_i, ..., a_i^(k-1)``.
    """
    if n % 2 == 0:
        raise EvenArityException("General position form requires odd n, got %d" % n)
    if len(a) != n:
        raise SizeMismatchException("Need %d nodes, got %d" % (n, len(a)))
    _check_distinct(a, field)
    k = (n + 1) // 2
    p = field.p
    # transposed: the first k columns become variable rows
    var_rows = [[(i, pow(a[i], c, p)) for i in range(n)] for c in range(k)]
    const_rows = [[pow(a[i], c, p) for i in range(n)] for c in range(1, k)]
    return determinant_form(n, const_rows, var_rows, field)


def _vandermonde(values: typing.Sequence[int], p: int) -> int:
    result = 1
    for i, j in itertools.combinations(range(len(values)), 2):
        result = result * (values[j] - values[i]) % p
    return result


def vandermonde_sum_form(n: int, a: typing.Sequence[int], field: PrimeField) -> GradedForm:
    """Return the general position form through its sum over all permutations of the nodes."""
    if n % 2 == 0:
        raise EvenArityException("Vandermonde sum form requires odd n, got %d" % n)
    _check_distinct(a, field)
    k = (n + 1) // 2
    p = field.p
    terms: typing.Dict[typing.Tuple[int, ...], int] = {}
    for sigma in itertools.permutations(range(n)):
        head = [a[i] for i in sigma[:k]]
        tail = [a[i] for i in sigma[k:]]
        coeff = _permutation_sign(sigma) * _vandermonde(head, p) * _vandermonde(tail, p)
        for value in tail:
            coeff = coeff * value % p
        exps = [0] * n
        for i in sigma[:k]:
            exps[i] += 1
        key = tuple(exps)
        terms[key] = (terms.get(key, 0) + coeff) % p
    prefactor = pow(math.factorial(k) * math.factorial(k - 1), -1, p)
    return GradedForm.from_terms(n, k, {key: v * prefactor for key, v in terms.items() if v}, field)


def general_position_scalar(n: int, a: typing.Sequence[int], field: PrimeField) -> int:
    """Return ``c`` with ``vandermonde_sum_form = c * general_position_form``."""
    det_form = general_position_form(n, a, field)
    sum_form = vandermonde_sum_form(n, a, field)
    if det_form.is_zero() or not np.array_equal(det_form.indices, sum_form.indices):
        raise VerificationException("Determinant and permutation sum have different supports")
    scalar = int(sum_form.values[0]) * field.inv(det_form.values[0]) % field.p
    if not np.array_equal(det_form.values * scalar % field.p, sum_form.values):
        raise VerificationException("Determinant and permutation sum are not proportional")
    return scalar


def pairing_rank(n: int, j: int, field: PrimeField) -> int:
    """Return the rank of the apolarity pairing ``x^beta o X^alpha`` in degree ``j``."""
    basis = monomial_basis(n, j)
    units = [LinearForm([int(i == t) for t in range(n)]) for i in range(n)]
    rows = []
    for beta in basis.exps:
        row = []
        for col in range(len(basis)):
            form = GradedForm(n, j, field.p, np.array([col], dtype=np.int64), np.ones(1, np.int64))
            for unit, e in zip(units, beta.tolist()):
                form = contract(unit, e, form)
            if not form.is_zero():
                row.append((col, int(form.values[0])))
        rows.append(row)
    return rank(SparseMatrix.from_rows(rows, len(basis), field), field)
