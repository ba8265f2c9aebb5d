"""Exact linear algebra over prime fields.

Residues are stored in ``int64`` arrays with values in ``[0, p)`` and ``p < 2^31``.  Products of
residue matrices are formed with one operand split at 15 bits, so that every accumulation stays
below 2^63.
"""

import typing

import attr
import numpy as np
import sympy
from logzero import logger
from scipy import sparse

from .exceptions import InvalidFieldException, SizeMismatchException
from .settings import DEFAULT_DENSE_THRESHOLD

#: Smallest admissible modulus (exclusive); multinomial factors of working degrees stay nonzero.
MIN_PRIME = 10 ** 6
#: Largest admissible modulus (exclusive).
MAX_PRIME = 2 ** 31
#: Columns per panel in blocked elimination.
PANEL_WIDTH = 64
#: Bit position at which matrix product operands are split.
SPLIT_BITS = 15
#: Inner dimension chunk in ``matmul_mod()``; keeps accumulations below 2^63.
INNER_CHUNK = 1 << 14
#: Approximate number of matrix entries processed per chunk of a trailing update.
UPDATE_CHUNK_ENTRIES = 1 << 25


def _validate_prime(_instance, _attribute, value):
    if not (MIN_PRIME < value < MAX_PRIME) or not sympy.isprime(value):
        raise InvalidFieldException(
            "Modulus must be a prime between %d and %d but is %d" % (MIN_PRIME, MAX_PRIME, value)
        )


@attr.s(frozen=True, auto_attribs=True)
class PrimeField:
    """The residue field of a word-sized prime."""

    p: int = attr.ib(validator=_validate_prime)

    def reduce(self, values) -> np.ndarray:
        """Return ``values`` reduced into ``[0, p)`` as an ``int64`` array."""
        if isinstance(values, np.ndarray) and values.dtype == np.int64:
            return np.mod(values, self.p)
        return np.array([int(v) % self.p for v in np.ravel(values)], dtype=np.int64).reshape(
            np.shape(values)
        )

    def inv(self, value) -> int:
        return pow(int(value) % self.p, -1, self.p)

    def rng(self, seed: int) -> np.random.Generator:
        """Return the random stream for ``seed``; equal seeds and primes give equal streams."""
        return np.random.Generator(np.random.PCG64([seed, self.p]))

    def random_elements(self, seed: int, count: int) -> np.ndarray:
        return self.rng(seed).integers(0, self.p, size=count, dtype=np.int64)

    def random_nonzero(self, seed: int, count: int) -> np.ndarray:
        return self.rng(seed).integers(1, self.p, size=count, dtype=np.int64)


@attr.s(frozen=True, auto_attribs=True, eq=False)
class SparseMatrix:
    """Immutable sparse matrix over a prime field with sorted column indices and no stored zeros."""

    csr: sparse.csr_matrix

    @classmethod
    def from_coo(cls, rows, cols, values, shape, field: PrimeField):
        """Build from triplets; duplicate entries are summed modulo ``p``."""
        mat = sparse.coo_matrix(
            (field.reduce(np.asarray(values, dtype=np.int64)), (rows, cols)),
            shape=shape,
            dtype=np.int64,
        ).tocsr()
        mat.sum_duplicates()
        mat.data %= field.p
        mat.eliminate_zeros()
        mat.sort_indices()
        return cls(mat)

    @classmethod
    def from_rows(cls, rows, ncols: int, field: PrimeField):
        """Build from a list of rows, each a list of ``(column, value)`` pairs."""
        row_idx, col_idx, values = [], [], []
        for i, row in enumerate(rows):
            for col, value in row:
                row_idx.append(i)
                col_idx.append(col)
                values.append(int(value) % field.p)
        return cls.from_coo(row_idx, col_idx, values, (len(rows), ncols), field)

    @classmethod
    def from_dense(cls, array, field: PrimeField):
        if isinstance(array, np.ndarray) and array.dtype.kind == "i":
            array = field.reduce(array.astype(np.int64))
        else:
            array = field.reduce(np.asarray(array, dtype=object))
        rows, cols = np.nonzero(array)
        return cls.from_coo(rows, cols, array[rows, cols], array.shape, field)

    @property
    def shape(self):
        return self.csr.shape

    @property
    def nrows(self):
        return self.csr.shape[0]

    @property
    def ncols(self):
        return self.csr.shape[1]

    def rows(self) -> typing.List[typing.List[typing.Tuple[int, int]]]:
        """Return the rows as lists of ``(column, value)`` pairs."""
        indptr, indices, data = self.csr.indptr, self.csr.indices, self.csr.data
        result = []
        for i in range(self.nrows):
            window = slice(indptr[i], indptr[i + 1])
            result.append(list(zip(indices[window].tolist(), data[window].tolist())))
        return result

    def transpose(self):
        mat = self.csr.transpose().tocsr()
        mat.sort_indices()
        return SparseMatrix(mat)

    def to_dense(self) -> np.ndarray:
        return self.csr.toarray().astype(np.int64)


def matmul_mod(lhs: np.ndarray, rhs: np.ndarray, p: int) -> np.ndarray:
    """Return ``lhs @ rhs mod p`` for residue matrices without ``int64`` overflow."""
    result = np.zeros((lhs.shape[0], rhs.shape[1]), dtype=np.int64)
    mask = (1 << SPLIT_BITS) - 1
    for start in range(0, lhs.shape[1], INNER_CHUNK):
        part_l = lhs[:, start : start + INNER_CHUNK]
        part_r = rhs[start : start + INNER_CHUNK]
        high = (part_l >> SPLIT_BITS) @ part_r % p
        low = (part_l & mask) @ part_r % p
        result = (result + ((high << SPLIT_BITS) % p) + low) % p
    return result


def _inv_mod(mat: np.ndarray, p: int) -> np.ndarray:
    """Return the inverse of the invertible square residue matrix ``mat``."""
    k = mat.shape[0]
    aug = np.concatenate([mat % p, np.eye(k, dtype=np.int64)], axis=1)
    for c in range(k):
        r = c + int(np.flatnonzero(aug[c:, c])[0])
        if r != c:
            aug[[c, r]] = aug[[r, c]]
        aug[c] = aug[c] * pow(int(aug[c, c]), -1, p) % p
        factors = aug[:, c].copy()
        factors[c] = 0
        nz = np.flatnonzero(factors)
        if len(nz):
            aug[nz] = (aug[nz] - np.outer(factors[nz], aug[c]) % p) % p
    return aug[:, k:]


def inverse_mod(mat, field: PrimeField) -> typing.Optional[np.ndarray]:
    """Return the inverse of a square residue matrix, or ``None`` if it is singular."""
    mat = field.reduce(np.asarray(mat, dtype=np.int64))
    if mat.shape[0] != mat.shape[1]:
        raise SizeMismatchException("Cannot invert a %d x %d matrix" % mat.shape)
    if _dense_rank(mat.copy(), field.p) < mat.shape[0]:
        return None
    return _inv_mod(mat, field.p)


def _panel_pivots(panel: np.ndarray, p: int) -> typing.Tuple[np.ndarray, typing.List[int]]:
    """Return a row order putting pivot rows first and the pivot columns of ``panel``."""
    work = panel.copy()
    order = np.arange(work.shape[0])
    pivot_cols = []
    k = 0
    for c in range(work.shape[1]):
        if k == work.shape[0]:
            break
        nz = np.flatnonzero(work[k:, c])
        if not len(nz):
            continue
        r = k + int(nz[0])
        if r != k:
            work[[k, r]] = work[[r, k]]
            order[[k, r]] = order[[r, k]]
        work[k] = work[k] * pow(int(work[k, c]), -1, p) % p
        below = work[k + 1 :, c]
        nzb = np.flatnonzero(below)
        if len(nzb):
            rows = k + 1 + nzb
            work[rows] = (work[rows] - np.outer(below[nzb], work[k]) % p) % p
        pivot_cols.append(c)
        k += 1
    return order, pivot_cols


def _dense_rank(mat: np.ndarray, p: int) -> int:
    """Return the rank of a dense residue matrix by blocked elimination."""
    if mat.shape[0] > mat.shape[1]:
        mat = mat.T
    mat = np.ascontiguousarray(mat, dtype=np.int64)
    rank = 0
    while mat.shape[0] and mat.shape[1]:
        width = min(PANEL_WIDTH, mat.shape[1])
        order, pivot_cols = _panel_pivots(mat[:, :width], p)
        k = len(pivot_cols)
        if not k:
            mat = mat[:, width:]
            continue
        mat = mat[order]
        top, rest = mat[:k], mat[k:]
        factor = matmul_mod(rest[:, pivot_cols], _inv_mod(top[:, pivot_cols], p), p)
        top_tail = top[:, width:]
        chunk = max(1, UPDATE_CHUNK_ENTRIES // max(1, top_tail.shape[1]))
        tail = np.empty((rest.shape[0], top_tail.shape[1]), dtype=np.int64)
        for start in range(0, rest.shape[0], chunk):
            stop = start + chunk
            update = matmul_mod(factor[start:stop], top_tail, p)
            tail[start:stop] = (rest[start:stop, width:] - update) % p
        logger.debug("Panel with %d pivots, %d x %d remaining", k, tail.shape[0], tail.shape[1])
        rank += k
        mat = tail
        # drop rows that became zero
        mat = mat[np.any(mat, axis=1)]
    return rank


def _peel_singletons(csr: sparse.csr_matrix) -> typing.Tuple[int, sparse.csr_matrix]:
    """Remove singleton rows and columns; return the rank found and the remaining matrix."""
    rank = 0
    while True:
        csr = csr[np.diff(csr.indptr) > 0]
        csc = csr.tocsc()
        csr = csc[:, np.diff(csc.indptr) > 0].tocsr()
        if not csr.nnz:
            return rank, csr
        csc = csr.tocsc()
        # a column with one entry pivots on its row; other columns of that row then go empty
        single_cols = np.flatnonzero(np.diff(csc.indptr) == 1)
        if len(single_cols):
            pivot_rows = np.unique(csc.indices[csc.indptr[single_cols]])
            rank += len(pivot_rows)
            keep = np.ones(csr.shape[0], dtype=bool)
            keep[pivot_rows] = False
            csr = csr[keep]
            continue
        single_rows = np.flatnonzero(np.diff(csr.indptr) == 1)
        if len(single_rows):
            pivot_cols = np.unique(csr.indices[csr.indptr[single_rows]])
            rank += len(pivot_cols)
            keep = np.ones(csr.shape[1], dtype=bool)
            keep[pivot_cols] = False
            csr = csc[:, keep].tocsr()
            continue
        return rank, csr


def rank(
    mat: SparseMatrix, field: PrimeField, dense_threshold: int = DEFAULT_DENSE_THRESHOLD
) -> int:
    """Return the exact rank of ``mat`` over ``field``.

    Matrices with at least ``dense_threshold`` columns first go through singleton peeling.
    """
    csr = mat.csr
    peeled = 0
    if min(csr.shape) == 0 or not csr.nnz:
        return 0
    if mat.ncols >= dense_threshold:
        peeled, csr = _peel_singletons(csr)
        logger.debug("Peeled rank %d, %d x %d remaining", peeled, csr.shape[0], csr.shape[1])
        if not csr.nnz:
            return peeled
    return peeled + _dense_rank(csr.toarray().astype(np.int64), field.p)


def kernel_dim(mat: SparseMatrix, field: PrimeField, **kwargs) -> int:
    """Return ``ncols - rank(mat)``."""
    return mat.ncols - rank(mat, field, **kwargs)


def _reduce_rows(rows: np.ndarray, basis: np.ndarray, pivots: typing.List[int], p: int):
    """Return ``rows`` with the pivot columns of the reduced echelon ``basis`` cleared."""
    if not len(pivots) or not rows.shape[0]:
        return rows % p
    return (rows - matmul_mod(rows[:, pivots] % p, basis, p)) % p


class IncrementalSpan:
    """Reduced row echelon basis of a growing set of vectors.

    Basis rows are kept in insertion order; ``pivots[i]`` is the pivot column of row ``i``.
    """

    def __init__(self, ncols: int, field: PrimeField):
        self.ncols = ncols
        self.field = field
        self.pivots: typing.List[int] = []
        self._rows = np.zeros((16, ncols), dtype=np.int64)

    @property
    def dim(self):
        return len(self.pivots)

    @property
    def basis(self) -> np.ndarray:
        return self._rows[: self.dim]

    def _append(self, row: np.ndarray, pivot: int):
        if self.dim == self._rows.shape[0]:
            grow = np.zeros((max(16, self.dim // 4), self.ncols), dtype=np.int64)
            self._rows = np.concatenate([self._rows, grow])
        self._rows[self.dim] = row
        self.pivots.append(pivot)

    def add_dense(self, rows: np.ndarray) -> int:
        """Add dense rows; return the number of new dimensions."""
        rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
        if rows.shape[1] != self.ncols:
            raise SizeMismatchException("Expected %d columns, got %d" % (self.ncols, rows.shape[1]))
        p = self.field.p
        rows = _reduce_rows(rows, self.basis, self.pivots, p)
        rows = rows[np.any(rows, axis=1)]
        before = self.dim
        for row in rows:
            row = _reduce_rows(row[None, :], self.basis, self.pivots, p)[0]
            nz = np.flatnonzero(row)
            if not len(nz):
                continue
            c = int(nz[0])
            row = row * pow(int(row[c]), -1, p) % p
            basis = self.basis
            factors = basis[:, c].copy()
            nzf = np.flatnonzero(factors)
            if len(nzf):
                basis[nzf] = (basis[nzf] - np.outer(factors[nzf], row) % p) % p
            self._append(row, c)
        return self.dim - before

    def add(self, vectors) -> int:
        """Add sparse vectors given as ``(indices, values)`` pairs; return the new dimensions."""
        vectors = list(vectors)
        if not vectors:
            return 0
        dense = np.zeros((len(vectors), self.ncols), dtype=np.int64)
        for i, (indices, values) in enumerate(vectors):
            dense[i, np.asarray(indices, dtype=np.int64)] = self.field.reduce(
                np.asarray(values, dtype=np.int64)
            )
        return self.add_dense(dense)


def rref(mat: np.ndarray, field: PrimeField) -> typing.Tuple[np.ndarray, typing.List[int]]:
    """Return the nonzero rows of the reduced row echelon form of ``mat`` and its pivot columns.

    Rows are ordered by ascending pivot column.
    """
    span = IncrementalSpan(mat.shape[1], field)
    span.add_dense(field.reduce(np.asarray(mat, dtype=np.int64)))
    order = np.argsort(span.pivots, kind="stable")
    return span.basis[order].copy(), [span.pivots[i] for i in order]


def span_dim(vectors, ncols: int, field: PrimeField) -> int:
    """Return the dimension of the span of sparse ``(indices, values)`` vectors."""
    span = IncrementalSpan(ncols, field)
    span.add(vectors)
    return span.dim


def kernel_basis(mat: SparseMatrix, field: PrimeField) -> np.ndarray:
    """Return a basis of the right kernel of ``mat`` as rows."""
    p = field.p
    reduced, pivots = rref(mat.to_dense(), field)
    free = np.setdiff1d(np.arange(mat.ncols), pivots)
    result = np.zeros((len(free), mat.ncols), dtype=np.int64)
    for i, c in enumerate(free):
        result[i, c] = 1
        if pivots:
            result[i, pivots] = (-reduced[:, c]) % p
    return result


def det_mod(rows: typing.Sequence[typing.Sequence[int]], field: PrimeField) -> int:
    """Return the determinant of a small square matrix modulo ``p``."""
    p = field.p
    mat = [[int(v) % p for v in row] for row in rows]
    k = len(mat)
    if any(len(row) != k for row in mat):
        raise SizeMismatchException("Determinant of a non-square matrix")
    det = 1
    for c in range(k):
        r = next((r for r in range(c, k) if mat[r][c]), None)
        if r is None:
            return 0
        if r != c:
            mat[c], mat[r] = mat[r], mat[c]
            det = -det
        det = det * mat[c][c] % p
        inv = pow(mat[c][c], -1, p)
        for r in range(c + 1, k):
            if mat[r][c]:
                f = mat[r][c] * inv % p
                mat[r] = [(a - f * b) % p for a, b in zip(mat[r], mat[c])]
    return det % p


def rank_rational(rows) -> int:
    """Return the rank over the rationals of a small integer matrix."""
    if isinstance(rows, SparseMatrix):
        rows = rows.to_dense().tolist()
    rows = [list(map(int, row)) for row in rows]
    if not rows or not rows[0]:
        return 0
    return sympy.Matrix(rows).rank()
