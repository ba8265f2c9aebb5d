from unittest import TestCase

import numpy as np

from ..exact_linalg import (
    IncrementalSpan,
    PrimeField,
    SparseMatrix,
    det_mod,
    inverse_mod,
    kernel_basis,
    kernel_dim,
    matmul_mod,
    rank,
    rank_rational,
    rref,
    span_dim,
)
from ..exceptions import InvalidFieldException, SizeMismatchException
from . import SetupFieldMixin


class PrimeFieldTest(SetupFieldMixin, TestCase):
    """Test the ``PrimeField`` class."""

    def testInvalid(self):
        """Test rejection of moduli that are not suitable primes"""
        for p in (10, 1000003 * 1000033, 2 ** 31 + 11):
            with self.assertRaises(InvalidFieldException):
                PrimeField(p)

    def testReduce(self):
        """Test reduction of negative and large values"""
        p = self.field.p
        self.assertEqual(self.field.reduce(np.array([-1, p, p + 2])).tolist(), [p - 1, 0, 2])
        self.assertEqual(self.field.reduce([2 ** 80]).tolist(), [pow(2, 80, p)])

    def testInv(self):
        """Test modular inverses"""
        for value in (1, 2, 12345, self.field.p - 1):
            self.assertEqual(value * self.field.inv(value) % self.field.p, 1)

    def testStreams(self):
        """Test that seeded streams are reproducible"""
        lhs = self.field.random_elements(7, 10)
        self.assertEqual(lhs.tolist(), self.field.random_elements(7, 10).tolist())
        self.assertNotEqual(lhs.tolist(), self.other_field.random_elements(7, 10).tolist())
        self.assertTrue(np.all(self.field.random_nonzero(7, 1000) > 0))


class SparseMatrixTest(SetupFieldMixin, TestCase):
    """Test the ``SparseMatrix`` class."""

    def testDuplicatesSummed(self):
        """Test that duplicate entries are summed"""
        p = self.field.p
        mat = SparseMatrix.from_coo([0, 0, 1], [1, 1, 0], [p - 1, 1, 3], (2, 2), self.field)
        self.assertEqual(mat.rows(), [[], [(0, 3)]])

    def testRoundTrip(self):
        dense = np.array([[1, 0, 2], [0, 0, 0], [-1, 5, 0]], dtype=np.int64)
        mat = SparseMatrix.from_dense(dense, self.field)
        self.assertEqual(mat.to_dense().tolist(), self.field.reduce(dense).tolist())
        self.assertEqual(mat.transpose().to_dense().tolist(), self.field.reduce(dense.T).tolist())


class MatmulModTest(SetupFieldMixin, TestCase):
    """Test the ``matmul_mod()`` function."""

    def testLargeResidues(self):
        """Test products of residues close to the modulus"""
        p = self.field.p
        lhs = self.field.random_elements(1, 40 * 30).reshape(40, 30)
        rhs = self.field.random_elements(2, 30 * 20).reshape(30, 20)
        expected = (np.array(lhs, dtype=object) @ np.array(rhs, dtype=object)) % p
        self.assertEqual(matmul_mod(lhs, rhs, p).tolist(), expected.tolist())

    def testInverse(self):
        """Test inversion of a small matrix"""
        p = self.field.p
        mat = self.field.random_elements(3, 36).reshape(6, 6)
        inv = inverse_mod(mat, self.field)
        self.assertEqual(matmul_mod(mat, inv, p).tolist(), np.eye(6, dtype=np.int64).tolist())
        self.assertIsNone(inverse_mod(np.zeros((3, 3), dtype=np.int64), self.field))


class RankTest(SetupFieldMixin, TestCase):
    """Test the ``rank()`` and ``kernel_dim()`` functions."""

    def testIdentity(self):
        """Test the rank of identity matrices"""
        mat = SparseMatrix.from_dense(np.eye(5, dtype=np.int64), self.field)
        self.assertEqual(rank(mat, self.field), 5)
        self.assertEqual(kernel_dim(mat, self.field), 0)

    def testZero(self):
        mat = SparseMatrix.from_dense(np.zeros((4, 6), dtype=np.int64), self.field)
        self.assertEqual(rank(mat, self.field), 0)
        empty = SparseMatrix.from_coo([], [], [], (0, 7), self.field)
        self.assertEqual(kernel_dim(empty, self.field), 7)

    def testVandermonde(self):
        """Test the rank of a Vandermonde matrix"""
        nodes = [3, 5, 7, 11]
        mat = SparseMatrix.from_dense(
            np.array([[pow(a, c) for c in range(4)] for a in nodes], dtype=np.int64), self.field
        )
        self.assertEqual(rank(mat, self.field), 4)

    def testRepeatedRow(self):
        """Test that a repeated row does not add to the rank"""
        dense = self.field.random_elements(4, 100).reshape(10, 10)
        dense[3] = dense[7]
        mat = SparseMatrix.from_dense(dense, self.field)
        self.assertGreaterEqual(kernel_dim(mat, self.field), 1)

    def testLowRankProduct(self):
        """Test the rank of a product of thin matrices"""
        p = self.field.p
        lhs = self.field.random_elements(5, 60 * 7).reshape(60, 7)
        rhs = self.field.random_elements(6, 7 * 90).reshape(7, 90)
        mat = SparseMatrix.from_dense(matmul_mod(lhs, rhs, p), self.field)
        self.assertEqual(rank(mat, self.field), 7)
        self.assertEqual(rank(mat.transpose(), self.field), 7)

    def testTransposeAndPermutation(self):
        """Test that transposing and permuting keep the rank"""
        rng = np.random.Generator(np.random.PCG64(11))
        for trial in range(200):
            rows, cols = rng.integers(1, 9, size=2)
            dense = rng.integers(0, 3, size=(rows, cols)).astype(np.int64)
            mat = SparseMatrix.from_dense(dense, self.field)
            expected = rank(mat, self.field)
            self.assertEqual(rank(mat.transpose(), self.field), expected, trial)
            shuffled = dense[rng.permutation(rows)] * rng.integers(1, 5, size=(rows, 1))
            shuffled_mat = SparseMatrix.from_dense(shuffled, self.field)
            self.assertEqual(rank(shuffled_mat, self.field), expected, trial)

    def testSparsePath(self):
        """Test the sparse pre-pass against dense elimination"""
        # bidiagonal, so peeling resolves it completely
        size = 300
        rows, cols, vals = list(range(size)), list(range(size)), [1] * size
        for i in range(size - 1):
            rows.append(i)
            cols.append(i + 1)
            vals.append(2)
        mat = SparseMatrix.from_coo(rows, cols, vals, (size, size), self.field)
        self.assertEqual(rank(mat, self.field, dense_threshold=10), size)
        self.assertEqual(rank(mat, self.field, dense_threshold=10 ** 6), size)
        # two dense blocks next to the band go through elimination after peeling
        block = self.field.random_elements(9, 40 * 40).reshape(40, 40)
        block[39] = block[0]
        dense = np.zeros((340, 340), dtype=np.int64)
        dense[:size, :size] = mat.to_dense()
        dense[size:, size:] = block
        mixed = SparseMatrix.from_dense(dense, self.field)
        self.assertEqual(rank(mixed, self.field, dense_threshold=10), size + 39)

    def testAgreesWithRational(self):
        """Test agreement with the rank over the rationals"""
        rng = np.random.Generator(np.random.PCG64(12))
        dense = rng.integers(-3, 4, size=(6, 8)).astype(np.int64)
        dense[5] = dense[0] + dense[1]
        mat = SparseMatrix.from_dense(dense, self.field)
        self.assertEqual(rank(mat, self.field), rank_rational(dense.tolist()))


class IncrementalSpanTest(SetupFieldMixin, TestCase):
    """Test the ``IncrementalSpan`` class and ``span_dim()``."""

    def testUnitVectors(self):
        """Test spanning unit vectors"""
        vectors = [([0], [1]), ([1], [1]), ([0, 1], [1, 1])]
        self.assertEqual(span_dim(vectors, 3, self.field), 2)
        self.assertEqual(span_dim([], 3, self.field), 0)

    def testRandomInPlane(self):
        vectors = [([0, 1], self.field.random_elements(seed, 2).tolist()) for seed in range(3)]
        self.assertEqual(span_dim(vectors, 2, self.field), 2)

    def testGrowth(self):
        """Test that only independent vectors raise the span"""
        span = IncrementalSpan(50, self.field)
        for seed in range(40):
            self.assertEqual(span.add_dense(self.field.random_elements(seed, 50)), 1)
        self.assertEqual(span.dim, 40)
        self.assertEqual(span.add_dense(span.basis[:5] * 3), 0)

    def testMismatch(self):
        with self.assertRaises(SizeMismatchException):
            IncrementalSpan(4, self.field).add_dense(np.ones((1, 5), dtype=np.int64))

    def testReducedEchelon(self):
        """Test the reduced echelon form of the span"""
        dense = np.array([[0, 2, 4, 1], [1, 1, 1, 1], [1, 3, 5, 2]], dtype=np.int64)
        reduced, pivots = rref(dense, self.field)
        self.assertEqual(pivots, [0, 1])
        self.assertEqual(reduced[:, pivots].tolist(), [[1, 0], [0, 1]])


class KernelBasisTest(SetupFieldMixin, TestCase):
    """Test the ``kernel_basis()`` function."""

    def testKernel(self):
        """Test that the kernel basis is annihilated"""
        p = self.field.p
        dense = self.field.random_elements(8, 4 * 9).reshape(4, 9)
        mat = SparseMatrix.from_dense(dense, self.field)
        basis = kernel_basis(mat, self.field)
        self.assertEqual(basis.shape, (5, 9))
        self.assertFalse(np.any(matmul_mod(dense, basis.T, p)))
        self.assertEqual(span_dim([(np.arange(9), row) for row in basis], 9, self.field), 5)


class DetModTest(SetupFieldMixin, TestCase):
    """Test the ``det_mod()`` function."""

    def testValues(self):
        """Test determinants of small matrices"""
        p = self.field.p
        self.assertEqual(det_mod([[1, 2], [3, 4]], self.field), p - 2)
        self.assertEqual(det_mod([[0, 1], [1, 0]], self.field), p - 1)
        self.assertEqual(det_mod([[1, 2], [2, 4]], self.field), 0)
        # Vandermonde on 0, 1, 2, 3
        self.assertEqual(det_mod([[a ** c for c in range(4)] for a in range(4)], self.field), 12)

    def testNonSquare(self):
        with self.assertRaises(SizeMismatchException):
            det_mod([[1, 2, 3], [4, 5, 6]], self.field)
