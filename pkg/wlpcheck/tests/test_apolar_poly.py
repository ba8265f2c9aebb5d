import math
from unittest import TestCase

from ..apolar_poly import (
    GradedForm,
    LinearForm,
    annihilates,
    contract,
    general_position_form,
    general_position_scalar,
    hankel_form,
    linear_power,
    mixed_form,
    moment_form,
    monomial_basis,
    multiply,
    pairing_rank,
    power,
)
from ..exceptions import (
    EvenArityException,
    RepeatedNodesException,
    SizeMismatchException,
    ZeroFormException,
)
from . import SetupFieldMixin


class MonomialBasisTest(TestCase):
    """Test the ``monomial_basis()`` function."""

    def testOrder(self):
        """Test the order of the basis monomials"""
        basis = monomial_basis(3, 2)
        self.assertEqual(
            [basis.exponents(i) for i in range(len(basis))],
            [(2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2)],
        )
        self.assertEqual(basis.index_of([(0, 1, 1)]).tolist(), [4])

    def testSizes(self):
        """Test the number of monomials with and without exponent bound"""
        for n in range(1, 6):
            for degree in range(5):
                self.assertEqual(len(monomial_basis(n, degree)), math.comb(n - 1 + degree, degree))
        self.assertEqual(len(monomial_basis(3, 2, bound=1)), 3)
        self.assertEqual(len(monomial_basis(3, -1)), 0)

    def testOutsideBound(self):
        with self.assertRaises(SizeMismatchException):
            monomial_basis(3, 2, bound=1).index_of([(2, 0, 0)])


class GradedFormTest(SetupFieldMixin, TestCase):
    """Test the ``GradedForm`` class and the products of forms."""

    def testCollect(self):
        """Test collecting repeated monomials"""
        p = self.field.p
        form = GradedForm.collect(2, 1, p, [1, 0, 1], [3, 5, p - 3])
        self.assertEqual(form.terms(), {(1, 0): 5})

    def testLinearPower(self):
        form = linear_power(LinearForm([1, 1]), 2, self.field)
        self.assertEqual(form.terms(), {(2, 0): 1, (1, 1): 2, (0, 2): 1})

    def testMultiply(self):
        """Test products and powers of variables"""
        x1 = GradedForm.variable(3, 0, self.field)
        x2 = GradedForm.variable(3, 1, self.field)
        self.assertEqual(multiply(x1, x2).terms(), {(1, 1, 0): 1})
        self.assertEqual(power(x1, 3).terms(), {(3, 0, 0): 1})
        self.assertTrue(multiply(x1, GradedForm.zero(3, 2, self.field)).is_zero())

    def testAddScale(self):
        """Test adding and scaling forms of equal degree"""
        x1 = GradedForm.variable(2, 0, self.field)
        self.assertTrue(x1.add(x1.scale(-1)).is_zero())
        self.assertEqual(x1.add(x1).terms(), {(1, 0): 2})
        with self.assertRaises(SizeMismatchException):
            x1.add(GradedForm.constant(2, 1, self.field))

    def testDenseRoundTrip(self):
        """Test conversion to and from dense coefficient vectors"""
        form = linear_power(LinearForm([1, 2, 3]), 3, self.field)
        self.assertEqual(GradedForm.from_dense(3, 3, form.to_dense(), self.field), form)

    def testZeroLinearForm(self):
        """Test that a linear form without nonzero coefficient is rejected"""
        with self.assertRaises(ZeroFormException):
            LinearForm([0, 0])
        with self.assertRaises(ZeroFormException):
            LinearForm([])


class ContractTest(SetupFieldMixin, TestCase):
    """Test the ``contract()`` and ``annihilates()`` functions."""

    def testDerivative(self):
        """Test contraction by a variable"""
        form = GradedForm.from_terms(2, 2, {(2, 0): 1}, self.field)
        self.assertEqual(contract(LinearForm([1, 0]), 1, form).terms(), {(1, 0): 2})
        self.assertEqual(contract(LinearForm([1, 0]), 2, form).terms(), {(0, 0): 2})
        self.assertTrue(annihilates(LinearForm([0, 1]), 1, form))
        self.assertTrue(annihilates(LinearForm([1, 0]), 3, form))

    def testPowerOnPower(self):
        # (x1 + x2)^2 o (X1 + X2)^2 = 2 * 2^2
        form = linear_power(LinearForm([1, 1]), 2, self.field)
        self.assertEqual(contract(LinearForm([1, 1]), 2, form).terms(), {(0, 0): 8})

    def testMismatch(self):
        with self.assertRaises(SizeMismatchException):
            contract(LinearForm([1, 0, 0]), 1, GradedForm.variable(2, 0, self.field))

    def testLeibniz(self):
        """Test that exponents of annihilating powers add up on products, less one"""
        alphas = self.random_alphas(12, seed=7)
        hankel = hankel_form(5, self.field)
        for i, alpha in enumerate(alphas[:6]):
            linear = mixed_form(5, 2, [alpha, alphas[6 + i]], self.field)
            l = moment_form(5, alpha, self.field)
            self.assertTrue(annihilates(l, 1, linear))
            # l kills the first factor once and the second twice
            self.assertTrue(annihilates(l, 2, multiply(linear, hankel)), alpha)
        cube = power(hankel, 3)
        for alpha in alphas:
            self.assertTrue(annihilates(moment_form(5, alpha, self.field), 4, cube), alpha)


class MomentFormTest(SetupFieldMixin, TestCase):
    """Test the ``moment_form()`` function."""

    def testValues(self):
        """Test points on the moment curve over the integers and modulo p"""
        self.assertEqual(moment_form(3, 2).coeffs, (1, 2, 4))
        self.assertEqual(moment_form(4, 0).coeffs, (1, 0, 0, 0))
        p = self.field.p
        self.assertEqual(moment_form(3, p - 1, self.field).coeffs, (1, p - 1, 1))


class HankelFormTest(SetupFieldMixin, TestCase):
    """Test the ``hankel_form()`` function."""

    def testSmall(self):
        """Test the Hankel forms for one and three variables"""
        p = self.field.p
        self.assertEqual(hankel_form(1, self.field).terms(), {(1,): 1})
        self.assertEqual(hankel_form(3, self.field).terms(), {(1, 0, 1): 1, (0, 2, 0): p - 1})

    def testSquaresAnnihilate(self):
        """Test that squares of points on the moment curve kill the Hankel form"""
        for n in (3, 5, 7, 9):
            form = hankel_form(n, self.field)
            self.assertEqual(form.degree, (n + 1) // 2)
            for alpha in self.random_alphas(24, seed=n):
                self.assertTrue(annihilates(moment_form(n, alpha, self.field), 2, form), (n, alpha))

    def testEqualsMixedForm(self):
        """Test that the Hankel form is the mixed form without nodes"""
        for n in (3, 5):
            expected = hankel_form(n, self.field).terms()
            self.assertEqual(mixed_form(n, (n + 1) // 2, [], self.field).terms(), expected)

    def testEven(self):
        with self.assertRaises(EvenArityException):
            hankel_form(4, self.field)


class MixedFormTest(SetupFieldMixin, TestCase):
    """Test the ``mixed_form()`` function."""

    def testNodesAnnihilateLinearly(self):
        """Test that the nodes kill the mixed form linearly"""
        for n, k in [(3, 1), (5, 2), (6, 2), (7, 3), (9, 2), (11, 4)]:
            alphas = self.random_alphas(n - 2 * k + 1, seed=n)
            form = mixed_form(n, k, alphas, self.field)
            self.assertFalse(form.is_zero())
            self.assertEqual(form.degree, k)
            for alpha in alphas:
                self.assertTrue(annihilates(moment_form(n, alpha, self.field), 1, form), (n, k))

    def testOtherPointsAnnihilateSquared(self):
        """Test that all other points kill the mixed form by their squares only"""
        for n, k in [(5, 2), (7, 3), (9, 2), (11, 4)]:
            count = n - 2 * k + 1
            values = self.random_alphas(count + 50, seed=n + k)
            alphas, betas = values[:count], values[count:]
            form = mixed_form(n, k, alphas, self.field)
            for beta in betas:
                l = moment_form(n, beta, self.field)
                self.assertFalse(annihilates(l, 1, form), (n, k, beta))
                self.assertTrue(annihilates(l, 2, form), (n, k, beta))

    def testErrors(self):
        """Test rejection of repeated nodes and wrong node counts"""
        with self.assertRaises(RepeatedNodesException):
            mixed_form(5, 2, [1, 1], self.field)
        with self.assertRaises(SizeMismatchException):
            mixed_form(5, 2, [1], self.field)
        with self.assertRaises(SizeMismatchException):
            mixed_form(4, 3, [], self.field)


class GeneralPositionFormTest(SetupFieldMixin, TestCase):
    """Test ``general_position_form()`` and ``general_position_scalar()``."""

    def node_sets(self, n, count):
        for seed in range(count):
            yield [a for a in self.random_alphas(n + 1, seed=100 + seed) if a][:n]

    def testAnnihilators(self):
        """Test that squares of the coordinate forms, their sum and the node form kill it"""
        for n in (3, 5):
            for a in self.node_sets(n, 10):
                form = general_position_form(n, a, self.field)
                self.assertEqual(form.degree, (n + 1) // 2)
                self.assertFalse(form.is_zero())
                for i in range(n):
                    unit = LinearForm([int(t == i) for t in range(n)])
                    self.assertTrue(annihilates(unit, 2, form))
                self.assertTrue(annihilates(LinearForm([1] * n), 2, form))
                self.assertTrue(annihilates(LinearForm(a), 2, form))

    def testPermutationSum(self):
        """Test that the determinant and the permutation sum agree up to a nonzero scalar"""
        self.assertEqual(general_position_scalar(3, [2, 3, 5], self.field), 1)
        self.assertNotEqual(general_position_scalar(5, [2, 3, 5, 7, 11], self.field), 0)
        for n in (3, 5):
            for a in self.node_sets(n, 10):
                self.assertNotEqual(general_position_scalar(n, a, self.field), 0, (n, a))

    def testErrors(self):
        with self.assertRaises(EvenArityException):
            general_position_form(4, [1, 2, 3, 4], self.field)
        with self.assertRaises(RepeatedNodesException):
            general_position_form(3, [1, 2, 2], self.field)


class PairingRankTest(SetupFieldMixin, TestCase):
    """Test the ``pairing_rank()`` function."""

    def testPerfect(self):
        """Test that the apolarity pairing is perfect"""
        for n, j in [(2, 3), (3, 2), (4, 3)]:
            self.assertEqual(pairing_rank(n, j, self.field), math.comb(n - 1 + j, j))
