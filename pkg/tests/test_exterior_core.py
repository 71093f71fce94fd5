import unittest

import numpy as np
from numpy.testing import assert_allclose

from modules.errors import DegreeError, DimensionMismatchError, ValidationError
from modules.exterior_core import (
    Multivector, anti_self_dual_basis, basis_vector, blade, contract, dim_forms, hodge, inner,
    random_form, scalar, self_dual_basis, vector, volume_contractions, volume_form, wedge,
)
from modules.settings import settings


def e(n, *idx):
    return blade(n, idx)


class TestWedge(unittest.TestCase):
    def test_basis_products(self):
        self.assertTrue(wedge(e(4, 1), e(4, 2)).allclose(e(4, 1, 2)))
        self.assertTrue(wedge(e(4, 1), e(4, 1)).allclose(Multivector.zero(4)))
        self.assertTrue((e(4, 1, 2) ^ e(4, 3, 4)).allclose(volume_form(4)))

    def test_blade_sorting_sign(self):
        self.assertTrue(blade(3, (2, 1)).allclose(-e(3, 1, 2)))
        self.assertTrue(blade(3, (1, 1)).allclose(Multivector.zero(3)))

    def test_degree_overflow_is_zero(self):
        self.assertEqual(wedge(e(3, 1, 2), e(3, 2, 3)).grades(), ())

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            wedge(e(3, 1), e(4, 1))

    def test_graded_anticommutativity(self):
        rng = np.random.default_rng(11)
        for n in (4, 5):
            for p in range(n + 1):
                for q in range(n + 1 - p):
                    a, b = random_form(n, p, rng), random_form(n, q, rng)
                    lhs = wedge(a, b)
                    rhs = (-1) ** (p * q) * wedge(b, a)
                    self.assertTrue(lhs.allclose(rhs, atol=1e-12), (n, p, q))

    def test_associativity(self):
        rng = np.random.default_rng(3)
        a, b, c = (random_form(5, 1, rng), random_form(5, 2, rng), random_form(5, 1, rng))
        self.assertTrue(wedge(wedge(a, b), c).allclose(wedge(a, wedge(b, c)), atol=1e-12))


class TestContract(unittest.TestCase):
    def test_examples(self):
        self.assertTrue(contract(e(3, 1), e(3, 1, 2)).allclose(e(3, 2)))
        self.assertTrue(contract(e(3, 2), e(3, 1, 2)).allclose(-e(3, 1)))
        self.assertTrue(contract(e(3, 3), e(3, 1, 2)).allclose(Multivector.zero(3)))
        self.assertTrue(contract(e(3, 1), scalar(3, 2.0)).allclose(Multivector.zero(3)))

    def test_accepts_plain_components(self):
        self.assertTrue(contract([1.0, 0.0, 0.0], e(3, 1, 2)).allclose(e(3, 2)))
        with self.assertRaises(DimensionMismatchError):
            contract([1.0, 0.0], e(3, 1, 2))

    def test_antiderivation(self):
        rng = np.random.default_rng(5)
        n = 5
        for p in range(1, 4):
            for q in range(1, n - p + 1):
                X = random_form(n, 1, rng)
                a, b = random_form(n, p, rng), random_form(n, q, rng)
                lhs = contract(X, wedge(a, b))
                rhs = wedge(contract(X, a), b) + (-1) ** p * wedge(a, contract(X, b))
                self.assertTrue(lhs.allclose(rhs, atol=1e-12))

    def test_contractions_anticommute(self):
        rng = np.random.default_rng(8)
        X, Y, u = random_form(5, 1, rng), random_form(5, 1, rng), random_form(5, 3, rng)
        self.assertTrue(contract(X, contract(Y, u)).allclose(-contract(Y, contract(X, u)), atol=1e-12))

    def test_adjoint_of_wedge(self):
        rng = np.random.default_rng(9)
        for p in range(0, 5):
            X, a, b = random_form(5, 1, rng), random_form(5, p, rng), random_form(5, p + 1, rng)
            self.assertAlmostEqual(inner(wedge(X, a), b), inner(a, contract(X, b)), places=12)


class TestInnerAndHodge(unittest.TestCase):
    def test_inner_examples(self):
        alpha, beta, gamma = self_dual_basis()
        self.assertAlmostEqual(inner(e(4, 1, 2), e(4, 1, 2)), 1.0)
        self.assertAlmostEqual(inner(alpha, alpha), 2.0)
        self.assertAlmostEqual(inner(alpha, beta), 0.0)
        self.assertAlmostEqual(inner(e(4, 1), e(4, 2, 3)), 0.0)
        self.assertAlmostEqual(gamma.norm() ** 2, 2.0)

    def test_hodge_examples(self):
        self.assertTrue(hodge(scalar(4)).allclose(volume_form(4)))
        self.assertTrue(hodge(e(4, 1, 2)).allclose(e(4, 3, 4)))
        for form in self_dual_basis():
            self.assertTrue(hodge(form).allclose(form))
        for form in anti_self_dual_basis():
            self.assertTrue(hodge(form).allclose(-form))

    def test_hodge_rejects_mixed_degrees(self):
        with self.assertRaises(ValidationError):
            hodge(e(4, 1) + e(4, 1, 2))

    def test_hodge_pairing_and_involution(self):
        rng = np.random.default_rng(2)
        for n in (3, 4, 5):
            omega = volume_form(n)
            for p in range(n + 1):
                u, v = random_form(n, p, rng), random_form(n, p, rng)
                self.assertTrue(wedge(u, hodge(v)).allclose(inner(u, v) * omega, atol=1e-12))
                self.assertTrue(hodge(hodge(u)).allclose((-1) ** (p * (n - p)) * u, atol=1e-12))


class TestVolumeContractions(unittest.TestCase):
    def test_dimensions(self):
        self.assertEqual(volume_contractions(4, 4).dim, 1)
        self.assertEqual(volume_contractions(4, 2).dim, 6)
        self.assertEqual(volume_contractions(5, 0).dim, 1)
        for p in range(6):
            self.assertTrue(volume_contractions(5, p).is_full)

    def test_max_dimension(self):
        n = settings["max_dimension"]
        for p in (0, 1, n // 2, n - 1):
            W = volume_contractions(n, p)
            self.assertEqual(W.dim, dim_forms(n, p), p)
            self.assertTrue(W.is_full)

    def test_degree_out_of_range(self):
        with self.assertRaises(DegreeError):
            volume_contractions(4, 5)


class TestMultivector(unittest.TestCase):
    def test_grades_and_parts(self):
        u = e(4, 1) + 2.0 * e(4, 2, 3)
        self.assertEqual(u.grades(), (1, 2))
        self.assertFalse(u.is_homogeneous())
        self.assertTrue(u.grade_part(2).allclose(2.0 * e(4, 2, 3)))
        self.assertIsNone(Multivector.zero(4).grade)
        with self.assertRaises(ValidationError):
            _ = u.grade

    def test_to_dict_labels(self):
        alpha, _, _ = self_dual_basis()
        self.assertEqual(alpha.to_dict(), {"e1^e2": 1.0, "e3^e4": 1.0})

    def test_vector_helpers(self):
        assert_allclose(vector(3, [1, 2, 3]).component(1), [1, 2, 3])
        self.assertTrue(basis_vector(3, 2).allclose(e(3, 2)))
        with self.assertRaises(ValidationError):
            basis_vector(3, 4)

    def test_coefficient_count_checked(self):
        with self.assertRaises(ValidationError):
            Multivector(3, {1: [1.0, 2.0]})
        self.assertEqual(len(Multivector(5).component(2)), dim_forms(5, 2))

    def test_values_are_immutable(self):
        u = e(3, 1, 2)
        with self.assertRaises(ValueError):
            u.component(2)[0] = 5.0


if __name__ == '__main__':
    unittest.main()
