import unittest

import numpy as np
from numpy.testing import assert_allclose

from modules.curvature_models import (
    constant_curvature, fubini_study, self_dual_weyl4, random_curvature, standard_complex_structure,
)
from modules.errors import DegreeError, DimensionMismatchError, ValidationError
from modules.exterior_core import (
    Multivector, basis_vector, blade, contract, dim_forms, random_form, scalar, self_dual_basis, volume_form,
    wedge,
)
from modules.form_operators import (
    FormOperator, SkewEndo, casimir, check_kahler_identities, curv_action, curvature_endomorphism,
    k1_defect, kahler_ops, r_plus, rho_action, rho_matrix,
)


def random_skew(n, rng):
    a = rng.standard_normal((n, n))
    return a - a.T


class TestSkewEndo(unittest.TestCase):
    def test_from_form_is_contraction(self):
        rng = np.random.default_rng(1)
        omega = random_form(4, 2, rng)
        A = SkewEndo.from_form(omega)
        for i in range(1, 5):
            X = basis_vector(4, i)
            self.assertTrue(A(X).allclose(contract(X, omega)))
        self.assertTrue(A.to_form().allclose(omega))

    def test_rejects_symmetric(self):
        with self.assertRaises(ValidationError):
            SkewEndo(2, np.eye(2))


class TestRho(unittest.TestCase):
    def test_degree_one_is_the_matrix(self):
        A = random_skew(4, np.random.default_rng(2))
        assert_allclose(rho_matrix(A, 4, 1), A, atol=1e-14)
        assert_allclose(rho_matrix(A, 4, 0), np.zeros((1, 1)))

    def test_derivation(self):
        rng = np.random.default_rng(3)
        A = SkewEndo(5, random_skew(5, rng))
        for p, q in ((1, 1), (1, 2), (2, 2)):
            u, v = random_form(5, p, rng), random_form(5, q, rng)
            lhs = rho_action(A, wedge(u, v))
            rhs = wedge(rho_action(A, u), v) + wedge(u, rho_action(A, v))
            self.assertTrue(lhs.allclose(rhs, atol=1e-12))

    def test_lie_homomorphism(self):
        rng = np.random.default_rng(4)
        A, B = random_skew(4, rng), random_skew(4, rng)
        for p in range(5):
            ra, rb = rho_matrix(A, 4, p), rho_matrix(B, 4, p)
            assert_allclose(ra @ rb - rb @ ra, rho_matrix(A @ B - B @ A, 4, p), atol=1e-11)

    def test_self_dual_rotation(self):
        alpha, beta, gamma = self_dual_basis()
        A = SkewEndo.from_form(alpha)
        self.assertTrue(rho_action(A, basis_vector(4, 1)).allclose(basis_vector(4, 2)))
        self.assertTrue(rho_action(A, beta).allclose(2.0 * gamma))
        self.assertTrue(rho_action(A, scalar(4)).allclose(0.0 * scalar(4)))

    def test_volume_form_is_invariant(self):
        A = SkewEndo(4, random_skew(4, np.random.default_rng(5)))
        self.assertTrue(rho_action(A, volume_form(4)).allclose(0.0 * volume_form(4), atol=1e-12))


class TestCurvatureAction(unittest.TestCase):
    def test_sphere_endomorphism(self):
        R = constant_curvature(3, 1.0)
        e1, e2, e3 = (basis_vector(3, i) for i in (1, 2, 3))
        A = curvature_endomorphism(R, e1, e2)
        self.assertTrue(A(e2).allclose(e1))
        self.assertTrue(A(e1).allclose(-e2))
        self.assertTrue(A(e3).allclose(0.0 * e3))
        self.assertTrue(curv_action(R, e1, e2, e2).allclose(e1))

    def test_curv_action_on_two_forms(self):
        R = constant_curvature(3, 1.0)
        e1, e2 = basis_vector(3, 1), basis_vector(3, 2)
        # R_{e1,e2} engendre une rotation du plan (e1, e2) qui fixe e1^e2
        u = blade(3, (1, 2))
        self.assertTrue(curv_action(R, e1, e2, u).allclose(0.0 * u))
        self.assertTrue(curv_action(R, e1, e2, blade(3, (2, 3))).allclose(blade(3, (1, 3))))

    def test_sphere_r_plus(self):
        rng = np.random.default_rng(6)
        R = constant_curvature(5, 1.0)
        for p in range(5):
            X, u = random_form(5, 1, rng), random_form(5, p, rng)
            self.assertTrue(r_plus(R, X, u).allclose(-p * wedge(X, u), atol=1e-12))

    def test_r_plus_vanishes_on_top_degree(self):
        R = random_curvature(4, 1)
        self.assertEqual(r_plus(R, basis_vector(4, 1), volume_form(4)).grades(), ())

    def test_weyl4_r_plus_examples(self):
        R = self_dual_weyl4()
        alpha, beta, gamma = self_dual_basis()
        e1, e2 = basis_vector(4, 1), basis_vector(4, 2)
        lhs = contract(e1, r_plus(R, e2, beta)) - contract(e2, r_plus(R, e1, beta))
        self.assertTrue(lhs.allclose(gamma))
        self.assertTrue(curv_action(R, e1, e2, beta).allclose(-gamma))
        self.assertTrue(curv_action(R, e1, basis_vector(4, 4), beta).allclose(0.0 * beta))


class TestCasimir(unittest.TestCase):
    def test_sphere_eigenvalue(self):
        for n in (3, 4, 5, 6):
            R = constant_curvature(n, 1.0)
            for p in range(n + 1):
                assert_allclose(casimir(R, p).matrix, p * (n - p) * np.eye(dim_forms(n, p)), atol=1e-11)

    def test_degree_one_is_ricci(self):
        for R in (fubini_study(2), random_curvature(5, 9), self_dual_weyl4()):
            assert_allclose(casimir(R, 1).matrix, R.ricci, atol=1e-11)

    def test_symmetric(self):
        R = random_curvature(5, 2)
        for p in range(6):
            self.assertTrue(casimir(R, p).is_symmetric())

    def test_degree_checked(self):
        with self.assertRaises(DegreeError):
            casimir(constant_curvature(3, 1.0), 4)


class TestK1Defect(unittest.TestCase):
    def test_sphere_is_defect_free(self):
        rng = np.random.default_rng(7)
        R = constant_curvature(5, 1.0)
        for p in range(6):
            self.assertLess(k1_defect(R, random_form(5, p, rng)), 1e-11)

    def test_weyl4_beta(self):
        _, beta, _ = self_dual_basis()
        self.assertAlmostEqual(k1_defect(self_dual_weyl4(), beta), np.sqrt(2.0), places=12)


class TestFormOperator(unittest.TestCase):
    def test_call_and_compose(self):
        R = constant_curvature(4, 1.0)
        q2 = casimir(R, 2)
        u = blade(4, (1, 3))
        self.assertTrue(q2(u).allclose(4.0 * u))
        self.assertTrue((q2 @ q2)(u).allclose(16.0 * u))
        with self.assertRaises(DegreeError):
            q2(basis_vector(4, 1))
        with self.assertRaises(DegreeError):
            casimir(R, 1) @ q2

    def test_shape_checked(self):
        with self.assertRaises(DimensionMismatchError):
            FormOperator(3, 1, 1, np.eye(2))


class TestKahler(unittest.TestCase):
    def test_identities(self):
        for m in (1, 2, 3):
            res = check_kahler_identities(kahler_ops(standard_complex_structure(m)))
            for name, value in res.items():
                self.assertLess(value, 1e-11, (m, name))

    def test_kahler_form(self):
        ops = kahler_ops(standard_complex_structure(2))
        omega = ops.kahler_form()
        self.assertAlmostEqual(omega.norm() ** 2, 2.0)
        self.assertTrue(ops.J(2)(omega).allclose(Multivector.zero(4), atol=1e-12))
        self.assertTrue(omega.allclose(-(blade(4, (1, 2)) + blade(4, (3, 4)))))
        assert_allclose((ops.Lam(2) @ ops.L(0)).matrix, [[2.0]], atol=1e-12)

    def test_operators_carry_degrees(self):
        ops = kahler_ops(standard_complex_structure(2))
        for p in range(5):
            self.assertIsInstance(ops.J(p), FormOperator)
            self.assertEqual((ops.L(p).p_in, ops.L(p).p_out), (p, p + 2))
            self.assertEqual((ops.Lam(p).p_in, ops.Lam(p).p_out), (p, p - 2))
        self.assertEqual(ops.L(3).matrix.shape, (0, 4))
        with self.assertRaises(DegreeError):
            ops.L(0) @ ops.L(0)

    def test_lambda_is_adjoint(self):
        rng = np.random.default_rng(12)
        ops = kahler_ops(standard_complex_structure(3))
        for p in range(5):
            a, b = rng.standard_normal(dim_forms(6, p)), rng.standard_normal(dim_forms(6, p + 2))
            self.assertAlmostEqual(float(b @ ops.L(p).matrix @ a), float(a @ ops.Lam(p + 2).matrix @ b), places=10)

    def test_invalid_structure(self):
        with self.assertRaises(ValidationError):
            kahler_ops(np.eye(2))
        with self.assertRaises(ValidationError):
            kahler_ops(np.zeros((3, 3)))


if __name__ == '__main__':
    unittest.main()
