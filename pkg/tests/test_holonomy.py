import unittest

import numpy as np
from numpy.testing import assert_allclose

from modules.curvature_models import (
    constant_curvature, flat, fubini_study, self_dual_weyl4, product, random_curvature, standard_complex_structure,
)
from modules.exterior_core import dim_forms
from modules.form_operators import kahler_ops
from modules.holonomy import (
    check_casimir_kernel, commutant_dim_on_vectors, curvature_invariance_residual, generate, holonomy_of,
    is_kahler, is_symmetric_model, skew_commutant_basis, trivial_summand,
)


class TestGenerate(unittest.TestCase):
    def test_dimensions(self):
        self.assertEqual(holonomy_of(constant_curvature(4, 1.0)).dim, 6)
        self.assertEqual(holonomy_of(constant_curvature(5, -1.0)).dim, 10)
        self.assertEqual(holonomy_of(flat(4)).dim, 0)
        self.assertEqual(holonomy_of(fubini_study(2)).dim, 4)
        self.assertEqual(holonomy_of(self_dual_weyl4()).dim, 3)
        S2xS3 = product(constant_curvature(2, 1.0), constant_curvature(3, 1.0))
        self.assertEqual(holonomy_of(S2xS3).dim, 4)

    def test_closed_under_brackets(self):
        for R in (fubini_study(2), self_dual_weyl4(), random_curvature(4, 5)):
            H = generate(R)
            self.assertLess(H.bracket_residual(), 1e-10, R.label)

    def test_orthonormal_skew_generators(self):
        H = holonomy_of(fubini_study(2))
        assert_allclose(H.basis @ H.basis.T, np.eye(H.dim), atol=1e-12)
        for g in H.matrices():
            assert_allclose(g, -g.T, atol=1e-12)

    def test_contains_complex_structure(self):
        H = holonomy_of(fubini_study(2))
        self.assertTrue(H.contains(standard_complex_structure(2)))
        self.assertFalse(holonomy_of(self_dual_weyl4()).contains(np.diag([1.0, -1.0, 0.0, 0.0])))


class TestInvariantForms(unittest.TestCase):
    def test_sphere_has_only_trivial_degrees(self):
        H = holonomy_of(constant_curvature(4, 1.0))
        dims = [trivial_summand(H, p).dim for p in range(5)]
        self.assertEqual(dims, [1, 0, 0, 0, 1])

    def test_flat_everything_is_invariant(self):
        H = holonomy_of(flat(3))
        for p in range(4):
            self.assertEqual(trivial_summand(H, p).dim, dim_forms(3, p))

    def test_cp2_kahler_form(self):
        H = holonomy_of(fubini_study(2))
        self.assertEqual([trivial_summand(H, p).dim for p in range(5)], [1, 0, 1, 0, 1])
        omega = kahler_ops(standard_complex_structure(2)).kahler_form()
        self.assertLess(trivial_summand(H, 2).outside_residual(omega.component(2)), 1e-10)

    def test_trivial_summand_is_invariant(self):
        H = holonomy_of(fubini_study(2))
        for p in range(5):
            W = trivial_summand(H, p)
            for g in H.rho_generators(p):
                self.assertLess(float(np.abs(g @ W.basis).max(initial=0.0)), 1e-9)

    def test_weyl4_fixes_anti_self_dual_forms(self):
        H = holonomy_of(self_dual_weyl4())
        self.assertEqual(trivial_summand(H, 2).dim, 3)


class TestCommutant(unittest.TestCase):
    def test_irreducibility(self):
        self.assertEqual(commutant_dim_on_vectors(holonomy_of(constant_curvature(4, 1.0))), 1)
        self.assertEqual(commutant_dim_on_vectors(holonomy_of(fubini_study(2))), 2)
        S2xS3 = product(constant_curvature(2, 1.0), constant_curvature(3, 1.0))
        self.assertGreaterEqual(commutant_dim_on_vectors(holonomy_of(S2xS3)), 2)

    def test_skew_commutant(self):
        self.assertEqual(skew_commutant_basis(holonomy_of(constant_curvature(4, 1.0))), [])
        self.assertEqual(len(skew_commutant_basis(holonomy_of(fubini_study(2)))), 1)

    def test_is_kahler(self):
        found, J = is_kahler(holonomy_of(fubini_study(2)), seed=0)
        self.assertTrue(found)
        assert_allclose(J.matrix @ J.matrix, -np.eye(4), atol=1e-10)
        for g in holonomy_of(fubini_study(2)).matrices():
            assert_allclose(J.matrix @ g, g @ J.matrix, atol=1e-10)
        self.assertFalse(is_kahler(holonomy_of(constant_curvature(4, 1.0)), seed=0)[0])
        self.assertFalse(is_kahler(holonomy_of(constant_curvature(3, 1.0)), seed=0)[0])
        self.assertTrue(is_kahler(holonomy_of(flat(4)), seed=0)[0])
        found, J = is_kahler(holonomy_of(flat(2)), seed=0)
        self.assertTrue(found)
        self.assertAlmostEqual(abs(J.matrix[1, 0]), 1.0)

    def test_flat_commutant_is_everything(self):
        self.assertEqual(commutant_dim_on_vectors(holonomy_of(flat(3))), 9)


class TestSymmetricModels(unittest.TestCase):
    def test_symmetric(self):
        for R in (constant_curvature(4, 1.0), fubini_study(2), flat(3),
                  product(constant_curvature(2, 1.0), constant_curvature(3, 1.0))):
            self.assertTrue(is_symmetric_model(R), R.label)
            self.assertLess(curvature_invariance_residual(R), 1e-10)

    def test_not_symmetric(self):
        self.assertFalse(is_symmetric_model(self_dual_weyl4()))
        self.assertFalse(is_symmetric_model(random_curvature(4, 3)))

    def test_casimir_kernel_matches_invariant_forms(self):
        for R in (constant_curvature(4, 1.0), fubini_study(2)):
            for q in range(R.n + 1):
                self.assertLess(check_casimir_kernel(R, None, q), 1e-8, (R.label, q))


if __name__ == '__main__':
    unittest.main()
