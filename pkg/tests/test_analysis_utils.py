import json
import os
import tempfile
import unittest
from unittest import mock

import numpy as np
from numpy.testing import assert_allclose

from modules.analysis_utils import Subspace, null_space, numerical_rank, orth
from modules.errors import DimensionMismatchError, ValidationError
from modules.metrics import run_sweep, summarize_reports, sweep_jobs
from modules.curvature_models import constant_curvature, flat
from modules.settings import DEFAULT_SETTINGS, load_settings


class TestLinearAlgebra(unittest.TestCase):
    def test_null_space(self):
        a = np.array([[1.0, 1.0, 0.0]])
        ns = null_space(a)
        self.assertEqual(ns.shape, (3, 2))
        assert_allclose(a @ ns, np.zeros((1, 2)), atol=1e-14)
        self.assertEqual(null_space(np.zeros((0, 4))).shape, (4, 4))

    def test_orth_and_rank(self):
        a = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
        self.assertEqual(orth(a).shape, (3, 1))
        self.assertEqual(numerical_rank(a), 1)
        self.assertEqual(numerical_rank(1e-12 * np.eye(3), atol=1e-9), 0)


class TestSubspace(unittest.TestCase):
    def test_span_and_membership(self):
        S = Subspace.span(3, 1, np.array([[1.0, 1.0], [0.0, 0.0], [0.0, 1.0]]))
        self.assertEqual(S.dim, 2)
        self.assertLess(S.outside_residual(np.array([3.0, 0.0, -1.0])), 1e-12)
        self.assertAlmostEqual(S.outside_residual(np.array([0.0, 2.0, 0.0])), 2.0)
        self.assertTrue(Subspace.full(3, 1).contains(S))
        self.assertFalse(S.contains(Subspace.full(3, 1)))

    def test_full_and_zero(self):
        self.assertTrue(Subspace.full(4, 2).is_full)
        self.assertEqual(Subspace.zero(4, 2).dim, 0)
        self.assertEqual(Subspace.zero(4, 2).ambient_dim, 6)
        assert_allclose(Subspace.zero(4, 2).complement_projector(), np.eye(6))

    def test_distance(self):
        a = Subspace.span(2, 1, np.array([1.0, 0.0]))
        b = Subspace.span(2, 1, np.array([0.0, 1.0]))
        self.assertAlmostEqual(a.distance(b), np.sqrt(2.0))
        self.assertTrue(a.equals(Subspace.span(2, 1, np.array([-3.0, 0.0]))))
        with self.assertRaises(DimensionMismatchError):
            a.distance(Subspace.full(3, 1))

    def test_invariance(self):
        S = Subspace.span(3, 1, np.array([1.0, 0.0, 0.0]))
        rotation_12 = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        rotation_23 = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
        self.assertAlmostEqual(S.invariance_residual([rotation_12]), 1.0)
        self.assertEqual(S.invariance_residual([rotation_23]), 0.0)

    def test_rejects_non_orthonormal_basis(self):
        with self.assertRaises(ValidationError):
            Subspace(3, 1, np.array([[2.0], [0.0], [0.0]]))
        with self.assertRaises(DimensionMismatchError):
            Subspace(3, 1, np.eye(2))


class TestSettings(unittest.TestCase):
    def test_file_then_environment(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "config.json")
            with open(path, "w", encoding="utf-8") as f:
                json.dump({"sample_count": 5, "seed": 3}, f)
            with mock.patch.dict(os.environ, {"KILLING_SEED": "11"}):
                config = load_settings(path)
        self.assertEqual(config["sample_count"], 5)
        self.assertEqual(config["seed"], 11)
        self.assertEqual(config["identity_tol"], DEFAULT_SETTINGS["identity_tol"])

    def test_bad_values_are_ignored(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "config.json")
            with open(path, "w", encoding="utf-8") as f:
                f.write("{broken")
            with mock.patch.dict(os.environ, {"KILLING_SAMPLE_COUNT": "beaucoup"}):
                config = load_settings(path)
        self.assertEqual(config["sample_count"], DEFAULT_SETTINGS["sample_count"])


class TestSweepSummary(unittest.TestCase):
    def test_jobs(self):
        jobs = sweep_jobs([constant_curvature(5, 1.0), flat(3)])
        self.assertEqual([(R.label, p) for R, p in jobs], [("sphere:5:1", 2), ("sphere:5:1", 3)])

    def test_summary(self):
        reports = [
            {"model": "a", "p": 2, "branch": "SPACE_FORM", "residuals": {"c1": 1e-14, "r_plus_on_E": 3.0}},
            {"model": "b", "p": 2, "branch": "INCONSISTENT", "residuals": {"c1": 1e-12}},
            {"model": "c", "p": 3, "error": "boom", "code": 2},
        ]
        summary = summarize_reports(reports)
        self.assertEqual(summary["total"], 3)
        self.assertEqual(summary["branches"]["SPACE_FORM"], 1)
        self.assertEqual(summary["branches"]["PARALLEL_ONLY"], 0)
        self.assertEqual(summary["worst_residuals"], {"c1": 1e-12})
        self.assertEqual(summary["inconsistent"], ["b:p=2"])
        self.assertEqual(summary["errors"], [{"model": "c", "p": 3, "error": "boom"}])

    def test_numerical_failure_is_recorded(self):
        def classify(R, p):
            if p == 3:
                raise np.linalg.LinAlgError("SVD did not converge")
            report = mock.Mock()
            report.to_dict.return_value = {"model": R.label, "n": R.n, "p": p, "branch": "SPACE_FORM",
                                           "residuals": {}}
            return report

        with mock.patch("modules.metrics.classify", side_effect=classify):
            reports = run_sweep([constant_curvature(6, 1.0)], workers=2)
        self.assertEqual([r["p"] for r in reports], [2, 3, 4])
        self.assertEqual(reports[1]["code"], 1)
        self.assertIn("LinAlgError", reports[1]["error"])
        summary = summarize_reports(reports)
        self.assertEqual(summary["branches"]["SPACE_FORM"], 2)
        self.assertEqual(len(summary["errors"]), 1)


if __name__ == '__main__':
    unittest.main()
