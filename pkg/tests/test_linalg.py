import math

import numpy as np
import pytest

from adadenoise import (op_norm, read_matrix_csv, subspace_overlap, svd,
                        write_matrix_csv)


def random_orthogonal(rng, dim):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


class TestSvd:
    def test_identity(self):
        res = svd(np.eye(3))
        np.testing.assert_allclose(res.singular_values, np.ones(3), atol=1e-14)
        np.testing.assert_allclose(res.u, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(res.v, np.eye(3), atol=1e-14)

    def test_diagonal(self):
        res = svd(np.diag([3.0, 2.0, 1.0]))
        np.testing.assert_allclose(res.singular_values, [3.0, 2.0, 1.0],
                                   atol=1e-14)

    def test_reconstruction_oracle(self):
        """u diag(s) v^T reproduces a random 5x4 input entrywise."""
        rng = np.random.default_rng(5)
        a = rng.standard_normal((5, 4))
        res = svd(a)
        np.testing.assert_allclose(res.reconstruct(), a, atol=1e-12)

    def test_factor_invariants(self):
        rng = np.random.default_rng(6)
        for m, n in [(7, 4), (4, 7), (6, 6), (2, 9)]:
            a = rng.standard_normal((m, n))
            res = svd(a)
            p = min(m, n)
            s = res.singular_values
            assert np.all(s >= 0)
            assert np.all(np.diff(s) <= 0), "descending order"
            assert np.linalg.norm(res.u.T @ res.u - np.eye(p), 2) <= 1e-10
            assert np.linalg.norm(res.v.T @ res.v - np.eye(p), 2) <= 1e-10
            rel = (np.linalg.norm(res.reconstruct() - a)
                   / np.linalg.norm(a))
            assert rel <= 1e-8

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            svd(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_orthogonal_invariance_of_spectrum(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((6, 5))
        p = random_orthogonal(rng, 6)
        q = random_orthogonal(rng, 5)
        s1 = svd(a).singular_values
        s2 = svd(p @ a @ q).singular_values
        np.testing.assert_allclose(s1, s2, atol=1e-8)

    def test_weyl_inequality(self):
        """|s_i(A+E) - s_i(A)| <= ||E||_op on random pairs."""
        rng = np.random.default_rng(8)
        for _ in range(100):
            a = rng.standard_normal((6, 5))
            e = 0.3 * rng.standard_normal((6, 5))
            sa = svd(a).singular_values
            sae = svd(a + e).singular_values
            assert np.max(np.abs(sae - sa)) <= op_norm(e) + 1e-10


class TestOpNorm:
    def test_zero_matrix(self):
        assert op_norm(np.zeros((4, 3))) == 0.0

    def test_rank_one(self):
        rng = np.random.default_rng(9)
        u = rng.standard_normal(6)
        u /= np.linalg.norm(u)
        v = rng.standard_normal(4)
        v /= np.linalg.norm(v)
        np.testing.assert_allclose(op_norm(-2.5 * np.outer(u, v)), 2.5,
                                   rtol=1e-12)

    def test_randomized_lower_bound_oracle(self):
        """sup over unit vectors: random probes never exceed the norm and
        come close to attaining it."""
        rng = np.random.default_rng(10)
        a = rng.standard_normal((6, 6))
        norm = op_norm(a)
        best = 0.0
        for _ in range(1000):
            v = rng.standard_normal(6)
            v /= np.linalg.norm(v)
            best = max(best, float(np.linalg.norm(a @ v)))
        assert best <= norm + 1e-6
        assert norm <= best * 1.25


class TestSubspaceOverlap:
    def test_identical_basis(self):
        rng = np.random.default_rng(11)
        q = random_orthogonal(rng, 8)[:, :3]
        np.testing.assert_allclose(subspace_overlap(q, q), 1.0, atol=1e-12)

    def test_orthogonal_complement(self):
        q = np.eye(6)
        assert subspace_overlap(q[:, :2], q[:, 2:4]) == pytest.approx(0.0,
                                                                      abs=1e-14)

    def test_planar_angle(self):
        """1-D case reduces to the plain cosine."""
        theta = 0.3
        a = np.array([[1.0], [0.0], [0.0]])
        b = np.array([[math.cos(theta)], [math.sin(theta)], [0.0]])
        np.testing.assert_allclose(subspace_overlap(a, b), math.cos(theta),
                                   rtol=1e-12)

    def test_symmetry_and_invariances(self):
        rng = np.random.default_rng(12)
        a = random_orthogonal(rng, 9)[:, :3]
        b = random_orthogonal(rng, 9)[:, :3]
        val = subspace_overlap(a, b)
        assert 0.0 <= val <= 1.0 + 1e-10
        assert subspace_overlap(b, a) == pytest.approx(val, abs=1e-12)
        # column sign flips
        flip = a * np.array([1.0, -1.0, 1.0])
        assert subspace_overlap(flip, b) == pytest.approx(val, abs=1e-12)
        # rotation of either basis
        rot = random_orthogonal(rng, 3)
        assert subspace_overlap(a @ rot, b) == pytest.approx(val, abs=1e-10)

    def test_input_validation(self):
        rng = np.random.default_rng(13)
        a = random_orthogonal(rng, 6)[:, :2]
        with pytest.raises(ValueError, match="column-count"):
            subspace_overlap(a, random_orthogonal(rng, 6)[:, :3])
        with pytest.raises(ValueError, match="orthonormal"):
            subspace_overlap(a * 1.5, a)
        with pytest.raises(ValueError, match="row-count"):
            subspace_overlap(a, random_orthogonal(rng, 5)[:, :2])


class TestMatrixCsv:
    def test_round_trip_exact(self, tmp_path):
        """17 significant digits reproduce float64 exactly."""
        rng = np.random.default_rng(14)
        a = rng.standard_normal((5, 7)) * np.logspace(-3, 3, 7)
        path = tmp_path / "mat.csv"
        write_matrix_csv(a, path)
        b = read_matrix_csv(path)
        assert a.shape == b.shape
        assert np.array_equal(a, b)

    def test_format_plain_rows(self, tmp_path):
        path = tmp_path / "m.csv"
        write_matrix_csv(np.array([[1.0, 2.0], [3.0, 4.5]]), path)
        text = path.read_text()
        assert text == "1,2\n3,4.5\n"

    def test_malformed_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3,oops\n")
        with pytest.raises(ValueError, match="malformed"):
            read_matrix_csv(path)
        path.write_text("1,2\n3\n")
        with pytest.raises(ValueError, match="ragged"):
            read_matrix_csv(path)
