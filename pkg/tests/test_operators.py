import numpy as np
import pytest

from gammakit.core import match_distance
from gammakit.exceptions import DimensionMismatchError, PreconditionError
from gammakit.fixtures import random_commuting_unitaries, random_unitary
from gammakit.operators import (
    MatrixTuple,
    commutation_defect,
    compress,
    embed_tuple,
    intertwiners,
    invariant_defect,
    is_normal_tuple,
    joint_diagonalize,
    joint_spectrum,
    poly_apply,
    project_tuple,
    symmetrize_tuple,
)
from gammakit.symmetric import MultiPoly, elementary_symmetric_all, kv_reduced, symmetrize_point

JORDAN = np.array([[0, 1], [0, 0]], dtype=complex)


class TestMatrixTuple:
    def test_dimensions_are_checked(self):
        with pytest.raises(DimensionMismatchError):
            MatrixTuple([np.eye(2), np.eye(3)])
        with pytest.raises(DimensionMismatchError):
            MatrixTuple([np.ones((2, 3))])

    def test_scalar_tuple(self):
        t = MatrixTuple.scalar([3, 1])
        assert t.n == 2
        assert t.dim == 1
        assert t[0][0, 0] == 3

    def test_direct_sum(self):
        a = MatrixTuple.diagonal([[1, 2]])
        b = MatrixTuple.diagonal([[3, 4], [5, 6]])
        c = a.direct_sum(b)
        assert c.dim == 3
        assert np.allclose(np.diag(c[1]), [2, 4, 6])

    def test_matrices_are_read_only(self):
        t = MatrixTuple([np.eye(2)])
        with pytest.raises(ValueError):
            t[0][0, 0] = 5


class TestCommutation:
    def test_examples(self):
        assert commutation_defect(MatrixTuple.diagonal([[1, 2], [3, 4]])) == 0
        n = np.diag([1, 1, 1], k=1)
        assert commutation_defect([n, n @ n]) == 0
        assert commutation_defect([JORDAN, JORDAN.T]) == pytest.approx(1.0)

    def test_normal(self, rng):
        assert is_normal_tuple(random_commuting_unitaries(2, 4, rng)).holds
        assert not is_normal_tuple([JORDAN]).holds
        assert is_normal_tuple(MatrixTuple.diagonal([[1j, 2], [3, 4]])).holds


class TestJointSpectrum:
    def test_diagonal(self):
        t = MatrixTuple([np.diag([0, 1 + 1j]), np.diag([-1, 1j])])
        assert match_distance(joint_spectrum(t), [[0, -1], [1 + 1j, 1j]]) < 1e-12

    def test_identity(self):
        spectrum = joint_spectrum([np.eye(3)] * 2)
        assert len(spectrum) == 3
        assert all(np.allclose(p, [1, 1]) for p in spectrum)

    def test_conjugation_invariance(self, rng):
        for _ in range(20):
            dim = int(rng.integers(1, 13))
            n = int(rng.integers(1, 4))
            # repeated eigenvalues force the recursive refinement
            values = rng.integers(-2, 3, size=(dim, n)) + 1j * rng.integers(-1, 2, size=(dim, n))
            t = MatrixTuple.diagonal(values)
            conjugated = t.conjugate_by(random_unitary(dim, rng))
            assert match_distance(joint_spectrum(conjugated, seed=rng), values) < 1e-8

    def test_eigenbasis(self, rng):
        t = random_commuting_unitaries(3, 5, rng)
        eigvals, q = joint_diagonalize(t, seed=1)
        assert np.allclose(q.conj().T @ q, np.eye(5))
        for k, m in enumerate(t):
            assert np.allclose(q.conj().T @ m @ q, np.diag(eigvals[:, k]), atol=1e-9)

    def test_polynomial_calculus(self, rng):
        t = random_commuting_unitaries(3, 4, rng)
        q = kv_reduced()
        spectrum = joint_spectrum(t)
        image = [[q(p)] for p in spectrum]
        assert match_distance(joint_spectrum([poly_apply(q, t)]), image) < 1e-8

    def test_preconditions(self):
        with pytest.raises(PreconditionError) as e:
            joint_spectrum([JORDAN, JORDAN.T])
        assert e.value.check == "commuting"

        with pytest.raises(PreconditionError) as e:
            joint_spectrum([JORDAN])
        assert e.value.check == "normal"


class TestSymmetrizeTuple:
    def test_examples(self):
        s = symmetrize_tuple([np.eye(2)] * 3)
        assert np.allclose(s[0], 3 * np.eye(2))
        assert np.allclose(s[1], 3 * np.eye(2))
        assert np.allclose(s[2], np.eye(2))

        s = symmetrize_tuple([JORDAN, JORDAN])
        assert np.allclose(s[0], 2 * JORDAN)
        assert np.allclose(s[1], 0)

    def test_diagonal_is_pointwise(self, rng):
        values = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        s = symmetrize_tuple(MatrixTuple.diagonal(values))
        for row in range(4):
            point = symmetrize_point(values[row])
            assert np.allclose([m[row, row] for m in s], point.s)

    def test_non_commuting_warns(self, caplog):
        symmetrize_tuple([JORDAN, JORDAN.T])
        assert "non-commuting" in caplog.text


class TestSubspaces:
    def test_invariant_defect_examples(self):
        upper = np.triu(np.arange(1, 10).reshape(3, 3)).astype(complex)
        swap = np.array([[0, 1], [1, 0]], dtype=complex)
        assert invariant_defect([upper], np.eye(3)) == pytest.approx(0)
        assert invariant_defect([upper], np.eye(3)[:, :1]) == pytest.approx(0)
        assert invariant_defect([swap], np.eye(2)[:, :1]) == pytest.approx(1)

    def test_basis_must_be_orthonormal(self):
        with pytest.raises(PreconditionError):
            invariant_defect([np.eye(2)], np.array([[1.0], [1.0]]))

    def test_compress_diagonal(self):
        t = MatrixTuple.diagonal([[1, 2], [3, 4], [5, 6]])
        c = compress(t, np.eye(3)[:, 1:])
        assert np.allclose(c[0], np.diag([3, 5]))
        assert np.allclose(c[1], np.diag([4, 6]))

    def test_compress_not_invariant(self):
        with pytest.raises(PreconditionError) as e:
            compress([np.array([[0, 1], [1, 0]])], np.eye(2)[:, :1])
        assert e.value.check == "invariant"


class TestMaps:
    def test_project_and_embed_tuple(self):
        s = MatrixTuple.scalar([3, 3, 1])
        assert np.allclose([m[0, 0] for m in project_tuple(s)], [2, 1])
        embedded = embed_tuple(MatrixTuple.scalar([2, 1]), -1)
        assert np.allclose([m[0, 0] for m in embedded], [1, -1, -1])

    def test_poly_apply(self):
        t = MatrixTuple.scalar([3, 3, 1])
        assert poly_apply(kv_reduced(), t)[0, 0] == pytest.approx(-3)
        with pytest.raises(DimensionMismatchError):
            poly_apply(MultiPoly.coordinate(2, 0), t)

    def test_symmetrized_powers(self, rng):
        t = random_commuting_unitaries(3, 3, rng)
        s = symmetrize_tuple(t)
        eigvals, q = joint_diagonalize(t)
        expected = elementary_symmetric_all(eigvals.T)[1:]
        for k in range(3):
            assert np.allclose(q.conj().T @ s[k] @ q, np.diag(expected[k]), atol=1e-9)


class TestIntertwiners:
    def test_unitary_and_shift_have_no_intertwiner(self, rng):
        u = random_commuting_unitaries(1, 3, rng)
        shift = MatrixTuple([np.diag(np.ones(3), k=-1)])
        assert intertwiners(u, shift) == []
        assert intertwiners(shift, u) == []

    def test_similar_tuples(self, rng):
        t = random_commuting_unitaries(2, 3, rng)
        w = random_unitary(3, rng)
        basis = intertwiners(t, t.conjugate_by(w))
        assert basis
        x = basis[0]
        for a, b in zip(t, t.conjugate_by(w)):
            assert np.allclose(x @ a, b @ x, atol=1e-9)
