"""
Finite-dimensional linear algebra of commuting matrix tuples: commutation and normality checks, joint
diagonalization, symmetrization, invariant subspaces and compressions, intertwiners.
"""
import logging
from typing import List, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.cluster.hierarchy import fcluster, linkage

from gammakit.core import (
    CLUSTER_TOL,
    COMMUTING_TOL,
    DEFAULT_TOL,
    MAX_RETRIES,
    CPoint,
    Verdict,
    as_cpoint,
)
from gammakit.exceptions import ConvergenceError, DimensionMismatchError, PreconditionError
from gammakit.symmetric import MultiPoly
from gammakit.typing import matrix_to_doc

logger = logging.getLogger(__name__)


class MatrixTuple:
    """
    An immutable tuple of square complex matrices of a common dimension, standing in for a commuting operator tuple.
    """

    __slots__ = ("_mats",)

    def __init__(self, mats) -> None:
        super().__init__()
        if isinstance(mats, MatrixTuple):
            mats = mats.mats

        arrays = []
        for m in mats:
            a = np.array(m, dtype=complex)
            if a.ndim == 0:
                a = a.reshape(1, 1)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise DimensionMismatchError("expected square matrices, got shape %s" % (a.shape,))
            if not np.all(np.isfinite(a)):
                raise ValueError("matrix has non-finite entries")
            a.setflags(write=False)
            arrays.append(a)

        if not arrays:
            raise ValueError("a matrix tuple needs at least one matrix")

        dims = {a.shape[0] for a in arrays}
        if len(dims) != 1:
            raise DimensionMismatchError("matrices of different dimensions: %s" % sorted(dims))

        self._mats = tuple(arrays)

    @classmethod
    def scalar(cls, point) -> "MatrixTuple":
        """1x1 tuple for a point, so that point tests and operator tests share one code path."""
        return cls([[[v]] for v in as_cpoint(point)])

    @classmethod
    def diagonal(cls, points) -> "MatrixTuple":
        """Diagonal tuple whose joint eigenvalues are the rows of ``points``."""
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        return cls([np.diag(points[:, i]) for i in range(points.shape[1])])

    @property
    def mats(self) -> Tuple[np.ndarray, ...]:
        return self._mats

    @property
    def n(self) -> int:
        return len(self._mats)

    @property
    def dim(self) -> int:
        return self._mats[0].shape[0]

    def __len__(self):
        return self.n

    def __getitem__(self, item):
        return self._mats[item]

    def __iter__(self):
        return iter(self._mats)

    def adjoint(self) -> "MatrixTuple":
        return MatrixTuple([m.conj().T for m in self._mats])

    def conjugate_by(self, unitary) -> "MatrixTuple":
        """(U T_i U*)"""
        u = np.asarray(unitary, dtype=complex)
        return MatrixTuple([u @ m @ u.conj().T for m in self._mats])

    def scaled(self, factors) -> "MatrixTuple":
        factors = np.broadcast_to(np.asarray(factors, dtype=complex), (self.n,))
        return MatrixTuple([f * m for f, m in zip(factors, self._mats)])

    def direct_sum(self, other: "MatrixTuple") -> "MatrixTuple":
        if other.n != self.n:
            raise DimensionMismatchError(
                "cannot add tuples of lengths %d and %d" % (self.n, other.n)
            )
        return MatrixTuple([scipy.linalg.block_diag(a, b) for a, b in zip(self._mats, other.mats)])

    def norms(self) -> np.ndarray:
        return np.array([np.linalg.norm(m, 2) for m in self._mats])

    def scale(self) -> float:
        return max(1.0, float(np.max(self.norms())))

    def distance(self, other: "MatrixTuple") -> float:
        if other.n != self.n or other.dim != self.dim:
            return float("inf")
        return max(float(np.linalg.norm(a - b, 2)) for a, b in zip(self._mats, other.mats))

    def to_doc(self) -> dict:
        return {"n": self.n, "mats": [matrix_to_doc(m) for m in self._mats]}

    def __repr__(self):
        return "MatrixTuple(n=%d, dim=%d)" % (self.n, self.dim)


def as_tuple(T) -> MatrixTuple:
    return T if isinstance(T, MatrixTuple) else MatrixTuple(T)


def opnorm(m) -> float:
    return float(np.linalg.norm(m, 2))


def commutation_defect(T) -> float:
    """max over i < j of ||T_i T_j - T_j T_i||."""
    T = as_tuple(T)
    defect = 0.0
    for i in range(T.n):
        for j in range(i + 1, T.n):
            defect = max(defect, opnorm(T[i] @ T[j] - T[j] @ T[i]))
    return defect


def is_commuting(T, tol: float = COMMUTING_TOL) -> bool:
    T = as_tuple(T)
    return commutation_defect(T) <= tol * T.scale()


def is_normal_tuple(T, tol: float = DEFAULT_TOL) -> Verdict:
    """Every T_i normal: max_i ||T_i T_i* - T_i* T_i|| <= tol. The certificate is the index of the worst entry."""
    T = as_tuple(T)
    defects = [opnorm(m @ m.conj().T - m.conj().T @ m) for m in T]
    worst = int(np.argmax(defects))
    return Verdict.of(defects[worst], tol, worst if defects[worst] > tol else None)


def _cluster(values: np.ndarray, threshold: float) -> np.ndarray:
    if values.size == 1:
        return np.ones(1, dtype=int)
    points = np.column_stack([values.real, values.imag])
    return fcluster(linkage(points, method="single"), t=threshold, criterion="distance")


def _is_scalar_block(T: MatrixTuple, basis: np.ndarray, tol: float) -> bool:
    k = basis.shape[1]
    for m in T:
        block = basis.conj().T @ m @ basis
        if opnorm(block - np.trace(block) / k * np.eye(k)) > tol:
            return False
    return True


def joint_diagonalize(
    T, tol: float = DEFAULT_TOL, seed=None, retries: int = MAX_RETRIES
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Simultaneous diagonalization of a commuting tuple of normal matrices. A random real combination of the T_i is
    brought to Schur form; eigenvalue clusters closer than the cluster tolerance are refined recursively with fresh
    combinations until every T_i acts as a scalar on every block.

    :return: (eigvals, Q) with eigvals of shape (dim, n), row j being the joint eigenvalue on column j of the unitary Q
    :raises PreconditionError: if the tuple is not commuting or not normal
    :raises ConvergenceError: if a block cannot be split within ``retries`` fresh combinations
    """
    T = as_tuple(T)
    scale = T.scale()

    if commutation_defect(T) > COMMUTING_TOL * scale:
        raise PreconditionError("commuting", "tuple does not commute")
    normal = is_normal_tuple(T, max(tol, COMMUTING_TOL) * scale)
    if not normal.holds:
        raise PreconditionError("normal", "T_%d is not normal" % (normal.certificate + 1))

    rng = np.random.default_rng(seed)
    block_tol = CLUSTER_TOL * scale

    def split(basis: np.ndarray, depth: int) -> List[np.ndarray]:
        if basis.shape[1] == 1 or _is_scalar_block(T, basis, block_tol):
            return [basis]

        for attempt in range(retries):
            c = rng.standard_normal(T.n)
            combination = sum(ci * (basis.conj().T @ m @ basis) for ci, m in zip(c, T))
            schur, z = scipy.linalg.schur(combination, output="complex")
            labels = _cluster(np.diag(schur), block_tol * float(np.sum(np.abs(c))))

            if len(set(labels)) > 1:
                rotated = basis @ z
                blocks = []
                for label in sorted(set(labels)):
                    blocks.extend(split(rotated[:, labels == label], depth + 1))
                return blocks

            logger.debug("combination %d did not split a block of size %d", attempt, basis.shape[1])

        raise ConvergenceError(
            "could not split a joint eigenspace of dimension %d after %d retries"
            % (basis.shape[1], retries)
        )

    blocks = split(np.eye(T.dim, dtype=complex), 0)
    q = np.column_stack(blocks)

    diagonals = [q.conj().T @ m @ q for m in T]
    eigvals = np.column_stack([np.diag(d) for d in diagonals])
    residual = max(opnorm(d - np.diag(np.diag(d))) for d in diagonals)
    if residual > block_tol * T.dim:
        raise ConvergenceError("joint diagonalization left off-diagonal mass %.3e" % residual)

    return eigvals, q


def joint_spectrum(T, tol: float = DEFAULT_TOL, seed=None) -> List[CPoint]:
    """The joint eigenvalues of a commuting normal tuple, with multiplicity."""
    eigvals, _ = joint_diagonalize(T, tol, seed)
    return [row.copy() for row in eigvals]


def symmetrize_tuple(T) -> MatrixTuple:
    """
    (s_1(T), ..., s_n(T)) from the product recurrence prod(I + t T_i). Non-commuting input is accepted with a warning;
    the result then depends on the order of the factors.
    """
    T = as_tuple(T)
    if commutation_defect(T) > COMMUTING_TOL * T.scale():
        logger.warning("symmetrizing a non-commuting tuple, result depends on the factor order")

    e = [np.eye(T.dim, dtype=complex)] + [np.zeros((T.dim, T.dim), dtype=complex)] * T.n
    for i, m in enumerate(T):
        for k in range(i + 1, 0, -1):
            e[k] = e[k] + m @ e[k - 1]
    return MatrixTuple(e[1:])


def _check_basis(basis, dim: int, tol: float) -> np.ndarray:
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim == 1:
        basis = basis[:, None]
    if basis.shape[0] != dim:
        raise DimensionMismatchError(
            "basis vectors of length %d for dimension %d" % (basis.shape[0], dim)
        )
    gram = basis.conj().T @ basis
    if opnorm(gram - np.eye(basis.shape[1])) > max(tol, 1e-8):
        raise PreconditionError("orthonormal", "basis is not orthonormal")
    return basis


def invariant_defect(T, basis, tol: float = DEFAULT_TOL) -> float:
    """max_i ||(I - P) T_i P|| for the orthogonal projection P onto the span of ``basis``."""
    T = as_tuple(T)
    b = _check_basis(basis, T.dim, tol)
    complement = np.eye(T.dim) - b @ b.conj().T
    return max(opnorm(complement @ m @ b) for m in T)


def compress(T, basis, tol: float = DEFAULT_TOL) -> MatrixTuple:
    """(B* T_i B), the restriction to an invariant subspace in the coordinates of its orthonormal basis B."""
    T = as_tuple(T)
    b = _check_basis(basis, T.dim, tol)
    defect = invariant_defect(T, b, tol)
    if defect > tol * T.scale():
        raise PreconditionError("invariant", "subspace is not invariant (defect %.3e)" % defect)
    return MatrixTuple([b.conj().T @ m @ b for m in T])


def poly_apply(q: MultiPoly, T) -> np.ndarray:
    """q(T_1, ..., T_n) for a commuting tuple."""
    T = as_tuple(T)
    if q.n_vars != T.n:
        raise DimensionMismatchError("polynomial in %d variables on a %d-tuple" % (q.n_vars, T.n))
    return q.apply(T.mats, np.eye(T.dim, dtype=complex), np.matmul)


def project_tuple(S) -> MatrixTuple:
    """(gamma_1 S_1, ..., gamma_(n-1) S_(n-1)) with gamma_i = (n - i) / n."""
    S = as_tuple(S)
    n = S.n
    if n < 2:
        raise DimensionMismatchError("projection needs n >= 2")
    return MatrixTuple([(n - i) / n * S[i - 1] for i in range(1, n)])


def embed_tuple(S, alpha: complex) -> MatrixTuple:
    """(alpha I + S_1, alpha S_1 + S_2, ..., alpha S_(n-1) + S_n, alpha S_n)."""
    S = as_tuple(S)
    alpha = complex(alpha)
    zero = np.zeros((S.dim, S.dim), dtype=complex)
    full = [np.eye(S.dim, dtype=complex)] + list(S.mats) + [zero]
    return MatrixTuple([alpha * full[j - 1] + full[j] for j in range(1, S.n + 2)])


def intertwiners(A, B, rcond: float = 1e-10) -> List[np.ndarray]:
    """
    An orthonormal (Frobenius) basis of {X : X A_i = B_i X for all i}, with X of shape (dim B, dim A). Solved as the
    null space of the stacked Kronecker systems (A_i^T (x) I - I (x) B_i) vec X = 0, vec being column-major.
    """
    A = as_tuple(A)
    B = as_tuple(B)
    if A.n != B.n:
        raise DimensionMismatchError("tuples of lengths %d and %d" % (A.n, B.n))

    a, b = A.dim, B.dim
    system = np.vstack(
        [np.kron(ai.T, np.eye(b)) - np.kron(np.eye(a), bi) for ai, bi in zip(A, B)]
    )
    kernel = scipy.linalg.null_space(system, rcond=rcond)
    return [kernel[:, k].reshape((b, a), order="F") for k in range(kernel.shape[1])]
