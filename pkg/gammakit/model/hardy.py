"""
Symbolic model of pure Gamma_n-isometries on H^2(C^d): the tuple (M_Phi_1, ..., M_Phi_(n-1), M_z) with
Phi_i(z) = A_i + A_(n-i)* z, its admissibility conditions, finite sections, the unitary invariant and the Wold split of
a finite tuple into a Gamma_n-unitary and a finite section of a pure part.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from gammakit.classifiers import contraction_verdict, is_gamma_isometry, is_gamma_unitary
from gammakit.core import DEFAULT_TOL, Budget, Verdict
from gammakit.exceptions import (
    DecompositionError,
    DimensionMismatchError,
    InconsistencyError,
    PreconditionError,
)
from gammakit.model.symbol import MatrixSymbol, SymbolicTuple, symbol_sup, toeplitz_section
from gammakit.operators import MatrixTuple, as_tuple, compress, invariant_defect, opnorm
from gammakit.symmetric import MultiPoly
from gammakit.typing import matrix_to_doc

logger = logging.getLogger(__name__)

# symbol samples on the circle for the pointwise admissibility check
CONDITION_SAMPLES = 16


class SymbolTuple:
    """The parameters A_1, ..., A_(n-1) (square, common dimension d) of a pure Gamma_n-isometry."""

    __slots__ = ("_d", "_A")

    def __init__(self, d: int, A: Sequence) -> None:
        super().__init__()
        mats = []
        for a in A:
            m = np.array(a, dtype=complex)
            if m.shape != (d, d):
                raise DimensionMismatchError("expected %dx%d parameters, got %s" % (d, d, m.shape))
            m.setflags(write=False)
            mats.append(m)
        if d < 1:
            raise ValueError("fiber dimension must be positive")
        self._d = d
        self._A = tuple(mats)

    @property
    def d(self) -> int:
        return self._d

    @property
    def A(self) -> Tuple[np.ndarray, ...]:
        return self._A

    @property
    def n(self) -> int:
        return len(self._A) + 1

    def __getitem__(self, i: int) -> np.ndarray:
        """A_i, one-based."""
        if not 1 <= i <= len(self._A):
            raise IndexError("A_%d does not exist for n=%d" % (i, self.n))
        return self._A[i - 1]

    def conjugate_by(self, unitary) -> "SymbolTuple":
        """(U A_i U*)"""
        u = np.asarray(unitary, dtype=complex)
        return SymbolTuple(self._d, [u @ a @ u.conj().T for a in self._A])

    def adjoints(self) -> List[np.ndarray]:
        return [a.conj().T for a in self._A]

    def to_doc(self) -> dict:
        return {"d": self._d, "A": [matrix_to_doc(a) for a in self._A]}

    def __repr__(self):
        return "SymbolTuple(n=%d, d=%d)" % (self.n, self._d)


class MultiplierTuple(SymbolicTuple):
    """(M_Psi_1, ..., M_Psi_(n-1), M_z) for arbitrary polynomial symbols Psi_i."""

    def __init__(self, symbols: Sequence[MatrixSymbol], d: int = None) -> None:
        super().__init__()
        symbols = list(symbols)
        if d is None:
            if not symbols:
                raise ValueError("fiber dimension needed for an empty symbol list")
            d = symbols[0].d
        for phi in symbols:
            if phi.shape != (d, d):
                raise DimensionMismatchError(
                    "symbol of shape %s in fiber dimension %d" % (phi.shape, d)
                )
        self._symbols = tuple(symbols) + (MatrixSymbol.shift(d),)

    @property
    def symbols(self) -> Tuple[MatrixSymbol, ...]:
        return self._symbols

    def adjoint(self) -> "AdjointModel":
        return AdjointModel(self)

    def to_doc(self) -> dict:
        return {"n": self.n, "d": self.d, "symbols": [phi.to_doc() for phi in self._symbols]}


class ModelTuple(MultiplierTuple):
    """The model (M_Phi_1, ..., M_Phi_(n-1), M_z) with Phi_i(z) = A_i + A_(n-i)* z."""

    def __init__(self, A: SymbolTuple) -> None:
        n = A.n
        symbols = [MatrixSymbol([A[i], A[n - i].conj().T]) for i in range(1, n)]
        super().__init__(symbols, A.d)
        self._params = A

    @property
    def A(self) -> SymbolTuple:
        return self._params

    def to_doc(self) -> dict:
        doc = super().to_doc()
        doc["A"] = self._params.to_doc()["A"]
        return doc

    def __repr__(self):
        return "ModelTuple(n=%d, d=%d)" % (self.n, self.d)


class AdjointModel(SymbolicTuple):
    """The adjoint tuple (M_Phi_1*, ..., M_z*) of a multiplier tuple."""

    def __init__(self, model: MultiplierTuple) -> None:
        super().__init__()
        self._model = model

    @property
    def symbols(self) -> Tuple[MatrixSymbol, ...]:
        return self._model.symbols

    @property
    def is_adjoint(self) -> bool:
        return True

    def adjoint(self) -> MultiplierTuple:
        return self._model

    def __repr__(self):
        return "AdjointModel(%r)" % self._model


class StructuredTuple:
    """A Gamma_n-unitary matrix tuple and a pure model, either of which may be absent, as a direct sum."""

    def __init__(
        self, unitary_part: Optional[MatrixTuple], pure_part: Optional[ModelTuple]
    ) -> None:
        super().__init__()
        if unitary_part is None and pure_part is None:
            raise ValueError("a direct sum needs at least one part")
        if unitary_part is not None and pure_part is not None and unitary_part.n != pure_part.n:
            raise DimensionMismatchError(
                "parts of lengths %d and %d" % (unitary_part.n, pure_part.n)
            )
        self.unitary_part = unitary_part
        self.pure_part = pure_part

    @property
    def n(self) -> int:
        return (self.unitary_part or self.pure_part).n

    def assemble(self, section: int = 3, seed=None) -> MatrixTuple:
        """
        The finite tuple u (+) truncate(p, section). With a ``seed`` the sum is conjugated by a random unitary, so the
        parts are no longer visible in the coordinates.
        """
        parts = []
        if self.unitary_part is not None:
            parts.append(self.unitary_part)
        if self.pure_part is not None:
            parts.append(truncate(self.pure_part, section))

        result = parts[0]
        for part in parts[1:]:
            result = result.direct_sum(part)

        if seed is not None and result.dim > 1:
            w = unitary_group.rvs(result.dim, random_state=np.random.default_rng(seed))
            result = result.conjugate_by(w)
        return result


def check_symbol_conditions(
    A: SymbolTuple,
    tol: float = DEFAULT_TOL,
    budget: Budget = None,
    seed=None,
    samples: int = CONDITION_SAMPLES,
) -> Verdict:
    """
    Admissibility of the parameters of a pure Gamma_n-isometry: [A_i, A_j] = 0 and
    [A_i, A_(n-j)*] = [A_j, A_(n-i)*] for all i, j, and (gamma_i Phi_i(z)) a Gamma_(n-1)-contraction for every z on
    the circle, checked on ``samples`` points. For n = 2 the last condition is ||Phi_1||_inf <= 2, decided through the
    symbol sup norm. A failing commutator identity is named in the certificate.
    """
    budget = budget or Budget()
    n = A.n
    scale = max([1.0] + [opnorm(a) for a in A.A]) ** 2

    defect, certificate = 0.0, None
    for i in range(1, n):
        for j in range(1, n):
            d = opnorm(A[i] @ A[j] - A[j] @ A[i])
            if d > defect:
                defect, certificate = d, "[A_%d, A_%d] = 0" % (i, j)
            lhs = A[i] @ A[n - j].conj().T - A[n - j].conj().T @ A[i]
            rhs = A[j] @ A[n - i].conj().T - A[n - i].conj().T @ A[j]
            d = opnorm(lhs - rhs)
            if d > defect:
                defect, certificate = d, "[A_%d, A_%d*] = [A_%d, A_%d*]" % (i, n - j, j, n - i)

    defect /= scale
    if defect > tol:
        return Verdict.of(defect, tol, certificate, ("commutator identities",))

    if n == 1:
        return Verdict.of(defect, tol)

    model = ModelTuple(A)
    phis = model.symbols[:-1]

    if n == 2:
        norm = symbol_sup(phis[0])
        margin = max(0.0, norm.value / 2 - 1.0)
        if margin > defect:
            return Verdict.of(margin, tol, ("z", norm.argmax), ("sup norm of Phi_1",))
        return Verdict.of(defect, tol)

    zs = np.exp(2j * np.pi * np.arange(samples) / samples)
    stacks = [phi(zs) for phi in phis]
    worst, worst_z, worst_cert = defect, None, None
    for k, z in enumerate(zs):
        point = MatrixTuple([((n - i) / n) * stacks[i - 1][k] for i in range(1, n)])
        verdict = contraction_verdict(point, budget, seed, max(tol, 1e-8))
        if verdict.defect > worst:
            worst, worst_z, worst_cert = verdict.defect, complex(z), verdict.certificate

    diagnostics = ("pointwise contraction on %d samples" % samples,)
    if worst_z is not None and worst > tol:
        return Verdict.of(worst, tol, ("z", worst_z, worst_cert), diagnostics)
    return Verdict.of(worst, tol, None, diagnostics)


def build_pure_isometry(
    A: SymbolTuple, tol: float = DEFAULT_TOL, budget: Budget = None, seed=None, check: bool = True
) -> ModelTuple:
    """
    The model tuple of an admissible parameter tuple. The isometry identities hold coefficientwise by construction.

    :raises PreconditionError: if the admissibility conditions fail
    """
    if check:
        verdict = check_symbol_conditions(A, tol, budget, seed)
        if not verdict.holds:
            raise PreconditionError(
                "symbol-conditions", "parameters are not admissible: %s" % (verdict.certificate,)
            )
    return ModelTuple(A)


def apply_poly(model: SymbolicTuple, q: MultiPoly) -> MatrixSymbol:
    """The symbol of q(M_Phi_1, ..., M_Phi_(n-1), M_z)."""
    if q.n_vars != model.n:
        raise DimensionMismatchError(
            "polynomial in %d variables on a %d-tuple" % (q.n_vars, model.n)
        )
    return q.apply(model.symbols, MatrixSymbol.identity(model.d))


def truncate(model: SymbolicTuple, N: int) -> MatrixTuple:
    """
    Finite section on polynomials of degree <= N: block lower-triangular Toeplitz matrices of size (N + 1) d. The
    section of M_z is nilpotent and loses isometry on the top block.
    """
    if N < 1:
        raise ValueError("section degree must be at least 1")
    return MatrixTuple([toeplitz_section(phi, N) for phi in model.symbols])


def fundamental_invariant(model: ModelTuple, section: int = 2) -> List[np.ndarray]:
    """
    The compressions of S_(n-i)* - S_i S_n* to the constants, i = 1 .. n-1, which are A_(n-1)*, ..., A_1*. Computed
    from the symbols and cross-checked on a finite section, where S_(n-i)* - S_i S_n* = P_0 (x) A_(n-i)* holds exactly.

    :raises InconsistencyError: if the section disagrees with the symbolic result
    """
    n, d = model.n, model.d
    symbolic = [model.symbols[n - i - 1].coefficient(0).conj().T for i in range(1, n)]

    S = truncate(model, max(section, 2))
    size = S.dim // d
    corner = np.zeros((size, size))
    corner[0, 0] = 1.0

    for i in range(1, n):
        full = S[n - i - 1].conj().T - S[i - 1] @ S[-1].conj().T
        expected = np.kron(corner, symbolic[i - 1])
        mismatch = opnorm(full - expected)
        if mismatch > 1e-10 * max(1.0, opnorm(full)):
            raise InconsistencyError(
                "finite section disagrees with the symbols at i=%d (%.3e)" % (i, mismatch)
            )

    return symbolic


def make_direct_sum(
    u: Optional[MatrixTuple], p: Optional[ModelTuple], tol: float = DEFAULT_TOL, seed=None
) -> StructuredTuple:
    """
    :raises PreconditionError: if u is not a Gamma_n-unitary
    """
    if u is not None:
        verdict = is_gamma_unitary(u, tol, seed=seed)
        if not verdict.holds:
            raise PreconditionError("gamma-unitary", "unitary part is not a Gamma_n-unitary")
    return StructuredTuple(u, p)


def wold_decompose(
    t, tol: float = 1e-8, section: int = 3, seed=None
) -> Tuple[Optional[MatrixTuple], Optional[ModelTuple]]:
    """
    Splits a tuple into a Gamma_n-unitary part and a pure part.

    A ``StructuredTuple`` is assembled into one finite tuple first. A finite tuple whose S_n is an isometry is unitary
    and is returned whole after the Gamma_n-isometry checks. Otherwise the unitary part lives on the range of
    S_n^dim, the pure part on its orthogonal complement, which must carry a finite section of a model: its parameters
    are read off the wandering subspace ker S_n* through S_(n-i)* - S_i S_n*.

    :raises DecompositionError: if the input passes neither route
    """
    if isinstance(t, StructuredTuple):
        t = t.assemble(section, seed)
    S = as_tuple(t)
    n, dim = S.n, S.dim
    scale = S.scale()
    sn = S[-1]

    if opnorm(sn.conj().T @ sn - np.eye(dim)) <= tol * scale:
        verdict = is_gamma_isometry(S, tol, seed=seed)
        if not verdict.holds:
            raise DecompositionError(
                "gamma-isometry", "S_n is isometric but %s fails" % (verdict.certificate,)
            )
        return S, None

    power = np.linalg.matrix_power(sn, dim)
    unitary_basis = scipy.linalg.orth(power, rcond=1e-8)
    if unitary_basis.shape[1]:
        pure_basis = scipy.linalg.null_space(unitary_basis.conj().T)
    else:
        pure_basis = np.eye(dim)

    if unitary_basis.shape[1]:
        reducing = max(
            invariant_defect(S, unitary_basis, tol),
            invariant_defect(S.adjoint(), unitary_basis, tol),
        )
        if reducing > tol * scale:
            raise DecompositionError(
                "reducing", "range of S_n^%d is not reducing (%.3e)" % (dim, reducing)
            )

        unitary = compress(S, unitary_basis, tol)
        verdict = is_gamma_unitary(unitary, tol, seed=seed)
        if not verdict.holds:
            raise DecompositionError(
                "gamma-unitary", "unitary part fails: %s" % (verdict.certificate,)
            )
    else:
        unitary = None

    if pure_basis.shape[1] == 0:
        return unitary, None

    pure = compress(S, pure_basis, tol)
    model = _recover_model(pure, tol)
    logger.debug(
        "wold split of dimension %d: unitary %d, pure %d (d=%d)",
        dim,
        dim - pure.dim,
        pure.dim,
        model.d,
    )
    return unitary, model


def _recover_model(pure: MatrixTuple, tol: float) -> ModelTuple:
    n = pure.n
    shift = pure[-1]
    wandering = scipy.linalg.null_space(shift.conj().T, rcond=1e-8)
    d = wandering.shape[1]

    if d == 0 or pure.dim % d:
        raise DecompositionError(
            "pure-part", "wandering subspace of dimension %d in dimension %d" % (d, pure.dim)
        )

    A = []
    for j in range(1, n):
        # A_j* is the corner of S_j* - S_(n-j) S_n*
        difference = pure[j - 1].conj().T - pure[n - j - 1] @ shift.conj().T
        corner = wandering.conj().T @ difference @ wandering
        A.append(corner.conj().T)
    model = ModelTuple(SymbolTuple(d, A))

    # the S_n-orbit of the wandering subspace is a basis in which the pure part is the section
    N = pure.dim // d - 1
    blocks = [wandering]
    for _ in range(N):
        blocks.append(shift @ blocks[-1])
    basis = np.hstack(blocks)

    expected = MatrixTuple([toeplitz_section(phi, N) for phi in model.symbols])
    if opnorm(basis.conj().T @ basis - np.eye(pure.dim)) > tol * 10:
        raise DecompositionError("pure-part", "pure part is not a finite section of a shift")

    rebuilt = MatrixTuple([basis.conj().T @ m @ basis for m in pure])
    mismatch = rebuilt.distance(expected)
    if mismatch > tol * max(1.0, pure.scale()) * 10:
        raise DecompositionError(
            "pure-part", "pure part does not match the recovered model (%.3e)" % mismatch
        )

    return model
