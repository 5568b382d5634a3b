"""
Invariant subspaces of the model tuple given by inner symbols, and unitary equivalence of pure Gamma_n-isometries
through their parameter tuples.
"""
import logging
from typing import List, Sequence

import numpy as np
import scipy.linalg

from gammakit.classifiers import is_gamma_isometry
from gammakit.core import MAX_RETRIES, Budget, Verdict
from gammakit.exceptions import (
    AnalyticityError,
    DimensionMismatchError,
    InconsistencyError,
    PreconditionError,
    SingularSymbolError,
)
from gammakit.model.hardy import ModelTuple, MultiplierTuple, SymbolTuple, check_symbol_conditions
from gammakit.model.symbol import MatrixSymbol
from gammakit.operators import MatrixTuple, intertwiners, opnorm

logger = logging.getLogger(__name__)

INNER_SAMPLES = 256
MAX_WORDS = 20_000
# condition number above which Theta(z) counts as singular
SINGULAR_COND = 1e12


class InnerSymbol:
    """
    Theta(z) = N(z) / q(z): a matrix polynomial numerator of shape (e_out, e_in) over a scalar polynomial q without
    zeros in the closed disc. Inner means Theta(z)* Theta(z) = I on the circle.
    """

    __slots__ = ("_numerator", "_denominator")

    def __init__(self, numerator: MatrixSymbol, denominator: Sequence[complex] = None) -> None:
        super().__init__()
        if not isinstance(numerator, MatrixSymbol):
            numerator = MatrixSymbol(numerator)
        q = np.array([1.0] if denominator is None else denominator, dtype=complex)
        q = np.trim_zeros(q, "b")
        if q.size == 0:
            raise ValueError("denominator is the zero polynomial")
        if q.size > 1:
            zeros = np.polynomial.polynomial.polyroots(q)
            if np.any(np.abs(zeros) <= 1.0):
                raise ValueError("denominator vanishes in the closed disc")
        q.setflags(write=False)
        self._numerator = numerator
        self._denominator = q

    @classmethod
    def constant(cls, matrix) -> "InnerSymbol":
        return cls(MatrixSymbol.constant(matrix))

    @classmethod
    def shift(cls, d: int) -> "InnerSymbol":
        return cls(MatrixSymbol.shift(d))

    @classmethod
    def diagonal(cls, powers: Sequence[int]) -> "InnerSymbol":
        """diag(z^k_1, ..., z^k_d)"""
        top = max(powers)
        coeffs = np.zeros((top + 1, len(powers), len(powers)), dtype=complex)
        for i, k in enumerate(powers):
            coeffs[k, i, i] = 1.0
        return cls(MatrixSymbol(coeffs))

    @property
    def numerator(self) -> MatrixSymbol:
        return self._numerator

    @property
    def denominator(self) -> np.ndarray:
        return self._denominator

    @property
    def e_in(self) -> int:
        return self._numerator.shape[1]

    @property
    def e_out(self) -> int:
        return self._numerator.shape[0]

    @property
    def is_square(self) -> bool:
        return self.e_in == self.e_out

    @property
    def degree(self) -> int:
        return max(self._numerator.degree, self._denominator.size - 1)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        q = np.polynomial.polynomial.polyval(z, self._denominator)
        return self._numerator(z) / np.asarray(q)[..., None, None]

    def __mul__(self, other):
        if not isinstance(other, InnerSymbol):
            return NotImplemented
        if self.e_in != other.e_out:
            raise DimensionMismatchError(
                "inner symbols of shapes %s and %s" % (self.shape, other.shape)
            )
        return InnerSymbol(
            self._numerator * other.numerator,
            np.polynomial.polynomial.polymul(self._denominator, other.denominator),
        )

    @property
    def shape(self):
        return self.e_out, self.e_in

    def to_doc(self) -> dict:
        doc = self._numerator.to_doc()
        doc["e_in"] = self.e_in
        doc["e_out"] = self.e_out
        if self._denominator.size > 1:
            doc["denominator"] = [[float(c.real), float(c.imag)] for c in self._denominator]
        return doc

    def __repr__(self):
        return "InnerSymbol(e_out=%d, e_in=%d, degree=%d)" % (self.e_out, self.e_in, self.degree)


def blaschke(a: complex, d: int = 1) -> InnerSymbol:
    """b_a(z) I_d with b_a(z) = (z - a) / (1 - conj(a) z), |a| < 1."""
    a = complex(a)
    if abs(a) >= 1:
        raise ValueError("Blaschke zero must lie in the open disc, got %s" % a)
    eye = np.eye(d, dtype=complex)
    return InnerSymbol(MatrixSymbol([-a * eye, eye]), [1.0, -a.conjugate()])


def innerness_defect(theta: InnerSymbol, samples: int = INNER_SAMPLES) -> float:
    """max over sampled z on the circle of ||Theta(z)* Theta(z) - I||."""
    zs = np.exp(2j * np.pi * np.arange(samples) / samples)
    values = theta(zs)
    gram = np.conj(np.swapaxes(values, -1, -2)) @ values - np.eye(theta.e_in)
    return float(np.max(np.linalg.norm(gram, ord=2, axis=(1, 2))))


def _quadrature_size(phi: MatrixSymbol, theta: InnerSymbol) -> int:
    degree = phi.degree + 2 * theta.numerator.degree
    size = 8 * (degree + 1)
    return 1 << (size - 1).bit_length()


def intertwine_solve(
    phi: MatrixSymbol, theta: InnerSymbol, quad_points: int = None, tol: float = 1e-8
) -> MatrixSymbol:
    """
    The analytic Psi with Phi Theta = Theta Psi. Psi(z) = Theta(z)^-1 Phi(z) Theta(z) is sampled on ``quad_points``
    roots of unity (denominators cleared, so only the numerator is inverted) and its Fourier coefficients are
    recovered by FFT. A rectangular Theta is inverted from the left by its pseudo-inverse.

    :raises SingularSymbolError: if Theta is singular at a quadrature node
    :raises AnalyticityError: if Psi has a negative Fourier coefficient above tol
    :raises InconsistencyError: if the recovered Psi misses the intertwining relation by more than tol
    """
    if phi.shape != (theta.e_out, theta.e_out):
        raise DimensionMismatchError(
            "symbol of shape %s against inner symbol %s" % (phi.shape, theta.shape)
        )

    size = quad_points or _quadrature_size(phi, theta)
    zs = np.exp(2j * np.pi * np.arange(size) / size)
    numerator = theta.numerator(zs)
    phi_values = phi(zs)

    cond = np.linalg.cond(numerator)
    if np.any(~np.isfinite(cond)) or np.max(cond) > SINGULAR_COND:
        worst = int(np.argmax(np.where(np.isfinite(cond), cond, np.inf)))
        raise SingularSymbolError("inner symbol is singular at z = %s" % complex(zs[worst]))

    if theta.is_square:
        values = np.linalg.solve(numerator, phi_values @ numerator)
    else:
        values = np.linalg.pinv(numerator) @ phi_values @ numerator

    coeffs = np.fft.fft(values, axis=0) / size
    norms = np.linalg.norm(coeffs, ord=2, axis=(1, 2))
    scale = max([1.0] + [float(np.linalg.norm(c, 2)) for c in phi.coeffs])
    threshold = tol * scale

    half = size // 2
    negative = norms[half:]
    if negative.size and np.max(negative) > threshold:
        k = int(np.argmax(negative))
        raise AnalyticityError(k + half - size, float(negative[k]))

    positive = coeffs[:half].copy()
    positive[norms[:half] <= threshold] = 0
    significant = np.nonzero(norms[:half] > threshold)[0]
    top = int(significant[-1]) if significant.size else 0
    psi = MatrixSymbol(positive[: top + 1])

    residual = intertwine_residual(phi, theta, psi)
    if residual > threshold:
        raise InconsistencyError("intertwining residual %.3e exceeds %.3e" % (residual, threshold))

    logger.debug(
        "intertwining solve on %d nodes: degree %d, residual %.3e", size, psi.degree, residual
    )
    return psi


def intertwine_residual(
    phi: MatrixSymbol, theta: InnerSymbol, psi: MatrixSymbol, samples: int = INNER_SAMPLES
) -> float:
    """max over sampled z on the circle of ||Phi(z) Theta(z) - Theta(z) Psi(z)||."""
    zs = np.exp(2j * np.pi * np.arange(samples) / samples)
    t = theta(zs)
    diff = phi(zs) @ t - t @ psi(zs)
    return float(np.max(np.linalg.norm(diff, ord=2, axis=(1, 2))))


def invariant_subspace_verdict(
    model: ModelTuple, theta: InnerSymbol, tol: float = 1e-8, budget: Budget = None, seed=None
) -> Verdict:
    """
    Whether Theta H^2(E) is invariant under the model tuple. Holds iff every Phi_i Theta = Theta Psi_i has an analytic
    solution and (M_Psi, M_z) is again a pure Gamma_n-isometry; the certificate is then the parameter tuple of the
    restriction. An analyticity failure is certified by the offending symbol, negative degree and coefficient norm.

    :raises PreconditionError: if Theta is not inner
    """
    budget = budget or Budget()
    inner = innerness_defect(theta)
    if inner > tol:
        raise PreconditionError("inner", "Theta is not inner (defect %.3e)" % inner)
    if theta.e_out != model.d:
        raise DimensionMismatchError(
            "inner symbol into dimension %d on a model of dimension %d" % (theta.e_out, model.d)
        )

    diagnostics = ()
    if not theta.is_square:
        diagnostics += ("rectangular Theta: solved with its left inverse on the circle",)

    psis = []
    for i, phi in enumerate(model.symbols[:-1], start=1):
        try:
            psis.append(intertwine_solve(phi, theta, tol=tol))
        except AnalyticityError as e:
            certificate = {"symbol": i, "degree": e.degree, "norm": e.norm}
            return Verdict.of(
                e.norm, tol, certificate, diagnostics + ("Psi_%d is not analytic" % i,)
            )

    restricted = MultiplierTuple(psis, theta.e_in)
    isometry = is_gamma_isometry(restricted, tol, budget.grid, budget, seed)

    params = SymbolTuple(theta.e_in, [psi.coefficient(0) for psi in psis])
    conditions = check_symbol_conditions(params, tol, budget, seed)

    defect = max(isometry.defect, conditions.defect)
    if isometry.holds and conditions.holds:
        return Verdict.of(defect, tol, params, diagnostics)

    certificate = isometry.certificate if not isometry.holds else conditions.certificate
    return Verdict.of(
        defect, tol, certificate, diagnostics + isometry.diagnostics + conditions.diagnostics
    )


def _letters(A: SymbolTuple) -> np.ndarray:
    return np.array(list(A.A) + A.adjoints(), dtype=complex).reshape(-1, A.d, A.d)


def trace_defect(A: SymbolTuple, B: SymbolTuple, word_len: int, max_words: int = MAX_WORDS):
    """
    max over words w of length <= word_len in (A_i, A_i*) of |tr w(A) - tr w(B)| / (1 + scale^len d). Returns the
    defect, the word length actually reached and the number of words compared.
    """
    la, lb = _letters(A), _letters(B)
    if la.shape[0] == 0:
        return 0.0, 0, 0

    scale = max(1.0, max(opnorm(m) for m in la), max(opnorm(m) for m in lb))
    words_a, words_b = la, lb
    defect, reached, count = 0.0, 0, 0

    for length in range(1, word_len + 1):
        if length > 1:
            if words_a.shape[0] * la.shape[0] + count > max_words:
                break
            words_a = np.einsum("wij,ljk->wlik", words_a, la).reshape(-1, A.d, A.d)
            words_b = np.einsum("wij,ljk->wlik", words_b, lb).reshape(-1, B.d, B.d)

        diff = np.abs(np.trace(words_a, axis1=1, axis2=2) - np.trace(words_b, axis1=1, axis2=2))
        defect = max(defect, float(np.max(diff)) / (1 + scale ** length * A.d))
        reached, count = length, count + words_a.shape[0]

    return defect, reached, count


def _witness(A: SymbolTuple, B: SymbolTuple, rng) -> List[np.ndarray]:
    left = MatrixTuple(list(A.A) + A.adjoints())
    right = MatrixTuple(list(B.A) + B.adjoints())
    basis = intertwiners(left, right)
    candidates = []
    for _ in range(MAX_RETRIES if basis else 0):
        c = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        x = sum(ck * xk for ck, xk in zip(c, basis))
        u, _ = scipy.linalg.polar(x)
        candidates.append(u)
    return candidates


def unitary_equiv(
    A: SymbolTuple,
    B: SymbolTuple,
    word_len: int = None,
    tol: float = 1e-8,
    max_words: int = MAX_WORDS,
    seed=None,
) -> Verdict:
    """
    Unitary equivalence of parameter tuples, which decides unitary equivalence of the pure Gamma_n-isometries they
    build. Traces of all words up to ``word_len`` (default min(2 d^2, 8)) are compared first; on a pass a witness U
    with U A_i U* = B_i is recovered from the intertwiners of (A, A*) and (B, B*) by polar decomposition. The verdict
    holds only with a witness; the certificate is U.
    """
    if A.d != B.d or A.n != B.n:
        note = "dimension mismatch: d %d/%d, n %d/%d" % (A.d, B.d, A.n, B.n)
        return Verdict.of(float("inf"), tol, None, (note,))

    d = A.d
    word_len = word_len or min(2 * d * d, 8)
    traces, reached, count = trace_defect(A, B, word_len, max_words)
    diagnostics = ("trace words up to length %d (%d words)" % (reached, count),)
    if reached < word_len:
        diagnostics += ("word length capped at %d of %d" % (reached, word_len),)

    if traces > tol:
        return Verdict.of(traces, tol, None, diagnostics + ("trace mismatch",))

    if A.n == 1:
        return Verdict.of(traces, tol, np.eye(d), diagnostics)

    scale = max([1.0] + [opnorm(a) for a in A.A])
    rng = np.random.default_rng(seed)
    best, best_u = float("inf"), None
    for u in _witness(A, B, rng):
        residual = max(opnorm(u @ a @ u.conj().T - b) for a, b in zip(A.A, B.A)) / scale
        if residual < best:
            best, best_u = residual, u
        if residual <= tol:
            break

    if best_u is None or best > tol:
        logger.debug("traces agree but no witness found (best residual %s)", best)
        return Verdict(
            False, max(traces, best), None, diagnostics + ("traces-pass, witness-unresolved",)
        )

    return Verdict.of(
        max(traces, best), tol, best_u, diagnostics + ("witness residual %.3e" % best,)
    )
