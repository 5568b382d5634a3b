"""
Matrix-polynomial symbols Phi(z) = sum_k C_k z^k of analytic Toeplitz operators on vector-valued Hardy space, their
arithmetic, sup norms over the circle and finite sections.
"""
import abc
import logging
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from gammakit.exceptions import DimensionMismatchError
from gammakit.typing import matrix_to_doc

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 256


class MatrixSymbol:
    """
    Polynomial symbol with (r x c) matrix coefficients C_0, ..., C_K, stored as a read-only (K + 1, r, c) array.
    Trailing zero coefficients are trimmed; the zero symbol keeps a single zero coefficient.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs) -> None:
        super().__init__()
        c = np.array(coeffs, dtype=complex)
        if c.ndim == 2:
            c = c[None, :, :]
        if c.ndim != 3 or c.shape[0] == 0:
            raise DimensionMismatchError("symbol coefficients must be a non-empty list of matrices")
        if not np.all(np.isfinite(c)):
            raise ValueError("symbol has non-finite coefficients")

        last = c.shape[0] - 1
        while last > 0 and not np.any(c[last]):
            last -= 1
        c = c[: last + 1].copy()
        c.setflags(write=False)
        self._coeffs = c

    @classmethod
    def constant(cls, matrix) -> "MatrixSymbol":
        return cls([matrix])

    @classmethod
    def identity(cls, d: int) -> "MatrixSymbol":
        return cls([np.eye(d)])

    @classmethod
    def shift(cls, d: int) -> "MatrixSymbol":
        """z I"""
        return cls([np.zeros((d, d)), np.eye(d)])

    @classmethod
    def zero(cls, rows: int, cols: int = None) -> "MatrixSymbol":
        return cls([np.zeros((rows, rows if cols is None else cols))])

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def degree(self) -> int:
        return self._coeffs.shape[0] - 1

    @property
    def shape(self) -> Tuple[int, int]:
        return self._coeffs.shape[1], self._coeffs.shape[2]

    @property
    def d(self) -> int:
        rows, cols = self.shape
        if rows != cols:
            raise DimensionMismatchError("rectangular symbol has no fiber dimension")
        return rows

    def coefficient(self, k: int) -> np.ndarray:
        if 0 <= k <= self.degree:
            return self._coeffs[k]
        return np.zeros(self.shape, dtype=complex)

    def is_zero(self) -> bool:
        return not np.any(self._coeffs)

    def _padded(self, length: int) -> np.ndarray:
        pad = length - self._coeffs.shape[0]
        if pad <= 0:
            return self._coeffs
        return np.concatenate([self._coeffs, np.zeros((pad,) + self.shape, dtype=complex)])

    def __add__(self, other):
        if not isinstance(other, MatrixSymbol):
            return NotImplemented
        if other.shape != self.shape:
            raise DimensionMismatchError("symbols of shapes %s and %s" % (self.shape, other.shape))
        length = max(self._coeffs.shape[0], other.coeffs.shape[0])
        return MatrixSymbol(self._padded(length) + other._padded(length))

    def __neg__(self):
        return MatrixSymbol(-self._coeffs)

    def __sub__(self, other):
        if not isinstance(other, MatrixSymbol):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, MatrixSymbol):
            if self.shape[1] != other.shape[0]:
                raise DimensionMismatchError(
                    "symbols of shapes %s and %s" % (self.shape, other.shape)
                )
            a, b = self._coeffs, other.coeffs
            product = np.zeros(
                (a.shape[0] + b.shape[0] - 1, self.shape[0], other.shape[1]), dtype=complex
            )
            for i in range(a.shape[0]):
                product[i : i + b.shape[0]] += np.einsum("ij,kjl->kil", a[i], b)
            return MatrixSymbol(product)

        return MatrixSymbol(complex(other) * self._coeffs)

    def __rmul__(self, other):
        return MatrixSymbol(complex(other) * self._coeffs)

    def __call__(self, z):
        """Phi(z) for a scalar z (a matrix) or an array of points (a stack of matrices)."""
        z = np.asarray(z, dtype=complex)
        w = z[..., None, None]
        result = np.broadcast_to(self._coeffs[-1], z.shape + self.shape).astype(complex)
        for k in range(self.degree - 1, -1, -1):
            result = result * w + self._coeffs[k]
        return result

    def __eq__(self, other):
        if not isinstance(other, MatrixSymbol):
            return NotImplemented
        if self._coeffs.shape != other.coeffs.shape:
            return False
        return bool(np.all(self._coeffs == other.coeffs))

    def __hash__(self):
        return hash((self._coeffs.shape, self._coeffs.tobytes()))

    def distance(self, other: "MatrixSymbol") -> float:
        """Largest coefficient difference in operator norm."""
        if other.shape != self.shape:
            return float("inf")
        length = max(self._coeffs.shape[0], other.coeffs.shape[0])
        diff = self._padded(length) - other._padded(length)
        return max(float(np.linalg.norm(c, 2)) for c in diff)

    def isclose(self, other: "MatrixSymbol", tol: float = 1e-10) -> bool:
        return self.distance(other) <= tol

    def conjugate_by(self, unitary) -> "MatrixSymbol":
        """U* Phi U"""
        u = np.asarray(unitary, dtype=complex)
        return MatrixSymbol(np.einsum("ji,kjl,lm->kim", u.conj(), self._coeffs, u))

    def to_doc(self) -> dict:
        rows, cols = self.shape
        doc = {"d": rows} if rows == cols else {"rows": rows, "cols": cols}
        doc["coeffs"] = [matrix_to_doc(c) for c in self._coeffs]
        return doc

    def __repr__(self):
        return "MatrixSymbol(shape=%s, degree=%d)" % (self.shape, self.degree)


def symbol_mul(phi: MatrixSymbol, psi: MatrixSymbol) -> MatrixSymbol:
    return phi * psi


def symbol_add(phi: MatrixSymbol, psi: MatrixSymbol) -> MatrixSymbol:
    return phi + psi


def symbol_scale(phi: MatrixSymbol, factor: complex) -> MatrixSymbol:
    return complex(factor) * phi


class SymbolNorm(NamedTuple):
    value: float
    argmax: complex
    samples: int
    # bound on sup - value from the derivative of Phi: sum_k k ||C_k|| * pi / samples
    certified_error: float


def _norm_at(phi: MatrixSymbol, theta: float) -> float:
    return float(np.linalg.norm(phi(np.exp(1j * theta)), 2))


def symbol_sup(
    phi: MatrixSymbol, samples: int = DEFAULT_SAMPLES, refine: bool = True
) -> SymbolNorm:
    """
    max over the circle of ||Phi(z)||: uniform samples followed by bounded scalar refinement around the best ones.
    """
    if samples < 1:
        raise ValueError("need at least one sample")

    thetas = 2 * np.pi * np.arange(samples) / samples
    values = np.linalg.norm(phi(np.exp(1j * thetas)), ord=2, axis=(1, 2))

    best = int(np.argmax(values))
    value, theta = float(values[best]), float(thetas[best])

    if refine and phi.degree > 0:
        step = 2 * np.pi / samples
        for seed in np.argsort(values)[::-1][:3]:
            center = thetas[seed]
            res = minimize_scalar(
                lambda t: -_norm_at(phi, t),
                bounds=(center - step, center + step),
                method="bounded",
                options={"xatol": 1e-12},
            )
            if -res.fun > value:
                value, theta = float(-res.fun), float(res.x)

    bound = sum(k * float(np.linalg.norm(c, 2)) for k, c in enumerate(phi.coeffs)) * np.pi / samples
    return SymbolNorm(value, complex(np.exp(1j * theta)), samples, bound)


def symbol_sup_norm(
    phi: MatrixSymbol, samples: int = DEFAULT_SAMPLES, refine: bool = True
) -> float:
    """||Phi||_inf over the circle, which is the operator norm of the analytic Toeplitz operator M_Phi."""
    return symbol_sup(phi, samples, refine).value


def toeplitz_section(phi: MatrixSymbol, N: int) -> np.ndarray:
    """
    The compression of M_Phi to polynomials of degree <= N: block lower-triangular Toeplitz with block (r, c) equal to
    C_(r - c).
    """
    if N < 0:
        raise ValueError("section degree must be non-negative")
    rows, cols = phi.shape
    out = np.zeros(((N + 1) * rows, (N + 1) * cols), dtype=complex)
    for k in range(min(phi.degree, N) + 1):
        out += np.kron(np.eye(N + 1, k=-k), phi.coeffs[k])
    return out


class SymbolicTuple(abc.ABC):
    """
    A tuple of operators on H^2(C^d) given by polynomial symbols: either the multiplication operators
    (M_Phi_1, ..., M_Phi_n) or, when ``is_adjoint`` is set, their adjoints.
    """

    @property
    def n(self) -> int:
        return len(self.symbols)

    @property
    def d(self) -> int:
        return self.symbols[0].d

    @property
    def symbols(self) -> Sequence[MatrixSymbol]:
        raise NotImplementedError

    @property
    def is_adjoint(self) -> bool:
        return False

    def adjoint(self) -> "SymbolicTuple":
        raise NotImplementedError
