"""
Elementary symmetric functions, the symmetrization map and the reduction of symmetric polynomials to polynomials in
the elementary symmetric functions.
"""
import itertools
import logging
import math
import operator
from collections import defaultdict
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from gammakit.core import SYMMETRY_TOL, GammaPoint, as_cpoint
from gammakit.exceptions import ConvergenceError, DimensionMismatchError, NotSymmetricError
from gammakit.typing import complex_to_doc

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]


class MultiPoly:
    """
    Sparse multivariate polynomial with complex coefficients, stored as a map from exponent tuples to coefficients.
    Zero coefficients are never stored. Instances are immutable and hashable.
    """

    __slots__ = ("_n", "_terms", "_hash")

    def __init__(self, n_vars: int, terms: Dict[Exponent, complex] = None) -> None:
        super().__init__()
        if n_vars < 1:
            raise ValueError("a polynomial needs at least one variable")

        clean = defaultdict(complex)
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n_vars:
                raise DimensionMismatchError(
                    "exponent %s does not have length %d" % (exps, n_vars)
                )
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent in %s" % (exps,))
            clean[exps] += complex(coeff)

        self._n = n_vars
        self._terms = {k: v for k, v in clean.items() if v != 0}
        self._hash = None

    @classmethod
    def constant(cls, n_vars: int, value: complex = 1) -> "MultiPoly":
        return cls(n_vars, {(0,) * n_vars: value})

    @classmethod
    def coordinate(cls, n_vars: int, index: int) -> "MultiPoly":
        """The coordinate function x_{index+1} (``index`` is zero-based)."""
        if not 0 <= index < n_vars:
            raise IndexError("coordinate %d out of range for %d variables" % (index, n_vars))
        exps = [0] * n_vars
        exps[index] = 1
        return cls(n_vars, {tuple(exps): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff: complex = 1) -> "MultiPoly":
        return cls(len(exps), {tuple(exps): coeff})

    @property
    def n_vars(self) -> int:
        return self._n

    @property
    def terms(self) -> Dict[Exponent, complex]:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(exps) for exps in self._terms)

    @property
    def constant_term(self) -> complex:
        return self._terms.get((0,) * self._n, 0j)

    def coefficient(self, exps: Sequence[int]) -> complex:
        return self._terms.get(tuple(exps), 0j)

    def is_zero(self) -> bool:
        return not self._terms

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.n_vars != self._n:
                raise DimensionMismatchError(
                    "cannot combine polynomials in %d and %d variables" % (self._n, other.n_vars)
                )
            return other
        return MultiPoly.constant(self._n, complex(other))

    def __add__(self, other):
        other = self._coerce(other)
        terms = defaultdict(complex, self._terms)
        for exps, coeff in other._terms.items():
            terms[exps] += coeff
        return MultiPoly(self._n, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self._n, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)

        other = self._coerce(other)
        terms = defaultdict(complex)
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                terms[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
        return MultiPoly(self._n, terms)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, power: int):
        if power < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.constant(self._n)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def scale(self, factor: complex) -> "MultiPoly":
        factor = complex(factor)
        return MultiPoly(self._n, {k: v * factor for k, v in self._terms.items()})

    def chop(self, tol: float) -> "MultiPoly":
        """Drops coefficients with modulus at most ``tol``."""
        return MultiPoly(self._n, {k: v for k, v in self._terms.items() if abs(v) > tol})

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._terms.items())))
        return self._hash

    def distance(self, other: "MultiPoly") -> float:
        """Largest coefficient difference."""
        other = self._coerce(other)
        keys = set(self._terms) | set(other._terms)
        if not keys:
            return 0.0
        return max(abs(self._terms.get(k, 0) - other._terms.get(k, 0)) for k in keys)

    def isclose(self, other: "MultiPoly", tol: float = SYMMETRY_TOL) -> bool:
        return self.distance(other) <= tol

    def __call__(self, z):
        """
        Evaluates the polynomial by nested Horner schemes. ``z`` has n_vars entries along its first axis; trailing axes
        are broadcast, so a (n_vars, m) array evaluates m points at once.
        """
        z = np.asarray(z.s if isinstance(z, GammaPoint) else z, dtype=complex)
        if z.shape[:1] != (self._n,):
            raise DimensionMismatchError(
                "polynomial in %d variables evaluated at %d coordinates"
                % (self._n, z.shape[0] if z.ndim else 1)
            )

        if not self._terms:
            result = np.zeros(z.shape[1:], dtype=complex)
        else:
            result = _horner(list(self._terms.items()), z, 0)

        if z.ndim == 1:
            return complex(result)
        return np.broadcast_to(result, z.shape[1:]).astype(complex)

    def apply(self, values: Sequence, one, mul: Callable = operator.mul):
        """
        Evaluates the polynomial over an arbitrary algebra: ``values`` are the images of the coordinates, ``one`` is the
        unit and ``mul`` the product. Powers are cached per variable. Used for matrix tuples (``mul=np.matmul``),
        symbols and polynomial composition.
        """
        values = list(values)
        if len(values) != self._n:
            raise DimensionMismatchError(
                "polynomial in %d variables applied to %d values" % (self._n, len(values))
            )

        powers = {}

        def power(var, exp):
            if exp == 1:
                return values[var]
            key = (var, exp)
            if key not in powers:
                powers[key] = mul(power(var, exp - 1), values[var])
            return powers[key]

        result = one * 0
        for exps, coeff in sorted(self._terms.items()):
            term = one
            for var, exp in enumerate(exps):
                if exp:
                    term = mul(term, power(var, exp))
            result = result + coeff * term
        return result

    def compose(self, polys: Sequence["MultiPoly"]) -> "MultiPoly":
        """Returns self(polys[0], ..., polys[n-1]) as a polynomial in the variables of ``polys``."""
        if not polys:
            raise ValueError("nothing to compose with")
        m = polys[0].n_vars
        return self.apply(polys, MultiPoly.constant(m), operator.mul)

    def to_doc(self) -> dict:
        return {
            "n_vars": self._n,
            "terms": [[list(exps), complex_to_doc(c)] for exps, c in sorted(self._terms.items())],
        }

    def __repr__(self):
        return "MultiPoly(%s)" % format_expression(self)

    def __str__(self):
        return format_expression(self)


def _horner(terms: List[Tuple[Exponent, complex]], z: np.ndarray, var: int):
    if var == z.shape[0]:
        return sum(coeff for _, coeff in terms)

    groups = defaultdict(list)
    for exps, coeff in terms:
        groups[exps[0]].append((exps[1:], coeff))

    x = z[var]
    result = 0j
    for k in range(max(groups), -1, -1):
        result = result * x
        if k in groups:
            result = result + _horner(groups[k], z, var + 1)
    return result


def parse_poly(text: str, n_vars: int = None) -> MultiPoly:
    """
    Parses the line-based text format: one term per line, ``re im : e1 e2 ... en``. Blank lines and lines starting
    with ``#`` are skipped.
    """
    terms = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue

        if ":" not in line:
            raise ValueError("line %d: expected 're im : e1 ... en', got %r" % (lineno, line))

        coeff_part, exp_part = line.split(":", 1)
        coeff_tokens = coeff_part.split()
        if len(coeff_tokens) != 2:
            raise ValueError("line %d: expected two coefficient values" % lineno)

        exps = tuple(int(t) for t in exp_part.split())
        if n_vars is None:
            n_vars = len(exps)

        coeff = complex(float(coeff_tokens[0]), float(coeff_tokens[1]))
        terms[exps] = terms.get(exps, 0j) + coeff

    if n_vars is None:
        raise ValueError("cannot infer the number of variables of an empty polynomial")

    return MultiPoly(n_vars, terms)


def format_poly(p: MultiPoly) -> str:
    lines = []
    for exps, coeff in sorted(p.terms.items(), reverse=True):
        lines.append("%r %r : %s" % (coeff.real, coeff.imag, " ".join(str(e) for e in exps)))
    return "\n".join(lines) + "\n"


def _format_coeff(c: complex) -> str:
    if c.imag == 0:
        return "%.12g" % c.real
    if c.real == 0:
        return "%.12gj" % c.imag
    return "(%.12g%+.12gj)" % (c.real, c.imag)


def format_expression(p: MultiPoly, var: str = "x") -> str:
    """Human-readable form, e.g. ``x1^2 - 4*x2``."""
    if p.is_zero():
        return "0"

    parts = []
    for exps, coeff in sorted(p.terms.items(), reverse=True):
        factors = [
            "%s%d" % (var, i + 1) if e == 1 else "%s%d^%d" % (var, i + 1, e)
            for i, e in enumerate(exps)
            if e
        ]
        if not factors:
            parts.append(_format_coeff(coeff))
        elif coeff == 1:
            parts.append("*".join(factors))
        elif coeff == -1:
            parts.append("-" + "*".join(factors))
        else:
            parts.append(_format_coeff(coeff) + "*" + "*".join(factors))

    return " + ".join(parts).replace("+ -", "- ")


def elementary_symmetric_all(z) -> np.ndarray:
    """
    All elementary symmetric functions s_0, ..., s_n of the entries of ``z`` along its first axis, read off the
    coefficients of prod(1 + z_i t). Trailing axes are broadcast, so a (n, m) array yields a (n + 1, m) array.
    """
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    e = np.zeros((n + 1,) + z.shape[1:], dtype=complex)
    e[0] = 1
    for i in range(n):
        e[1 : i + 2] = e[1 : i + 2] + z[i] * e[0 : i + 1]
    return e


def elem_sym(k: int, z) -> complex:
    z = as_cpoint(z)
    if not 0 <= k <= z.size:
        raise ValueError(
            "elementary symmetric function s_%d undefined for %d variables" % (k, z.size)
        )
    return complex(elementary_symmetric_all(z)[k])


def symmetrize_point(z) -> GammaPoint:
    z = as_cpoint(z)
    return GammaPoint(elementary_symmetric_all(z)[1:])


def elementary_poly(n_vars: int, k: int) -> MultiPoly:
    """s_k as a polynomial in z_1, ..., z_n."""
    if not 0 <= k <= n_vars:
        raise ValueError(
            "elementary symmetric function s_%d undefined for %d variables" % (k, n_vars)
        )
    terms = {}
    for subset in itertools.combinations(range(n_vars), k):
        exps = [0] * n_vars
        for i in subset:
            exps[i] = 1
        terms[tuple(exps)] = 1
    return MultiPoly(n_vars, terms)


def _transposed(p: MultiPoly, i: int, j: int) -> MultiPoly:
    terms = {}
    for exps, coeff in p.terms.items():
        swapped = list(exps)
        swapped[i], swapped[j] = swapped[j], swapped[i]
        terms[tuple(swapped)] = coeff
    return MultiPoly(p.n_vars, terms)


def is_symmetric(p: MultiPoly, tol: float = SYMMETRY_TOL) -> bool:
    """Invariance under the adjacent transpositions, which generate the symmetric group."""
    for i in range(p.n_vars - 1):
        if p.distance(_transposed(p, i, i + 1)) > tol:
            return False
    return True


def reduce_symmetric(p: MultiPoly, tol: float = SYMMETRY_TOL) -> MultiPoly:
    """
    Returns q with q(s_1, ..., s_n) = p, by lexicographic leading-term elimination: the leading monomial
    z^a with a_1 >= ... >= a_n is cancelled by c * s_1^(a_1-a_2) * ... * s_n^(a_n), until nothing above ``tol``
    remains.

    :raises NotSymmetricError: if p is not symmetric within ``tol``
    :raises ConvergenceError: if the elimination does not terminate within the number of monomials of degree <= deg p
    """
    if not is_symmetric(p, tol):
        raise NotSymmetricError("polynomial is not symmetric within %g" % tol)

    n = p.n_vars
    s = [elementary_poly(n, k) for k in range(1, n + 1)]
    powers = {}

    def s_power(k, e):
        key = (k, e)
        if key not in powers:
            powers[key] = s[k] ** e
        return powers[key]

    guard = math.comb(n + p.degree, n)
    remaining = p.chop(tol)
    result = defaultdict(complex)

    for step in range(guard + 1):
        if remaining.is_zero():
            break

        lead = max(remaining.terms)
        coeff = remaining.coefficient(lead)
        if any(lead[i] < lead[i + 1] for i in range(n - 1)):
            raise NotSymmetricError("leading monomial %s is not non-increasing" % (lead,))

        q_exps = tuple(lead[i] - lead[i + 1] for i in range(n - 1)) + (lead[-1],)
        result[q_exps] += coeff

        product = MultiPoly.constant(n)
        for k, e in enumerate(q_exps):
            if e:
                product = product * s_power(k, e)

        remaining = (remaining - product.scale(coeff)).chop(tol)
        logger.debug("reduction step %d cancelled %s with coefficient %s", step, lead, coeff)
    else:
        raise ConvergenceError("symmetric reduction did not terminate after %d steps" % guard)

    return MultiPoly(n, result).chop(tol)


def kv_polynomial() -> MultiPoly:
    """z_1^2 + z_2^2 + z_3^2 - 2 z_1 z_2 - 2 z_2 z_3 - 2 z_3 z_1, which violates von Neumann's inequality for three
    commuting contractions."""
    return MultiPoly(
        3,
        {
            (2, 0, 0): 1,
            (0, 2, 0): 1,
            (0, 0, 2): 1,
            (1, 1, 0): -2,
            (0, 1, 1): -2,
            (1, 0, 1): -2,
        },
    )


def kv_reduced() -> MultiPoly:
    """The reduction of :func:`kv_polynomial`, x_1^2 - 4 x_2."""
    return MultiPoly(3, {(2, 0, 0): 1, (0, 1, 0): -4})


def coordinates(n_vars: int) -> List[MultiPoly]:
    return [MultiPoly.coordinate(n_vars, i) for i in range(n_vars)]


def symmetric_sum(polys: Iterable[MultiPoly]) -> MultiPoly:
    """Sum of the polynomials; used to build symmetric test inputs from orbits."""
    polys = list(polys)
    result = MultiPoly(polys[0].n_vars)
    for p in polys:
        result = result + p
    return result


def symmetrize_poly(p: MultiPoly) -> MultiPoly:
    """Sum of p over all permutations of its variables."""
    n = p.n_vars
    orbit = []
    for perm in itertools.permutations(range(n)):
        terms = {}
        for exps, coeff in p.terms.items():
            terms[tuple(exps[perm[i]] for i in range(n))] = coeff
        orbit.append(MultiPoly(n, terms))
    return symmetric_sum(orbit)
