"""
Geometry of the symmetrized polydisc: characteristic polynomials, membership, the distinguished boundary, fibers, the
projection and embedding maps between neighbouring dimensions, boundary reconstruction and samplers.
"""
import csv
import io
import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from gammakit.core import DEFAULT_TOL, CPoint, GammaPoint, Verdict, as_cpoint
from gammakit.exceptions import DimensionMismatchError, PreconditionError
from gammakit.symmetric import elementary_symmetric_all

logger = logging.getLogger(__name__)

ROUTES = ("fiber", "recursive", "closure", "all")

# tolerance multipliers tried when the boundary routes disagree
ESCALATION = (10.0, 100.0)

# rounding slack when testing Taylor coefficients of a merged root for zero
MERGE_SLACK = 32.0

REFINE_STEPS = 30


class UniPoly:
    """Univariate complex polynomial, coefficients in ascending degree, trailing zeros trimmed."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs, tol: float = 0.0) -> None:
        super().__init__()
        c = np.array(coeffs, dtype=complex).reshape(-1)
        if c.size == 0:
            c = np.zeros(1, dtype=complex)

        last = c.size - 1
        while last > 0 and abs(c[last]) <= tol:
            last -= 1
        c = c[: last + 1].copy()
        c.setflags(write=False)
        self._coeffs = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def degree(self) -> int:
        return self._coeffs.size - 1

    def is_zero(self) -> bool:
        return self._coeffs.size == 1 and self._coeffs[0] == 0

    def derivative(self) -> "UniPoly":
        if self.degree == 0:
            return UniPoly([0])
        return UniPoly(P.polyder(self._coeffs))

    def __call__(self, z):
        return P.polyval(z, self._coeffs)

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        return bool(np.array_equal(self._coeffs, other._coeffs))

    def __hash__(self):
        return hash(tuple(self._coeffs.tolist()))

    def isclose(self, other: "UniPoly", tol: float = DEFAULT_TOL) -> bool:
        if self.degree != other.degree:
            return False
        return float(np.max(np.abs(self._coeffs - other.coeffs))) <= tol

    def __repr__(self):
        return "UniPoly(%s)" % ", ".join("%.6g%+.6gj" % (c.real, c.imag) for c in self._coeffs)


def char_poly(s: GammaPoint) -> UniPoly:
    """p(z) = sum_i (-1)^(n-i) s_(n-i) z^i with s_0 = 1; monic of degree n."""
    s = s if isinstance(s, GammaPoint) else GammaPoint(s)
    n = s.n
    full = np.concatenate([[1.0], s.s])
    coeffs = [(-1) ** (n - i) * full[n - i] for i in range(n + 1)]
    return UniPoly(coeffs)


def roots(p: UniPoly) -> CPoint:
    """All complex roots, as eigenvalues of the companion matrix."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no finite root set")
    if p.degree == 0:
        return np.zeros(0, dtype=complex)
    if p.degree == 1:
        c = p.coeffs
        return np.array([-c[0] / c[1]], dtype=complex)

    return np.linalg.eigvals(P.polycompanion(p.coeffs)).astype(complex)


def _cluster_radius(multiplicity: int, scale: float) -> float:
    # a root of multiplicity m moves by about (eps * scale)^(1/m) under backward-stable perturbation
    return 10.0 * (np.finfo(float).eps * scale) ** (1.0 / multiplicity)


def _taylor(coeffs: np.ndarray, c: complex, k: int) -> complex:
    return complex(P.polyval(c, P.polyder(coeffs, k))) / math.factorial(k)


def is_multiple_root(p: UniPoly, cluster) -> bool:
    """
    Whether a cluster of m computed roots is one m-fold root split by rounding. At the centroid c the Taylor
    coefficients of order below m must vanish up to the rounding error of their evaluation, and the spread of the
    cluster must fit the splitting radius (eps |p| / |p^(m)(c) / m!|)^(1/m) of an m-fold root.
    """
    cluster = np.asarray(cluster, dtype=complex)
    m = cluster.size
    if m < 2:
        return True

    eps = np.finfo(float).eps
    coeffs = p.coeffs / p.coeffs[-1]
    magnitudes = np.abs(coeffs)
    c = complex(cluster.mean())
    rho = max(1.0, abs(c))

    for k in range(m):
        bound = _taylor(magnitudes, rho, k).real
        if abs(_taylor(coeffs, c, k)) > MERGE_SLACK * coeffs.size * eps * bound:
            return False

    lead = abs(_taylor(coeffs, c, m))
    if lead == 0:
        return True
    backward = eps * P.polyval(rho, magnitudes)
    spread = float(np.max(np.abs(cluster[:, None] - cluster[None, :])))
    return spread <= 10.0 * (backward / lead) ** (1.0 / m)


def settle_roots(p: UniPoly, raw: CPoint = None) -> CPoint:
    """
    Roots of ``p`` with numerically split multiple roots merged back. A cluster is replaced by its centroid, repeated
    with the cluster multiplicity, only when ``is_multiple_root`` confirms it; close but distinct roots keep their
    computed values.
    """
    raw = roots(p) if raw is None else np.asarray(raw, dtype=complex)
    n = raw.size
    if n < 2:
        return raw

    dist = np.abs(raw[:, None] - raw[None, :])
    settled = raw.copy()
    unassigned = list(range(n))

    while len(unassigned) > 1:
        best: List[int] = []
        for i in unassigned:
            nearest = sorted(unassigned, key=lambda j: dist[i, j])
            for size in range(len(nearest), max(len(best), 1), -1):
                group = nearest[:size]
                if is_multiple_root(p, raw[group]):
                    best = group
                    break

        if not best:
            break

        settled[best] = raw[best].mean()
        logger.debug("merged %d roots near %s", len(best), settled[best[0]])
        unassigned = [i for i in unassigned if i not in best]

    return settled


def _root_jacobian(rts: np.ndarray) -> np.ndarray:
    # column k holds d s_j / d lambda_k = s_(j-1)(lambda without lambda_k), j = 1 .. n
    n = rts.size
    return np.stack([elementary_symmetric_all(np.delete(rts, k))[:n] for k in range(n)], axis=1)


def refine_onto_circle(s: GammaPoint, rts: CPoint, on_circle) -> Tuple[float, CPoint]:
    """
    Gauss-Newton fit of a root multiset to ``s`` in which the roots flagged by ``on_circle`` are constrained to the unit
    circle and the others move freely. Returns the smallest residual max |s(lambda) - s| reached and its roots; a
    small residual certifies that ``s`` is within that distance of a point whose flagged roots are unimodular.
    """
    rts = np.asarray(rts, dtype=complex).copy()
    on_circle = np.asarray(on_circle, dtype=bool)
    rts[on_circle] = np.exp(1j * np.angle(rts[on_circle]))

    def residual(z):
        return elementary_symmetric_all(z)[1:] - s.s

    best = rts
    r = residual(rts)
    best_res = float(np.max(np.abs(r)))

    for _ in range(REFINE_STEPS):
        J = _root_jacobian(best)
        columns = []
        for k in range(best.size):
            if on_circle[k]:
                columns.append(1j * best[k] * J[:, k])
            else:
                columns.extend([J[:, k], 1j * J[:, k]])
        A = np.vstack([np.real(columns).T, np.imag(columns).T])
        b = -np.concatenate([r.real, r.imag])
        step = np.linalg.lstsq(A, b, rcond=None)[0]

        candidate = best.copy()
        i = 0
        for k in range(best.size):
            if on_circle[k]:
                candidate[k] = best[k] * np.exp(1j * step[i])
                i += 1
            else:
                candidate[k] = best[k] + step[i] + 1j * step[i + 1]
                i += 2

        r_candidate = residual(candidate)
        res = float(np.max(np.abs(r_candidate)))
        if res >= best_res:
            break
        best, r, best_res = candidate, r_candidate, res

    return best_res, best


def _near_circle(s: GammaPoint, rts: CPoint) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(s.s)))) * s.n
    return np.abs(np.abs(rts) - 1.0) <= _cluster_radius(s.n, scale)


def in_gamma(s: GammaPoint, tol: float = DEFAULT_TOL) -> Verdict:
    """
    Membership in Gamma_n: every root of the characteristic polynomial lies in the closed unit disc. Roots that leave
    the disc by less than their perturbation radius are refitted onto the circle; the point is a member when the
    refitted multiset reproduces ``s`` within ``tol`` with every other root inside the disc.
    """
    s = s if isinstance(s, GammaPoint) else GammaPoint(s)
    rts = settle_roots(char_poly(s))
    moduli = np.abs(rts)
    worst = int(np.argmax(moduli))
    defect = max(0.0, float(moduli[worst]) - 1.0)

    if defect > tol:
        near = _near_circle(s, rts)
        outside = moduli > 1.0
        if np.all(near[outside]):
            for mask in (outside, near):
                res, fitted = refine_onto_circle(s, rts, mask)
                if res <= tol and np.all(np.abs(fitted[~mask]) <= 1.0 + tol):
                    logger.debug("roots of %s refitted onto the circle, residual %.3e", s, res)
                    return Verdict.of(res, tol)

    certificate = complex(rts[worst]) if defect > tol else None
    return Verdict.of(defect, tol, certificate)


def fiber(s: GammaPoint) -> CPoint:
    """
    A root multiset lambda with s(lambda) = s, ordered by argument and then modulus.
    """
    s = s if isinstance(s, GammaPoint) else GammaPoint(s)
    rts = settle_roots(char_poly(s))
    order = np.lexsort((np.abs(rts), np.angle(rts)))
    return rts[order]


def is_self_inversive(p: UniPoly, tol: float = DEFAULT_TOL) -> Verdict:
    """
    Whether z^d conj(p(1/conj z)) = omega p(z) for a unimodular omega. omega is the least-squares fit of the
    conjugate-reversed coefficients against the coefficients, projected to the unit circle; the defect is the max
    residual. The certificate is omega.
    """
    if p.degree < 1:
        raise ValueError("self-inversiveness needs degree >= 1")

    c = p.coeffs
    r = np.conj(c[::-1])
    fit = np.vdot(c, r) / np.vdot(c, c)
    omega = fit / abs(fit) if abs(fit) > 0 else 1.0 + 0j
    defect = float(np.max(np.abs(r - omega * c)))
    return Verdict.of(defect, tol, complex(omega))


def project(s: GammaPoint) -> GammaPoint:
    """(gamma_i s_i) for i = 1 .. n-1 with gamma_i = (n - i) / n."""
    s = s if isinstance(s, GammaPoint) else GammaPoint(s)
    n = s.n
    if n < 2:
        raise DimensionMismatchError("projection needs n >= 2")
    gamma = (n - np.arange(1, n)) / n
    return GammaPoint(gamma * s.s[:-1])


def embed(s: GammaPoint, alpha: complex) -> GammaPoint:
    """(alpha + s_1, alpha s_1 + s_2, ..., alpha s_(n-1) + s_n, alpha s_n)."""
    s = s if isinstance(s, GammaPoint) else GammaPoint(s)
    alpha = complex(alpha)
    full = np.concatenate([[1.0], s.s, [0.0]])
    return GammaPoint(alpha * full[:-1] + full[1:])


def cohn_verdict(s: GammaPoint, tol: float = DEFAULT_TOL) -> Verdict:
    """
    Cohn's criterion for all roots on the circle: the characteristic polynomial is self-inversive and the roots of its
    derivative lie in the closed disc. The derivative roots are the roots of the characteristic polynomial of
    ``project(s)``.
    """
    s = s if isinstance(s, GammaPoint) else GammaPoint(s)
    inversive = is_self_inversive(char_poly(s), tol)

    if s.n == 1:
        derivative = Verdict.of(0.0, tol)
    else:
        derivative = in_gamma(project(s), tol)

    defect = max(inversive.defect, derivative.defect)
    if not inversive.holds:
        certificate = "not self-inversive"
    elif not derivative.holds:
        certificate = derivative.certificate
    else:
        certificate = None

    return Verdict.of(defect, tol, certificate)


def _fiber_route(s: GammaPoint, tol: float) -> Verdict:
    rts = settle_roots(char_poly(s))
    deviation = np.abs(np.abs(rts) - 1.0)
    worst = int(np.argmax(deviation))
    defect = float(deviation[worst])

    if defect > tol and np.all(_near_circle(s, rts)):
        # clustered roots are only known to their perturbation radius; fit a unimodular fiber instead
        res, _ = refine_onto_circle(s, rts, np.ones(rts.size, dtype=bool))
        if res <= tol:
            return Verdict.of(res, tol)

    return Verdict.of(defect, tol, complex(rts[worst]) if defect > tol else None)


def _recursive_route(s: GammaPoint, tol: float) -> Verdict:
    n = s.n
    sn = s.s[-1]
    defect = abs(abs(sn) - 1.0)
    certificate = "|s_n| = 1" if defect > tol else None

    if n == 1:
        return Verdict.of(defect, tol, certificate)

    for i in range(1, n):
        # conj(s_n) s_i = conj(s_(n-i))
        d = abs(np.conj(sn) * s.s[i - 1] - np.conj(s.s[n - i - 1]))
        if d > defect:
            defect = d
            certificate = "conj(s_n) s_%d = conj(s_%d)" % (i, n - i) if d > tol else certificate

    projected = in_gamma(project(s), tol)
    if projected.defect > defect:
        defect = projected.defect
        certificate = "projection outside Gamma_%d" % (n - 1)

    return Verdict.of(defect, tol, certificate)


def _closure_route(s: GammaPoint, tol: float) -> Verdict:
    member = in_gamma(s, tol)
    modulus = abs(abs(s.s[-1]) - 1.0)
    if modulus > member.defect:
        return Verdict.of(modulus, tol, "|s_n| = 1")
    return Verdict.of(member.defect, tol, member.certificate)


_ROUTES = {
    "fiber": _fiber_route,
    "recursive": _recursive_route,
    "closure": _closure_route,
}


def on_boundary(s: GammaPoint, tol: float = DEFAULT_TOL, route: str = "all") -> Verdict:
    """
    Membership in the distinguished boundary. ``fiber`` checks that all roots are unimodular, ``recursive`` checks
    |s_n| = 1, the conjugate symmetry of the coefficients and membership of the projection in Gamma_(n-1),
    ``closure`` checks membership in Gamma_n together with |s_n| = 1. ``all`` evaluates every route; if they disagree
    the tolerance is escalated, and a disagreement that survives escalation is reported in the diagnostics and resolved
    by majority.
    """
    s = s if isinstance(s, GammaPoint) else GammaPoint(s)

    if route != "all":
        try:
            return _ROUTES[route](s, tol)
        except KeyError:
            raise ValueError("unknown route %r, expected one of %s" % (route, ROUTES))

    verdicts = {name: fn(s, tol) for name, fn in _ROUTES.items()}
    if len({v.holds for v in verdicts.values()}) == 1:
        return _merge_agreeing(verdicts, tol, ())

    for factor in ESCALATION:
        escalated = tol * factor
        retried = {name: fn(s, escalated) for name, fn in _ROUTES.items()}
        if len({v.holds for v in retried.values()}) == 1:
            note = "routes agree only at escalated tolerance %g (%s)" % (
                escalated,
                _describe(verdicts),
            )
            logger.debug("%s for %s", note, s)
            return _merge_agreeing(retried, escalated, (note,))

    note = "inconsistent boundary routes at tolerance %g: %s" % (
        tol * ESCALATION[-1],
        _describe(verdicts),
    )
    logger.warning("%s for %s", note, s)

    votes = [v.holds for v in verdicts.values()]
    majority = votes.count(True) > votes.count(False)
    if majority:
        defect = max(v.defect for v in verdicts.values() if v.holds)
        certificate = None
    else:
        failing = [v for v in verdicts.values() if not v.holds]
        best = min(failing, key=lambda v: v.defect)
        defect, certificate = best.defect, best.certificate
    return Verdict.of(defect, tol, certificate, (note,))


def _describe(verdicts) -> str:
    return ", ".join("%s=%s (%.3e)" % (name, v.holds, v.defect) for name, v in verdicts.items())


def _merge_agreeing(verdicts, tol, diagnostics) -> Verdict:
    defect = max(v.defect for v in verdicts.values())
    certificate = None
    for v in verdicts.values():
        if v.certificate is not None and not v.holds:
            certificate = v.certificate
            break
    return Verdict.of(defect, tol, certificate, diagnostics)


def boundary_from_mu(mu: GammaPoint, theta: float, tol: float = DEFAULT_TOL) -> GammaPoint:
    """
    Reconstructs a point of the distinguished boundary of Gamma_n from mu in the distinguished boundary of
    Gamma_(n-1) and an angle: s_j = mu_j + conj(mu_(n-j)) e^(i theta) with mu_0 = 1 and mu_n = 0, so s_n = e^(i theta).
    """
    mu = mu if isinstance(mu, GammaPoint) else GammaPoint(mu)
    check = on_boundary(mu, tol, route="fiber")
    if not check.holds:
        raise PreconditionError(
            "boundary", "mu is not in the distinguished boundary (defect %.3e)" % check.defect
        )

    n = mu.n + 1
    full = np.concatenate([[1.0], mu.s, [0.0]])
    rotation = np.exp(1j * theta)
    s = [full[j] + np.conj(full[n - j]) * rotation for j in range(1, n + 1)]
    return GammaPoint(s)


def sample_fibers(n: int, count: int, boundary: bool = False, seed=None) -> np.ndarray:
    """
    i.i.d. uniform points of the torus (``boundary``) or of the closed polydisc, as a (count, n) array.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2 * np.pi, size=(count, n))
    if boundary:
        radii = np.ones((count, n))
    else:
        radii = np.sqrt(rng.uniform(0.0, 1.0, size=(count, n)))
    return radii * np.exp(1j * angles)


def sample(n: int, count: int, boundary: bool = False, seed=None) -> List[GammaPoint]:
    """Symmetrizations of uniform points of the polydisc, or of the torus when ``boundary`` is set."""
    z = sample_fibers(n, count, boundary, seed)
    s = elementary_symmetric_all(z.T)[1:].T
    return [GammaPoint(row) for row in s]


def samples_to_csv(points: Sequence[GammaPoint], stream=None):
    """
    Writes one point per row, real and imaginary parts interleaved. Returns the CSV text when no stream is given.
    """
    target = stream if stream is not None else io.StringIO()
    writer = csv.writer(target, lineterminator="\n")

    if points:
        n = points[0].n
        writer.writerow([part for i in range(1, n + 1) for part in ("s%d_re" % i, "s%d_im" % i)])

    for point in points:
        writer.writerow([repr(float(x)) for v in point.s for x in (v.real, v.imag)])

    if stream is None:
        return target.getvalue()
