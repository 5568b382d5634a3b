"""
Decision procedures on matrix tuples: von Neumann checking over Gamma_n, classification of Gamma_n-unitaries,
isometries and co-isometries, unitary generators and product-unitary promotion.

Checks of the form "is a Gamma_n-contraction" are falsification tests: a tuple is rejected when some polynomial of a
sampled battery violates the inequality ||q(S)|| <= sup |q| over Gamma_n. A passing verdict is evidence, not proof,
except for normal tuples and n = 1, which are decided exactly.
"""
import functools
import itertools
import logging
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import comb

from gammakit.core import (
    COMMUTING_TOL,
    DEFAULT_TOL,
    VN_TOL,
    Budget,
    CPoint,
    GammaPoint,
    Verdict,
    parallel_map,
)
from gammakit.exceptions import DimensionMismatchError, PreconditionError
from gammakit.geometry import fiber, in_gamma, on_boundary
from gammakit.model.symbol import MatrixSymbol, SymbolicTuple, symbol_sup
from gammakit.operators import (
    MatrixTuple,
    as_tuple,
    commutation_defect,
    is_normal_tuple,
    joint_diagonalize,
    opnorm,
    poly_apply,
    project_tuple,
    symmetrize_tuple,
)
from gammakit.symmetric import MultiPoly, elementary_symmetric_all, format_expression, kv_reduced

logger = logging.getLogger(__name__)

# grids with more points than this are coarsened
MAX_GRID_POINTS = 2_000_000
CHUNK = 1 << 16


class SupResult(NamedTuple):
    value: float
    argmax: CPoint
    resolution: int
    lipschitz_bound: float

    @property
    def certified_error(self) -> float:
        """The true supremum lies in [value, value + certified_error]."""
        return self.lipschitz_bound * np.pi / self.resolution


class Violation(NamedTuple):
    label: str
    poly: MultiPoly
    margin: float


def _lipschitz_bound(q: MultiPoly, n: int) -> float:
    # |s_l| <= C(n, l) on the torus, |ds_k / dtheta_j| <= C(n-1, k-1)
    bounds = np.array([comb(n, l) for l in range(1, n + 1)], dtype=float)
    partial = np.zeros(n)
    for exps, coeff in q.terms.items():
        magnitude = abs(coeff) * np.prod(bounds ** np.array(exps))
        for k, e in enumerate(exps):
            if e:
                partial[k] += magnitude * e / bounds[k]
    per_variable = sum(comb(n - 1, k) * partial[k] for k in range(n))
    return float(n * per_variable)


def _grid_for(n: int, grid: int) -> int:
    while grid > 4 and comb(grid + n - 1, n, exact=True) > MAX_GRID_POINTS:
        grid //= 2
    return grid


def _torus_values(q: MultiPoly, angles: np.ndarray) -> np.ndarray:
    """|q(s(e^(i theta)))| for angle rows of shape (m, n)."""
    s = elementary_symmetric_all(np.exp(1j * angles.T))[1:]
    return np.abs(q(s))


def sup_on_gamma(q: MultiPoly, n: int = None, grid: int = 64, refine_iters: int = 3) -> SupResult:
    """
    sup of |q| over Gamma_n, which equals the sup of |q o s| over the torus. The torus grid is enumerated on
    non-decreasing angle tuples only (q o s is permutation invariant), then the best points are refined by coordinate
    ascent. ``lipschitz_bound`` bounds the angular derivative so the value is certified to within
    lipschitz_bound * pi / grid.
    """
    n = q.n_vars if n is None else n
    if q.n_vars != n:
        raise DimensionMismatchError("polynomial in %d variables over Gamma_%d" % (q.n_vars, n))
    if grid < 4:
        raise ValueError("grid must be at least 4")
    result = _sup_cached(q, n, grid, refine_iters)
    return result._replace(argmax=result.argmax.copy())


@functools.lru_cache(maxsize=1024)
def _sup_cached(q: MultiPoly, n: int, grid: int, refine_iters: int) -> SupResult:
    used = _grid_for(n, grid)
    if used != grid:
        logger.warning("grid %d too fine for n=%d, using %d", grid, n, used)

    step = 2 * np.pi / used
    index_rows = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations_with_replacement(range(used), n)),
        dtype=np.int64,
    ).reshape(-1, n)
    chunks = [index_rows[i : i + CHUNK] for i in range(0, len(index_rows), CHUNK)]

    def evaluate(chunk):
        values = _torus_values(q, chunk * step)
        order = np.argsort(values)[::-1][:3]
        return [(float(values[k]), chunk[k] * step) for k in order]

    candidates = sorted(
        (c for part in parallel_map(evaluate, chunks) for c in part),
        key=lambda c: c[0],
        reverse=True,
    )[:3]

    best_value, best_angles = candidates[0]
    for value, angles in candidates:
        value, angles = _coordinate_ascent(q, angles.copy(), value, step, refine_iters)
        if value > best_value:
            best_value, best_angles = value, angles

    return SupResult(
        float(best_value),
        np.exp(1j * best_angles),
        used,
        _lipschitz_bound(q, n),
    )


def _coordinate_ascent(q: MultiPoly, angles: np.ndarray, value: float, step: float, iters: int):
    for _ in range(iters):
        improved = False
        for j in range(angles.size):

            def negative(t, j=j):
                trial = angles.copy()
                trial[j] = t
                return -float(_torus_values(q, trial[None, :])[0])

            res = minimize_scalar(
                negative,
                bounds=(angles[j] - step, angles[j] + step),
                method="bounded",
                options={"xatol": 1e-12},
            )
            if -res.fun > value:
                value = -res.fun
                angles[j] = res.x
                improved = True
        if not improved:
            break
    return value, angles


def _spectral_witness(S: MatrixTuple) -> List[CPoint]:
    """Joint eigenvalues of S inside Gamma_n, when S is commuting and normal; they are points where |q| <= sup."""
    if commutation_defect(S) > COMMUTING_TOL * S.scale():
        return []
    if not is_normal_tuple(S, COMMUTING_TOL * S.scale()).holds:
        return []
    eigvals, _ = joint_diagonalize(S)
    return [row for row in eigvals if in_gamma(GammaPoint(row)).holds]


def vn_margin(S, q: MultiPoly, grid: int = 64, refine_iters: int = 3) -> float:
    """
    ||q(S)|| - sup of |q| over Gamma_n. A positive margin certifies that Gamma_n is not a spectral set for S. For
    normal S the supremum estimate is raised by the values of q at joint eigenvalues inside Gamma_n.
    """
    S = as_tuple(S)
    if q.n_vars != S.n:
        raise DimensionMismatchError("polynomial in %d variables on a %d-tuple" % (q.n_vars, S.n))
    return _margin(S, q, grid, refine_iters, _spectral_witness(S))


def _margin(S: MatrixTuple, q: MultiPoly, grid: int, refine_iters: int, witnesses) -> float:
    value = opnorm(poly_apply(q, S))
    sup = sup_on_gamma(q, S.n, grid, refine_iters).value
    for point in witnesses:
        sup = max(sup, abs(q(point)))
    return value - sup


def canonical_battery(n: int, max_degree: int = 4) -> List[Tuple[str, MultiPoly]]:
    """
    Constant, coordinates, pairwise products, powers up to ``max_degree`` and, for n = 3, the reduction x_1^2 - 4 x_2
    of the Kaijser-Varopoulos polynomial.
    """
    battery = [("1", MultiPoly.constant(n))]
    coords = [MultiPoly.coordinate(n, i) for i in range(n)]
    battery += [("x%d" % (i + 1), x) for i, x in enumerate(coords)]

    for i, j in itertools.combinations_with_replacement(range(n), 2):
        product = coords[i] * coords[j]
        battery.append((format_expression(product), product))

    for i in range(n):
        for e in range(3, max_degree + 1):
            power = coords[i] ** e
            battery.append((format_expression(power), power))

    if n == 3:
        battery.append(("kv", kv_reduced()))

    return battery


def random_battery(n: int, count: int, max_degree: int, rng) -> List[Tuple[str, MultiPoly]]:
    """Random polynomials with i.i.d. complex Gaussian coefficients on all monomials up to a random degree."""
    battery = []
    for k in range(count):
        degree = int(rng.integers(1, max_degree + 1))
        terms = {}
        for total in range(degree + 1):
            for exps in _exponents(n, total):
                terms[exps] = complex(rng.standard_normal(), rng.standard_normal())
        battery.append(("random-%d" % k, MultiPoly(n, terms)))
    return battery


def _exponents(n: int, total: int):
    for cut in itertools.combinations(range(total + n - 1), n - 1):
        bounds = (-1,) + cut + (total + n - 1,)
        yield tuple(bounds[i + 1] - bounds[i] - 1 for i in range(n))


def contraction_verdict(
    S,
    budget: Budget = None,
    seed=None,
    tol: float = VN_TOL,
    battery: Sequence[Tuple[str, MultiPoly]] = None,
) -> Verdict:
    """
    Sampled check that Gamma_n is a spectral set for S. Every polynomial of the canonical battery, ``budget``
    random polynomials and the optional extra ``battery`` is tested; the verdict holds iff every margin is <= tol.
    The certificate is the largest canonical violation, else the largest random one.

    Tuples with n = 1 are decided exactly (||S_1|| <= 1), normal commuting tuples by their joint spectrum.
    """
    S = as_tuple(S)
    budget = budget or Budget()
    n = S.n

    if n == 1:
        margin = opnorm(S[0]) - 1.0
        certificate = Violation("x1", MultiPoly.coordinate(1, 0), margin) if margin > tol else None
        return Verdict.of(margin, tol, certificate, ("exact: Gamma_1 is the closed disc",))

    spectral = None
    threshold = COMMUTING_TOL * S.scale()
    if commutation_defect(S) <= threshold and is_normal_tuple(S, threshold).holds:
        eigvals, _ = joint_diagonalize(S, seed=seed)
        checks = [in_gamma(GammaPoint(row), tol) for row in eigvals]
        worst = int(np.argmax([c.defect for c in checks]))
        spectral = Verdict.of(
            checks[worst].defect,
            tol,
            GammaPoint(eigvals[worst]) if not checks[worst].holds else None,
            ("exact: normal tuple, joint spectrum route",),
        )
        if spectral.holds:
            return spectral
        witnesses = [row for row, c in zip(eigvals, checks) if c.holds]
    else:
        witnesses = []

    rng = np.random.default_rng(seed)
    canonical = canonical_battery(n, budget.max_degree) + list(battery or [])
    randoms = random_battery(n, budget.random_polys, budget.max_degree, rng)

    def margin_of(item):
        label, q = item
        return Violation(label, q, _margin(S, q, budget.grid, budget.refine_iters, witnesses))

    results = parallel_map(margin_of, canonical + randoms)
    logger.debug("tested %d polynomials on a %d-tuple of dimension %d", len(results), n, S.dim)

    # first canonical violation in battery order (lowest degree), else the largest random one
    violations = [v for v in results[: len(canonical)] if v.margin > tol]
    worst = max(results, key=lambda v: v.margin)
    certificate = violations[0] if violations else worst
    diagnostics = ("battery of %d polynomials, grid %d" % (len(results), budget.grid),)

    if spectral is not None:
        if certificate.margin > tol:
            return Verdict.of(spectral.defect, tol, certificate, spectral.diagnostics + diagnostics)
        return spectral

    return Verdict.of(worst.margin, tol, certificate if worst.margin > tol else None, diagnostics)


def pullback_project(q: MultiPoly, n: int) -> MultiPoly:
    """q o pi for q in n - 1 variables: a polynomial in n variables."""
    if q.n_vars != n - 1:
        raise DimensionMismatchError("need a polynomial in %d variables" % (n - 1))
    coords = [MultiPoly.coordinate(n, i).scale((n - i - 1) / n) for i in range(n - 1)]
    return q.compose(coords)


def pullback_embed(q: MultiPoly, alpha: complex) -> MultiPoly:
    """q o pi_alpha for q in n + 1 variables: a polynomial in n variables."""
    n = q.n_vars - 1
    if n < 1:
        raise DimensionMismatchError("need a polynomial in at least 2 variables")
    alpha = complex(alpha)
    full = [MultiPoly.constant(n)] + [MultiPoly.coordinate(n, i) for i in range(n)] + [MultiPoly(n)]
    images = [full[j - 1].scale(alpha) + full[j] for j in range(1, n + 2)]
    return q.compose(images)


def _unitary_defects(S: MatrixTuple) -> Tuple[float, float, float, int]:
    """||S_n* S_n - I||, ||S_n S_n* - I|| and the worst ||S_n* S_i - S_(n-i)*|| with its index i."""
    sn = S[-1]
    eye = np.eye(S.dim)
    iso = opnorm(sn.conj().T @ sn - eye)
    co = opnorm(sn @ sn.conj().T - eye)
    relation, worst = 0.0, 0
    for i in range(1, S.n):
        d = opnorm(sn.conj().T @ S[i - 1] - S[S.n - i - 1].conj().T)
        if d > relation:
            relation, worst = d, i
    return iso, co, relation, worst


def _projection_verdict(S: MatrixTuple, tol: float, budget: Budget, seed) -> Verdict:
    if S.n == 1:
        return Verdict.of(0.0, tol)
    return contraction_verdict(project_tuple(S), budget, seed, max(tol, VN_TOL))


def _route_normal_spectrum(S: MatrixTuple, tol: float, seed=None) -> Verdict:
    """Normal commuting tuple with joint spectrum in the distinguished boundary."""
    scale = S.scale()
    commuting = commutation_defect(S)
    if commuting > COMMUTING_TOL * scale:
        return Verdict.of(commuting, tol, "commuting")
    normal = is_normal_tuple(S, max(tol, COMMUTING_TOL) * scale)
    if not normal.holds:
        return Verdict.of(normal.defect, tol, "normal")

    eigvals, _ = joint_diagonalize(S, tol, seed)
    checks = [on_boundary(GammaPoint(row), tol, route="fiber") for row in eigvals]
    worst = int(np.argmax([c.defect for c in checks]))
    certificate = GammaPoint(eigvals[worst]) if not checks[worst].holds else None
    return Verdict.of(checks[worst].defect, tol, certificate)


def is_gamma_unitary(
    S, tol: float = DEFAULT_TOL, grid: int = 64, budget: Budget = None, seed=None
) -> Verdict:
    """
    Gamma_n-unitary test through the operator identities: S_n unitary, S_n* S_i = S_(n-i)* and
    (gamma_1 S_1, ..., gamma_(n-1) S_(n-1)) a Gamma_(n-1)-contraction. Cross-checked against the spectral
    characterization (normal tuple with joint spectrum in the distinguished boundary); a disagreement is reported in the
    diagnostics.
    """
    S = as_tuple(S)
    budget = (budget or Budget())._replace(grid=grid)

    iso, co, relation, index = _unitary_defects(S)
    commuting = commutation_defect(S) / S.scale()
    projection = _projection_verdict(S, tol, budget, seed)

    defect = max(iso, co, relation, commuting, projection.defect)
    if commuting > tol:
        certificate = "commuting"
    elif max(iso, co) > tol:
        certificate = "S_n unitary"
    elif relation > tol:
        certificate = "S_n* S_%d = S_%d*" % (index, S.n - index)
    elif not projection.holds:
        certificate = projection.certificate or "projection contraction"
    else:
        certificate = None

    verdict = Verdict.of(defect, tol, certificate)
    spectral = _route_normal_spectrum(S, tol, seed)

    if spectral.holds != verdict.holds:
        note = "route disagreement: identities %s (%.3e), spectral %s (%.3e)" % (
            verdict.holds,
            verdict.defect,
            spectral.holds,
            spectral.defect,
        )
        logger.warning(note)
        return verdict._replace(diagnostics=verdict.diagnostics + (note,))

    return verdict


def unitary_generators(S, tol: float = DEFAULT_TOL, seed=None) -> MatrixTuple:
    """
    Commuting unitaries U with s(U) = S for a Gamma_n-unitary S: the joint eigenvalues of S are lifted to their fibers
    on the torus and placed on the common eigenbasis.
    """
    S = as_tuple(S)
    route = _route_normal_spectrum(S, tol, seed)
    if not route.holds:
        raise PreconditionError(
            "gamma-unitary", "tuple is not a Gamma_n-unitary (defect %.3e)" % route.defect
        )

    eigvals, q = joint_diagonalize(S, tol, seed)
    lifted = np.array([fiber(GammaPoint(row)) for row in eigvals])

    deviation = float(np.max(np.abs(np.abs(lifted) - 1.0)))
    if deviation > max(tol, 1e-7):
        raise PreconditionError("unimodular-fiber", "fiber off the torus by %.3e" % deviation)
    lifted = lifted / np.abs(lifted)

    return MatrixTuple([q @ np.diag(lifted[:, k]) @ q.conj().T for k in range(S.n)])


def _isometry_of_symbols(S: SymbolicTuple, tol: float, budget: Budget, seed) -> Verdict:
    if S.is_adjoint:
        # S_n = M_z*, which annihilates the constants
        return Verdict.of(1.0, tol, "S_n isometric", ("the adjoint of the shift is not isometric",))

    symbols = S.symbols
    n = S.n
    d = S.d
    last = symbols[-1]
    thetas = np.exp(2j * np.pi * np.arange(budget.grid) / budget.grid)
    values = last(thetas)
    iso = max(opnorm(v.conj().T @ v - np.eye(d)) for v in values)

    relation, index = 0.0, 0
    for i in range(1, n):
        r = shift_relation_defect(symbols[i - 1], symbols[n - i - 1])
        if r > relation:
            relation, index = r, i

    if n == 1:
        projection = Verdict.of(0.0, tol)
    else:
        scaled = [((n - i) / n) * symbols[i - 1] for i in range(1, n)]
        projection = symbol_contraction_verdict(scaled, budget, seed, max(tol, VN_TOL))

    defect = max(iso, relation, projection.defect)
    if iso > tol:
        certificate = "S_n isometric"
    elif relation > tol:
        certificate = "S_n* S_%d = S_%d*" % (index, n - index)
    elif not projection.holds:
        certificate = projection.certificate or "projection contraction"
    else:
        certificate = None
    return Verdict.of(defect, tol, certificate, ("symbol-level identities",))


def shift_relation_defect(phi: MatrixSymbol, psi: MatrixSymbol) -> float:
    """
    Defect of M_z* M_phi = M_psi* for polynomial symbols. M_z* M_phi is the Toeplitz operator with symbol
    conj(z) phi(z), so the relation holds iff phi has degree <= 1, psi has degree <= 1, C_1(phi) = C_0(psi)* and
    C_0(phi) = C_1(psi)*.
    """
    defect = max(
        opnorm(phi.coefficient(1) - psi.coefficient(0).conj().T),
        opnorm(phi.coefficient(0) - psi.coefficient(1).conj().T),
    )
    for k in range(2, max(phi.degree, psi.degree) + 1):
        defect = max(defect, opnorm(phi.coefficient(k)), opnorm(psi.coefficient(k)))
    return defect


def symbol_contraction_verdict(
    symbols: Sequence[MatrixSymbol],
    budget: Budget = None,
    seed=None,
    tol: float = VN_TOL,
    samples: int = None,
) -> Verdict:
    """
    Sampled check that (M_Psi_1, ..., M_Psi_m) is a Gamma_m-contraction, using ||q(M_Psi)|| = ||q(Psi)||_inf.
    Pointwise normal commuting symbols are decided on torus samples by the joint spectrum of Psi(z); otherwise the
    polynomial battery is run against symbol sup norms.
    """
    budget = budget or Budget()
    symbols = list(symbols)
    m = len(symbols)
    samples = samples or budget.grid

    if m == 1:
        norm = symbol_sup(symbols[0], max(samples, 64))
        margin = norm.value - 1.0
        return Verdict.of(
            margin,
            tol,
            ("z", norm.argmax) if margin > tol else None,
            ("exact: Gamma_1 is the closed disc",),
        )

    zs = np.exp(2j * np.pi * np.arange(samples) / samples)
    stacks = [phi(zs) for phi in symbols]
    pointwise = [MatrixTuple([stack[k] for stack in stacks]) for k in range(samples)]

    if all(
        commutation_defect(P) <= COMMUTING_TOL * P.scale()
        and is_normal_tuple(P, COMMUTING_TOL * P.scale()).holds
        for P in pointwise
    ):
        verdicts = parallel_map(lambda P: contraction_verdict(P, budget, seed, tol), pointwise)
        worst = int(np.argmax([v.defect for v in verdicts]))
        v = verdicts[worst]
        certificate = ("z", complex(zs[worst]), v.certificate) if not v.holds else None
        diagnostics = ("pointwise joint spectra on %d samples" % samples,)
        return Verdict.of(v.defect, tol, certificate, diagnostics)

    rng = np.random.default_rng(seed)
    battery = canonical_battery(m, budget.max_degree) + random_battery(
        m, budget.random_polys, budget.max_degree, rng
    )
    d = symbols[0].shape[0]

    def margin_of(item):
        label, q = item
        product = q.apply(symbols, MatrixSymbol.identity(d))
        sup_norm = symbol_sup(product, max(samples, 64)).value
        sup = sup_on_gamma(q, m, budget.grid, budget.refine_iters).value
        return Violation(label, q, sup_norm - sup)

    results = parallel_map(margin_of, battery)
    worst = max(results, key=lambda v: v.margin)
    return Verdict.of(
        worst.margin,
        tol,
        worst if worst.margin > tol else None,
        ("battery of %d polynomials against symbol sup norms" % len(results),),
    )


def is_gamma_isometry(
    S, tol: float = DEFAULT_TOL, grid: int = 64, budget: Budget = None, seed=None
) -> Verdict:
    """
    S_n* S_n = I, S_n* S_i = S_(n-i)* and (gamma_i S_i) a Gamma_(n-1)-contraction. Symbolic tuples are checked on
    their symbols: the identities coefficientwise, the contraction through symbol sup norms.
    """
    budget = (budget or Budget())._replace(grid=grid)

    if isinstance(S, SymbolicTuple):
        return _isometry_of_symbols(S, tol, budget, seed)

    S = as_tuple(S)
    iso, _, relation, index = _unitary_defects(S)
    commuting = commutation_defect(S) / S.scale()
    projection = _projection_verdict(S, tol, budget, seed)

    defect = max(iso, relation, commuting, projection.defect)
    if commuting > tol:
        certificate = "commuting"
    elif iso > tol:
        certificate = "S_n isometric"
    elif relation > tol:
        certificate = "S_n* S_%d = S_%d*" % (index, S.n - index)
    elif not projection.holds:
        certificate = projection.certificate or "projection contraction"
    else:
        certificate = None
    return Verdict.of(defect, tol, certificate)


def is_gamma_coisometry(
    S, tol: float = DEFAULT_TOL, grid: int = 64, budget: Budget = None, seed=None
) -> Verdict:
    """S_n S_n* = I, S_n S_i* = S_(n-i) and the contraction condition: the isometry test on the adjoint tuple."""
    adjoint = S.adjoint() if isinstance(S, (SymbolicTuple, MatrixTuple)) else as_tuple(S).adjoint()
    return is_gamma_isometry(adjoint, tol, grid, budget, seed)


def product_unitary_promotion(T, tol: float = DEFAULT_TOL, grid: int = 64, seed=None) -> Verdict:
    """
    For commuting contractions whose product is unitary: each factor is unitary and s(T) is a Gamma_n-unitary.

    :raises PreconditionError: naming the failed precondition (commuting, contractive, product-unitary)
    """
    T = as_tuple(T)
    if commutation_defect(T) > COMMUTING_TOL * T.scale():
        raise PreconditionError("commuting", "factors do not commute")

    norms = T.norms()
    if np.any(norms > 1 + tol):
        worst = int(np.argmax(norms))
        raise PreconditionError("contractive", "||T_%d|| = %.6g > 1" % (worst + 1, norms[worst]))

    product = np.eye(T.dim, dtype=complex)
    for m in T:
        product = product @ m
    eye = np.eye(T.dim)
    unitarity = max(
        opnorm(product.conj().T @ product - eye), opnorm(product @ product.conj().T - eye)
    )
    if unitarity > tol:
        raise PreconditionError(
            "product-unitary", "product is not unitary (defect %.3e)" % unitarity
        )

    # error in each factor is controlled by the product defect times the number of factors
    factor_tol = max(tol, T.n * unitarity)
    factors = [max(opnorm(m.conj().T @ m - eye), opnorm(m @ m.conj().T - eye)) for m in T]
    worst = int(np.argmax(factors))
    if factors[worst] > factor_tol:
        return Verdict.of(factors[worst], tol, "T_%d unitary" % (worst + 1))

    symmetrized = is_gamma_unitary(symmetrize_tuple(T), max(tol, factor_tol), grid, seed=seed)
    return Verdict.of(
        max(factors[worst], symmetrized.defect),
        max(tol, factor_tol),
        symmetrized.certificate,
        symmetrized.diagnostics,
    )
