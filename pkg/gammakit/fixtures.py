"""
Constructions with known answers: random commuting unitaries and Gamma_n-unitaries, admissible parameter tuples, the
Kaijser-Varopoulos triple and an inner symbol whose range is not invariant under a model.
"""
from typing import Tuple

import numpy as np
from scipy.stats import unitary_group

from gammakit.geometry import sample
from gammakit.model.blh import InnerSymbol
from gammakit.model.hardy import ModelTuple, SymbolTuple
from gammakit.operators import MatrixTuple, symmetrize_tuple


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-distributed d x d unitary."""
    rng = _rng(seed)
    if d == 1:
        return np.array([[np.exp(2j * np.pi * rng.uniform())]])
    return unitary_group.rvs(d, random_state=rng)


def random_commuting_unitaries(n: int, d: int, seed=None) -> MatrixTuple:
    """n unitaries diagonal in a common random basis, with eigenvalues uniform on the circle."""
    rng = _rng(seed)
    w = random_unitary(d, rng)
    angles = rng.uniform(0.0, 2 * np.pi, size=(n, d))
    return MatrixTuple([w @ np.diag(np.exp(1j * a)) @ w.conj().T for a in angles])


def random_gamma_unitary(n: int, d: int, seed=None) -> MatrixTuple:
    """s(U) for random commuting unitaries U."""
    return symmetrize_tuple(random_commuting_unitaries(n, d, seed))


def admissible_diagonal_symbols(n: int, d: int, seed=None) -> SymbolTuple:
    """
    Diagonal A_i whose k-th diagonal entries form a point of the distinguished boundary of Gamma_(n-1); then
    (Phi_1(z), ..., Phi_(n-1)(z), z) lies in the distinguished boundary of Gamma_n for every z on the circle.
    """
    if n < 2:
        raise ValueError("parameter tuples need n >= 2")
    points = sample(n - 1, d, boundary=True, seed=_rng(seed))
    entries = np.array([p.s for p in points])
    return SymbolTuple(d, [np.diag(entries[:, i]) for i in range(n - 1)])


def admissible_conjugated_symbols(n: int, d: int, seed=None) -> SymbolTuple:
    """An admissible diagonal tuple under one common random unitary conjugation."""
    rng = _rng(seed)
    return admissible_diagonal_symbols(n, d, rng).conjugate_by(random_unitary(d, rng))


def kv_triple() -> MatrixTuple:
    """
    Commuting contractions T_1, T_2, T_3 on C^5 = span(e, f_1, f_2, f_3, g) with T_j e = f_j, T_j f_k = a_jk g,
    T_j g = 0 and a = (J - 2I) / sqrt(3). The polynomial sum z_i^2 - 2 sum_(i<j) z_i z_j has sup 5 on the torus but
    norm 3 sqrt(3) on this triple.
    """
    a = (np.ones((3, 3)) - 2 * np.eye(3)) / np.sqrt(3)
    mats = []
    for j in range(3):
        t = np.zeros((5, 5))
        t[1 + j, 0] = 1.0
        t[4, 1:4] = a[j]
        mats.append(t)
    return MatrixTuple(mats)


def kv_margin() -> float:
    """||p(T)|| - sup |p| for the Kaijser-Varopoulos triple."""
    return 3 * np.sqrt(3) - 5


def non_invariant_blh_fixture() -> Tuple[ModelTuple, InnerSymbol]:
    """
    The n = 2 model with A_1 = J / 2 (J the 2 x 2 nilpotent shift) and Theta = diag(z, 1):
    Theta^-1 Phi_1 Theta has the coefficient J / 2 at z^-1.
    """
    nilpotent = np.array([[0.0, 1.0], [0.0, 0.0]])
    model = ModelTuple(SymbolTuple(2, [0.5 * nilpotent]))
    return model, InnerSymbol.diagonal([1, 0])
