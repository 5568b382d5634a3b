import numpy as np
import pytest

from gammakit.classifiers import (
    canonical_battery,
    contraction_verdict,
    is_gamma_coisometry,
    is_gamma_isometry,
    is_gamma_unitary,
    product_unitary_promotion,
    pullback_embed,
    pullback_project,
    random_battery,
    sup_on_gamma,
    unitary_generators,
    vn_margin,
)
from gammakit.core import VN_TOL
from gammakit.exceptions import DimensionMismatchError, PreconditionError
from gammakit.fixtures import kv_margin, random_commuting_unitaries, random_gamma_unitary
from gammakit.geometry import embed, project, sample
from gammakit.operators import (
    MatrixTuple,
    compress,
    embed_tuple,
    joint_diagonalize,
    project_tuple,
    symmetrize_tuple,
)
from gammakit.symmetric import MultiPoly, kv_reduced


def random_poly(rng, n, degree=2) -> MultiPoly:
    terms = {}
    for _ in range(5):
        exps = tuple(int(e) for e in rng.integers(0, degree + 1, size=n))
        terms[exps] = complex(rng.standard_normal(), rng.standard_normal())
    return MultiPoly(n, terms)


class TestSupOnGamma:
    def test_examples(self):
        assert sup_on_gamma(MultiPoly.coordinate(2, 0), grid=32).value == pytest.approx(2)
        assert sup_on_gamma(MultiPoly.coordinate(3, 2), grid=32).value == pytest.approx(1)
        assert sup_on_gamma(MultiPoly.constant(2), grid=32).value == pytest.approx(1)

    def test_kv_reduction(self):
        result = sup_on_gamma(kv_reduced(), grid=32)
        assert result.value == pytest.approx(5)
        assert result.resolution == 32
        assert result.certified_error > 0

    def test_threaded_agrees_with_serial(self, runtime):
        result = sup_on_gamma(kv_reduced(), grid=24, refine_iters=1)
        assert result.value == pytest.approx(5)

    def test_argmax_attains_value(self):
        q = MultiPoly(2, {(1, 0): 1, (0, 1): 1j})
        result = sup_on_gamma(q, grid=32)
        s = np.array([result.argmax.sum(), result.argmax.prod()])
        assert abs(q(s)) == pytest.approx(result.value)

    def test_argmax_is_not_shared(self):
        q = MultiPoly(2, {(1, 0): 1, (0, 1): 1j})
        first = sup_on_gamma(q, grid=32)
        expected = first.argmax.copy()
        first.argmax[:] = 0
        assert np.array_equal(sup_on_gamma(q, grid=32).argmax, expected)

    def test_preconditions(self):
        with pytest.raises(DimensionMismatchError):
            sup_on_gamma(MultiPoly.coordinate(2, 0), n=3)
        with pytest.raises(ValueError):
            sup_on_gamma(MultiPoly.coordinate(2, 0), grid=2)


class TestVonNeumannMargin:
    def test_examples(self):
        margin = vn_margin(MatrixTuple.scalar([2, 1]), MultiPoly.coordinate(2, 0), grid=32)
        assert abs(margin) < 1e-9
        assert abs(vn_margin(MatrixTuple.scalar([3, 1]), MultiPoly.constant(2), grid=32)) < 1e-12

    def test_gamma_unitary_has_no_margin(self, rng):
        s = random_gamma_unitary(3, 3, rng)
        for q in [kv_reduced(), MultiPoly.coordinate(3, 0) * MultiPoly.coordinate(3, 1)]:
            assert vn_margin(s, q, grid=32) <= 1e-8

    def test_kv_triple(self, kv):
        margin = vn_margin(symmetrize_tuple(kv), kv_reduced(), grid=32)
        assert margin == pytest.approx(kv_margin(), abs=1e-9)

    @pytest.mark.timeout(120)
    def test_canonical_battery_on_contractions(self, rng):
        for n in range(2, 5):
            battery = canonical_battery(n, 3)
            tuples = [random_gamma_unitary(n, 3, rng)]
            for r in (0.3, 0.9):
                tuples.append(symmetrize_tuple(random_commuting_unitaries(n, 3, rng).scaled(r)))

            for s in tuples:
                for label, q in battery:
                    assert vn_margin(s, q, grid=32) <= VN_TOL, (n, label)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            vn_margin(MatrixTuple.scalar([1, 1]), kv_reduced())


class TestContractionVerdict:
    def test_scalar_outside(self, budget):
        verdict = contraction_verdict(MatrixTuple.scalar([3, 1]), budget, seed=1)
        assert not verdict.holds
        assert verdict.certificate.label == "x1"
        assert verdict.certificate.margin == pytest.approx(1)

    def test_scalar_inside(self, budget):
        assert contraction_verdict(MatrixTuple.scalar([2, 1]), budget, seed=1).holds
        assert contraction_verdict(MatrixTuple.scalar([0, 0, 0]), budget, seed=1).holds

    def test_disc(self):
        assert contraction_verdict([0.5 * np.eye(2)]).holds
        verdict = contraction_verdict([2 * np.eye(2)])
        assert not verdict.holds
        assert verdict.certificate.label == "x1"
        assert verdict.defect == pytest.approx(1)

    def test_gamma_unitaries(self, rng, budget):
        for n in range(2, 5):
            assert contraction_verdict(random_gamma_unitary(n, 3, rng), budget, seed=2).holds

    def test_kv_triple(self, kv, budget):
        verdict = contraction_verdict(symmetrize_tuple(kv), budget, seed=3)
        assert not verdict.holds
        assert verdict.defect >= kv_margin() - 1e-9
        assert verdict.certificate.margin > 0

    def test_extra_battery(self, kv, budget):
        battery = [("kv-again", kv_reduced())]
        verdict = contraction_verdict(symmetrize_tuple(kv), budget, seed=3, battery=battery)
        assert not verdict.holds

    def test_runtime_does_not_change_verdict(self, runtime, kv, budget):
        verdict = contraction_verdict(symmetrize_tuple(kv), budget, seed=3)
        assert not verdict.holds
        assert verdict.defect >= kv_margin() - 1e-9


class TestBatteries:
    def test_canonical_battery(self):
        labels = [label for label, _ in canonical_battery(3, 4)]
        assert labels[:4] == ["1", "x1", "x2", "x3"]
        assert "kv" in labels
        assert "kv" not in [label for label, _ in canonical_battery(2, 4)]

    def test_random_battery_is_seeded(self):
        a = random_battery(2, 5, 3, np.random.default_rng(1))
        b = random_battery(2, 5, 3, np.random.default_rng(1))
        assert [q for _, q in a] == [q for _, q in b]
        assert all(q.degree <= 3 for _, q in a)


class TestHeredity:
    def test_pullback_project(self, rng):
        for n in range(2, 5):
            q = random_poly(rng, n - 1)
            pulled = pullback_project(q, n)
            for s in sample(n, 5, seed=rng):
                assert pulled(s.s) == pytest.approx(q(project(s).s))

    def test_pullback_embed(self, rng):
        for n in range(1, 4):
            q = random_poly(rng, n + 1)
            alpha = 0.3 - 0.4j
            pulled = pullback_embed(q, alpha)
            for s in sample(n, 5, seed=rng):
                assert pulled(s.s) == pytest.approx(q(embed(s, alpha).s))

    def test_pullback_dimensions(self):
        with pytest.raises(DimensionMismatchError):
            pullback_project(MultiPoly.coordinate(3, 0), 3)
        with pytest.raises(DimensionMismatchError):
            pullback_embed(MultiPoly.coordinate(1, 0), 0.5)

    def test_restriction_to_joint_eigenspace(self, rng, budget):
        for n in range(2, 5):
            s = random_gamma_unitary(n, 4, rng)
            _, q = joint_diagonalize(s)
            restricted = compress(s, q[:, :2])
            assert restricted.dim == 2
            assert contraction_verdict(restricted, budget, seed=1).holds
            assert is_gamma_unitary(restricted, budget=budget).holds

    def test_restriction_of_triangular_tuple(self, budget):
        t1 = np.array([[0.5, 0.3], [0.0, 0.2]])
        t2 = 0.5 * t1 + 0.1 * np.eye(2)
        s = symmetrize_tuple([t1, t2])
        restricted = compress(s, np.array([[1.0], [0.0]]))
        assert np.allclose(restricted.mats, [[[0.5 + 0.35]], [[0.5 * 0.35]]])
        assert contraction_verdict(restricted, budget, seed=1).holds

    def test_projection_and_embedding_preserve_contractions(self, rng, budget):
        for n in range(2, 5):
            s = random_gamma_unitary(n, 3, rng)
            assert contraction_verdict(project_tuple(s), budget, seed=1).holds
            assert contraction_verdict(embed_tuple(s, np.exp(0.4j)), budget, seed=1).holds
            assert contraction_verdict(embed_tuple(s, 0.5), budget, seed=1).holds


class TestGammaUnitary:
    def test_example(self, budget):
        s = symmetrize_tuple([np.diag([1, 1j]), np.diag([-1, 1])])
        verdict = is_gamma_unitary(s, budget=budget)
        assert verdict.holds
        assert verdict.diagnostics == ()

    def test_non_unitary_last_entry(self, budget):
        verdict = is_gamma_unitary([np.zeros((2, 2)), 0.5 * np.eye(2)], budget=budget)
        assert not verdict.holds
        assert verdict.certificate == "S_n unitary"

    def test_point_outside(self, budget):
        verdict = is_gamma_unitary(MatrixTuple.scalar([3, 1]), budget=budget)
        assert not verdict.holds
        assert verdict.certificate.label == "x1"

    def test_random(self, rng, budget):
        for n in range(1, 5):
            verdict = is_gamma_unitary(random_gamma_unitary(n, 4, rng), budget=budget)
            assert verdict.holds
            assert verdict.diagnostics == ()

    @pytest.mark.timeout(120)
    def test_perturbed_are_rejected(self, rng, budget):
        for n in range(1, 5):
            for _ in range(3):
                s = random_gamma_unitary(n, 3, rng)
                noise = []
                for _ in range(n):
                    e = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
                    noise.append(1e-3 * e / np.linalg.norm(e, 2))
                perturbed = MatrixTuple([m + e for m, e in zip(s.mats, noise)])
                assert not is_gamma_unitary(perturbed, budget=budget).holds

    def test_unitary_is_isometry_and_coisometry(self, rng, budget):
        s = random_gamma_unitary(3, 3, rng)
        assert is_gamma_isometry(s, budget=budget).holds
        assert is_gamma_coisometry(s, budget=budget).holds

    def test_shift_relation(self, budget):
        # unitary S_2 but S_2* S_1 != S_1*
        verdict = is_gamma_isometry(MatrixTuple.scalar([1j, 1]), budget=budget)
        assert not verdict.holds
        assert verdict.certificate == "S_n* S_1 = S_1*"


class TestUnitaryGenerators:
    def test_round_trip(self, rng):
        for n in range(1, 5):
            s = random_gamma_unitary(n, 4, rng)
            u = unitary_generators(s)
            eye = np.eye(4)
            for m in u:
                assert np.allclose(m.conj().T @ m, eye, atol=1e-8)
            assert symmetrize_tuple(u).distance(s) < 1e-8

    def test_example(self):
        s = symmetrize_tuple([np.diag([1, 1j]), np.diag([-1, 1])])
        u = unitary_generators(s)
        assert symmetrize_tuple(u).distance(s) < 1e-9

    def test_not_gamma_unitary(self):
        with pytest.raises(PreconditionError) as e:
            unitary_generators(MatrixTuple.scalar([3, 1]))
        assert e.value.check == "gamma-unitary"


class TestProductUnitaryPromotion:
    def test_unitaries(self, rng):
        assert product_unitary_promotion(random_commuting_unitaries(3, 3, rng)).holds

    def test_not_contractive(self):
        with pytest.raises(PreconditionError) as e:
            product_unitary_promotion([0.5 * np.eye(2), 2 * np.eye(2)])
        assert e.value.check == "contractive"

    def test_product_not_unitary(self):
        with pytest.raises(PreconditionError) as e:
            product_unitary_promotion([0.5 * np.eye(2), np.eye(2)])
        assert e.value.check == "product-unitary"

    def test_not_commuting(self):
        with pytest.raises(PreconditionError) as e:
            product_unitary_promotion([np.array([[0, 1], [1, 0]]), np.diag([1, -1])])
        assert e.value.check == "commuting"

    def test_scalar_point(self):
        assert product_unitary_promotion(MatrixTuple.scalar([1j, -1j, 1])).holds
