import io

import numpy as np
import pytest

from gammakit.core import GammaPoint, match_distance
from gammakit.exceptions import DimensionMismatchError, PreconditionError
from gammakit.geometry import (
    UniPoly,
    boundary_from_mu,
    char_poly,
    cohn_verdict,
    embed,
    fiber,
    in_gamma,
    is_multiple_root,
    is_self_inversive,
    on_boundary,
    project,
    roots,
    sample,
    samples_to_csv,
    settle_roots,
)
from gammakit.symmetric import symmetrize_point


class TestCharPoly:
    def test_examples(self):
        assert np.allclose(char_poly(GammaPoint([2, 1])).coeffs, [1, -2, 1])
        assert np.allclose(char_poly(GammaPoint([0, 0, 0])).coeffs, [0, 0, 0, 1])
        assert np.allclose(char_poly(GammaPoint([3, 3, 1])).coeffs, [-1, 3, -3, 1])

    def test_roots_examples(self):
        assert match_distance(roots(UniPoly([1, -2, 1])), [1, 1]) < 1e-7
        assert match_distance(roots(UniPoly([1, 0, 1])), [1j, -1j]) < 1e-12
        expected = [(3 + np.sqrt(5)) / 2, (3 - np.sqrt(5)) / 2]
        assert match_distance(roots(UniPoly([1, -3, 1])), expected) < 1e-12

    def test_roots_of_zero_polynomial(self):
        with pytest.raises(ValueError):
            roots(UniPoly([0, 0]))

    def test_settle_roots_merges_multiple_roots(self):
        settled = settle_roots(UniPoly([-1, 3, -3, 1]))
        assert np.allclose(settled, [1, 1, 1], atol=1e-12)

    def test_settle_roots_keeps_distinct_roots(self):
        settled = settle_roots(UniPoly([1, -3, 1]))
        assert abs(settled[0] - settled[1]) > 2

    def test_settle_roots_keeps_close_distinct_roots(self):
        p = char_poly(symmetrize_point([1.004, 0.996, 1, 1, 1]))
        settled = settle_roots(p)
        assert np.max(np.abs(settled)) == pytest.approx(1.004, abs=1e-4)
        assert np.min(np.abs(settled)) == pytest.approx(0.996, abs=1e-4)

    def test_is_multiple_root(self):
        p = UniPoly([-1, 3, -3, 1])
        assert is_multiple_root(p, roots(p))
        assert not is_multiple_root(UniPoly([1, -3, 1]), roots(UniPoly([1, -3, 1])))

        close = char_poly(symmetrize_point(np.exp(1j * np.array([0.0, 0.004]))))
        assert not is_multiple_root(close, roots(close))


class TestMembership:
    def test_examples(self):
        assert in_gamma(GammaPoint([0, 0])).holds
        assert in_gamma(GammaPoint([3, 3, 1])).holds

        verdict = in_gamma(GammaPoint([3, 1]))
        assert not verdict.holds
        assert abs(verdict.certificate - (3 + np.sqrt(5)) / 2) < 1e-9
        assert abs(verdict.defect - ((3 + np.sqrt(5)) / 2 - 1)) < 1e-9

    def test_close_roots_outside(self):
        verdict = in_gamma(symmetrize_point([1.004, 0.996, 1, 1, 1]))
        assert not verdict.holds
        assert verdict.defect == pytest.approx(0.004, abs=1e-4)

    def test_disc_is_gamma_one(self):
        assert in_gamma(GammaPoint([0.5j])).holds
        assert not in_gamma(GammaPoint([1.5])).holds

    def test_samples_are_members(self):
        for n in range(1, 6):
            for s in sample(n, 50, seed=n):
                assert in_gamma(s).holds


class TestFiber:
    def test_examples(self):
        assert match_distance(fiber(GammaPoint([0, -1])), [1, -1]) < 1e-12
        assert np.allclose(fiber(GammaPoint([2, 1])), [1, 1])

    def test_pure_power(self):
        theta = 0.7
        for n in range(1, 6):
            s = GammaPoint([0] * (n - 1) + [np.exp(1j * theta)])
            lam = fiber(s)
            assert np.allclose(np.abs(lam), 1)
            assert np.allclose(lam ** n, (-1) ** (n + 1) * np.exp(1j * theta))

    def test_round_trip(self, rng):
        for n in range(1, 7):
            for s in sample(n, 30, seed=rng):
                assert symmetrize_point(fiber(s)).isclose(s, 1e-8)

    def test_ordering_is_deterministic(self):
        lam = fiber(GammaPoint([0, 0, 1]))
        angles = np.angle(lam)
        assert list(angles) == sorted(angles)


class TestSelfInversive:
    def test_examples(self):
        assert is_self_inversive(UniPoly([1, -2, 1])).holds
        verdict = is_self_inversive(UniPoly([1, -3, 1]))
        assert verdict.holds
        assert abs(verdict.certificate - 1) < 1e-12
        assert not is_self_inversive(UniPoly([0, -0.5, 1])).holds

    def test_unimodular_factor(self):
        # z^2 - i: reversed conjugate is i z^2 + 1 = i (z^2 - i)
        verdict = is_self_inversive(UniPoly([-1j, 0, 1]))
        assert verdict.holds
        assert abs(verdict.certificate - 1j) < 1e-12


class TestBoundary:
    @pytest.mark.parametrize("route", ["fiber", "recursive", "closure", "all"])
    def test_examples(self, route):
        assert on_boundary(GammaPoint([2, 1]), route=route).holds
        assert not on_boundary(GammaPoint([3, 1]), route=route).holds
        assert on_boundary(GammaPoint([1, -1, -1]), route=route).holds

    def test_circle_is_boundary_of_disc(self):
        assert on_boundary(GammaPoint([1j])).holds
        assert not on_boundary(GammaPoint([0.5])).holds

    def test_unknown_route(self):
        with pytest.raises(ValueError):
            on_boundary(GammaPoint([2, 1]), route="magic")

    @pytest.mark.parametrize("n", [3, 4, 5])
    @pytest.mark.parametrize("spacing", [0.004, 0.01])
    def test_routes_agree_near_multiple_roots(self, n, spacing):
        for center in (0.0, 1.3, -2.2):
            lam = np.exp(1j * (center + spacing * (np.arange(n) - (n - 1) / 2)))
            s = symmetrize_point(lam)

            for route in ("fiber", "recursive", "closure"):
                assert on_boundary(s, route=route).holds, (route, lam)

            verdict = on_boundary(s)
            assert verdict.holds
            assert verdict.diagnostics == ()
            assert in_gamma(s).holds
            assert symmetrize_point(fiber(s)).isclose(s, 1e-8)

    @pytest.mark.parametrize("route", ["fiber", "recursive", "closure", "all"])
    def test_close_roots_off_circle(self, route):
        assert not on_boundary(symmetrize_point([1.004, 0.996, 1, 1, 1]), route=route).holds

    @pytest.mark.timeout(120)
    def test_routes_agree_on_samples(self):
        for n in range(2, 6):
            points = sample(n, 100, boundary=True, seed=n) + sample(n, 100, seed=100 + n)
            for s in points:
                verdicts = [
                    on_boundary(s, 1e-8, route) for route in ("fiber", "recursive", "closure")
                ]
                assert len({v.holds for v in verdicts}) == 1, (s, verdicts)

    def test_boundary_samples(self):
        for n in range(1, 6):
            for s in sample(n, 50, boundary=True, seed=n):
                assert on_boundary(s).holds

    def test_cohn_on_boundary_samples(self):
        for n in range(2, 6):
            for s in sample(n, 50, boundary=True, seed=7 * n):
                assert cohn_verdict(s).holds

    def test_cohn_rejects_scaled_fibers(self, rng):
        # one root pushed inside, one outside, product still unimodular
        for n in range(2, 6):
            for _ in range(30):
                lam = np.exp(2j * np.pi * rng.uniform(size=n))
                r = rng.uniform(1.2, 2.0)
                lam[0] *= r
                lam[1] /= r
                s = symmetrize_point(lam)
                assert abs(abs(s.s[-1]) - 1) < 1e-12
                assert not cohn_verdict(s).holds
                assert not on_boundary(s).holds


class TestProjectEmbed:
    def test_project_examples(self):
        assert project(GammaPoint([3, 3, 1])).isclose(GammaPoint([2, 1]))
        assert project(GammaPoint([0, 0])).isclose(GammaPoint([0]))
        assert project(GammaPoint([2, 1])).isclose(GammaPoint([1]))

    def test_project_needs_two_coordinates(self):
        with pytest.raises(DimensionMismatchError):
            project(GammaPoint([0.5]))

    def test_embed_examples(self):
        s = GammaPoint([0.2, 0.1j])
        assert embed(s, 0).isclose(GammaPoint([0.2, 0.1j, 0]))
        assert embed(GammaPoint([2, 1]), 1).isclose(GammaPoint([3, 3, 1]))
        assert embed(GammaPoint([2, 1]), -1).isclose(GammaPoint([1, -1, -1]))

    def test_heredity(self, rng):
        for n in range(2, 6):
            for s in sample(n, 40, seed=rng):
                assert in_gamma(project(s), 1e-8).holds
                alpha = np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
                assert in_gamma(embed(s, alpha), 1e-8).holds

    def test_embed_boundary_heredity(self, rng):
        for n in range(1, 5):
            for s in sample(n, 20, boundary=True, seed=rng):
                alpha = np.exp(2j * np.pi * rng.uniform())
                assert on_boundary(embed(s, alpha), 1e-8).holds


class TestBoundaryFromMu:
    def test_examples(self):
        assert boundary_from_mu(GammaPoint([2, 1]), np.pi).isclose(GammaPoint([1, -1, -1]))
        assert boundary_from_mu(GammaPoint([2, 1]), 0).isclose(GammaPoint([3, 3, 1]))
        assert boundary_from_mu(GammaPoint([1]), 0).isclose(GammaPoint([2, 1]))

    def test_result_is_on_boundary(self, rng):
        for n in range(1, 5):
            for mu in sample(n, 20, boundary=True, seed=rng):
                s = boundary_from_mu(mu, rng.uniform(0, 2 * np.pi))
                assert s.n == n + 1
                assert on_boundary(s).holds

    def test_mu_off_boundary(self):
        with pytest.raises(PreconditionError) as e:
            boundary_from_mu(GammaPoint([0.5]), 0)
        assert e.value.check == "boundary"


class TestSample:
    def test_deterministic(self):
        a = sample(3, 10, boundary=True, seed=7)
        b = sample(3, 10, boundary=True, seed=7)
        assert a == b

    def test_csv(self):
        points = sample(3, 100, boundary=True, seed=7)
        text = samples_to_csv(points)
        assert text == samples_to_csv(sample(3, 100, boundary=True, seed=7))

        lines = text.splitlines()
        assert lines[0] == "s1_re,s1_im,s2_re,s2_im,s3_re,s3_im"
        assert len(lines) == 101

        first = [float(x) for x in lines[1].split(",")]
        assert np.allclose(first[0::2], points[0].s.real)

    def test_csv_to_stream(self):
        buf = io.StringIO()
        assert samples_to_csv(sample(2, 3, seed=1), buf) is None
        assert len(buf.getvalue().splitlines()) == 4
