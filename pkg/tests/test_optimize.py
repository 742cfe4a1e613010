import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hydra_embed.embed import EmbeddingError, PoincareEmbedding, hydra
from hydra_embed.optimize import (
    OptimizerSettings,
    embedding_from_params,
    equiangular_adjust,
    hydra_plus,
    lift_params,
    minimize_stress,
    params_from_embedding,
    random_params,
    random_restarts,
    stress,
    stress_gradient,
    stress_of_params,
)

from helpers import (
    central_difference_gradient,
    naive_distance_matrix,
    naive_stress_squared,
    random_distance_matrix,
    sample_hyperboloid,
)


def exact_instance(rng, n=12, d=2, max_radius=2.0):
    P = sample_hyperboloid(rng, n, d, max_radius)
    return P[:, 1:], naive_distance_matrix(P)


class TestStress:
    def test_exact_configuration(self, rng):
        Y, D = exact_instance(rng)
        assert stress(lift_params(Y), D) == pytest.approx(0.0, abs=1e-6)
        assert stress_of_params(Y, D) == pytest.approx(0.0, abs=1e-6)

    def test_coincident_pair(self):
        X = np.array([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        D = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert stress(X, D) == pytest.approx(np.sqrt(2.0), rel=1e-15)

    @pytest.mark.parametrize("kappa", [1.0, 0.3])
    def test_matches_double_loop(self, rng, kappa):
        Y = random_params(9, 2, rng)
        D = random_distance_matrix(rng, 9)
        expected = np.sqrt(naive_stress_squared(Y, D, kappa))
        assert stress(lift_params(Y), D, kappa) == pytest.approx(expected, rel=1e-12)
        assert stress_of_params(Y, D, kappa) == pytest.approx(expected, rel=1e-12)
        assert stress(embedding_from_params(Y, kappa), D, kappa) == pytest.approx(expected, rel=1e-12)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(EmbeddingError):
            stress(lift_params(random_params(3, 2, rng)), np.zeros((4, 4)))


class TestGradient:
    def test_zero_at_exact_configuration(self, rng):
        Y, D = exact_instance(rng)
        # D derived from the same Y through the hyperboloid, so residuals are rounding only
        assert np.max(np.abs(stress_gradient(Y, D))) <= 1e-8 * max(1.0, np.abs(Y).max())

    def test_five_points_against_finite_differences(self, rng):
        Y = random_params(5, 2, rng)
        D = random_distance_matrix(rng, 5)
        fd = central_difference_gradient(lambda Z: naive_stress_squared(Z, D), Y)
        np.testing.assert_allclose(stress_gradient(Y, D), fd, rtol=1e-5, atol=1e-8)

    def test_pair_antisymmetric(self):
        Y = np.array([[0.3, 0.0], [-0.3, 0.0]])
        D = np.array([[0.0, 2.0], [2.0, 0.0]])
        g = stress_gradient(Y, D)
        np.testing.assert_allclose(g[0], -g[1], atol=1e-14)
        assert g[0, 0] < 0  # too close together: gradient pushes the points apart

    @pytest.mark.parametrize("kappa", [0.5, 2.0])
    def test_curvature(self, rng, kappa):
        Y = random_params(6, 3, rng)
        D = random_distance_matrix(rng, 6)
        fd = central_difference_gradient(lambda Z: naive_stress_squared(Z, D, kappa), Y)
        np.testing.assert_allclose(stress_gradient(Y, D, kappa), fd, rtol=1e-5, atol=1e-8)

    def test_coincident_points_finite(self):
        Y = np.array([[0.2, 0.1], [0.2, 0.1], [0.0, -0.4]])
        D = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float)
        assert np.all(np.isfinite(stress_gradient(Y, D)))


class TestMinimizeStress:
    def test_already_exact(self):
        Y = np.array([[0.0, 0.0], [np.sinh(1.0), 0.0]])
        D = np.array([[0.0, 1.0], [1.0, 0.0]])
        fit = minimize_stress(Y, D)
        np.testing.assert_array_equal(fit.params, Y)
        assert fit.stress == pytest.approx(0.0, abs=1e-7)

    def test_perturbed_exact_configuration(self, rng):
        Y, D = exact_instance(rng, n=15)
        Y0 = Y + rng.uniform(-0.01, 0.01, size=Y.shape)
        fit = minimize_stress(Y0, D)
        assert fit.stress < 0.1 * stress_of_params(Y0, D)

    def test_random_start_on_karate_improves(self, karate_distances):
        Y0 = random_params(34, 2, 7)
        fit = minimize_stress(Y0, karate_distances, opts=OptimizerSettings(max_iterations=50))
        assert fit.stress < stress_of_params(Y0, karate_distances)
        assert fit.initial_stress == pytest.approx(stress_of_params(Y0, karate_distances))

    def test_monotone_even_when_truncated(self, rng):
        D = random_distance_matrix(rng, 10)
        Y0 = random_params(10, 2, rng)
        for iters in (1, 2, 5):
            fit = minimize_stress(Y0, D, opts=OptimizerSettings(max_iterations=iters))
            assert fit.stress <= stress_of_params(Y0, D) + 1e-12

    def test_settings_validated(self):
        with pytest.raises(ValueError):
            OptimizerSettings(max_iterations=0)
        with pytest.raises(ValueError):
            OptimizerSettings(gradient_tolerance=0.0)


class TestParametrization:
    @settings(max_examples=50)
    @given(arrays(np.float64, (6, 3), elements=st.floats(-50, 50)))
    def test_lift_on_hyperboloid(self, Y):
        X = lift_params(Y)
        assert np.all(X[:, 0] > 0)
        norms = X[:, 0] ** 2 - np.sum(X[:, 1:] ** 2, axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-12 * max(1.0, np.max(X[:, 0] ** 2)))

    def test_round_trip(self, rng):
        Y = random_params(20, 2, rng)
        np.testing.assert_allclose(params_from_embedding(embedding_from_params(Y)), Y, atol=1e-12)


class TestEquiangular:
    def test_full_grid(self):
        emb = PoincareEmbedding.from_angles(np.full(4, 0.5), [0.1, 0.2, 0.3, 0.4])
        out = equiangular_adjust(emb, 1.0)
        np.testing.assert_allclose(out.theta, [0, np.pi / 2, np.pi, 3 * np.pi / 2], atol=1e-15)

    def test_identity(self):
        theta = np.array([0.3, 2.0, 5.0, 1.0])
        emb = PoincareEmbedding.from_angles(np.full(4, 0.5), theta)
        np.testing.assert_allclose(equiangular_adjust(emb, 0.0).theta, theta, atol=1e-15)

    def test_midpoint(self):
        emb = PoincareEmbedding.from_angles([0.2, 0.4], [0.0, 1.0])
        np.testing.assert_allclose(equiangular_adjust(emb, 0.5).theta, [0.0, (1 + np.pi) / 2], atol=1e-15)

    def test_ties_by_index(self):
        emb = PoincareEmbedding.from_angles(np.full(3, 0.3), [1.0, 1.0, 0.5])
        np.testing.assert_allclose(equiangular_adjust(emb, 1.0).theta, [2 * np.pi / 3, 4 * np.pi / 3, 0.0],
                                   atol=1e-15)

    def test_requires_dim_two(self):
        emb = PoincareEmbedding(np.array([0.1, 0.2]), np.array([[1.0, 0, 0], [0, 1.0, 0]]))
        with pytest.raises(EmbeddingError):
            equiangular_adjust(emb)

    @given(
        arrays(np.float64, 12, elements=st.floats(0, 2 * np.pi, exclude_max=True)),
        st.floats(0, 1),
    )
    def test_preserves_radii_and_order(self, theta, lam):
        radii = np.linspace(0, 0.9, 12)
        emb = PoincareEmbedding.from_angles(radii, theta)
        out = equiangular_adjust(emb, lam)
        np.testing.assert_array_equal(out.radii, emb.radii)
        before = np.argsort(emb.theta, kind="stable")
        adjusted = (1 - lam) * emb.theta + lam * np.argsort(before) * (2 * np.pi / 12)
        # cyclic order by angle, ties by index
        assert np.all(np.diff(adjusted[before]) >= 0)
        np.testing.assert_allclose(out.theta, adjusted % (2 * np.pi), atol=1e-12)


class TestHydraPlus:
    def test_exact_input(self, rng):
        P = sample_hyperboloid(rng, 15, 2, 2.0)
        D = naive_distance_matrix(P)
        res = hydra_plus(D, 2, equi_lambda=0.0)
        assert res.fit.initial_stress == pytest.approx(0.0, abs=1e-6)
        assert res.stress == pytest.approx(0.0, abs=1e-6)

    def test_refines_hydra_on_karate(self, karate_distances):
        base = stress(hydra(karate_distances).embedding, karate_distances)
        res = hydra_plus(karate_distances)
        assert res.stress <= base
        assert res.stress <= res.fit.initial_stress
        assert stress(res.embedding, karate_distances) == pytest.approx(res.stress, rel=1e-9)

    def test_higher_dimension(self, karate_distances):
        res = hydra_plus(karate_distances, d=3)
        assert res.embedding.dim == 3
        assert res.stress <= stress(hydra(karate_distances, 3).embedding, karate_distances)

    def test_random_restarts_reproducible(self, karate_distances):
        opts = OptimizerSettings(seed=5, max_iterations=30)
        a = random_restarts(karate_distances, 2, 1.0, opts, repeats=3)
        b = random_restarts(karate_distances, 2, 1.0, opts, repeats=3)
        assert [f.stress for f in a] == [f.stress for f in b]
        assert len({f.stress for f in a}) == 3
