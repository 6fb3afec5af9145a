"""Similarity, gap, stability, and TP/FP measures on feature subspaces."""

import numpy as np
import pytest
from helpers import centered_orthonormal, design, orthonormal_design, projection_from_sets
from scipy.optimize import minimize

from substab.linalg import AvgProjection, orthonormal_basis
from substab.metrics import (
    BasisCache,
    cone_similarity,
    is_maximal_stable,
    normalized_similarity,
    output_stability,
    prediction_gap,
    response_similarity,
    set_stability,
    subspace_similarity,
    true_false_positives,
    worst_case_similarity,
)


def plane_pair(theta: float, n: int = 24, seed: int = 0):
    """Columns 0,1 and 2,3 span planes with principal angles (0, theta)."""
    rng = np.random.default_rng(seed)
    E = centered_orthonormal(n, 3, rng)
    e1, e2, e3 = E.T
    cols = np.column_stack([e1, e2, e1, np.cos(theta) * e2 + np.sin(theta) * e3])
    return design(cols)


class TestSimilarity:
    def test_plane_pair_hand_values(self):
        X = plane_pair(np.pi / 3)
        assert subspace_similarity(X, (0, 1), (2, 3)) == pytest.approx(1.25, abs=1e-12)
        assert normalized_similarity(X, (0, 1), (2, 3)) == pytest.approx(0.625, abs=1e-12)
        assert worst_case_similarity(X, (0, 1), (2, 3)) == pytest.approx(0.25, abs=1e-12)

    def test_identical_sets(self):
        rng = np.random.default_rng(1)
        X = design(rng.standard_normal((30, 5)))
        assert subspace_similarity(X, (0, 2, 4), (0, 2, 4)) == pytest.approx(3.0, abs=1e-10)
        assert normalized_similarity(X, (0, 2, 4), (0, 2, 4)) == pytest.approx(1.0, abs=1e-10)
        assert worst_case_similarity(X, (0, 2, 4), (0, 2, 4)) == pytest.approx(1.0, abs=1e-10)

    def test_empty_set_conventions(self):
        rng = np.random.default_rng(2)
        X = orthonormal_design(10, 3, rng)
        assert subspace_similarity(X, (), (0, 1)) == 0.0
        assert normalized_similarity(X, (), (0, 1)) == 1.0
        assert normalized_similarity(X, (), ()) == 1.0
        assert worst_case_similarity(X, (), ()) == 1.0
        assert worst_case_similarity(X, (), (0,)) == 0.0

    def test_unequal_sizes_zero_worst_case(self):
        rng = np.random.default_rng(3)
        X = design(rng.standard_normal((20, 4)))
        assert worst_case_similarity(X, (0,), (0, 1)) == 0.0

    def test_rank_deficient_zero_worst_case(self):
        rng = np.random.default_rng(4)
        v = rng.standard_normal(20)
        X = design(np.column_stack([v, v, rng.standard_normal((20, 2))]))
        assert worst_case_similarity(X, (0, 1), (2, 3)) == 0.0

    def test_symmetry_and_bounds(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            X = design(rng.standard_normal((15, 6)))
            S1 = tuple(rng.choice(6, size=rng.integers(1, 4), replace=False))
            S2 = tuple(rng.choice(6, size=rng.integers(1, 4), replace=False))
            t12 = subspace_similarity(X, S1, S2)
            assert t12 == pytest.approx(subspace_similarity(X, S2, S1), abs=1e-10)
            assert -1e-12 <= t12 <= min(len(set(S1)), len(set(S2))) + 1e-12
            assert worst_case_similarity(X, S1, S2) <= normalized_similarity(X, S1, S2) + 1e-10


class TestPredictionGap:
    def test_plane_pair(self):
        theta = np.pi / 3
        X = plane_pair(theta)
        gap = prediction_gap(X, (0, 1), (2, 3))
        assert gap == pytest.approx(np.sin(theta) ** 2, abs=1e-12)
        assert gap == pytest.approx(1.0 - worst_case_similarity(X, (0, 1), (2, 3)), abs=1e-12)

    def test_identical_and_empty(self):
        rng = np.random.default_rng(6)
        X = design(rng.standard_normal((20, 4)))
        assert prediction_gap(X, (0, 1), (0, 1)) == pytest.approx(0.0, abs=1e-12)
        assert prediction_gap(X, (), ()) == 0.0
        assert prediction_gap(X, (0,), ()) == pytest.approx(1.0, abs=1e-12)

    def test_complement_identity_for_full_rank_equal_sizes(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            X = design(rng.standard_normal((25, 6)))
            gap = prediction_gap(X, (0, 1, 2), (3, 4, 5))
            wc = worst_case_similarity(X, (0, 1, 2), (3, 4, 5))
            assert gap == pytest.approx(1.0 - wc, abs=1e-9)


class TestResponseSimilarity:
    def test_hand_values(self):
        theta = np.pi / 3
        X = plane_pair(theta)
        shared = X.values[:, 0]
        split = X.values[:, 1]
        assert response_similarity(X, shared, (0, 1), (2, 3)) == pytest.approx(1.0, abs=1e-12)
        assert response_similarity(X, split, (0, 1), (2, 3)) == pytest.approx(
            np.cos(theta) ** 2, abs=1e-12
        )

    def test_zero_response_rejected(self):
        X = orthonormal_design(10, 2, np.random.default_rng(8))
        with pytest.raises(ValueError):
            response_similarity(X, np.zeros(10), (0,), (1,))

    def test_never_below_worst_case(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            X = design(rng.standard_normal((18, 5)))
            y = rng.standard_normal(18)
            r = response_similarity(X, y, (0, 1), (2, 3))
            assert r >= 1.0 - prediction_gap(X, (0, 1), (2, 3)) - 1e-10


def _cone_oracle(X, y, S1, S2, angle, starts=12, seed=0):
    """Multi-start SLSQP lower bound for the worst squared prediction
    difference over the cone of unit vectors within ``angle`` of y."""
    rng = np.random.default_rng(seed)
    Q1 = orthonormal_basis(X, S1).matrix
    Q2 = orthonormal_basis(X, S2).matrix
    yh = np.asarray(y, float) / np.linalg.norm(y)
    n = len(yh)
    c = np.cos(angle)

    def neg_obj(u):
        d = Q1 @ (Q1.T @ u) - Q2 @ (Q2.T @ u)
        return -float(d @ d)

    cons = [
        {"type": "eq", "fun": lambda u: float(u @ u) - 1.0},
        {"type": "ineq", "fun": lambda u: float(u @ yh) - c},
    ]
    best = 0.0
    inits = [yh]
    for _ in range(starts):
        w = rng.standard_normal(n)
        w -= (w @ yh) * yh
        nw = np.linalg.norm(w)
        if nw < 1e-12:
            continue
        a = angle * rng.uniform(0.2, 1.0)
        inits.append(np.cos(a) * yh + np.sin(a) * (w / nw))
    for u0 in inits:
        res = minimize(neg_obj, u0, constraints=cons, method="SLSQP",
                       options={"maxiter": 400, "ftol": 1e-14})
        u = res.x / np.linalg.norm(res.x)
        if u @ yh >= c - 1e-10:
            best = max(best, -neg_obj(u))
    return best


class TestConeSimilarity:
    def test_endpoint_zero_angle(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            X = design(rng.standard_normal((20, 5)))
            y = rng.standard_normal(20)
            assert cone_similarity(X, y, (0, 1), (2, 3), 0.0) == pytest.approx(
                response_similarity(X, y, (0, 1), (2, 3)), abs=1e-10
            )

    def test_endpoint_right_angle(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            X = design(rng.standard_normal((20, 5)))
            y = rng.standard_normal(20)
            assert cone_similarity(X, y, (0, 1), (2, 3), np.pi / 2) == pytest.approx(
                1.0 - prediction_gap(X, (0, 1), (2, 3)), abs=1e-10
            )

    def test_monotone_in_angle(self):
        rng = np.random.default_rng(12)
        X = design(rng.standard_normal((22, 6)))
        y = rng.standard_normal(22)
        grid = np.linspace(0.0, np.pi / 2, 25)
        vals = [cone_similarity(X, y, (0, 1, 2), (3, 4, 5), a) for a in grid]
        assert all(vals[i + 1] <= vals[i] + 1e-10 for i in range(len(vals) - 1))

    def test_matches_independent_solver(self):
        rng = np.random.default_rng(13)
        for k in range(8):
            X = design(rng.standard_normal((14, 6)))
            y = rng.standard_normal(14)
            angle = float(rng.uniform(0.15, 1.4))
            S1 = (0, 1) if k % 2 else (0, 1, 2)
            S2 = (2, 3) if k % 2 else (3, 4, 5)
            got = cone_similarity(X, y, S1, S2, angle)
            oracle = 1.0 - _cone_oracle(X, y, S1, S2, angle, seed=k)
            # the oracle is a lower bound on the worst difference, so it can
            # only exceed the exact value by its own convergence error
            assert got <= oracle + 1e-9
            assert got == pytest.approx(oracle, abs=1e-6)

    def test_identical_spans(self):
        rng = np.random.default_rng(14)
        X = design(rng.standard_normal((15, 4)))
        y = rng.standard_normal(15)
        assert cone_similarity(X, y, (0, 1), (0, 1), 0.9) == 1.0

    def test_invalid_inputs(self):
        rng = np.random.default_rng(15)
        X = design(rng.standard_normal((12, 4)))
        y = rng.standard_normal(12)
        with pytest.raises(ValueError):
            cone_similarity(X, y, (0,), (1,), -0.1)
        with pytest.raises(ValueError):
            cone_similarity(X, y, (0,), (1,), 2.0)
        with pytest.raises(ValueError):
            cone_similarity(X, np.zeros(12), (0,), (1,), 0.5)


class TestTrueFalsePositives:
    def test_orthonormal_overlap_count(self):
        rng = np.random.default_rng(16)
        X = orthonormal_design(20, 5, rng)
        tp, fp = true_false_positives(X, (0, 1, 2), (1, 2, 3))
        assert tp == pytest.approx(2.0, abs=1e-10)
        assert fp == pytest.approx(1.0, abs=1e-10)

    def test_partition_identity(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            X = design(rng.standard_normal((18, 6)))
            S_hat = tuple(rng.choice(6, size=3, replace=False))
            S_star = tuple(rng.choice(6, size=2, replace=False))
            tp, fp = true_false_positives(X, S_hat, S_star)
            assert tp + fp == pytest.approx(len(set(S_hat)), abs=1e-12)
            assert 0.0 <= tp <= len(set(S_hat)) + 1e-12
            assert fp >= -1e-12

    def test_empty_selection(self):
        X = orthonormal_design(10, 3, np.random.default_rng(18))
        tp, fp = true_false_positives(X, (), (0, 1))
        assert tp == 0.0 and fp == 0.0


class TestSetStability:
    def test_empty_set_is_one(self):
        rng = np.random.default_rng(19)
        X = orthonormal_design(12, 3, rng)
        P = projection_from_sets(X, [(0,), (1,)])
        assert set_stability((), P) == 1.0

    def test_orthogonal_equals_min_selection_proportion(self):
        rng = np.random.default_rng(20)
        X = orthonormal_design(30, 6, rng)
        sets = [(0, 1), (0, 2), (0, 1, 3), (0,), (1, 2), (0, 1)]
        P = projection_from_sets(X, sets)
        prop = np.zeros(6)
        for S in sets:
            for j in S:
                prop[j] += 1.0 / len(sets)
        for S in [(0,), (1,), (0, 1), (0, 1, 2), (3,), (4,)]:
            want = min(prop[j] for j in S)
            assert set_stability(S, P) == pytest.approx(want, abs=1e-12)

    def test_monotone_decreasing_under_growth(self):
        rng = np.random.default_rng(21)
        for _ in range(15):
            X = design(rng.standard_normal((20, 6)))
            sets = [tuple(rng.choice(6, size=2, replace=False)) for _ in range(8)]
            P = projection_from_sets(X, sets)
            S = tuple(rng.choice(6, size=2, replace=False))
            base = set_stability(S, P)
            for j in range(6):
                if j in S:
                    continue
                assert set_stability(S + (j,), P) <= base + 1e-10

    def test_rank_deficient_is_zero(self):
        rng = np.random.default_rng(22)
        v = rng.standard_normal(20)
        X = design(np.column_stack([v, v, rng.standard_normal(20)]))
        P = projection_from_sets(X, [(0,), (1,)])
        assert set_stability((0, 1), P) == 0.0

    def test_requires_design_or_cache(self):
        rng = np.random.default_rng(23)
        X = orthonormal_design(10, 2, rng)
        P = AvgProjection([orthonormal_basis(X, (0,))])  # no design attached
        with pytest.raises(ValueError):
            set_stability((0,), P)
        cache = BasisCache(X)
        assert set_stability((0,), P, cache) == pytest.approx(1.0, abs=1e-12)


class TestIsMaximalStable:
    def test_orthogonal_example(self):
        rng = np.random.default_rng(24)
        X = orthonormal_design(15, 3, rng)
        P = projection_from_sets(X, [(0, 1), (0, 1)])
        assert is_maximal_stable((0, 1), P, 0.8)
        assert not is_maximal_stable((0,), P, 0.8)  # extends to a stable superset
        assert not is_maximal_stable((0, 1, 2), P, 0.8)  # not stable itself
        assert not is_maximal_stable((2,), P, 0.8)


class TestOutputStability:
    def test_fewer_than_two_models(self):
        X = orthonormal_design(10, 3, np.random.default_rng(25))
        assert output_stability(X, []) == 1.0
        assert output_stability(X, [(0, 1)]) == 1.0

    def test_hand_value(self):
        X = plane_pair(np.pi / 3)
        models = [(0, 1), (2, 3), (0, 1)]
        # pairwise normalized similarities: 0.625, 1.0, 0.625
        assert output_stability(X, models) == pytest.approx(0.75, abs=1e-12)

    def test_identical_models(self):
        rng = np.random.default_rng(26)
        X = design(rng.standard_normal((15, 4)))
        assert output_stability(X, [(0, 2), (0, 2), (0, 2)]) == pytest.approx(1.0, abs=1e-10)


class TestBasisCache:
    def test_memoizes_and_normalizes_keys(self):
        rng = np.random.default_rng(27)
        X = design(rng.standard_normal((12, 4)))
        cache = BasisCache(X)
        b1 = cache.get((1, 0))
        b2 = cache.get((0, 1, 1))
        assert b1 is b2
        assert len(cache) == 1
        cache.get((2,))
        assert len(cache) == 2

    def test_cache_changes_no_values(self):
        rng = np.random.default_rng(28)
        X = design(rng.standard_normal((16, 5)))
        cache = BasisCache(X)
        a = subspace_similarity(X, (0, 1), (2, 3), cache)
        b = subspace_similarity(X, (0, 1), (2, 3))
        assert a == pytest.approx(b, abs=1e-14)
