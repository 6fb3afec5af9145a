"""Vote-counting selectors: plain and cluster-based stability selection."""

import numpy as np
import pytest
from helpers import design, exact_correlation_design

from substab.baselines import (
    cluster_selection_proportions,
    cluster_stability_selection_sps,
    hierarchical_clusters,
    selection_proportions,
    stability_selection,
)
from substab.subsampling import SelectionRecord


def records_of(sets):
    return [
        SelectionRecord(subsample_index=i, rows=np.arange(4), selected=tuple(sorted(S)))
        for i, S in enumerate(sets)
    ]


class TestSelectionProportions:
    def test_hand_value(self):
        recs = records_of([(0,), (0, 1), (0, 2), (1,)])
        props = selection_proportions(recs, 4)
        assert np.allclose(props, [0.75, 0.5, 0.25, 0.0])

    def test_empty_records_rejected(self):
        with pytest.raises(ValueError):
            selection_proportions([], 3)


class TestStabilitySelection:
    def test_threshold_is_inclusive(self):
        recs = records_of([(0,)] * 4 + [(1,)] * 1)  # feature 0 at exactly 0.8
        assert stability_selection(recs, 2, alpha=0.8) == (0,)

    def test_vote_splitting_drops_duplicated_signal(self):
        recs = records_of([(0,)] * 5 + [(1,)] * 5)
        assert stability_selection(recs, 2, alpha=0.8) == ()

    def test_alpha_range_enforced(self):
        recs = records_of([(0,)])
        with pytest.raises(ValueError):
            stability_selection(recs, 1, alpha=0.5)
        with pytest.raises(ValueError):
            stability_selection(recs, 1, alpha=1.0)


class TestHierarchicalClusters:
    def test_exact_correlation_pair(self):
        rng = np.random.default_rng(0)
        R = np.array([[1.0, 0.95, 0.1], [0.95, 1.0, 0.1], [0.1, 0.1, 1.0]])
        X = exact_correlation_design(40, R, rng)
        assert hierarchical_clusters(X, 0.2) == [(0, 1), (2,)]
        assert hierarchical_clusters(X, 0.95) == [(0, 1, 2)]

    def test_negative_correlation_merges(self):
        rng = np.random.default_rng(1)
        R = np.array([[1.0, -0.95], [-0.95, 1.0]])
        X = exact_correlation_design(30, R, rng)
        assert hierarchical_clusters(X, 0.2) == [(0, 1)]

    def test_average_linkage_chain(self):
        # markov chain correlations: d(0,1)=0.08, d(1,2)=0.12, d(0,2)=0.1904;
        # after merging (0,1) the average distance to 2 is 0.1552
        rng = np.random.default_rng(2)
        r01, r12 = 0.92, 0.88
        R = np.array([[1.0, r01, r01 * r12], [r01, 1.0, r12], [r01 * r12, r12, 1.0]])
        X = exact_correlation_design(50, R, rng)
        assert hierarchical_clusters(X, 0.13) == [(0, 1), (2,)]
        assert hierarchical_clusters(X, 0.16) == [(0, 1, 2)]

    def test_partition_property(self):
        rng = np.random.default_rng(3)
        X = design(rng.standard_normal((30, 7)))
        for cut in [0.0, 0.3, 0.7, 0.99]:
            clusters = hierarchical_clusters(X, cut)
            flat = sorted(j for c in clusters for j in c)
            assert flat == list(range(7))
            assert clusters == sorted(clusters, key=lambda c: c[0])

    def test_single_feature(self):
        rng = np.random.default_rng(4)
        X = design(rng.standard_normal((10, 1)))
        assert hierarchical_clusters(X, 0.5) == [(0,)]

    def test_constant_column_isolated(self):
        rng = np.random.default_rng(5)
        v = rng.standard_normal(20)
        X = design(np.column_stack([v, v * 2.0, np.full(20, 3.0)]))
        assert hierarchical_clusters(X, 0.3) == [(0, 1), (2,)]

    def test_cut_height_validation(self):
        rng = np.random.default_rng(6)
        X = design(rng.standard_normal((10, 3)))
        with pytest.raises(ValueError):
            hierarchical_clusters(X, -0.1)
        with pytest.raises(ValueError):
            hierarchical_clusters(X, 1.0)


class TestClusterProportions:
    def test_hand_value(self):
        clusters = [(0, 1), (2,)]
        recs = records_of([(0,), (1,), (2,), (0, 2)])
        props = cluster_selection_proportions(recs, clusters)
        assert np.allclose(props, [0.75, 0.5])

    def test_cluster_at_least_member_proportion(self):
        rng = np.random.default_rng(7)
        clusters = [(0, 1, 2), (3,), (4, 5)]
        sets = [tuple(rng.choice(6, size=2, replace=False)) for _ in range(12)]
        recs = records_of(sets)
        cp = cluster_selection_proportions(recs, clusters)
        ip = selection_proportions(recs, 6)
        for c, members in enumerate(clusters):
            assert cp[c] >= max(ip[j] for j in members) - 1e-12


class TestClusterStabilitySelection:
    def test_rescues_vote_split(self):
        rng = np.random.default_rng(8)
        R = np.array([[1.0, 0.97, 0.0], [0.97, 1.0, 0.0], [0.0, 0.0, 1.0]])
        X = exact_correlation_design(40, R, rng)
        recs = records_of([(0, 2)] * 5 + [(1, 2)] * 5)
        assert stability_selection(recs, 3, alpha=0.8) == (2,)
        got = cluster_stability_selection_sps(X, recs, alpha=0.8, cut_height=0.2)
        assert got == (0, 2)  # tie between 0 and 1 broken toward the lower index

    def test_representative_has_highest_proportion(self):
        rng = np.random.default_rng(9)
        R = np.array([[1.0, 0.97], [0.97, 1.0]])
        X = exact_correlation_design(30, R, rng)
        recs = records_of([(1,)] * 8 + [(0,)] * 2)
        got = cluster_stability_selection_sps(X, recs, alpha=0.8, cut_height=0.2)
        assert got == (1,)

    def test_precomputed_clusters_respected(self):
        rng = np.random.default_rng(10)
        X = design(rng.standard_normal((25, 4)))
        recs = records_of([(0,), (1,), (0,), (1,)])
        got = cluster_stability_selection_sps(
            X, recs, alpha=0.9, cut_height=0.0, clusters=[(0, 1), (2, 3)]
        )
        assert got == (0,)  # members 0 and 1 tie at 0.5, lower index wins
