"""Reference selectors built on the same subsample selections.

Plain stability selection keeps the features whose selection proportion
across subsamples reaches a threshold.  Cluster stability selection first
groups correlated features by average-linkage clustering, counts a cluster
as selected whenever any member is, and reports one representative per
sufficiently stable cluster.  Both return a single feature set, which is
what makes them natural comparison points for the subspace-based search.
"""

from __future__ import annotations

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import squareform

from .linalg import DesignMatrix
from .subsampling import SelectionRecord
from .util import as_feature_set, check_alpha

__all__ = [
    "selection_proportions",
    "stability_selection",
    "hierarchical_clusters",
    "cluster_selection_proportions",
    "cluster_stability_selection_sps",
]


def selection_proportions(records: list[SelectionRecord], p: int) -> np.ndarray:
    """Fraction of subsamples whose selection contains each feature."""
    if not records:
        raise ValueError("need at least one selection record")
    counts = np.zeros(p, dtype=np.float64)
    for r in records:
        for j in r.selected:
            counts[j] += 1.0
    return counts / len(records)


def stability_selection(records: list[SelectionRecord], p: int, alpha: float) -> tuple[int, ...]:
    """Features selected in at least a fraction ``alpha`` of subsamples."""
    alpha = check_alpha(alpha)
    props = selection_proportions(records, p)
    return as_feature_set(np.flatnonzero(props >= alpha))


def hierarchical_clusters(X: DesignMatrix, cut_height: float) -> list[tuple[int, ...]]:
    """Average-linkage clusters of features under correlation distance.

    The distance between two features is one minus the absolute value of
    their sample correlation; the dendrogram is cut at ``cut_height``.
    Constant columns are treated as uncorrelated with everything.  Clusters
    are returned sorted by their smallest member, members ascending, and
    together partition ``range(p)``.
    """
    if not 0.0 <= cut_height < 1.0:
        raise ValueError(f"cut height must be in [0, 1), got {cut_height}")
    p = X.p
    if p == 1:
        return [(0,)]
    V = X.values - X.values.mean(axis=0)
    norms = np.linalg.norm(V, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    C = (V / safe).T @ (V / safe)
    C[norms == 0, :] = 0.0
    C[:, norms == 0] = 0.0
    D = np.clip(1.0 - np.abs(C), 0.0, None)
    np.fill_diagonal(D, 0.0)
    Z = linkage(squareform(D, checks=False), method="average")
    labels = fcluster(Z, t=cut_height, criterion="distance")
    clusters: dict[int, list[int]] = {}
    for j, lab in enumerate(labels):
        clusters.setdefault(int(lab), []).append(j)
    return sorted((tuple(m) for m in clusters.values()), key=lambda c: c[0])


def cluster_selection_proportions(
    records: list[SelectionRecord], clusters: list[tuple[int, ...]]
) -> np.ndarray:
    """Fraction of subsamples selecting at least one member, per cluster."""
    if not records:
        raise ValueError("need at least one selection record")
    hits = np.zeros(len(clusters), dtype=np.float64)
    for r in records:
        sel = set(r.selected)
        for c, members in enumerate(clusters):
            if any(j in sel for j in members):
                hits[c] += 1.0
    return hits / len(records)


def cluster_stability_selection_sps(
    X: DesignMatrix,
    records: list[SelectionRecord],
    alpha: float,
    cut_height: float,
    clusters: list[tuple[int, ...]] | None = None,
) -> tuple[int, ...]:
    """One representative from every cluster stable at level ``alpha``.

    A cluster counts as selected by a subsample when any member is, and is
    kept when that happens in at least a fraction ``alpha`` of subsamples.
    The reported representative is the member with the highest individual
    selection proportion, lowest index on ties.
    """
    alpha = check_alpha(alpha)
    if clusters is None:
        clusters = hierarchical_clusters(X, cut_height)
    cluster_props = cluster_selection_proportions(records, clusters)
    props = selection_proportions(records, X.p)
    chosen = []
    for c in np.flatnonzero(cluster_props >= alpha):
        members = clusters[c]
        best = members[int(np.argmax(props[list(members)]))]
        chosen.append(best)
    return as_feature_set(chosen)
