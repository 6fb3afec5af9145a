"""Seeded generators for correlated-design regression benchmarks.

Three building blocks cover every benchmark layout used here:

* proxy clusters — a representative column plus near-duplicates obtained
  by adding small Gaussian perturbations; only the representative may
  carry a true coefficient;
* parent–child blocks — independent parent columns plus child columns
  that are (optionally signed) sums of the parents with a small
  perturbation; only parents may carry true coefficients;
* individual columns — independent features, a few of which may carry a
  weak coefficient while the rest are pure noise.

Columns are laid out clusters first, then blocks (parents before
children), then individuals.  The response is a linear model in the raw
columns plus homoscedastic Gaussian noise with per-observation standard
deviation ``noise_sigma``.  Returned designs are column-centered; the
response is returned raw and centered by consumers.

``equally_good`` decides whether a candidate feature set is one of the
interchangeable near-optimal models: exactly one member per signal
cluster, none from noise clusters, any ``#parents`` features from a
block's parents-plus-children when every parent is a signal (exactly the
signal parents otherwise), every weak-signal individual, and no noise
individual.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .linalg import DesignMatrix
from .util import as_feature_set, substream

__all__ = [
    "ClusterSpec",
    "BlockSpec",
    "GroundTruth",
    "gen_cluster_data",
    "gen_block_data",
    "gen_path_demo_data",
    "gen_benchmark_data",
    "benchmark_cluster_spec",
    "benchmark_block_specs",
    "equally_good",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterSpec:
    """Layout of proxy clusters: per-cluster proxy counts and representative coefficients."""

    proxy_counts: tuple[int, ...]
    rep_betas: tuple[float, ...]
    eta: float = 0.5
    normalize_reps: bool = False

    def __post_init__(self):
        if len(self.proxy_counts) != len(self.rep_betas):
            raise ValueError("need one representative coefficient per cluster")
        if any(c < 0 for c in self.proxy_counts):
            raise ValueError("proxy counts must be nonnegative")
        if self.eta < 0:
            raise ValueError("perturbation scale must be nonnegative")

    @property
    def n_clusters(self) -> int:
        return len(self.proxy_counts)

    @property
    def n_features(self) -> int:
        return sum(self.proxy_counts) + self.n_clusters


@dataclass(frozen=True)
class BlockSpec:
    """One parent–child block: parent coefficients, child sign patterns, child perturbation scale."""

    parent_betas: tuple[float, ...]
    child_eta: float = 0.1
    child_signs: tuple[tuple[float, ...], ...] = ((),)

    def __post_init__(self):
        if len(self.parent_betas) < 2:
            raise ValueError("a block needs at least two parents")
        if self.child_eta < 0:
            raise ValueError("perturbation scale must be nonnegative")
        for signs in self.child_signs:
            if signs and len(signs) != len(self.parent_betas):
                raise ValueError("child sign pattern length must match the parent count")

    @property
    def n_parents(self) -> int:
        return len(self.parent_betas)

    @property
    def n_children(self) -> int:
        return len(self.child_signs)

    def sign_rows(self) -> list[np.ndarray]:
        rows = []
        for signs in self.child_signs:
            if signs:
                rows.append(np.asarray(signs, dtype=np.float64))
            else:
                rows.append(np.ones(self.n_parents))
        return rows


@dataclass(frozen=True)
class GroundTruth:
    """True coefficients plus the dependency structure behind the columns."""

    beta: np.ndarray
    support: tuple[int, ...]
    clusters: tuple[tuple[int, ...], ...]
    cluster_signal: tuple[bool, ...]
    block_parents: tuple[tuple[int, ...], ...]
    block_children: tuple[tuple[int, ...], ...]
    individuals: tuple[int, ...]
    labels: tuple[str, ...]
    column_names: tuple[str, ...]

    @property
    def p(self) -> int:
        return self.beta.size

    @property
    def s_star(self) -> int:
        return len(self.support)


def _unit(v: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(v)
    return v if nrm == 0 else v / nrm


def _generate(
    clusters: ClusterSpec | None,
    blocks: list[BlockSpec] | tuple[BlockSpec, ...],
    individual_count: int,
    weak_signal_spec: tuple[int, float] | None,
    n: int,
    noise_sigma: float,
    seed: int,
) -> tuple[DesignMatrix, np.ndarray, GroundTruth]:
    """Assemble clusters, blocks and individuals into one seeded dataset."""
    rng = substream(seed, "data")
    normalize = clusters.normalize_reps if clusters is not None else False

    cols: list[np.ndarray] = []
    names: list[str] = []
    labels: list[str] = []
    beta: list[float] = []
    cluster_members: list[tuple[int, ...]] = []
    cluster_signal: list[bool] = []
    block_parents: list[tuple[int, ...]] = []
    block_children: list[tuple[int, ...]] = []

    if clusters is not None:
        for k in range(clusters.n_clusters):
            rep = rng.standard_normal(n)
            if clusters.normalize_reps:
                rep = _unit(rep)
            rep_idx = len(cols)
            members = [rep_idx]
            cols.append(rep)
            names.append(f"c{k}_rep")
            b = float(clusters.rep_betas[k])
            beta.append(b)
            labels.append("signal" if b != 0 else "noise")
            for i in range(clusters.proxy_counts[k]):
                delta = clusters.eta * rng.standard_normal(n)
                if clusters.normalize_reps:
                    delta = clusters.eta * _unit(delta)
                members.append(len(cols))
                cols.append(rep + delta)
                names.append(f"c{k}_p{i}")
                beta.append(0.0)
                labels.append("correlated")
            cluster_members.append(tuple(members))
            cluster_signal.append(b != 0)

    for l, blk in enumerate(blocks):
        parents = []
        parent_cols = []
        for i, b in enumerate(blk.parent_betas):
            col = rng.standard_normal(n)
            if normalize:
                col = _unit(col)
            parents.append(len(cols))
            parent_cols.append(col)
            cols.append(col)
            names.append(f"b{l}_par{i}")
            beta.append(float(b))
            labels.append("signal" if b != 0 else "noise")
        children = []
        P = np.column_stack(parent_cols)
        for i, signs in enumerate(blk.sign_rows()):
            delta = blk.child_eta * rng.standard_normal(n)
            if normalize:
                delta = blk.child_eta * _unit(delta)
            children.append(len(cols))
            cols.append(P @ signs + delta)
            names.append(f"b{l}_ch{i}")
            beta.append(0.0)
            labels.append("correlated")
        block_parents.append(tuple(parents))
        block_children.append(tuple(children))

    individuals = []
    weak_count, weak_beta = weak_signal_spec if weak_signal_spec else (0, 0.0)
    if weak_count > individual_count:
        raise ValueError("more weak signals than individual features")
    for j in range(individual_count):
        col = rng.standard_normal(n)
        if normalize:
            col = _unit(col)
        individuals.append(len(cols))
        cols.append(col)
        names.append(f"ind{j}")
        if j < weak_count and weak_beta != 0:
            beta.append(float(weak_beta))
            labels.append("weak")
        else:
            beta.append(0.0)
            labels.append("noise")

    if not cols:
        raise ValueError("the layout has no features at all")
    X_raw = np.column_stack(cols)
    p = X_raw.shape[1]
    if n <= p:
        log.warning("n=%d does not exceed p=%d; designs will be rank deficient", n, p)
    beta_arr = np.asarray(beta, dtype=np.float64)
    eps = noise_sigma * substream(seed, "noise").standard_normal(n)
    y = X_raw @ beta_arr + eps

    truth = GroundTruth(
        beta=beta_arr,
        support=as_feature_set(np.flatnonzero(beta_arr)),
        clusters=tuple(cluster_members),
        cluster_signal=tuple(cluster_signal),
        block_parents=tuple(block_parents),
        block_children=tuple(block_children),
        individuals=tuple(individuals),
        labels=tuple(labels),
        column_names=tuple(names),
    )
    X = DesignMatrix.from_array(X_raw, column_names=names)
    return X, y, truth


def gen_cluster_data(
    spec: ClusterSpec, n: int, noise_sigma: float, seed: int
) -> tuple[DesignMatrix, np.ndarray, GroundTruth]:
    """Proxy-cluster design only: representatives plus perturbed near-duplicates."""
    return _generate(spec, [], 0, None, n, noise_sigma, seed)


def gen_block_data(
    specs: list[BlockSpec] | tuple[BlockSpec, ...],
    individual_count: int,
    weak_signal_spec: tuple[int, float] | None = (5, 0.2),
    n: int = 600,
    noise_sigma: float = 1.5,
    seed: int = 0,
    clusters: ClusterSpec | None = None,
) -> tuple[DesignMatrix, np.ndarray, GroundTruth]:
    """Parent–child blocks plus individual features, optionally preceded by clusters."""
    return _generate(clusters, list(specs), individual_count, weak_signal_spec, n, noise_sigma, seed)


def benchmark_cluster_spec() -> ClusterSpec:
    """Three signal clusters of size three with perturbation scale one half."""
    return ClusterSpec(proxy_counts=(2, 2, 2), rep_betas=(1.0, 1.0, 1.0), eta=0.5)


def benchmark_block_specs() -> tuple[BlockSpec, ...]:
    """Blocks with 2/3/4 parents, alternating-sign unit coefficients, one plain-sum child each."""
    return (
        BlockSpec(parent_betas=(1.0, -1.0), child_eta=0.01),
        BlockSpec(parent_betas=(1.0, -1.0, 1.0), child_eta=0.1),
        BlockSpec(parent_betas=(1.0, -1.0, 1.0, -1.0), child_eta=0.1),
    )


def gen_benchmark_data(
    seed: int, n: int = 600, noise_sigma: float = 1.5
) -> tuple[DesignMatrix, np.ndarray, GroundTruth]:
    """Low signal-to-noise benchmark: 3 signal clusters, 3 blocks, 179 individuals (p=200).

    Five of the individual features carry a weak coefficient of 0.2; the
    remaining 174 are pure noise.
    """
    return _generate(
        benchmark_cluster_spec(),
        list(benchmark_block_specs()),
        179,
        (5, 0.2),
        n,
        noise_sigma,
        seed,
    )


def gen_path_demo_data(seed: int) -> tuple[DesignMatrix, np.ndarray, GroundTruth]:
    """Small dense-correlation demo: 8 clusters, 2 two-child blocks, 50 noise individuals.

    n=100 and p=82; representatives carry coefficient one, block parents
    1.5 and 1, children are the sum and the difference of the parents, and
    every perturbation (cluster, child, response) has scale 0.2.
    """
    clusters = ClusterSpec(proxy_counts=(2,) * 8, rep_betas=(1.0,) * 8, eta=0.2)
    blocks = [
        BlockSpec(parent_betas=(1.5, 1.0), child_eta=0.2, child_signs=((1.0, 1.0), (1.0, -1.0))),
        BlockSpec(parent_betas=(1.5, 1.0), child_eta=0.2, child_signs=((1.0, 1.0), (1.0, -1.0))),
    ]
    return _generate(clusters, blocks, 50, None, 100, 0.2, seed)


def equally_good(candidate, truth: GroundTruth) -> bool:
    """Whether a feature set is one of the interchangeable near-optimal models.

    Requires exactly one member per signal cluster and none from noise
    clusters; from each block whose parents are all signals, any
    ``#parents`` features out of the parents-plus-children union (exactly
    the signal parents when some parent is noise); every nonzero-
    coefficient individual feature; and no zero-coefficient individual.
    """
    S = set(as_feature_set(candidate))
    if any(j >= truth.p for j in S):
        raise IndexError("candidate contains out-of-range feature indices")

    for members, signal in zip(truth.clusters, truth.cluster_signal):
        hits = len(S.intersection(members))
        if hits != (1 if signal else 0):
            return False

    for parents, children in zip(truth.block_parents, truth.block_children):
        block = set(parents) | set(children)
        signal_parents = {j for j in parents if truth.beta[j] != 0}
        if len(signal_parents) == len(parents):
            if len(S & block) != len(parents):
                return False
        elif S & block != signal_parents:
            return False

    for j in truth.individuals:
        if (truth.beta[j] != 0) != (j in S):
            return False
    return True
