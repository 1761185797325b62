"""Cluster importance ranking and hierarchy assembly.

Clusters get topic distributions by weighted aggregation of their
hashtags, pairwise semantic relevance through a Gaussian kernel, and an
importance score from a regularized propagation over the relevance
graph. The final structure nests ranked clusters, weighted hashtags and
chronological items.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .corpus import HashtagProfile, Item, Source
from .errors import EmptyCluster, NonConvergence
from .cocluster import CoClusterResult

logger = logging.getLogger("hashbridge")


@dataclass(frozen=True, eq=False)
class HashtagEntry:
    """A hashtag inside one cluster, with its weight and ordered items."""

    tag: str
    source: Source
    weight: float
    items: tuple


@dataclass(frozen=True, eq=False)
class ClusterProfile:
    """One ranked cluster: importance, description and member hashtags."""

    cluster_id: int
    importance: float
    topic_dist: np.ndarray
    appearance: float
    description: tuple
    hashtags: tuple


@dataclass(frozen=True, eq=False)
class Hierarchy:
    """Clusters sorted by importance, each holding sorted hashtags."""

    query: str
    clusters: tuple


def cluster_topic_dist(result: CoClusterResult, hashtag_dists) -> np.ndarray:
    """Weighted average of member hashtag distributions per cluster."""
    dists = np.asarray(hashtag_dists, dtype=float)
    rho = result.rho
    if dists.shape[0] != rho.shape[0]:
        raise ValueError("one distribution row per hashtag required")
    l_row = int(rho.max()) + 1
    out = np.zeros((l_row, dists.shape[1]))
    for l in range(l_row):
        members = np.flatnonzero(rho == l)
        if members.size == 0:
            raise EmptyCluster(f"cluster {l} has no hashtags")
        w = result.hashtag_weights[members]
        out[l] = w @ dists[members]
    return out


def appearance_counts(rho: np.ndarray, profiles) -> np.ndarray:
    """Total annotated-item count per cluster over the original collection."""
    rho = np.asarray(rho, dtype=np.int64)
    if rho.shape[0] != len(profiles):
        raise ValueError("one profile per hashtag row required")
    l_row = int(rho.max()) + 1
    out = np.zeros(l_row)
    for label, profile in zip(rho, profiles):
        out[label] += len(profile.item_ids)
    return out


def semantic_relevance(cluster_dists) -> np.ndarray:
    """Gaussian kernel over pairwise cluster-distribution distances.

    The bandwidth is the mean pairwise Euclidean distance; identical
    clusters (zero bandwidth) degrade to an all-ones kernel.
    """
    X = np.asarray(cluster_dists, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need at least 2 cluster distributions")
    d = pdist(X)
    sigma = float(d.mean())
    if sigma == 0.0:
        logger.warning("all cluster distributions identical; relevance "
                       "kernel degenerates to ones")
        return np.ones((X.shape[0], X.shape[0]))
    sq = squareform(d) ** 2
    return np.exp(-sq / (2.0 * sigma * sigma))


def rank_clusters(kappa, U, psi: float = 0.5, mode: str = "closed_form",
                  tol: float = 1e-10, max_iter: int = 10000) -> np.ndarray:
    """Importance scores balancing graph smoothness against prior counts.

    Iterates eta <- (eta S + psi U)/(1 + psi) on the symmetrically
    normalized kernel from eta = U, or solves the equivalent linear
    system directly. The map is a contraction, so the fixed point is
    unique and reachable from any start.
    """
    kappa = np.asarray(kappa, dtype=float)
    U = np.asarray(U, dtype=float)
    n = U.shape[0]
    if kappa.shape != (n, n):
        raise ValueError("kappa must be square and match U")
    if psi <= 0:
        raise ValueError("psi must be positive")
    if kappa.min() < 0:
        raise ValueError("kappa entries must be non-negative")
    deg = kappa.sum(axis=1)
    if deg.min() <= 0:
        raise ValueError("kappa must have positive row sums")
    root = 1.0 / np.sqrt(deg)
    S = kappa * np.outer(root, root)

    if mode == "iterative":
        eta = U.copy()
        for _ in range(max_iter):
            nxt = (eta @ S + psi * U) / (1.0 + psi)
            if float(np.abs(nxt - eta).sum()) < tol:
                return nxt
            eta = nxt
        raise NonConvergence(f"ranking did not converge in {max_iter} steps")
    if mode == "closed_form":
        system = ((1.0 + psi) * np.eye(n) - S).T
        return np.linalg.solve(system, psi * U)
    raise ValueError(f"unknown mode {mode!r}")


def describe_cluster(topic_dist, T, vocab, k: int = 8):
    """Top-k words of the cluster's word distribution p(w|C).

    Scores are the topic-weighted mixture of topic-word rows; ties are
    broken lexicographically.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    dist = np.asarray(topic_dist, dtype=float)
    T = np.asarray(T, dtype=float)
    scores = dist @ T
    ranked = sorted(zip(vocab.words, scores), key=lambda p: (-p[1], p[0]))
    return tuple((w, float(s)) for w, s in ranked[:k])


def assemble_hierarchy(query: str, result: CoClusterResult, profiles,
                       items, eta, topic_dists, descriptions) -> Hierarchy:
    """Nest clusters, hashtags and items in their presentation order.

    Clusters sort by importance (descending, id breaks ties), hashtags
    by weight within cluster, items chronologically within hashtag.
    """
    eta = np.asarray(eta, dtype=float)
    if isinstance(items, dict):
        by_id = items
    else:
        by_id = {item.id: item for item in items}
    rho = result.rho
    l_row = int(rho.max()) + 1
    if eta.shape[0] != l_row:
        raise ValueError("one importance score per cluster required")

    appearance = appearance_counts(rho, profiles)
    clusters = []
    for l in sorted(range(l_row), key=lambda l: (-eta[l], l)):
        members = np.flatnonzero(rho == l)
        entries = []
        for i in members:
            profile: HashtagProfile = profiles[i]
            member_items = sorted(
                (by_id[item_id] for item_id in profile.item_ids),
                key=lambda it: (it.timestamp, it.id),
            )
            entries.append(HashtagEntry(
                tag=profile.tag,
                source=profile.source,
                weight=float(result.hashtag_weights[i]),
                items=tuple(member_items),
            ))
        entries.sort(key=lambda e: (-e.weight, e.tag, e.source.value))
        clusters.append(ClusterProfile(
            cluster_id=int(l),
            importance=float(eta[l]),
            topic_dist=np.asarray(topic_dists[l], dtype=float),
            appearance=float(appearance[l]),
            description=tuple(descriptions[l]),
            hashtags=tuple(entries),
        ))
    return Hierarchy(query=query, clusters=tuple(clusters))
