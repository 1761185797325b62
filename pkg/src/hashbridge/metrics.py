"""Evaluation measures: rank-list agreement, clustering agreement,
graded ranking quality and linear correlation."""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Mapping

import numpy as np

from .errors import DuplicateElements, EmptyList, ZeroVariance

logger = logging.getLogger("hashbridge")


def nfr(a, b) -> float:
    """Normalized footrule agreement between two ranked lists, in [0,1].

    Both lists are restricted to their overlap (order preserved) and
    re-ranked 1..|S| before summing rank displacements; 1 means
    identical order, 0 maximally discordant. Overlap of size <= 1
    carries no order information and scores 1.0.
    """
    a = list(a)
    b = list(b)
    if len(set(a)) != len(a) or len(set(b)) != len(b):
        raise DuplicateElements("ranked lists must not contain duplicates")
    overlap = set(a) & set(b)
    if len(overlap) <= 1:
        logger.warning("nfr: overlap of size %d, agreement defined as 1.0",
                       len(overlap))
        return 1.0
    rank_a = {x: r for r, x in enumerate((x for x in a if x in overlap), 1)}
    rank_b = {x: r for r, x in enumerate((x for x in b if x in overlap), 1)}
    fr = sum(abs(rank_a[x] - rank_b[x]) for x in overlap)
    s = len(overlap)
    max_fr = s * s // 2 if s % 2 == 0 else (s + 1) * (s - 1) // 2
    return 1.0 - fr / max_fr


def _aligned_labels(c1, c2):
    if isinstance(c1, Mapping) != isinstance(c2, Mapping):
        raise ValueError("labelings must both be mappings or both sequences")
    if isinstance(c1, Mapping):
        if set(c1) != set(c2):
            raise ValueError("labelings must cover the same elements")
        keys = sorted(c1)
        return [c1[k] for k in keys], [c2[k] for k in keys]
    c1, c2 = list(c1), list(c2)
    if len(c1) != len(c2):
        raise ValueError("labelings must have equal length")
    return c1, c2


def nmi(c1, c2) -> float:
    """Normalized mutual information between two labelings, in [0,1].

    Accepts element->label mappings over the same domain or two aligned
    label sequences. A single-cluster labeling has zero entropy; the
    agreement is then defined as 0.0 rather than dividing by zero.
    """
    l1, l2 = _aligned_labels(c1, c2)
    h = len(l1)
    if h == 0:
        raise ValueError("labelings must be non-empty")
    p1 = Counter(l1)
    p2 = Counter(l2)
    joint = Counter(zip(l1, l2))

    def entropy(counts: Counter) -> float:
        return -sum((c / h) * math.log(c / h) for c in counts.values())

    h1, h2 = entropy(p1), entropy(p2)
    if h1 == 0.0 or h2 == 0.0:
        logger.warning("nmi: single-cluster labeling, agreement defined as 0.0")
        return 0.0
    info = 0.0
    for (x, y), c in joint.items():
        pxy = c / h
        info += pxy * math.log(pxy * h * h / (p1[x] * p2[y]))
    return info / math.sqrt(h1 * h2)


def ndcg(relevance, k: int | None = None, ideal=None) -> float:
    """Discounted cumulative gain at k over the ideal ordering's gain.

    ``relevance`` lists graded relevances in ranked order; the ideal
    defaults to the same relevances sorted descending. All-zero
    relevance has no ideal gain and scores 0.0.
    """
    rel = [float(r) for r in relevance]
    if not rel:
        raise EmptyList("relevance list is empty")
    if min(rel) < 0:
        raise ValueError("relevances must be non-negative")
    if k is None:
        k = len(rel)
    if not 1 <= k <= len(rel):
        raise ValueError(f"k must lie in [1, {len(rel)}]")
    ideal_rel = sorted(rel, reverse=True) if ideal is None else [float(r) for r in ideal]
    if len(ideal_rel) < k:
        raise ValueError("ideal relevance list shorter than k")

    def dcg(rs) -> float:
        return sum((2.0 ** r - 1.0) / math.log(1 + j)
                   for j, r in enumerate(rs[:k], 1))

    z = dcg(ideal_rel)
    if z == 0.0:
        logger.warning("ndcg: zero ideal gain, score defined as 0.0")
        return 0.0
    return dcg(rel) / z


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient of two equal-length lists."""
    x = np.asarray(list(x), dtype=float)
    y = np.asarray(list(y), dtype=float)
    if x.shape != y.shape:
        raise ValueError("inputs must have equal length")
    if x.size < 2:
        raise ValueError("need at least 2 observations")
    dx = x - x.mean()
    dy = y - y.mean()
    vx = float((dx * dx).sum())
    vy = float((dy * dy).sum())
    if vx == 0.0 or vy == 0.0:
        raise ZeroVariance("constant input has no defined correlation")
    return float((dx * dy).sum() / math.sqrt(vx * vy))
