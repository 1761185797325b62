"""Depth-2 topic tree fitting via collapsed Gibbs sampling.

One model per source. Every document sits on a two-node path: a root
topic shared by all documents plus one leaf topic chosen by a nested
Chinese Restaurant Process, so the leaf count is emergent rather than
fixed. Per-token level assignments split each document's words between
the root and its leaf.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from .corpus import Source, Vocabulary
from .errors import TooFewDocuments, UnknownItem

logger = logging.getLogger("hashbridge")

_EMPTY = np.empty(0, dtype=np.int64)


@dataclass(frozen=True)
class HldaConfig:
    """Sampler hyperparameters; depth is fixed at 2 by the model family."""

    alpha: float = 10.0
    gamma: float = 1.0
    eta: float = 0.1
    iterations: int = 500
    seed: int = 0
    depth: int = 2

    def __post_init__(self):
        if self.depth != 2:
            raise ValueError("only depth-2 trees are supported")
        if min(self.alpha, self.gamma, self.eta) <= 0:
            raise ValueError("alpha, gamma and eta must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass(frozen=True, eq=False)
class TopicModel:
    """Point estimate from the final Gibbs sample.

    doc_topics rows are [p(root|d), p(leaf|d)] and sum to 1.
    doc_leaf_mass spreads each document's leaf-level probability over the
    K leaves; the sampler emits hard rows (all mass on the assigned
    leaf), but aggregation accepts soft rows too.
    """

    root_topic: np.ndarray
    leaf_topics: np.ndarray
    doc_topics: np.ndarray
    leaf_assignment: np.ndarray
    doc_leaf_mass: np.ndarray
    doc_ids: tuple
    skipped: tuple
    loglik_trace: tuple
    source: Source | None = None
    vocab: Vocabulary | None = None

    @property
    def K(self) -> int:
        return self.leaf_topics.shape[0]

    @cached_property
    def doc_index(self) -> dict:
        return {doc_id: i for i, doc_id in enumerate(self.doc_ids)}


class _LeafTable:
    """Growable per-leaf count storage with row recycling."""

    def __init__(self, n_words: int):
        self.counts = np.zeros((8, n_words), dtype=np.int64)
        self.totals = np.zeros(8, dtype=np.int64)
        self.ndocs = np.zeros(8, dtype=np.int64)
        self.order: list[int] = []
        self.free: list[int] = list(range(7, -1, -1))

    def new_leaf(self) -> int:
        if not self.free:
            cap = self.counts.shape[0]
            self.counts = np.vstack([self.counts, np.zeros_like(self.counts)])
            self.totals = np.concatenate([self.totals, np.zeros(cap, np.int64)])
            self.ndocs = np.concatenate([self.ndocs, np.zeros(cap, np.int64)])
            self.free = list(range(2 * cap - 1, cap - 1, -1))
        row = self.free.pop()
        self.order.append(row)
        return row

    def drop(self, row: int) -> None:
        # By the time the last document leaves, the row's counts are zero.
        self.order.remove(row)
        self.free.append(row)


def fit_hlda(docs, cfg: HldaConfig, vocab: Vocabulary | None = None,
             doc_ids=None, source: Source | None = None) -> TopicModel:
    """Fit the depth-2 model on token-index documents.

    Empty documents are skipped with a warning and reported on the
    result; identical inputs and seed give identical output.
    """
    raw = [np.asarray(d, dtype=np.int64) for d in docs]
    ids = list(doc_ids) if doc_ids is not None else list(range(len(raw)))
    if len(ids) != len(raw):
        raise ValueError("doc_ids length must match docs")

    kept, kept_ids, skipped = [], [], []
    for i, arr in enumerate(raw):
        if arr.size == 0:
            skipped.append(ids[i])
            logger.warning("hlda: document %r is empty, skipped", ids[i])
        else:
            kept.append(arr)
            kept_ids.append(ids[i])
    if len(kept) < 2:
        raise TooFewDocuments(f"{len(kept)} non-empty documents, need at least 2")

    if vocab is not None:
        n_words = len(vocab)
    else:
        n_words = int(max(int(a.max()) for a in kept)) + 1
    for arr in kept:
        if int(arr.min()) < 0 or int(arr.max()) >= n_words:
            raise ValueError("token index out of vocabulary range")

    alpha, crp_gamma, eta = cfg.alpha, cfg.gamma, cfg.eta
    v_eta = n_words * eta
    n_docs = len(kept)
    total_tokens = sum(a.size for a in kept)
    rng = np.random.default_rng(cfg.seed)

    table = _LeafTable(n_words)
    root_counts = np.zeros(n_words, dtype=np.int64)
    root_total = 0
    levels: list[np.ndarray] = []
    m = np.zeros((n_docs, 2), dtype=np.int64)
    path = np.zeros(n_docs, dtype=np.int64)

    # Initialization: path from the CRP prior, levels uniform at random.
    for d, arr in enumerate(kept):
        rows = table.order
        w = np.array([float(table.ndocs[r]) for r in rows] + [crp_gamma])
        cum = np.cumsum(w)
        pick = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        pick = min(pick, len(rows))
        row = table.new_leaf() if pick == len(rows) else rows[pick]
        path[d] = row
        table.ndocs[row] += 1
        lv = (rng.random(arr.size) < 0.5).astype(np.int8)
        levels.append(lv)
        m[d, 0] = int((lv == 0).sum())
        m[d, 1] = int((lv == 1).sum())
        leaf_words = arr[lv == 1]
        root_words = arr[lv == 0]
        np.add.at(table.counts, (row, leaf_words), 1)
        table.totals[row] += leaf_words.size
        np.add.at(root_counts, root_words, 1)
        root_total += root_words.size

    def resample_path(d: int, u: float) -> None:
        arr = kept[d]
        lv = levels[d]
        old = int(path[d])
        n1 = int(m[d, 1])
        if n1:
            uq, cn = np.unique(arr[lv == 1], return_counts=True)
            table.counts[old, uq] -= cn
            table.totals[old] -= n1
        else:
            uq, cn = _EMPTY, _EMPTY
        table.ndocs[old] -= 1
        if table.ndocs[old] == 0:
            table.drop(old)

        rows = table.order
        k = len(rows)
        rows_a = np.asarray(rows, dtype=np.int64)
        logw = np.zeros(k + 1)
        if n1:
            blk = table.counts[np.ix_(rows_a, uq)].astype(np.float64)
            logw[:k] = (gammaln(blk + (cn + eta)) - gammaln(blk + eta)).sum(axis=1)
            tot = table.totals[rows_a].astype(np.float64)
            logw[:k] += gammaln(tot + v_eta) - gammaln(tot + n1 + v_eta)
            logw[k] = ((gammaln(cn + eta) - gammaln(eta)).sum()
                       + gammaln(v_eta) - gammaln(n1 + v_eta))
        logw[:k] += np.log(table.ndocs[rows_a])
        logw[k] += np.log(crp_gamma)

        w = np.exp(logw - logw.max())
        cum = np.cumsum(w)
        pick = int(np.searchsorted(cum, u * cum[-1], side="right"))
        pick = min(pick, k)
        row = table.new_leaf() if pick == k else rows[pick]
        path[d] = row
        table.ndocs[row] += 1
        if n1:
            table.counts[row, uq] += cn
            table.totals[row] += n1

    def resample_levels(d: int, us: np.ndarray) -> None:
        nonlocal root_total
        arr = kept[d]
        lv = levels[d]
        row = int(path[d])
        lc = table.counts[row]
        rc = root_counts
        m0, m1 = int(m[d, 0]), int(m[d, 1])
        rt = root_total
        lt = int(table.totals[row])
        for i in range(arr.size):
            v = int(arr[i])
            if lv[i]:
                lc[v] -= 1
                lt -= 1
                m1 -= 1
            else:
                rc[v] -= 1
                rt -= 1
                m0 -= 1
            p0 = (m0 + alpha) * (rc[v] + eta) / (rt + v_eta)
            p1 = (m1 + alpha) * (lc[v] + eta) / (lt + v_eta)
            if us[i] * (p0 + p1) < p0:
                lv[i] = 0
                rc[v] += 1
                rt += 1
                m0 += 1
            else:
                lv[i] = 1
                lc[v] += 1
                lt += 1
                m1 += 1
        m[d, 0], m[d, 1] = m0, m1
        table.totals[row] = lt
        root_total = rt

    def joint_loglik() -> float:
        def topic_term(counts: np.ndarray, total: int) -> float:
            nz = counts[counts > 0]
            return float(gammaln(v_eta) - gammaln(total + v_eta)
                         + (gammaln(nz + eta) - gammaln(eta)).sum())

        rows_a = np.asarray(table.order, dtype=np.int64)
        ll = topic_term(root_counts, root_total)
        for r in rows_a:
            ll += topic_term(table.counts[r], int(table.totals[r]))
        nd = m.sum(axis=1)
        ll += float((gammaln(2 * alpha) - gammaln(nd + 2 * alpha)
                     + gammaln(m + alpha).sum(axis=1) - 2 * gammaln(alpha)).sum())
        c = table.ndocs[rows_a]
        ll += float(len(rows_a) * np.log(crp_gamma) + gammaln(c).sum()
                    + gammaln(crp_gamma) - gammaln(crp_gamma + n_docs))
        return ll

    loglik = []
    for _ in range(cfg.iterations):
        u_path = rng.random(n_docs)
        for d in range(n_docs):
            resample_path(d, float(u_path[d]))
        u_lvl = rng.random(total_tokens)
        pos = 0
        for d in range(n_docs):
            size = kept[d].size
            resample_levels(d, u_lvl[pos:pos + size])
            pos += size
        loglik.append(joint_loglik())

    rows = list(table.order)
    remap = {r: i for i, r in enumerate(rows)}
    rows_a = np.asarray(rows, dtype=np.int64)
    leaf_topics = (table.counts[rows_a] + eta) / (table.totals[rows_a] + v_eta)[:, None]
    root_topic = (root_counts + eta) / (root_total + v_eta)
    nd = m.sum(axis=1)
    doc_topics = (m + alpha) / (nd + 2 * alpha)[:, None]
    leaf_assignment = np.asarray([remap[int(r)] for r in path], dtype=np.int64)
    doc_leaf_mass = np.zeros((n_docs, len(rows)))
    doc_leaf_mass[np.arange(n_docs), leaf_assignment] = doc_topics[:, 1]

    return TopicModel(
        root_topic=root_topic,
        leaf_topics=leaf_topics,
        doc_topics=doc_topics,
        leaf_assignment=leaf_assignment,
        doc_leaf_mass=doc_leaf_mass,
        doc_ids=tuple(kept_ids),
        skipped=tuple(skipped),
        loglik_trace=tuple(loglik),
        source=source,
        vocab=vocab,
    )


def hashtag_topic_distribution(model: TopicModel, profile) -> np.ndarray:
    """Aggregate leaf-topic mass over a hashtag's annotated items.

    Sums the documents' leaf mass rows and normalizes once, so the
    result is independent of item order and sums to 1.
    """
    rows = []
    for item_id in sorted(profile.item_ids):
        pos = model.doc_index.get(item_id)
        if pos is None:
            raise UnknownItem(f"item {item_id!r} has no document in the model")
        rows.append(pos)
    mass = model.doc_leaf_mass[rows].sum(axis=0)
    total = float(mass.sum())
    if total <= 0.0:
        logger.warning("hashtag %s: zero leaf mass, falling back to uniform",
                       profile.tag)
        return np.full(model.K, 1.0 / model.K)
    return mass / total


def dump_topics(model: TopicModel, path, top_n: int = 10,
                vocab: Vocabulary | None = None) -> None:
    """Write a plain-text top-word summary of the model's topics."""
    vb = vocab if vocab is not None else model.vocab
    if vb is None:
        raise ValueError("no vocabulary available for dumping")
    lines = [
        f"source: {model.source.value if model.source else '-'}",
        f"leaves: {model.K}",
    ]

    def fmt(vec: np.ndarray, name: str) -> None:
        top = np.argsort(-vec, kind="stable")[:top_n]
        words = " ".join(f"{vb.words[i]}:{vec[i]:.4f}" for i in top)
        lines.append(f"{name}: {words}")

    fmt(model.root_topic, "root")
    for k in range(model.K):
        fmt(model.leaf_topics[k], f"leaf {k}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
