"""Word similarity graph and random-walk propagation of topic mass.

Per-source topic-word distributions live on per-source vocabularies. To
compare topics across sources, each distribution is embedded into the
unified vocabulary and diffused along word-similarity edges with a
restart, yielding vectors that share support.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .corpus import Vocabulary
from .errors import NonConvergence, ParseError, SingularSystem

logger = logging.getLogger("hashbridge")


@dataclass(frozen=True, eq=False)
class SimilarityTable:
    """Symmetric word-pair similarities in [0,1] over one vocabulary.

    Off-diagonal entries live in ``pairs`` keyed by sorted word pairs;
    self-similarity is 1 for every vocabulary word by construction.
    """

    vocab: Vocabulary
    pairs: dict

    def get(self, w1: str, w2: str) -> float:
        if w1 == w2:
            return 1.0 if w1 in self.vocab else 0.0
        key = (w1, w2) if w1 < w2 else (w2, w1)
        return self.pairs.get(key, 0.0)

    def items(self):
        """Off-diagonal entries in deterministic (sorted) order."""
        return sorted(self.pairs.items())


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic walk matrix over a vocabulary.

    ``isolated`` marks words whose only surviving edge is the self-loop;
    their rows are identity rows, so stochasticity holds everywhere.
    """

    matrix: scipy.sparse.csr_matrix
    isolated: np.ndarray
    vocab: Vocabulary


@dataclass(frozen=True, eq=False)
class UnifiedTopicSpace:
    """All sources' leaf topics re-expressed over the unified vocabulary."""

    labels: tuple
    matrix: np.ndarray
    vocab: Vocabulary

    def __len__(self) -> int:
        return self.matrix.shape[0]


def _norm_word(raw: str) -> str:
    return unicodedata.normalize("NFC", raw.strip()).lower()


def load_similarity(path, vocab: Vocabulary) -> SimilarityTable:
    """Read a TSV file of `word1 <TAB> word2 <TAB> similarity` lines.

    Entries mentioning out-of-vocabulary words are dropped; duplicate
    pairs are symmetrized by taking the maximum.
    """
    pairs: dict[tuple[str, str], float] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected 3 tab-separated fields, got {len(fields)}",
                             line=lineno)
        w1, w2 = _norm_word(fields[0]), _norm_word(fields[1])
        try:
            sim = float(fields[2])
        except ValueError:
            raise ParseError(f"similarity {fields[2]!r} is not a number",
                             line=lineno) from None
        if not 0.0 <= sim <= 1.0:
            raise ParseError(f"similarity {sim} outside [0,1]", line=lineno)
        if not w1 or not w2:
            raise ParseError("empty word", line=lineno)
        if w1 == w2 or w1 not in vocab or w2 not in vocab:
            continue
        key = (w1, w2) if w1 < w2 else (w2, w1)
        pairs[key] = max(pairs.get(key, 0.0), sim)
    return SimilarityTable(vocab=vocab, pairs=pairs)


def build_transition(table: SimilarityTable, vocab: Vocabulary,
                     threshold: float = 0.3) -> TransitionMatrix:
    """Threshold similarities, add self-loops, and row-normalize.

    Self-loops have weight 1 and survive every threshold < 1, so rows
    always sum to 1. Words with no other surviving edge are flagged.
    """
    if not 0.0 <= threshold < 1.0:
        raise ValueError("threshold must lie in [0, 1)")
    n = len(vocab)
    rows = list(range(n))
    cols = list(range(n))
    data = [1.0] * n
    has_edge = np.zeros(n, dtype=bool)
    for (w1, w2), sim in table.items():
        if sim < threshold or sim <= 0.0:
            continue
        i, j = vocab.index[w1], vocab.index[w2]
        rows.extend((i, j))
        cols.extend((j, i))
        data.extend((sim, sim))
        has_edge[i] = has_edge[j] = True
    mat = scipy.sparse.csr_matrix(
        (np.asarray(data), (np.asarray(rows), np.asarray(cols))), shape=(n, n)
    )
    row_sums = np.asarray(mat.sum(axis=1)).ravel()
    inv = scipy.sparse.diags(1.0 / row_sums)
    isolated = ~has_edge
    if bool(isolated.all()):
        logger.warning("word graph: no similarity edge survived the %.2f "
                       "threshold, walk reduces to identity", threshold)
    return TransitionMatrix(matrix=(inv @ mat).tocsr(), isolated=isolated,
                            vocab=vocab)


def _as_matrix(R):
    return R.matrix if isinstance(R, TransitionMatrix) else R


def random_walk(R, t, alpha: float = 0.5, mode: str = "closed_form",
                tol: float = 1e-10, max_iter: int = 1000) -> np.ndarray:
    """Solve s = alpha*s@R + (1-alpha)*t for the stationary score vector.

    ``iterative`` applies the update until the L1 change drops below
    tol; ``closed_form`` solves the linear system directly. Both return
    the same fixed point.
    """
    mat = _as_matrix(R)
    t = np.asarray(t, dtype=np.float64)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    if t.ndim != 1 or t.shape[0] != mat.shape[0] or mat.shape[0] != mat.shape[1]:
        raise ValueError("dimension mismatch between R and t")
    if t.size and float(t.min()) < 0:
        raise ValueError("t must be non-negative")

    if mode == "iterative":
        s = t.copy()
        for _ in range(max_iter):
            nxt = alpha * (s @ mat) + (1.0 - alpha) * t
            nxt = np.asarray(nxt).ravel()
            if float(np.abs(nxt - s).sum()) < tol:
                return nxt
            s = nxt
        raise NonConvergence(f"random walk did not converge in {max_iter} steps")
    if mode == "closed_form":
        # Solve (I - alpha R)^T s^T = (1-alpha) t^T.
        if scipy.sparse.issparse(mat):
            system = (scipy.sparse.identity(mat.shape[0], format="csc")
                      - alpha * mat).T.tocsc()
            try:
                lu = scipy.sparse.linalg.splu(system)
            except RuntimeError as exc:
                raise SingularSystem(str(exc)) from exc
            s = lu.solve((1.0 - alpha) * t)
        else:
            system = (np.eye(mat.shape[0]) - alpha * mat).T
            try:
                s = np.linalg.solve(system, (1.0 - alpha) * t)
            except np.linalg.LinAlgError as exc:
                raise SingularSystem(str(exc)) from exc
        if not np.all(np.isfinite(s)):
            raise SingularSystem("non-finite walk solution")
        return s
    raise ValueError(f"unknown mode {mode!r}")


def unify_topics(models, vocab_all: Vocabulary, R, alpha: float = 0.5) -> UnifiedTopicSpace:
    """Diffuse every leaf topic onto the unified vocabulary.

    Each topic-word vector is embedded (zeros elsewhere), walked with
    restart, and renormalized to a distribution. One factorization is
    shared across all topics.
    """
    mat = _as_matrix(R)
    n = len(vocab_all)
    if mat.shape != (n, n):
        raise ValueError("transition matrix does not match unified vocabulary")

    if scipy.sparse.issparse(mat):
        system = (scipy.sparse.identity(n, format="csc") - alpha * mat).T.tocsc()
        try:
            solve = scipy.sparse.linalg.splu(system).solve
        except RuntimeError as exc:
            raise SingularSystem(str(exc)) from exc
    else:
        lu_piv = scipy.linalg.lu_factor((np.eye(n) - alpha * mat).T)

        def solve(b):
            return scipy.linalg.lu_solve(lu_piv, b)

    labels = []
    vectors = []
    for model in models:
        if model.vocab is None:
            raise ValueError("model lacks a vocabulary reference")
        positions = np.asarray([vocab_all.index[w] for w in model.vocab.words],
                               dtype=np.int64)
        for k in range(model.K):
            t = np.zeros(n)
            t[positions] = model.leaf_topics[k]
            s = solve((1.0 - alpha) * t)
            if not np.all(np.isfinite(s)):
                raise SingularSystem("non-finite walk solution")
            total = float(s.sum())
            if total <= 0.0:
                raise SingularSystem("walk produced a zero vector")
            labels.append((model.source, k))
            vectors.append(s / total)
    return UnifiedTopicSpace(labels=tuple(labels),
                             matrix=np.asarray(vectors), vocab=vocab_all)
