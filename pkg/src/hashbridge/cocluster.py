"""Block co-clustering of the hashtag-topic matrix with side information.

Rows (hashtags) and columns (topics) are alternately reassigned to
minimize a squared-error objective between the matrix and its
block-mean reconstruction, plus two one-sided regularizers: topic rows
should cluster words consistently, and hashtag rows should respect item
co-occurrence.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import InfeasibleConfig

logger = logging.getLogger("hashbridge")


@dataclass(frozen=True)
class CoClusterConfig:
    """Cluster counts, regularizer weights and stopping controls.

    The divergence is fixed to squared Euclidean distance with
    block-average reconstruction; the seed drives initialization only.
    """

    l_row: int
    l_col: int
    lambda_t: float = 1.0
    lambda_o: float = 1.0
    max_iter: int = 100
    tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.l_row < 1 or self.l_col < 1:
            raise InfeasibleConfig("cluster counts must be at least 1")
        if self.lambda_t < 0 or self.lambda_o < 0:
            raise ValueError("regularizer weights must be non-negative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be non-negative")


@dataclass(frozen=True, eq=False)
class CoClusterResult:
    """Final mappings plus the per-iteration objective trace."""

    rho: np.ndarray
    gamma: np.ndarray
    objective_trace: tuple
    hashtag_weights: np.ndarray
    seed: int
    n_iter: int


def _one_hot(labels: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros((labels.shape[0], k))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def _block_means(H: np.ndarray, rho: np.ndarray, gamma: np.ndarray,
                 l_row: int, l_col: int) -> np.ndarray:
    rr = _one_hot(rho, l_row)
    rc = _one_hot(gamma, l_col)
    sums = rr.T @ H @ rc
    counts = np.outer(rr.sum(axis=0), rc.sum(axis=0))
    means = np.full((l_row, l_col), H.mean())
    np.divide(sums, counts, out=means, where=counts > 0)
    return means


def _cluster_rows(M: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Per-cluster mean rows; empty clusters take the global mean row."""
    ind = _one_hot(labels, k)
    counts = ind.sum(axis=0)
    sums = ind.T @ M
    means = np.tile(M.mean(axis=0), (k, 1))
    np.divide(sums, counts[:, None], out=means, where=counts[:, None] > 0)
    return means


def mbi_approximation(H, rho, gamma) -> np.ndarray:
    """Reconstruct H from block averages under the given mappings."""
    H = np.asarray(H, dtype=float)
    rho = np.asarray(rho, dtype=np.int64)
    gamma = np.asarray(gamma, dtype=np.int64)
    if rho.shape[0] != H.shape[0] or gamma.shape[0] != H.shape[1]:
        raise ValueError("mapping lengths must match matrix dimensions")
    if rho.min() < 0 or gamma.min() < 0:
        raise ValueError("cluster labels must be non-negative")
    means = _block_means(H, rho, gamma, int(rho.max()) + 1, int(gamma.max()) + 1)
    return means[rho][:, gamma]


def objective(H, T, O, rho, gamma, cfg: CoClusterConfig) -> float:
    """Normalized squared reconstruction error plus weighted side terms."""
    H = np.asarray(H, dtype=float)
    rho = np.asarray(rho, dtype=np.int64)
    gamma = np.asarray(gamma, dtype=np.int64)
    n_h, n_t = H.shape
    means = _block_means(H, rho, gamma, cfg.l_row, cfg.l_col)
    total = float(((H - means[rho][:, gamma]) ** 2).sum()) / (n_h * n_t)
    if T is not None and cfg.lambda_t > 0:
        T = np.asarray(T, dtype=float)
        tmean = _cluster_rows(T, gamma, cfg.l_col)
        total += cfg.lambda_t * float(((T - tmean[gamma]) ** 2).sum()) / T.size
    if O is not None and cfg.lambda_o > 0:
        O = np.asarray(O, dtype=float)
        omean = _cluster_rows(O, rho, cfg.l_row)
        total += cfg.lambda_o * float(((O - omean[rho]) ** 2).sum()) / O.size
    return total


def _column_costs(H, T, rho, gamma, cfg) -> np.ndarray:
    """Cost of placing each topic column into each column cluster,
    evaluated against statistics of the current mappings."""
    n_h, n_t = H.shape
    mu = _block_means(H, rho, gamma, cfg.l_row, cfg.l_col)
    rr = _one_hot(rho, cfg.l_row)
    nr = rr.sum(axis=0)
    per_cluster_sums = H.T @ rr
    colsq = (H ** 2).sum(axis=0)
    cost = (colsq[:, None] - 2.0 * (per_cluster_sums @ mu)
            + (nr @ (mu ** 2))[None, :]) / (n_h * n_t)
    if T is not None and cfg.lambda_t > 0:
        tmean = _cluster_rows(T, gamma, cfg.l_col)
        tcost = ((T ** 2).sum(axis=1)[:, None] - 2.0 * (T @ tmean.T)
                 + (tmean ** 2).sum(axis=1)[None, :])
        cost = cost + cfg.lambda_t * tcost / T.size
    return cost


def _row_costs(H, O, rho, gamma, cfg) -> np.ndarray:
    """Cost of placing each hashtag row into each row cluster."""
    n_h, n_t = H.shape
    mu = _block_means(H, rho, gamma, cfg.l_row, cfg.l_col)
    rc = _one_hot(gamma, cfg.l_col)
    nc = rc.sum(axis=0)
    per_cluster_sums = H @ rc
    rowsq = (H ** 2).sum(axis=1)
    cost = (rowsq[:, None] - 2.0 * (per_cluster_sums @ mu.T)
            + ((mu ** 2) @ nc)[None, :]) / (n_h * n_t)
    if O is not None and cfg.lambda_o > 0:
        omean = _cluster_rows(O, rho, cfg.l_row)
        ocost = ((O ** 2).sum(axis=1)[:, None] - 2.0 * (O @ omean.T)
                 + (omean ** 2).sum(axis=1)[None, :])
        cost = cost + cfg.lambda_o * ocost / O.size
    return cost


def assign_columns(H, T, rho, gamma, cfg: CoClusterConfig) -> np.ndarray:
    """Batch-reassign topic columns; ties go to the lowest cluster index."""
    return np.argmin(_column_costs(np.asarray(H, float), T, rho, gamma, cfg),
                     axis=1)


def assign_rows(H, O, rho, gamma, cfg: CoClusterConfig) -> np.ndarray:
    """Batch-reassign hashtag rows; ties go to the lowest cluster index."""
    return np.argmin(_row_costs(np.asarray(H, float), O, rho, gamma, cfg),
                     axis=1)


def _kmeans_labels(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Plain k-means labels with farthest-first seeding.

    Used only to initialize a mapping from side-information rows; the
    rng picks the first seed, everything after is deterministic.
    """
    n = X.shape[0]
    if k >= n:
        return np.arange(n, dtype=np.int64) % k
    seeds = [int(rng.integers(n))]
    d2 = ((X - X[seeds[0]]) ** 2).sum(axis=1)
    while len(seeds) < k:
        nxt = int(np.argmax(d2))
        seeds.append(nxt)
        d2 = np.minimum(d2, ((X - X[nxt]) ** 2).sum(axis=1))
    centers = X[np.asarray(seeds)].copy()
    labels = None
    for _ in range(20):
        dist = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new = np.argmin(dist, axis=1)
        for c in range(k):
            if not np.any(new == c):
                new[int(np.argmax(dist[np.arange(n), new]))] = c
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for c in range(k):
            centers[c] = X[labels == c].mean(axis=0)
    return labels.astype(np.int64)


def _repair_empty(labels: np.ndarray, cost: np.ndarray, k: int) -> np.ndarray:
    """Fill each empty cluster with the worst-fitting element of a
    cluster that can spare one; refitting afterwards cannot increase
    the objective because singleton statistics fit the element exactly."""
    labels = labels.copy()
    for c in range(k):
        if np.any(labels == c):
            continue
        sizes = np.bincount(labels, minlength=k)
        movable = np.flatnonzero(sizes[labels] >= 2)
        worst = movable[int(np.argmax(cost[movable, labels[movable]]))]
        labels[worst] = c
    return labels


def ccbr_fit(H, T, O, cfg: CoClusterConfig, row_counts=None) -> CoClusterResult:
    """Alternating minimization over column and row assignments.

    Every phase evaluates candidates against freshly refit statistics,
    so the recorded objective trace is non-increasing. row_counts, when
    given, weight the per-cluster hashtag distribution (defaults to
    uniform within cluster).
    """
    H = np.asarray(H, dtype=float)
    n_h, n_t = H.shape
    if cfg.l_row > n_h or cfg.l_col > n_t:
        raise InfeasibleConfig(
            f"cannot form {cfg.l_row}x{cfg.l_col} clusters from a "
            f"{n_h}x{n_t} matrix")
    if T is not None and np.asarray(T).shape[0] != n_t:
        raise ValueError("T must have one row per topic column of H")
    if O is not None and np.asarray(O).shape != (n_h, n_h):
        raise ValueError("O must be square with one row per hashtag")

    rng = np.random.default_rng(cfg.seed)
    if T is not None and cfg.lambda_t > 0:
        # Column supports of H never overlap across sources, so the
        # topic-word rows are the only usable signal for a column start;
        # rows then start from their mass profile over those clusters.
        gamma = _kmeans_labels(np.asarray(T, dtype=float), cfg.l_col, rng)
        sizes = np.maximum(np.bincount(gamma, minlength=cfg.l_col), 1)
        compressed = (H @ _one_hot(gamma, cfg.l_col)) / sizes
        rho = _kmeans_labels(compressed, cfg.l_row, rng)
    else:
        rho = rng.permutation(np.arange(n_h, dtype=np.int64) % cfg.l_row)
        gamma = rng.permutation(np.arange(n_t, dtype=np.int64) % cfg.l_col)

    trace = [objective(H, T, O, rho, gamma, cfg)]
    n_iter = 0
    for it in range(cfg.max_iter):
        prev_obj = trace[-1]
        prev_rho, prev_gamma = rho, gamma

        cost_c = _column_costs(H, T, rho, gamma, cfg)
        new_gamma = _repair_empty(np.argmin(cost_c, axis=1), cost_c, cfg.l_col)
        changed = bool(np.any(new_gamma != gamma))
        gamma = new_gamma

        cost_r = _row_costs(H, O, rho, gamma, cfg)
        new_rho = _repair_empty(np.argmin(cost_r, axis=1), cost_r, cfg.l_row)
        changed |= bool(np.any(new_rho != rho))
        rho = new_rho

        obj = objective(H, T, O, rho, gamma, cfg)
        if obj > prev_obj:
            # Rounding noise only; keep the previous state and the trace exact.
            rho, gamma = prev_rho, prev_gamma
            break
        trace.append(obj)
        n_iter = it + 1
        if not changed or prev_obj - obj < cfg.tol:
            break

    weights = cluster_weights(rho, cfg.l_row, row_counts)
    return CoClusterResult(rho=rho, gamma=gamma, objective_trace=tuple(trace),
                           hashtag_weights=weights, seed=cfg.seed,
                           n_iter=n_iter)


def cluster_weights(rho: np.ndarray, l_row: int, row_counts=None) -> np.ndarray:
    """Within-cluster hashtag weights, proportional to row_counts."""
    n = rho.shape[0]
    counts = (np.ones(n) if row_counts is None
              else np.asarray(row_counts, dtype=float))
    if counts.shape != (n,):
        raise ValueError("row_counts length must match rho")
    if counts.min() <= 0:
        raise ValueError("row_counts must be positive")
    denom = np.bincount(rho, weights=counts, minlength=l_row)
    return counts / denom[rho]


def choose_restart(H, T, O, cfg: CoClusterConfig, n_restarts: int,
                   row_counts=None) -> CoClusterResult:
    """Best of n_restarts fits with consecutive seeds; ties keep the
    earliest seed."""
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    best = None
    for i in range(n_restarts):
        res = ccbr_fit(H, T, O, replace(cfg, seed=cfg.seed + i),
                       row_counts=row_counts)
        if best is None or res.objective_trace[-1] < best.objective_trace[-1]:
            best = res
    return best


def dump_coclusters(result: CoClusterResult, path) -> None:
    """Write mappings and the objective trace as inspectable text."""
    lines = [
        "rho: " + " ".join(str(int(x)) for x in result.rho),
        "gamma: " + " ".join(str(int(x)) for x in result.gamma),
        "objective_trace: " + " ".join(f"{v:.12g}" for v in result.objective_trace),
        f"seed: {result.seed}",
        f"iterations: {result.n_iter}",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
