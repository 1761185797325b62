"""Synthetic corpora and block matrices with planted ground truth.

Every generator is a pure function of its spec, so tests can treat the
planted labels as oracles and rerun byte-identical fixtures.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import SOURCE_ORDER, Item, QueryCollection, Source


@dataclass(frozen=True)
class PlantedSpec:
    """Shape of a planted-subtopic corpus.

    Each subtopic owns a disjoint word block; every item carries exactly
    one hashtag and draws its tokens from its subtopic's block except
    for a ``noise`` fraction drawn from the full planted vocabulary.
    """

    n_subtopics: int = 3
    tags_per_source: int = 2
    items_per_tag: int = 5
    vocab_per_subtopic: int = 20
    noise: float = 0.0
    seed: int = 0
    tokens_per_item: int = 12

    def __post_init__(self):
        if min(self.n_subtopics, self.tags_per_source, self.items_per_tag,
               self.vocab_per_subtopic, self.tokens_per_item) < 1:
            raise ValueError("all counts must be at least 1")
        if not 0.0 <= self.noise < 1.0:
            raise ValueError("noise must lie in [0, 1)")


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Planted labels: (source value, tag) -> subtopic and id -> subtopic."""

    n_subtopics: int
    hashtag_labels: dict
    item_labels: dict


def subtopic_words(spec: PlantedSpec, subtopic: int) -> list[str]:
    """The word block owned by one subtopic."""
    return [f"topic{subtopic}word{i:02d}" for i in range(spec.vocab_per_subtopic)]


def generate_corpus(spec: PlantedSpec) -> tuple[QueryCollection, GroundTruth]:
    """Build a three-source collection with one planted subtopic per item."""
    rng = np.random.default_rng(spec.seed)
    blocks = [subtopic_words(spec, s) for s in range(spec.n_subtopics)]
    all_words = [w for block in blocks for w in block]

    resolutions = ((640, 480), (800, 600), (1024, 768))
    by_source: dict[Source, list[Item]] = {s: [] for s in SOURCE_ORDER}
    hashtag_labels: dict[tuple[str, str], int] = {}
    item_labels: dict[str, int] = {}
    timestamp = 1_500_000_000

    for source in SOURCE_ORDER:
        for s in range(spec.n_subtopics):
            block = blocks[s]
            for t in range(spec.tags_per_source):
                tag = f"{source.value}s{s}tag{t}"
                hashtag_labels[(source.value, tag)] = s
                for i in range(spec.items_per_tag):
                    tokens = []
                    for _ in range(spec.tokens_per_item):
                        if spec.noise > 0 and rng.random() < spec.noise:
                            tokens.append(all_words[int(rng.integers(len(all_words)))])
                        else:
                            tokens.append(block[int(rng.integers(len(block)))])
                    item_id = f"{source.value}-{s}-{t}-{i}"
                    width = height = duration = None
                    if source is Source.FLICKR:
                        width, height = resolutions[int(rng.integers(3))]
                    elif source is Source.YOUTUBE:
                        duration = round(float(rng.uniform(15.0, 600.0)), 1)
                    item = Item(
                        id=item_id,
                        source=source,
                        text=" ".join(tokens),
                        hashtags=(tag,),
                        timestamp=timestamp,
                        comments=int(rng.integers(0, 20)),
                        endorsements=int(rng.integers(0, 50)),
                        width=width,
                        height=height,
                        duration=duration,
                    )
                    timestamp += 60
                    by_source[source].append(item)
                    item_labels[item_id] = s

    qc = QueryCollection(
        query=f"planted{spec.n_subtopics}",
        items_by_source={s: tuple(v) for s, v in by_source.items()},
    )
    truth = GroundTruth(n_subtopics=spec.n_subtopics,
                        hashtag_labels=hashtag_labels,
                        item_labels=item_labels)
    return qc, truth


def generate_block_matrix(n_rows: int, n_cols: int, l_row: int, l_col: int,
                          noise_sigma: float, seed: int):
    """Block-constant matrix with distinct block values plus clipped noise.

    Returns (matrix, row labels, column labels); labelings are balanced
    so no planted cluster is empty.
    """
    if l_row > n_rows or l_col > n_cols:
        raise ValueError("cluster counts cannot exceed dimensions")
    if l_row < 1 or l_col < 1:
        raise ValueError("cluster counts must be at least 1")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    rng = np.random.default_rng(seed)
    rho = rng.permutation(np.arange(n_rows, dtype=np.int64) % l_row)
    gamma = rng.permutation(np.arange(n_cols, dtype=np.int64) % l_col)
    values = rng.permutation(np.linspace(0.0, 1.0, l_row * l_col))
    values = values.reshape(l_row, l_col)
    M = values[rho][:, gamma]
    if noise_sigma > 0:
        M = M + rng.normal(0.0, noise_sigma, size=M.shape)
        M = np.maximum(M, 0.0)
    return M, rho, gamma


def write_truth(truth: GroundTruth, hashtag_path, item_path) -> None:
    """Emit the planted labels as two sorted CSV files."""
    with open(hashtag_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "tag", "subtopic"])
        for (source, tag), label in sorted(truth.hashtag_labels.items()):
            writer.writerow([source, tag, label])
    with open(item_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "subtopic"])
        for item_id, label in sorted(truth.item_labels.items()):
            writer.writerow([item_id, label])
