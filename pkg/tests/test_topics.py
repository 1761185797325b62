"""Depth-2 topic model: recovery, invariants, aggregation."""

import numpy as np
import pytest

from hashbridge.corpus import HashtagProfile, Source, Vocabulary
from hashbridge.errors import TooFewDocuments, UnknownItem
from hashbridge.metrics import nmi
from hashbridge.topics import (
    HldaConfig,
    TopicModel,
    dump_topics,
    fit_hlda,
    hashtag_topic_distribution,
)


def planted_docs(n_docs=200, block=8, tokens=20, seed=0):
    """Two leaf topics over disjoint word blocks, shared root block."""
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, size=n_docs)
    docs = []
    for lab in labels:
        lo = lab * block
        docs.append(rng.integers(lo, lo + block, size=tokens))
    return docs, labels


def test_planted_two_leaf_recovery():
    docs, labels = planted_docs()
    model = fit_hlda(docs, HldaConfig(iterations=100, seed=1))
    assert nmi(list(labels), list(model.leaf_assignment)) >= 0.8


def test_repeated_document_collapses_to_one_leaf():
    docs = [np.array([0, 1, 2, 3])] * 10
    model = fit_hlda(docs, HldaConfig(iterations=60, seed=0))
    assert model.K == 1


def test_distributions_sum_to_one():
    docs, _ = planted_docs(n_docs=40, seed=3)
    model = fit_hlda(docs, HldaConfig(iterations=40, seed=3))
    assert model.root_topic.sum() == pytest.approx(1.0, abs=1e-9)
    for k in range(model.K):
        assert model.leaf_topics[k].sum() == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(model.doc_topics.sum(axis=1), 1.0, atol=1e-9)
    assert np.allclose(model.doc_leaf_mass.sum(axis=1),
                       model.doc_topics[:, 1], atol=1e-9)


def test_empty_docs_skipped_and_reported():
    docs = [np.array([0, 1]), np.array([], dtype=np.int64), np.array([1, 1])]
    model = fit_hlda(docs, HldaConfig(iterations=10, seed=0),
                     doc_ids=["a", "b", "c"])
    assert model.doc_ids == ("a", "c")
    assert len(model.skipped) == 1


def test_too_few_documents():
    with pytest.raises(TooFewDocuments):
        fit_hlda([np.array([0, 1])], HldaConfig(iterations=10, seed=0))


def test_out_of_range_token_rejected():
    vocab = Vocabulary.from_words(["a", "b"])
    with pytest.raises(ValueError):
        fit_hlda([np.array([0, 5]), np.array([0])],
                 HldaConfig(iterations=5, seed=0), vocab=vocab)


def test_loglik_trace_improves():
    docs, _ = planted_docs(n_docs=60, seed=2)
    model = fit_hlda(docs, HldaConfig(iterations=80, seed=2))
    trace = model.loglik_trace
    assert len(trace) == 80
    assert trace[-1] > trace[0]


def test_same_seed_identical_fit():
    docs, _ = planted_docs(n_docs=30, seed=4)
    a = fit_hlda(docs, HldaConfig(iterations=30, seed=9))
    b = fit_hlda(docs, HldaConfig(iterations=30, seed=9))
    assert np.array_equal(a.leaf_assignment, b.leaf_assignment)
    assert np.array_equal(a.leaf_topics, b.leaf_topics)
    assert a.loglik_trace == b.loglik_trace


def test_config_validation():
    with pytest.raises(ValueError):
        HldaConfig(depth=3)
    with pytest.raises(ValueError):
        HldaConfig(alpha=0.0)
    with pytest.raises(ValueError):
        HldaConfig(iterations=0)


def soft_model(mass_rows, ids):
    """Minimal model carrying explicit per-doc leaf mass rows."""
    mass = np.asarray(mass_rows, dtype=float)
    n, k = mass.shape
    return TopicModel(
        root_topic=np.full(3, 1 / 3),
        leaf_topics=np.full((k, 3), 1 / 3),
        doc_topics=np.column_stack([1 - mass.sum(1), mass.sum(1)]),
        leaf_assignment=np.argmax(mass, axis=1),
        doc_leaf_mass=mass,
        doc_ids=tuple(ids),
        skipped=(),
        loglik_trace=(),
    )


def test_aggregation_single_item_identity():
    model = soft_model([[0.2, 0.8]], ["i1"])
    prof = HashtagProfile("t", Source.TWITTER, frozenset({"i1"}))
    dist = hashtag_topic_distribution(model, prof)
    assert dist == pytest.approx([0.2, 0.8])


def test_aggregation_two_item_symmetry():
    model = soft_model([[1.0, 0.0], [0.0, 1.0]], ["i1", "i2"])
    prof = HashtagProfile("t", Source.TWITTER, frozenset({"i1", "i2"}))
    dist = hashtag_topic_distribution(model, prof)
    assert dist == pytest.approx([0.5, 0.5])


def test_aggregation_three_item_mix():
    # (0.5,0.5)+(1,0)+(0.5,0.5) sums to (2,1); normalized (2/3, 1/3)
    model = soft_model([[0.5, 0.5], [1.0, 0.0], [0.5, 0.5]],
                       ["i1", "i2", "i3"])
    prof = HashtagProfile("t", Source.TWITTER, frozenset({"i1", "i2", "i3"}))
    dist = hashtag_topic_distribution(model, prof)
    assert dist == pytest.approx([2 / 3, 1 / 3])


def test_aggregation_unknown_item():
    model = soft_model([[1.0, 0.0]], ["i1"])
    prof = HashtagProfile("t", Source.TWITTER, frozenset({"i9"}))
    with pytest.raises(UnknownItem):
        hashtag_topic_distribution(model, prof)


def test_aggregation_zero_mass_uniform():
    model = soft_model([[0.0, 0.0]], ["i1"])
    prof = HashtagProfile("t", Source.TWITTER, frozenset({"i1"}))
    dist = hashtag_topic_distribution(model, prof)
    assert dist == pytest.approx([0.5, 0.5])


def test_dump_topics_writes_summary(tmp_path):
    docs, _ = planted_docs(n_docs=30, seed=5)
    vocab = Vocabulary.from_words([f"w{i}" for i in range(16)])
    model = fit_hlda(docs, HldaConfig(iterations=30, seed=5), vocab=vocab)
    out = tmp_path / "topics.txt"
    dump_topics(model, out, top_n=5)
    text = out.read_text()
    assert "leaves" in text
    assert "w0" in text or "w8" in text
