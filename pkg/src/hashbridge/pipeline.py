"""End-to-end orchestration: config parsing, stage composition and
atomic artifact writing.

The pipeline is a one-shot batch: ingest -> per-source topic models ->
unified topic space -> co-clustering -> ranked hierarchy. Every stage
failure surfaces as a StageError naming the stage; outputs land only
when the whole run succeeded.
"""

from __future__ import annotations

import configparser
import json
import os
from contextlib import contextmanager
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .cocluster import CoClusterConfig, choose_restart
from .corpus import (SOURCE_ORDER, QueryCollection, TokenizerConfig,
                     Vocabulary, build_cooccurrence, build_vocabulary,
                     default_stopwords, docs_as_indices,
                     extract_hashtag_profiles, ingest, load_stopwords)
from .errors import EmptyVocabulary, HashbridgeError, StageError, TooFewDocuments
from .ranking import (Hierarchy, appearance_counts, assemble_hierarchy,
                      cluster_topic_dist, describe_cluster, rank_clusters,
                      semantic_relevance)
from .report import render_report
from .topics import HldaConfig, fit_hlda, hashtag_topic_distribution
from .wordgraph import build_transition, load_similarity, unify_topics


@dataclass(frozen=True)
class WalkSettings:
    alpha: float = 0.5
    threshold: float = 0.3
    tol: float = 1e-10
    max_iter: int = 1000


@dataclass(frozen=True)
class RankSettings:
    psi: float = 0.5
    description_words: int = 8


@dataclass(frozen=True)
class PipelineConfig:
    """Fully resolved run parameters; every field has one source of truth."""

    input: str
    similarity: str
    cocluster: CoClusterConfig
    output: str = "out"
    query: str | None = None
    stopwords: str | None = None
    min_freq: int = 2
    restarts: int = 8
    hlda: HldaConfig = HldaConfig()
    walk: WalkSettings = WalkSettings()
    ranking: RankSettings = RankSettings()


def load_config(path) -> PipelineConfig:
    """Parse the INI run configuration; unknown keys are rejected."""
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise FileNotFoundError(f"config file {path} not found")

    known = {
        "io": {"input", "output", "similarity", "stopwords", "query"},
        "hlda": {"alpha", "gamma", "eta", "iterations", "seed"},
        "walk": {"alpha", "threshold", "tol", "max_iter"},
        "cocluster": {"l_row", "l_col", "lambda_t", "lambda_o", "restarts",
                      "seed", "max_iter", "tol"},
        "ranking": {"psi", "description_words"},
        "tokenizer": {"min_freq"},
    }
    for section in parser.sections():
        if section not in known:
            raise ValueError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in known[section]:
                raise ValueError(f"unknown config key [{section}] {key}")

    def need(section: str, key: str) -> str:
        if not parser.has_option(section, key):
            raise ValueError(f"config requires [{section}] {key}")
        return parser.get(section, key)

    input_path = need("io", "input")
    similarity = need("io", "similarity")
    l_row = int(need("cocluster", "l_row"))

    hlda = HldaConfig(
        alpha=parser.getfloat("hlda", "alpha", fallback=10.0),
        gamma=parser.getfloat("hlda", "gamma", fallback=1.0),
        eta=parser.getfloat("hlda", "eta", fallback=0.1),
        iterations=parser.getint("hlda", "iterations", fallback=500),
        seed=parser.getint("hlda", "seed", fallback=0),
    )
    walk = WalkSettings(
        alpha=parser.getfloat("walk", "alpha", fallback=0.5),
        threshold=parser.getfloat("walk", "threshold", fallback=0.3),
        tol=parser.getfloat("walk", "tol", fallback=1e-10),
        max_iter=parser.getint("walk", "max_iter", fallback=1000),
    )
    cocluster = CoClusterConfig(
        l_row=l_row,
        l_col=parser.getint("cocluster", "l_col", fallback=20),
        lambda_t=parser.getfloat("cocluster", "lambda_t", fallback=1.0),
        lambda_o=parser.getfloat("cocluster", "lambda_o", fallback=1.0),
        max_iter=parser.getint("cocluster", "max_iter", fallback=100),
        tol=parser.getfloat("cocluster", "tol", fallback=1e-9),
        seed=parser.getint("cocluster", "seed", fallback=0),
    )
    ranking = RankSettings(
        psi=parser.getfloat("ranking", "psi", fallback=0.5),
        description_words=parser.getint("ranking", "description_words",
                                        fallback=8),
    )
    return PipelineConfig(
        input=input_path,
        similarity=similarity,
        cocluster=cocluster,
        output=parser.get("io", "output", fallback="out"),
        query=parser.get("io", "query", fallback=None),
        stopwords=parser.get("io", "stopwords", fallback=None),
        min_freq=parser.getint("tokenizer", "min_freq", fallback=2),
        restarts=parser.getint("cocluster", "restarts", fallback=8),
        hlda=hlda,
        walk=walk,
        ranking=ranking,
    )


def override_config(cfg: PipelineConfig, output: str | None = None,
                    seed: int | None = None) -> PipelineConfig:
    """Apply CLI-level overrides; the seed drives both stochastic stages."""
    if output is not None:
        cfg = replace(cfg, output=output)
    if seed is not None:
        cfg = replace(cfg, hlda=replace(cfg.hlda, seed=seed),
                      cocluster=replace(cfg.cocluster, seed=seed))
    return cfg


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def _config_lines(cfg: PipelineConfig) -> list[str]:
    flat: dict[str, object] = {}

    def flatten(prefix: str, value) -> None:
        if isinstance(value, dict):
            for k, v in value.items():
                flatten(f"{prefix}.{k}" if prefix else k, v)
        else:
            flat[prefix] = value

    flatten("", asdict(cfg))
    return [f"config {key} = {flat[key]}" for key in sorted(flat)]


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def hierarchy_to_dict(hierarchy: Hierarchy) -> dict:
    """Serialize a hierarchy to the published JSON structure."""
    clusters = []
    for rank, cluster in enumerate(hierarchy.clusters, 1):
        clusters.append({
            "rank": rank,
            "importance": float(cluster.importance),
            "description": [w for w, _ in cluster.description],
            "hashtags": [
                {
                    "tag": entry.tag,
                    "source": entry.source.value,
                    "weight": float(entry.weight),
                    "items": [
                        {
                            "id": item.id,
                            "timestamp": item.timestamp,
                            "text": item.text,
                            "comments": item.comments,
                            "endorsements": item.endorsements,
                        }
                        for item in entry.items
                    ],
                }
                for entry in cluster.hashtags
            ],
        })
    return {"query": hierarchy.query, "clusters": clusters}


def run_pipeline(cfg: PipelineConfig) -> Hierarchy:
    """Execute every stage and write hierarchy.json, report.html, run_log.

    Returns the assembled hierarchy for in-process callers.
    """
    log = _config_lines(cfg)

    with _stage("corpus"):
        qc = ingest(Path(cfg.input), query=cfg.query)
        stop = (load_stopwords(cfg.stopwords) if cfg.stopwords
                else default_stopwords())
        tokcfg = TokenizerConfig(stopwords=stop, min_freq=cfg.min_freq)
        profiles = extract_hashtag_profiles(qc)
        for source in SOURCE_ORDER:
            log.append(f"corpus: {source.value} items = "
                       f"{len(qc.items_by_source.get(source, ()))}")
        log.append(f"corpus: skipped input lines = {len(qc.skipped)}")
        log.append(f"corpus: hashtag profiles = {len(profiles)}")

    with _stage("topics"):
        models = {}
        for index, source in enumerate(SOURCE_ORDER):
            items = qc.items(source)
            try:
                vocab_s = build_vocabulary(items, tokcfg)
                docs = docs_as_indices(items, vocab_s, tokcfg)
                model = fit_hlda(
                    docs,
                    replace(cfg.hlda, seed=cfg.hlda.seed + index),
                    vocab=vocab_s,
                    doc_ids=[item.id for item in items],
                    source=source,
                )
            except (EmptyVocabulary, TooFewDocuments) as exc:
                log.append(f"topics: {source.value} skipped ({exc})")
                continue
            models[source] = model
            log.append(f"topics: {source.value} vocab={len(vocab_s)} "
                       f"docs={len(model.doc_ids)} "
                       f"empty_docs={len(model.skipped)} K={model.K}")
        if not models:
            raise TooFewDocuments("no source has enough documents to model")

    with _stage("wordgraph"):
        vocab_all = Vocabulary.from_words(
            sorted({w for m in models.values() for w in m.vocab.words}))
        table = load_similarity(Path(cfg.similarity), vocab_all)
        transition = build_transition(table, vocab_all, cfg.walk.threshold)
        ordered_models = [models[s] for s in SOURCE_ORDER if s in models]
        unified = unify_topics(ordered_models, vocab_all, transition,
                               cfg.walk.alpha)
        log.append(f"wordgraph: unified vocab = {len(vocab_all)}")
        log.append(f"wordgraph: similarity pairs = {len(table.pairs)}")
        log.append(f"wordgraph: isolated words = "
                   f"{int(transition.isolated.sum())}")
        log.append(f"wordgraph: unified topics = {len(unified)}")

    with _stage("cocluster"):
        offsets = {}
        pos = 0
        for source in SOURCE_ORDER:
            if source in models:
                offsets[source] = pos
                pos += models[source].K
        n_topics = pos

        used_profiles = []
        rows = []
        row_counts = []
        for profile in profiles:
            model = models.get(profile.source)
            if model is None:
                log.append(f"cocluster: {profile.source.value}/{profile.tag} "
                           "dropped (source not modeled)")
                continue
            modeled = frozenset(i for i in profile.item_ids
                                if i in model.doc_index)
            if not modeled:
                log.append(f"cocluster: {profile.source.value}/{profile.tag} "
                           "dropped (no modeled items)")
                continue
            if len(modeled) < len(profile.item_ids):
                log.append(f"cocluster: {profile.source.value}/{profile.tag} "
                           f"uses {len(modeled)}/{len(profile.item_ids)} items")
            dist = hashtag_topic_distribution(
                model, replace(profile, item_ids=modeled))
            row = np.zeros(n_topics)
            row[offsets[profile.source]:offsets[profile.source] + model.K] = dist
            rows.append(row)
            used_profiles.append(profile)
            row_counts.append(len(profile.item_ids))
        if not rows:
            raise HashbridgeError("no hashtag profile could be modeled")
        H = np.asarray(rows)
        O = build_cooccurrence(used_profiles, qc).astype(float)
        cc_cfg = cfg.cocluster
        if cc_cfg.l_col > n_topics:
            log.append(f"cocluster: l_col clamped from {cc_cfg.l_col} to "
                       f"{n_topics} (unified topic count)")
            cc_cfg = replace(cc_cfg, l_col=n_topics)
        result = choose_restart(H, unified.matrix, O, cc_cfg, cfg.restarts,
                                row_counts=np.asarray(row_counts, dtype=float))
        log.append(f"cocluster: H is {H.shape[0]}x{H.shape[1]}, "
                   f"l_row={cc_cfg.l_row} l_col={cc_cfg.l_col} "
                   f"restarts={cfg.restarts}")
        log.append(f"cocluster: best seed = {result.seed}, "
                   f"iterations = {result.n_iter}")
        log.append("cocluster: objective trace = "
                   + " ".join(f"{v:.12g}" for v in result.objective_trace))

    with _stage("ranking"):
        topic_dists = cluster_topic_dist(result, H)
        counts = appearance_counts(result.rho, used_profiles)
        if topic_dists.shape[0] >= 2:
            kappa = semantic_relevance(topic_dists)
            eta = rank_clusters(kappa, counts, cfg.ranking.psi,
                                mode="closed_form")
        else:
            eta = counts.copy()
            log.append("ranking: single cluster, importance = appearance")
        descriptions = [
            describe_cluster(topic_dists[l], unified.matrix, vocab_all,
                             cfg.ranking.description_words)
            for l in range(topic_dists.shape[0])
        ]
        items_by_id = {item.id: item for item in qc.items()}
        hierarchy = assemble_hierarchy(qc.query, result, used_profiles,
                                       items_by_id, eta, topic_dists,
                                       descriptions)
        log.append("ranking: importance = "
                   + " ".join(f"{v:.12g}" for v in eta))

    with _stage("write"):
        out_dir = Path(cfg.output)
        out_dir.mkdir(parents=True, exist_ok=True)
        json_text = json.dumps(hierarchy_to_dict(hierarchy), indent=2,
                               sort_keys=True) + "\n"
        html_text = render_report(hierarchy)
        log_text = "\n".join(log) + "\n"
        _atomic_write(out_dir / "hierarchy.json", json_text)
        _atomic_write(out_dir / "report.html", html_text)
        _atomic_write(out_dir / "run_log", log_text)

    return hierarchy
