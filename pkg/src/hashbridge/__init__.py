"""Cross-network hashtag aggregation.

Per-source topic trees feed a unified topic space; hashtags are
co-clustered against that space with co-occurrence regularization, and
the resulting clusters are ranked into a browsable hierarchy.
"""

from .cocluster import (CoClusterConfig, CoClusterResult, ccbr_fit,
                        choose_restart, mbi_approximation, objective)
from .corpus import (HashtagProfile, Item, QueryCollection, Source,
                     Vocabulary, build_cooccurrence, build_vocabulary,
                     corpus_stats, extract_hashtag_profiles, ingest)
from .errors import HashbridgeError
from .metrics import ndcg, nfr, nmi, pearson
from .pipeline import PipelineConfig, load_config, run_pipeline
from .ranking import (Hierarchy, assemble_hierarchy, cluster_topic_dist,
                      describe_cluster, rank_clusters, semantic_relevance)
from .synth import PlantedSpec, generate_block_matrix, generate_corpus
from .topics import (HldaConfig, TopicModel, fit_hlda,
                     hashtag_topic_distribution)
from .wordgraph import (build_transition, load_similarity, random_walk,
                        unify_topics)

__version__ = "0.1.0"

__all__ = [
    "CoClusterConfig", "CoClusterResult", "ccbr_fit", "choose_restart",
    "mbi_approximation", "objective",
    "HashtagProfile", "Item", "QueryCollection", "Source", "Vocabulary",
    "build_cooccurrence", "build_vocabulary", "corpus_stats",
    "extract_hashtag_profiles", "ingest",
    "HashbridgeError",
    "ndcg", "nfr", "nmi", "pearson",
    "PipelineConfig", "load_config", "run_pipeline",
    "Hierarchy", "assemble_hierarchy", "cluster_topic_dist",
    "describe_cluster", "rank_clusters", "semantic_relevance",
    "PlantedSpec", "generate_block_matrix", "generate_corpus",
    "HldaConfig", "TopicModel", "fit_hlda", "hashtag_topic_distribution",
    "build_transition", "load_similarity", "random_walk", "unify_topics",
    "__version__",
]
