"""Ingestion of per-query item collections and derived corpus structures.

Items arrive as JSONL, one social post per line. From a collection this
module builds tokenized vocabularies, per-source hashtag profiles, the
hashtag co-occurrence matrix and descriptive statistics.
"""

from __future__ import annotations

import json
import logging
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import AllRecordsInvalid, EmptyVocabulary, SchemaViolation

logger = logging.getLogger("hashbridge")

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class Source(Enum):
    TWITTER = "twitter"
    FLICKR = "flickr"
    YOUTUBE = "youtube"


#: Canonical iteration order for anything keyed by source.
SOURCE_ORDER = (Source.TWITTER, Source.FLICKR, Source.YOUTUBE)


def normalize_hashtag(raw: str) -> str:
    """Lowercase, NFC-normalize and strip the leading '#' from a hashtag."""
    tag = unicodedata.normalize("NFC", raw.strip())
    if tag.startswith("#"):
        tag = tag[1:]
    return tag.lower()


@dataclass(frozen=True)
class Item:
    """One social post; the atomic unit of every corpus."""

    id: str
    source: Source
    text: str
    hashtags: tuple[str, ...]
    timestamp: int
    comments: int
    endorsements: int
    width: int | None = None
    height: int | None = None
    duration: float | None = None

    def __post_init__(self):
        if self.timestamp < 0:
            raise SchemaViolation(f"item {self.id}: negative timestamp")
        if self.comments < 0 or self.endorsements < 0:
            raise SchemaViolation(f"item {self.id}: negative engagement count")
        # Hashtags must arrive normalized and deduplicated.
        normalized = []
        seen = set()
        for tag in self.hashtags:
            norm = normalize_hashtag(tag)
            if norm and norm not in seen:
                seen.add(norm)
                normalized.append(norm)
        object.__setattr__(self, "hashtags", tuple(normalized))


@dataclass(frozen=True)
class QueryCollection:
    """Per-source item lists for one query."""

    query: str
    items_by_source: dict[Source, tuple[Item, ...]]
    skipped: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        for source, items in self.items_by_source.items():
            for item in items:
                if item.source is not source:
                    raise SchemaViolation(
                        f"item {item.id} has source {item.source.value} but is "
                        f"listed under {source.value}"
                    )

    def items(self, source: Source | None = None) -> list[Item]:
        if source is not None:
            return list(self.items_by_source.get(source, ()))
        out: list[Item] = []
        for src in SOURCE_ORDER:
            out.extend(self.items_by_source.get(src, ()))
        return out

    def __len__(self) -> int:
        return sum(len(v) for v in self.items_by_source.values())


@dataclass(frozen=True)
class Vocabulary:
    """Ordered token list with a word -> position map."""

    words: tuple[str, ...]
    index: dict[str, int] = field(compare=False)

    @classmethod
    def from_words(cls, words) -> "Vocabulary":
        ordered = tuple(words)
        if len(set(ordered)) != len(ordered):
            raise ValueError("vocabulary words must be unique")
        return cls(words=ordered, index={w: i for i, w in enumerate(ordered)})

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index


@dataclass(frozen=True)
class HashtagProfile:
    """A hashtag on one source together with its annotated item set."""

    tag: str
    source: Source
    item_ids: frozenset[str]
    topic_dist: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.item_ids:
            raise SchemaViolation(f"profile {self.tag}: empty item set")
        if self.topic_dist is not None:
            arr = np.asarray(self.topic_dist, dtype=float)
            if arr.min() < 0 or abs(arr.sum() - 1.0) > 1e-9:
                raise SchemaViolation(
                    f"profile {self.tag}: topic_dist is not a distribution"
                )

    @property
    def key(self) -> tuple[str, str]:
        return (self.source.value, self.tag)


_REQUIRED_FIELDS = ("id", "source", "text", "hashtags", "timestamp",
                    "comments", "endorsements")


def _item_from_record(rec: dict) -> Item:
    for name in _REQUIRED_FIELDS:
        if name not in rec:
            raise SchemaViolation(f"missing field '{name}'")
    try:
        source = Source(str(rec["source"]).lower())
    except ValueError:
        raise SchemaViolation(f"unknown source {rec['source']!r}") from None
    if not isinstance(rec["hashtags"], list):
        raise SchemaViolation("'hashtags' must be an array")
    if not isinstance(rec["timestamp"], int) or isinstance(rec["timestamp"], bool):
        raise SchemaViolation("'timestamp' must be an integer")
    for name in ("comments", "endorsements"):
        if not isinstance(rec[name], int) or isinstance(rec[name], bool):
            raise SchemaViolation(f"'{name}' must be an integer")
    duration = rec.get("duration")
    return Item(
        id=str(rec["id"]),
        source=source,
        text=str(rec["text"]),
        hashtags=tuple(str(t) for t in rec["hashtags"]),
        timestamp=rec["timestamp"],
        comments=rec["comments"],
        endorsements=rec["endorsements"],
        width=rec.get("width"),
        height=rec.get("height"),
        duration=float(duration) if duration is not None else None,
    )


def ingest(path, fmt: str = "jsonl", query: str | None = None) -> QueryCollection:
    """Read a JSONL item file into a QueryCollection.

    Malformed lines are skipped and collected on the result's ``skipped``
    field; the call fails only when no line at all yields a valid item.
    """
    if fmt != "jsonl":
        raise ValueError(f"unsupported format {fmt!r}")
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))

    by_source: dict[Source, list[Item]] = {s: [] for s in SOURCE_ORDER}
    skipped: list[tuple[int, str]] = []
    total = 0
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        total += 1
        try:
            rec = json.loads(line)
            if not isinstance(rec, dict):
                raise SchemaViolation("record is not an object")
            item = _item_from_record(rec)
        except (json.JSONDecodeError, SchemaViolation) as exc:
            skipped.append((lineno, str(exc)))
            logger.warning("ingest %s line %d skipped: %s", path.name, lineno, exc)
            continue
        by_source[item.source].append(item)

    if total == 0 or len(skipped) == total:
        raise AllRecordsInvalid(f"{path}: no valid records")
    return QueryCollection(
        query=query if query is not None else path.stem,
        items_by_source={s: tuple(v) for s, v in by_source.items()},
        skipped=tuple(skipped),
    )


def write_jsonl(qc: QueryCollection, path) -> None:
    """Emit a collection in the same JSONL schema `ingest` reads."""
    with open(path, "w", encoding="utf-8") as fh:
        for item in qc.items():
            rec = {
                "id": item.id,
                "source": item.source.value,
                "text": item.text,
                "hashtags": list(item.hashtags),
                "timestamp": item.timestamp,
                "comments": item.comments,
                "endorsements": item.endorsements,
            }
            if item.width is not None:
                rec["width"] = item.width
            if item.height is not None:
                rec["height"] = item.height
            if item.duration is not None:
                rec["duration"] = item.duration
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def default_stopwords() -> frozenset[str]:
    """The English stopword list shipped with the package."""
    text = resources.files("hashbridge.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def load_stopwords(path) -> frozenset[str]:
    text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


@dataclass(frozen=True)
class TokenizerConfig:
    stopwords: frozenset[str]
    min_freq: int = 2

    @classmethod
    def default(cls, min_freq: int = 2) -> "TokenizerConfig":
        return cls(stopwords=default_stopwords(), min_freq=min_freq)


def tokenize(text: str, stopwords: frozenset[str] = frozenset()) -> list[str]:
    """Split text on punctuation/whitespace, lowercase, drop stopwords."""
    norm = unicodedata.normalize("NFC", text).lower()
    return [t for t in _TOKEN_RE.findall(norm) if t not in stopwords]


def build_vocabulary(items, config: TokenizerConfig) -> Vocabulary:
    """Collect tokens over all item texts into a lexicographic vocabulary.

    Tokens below ``config.min_freq`` total occurrences are dropped.
    """
    if not items:
        raise EmptyVocabulary("no items given")
    counts: Counter[str] = Counter()
    for item in items:
        counts.update(tokenize(item.text, config.stopwords))
    words = sorted(w for w, c in counts.items() if c >= config.min_freq)
    if not words:
        raise EmptyVocabulary("no token survived filtering")
    return Vocabulary.from_words(words)


def docs_as_indices(items, vocab: Vocabulary,
                    config: TokenizerConfig) -> list[np.ndarray]:
    """Tokenize each item against a fixed vocabulary; unknown tokens dropped."""
    docs = []
    for item in items:
        idx = [vocab.index[t] for t in tokenize(item.text, config.stopwords)
               if t in vocab.index]
        docs.append(np.asarray(idx, dtype=np.int64))
    return docs


def extract_hashtag_profiles(qc: QueryCollection) -> list[HashtagProfile]:
    """One profile per (tag, source) pair, ordered by source then tag.

    The same tag used on two sources yields two distinct profiles; the
    clustering stage is the only bridge across sources.
    """
    buckets: dict[tuple[Source, str], set[str]] = {}
    for source in SOURCE_ORDER:
        for item in qc.items_by_source.get(source, ()):
            for tag in item.hashtags:
                buckets.setdefault((source, tag), set()).add(item.id)
    keys = sorted(buckets, key=lambda k: (SOURCE_ORDER.index(k[0]), k[1]))
    return [
        HashtagProfile(tag=tag, source=source, item_ids=frozenset(buckets[(source, tag)]))
        for source, tag in keys
    ]


def build_cooccurrence(profiles, qc: QueryCollection) -> np.ndarray:
    """Count, for each profile pair, the items carrying both hashtags.

    Returns a symmetric integer matrix with zero diagonal, indexed like
    ``profiles``. Pairs from different sources never co-occur because an
    item belongs to exactly one source.
    """
    pos = {p.key: i for i, p in enumerate(profiles)}
    n = len(profiles)
    out = np.zeros((n, n), dtype=np.int64)
    for item in qc.items():
        idx = [pos[(item.source.value, t)] for t in item.hashtags
               if (item.source.value, t) in pos]
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                out[idx[a], idx[b]] += 1
                out[idx[b], idx[a]] += 1
    return out


@dataclass(frozen=True)
class SourceStats:
    n_items: int
    mean_resolution: float | None
    mean_duration: float | None
    hashtag_fraction: float
    unique_hashtags: int
    mean_comments: float | None
    mean_endorsements: float | None


def corpus_stats(qc: QueryCollection) -> dict[Source, SourceStats]:
    """Per-source descriptive statistics of an ingested collection.

    Resolution is total pixels (width x height); items missing media
    fields are excluded from the corresponding mean.
    """
    out: dict[Source, SourceStats] = {}
    for source in SOURCE_ORDER:
        items = qc.items_by_source.get(source, ())
        pixels = [i.width * i.height for i in items
                  if i.width is not None and i.height is not None]
        durations = [i.duration for i in items if i.duration is not None]
        tagged = sum(1 for i in items if i.hashtags)
        tags = {t for i in items for t in i.hashtags}
        n = len(items)
        out[source] = SourceStats(
            n_items=n,
            mean_resolution=float(np.mean(pixels)) if pixels else None,
            mean_duration=float(np.mean(durations)) if durations else None,
            hashtag_fraction=tagged / n if n else 0.0,
            unique_hashtags=len(tags),
            mean_comments=float(np.mean([i.comments for i in items])) if n else None,
            mean_endorsements=float(np.mean([i.endorsements for i in items])) if n else None,
        )
    return out
