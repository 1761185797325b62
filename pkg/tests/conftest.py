import json

import pytest

from hashbridge.corpus import ingest


def make_record(**over):
    rec = {
        "id": "t1",
        "source": "twitter",
        "text": "rally downtown tonight",
        "hashtags": ["rally"],
        "timestamp": 100,
        "comments": 2,
        "endorsements": 5,
    }
    rec.update(over)
    return rec


def write_jsonl_lines(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


@pytest.fixture
def three_source_corpus(tmp_path):
    """One item per source, shared tag plus one source-local tag each."""
    records = [
        make_record(id="t1", source="twitter", text="rally live downtown",
                    hashtags=["rally", "news"], timestamp=30),
        make_record(id="f1", source="flickr", text="rally photo crowd",
                    hashtags=["rally", "photo"], timestamp=10,
                    width=640, height=480),
        make_record(id="y1", source="youtube", text="rally video speech",
                    hashtags=["rally", "video"], timestamp=20,
                    duration=120.5),
    ]
    path = write_jsonl_lines(tmp_path / "corpus.jsonl", records)
    return ingest(path, query="rally")
