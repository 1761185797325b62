"""Command-line entry point: run the pipeline, evaluate metrics, or
generate synthetic fixtures."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .corpus import write_jsonl
from .errors import HashbridgeError, ParseError, StageError
from .metrics import ndcg, nfr, nmi, pearson
from .pipeline import load_config, override_config, run_pipeline
from .synth import PlantedSpec, generate_corpus, write_truth


def _read_lines(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


def _read_floats(path) -> list[float]:
    values = []
    for lineno, line in enumerate(_read_lines(path), 1):
        try:
            values.append(float(line))
        except ValueError:
            raise ParseError(f"{path}: {line!r} is not a number",
                             line=lineno) from None
    return values


def _read_labels(path) -> dict:
    """Element labels as either a JSON object or `id,label` CSV lines."""
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        raise ParseError(f"{path}: empty label file")
    if text.startswith("{"):
        data = json.loads(text)
        return {str(k): str(v) for k, v in data.items()}
    labels = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"{path}: expected 'id,label'", line=lineno)
        labels[parts[0].strip()] = parts[1].strip()
    return labels


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except StageError:
        raise
    except Exception as exc:
        raise StageError("config", exc) from exc
    cfg = override_config(cfg, output=args.out, seed=args.seed)
    run_pipeline(cfg)
    out = Path(cfg.output)
    print(f"wrote {out / 'hierarchy.json'}")
    return 0


def cmd_eval(args) -> int:
    if args.metric == "nmi":
        value = nmi(_read_labels(args.truth), _read_labels(args.pred))
    elif args.metric == "nfr":
        value = nfr(_read_lines(args.a), _read_lines(args.b))
    elif args.metric == "ndcg":
        relevance = _read_floats(args.ranked)
        value = ndcg(relevance, k=args.k)
    else:
        value = pearson(_read_floats(args.x), _read_floats(args.y))
    print(f"{value:.6f}")
    return 0


def cmd_synth(args) -> int:
    spec = PlantedSpec(
        n_subtopics=args.subtopics,
        tags_per_source=args.tags,
        items_per_tag=args.items,
        vocab_per_subtopic=args.vocab,
        noise=args.noise,
        seed=args.seed,
    )
    qc, truth = generate_corpus(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(qc, out / "corpus.jsonl")
    write_truth(truth, out / "truth_hashtags.csv", out / "truth_items.csv")
    (out / "similarity.tsv").write_text("", encoding="utf-8")
    config_text = "\n".join([
        "[io]",
        f"input = {(out / 'corpus.jsonl').resolve()}",
        f"similarity = {(out / 'similarity.tsv').resolve()}",
        f"output = {(out / 'out').resolve()}",
        "",
        "[cocluster]",
        f"l_row = {spec.n_subtopics}",
        "",
        "[hlda]",
        f"seed = {spec.seed}",
        "",
    ])
    (out / "config.ini").write_text(config_text, encoding="utf-8")
    print(f"wrote {out / 'corpus.jsonl'} ({len(qc)} items)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hashbridge",
        description="Cluster cross-network hashtags into ranked subtopic "
                    "hierarchies.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute the full pipeline")
    run_p.add_argument("--config", required=True, help="INI config path")
    run_p.add_argument("--out", help="override the output directory")
    run_p.add_argument("--seed", type=int,
                       help="override topic-model and co-clustering seeds")
    run_p.set_defaults(func=cmd_run)

    eval_p = sub.add_parser("eval", help="compute one evaluation metric")
    esub = eval_p.add_subparsers(dest="metric", required=True)
    nmi_p = esub.add_parser("nmi", help="clustering agreement")
    nmi_p.add_argument("--truth", required=True)
    nmi_p.add_argument("--pred", required=True)
    nfr_p = esub.add_parser("nfr", help="ranked-list agreement")
    nfr_p.add_argument("--a", required=True)
    nfr_p.add_argument("--b", required=True)
    ndcg_p = esub.add_parser("ndcg", help="graded ranking quality")
    ndcg_p.add_argument("--ranked", required=True,
                        help="relevances in rank order, one per line")
    ndcg_p.add_argument("--k", type=int, default=None)
    pearson_p = esub.add_parser("pearson", help="linear correlation")
    pearson_p.add_argument("--x", required=True)
    pearson_p.add_argument("--y", required=True)
    for p in (nmi_p, nfr_p, ndcg_p, pearson_p):
        p.set_defaults(func=cmd_eval)

    synth_p = sub.add_parser("synth", help="generate a planted corpus")
    synth_p.add_argument("--subtopics", type=int, default=3)
    synth_p.add_argument("--tags", type=int, default=2,
                         help="hashtags per subtopic per source")
    synth_p.add_argument("--items", type=int, default=5,
                         help="items per hashtag")
    synth_p.add_argument("--vocab", type=int, default=20,
                         help="words per subtopic block")
    synth_p.add_argument("--noise", type=float, default=0.0)
    synth_p.add_argument("--seed", type=int, default=0)
    synth_p.add_argument("--out", required=True)
    synth_p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING,
                        format="%(name)s %(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (HashbridgeError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
