"""Command-line client for ingestion, runs, queries and the server."""

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .config import AnalysisConfig
from .pipeline import (
    NotComputed,
    SnapshotStore,
    UnknownResource,
    UnknownSnapshot,
    query_snapshot,
    run_pipeline,
)


def _load_config(args) -> AnalysisConfig:
    config = AnalysisConfig.from_file(args.config) if args.config else AnalysisConfig()
    if args.seed is not None:
        config.seed = args.seed
    return config


def cmd_ingest(args) -> int:
    corpus = corpus_mod.load_corpus(args.articles, args.citations)
    out = Path(args.out) if args.out else Path(args.workspace) / "corpus.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    corpus_mod.write_snapshot(corpus, out)
    stats = corpus_mod.corpus_stats(corpus)
    print(f"ingested {stats.article_count} articles, {len(corpus.citations)} citations -> {out}")
    for warning in corpus.provenance.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_run(args) -> int:
    if args.corpus:
        corpus = corpus_mod.read_snapshot(args.corpus)
        base = Path(args.corpus).parent
    elif args.articles:
        corpus = corpus_mod.load_corpus(args.articles, args.citations)
        base = Path(args.articles).parent
    else:
        print("error: --corpus or --articles required", file=sys.stderr)
        return 2
    config = _load_config(args)
    snapshot = run_pipeline(corpus, config, fulltext_base=base)
    store = SnapshotStore(args.workspace)
    path = store.save(snapshot)
    print(f"snapshot {snapshot.snapshot_id} -> {path}")
    for resource, reason in sorted(snapshot.skipped.items()):
        print(f"skipped {resource}: {reason}")
    return 0


def cmd_list_snapshots(args) -> int:
    store = SnapshotStore(args.workspace)
    entries = store.list()
    if not entries:
        print("no snapshots")
        return 0
    for meta in entries:
        skipped = f" ({len(meta['skipped'])} skipped)" if meta["skipped"] else ""
        print(f"{meta['snapshot_id']}  {meta['created_at']}{skipped}")
    return 0


def cmd_export(args) -> int:
    store = SnapshotStore(args.workspace)
    params = {}
    for item in args.param or []:
        if "=" not in item:
            print(f"error: bad --param {item!r}, expected key=value", file=sys.stderr)
            return 2
        key, value = item.split("=", 1)
        params[key] = value
    try:
        result = query_snapshot(store, args.snapshot, args.resource, params)
    except UnknownSnapshot:
        print(f"error: unknown snapshot {args.snapshot!r}", file=sys.stderr)
        return 1
    except NotComputed as err:
        result = {"status": "not computed", "reason": err.reason}
    except UnknownResource as err:
        print(f"error: unknown resource: {err.args[0]}", file=sys.stderr)
        return 1
    text = result if isinstance(result, str) else json.dumps(
        result, ensure_ascii=False, sort_keys=True, indent=1
    )
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(args.workspace), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corposcope",
        description="Multi-method semantic analysis of article corpora.",
    )
    parser.add_argument("--workspace", default="workspace", help="snapshot workspace directory")
    parser.add_argument("--seed", type=int, default=None, help="master random seed")
    parser.add_argument("--config", default=None, help="JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate CSV inputs into a corpus snapshot")
    p.add_argument("--articles", required=True)
    p.add_argument("--citations", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("run", help="run the full analysis pipeline")
    p.add_argument("--corpus", default=None, help="corpus snapshot JSON from ingest")
    p.add_argument("--articles", default=None, help="articles CSV (when not using --corpus)")
    p.add_argument("--citations", default=None)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("list-snapshots", help="list stored snapshots")
    p.set_defaults(fn=cmd_list_snapshots)

    p = sub.add_parser("export", help="print or save one snapshot resource")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--resource", required=True, help="e.g. networks/keywords")
    p.add_argument("--param", action="append", help="query parameter key=value")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
