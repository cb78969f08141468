"""Command-line entry point: thin argument parsing over the core package."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import fixtures, harness
from .classifier import classify_dataset, read_artifacts_jsonl, write_predictions_jsonl, read_predictions_jsonl
from .embedding import EmbeddingProviderConfig, create_provider
from .harness import EMBED_URL_ENV, ConfigError, RunConfig, derive_beta, format_beta_table
from .metrics import (
    evaluate,
    read_ground_truth_jsonl,
    render_table,
    report_to_dict,
    truths_for_taxonomy,
    write_report_json,
    write_summary_csv,
)
from .taxonomy import load_taxonomy


def parse_provider_spec(spec: str, seed: int = 0) -> EmbeddingProviderConfig:
    """Provider from `key=value,...` pairs or a JSON file path.

    Example: `kind=deterministic-mock,dimension=64,model_id=mock-64`.
    """
    if spec.endswith(".json") or Path(spec).is_file():
        raw = json.loads(Path(spec).read_text(encoding="utf-8"))
    else:
        raw = {}
        for part in spec.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise ValueError(f"bad provider spec fragment {part!r}; expected key=value")
            key, value = part.split("=", 1)
            raw[key.strip()] = value.strip()
    raw.setdefault("seed", seed)
    for int_key in ("dimension", "seed"):
        if int_key in raw:
            raw[int_key] = int(raw[int_key])
    if raw.get("kind") == "http" and os.environ.get(EMBED_URL_ENV):
        raw["endpoint"] = os.environ[EMBED_URL_ENV]
    return EmbeddingProviderConfig(**raw)


def _cmd_run(args) -> int:
    try:
        config = RunConfig.from_file(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    result = harness.run(config)
    print(result.summary_txt.read_text(encoding="utf-8"), end="")
    print(f"summary: {result.summary_csv}")
    return 0 if result.ok else 1


def _cmd_classify(args) -> int:
    taxonomy = load_taxonomy(args.taxonomy, name=args.name)
    artifacts = read_artifacts_jsonl(args.dataset)
    provider = create_provider(parse_provider_spec(args.provider, seed=args.seed))
    run = classify_dataset(artifacts, taxonomy, provider, args.k)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_predictions_jsonl(out, run.predictions)
    print(f"wrote {len(run.predictions)} predictions to {out}")
    for failure in run.failures:
        print(f"skipped {failure.artifact_id}: {failure.error}", file=sys.stderr)
    return 0 if not run.failures else 1


def _cmd_eval(args) -> int:
    predictions = read_predictions_jsonl(args.predictions)
    truths = read_ground_truth_jsonl(args.truth)
    names = {p.taxonomy_name for p in predictions}
    name = args.name or (names.pop() if len(names) == 1 else None)
    taxonomy = load_taxonomy(args.taxonomy, name=name)
    truth_map = truths_for_taxonomy(truths, taxonomy.name)
    scored = [p for p in predictions if p.artifact_id in truth_map]
    dropped = len(predictions) - len(scored)
    if dropped:
        print(f"dropped {dropped} predictions without a ground-truth record", file=sys.stderr)
    report = evaluate(scored, truth_map, taxonomy, args.beta)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_report_json(out / "report.json", report)
        write_summary_csv(out / "summary.csv", [report])
        print(f"wrote {out / 'report.json'} and {out / 'summary.csv'}")
    print(render_table([report]), end="")
    if args.json:
        print(json.dumps(report_to_dict(report), ensure_ascii=False, indent=2))
    return 0


def _cmd_beta(args) -> int:
    truths = read_ground_truth_jsonl(args.truth)
    taxonomies = {}
    for path in args.taxonomy:
        tax = load_taxonomy(path)
        taxonomies[tax.name] = tax
    betas = derive_beta(truths, taxonomies)
    print(format_beta_table(betas), end="")
    if args.json:
        print(
            json.dumps(
                {
                    name: {
                        "l_head": b.l_head,
                        "l_tail": b.l_tail,
                        "l": b.l,
                        "lambda": b.lambda_,
                        "beta": b.beta,
                    }
                    for name, b in betas.items()
                },
                indent=2,
            )
        )
    return 0


def _cmd_stats(args) -> int:
    taxonomy = load_taxonomy(args.taxonomy, name=args.name)
    stats = taxonomy.stats()
    print(
        json.dumps(
            {
                "taxonomy": taxonomy.name,
                "depth": stats.depth,
                "total_nodes": stats.total_nodes,
                "category_nodes": stats.category_nodes,
                "leaf_nodes": stats.leaf_nodes,
                "mean_description_length": stats.mean_description_length,
                "max_distance": taxonomy.max_distance(),
            },
            indent=2,
        )
    )
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServeConfig, create_app

    config = ServeConfig.from_file(args.config)
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_fixtures(args) -> int:
    written = fixtures.build_corpus(args.out, seed=args.seed, artifact_count=args.artifacts)
    for role in sorted(written):
        print(f"{role}: {written[role]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taxotrace",
        description="Zero-shot hierarchical multi-label classification toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run providers x output spaces from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("classify", help="classify a dataset against one taxonomy")
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--provider", required=True, help="key=value,... pairs or a JSON file")
    p.add_argument("--k", type=int, default=15)
    p.add_argument("--out", required=True)
    p.add_argument("--name", default=None, help="taxonomy name (defaults to the file stem)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--predictions", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--beta", type=float, default=189.25)
    p.add_argument("--out", default=None)
    p.add_argument("--name", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("beta", help="derive per-space beta from ground truth")
    p.add_argument("--truth", required=True)
    p.add_argument("--taxonomy", required=True, action="append")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_beta)

    p = sub.add_parser("stats", help="print output-space characteristics")
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--name", default=None)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("serve", help="start the review service")
    p.add_argument("--config", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("fixtures", help="write the bundled synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--artifacts", type=int, default=24)
    p.set_defaults(func=_cmd_fixtures)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
