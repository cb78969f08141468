"""Deterministic synthetic corpus: six output spaces plus a labeled dataset.

The generated spaces mirror the shape characteristics of real transport
taxonomies (depth, category/leaf split, total node count, rough mean
description length) without any proprietary content. Artifact texts
mention the labels of their true classes so rankings over the mock
embedder are meaningful. Everything is a pure function of the seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .taxonomy import Taxonomy, TaxonomyNode, serialize_taxonomy


@dataclass(frozen=True)
class SpaceShape:
    depth: int
    categories: int
    leaves: int
    mean_description_chars: int

    @property
    def total(self) -> int:
        return self.categories + self.leaves


# Shapes of the six output spaces the evaluation design targets.
SPACE_SHAPES: dict[str, SpaceShape] = {
    "A": SpaceShape(depth=5, categories=50, leaves=206, mean_description_chars=27),
    "B": SpaceShape(depth=6, categories=299, leaves=884, mean_description_chars=28),
    "G": SpaceShape(depth=3, categories=199, leaves=665, mean_description_chars=96),
    "K": SpaceShape(depth=3, categories=61, leaves=251, mean_description_chars=92),
    "L": SpaceShape(depth=1, categories=0, leaves=635, mean_description_chars=40),
    "T": SpaceShape(depth=4, categories=80, leaves=170, mean_description_chars=79),
}

_WORDS = (
    "signal mast track crossing mark road facility sign barrier gate rail "
    "sleeper ballast switch point platform tunnel bridge culvert drainage "
    "cable duct conduit lighting pole foundation anchor bolt weld joint "
    "insulation earthing bonding transformer substation feeder catenary "
    "pantograph axle wheel bogie brake coupling buffer detector sensor "
    "interlocking relay circuit block section gradient curve alignment "
    "embankment cutting fence wall noise screen shelter walkway stair"
).split()

_VERBS = (
    "shall be installed", "shall be inspected", "must withstand", "shall conform to",
    "is required for", "shall be placed at", "must be verified against",
    "shall interface with", "is mounted on", "shall be maintained near",
)


def _phrase(rng: random.Random, words: int) -> str:
    return " ".join(rng.choice(_WORDS) for _ in range(words))


def _description(rng: random.Random, target_chars: int) -> str:
    if target_chars <= 0:
        return ""
    out: list[str] = []
    length = 0
    while length < target_chars:
        word = rng.choice(_WORDS)
        out.append(word)
        length += len(word) + 1
    return " ".join(out)


def build_output_space(name: str, shape: SpaceShape, seed: int = 7) -> Taxonomy:
    """A taxonomy with exactly the requested depth and category/leaf split.

    A chain of categories pins the depth; every other category sits at the
    top level with at least one leaf child; remaining leaves distribute
    round-robin so no category is childless.
    """
    if shape.categories == 0 and shape.depth != 1:
        raise ValueError(f"{name}: a space without categories must have depth 1")
    if shape.categories > 0 and shape.depth < 2:
        raise ValueError(f"{name}: categories imply depth >= 2, got {shape.depth}")
    if shape.categories > 0 and shape.categories < shape.depth - 1:
        raise ValueError(f"{name}: need at least depth-1 categories to reach depth {shape.depth}")
    min_leaves = 1 + max(shape.categories - (shape.depth - 1), 0) if shape.categories else 1
    if shape.leaves < min_leaves:
        raise ValueError(f"{name}: shape needs at least {min_leaves} leaves, got {shape.leaves}")

    rng = random.Random(f"taxotrace-space:{seed}:{name}")
    nodes: list[TaxonomyNode] = []
    counter = 0

    def make(parent_id: str | None) -> str:
        nonlocal counter
        counter += 1
        node_id = f"{name}{counter:04d}"
        label = _phrase(rng, rng.choice((1, 2)))
        # Roughly one node in eight keeps an empty description (labels carry
        # signal on their own); the rest aim near the space's mean length.
        if rng.random() < 0.125:
            description = ""
        else:
            jitter = rng.randint(-shape.mean_description_chars // 3, shape.mean_description_chars // 3)
            description = _description(rng, shape.mean_description_chars + jitter)
        nodes.append(TaxonomyNode(id=node_id, label=label, description=description, parent_id=parent_id))
        return node_id

    categories: list[str] = []
    chain_len = 0
    if shape.categories:
        chain_len = shape.depth - 1
        parent: str | None = None
        for _ in range(chain_len):
            parent = make(parent)
            categories.append(parent)
        for _ in range(shape.categories - chain_len):
            categories.append(make(None))

    leaves_left = shape.leaves
    if categories:
        # One leaf under the deepest chain category pins the depth; every
        # top-level category gets a leaf so none is childless.
        make(categories[chain_len - 1])
        leaves_left -= 1
        for cat in categories[chain_len:]:
            make(cat)
            leaves_left -= 1
        i = 0
        while leaves_left > 0:
            make(categories[i % len(categories)])
            leaves_left -= 1
            i += 1
    else:
        for _ in range(leaves_left):
            make(None)

    return Taxonomy(name, nodes)


def build_spaces(seed: int = 7) -> dict[str, Taxonomy]:
    return {name: build_output_space(name, shape, seed) for name, shape in SPACE_SHAPES.items()}


def build_corpus(
    out_dir: str | Path,
    *,
    seed: int = 7,
    artifact_count: int = 24,
    spaces: dict[str, Taxonomy] | None = None,
) -> dict[str, Path]:
    """Write taxonomy files, a dataset, ground truth, and config templates.

    Returns the paths written, keyed by role. Artifacts cite the labels of
    their true classes, each artifact is annotated in two to four spaces,
    and a few artifacts end up with an explicitly empty label set.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spaces = spaces or build_spaces(seed)
    rng = random.Random(f"taxotrace-corpus:{seed}:{artifact_count}")

    written: dict[str, Path] = {}
    for name, tax in spaces.items():
        path = out / f"{name}.tsv"
        path.write_text(serialize_taxonomy(tax), encoding="utf-8")
        written[f"taxonomy_{name}"] = path

    dataset_path = out / "dataset.jsonl"
    truth_path = out / "truth.jsonl"
    space_names = sorted(spaces)
    with open(dataset_path, "w", encoding="utf-8") as data_fh, open(
        truth_path, "w", encoding="utf-8"
    ) as truth_fh:
        for i in range(artifact_count):
            artifact_id = f"req-{i + 1:03d}"
            chosen = rng.sample(space_names, rng.randint(2, 4))
            mentions: list[str] = []
            for space_name in sorted(chosen):
                tax = spaces[space_name]
                ids = tax.node_ids()
                # Roughly one truth record in twelve is an explicit empty set.
                labels = [] if rng.random() < 1 / 12 else sorted(
                    rng.sample(ids, rng.randint(1, 3))
                )
                for nid in labels:
                    node = tax.node(nid)
                    snippet = node.description[:24].strip()
                    mentions.append(f"{node.label} {snippet}".strip())
                truth_fh.write(
                    json.dumps(
                        {"artifact_id": artifact_id, "taxonomy": space_name, "labels": labels},
                        ensure_ascii=False,
                    )
                    + "\n"
                )
            body = mentions or [_phrase(rng, 2)]
            sentences = [
                f"The {m} {rng.choice(_VERBS)} the {_phrase(rng, 2)}" for m in body
            ]
            record = {
                "id": artifact_id,
                "text": ". ".join(sentences) + ".",
                "document_title": f"Regulation {_phrase(rng, 1)}".title(),
                "section_title": _phrase(rng, 2).capitalize(),
            }
            data_fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    written["dataset"] = dataset_path
    written["truth"] = truth_path

    run_config = {
        "taxonomies": {name: f"{name}.tsv" for name in space_names},
        "dataset": "dataset.jsonl",
        "ground_truth": "truth.jsonl",
        "providers": [
            {"kind": "deterministic-mock", "dimension": 48, "model_id": "mock-48"},
            {"kind": "deterministic-mock", "dimension": 64, "model_id": "mock-64"},
        ],
        "k": 15,
        "beta": 189.25,
        "output_dir": "out",
        "seed": seed,
    }
    run_config_path = out / "run_config.json"
    run_config_path.write_text(json.dumps(run_config, indent=2) + "\n", encoding="utf-8")
    written["run_config"] = run_config_path

    serve_config = {
        "taxonomies": {name: f"{name}.tsv" for name in space_names},
        "dataset": "dataset.jsonl",
        "provider": {"kind": "deterministic-mock", "dimension": 48, "model_id": "mock-48"},
        "annotation_store": "annotations.jsonl",
        "k": 15,
    }
    serve_config_path = out / "serve_config.json"
    serve_config_path.write_text(json.dumps(serve_config, indent=2) + "\n", encoding="utf-8")
    written["serve_config"] = serve_config_path
    return written
