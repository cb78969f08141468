"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import random
from collections import defaultdict, deque
from pathlib import Path

import pytest

from taxotrace.embedding import EmbeddingProviderConfig, create_provider
from taxotrace.taxonomy import Taxonomy, TaxonomyNode

FIXTURES_DIR = Path(__file__).parent / "fixtures"
CORPUS_DIR = FIXTURES_DIR / "corpus"
GOLDEN_DIR = FIXTURES_DIR / "golden"

# The worked-example tree: three top-level classes, each with children
# (A1 under A; B1, B2 under B; C1 under C). Depth 2 below the implicit root.
FIG3_NODES = (
    TaxonomyNode(id="A", label="track", description="rails and fastenings"),
    TaxonomyNode(id="A1", label="sleeper", description="", parent_id="A"),
    TaxonomyNode(id="B", label="signaling", description="control equipment"),
    TaxonomyNode(id="B1", label="signal mast", description="", parent_id="B"),
    TaxonomyNode(id="B2", label="relay", description="interlocking relay", parent_id="B"),
    TaxonomyNode(id="C", label="road facility", description=""),
    TaxonomyNode(id="C1", label="crossing mark", description="", parent_id="C"),
)


@pytest.fixture
def fig3() -> Taxonomy:
    return Taxonomy("fig3", FIG3_NODES)


@pytest.fixture
def mock_provider():
    def make(dimension: int = 32, model_id: str = "mock", seed: int = 0):
        return create_provider(
            EmbeddingProviderConfig(
                kind="deterministic-mock", dimension=dimension, model_id=model_id, seed=seed
            )
        )

    return make


# -- independent oracles ------------------------------------------------------

_ORACLE_ROOT = "__root__"


def bfs_all_pairs(tax: Taxonomy) -> dict[str, dict[str, int]]:
    """Shortest-path hops between all real nodes via plain BFS over edges."""
    adjacency: dict[str, list[str]] = defaultdict(list)
    for node in tax.nodes():
        parent = node.parent_id if node.parent_id is not None else _ORACLE_ROOT
        adjacency[parent].append(node.id)
        adjacency[node.id].append(parent)

    def from_source(source: str) -> dict[str, int]:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            cur = queue.popleft()
            for nxt in adjacency[cur]:
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    queue.append(nxt)
        return dist

    return {node_id: from_source(node_id) for node_id in tax.node_ids()}


def oracle_depth(tax: Taxonomy) -> int:
    """Tree depth measured by BFS from the implicit root, not by levels."""
    adjacency: dict[str, list[str]] = defaultdict(list)
    for node in tax.nodes():
        parent = node.parent_id if node.parent_id is not None else _ORACLE_ROOT
        adjacency[parent].append(node.id)
        adjacency[node.id].append(parent)
    dist = {_ORACLE_ROOT: 0}
    queue = deque([_ORACLE_ROOT])
    while queue:
        cur = queue.popleft()
        for nxt in adjacency[cur]:
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    return max(d for node, d in dist.items() if node != _ORACLE_ROOT)


def oracle_label_distance(tax: Taxonomy, predicted: set[str], true: set[str]) -> tuple[float, float]:
    """(D_a, D_n) by exhaustive all-pairs BFS, no shared code with metrics."""
    hops = bfs_all_pairs(tax)
    per_true = [min(hops[t][p] for p in predicted) for t in sorted(true)]
    d_abs = sum(per_true) / len(per_true)
    d_max = 2 * oracle_depth(tax)
    return d_abs, d_abs / d_max


def random_taxonomy(rng: random.Random, max_nodes: int = 50, name: str = "rand") -> Taxonomy:
    """Random tree of 1..max_nodes nodes; parents always precede children."""
    count = rng.randint(1, max_nodes)
    nodes = []
    for i in range(count):
        parent = None
        if i > 0 and rng.random() >= 0.2:
            parent = f"n{rng.randrange(i):02d}"
        nodes.append(
            TaxonomyNode(id=f"n{i:02d}", label=f"node {i}", description="", parent_id=parent)
        )
    return Taxonomy(name, nodes)


# -- acceptance reporting -----------------------------------------------------

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        name = report.nodeid.split("::", 1)[1]
        _acceptance_results.append((name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"[{outcome}] {name}")
