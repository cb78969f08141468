"""Hierarchical output spaces: parsing, validation, and tree queries.

An output space is a forest of labeled class nodes. An implicit root is
adjoined above all top-level nodes so the structure is a single tree: the
root sits at level 0, participates in paths and depth counting, but is
never a class — queries neither accept nor return it.
"""

from __future__ import annotations

import io
import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

# Fixed separators for description aggregation. Any constant choice works,
# but it must never change silently: aggregated text feeds embedding caches.
LABEL_DESCRIPTION_SEP = ": "
SIBLING_SEP = ". "

_FIELDS = ("id", "parent_id", "label", "description")

# Internal sentinel for the implicit root in parent links and BFS.
_ROOT = None


class TaxonomyError(ValueError):
    """A taxonomy file or structure violates an invariant."""


class UnknownNodeError(KeyError):
    """A node id is not present in the taxonomy."""

    def __init__(self, node_id: str, taxonomy_name: str):
        super().__init__(node_id)
        self.node_id = node_id
        self.taxonomy_name = taxonomy_name

    def __str__(self) -> str:
        return f"unknown node {self.node_id!r} in taxonomy {self.taxonomy_name!r}"


@dataclass(frozen=True)
class TaxonomyNode:
    """One class in the output space; parent_id None means top-level."""

    id: str
    label: str
    description: str = ""
    parent_id: str | None = None


@dataclass(frozen=True)
class TaxonomyStats:
    depth: int
    total_nodes: int
    category_nodes: int
    leaf_nodes: int
    mean_description_length: float


class Taxonomy:
    """Immutable tree of classes under an implicit root.

    Nodes keep the order in which they appeared in the source file
    ("document order"); that order drives description aggregation and is
    the iteration order of :meth:`nodes`.
    """

    def __init__(self, name: str, nodes: Iterable[TaxonomyNode], _positions: list[str] | None = None):
        self.name = name
        self._nodes: dict[str, TaxonomyNode] = {}
        for i, node in enumerate(nodes):
            where = _positions[i] if _positions else f"record {i + 1}"
            if not node.id:
                raise TaxonomyError(f"{name}: empty node id at {where}")
            if node.id in self._nodes:
                raise TaxonomyError(f"{name}: duplicate node id {node.id!r} at {where}")
            self._nodes[node.id] = node
        if not self._nodes:
            raise TaxonomyError(f"{name}: taxonomy has no nodes")
        positions = (
            {node.id: _positions[i] for i, node in enumerate(self._nodes.values())}
            if _positions
            else {}
        )

        self._children: dict[str | None, list[str]] = {_ROOT: []}
        for node in self._nodes.values():
            self._children.setdefault(node.id, [])
        for node in self._nodes.values():
            if node.parent_id is not None and node.parent_id not in self._nodes:
                where = positions.get(node.id, f"node {node.id!r}")
                raise TaxonomyError(
                    f"{name}: node {node.id!r} references missing parent "
                    f"{node.parent_id!r} at {where}"
                )
            self._children[node.parent_id].append(node.id)

        self._level = self._resolve_levels(positions)
        self.depth = max(self._level.values())

    def _resolve_levels(self, positions: dict[str, str]) -> dict[str, int]:
        levels: dict[str, int] = {}
        for start in self._nodes:
            if start in levels:
                continue
            chain = []
            cur: str | None = start
            on_path = set()
            while cur is not None and cur not in levels:
                if cur in on_path:
                    cycle = chain[chain.index(cur):] + [cur]
                    where = positions.get(cur, f"node {cur!r}")
                    raise TaxonomyError(
                        f"{self.name}: parent cycle {' -> '.join(cycle)} detected at {where}"
                    )
                on_path.add(cur)
                chain.append(cur)
                cur = self._nodes[cur].parent_id
            base = 0 if cur is None else levels[cur]
            for offset, node_id in enumerate(reversed(chain), start=1):
                levels[node_id] = base + offset
        return levels

    # -- basic access -------------------------------------------------

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def node(self, node_id: str) -> TaxonomyNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNodeError(node_id, self.name) from None

    def nodes(self) -> Iterator[TaxonomyNode]:
        """All real nodes in document order."""
        return iter(self._nodes.values())

    def node_ids(self) -> list[str]:
        return list(self._nodes)

    def children(self, node_id: str) -> list[str]:
        self.node(node_id)
        return list(self._children[node_id])

    def top_level_ids(self) -> list[str]:
        return list(self._children[_ROOT])

    def level(self, node_id: str) -> int:
        """Tree level below the implicit root (top-level nodes are level 1)."""
        self.node(node_id)
        return self._level[node_id]

    # -- tree metric ----------------------------------------------------

    def hop_distance(self, a: str, b: str) -> int:
        """Length of the unique tree path between two classes.

        Paths between different top-level subtrees route through the
        implicit root, so the distance is always defined.
        """
        self.node(a)
        self.node(b)
        la, lb = self._level[a], self._level[b]
        hops = 0
        pa: str | None = a
        pb: str | None = b
        while la > lb:
            pa = self._nodes[pa].parent_id
            la -= 1
            hops += 1
        while lb > la:
            pb = self._nodes[pb].parent_id
            lb -= 1
            hops += 1
        while pa != pb:
            pa = self._nodes[pa].parent_id
            pb = self._nodes[pb].parent_id
            hops += 2
        return hops

    def max_distance(self) -> int:
        """Worst-case hop count in this space: twice the tree depth."""
        return 2 * self.depth

    def neighborhood(self, center: str, radius: int) -> list[tuple[str, int]]:
        """All classes within `radius` hops of `center`, with distances.

        Includes the center at distance 0, excludes the implicit root
        (though paths may pass through it), sorted by (distance, id).
        """
        self.node(center)
        if radius < 0:
            raise ValueError(f"radius must be >= 0, got {radius}")
        seen: dict[str | None, int] = {center: 0}
        queue: deque[str | None] = deque([center])
        while queue:
            cur = queue.popleft()
            dist = seen[cur]
            if dist >= radius:
                continue
            if cur is _ROOT:
                adjacent: list[str | None] = list(self._children[_ROOT])
            else:
                adjacent = list(self._children[cur])
                adjacent.append(self._nodes[cur].parent_id)
            for nxt in adjacent:
                if nxt not in seen:
                    seen[nxt] = dist + 1
                    queue.append(nxt)
        found = [(nid, d) for nid, d in seen.items() if nid is not _ROOT]
        return sorted(found, key=lambda pair: (pair[1], pair[0]))

    # -- derived text and statistics ------------------------------------

    def entry_text(self, node_id: str) -> str:
        """A node's own text: label and description, or label alone."""
        node = self.node(node_id)
        if node.description:
            return f"{node.label}{LABEL_DESCRIPTION_SEP}{node.description}"
        return node.label

    def aggregate_description(self, node_id: str) -> str:
        """Node text enriched with its direct children's texts.

        Entries appear in document order and join with a fixed separator;
        the result is a pure function of the taxonomy file and the id.
        """
        parts = [self.entry_text(node_id)]
        parts.extend(self.entry_text(child) for child in self._children[node_id])
        return SIBLING_SEP.join(parts)

    def stats(self) -> TaxonomyStats:
        total = len(self._nodes)
        categories = sum(1 for nid in self._nodes if self._children[nid])
        mean_len = sum(len(n.description) for n in self._nodes.values()) / total
        return TaxonomyStats(
            depth=self.depth,
            total_nodes=total,
            category_nodes=categories,
            leaf_nodes=total - categories,
            mean_description_length=mean_len,
        )


# -- parsing and serialization ------------------------------------------


def parse_taxonomy(source: str | TextIO, name: str = "taxonomy") -> Taxonomy:
    """Parse a taxonomy from its tab-separated or JSON-array text form.

    TSV lines are `id<TAB>parent_id<TAB>label<TAB>description`; an empty
    parent_id means top-level, `#` starts a comment, and a first line whose
    first field is literally `id` is treated as a header. A JSON array of
    objects with the same field names is accepted interchangeably.
    """
    text = source if isinstance(source, str) else source.read()
    stripped = text.lstrip()
    if stripped.startswith("["):
        return _parse_json(text, name)
    return _parse_tsv(text, name)


def _parse_json(text: str, name: str) -> Taxonomy:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TaxonomyError(f"{name}: invalid JSON taxonomy: {exc}") from exc
    if not isinstance(raw, list):
        raise TaxonomyError(f"{name}: JSON taxonomy must be an array of objects")
    nodes = []
    positions = []
    for i, obj in enumerate(raw):
        where = f"array index {i}"
        if not isinstance(obj, dict) or "id" not in obj:
            raise TaxonomyError(f"{name}: malformed record at {where}")
        parent = obj.get("parent_id") or None
        node = TaxonomyNode(
            id=str(obj["id"]),
            label=str(obj.get("label", "")),
            description=str(obj.get("description") or ""),
            parent_id=str(parent) if parent else None,
        )
        nodes.append(node)
        positions.append(where)
    return Taxonomy(name, nodes, _positions=positions)


def _parse_tsv(text: str, name: str) -> Taxonomy:
    nodes = []
    positions = []
    saw_record = False
    for lineno, line in enumerate(io.StringIO(text), start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t", maxsplit=3)
        if not saw_record and fields[0] == "id":
            saw_record = True
            continue
        saw_record = True
        where = f"line {lineno}"
        if len(fields) < 4:
            raise TaxonomyError(
                f"{name}: malformed record at {where}: expected 4 tab-separated "
                f"fields, got {len(fields)}"
            )
        node_id, parent_id, label, description = fields
        node = TaxonomyNode(
            id=node_id,
            label=label,
            description=description,
            parent_id=parent_id or None,
        )
        nodes.append(node)
        positions.append(where)
    return Taxonomy(name, nodes, _positions=positions)


def serialize_taxonomy(tax: Taxonomy) -> str:
    """Render a taxonomy back to its TSV form (header included)."""
    lines = ["\t".join(_FIELDS)]
    for node in tax.nodes():
        lines.append(
            "\t".join((node.id, node.parent_id or "", node.label, node.description))
        )
    return "\n".join(lines) + "\n"


def load_taxonomy(path: str | Path, name: str | None = None) -> Taxonomy:
    """Load a taxonomy file; the space name defaults to the file stem."""
    path = Path(path)
    return parse_taxonomy(path.read_text(encoding="utf-8"), name or path.stem)
