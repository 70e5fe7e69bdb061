"""Patterns: simple directed graphs whose nodes carry ontology classes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import (
    DuplicateNodeError,
    SelfLoopError,
    UnknownLabelError,
    UnknownNodeError,
)
from .taxonomy import ClassRef, Taxonomy


@dataclass(frozen=True)
class PatternNode:
    id: str
    label: ClassRef


@dataclass(frozen=True)
class Pattern:
    """A named simple directed graph with class-labeled nodes.

    Simple means: no parallel edges (edges form a set) and no self-loops.
    Instances are immutable; construct through :func:`build_pattern`,
    which validates the invariants.
    """

    name: str
    taxonomy: Taxonomy
    nodes: frozenset[PatternNode]
    edges: frozenset[tuple[str, str]]

    @cached_property
    def labels(self) -> dict[str, ClassRef]:
        return {n.id: n.label for n in self.nodes}

    @cached_property
    def sorted_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.labels))

    def label_of(self, node_id: str) -> ClassRef:
        try:
            return self.labels[node_id]
        except KeyError:
            raise UnknownNodeError(
                f"pattern {self.name!r} has no node {node_id!r}") from None

    def degree(self, node_id: str) -> int:
        return sum(1 for a, b in self.edges if node_id in (a, b))

    def __repr__(self):
        return (f"Pattern({self.name!r}, {len(self.nodes)} nodes, "
                f"{len(self.edges)} edges)")


def build_pattern(name: str, taxonomy: Taxonomy, node_decls, edge_decls) -> Pattern:
    """Construct a validated Pattern.

    ``node_decls`` is an iterable of (node id, ClassRef); re-declaring an
    id with the same label is idempotent, with a different label it is a
    DuplicateNodeError.  Duplicate edges are deduplicated silently;
    self-loops and undeclared endpoints are errors.
    """
    labels: dict[str, ClassRef] = {}
    for node_id, label in node_decls:
        if label not in taxonomy:
            raise UnknownLabelError(
                f"label {label.local_name!r} is not a class of the taxonomy")
        if node_id in labels and labels[node_id] != label:
            raise DuplicateNodeError(
                f"node id {node_id!r} reused with a different label "
                f"({labels[node_id].local_name} vs {label.local_name})")
        labels[node_id] = label
    edges = set()
    for a, b in edge_decls:
        if a == b:
            raise SelfLoopError(f"self-loop on node {a!r}")
        for endpoint in (a, b):
            if endpoint not in labels:
                raise UnknownNodeError(f"edge endpoint {endpoint!r} is not a node")
        edges.add((a, b))
    nodes = frozenset(PatternNode(i, l) for i, l in labels.items())
    return Pattern(name, taxonomy, nodes, frozenset(edges))


def isomorphic(p: Pattern, q: Pattern) -> bool:
    """True iff some bijection of node sets preserves labels and edges
    exactly, in both directions.  Node ids play no role."""
    if len(p.nodes) != len(q.nodes) or len(p.edges) != len(q.edges):
        return False

    def signature(pat: Pattern):
        out = {i: 0 for i in pat.sorted_ids}
        inc = {i: 0 for i in pat.sorted_ids}
        for a, b in pat.edges:
            out[a] += 1
            inc[b] += 1
        return {i: (pat.labels[i], out[i], inc[i]) for i in pat.sorted_ids}

    sig_p, sig_q = signature(p), signature(q)
    if sorted(sig_p.values(), key=_sig_key) != sorted(sig_q.values(), key=_sig_key):
        return False

    p_ids = sorted(sig_p, key=lambda i: (_sig_key(sig_p[i]), i))
    candidates = {i: [j for j in sig_q if sig_q[j] == sig_p[i]] for i in p_ids}

    mapping: dict[str, str] = {}
    used: set[str] = set()

    def ok(i: str, j: str) -> bool:
        # Partial edge consistency; the full image/edge-set equality is
        # re-checked once a complete bijection is reached.
        for a, b in p.edges:
            if a == i and b in mapping and (j, mapping[b]) not in q.edges:
                return False
            if b == i and a in mapping and (mapping[a], j) not in q.edges:
                return False
        return True

    def backtrack(k: int) -> bool:
        if k == len(p_ids):
            image_edges = {(mapping[a], mapping[b]) for a, b in p.edges}
            return image_edges == set(q.edges)
        i = p_ids[k]
        for j in candidates[i]:
            if j in used or not ok(i, j):
                continue
            mapping[i] = j
            used.add(j)
            if backtrack(k + 1):
                return True
            del mapping[i]
            used.discard(j)
        return False

    return backtrack(0)


def _sig_key(sig):
    label, out, inc = sig
    return (label.iri, out, inc)
