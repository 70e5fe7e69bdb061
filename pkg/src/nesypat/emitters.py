"""Serializers: DOT graphs, stable JSON, ABox facts and Manchester text."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .colimit import CombinationResult
from .errors import Diagnostic, UnknownClassError
from .network import Network
from .pattern import Pattern, build_pattern
from .taxonomy import ClassRef, Taxonomy

#: Node shape per the label's child-of-top ancestor, checked in this order.
_SHAPES = (
    ("Instance", "box"),
    ("Model", "hexagon"),
    ("Process", "ellipse"),
    ("Actor", "diamond"),
)


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _shape_for(taxonomy: Taxonomy, label: ClassRef) -> str:
    for ancestor_name, shape in _SHAPES:
        if taxonomy.has_local(ancestor_name):
            if taxonomy.leq(label, taxonomy.lookup(ancestor_name)):
                return shape
    return "plaintext"


def emit_dot(p: Pattern) -> str:
    """Render a pattern as a Graphviz digraph.

    Node text is ``id : label``; the shape encodes the label's top-level
    ancestor.  Nodes are ordered by id and edges lexicographically, so
    output is deterministic.
    """
    lines = [f"digraph {_dot_quote(p.name)} {{"]
    for nid in p.sorted_ids:
        label = p.labels[nid]
        shape = _shape_for(p.taxonomy, label)
        text = f"{nid} : {label.local_name}"
        lines.append(f"  {_dot_quote(nid)} [label={_dot_quote(text)}, "
                     f"shape={shape}];")
    for a, b in sorted(p.edges):
        lines.append(f"  {_dot_quote(a)} -> {_dot_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- JSON -------------------------------------------------------------------

def _pattern_obj(p: Pattern) -> dict:
    return {
        "name": p.name,
        "nodes": [{"id": nid, "label": p.labels[nid].local_name}
                  for nid in p.sorted_ids],
        "edges": [[a, b] for a, b in sorted(p.edges)],
    }


def emit_json(value: Pattern | Network | CombinationResult) -> str:
    """Stable JSON for patterns, networks and combination results.

    Keys are sorted and all lists canonically ordered, so equal inputs
    serialize to identical bytes.
    """
    if isinstance(value, Pattern):
        obj = _pattern_obj(value)
    elif isinstance(value, Network):
        obj = {
            "name": value.name,
            "patterns": [_pattern_obj(value.patterns[n])
                         for n in sorted(value.patterns)],
            "refinements": [
                {
                    "name": n,
                    "source": value.refinements[n].source.name,
                    "target": value.refinements[n].target.name,
                    "map": dict(sorted(value.refinements[n].node_map.items())),
                }
                for n in sorted(value.refinements)
            ],
        }
    elif isinstance(value, CombinationResult):
        obj = _pattern_obj(value.pattern)
        obj["injections"] = {
            pname: dict(sorted(m.items()))
            for pname, m in sorted(value.injections.items())
        }
        obj["classes"] = {
            cname: [[p, n] for p, n in sorted(members)]
            for cname, members in sorted(value.classes.items())
        }
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False) + "\n"


def pattern_from_json(text: str, taxonomy: Taxonomy,
                      name: str | None = None) -> Pattern:
    """Read a pattern back from its JSON form, resolving labels in
    ``taxonomy``."""
    obj = json.loads(text)
    nodes = [(n["id"], taxonomy.lookup(n["label"])) for n in obj["nodes"]]
    edges = [(a, b) for a, b in obj["edges"]]
    return build_pattern(name or obj.get("name", "<json>"), taxonomy,
                         nodes, edges)


# -- ABox translation ---------------------------------------------------------

@dataclass(frozen=True)
class AboxTriples:
    """Class memberships plus edge relations for one pattern.

    ``lines`` holds the facts in canonical emission order: nodes are
    visited in depth-first order from the lexicographically first ids,
    each node's membership fact directly before its outgoing link facts.
    """

    memberships: tuple[tuple[str, ClassRef], ...]
    links: tuple[tuple[str, str, str], ...]  # (relation, from, to)
    lines: tuple[str, ...]

    def render(self) -> str:
        return "\n".join(self.lines) + "\n"


def emit_abox(p: Pattern, diagnostics: list[Diagnostic] | None = None) -> AboxTriples:
    """Translate a pattern into ABox facts.

    Each node yields one membership fact ``n : Class``.  Each edge yields
    one relation fact: providesInput into a process, hasOutput out of a
    process, throughput between two processes, and connectedTo (plus a
    warning) when neither endpoint is a process.
    """
    try:
        process = p.taxonomy.lookup("Process")
    except UnknownClassError:
        raise UnknownClassError(
            "ABox translation needs a Process class in the taxonomy")

    def is_process(nid: str) -> bool:
        return p.taxonomy.leq(p.labels[nid], process)

    def relation(a: str, b: str) -> str:
        pa, pb = is_process(a), is_process(b)
        if pa and pb:
            return "throughput"
        if pb:
            return "providesInput"
        if pa:
            return "hasOutput"
        if diagnostics is not None:
            diagnostics.append(Diagnostic(
                "warning",
                f"edge ({a!r}, {b!r}) joins two non-process nodes; "
                f"using connectedTo"))
        return "connectedTo"

    out_edges: dict[str, list[str]] = {nid: [] for nid in p.sorted_ids}
    for a, b in p.edges:
        out_edges[a].append(b)

    memberships: list[tuple[str, ClassRef]] = []
    links: list[tuple[str, str, str]] = []
    lines: list[str] = []
    emitted: set[str] = set()

    def visit(nid: str) -> None:
        if nid in emitted:
            return
        emitted.add(nid)
        memberships.append((nid, p.labels[nid]))
        lines.append(f"{nid} : {p.labels[nid].local_name}")
        for b in sorted(out_edges[nid]):
            rel = relation(nid, b)
            links.append((rel, nid, b))
            lines.append(f"{rel}({nid},{b})")
            visit(b)

    for nid in p.sorted_ids:
        visit(nid)
    return AboxTriples(tuple(memberships), tuple(links), tuple(lines))


# -- Manchester ---------------------------------------------------------------

_SIMPLE_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def emit_manchester(t: Taxonomy) -> str:
    """Write a taxonomy as Manchester-subset text that reads back
    order-isomorphic: same classes, same subsumption relation."""
    def ref(c: ClassRef) -> str:
        if c.iri == t.namespace + c.local_name and _SIMPLE_NAME.match(c.local_name):
            return c.local_name
        return f"<{c.iri}>"

    blocks = [f"Prefix: : <{t.namespace}>"]
    parents: dict[ClassRef, list[ClassRef]] = {c: [] for c in t.classes}
    for sub, sup in t.subclass_edges:
        parents[sub].append(sup)
    for c in sorted(t.classes, key=lambda x: (x != t.top, x.local_name, x.iri)):
        lines = [f"Class: {ref(c)}"]
        sups = sorted(parents[c], key=lambda x: (x.local_name, x.iri))
        if sups:
            lines.append("    SubClassOf: " + ", ".join(ref(s) for s in sups))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
