"""Combination of networks: glue patterns along refinements.

All member node sets go into one disjoint-union arena; every refinement
identifies each source node with its image; the union-find classes become
the nodes of the combined pattern.  A class's label is the infimum of its
members' labels, and the combination is undefined when some infimum does
not exist.  Edges are the images of member edges; an edge whose endpoints
were merged into one class would be a self-loop and is an error.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import (
    CyclicCombineError,
    DegenerateLoopError,
    NesyError,
    UndefinedColimitError,
    UnknownNameError,
)
from .library import Library
from .network import Network, validate_network
from .pattern import Pattern, PatternNode
from .taxonomy import ClassRef


class UnionFind:
    """Disjoint sets over 0..n-1 with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]


@dataclass(frozen=True)
class CombinationResult:
    """The combined pattern plus how each member embeds into it.

    ``injections[p][n]`` is the combined node that member pattern ``p``'s
    node ``n`` maps to; ``classes`` inverts that, giving each combined
    node its set of (pattern name, node id) preimages.
    """

    pattern: Pattern
    injections: dict[str, dict[str, str]]
    classes: dict[str, frozenset[tuple[str, str]]]


def combine(net: Network) -> CombinationResult:
    """Compute the combination of a type-correct network.

    Raises UndefinedColimitError when a merged class has no label
    infimum, and DegenerateLoopError when merging turns a member edge
    into a self-loop.
    """
    validate_network(net)
    arena: list[tuple[str, str]] = []  # (pattern name, node id)
    index: dict[tuple[str, str], int] = {}
    for pname in sorted(net.patterns):
        p = net.patterns[pname]
        for nid in p.sorted_ids:
            index[(pname, nid)] = len(arena)
            arena.append((pname, nid))

    uf = UnionFind(len(arena))
    for rname in sorted(net.refinements):
        r = net.refinements[rname]
        for n, img in sorted(r.node_map.items()):
            uf.union(index[(r.source.name, n)],
                     index[(r.target.name, img)])

    groups: dict[int, list[tuple[str, str]]] = {}
    for i, member in enumerate(arena):
        groups.setdefault(uf.find(i), []).append(member)

    taxonomy = None
    for p in net.patterns.values():
        taxonomy = p.taxonomy
        break
    if taxonomy is None:
        raise ValueError(f"network {net.name!r} has no member patterns")

    class_name: dict[int, str] = {}
    used_names: set[str] = set()
    labels: dict[int, ClassRef] = {}
    for root, members in sorted(groups.items(),
                                key=lambda kv: min(f"{p}.{n}" for p, n in kv[1])):
        member_labels = {net.patterns[p].labels[n] for p, n in members}
        inf = taxonomy.infimum(member_labels)
        if inf is None:
            shown = ", ".join(sorted(l.local_name for l in member_labels))
            raise UndefinedColimitError(
                f"no infimum of labels {{{shown}}} for merged nodes "
                f"{_render_members(members)}; the combination is not defined",
                members=sorted(members), labels=sorted(member_labels,
                                                       key=lambda l: l.iri))
        labels[root] = inf
        name = min(f"{p}.{n}" for p, n in members)
        while name in used_names:  # defensive; qualified names are unique
            name += "_"
        used_names.add(name)
        class_name[root] = name

    edges: set[tuple[str, str]] = set()
    for pname in sorted(net.patterns):
        p = net.patterns[pname]
        for a, b in sorted(p.edges):
            ra = uf.find(index[(pname, a)])
            rb = uf.find(index[(pname, b)])
            if ra == rb:
                raise DegenerateLoopError(
                    f"edge ({a!r}, {b!r}) of pattern {pname!r} collapses to a "
                    f"self-loop on merged node {_render_members(groups[ra])}",
                    members=sorted(groups[ra]))
            edges.add((class_name[ra], class_name[rb]))

    nodes = frozenset(PatternNode(class_name[root], labels[root])
                      for root in groups)
    pattern = Pattern(f"combine({net.name})", taxonomy, nodes, frozenset(edges))

    injections: dict[str, dict[str, str]] = {}
    for pname in sorted(net.patterns):
        p = net.patterns[pname]
        injections[pname] = {
            nid: class_name[uf.find(index[(pname, nid)])]
            for nid in p.sorted_ids
        }
    classes = {class_name[root]: frozenset(members)
               for root, members in groups.items()}
    return CombinationResult(pattern, injections, classes)


def evaluate_combines(lib: Library) -> Library:
    """Materialize every combine-defined pattern of a library.

    Combine-definitions are evaluated in dependency order (a definition
    depends on the combine-defined members of its network); cyclic
    dependencies raise CyclicCombineError.  Errors raised while combining
    are re-raised with the pattern name prefixed.
    """
    order = _dependency_order(lib)
    patterns = dict(lib.patterns)
    for pname in order:
        netname = lib.combine_defs[pname]
        if netname not in lib.networks:
            raise UnknownNameError(
                f"combine-defined pattern {pname!r} references unknown "
                f"network {netname!r}")
        net = _refresh_members(lib.networks[netname], patterns)
        try:
            result = combine(net)
        except NesyError as e:
            raise e.prefixed(f"{pname}: ")
        patterns[pname] = replace(result.pattern, name=pname)
    return Library(dict(lib.taxonomies), patterns, dict(lib.refinements),
                   dict(lib.networks), dict(lib.combine_defs))


def combination_result(lib: Library, name: str) -> CombinationResult:
    """Combine the network behind one combine-defined pattern.

    Any combine-defined patterns its network depends on are materialized
    first; the returned result carries the injections and preimage
    classes of the final combination.
    """
    if name not in lib.combine_defs:
        raise UnknownNameError(f"pattern {name!r} is not combine-defined")
    deps = _combine_deps(lib)
    needed = {name}
    stack = [name]
    while stack:
        for d in deps.get(stack.pop(), ()):
            if d not in needed:
                needed.add(d)
                stack.append(d)
    sub = Library(dict(lib.taxonomies), dict(lib.patterns),
                  dict(lib.refinements), dict(lib.networks),
                  {k: v for k, v in lib.combine_defs.items() if k in needed})
    evaluated = evaluate_combines(sub)
    net = _refresh_members(lib.networks[lib.combine_defs[name]],
                           evaluated.patterns)
    result = combine(net)
    return replace(result, pattern=replace(result.pattern, name=name))


def materialize_pattern(lib: Library, name: str) -> Pattern:
    """Look up a pattern, computing its combination when combine-defined."""
    if name in lib.patterns:
        return lib.patterns[name]
    if name in lib.combine_defs:
        return combination_result(lib, name).pattern
    raise UnknownNameError(f"unknown pattern {name!r}")


def _combine_deps(lib: Library) -> dict[str, set[str]]:
    combine_names = set(lib.combine_defs)
    deps: dict[str, set[str]] = {}
    for pname, netname in lib.combine_defs.items():
        wanted: set[str] = set()
        net = lib.networks.get(netname)
        if net is not None:
            wanted |= set(net.patterns) & combine_names
            for r in net.refinements.values():
                wanted |= {r.source.name, r.target.name} & combine_names
        deps[pname] = wanted - {pname}
    return deps


def _dependency_order(lib: Library) -> list[str]:
    deps = _combine_deps(lib)

    order: list[str] = []
    done: set[str] = set()
    visiting: set[str] = set()

    def visit(name: str, chain: tuple[str, ...]) -> None:
        if name in done:
            return
        if name in visiting:
            cycle = " -> ".join(chain + (name,))
            raise CyclicCombineError(f"cyclic combine-definitions: {cycle}")
        visiting.add(name)
        for d in sorted(deps[name]):
            visit(d, chain + (name,))
        visiting.discard(name)
        done.add(name)
        order.append(name)

    for name in sorted(deps):
        visit(name, ())
    return order


def _refresh_members(net: Network, patterns: dict[str, Pattern]) -> Network:
    """Swap member patterns for their current library versions by name."""
    new_patterns = {}
    for name, p in net.patterns.items():
        new_patterns[name] = patterns.get(name, p)
    new_refs = {}
    for name, r in net.refinements.items():
        new_refs[name] = replace(
            r,
            source=patterns.get(r.source.name, r.source),
            target=patterns.get(r.target.name, r.target))
    return Network(net.name, new_patterns, new_refs)


def _render_members(members) -> str:
    return "{" + ", ".join(f"{p}.{n}" for p, n in sorted(members)) + "}"
