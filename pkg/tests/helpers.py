"""Shared test fixtures: random generators and brute-force oracles.

Every oracle here is deliberately naive (exhaustive enumeration, fixpoint
iteration) and independent of the production code paths it checks.
"""

from __future__ import annotations

import itertools
import random

from nesypat.pattern import Pattern, build_pattern
from nesypat.taxonomy import ClassRef, Taxonomy


# -- taxonomy oracles ------------------------------------------------------

def reachable_oracle(edges, a, b) -> bool:
    """Reflexive-transitive reachability by BFS over the raw edge set."""
    if a == b:
        return True
    adj = {}
    for sub, sup in edges:
        adj.setdefault(sub, []).append(sup)
    seen, frontier = {a}, [a]
    while frontier:
        nxt = []
        for x in frontier:
            for y in adj.get(x, ()):
                if y == b:
                    return True
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return False


def glb_oracle(t: Taxonomy, labels) -> ClassRef | None:
    """Greatest common lower bound by scanning every class of ``t``."""
    labels = list(labels)
    lower = [c for c in t.classes
             if all(reachable_oracle(t.subclass_edges, c, x) for x in labels)]
    maximal = [c for c in lower
               if not any(d != c and reachable_oracle(t.subclass_edges, c, d)
                          for d in lower)]
    if len(maximal) == 1:
        return maximal[0]
    return None


def random_taxonomy(rng: random.Random, n_classes: int,
                    namespace: str = "urn:test#") -> Taxonomy:
    """Random DAG taxonomy: class i may only have parents among 0..i-1."""
    top = ClassRef(namespace + "C0", "C0")
    classes = [top]
    edges = set()
    for i in range(1, n_classes):
        c = ClassRef(f"{namespace}C{i}", f"C{i}")
        n_parents = rng.choice([1, 1, 1, 2])
        parents = rng.sample(classes, min(n_parents, len(classes)))
        for p in parents:
            edges.add((c, p))
        classes.append(c)
    return Taxonomy(classes, edges, top, namespace)


# -- pattern / homomorphism oracles ---------------------------------------

def random_pattern(rng: random.Random, t: Taxonomy, name: str,
                   n_nodes: int, edge_prob: float = 0.3) -> Pattern:
    choices = sorted(t.classes, key=lambda c: c.local_name)
    nodes = [(f"n{i}", rng.choice(choices)) for i in range(n_nodes)]
    edges = []
    for a in range(n_nodes):
        for b in range(n_nodes):
            if a != b and rng.random() < edge_prob:
                edges.append((f"n{a}", f"n{b}"))
    return build_pattern(name, t, nodes, edges)


def all_homomorphisms_oracle(src: Pattern, tgt: Pattern) -> set:
    """Every valid refinement map, by checking all |tgt|^|src| total maps."""
    t = src.taxonomy
    src_ids = sorted(n.id for n in src.nodes)
    tgt_ids = sorted(n.id for n in tgt.nodes)
    src_label = {n.id: n.label for n in src.nodes}
    tgt_label = {n.id: n.label for n in tgt.nodes}
    found = set()
    for images in itertools.product(tgt_ids, repeat=len(src_ids)):
        m = dict(zip(src_ids, images))
        if not all(t.leq(tgt_label[m[n]], src_label[n]) for n in src_ids):
            continue
        if not all((m[a], m[b]) in tgt.edges for a, b in src.edges):
            continue
        found.add(tuple(sorted(m.items())))
    return found


def isomorphic_oracle(p: Pattern, q: Pattern) -> bool:
    """Label- and edge-preserving bijection, by brute force over permutations."""
    p_ids = sorted(n.id for n in p.nodes)
    q_ids = sorted(n.id for n in q.nodes)
    if len(p_ids) != len(q_ids) or len(p.edges) != len(q.edges):
        return False
    p_label = {n.id: n.label for n in p.nodes}
    q_label = {n.id: n.label for n in q.nodes}
    for perm in itertools.permutations(q_ids):
        m = dict(zip(p_ids, perm))
        if not all(p_label[a] == q_label[m[a]] for a in p_ids):
            continue
        if {(m[a], m[b]) for a, b in p.edges} == q.edges:
            return True
    return False


# -- random network / document generators -----------------------------------

def make_random_network(rng: random.Random, max_patterns: int = 4,
                        max_total_nodes: int = 12, max_refs: int = 4):
    """A type-correct random network: refinement maps are drawn from the
    actual homomorphisms between randomly generated member patterns."""
    from nesypat.network import Network
    from nesypat.refinement import Refinement, find_homomorphisms

    t = random_taxonomy(rng, rng.randint(2, 8))
    n_patterns = rng.randint(1, max_patterns)
    budget = max_total_nodes
    pats = []
    for i in range(n_patterns):
        size = rng.randint(1, max(1, min(4, budget - (n_patterns - i - 1))))
        budget -= size
        pats.append(random_pattern(rng, t, f"p{i}", size, 0.3))
    refs = []
    attempts = 0
    while len(refs) < rng.randint(0, max_refs) and attempts < 12:
        attempts += 1
        src, tgt = rng.choice(pats), rng.choice(pats)
        maps = find_homomorphisms(src, tgt, limit=4)
        if maps:
            refs.append(Refinement(f"r{len(refs)}", src, tgt, rng.choice(maps)))
    return Network("rand", {p.name: p for p in pats},
                   {r.name: r for r in refs})


def random_dsl_document(rng: random.Random) -> str:
    """Source text of a random library over the bundled taxonomy."""
    class_pool = ["Model", "Symbol", "Data", "Training", "Deduction",
                  "Semantic_Model", "Statistical_Model", "Instance",
                  "Process", "Actor"]
    lines = ["logic NeSyPatterns"]
    n_patterns = rng.randint(1, 4)
    names = []
    for i in range(n_patterns):
        name = f"P{i}"
        names.append(name)
        lines.append(f"pattern {name} = data ontohub:NeSyPatterns.omn")
        node_ids = [f"x{k}" for k in range(rng.randint(1, 5))]
        labels = {nid: rng.choice(class_pool) for nid in node_ids}
        for nid in node_ids:
            lines.append(f"  {nid} : {labels[nid]};")
        for _ in range(rng.randint(0, 6)):
            if len(node_ids) > 1:
                a, b = rng.sample(node_ids, 2)
                lines.append(f"  {a} : {labels[a]} -> {b} : {labels[b]};")
        lines.append("end")
    lines.append("network Net = " + ", ".join(names) + " end")
    lines.append("pattern Comb = combine Net end")
    return "\n".join(lines)


# -- equivalence closure oracle -------------------------------------------

def equivalence_classes_oracle(elements, pairs):
    """Partition generated by ``pairs``, via naive fixpoint merging."""
    classes = [{e} for e in elements]

    def class_of(x):
        for c in classes:
            if x in c:
                return c
        raise KeyError(x)

    for a, b in pairs:
        ca, cb = class_of(a), class_of(b)
        if ca is not cb:
            ca |= cb
            classes.remove(cb)
    return {frozenset(c) for c in classes}
