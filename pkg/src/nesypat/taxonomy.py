"""Class hierarchies for pattern elements.

A taxonomy is a finite acyclic subclass graph with a single top class.
It answers subsumption queries (``leq``), computes infima of label sets
(the operation that decides whether pattern combinations exist), and can
be read from a small subset of OWL2 Manchester syntax: prefix
declarations, the ontology header, and ``Class`` frames with named
``SubClassOf`` entries.  Everything else is skipped with a warning.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    CycleError,
    Diagnostic,
    ParseError,
    UnknownClassError,
)

#: Namespace of the bundled pattern-element ontology.
DEFAULT_NAMESPACE = "https://ontohub.org/meta/NeSyPatterns.omn#"

#: Local name of the root class every pattern element sits below.
TOP_LOCAL_NAME = "NeSy_Pattern_Element"

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")


def _local_name_of(iri: str) -> str:
    if "#" in iri:
        frag = iri.rsplit("#", 1)[1]
    else:
        frag = iri.rstrip("/").rsplit("/", 1)[-1]
    return frag.replace(" ", "_")


@dataclass(frozen=True, eq=False)
class ClassRef:
    """An ontology class. Two refs are equal iff their IRIs are equal."""

    iri: str
    local_name: str

    def __post_init__(self):
        if not self.local_name or any(c.isspace() for c in self.local_name):
            raise ValueError(f"bad local name {self.local_name!r}")

    @classmethod
    def from_iri(cls, iri: str) -> "ClassRef":
        return cls(iri, _local_name_of(iri))

    def __eq__(self, other):
        return isinstance(other, ClassRef) and self.iri == other.iri

    def __hash__(self):
        return hash(self.iri)

    def __repr__(self):
        return f"ClassRef({self.local_name})"


class Taxonomy:
    """Immutable subclass hierarchy with one top class.

    ``subclass_edges`` holds (sub, super) pairs; ``leq`` is their
    reflexive-transitive closure.  Construction validates that the edge
    graph is acyclic, that all endpoints are declared classes, and that
    every class reaches ``top``.
    """

    __slots__ = ("classes", "subclass_edges", "top", "namespace",
                 "_up", "_down", "_by_local", "_hash")

    def __init__(self, classes, subclass_edges, top: ClassRef,
                 namespace: str = DEFAULT_NAMESPACE):
        classes = frozenset(classes)
        edges = frozenset(subclass_edges)
        if top not in classes:
            raise ValueError("top class must be a member of classes")
        for sub, sup in edges:
            if sub not in classes or sup not in classes:
                raise ValueError(f"edge endpoint not declared: {sub!r} <= {sup!r}")
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "subclass_edges", edges)
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "namespace", namespace)
        object.__setattr__(self, "_hash", None)

        parents: dict[ClassRef, set[ClassRef]] = {c: set() for c in classes}
        for sub, sup in edges:
            parents[sub].add(sup)
        self._check_acyclic(parents)

        up: dict[ClassRef, frozenset[ClassRef]] = {}
        for c in classes:
            seen = {c}
            stack = list(parents[c])
            while stack:
                p = stack.pop()
                if p not in seen:
                    seen.add(p)
                    stack.extend(parents[p])
            up[c] = frozenset(seen)
        down: dict[ClassRef, set[ClassRef]] = {c: set() for c in classes}
        for c, ancs in up.items():
            for a in ancs:
                down[a].add(c)
        object.__setattr__(self, "_up", up)
        object.__setattr__(self, "_down", {c: frozenset(s) for c, s in down.items()})

        for c in classes:
            if top not in up[c]:
                raise ValueError(f"class {c.local_name} does not reach the top class")

        by_local: dict[str, ClassRef] = {}
        for c in sorted(classes, key=lambda x: x.iri):
            if c.local_name in by_local and by_local[c.local_name] != c:
                raise ValueError(
                    f"duplicate local name {c.local_name!r} for distinct IRIs")
            by_local[c.local_name] = c
        object.__setattr__(self, "_by_local", by_local)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Taxonomy is immutable")

    @staticmethod
    def _check_acyclic(parents: dict[ClassRef, set[ClassRef]]) -> None:
        WHITE, GRAY, BLACK = 0, 1, 2
        state = {c: WHITE for c in parents}

        def dfs(start: ClassRef) -> None:
            stack = [(start, iter(sorted(parents[start], key=lambda x: x.iri)))]
            state[start] = GRAY
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    if state[nxt] == GRAY:
                        raise CycleError(
                            f"subclass axioms form a cycle through {nxt.local_name}")
                    if state[nxt] == WHITE:
                        state[nxt] = GRAY
                        stack.append((nxt, iter(sorted(parents[nxt], key=lambda x: x.iri))))
                        advanced = True
                        break
                if not advanced:
                    state[node] = BLACK
                    stack.pop()

        for c in sorted(parents, key=lambda x: x.iri):
            if state[c] == WHITE:
                dfs(c)

    # -- queries ---------------------------------------------------------

    def __contains__(self, c: ClassRef) -> bool:
        return c in self.classes

    def lookup(self, token: str) -> ClassRef:
        """Resolve a DSL class token (spaces already normalized) to a class."""
        token = token.replace(" ", "_")
        try:
            return self._by_local[token]
        except KeyError:
            raise UnknownClassError(f"unknown class {token!r}") from None

    def has_local(self, token: str) -> bool:
        return token.replace(" ", "_") in self._by_local

    def leq(self, a: ClassRef, b: ClassRef) -> bool:
        """True iff ``a`` is ``b`` or a (transitive) subclass of ``b``."""
        self._require(a)
        self._require(b)
        return b in self._up[a]

    def infimum(self, labels) -> ClassRef | None:
        """Greatest common lower bound of a non-empty label set, or None.

        The common-lower-bound set is intersected from descendant sets;
        the infimum is its unique maximal element.  Zero or several
        maximal elements mean the infimum does not exist.
        """
        labels = list(labels)
        if not labels:
            raise ValueError("infimum of an empty label set")
        for x in labels:
            self._require(x)
        lower = set(self._down[labels[0]])
        for x in labels[1:]:
            lower &= self._down[x]
        maximal = [c for c in lower if len(self._up[c] & lower) == 1]
        if len(maximal) == 1:
            return maximal[0]
        return None

    def _require(self, c: ClassRef) -> None:
        if c not in self.classes:
            raise UnknownClassError(f"class {c.local_name!r} is not in this taxonomy")

    def same_classes(self, other: "Taxonomy") -> bool:
        return self.classes == other.classes

    # -- construction ----------------------------------------------------

    def extend(self, fragment: str, diagnostics: list[Diagnostic] | None = None,
               source_name: str = "<fragment>") -> "Taxonomy":
        """Return this taxonomy plus the classes/edges of a Manchester fragment.

        Bare names in the fragment resolve against existing local names
        first; new class frames mint IRIs in this taxonomy's namespace.
        A ``SubClassOf`` target that is neither known nor declared in the
        fragment raises UnknownClassError.
        """
        fragment = fragment.strip()
        if not fragment:
            return self
        decls, edge_names, frag_ns, prefixes = _parse_manchester(
            fragment, diagnostics, source_name, default_ns=self.namespace)

        def resolve(name: str, *, declare: bool) -> ClassRef:
            if name.startswith("<") and name.endswith(">"):
                ref = ClassRef.from_iri(name[1:-1])
                if ref in self.classes or ref in new_refs:
                    return ref
                if declare:
                    new_refs.add(ref)
                    return ref
                raise UnknownClassError(f"unknown class <{ref.iri}> in extension")
            if ":" in name:
                pfx, local = name.split(":", 1)
                if pfx not in prefixes:
                    raise UnknownClassError(f"undeclared prefix {pfx!r} in {name!r}")
                return resolve(f"<{prefixes[pfx] + local}>", declare=declare)
            norm = name.replace(" ", "_")
            if norm in self._by_local:
                return self._by_local[norm]
            if norm in new_by_local:
                return new_by_local[norm]
            if declare:
                c = ClassRef(frag_ns + norm, norm)
                new_by_local[norm] = c
                new_refs.add(c)
                return c
            raise UnknownClassError(f"unknown class {norm!r} in extension")

        new_by_local: dict[str, ClassRef] = {}
        new_refs: set[ClassRef] = set()
        declared = [resolve(n, declare=True) for n in decls]
        edges = set(self.subclass_edges)
        has_super: set[ClassRef] = set()
        for sub_name, sup_name in edge_names:
            sub = resolve(sub_name, declare=False)
            sup = resolve(sup_name, declare=False)
            edges.add((sub, sup))
            has_super.add(sub)
        for c in declared:
            if c not in self.classes and c not in has_super and c != self.top:
                edges.add((c, self.top))
        return Taxonomy(self.classes | new_refs, edges, self.top, self.namespace)

    # -- equality --------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Taxonomy)
                and self.classes == other.classes
                and self.subclass_edges == other.subclass_edges
                and self.top == other.top)

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(
                self, "_hash",
                hash((self.classes, self.subclass_edges, self.top)))
        return self._hash

    def __repr__(self):
        return f"Taxonomy({len(self.classes)} classes, top={self.top.local_name})"


def default_taxonomy() -> Taxonomy:
    """The bundled pattern-element hierarchy.

    Top is NeSy_Pattern_Element with Instance, Model, Process and Actor
    below it; Data and Symbol are instances, Statistical_Model and
    Semantic_Model are models, and Training, Deduction and Transformation
    are processes.
    """
    def c(name: str) -> ClassRef:
        return ClassRef(DEFAULT_NAMESPACE + name, name)

    top = c(TOP_LOCAL_NAME)
    tree = {
        "Instance": TOP_LOCAL_NAME,
        "Model": TOP_LOCAL_NAME,
        "Process": TOP_LOCAL_NAME,
        "Actor": TOP_LOCAL_NAME,
        "Data": "Instance",
        "Symbol": "Instance",
        "Statistical_Model": "Model",
        "Semantic_Model": "Model",
        "Training": "Process",
        "Deduction": "Process",
        "Transformation": "Process",
    }
    classes = {top} | {c(n) for n in tree}
    edges = {(c(sub), c(sup)) for sub, sup in tree.items()}
    return Taxonomy(classes, edges, top)


# -- Manchester-subset reader ---------------------------------------------

_FRAME_KEYWORDS = {
    "Class", "Datatype", "ObjectProperty", "DataProperty",
    "AnnotationProperty", "Individual", "NamedIndividual",
    "Prefix", "Ontology", "Import",
}
_ENTRY_KEYWORDS = {
    "SubClassOf", "EquivalentTo", "DisjointWith", "DisjointUnionOf",
    "HasKey", "Annotations",
}


@dataclass(frozen=True)
class _Tok:
    kind: str  # name, quoted, iri, colon, comma, eof
    value: str
    line: int
    col: int


def _tokenize_manchester(text: str, source_name: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "<":
            j = text.find(">", i)
            if j < 0:
                raise ParseError("unterminated IRI", line=line, col=col)
            toks.append(_Tok("iri", text[i + 1:j], line, col))
            col += j - i + 1
            i = j + 1
            continue
        if ch == "'":
            j = text.find("'", i + 1)
            if j < 0 or "\n" in text[i + 1:j]:
                raise ParseError("unterminated quoted name", line=line, col=col)
            toks.append(_Tok("quoted", text[i + 1:j], line, col))
            col += j - i + 1
            i = j + 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 2 if text[j] == "\\" else 1
            if j >= n:
                raise ParseError("unterminated string literal", line=line, col=col)
            toks.append(_Tok("misc", text[i:j + 1], line, col))
            col += j - i + 1
            i = j + 1
            continue
        if ch == ":":
            toks.append(_Tok("colon", ":", line, col))
            i += 1
            col += 1
            continue
        if ch == ",":
            toks.append(_Tok("comma", ",", line, col))
            i += 1
            col += 1
            continue
        m = _NAME_RE.match(text, i)
        if m:
            toks.append(_Tok("name", m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        # Anything else (numbers, parentheses, annotation operators) only
        # appears inside entries we skip; lex it so skipping can walk over it.
        m = re.match(r"[0-9][A-Za-z0-9_.\-]*", text[i:])
        length = m.end() if m else 1
        toks.append(_Tok("misc", text[i:i + length], line, col))
        i += length
        col += length
    toks.append(_Tok("eof", "", line, col))
    return toks


def _parse_manchester(text: str, diagnostics: list[Diagnostic] | None,
                      source_name: str, default_ns: str | None = None):
    """Parse the Manchester subset into raw declaration and edge name lists.

    Returns (declared class names, (sub, super) name pairs,
    namespace, prefix map).  Names keep prefixes as ``pfx:Name`` so the
    caller can expand them; bare and quoted names are space-normalized.
    """
    toks = _tokenize_manchester(text, source_name)
    pos = 0
    prefixes: dict[str, str] = {}
    namespace = default_ns
    ontology_iri: str | None = None
    declared: list[str] = []
    declared_set: set[str] = set()
    edges: list[tuple[str, str]] = []

    def warn(msg: str, tok: _Tok) -> None:
        if diagnostics is not None:
            diagnostics.append(Diagnostic("warning", msg, tok.line, tok.col,
                                          source_name))

    def peek() -> _Tok:
        return toks[pos]

    def advance() -> _Tok:
        nonlocal pos
        t = toks[pos]
        if t.kind != "eof":
            pos += 1
        return t

    def at_keyword(words) -> str | None:
        t = peek()
        if t.kind == "name" and t.value in words:
            nxt = toks[pos + 1] if pos + 1 < len(toks) else None
            # A keyword may be followed by ':' (standard) or a name/quoted/IRI
            # (the colon-less form used in inline extensions).
            if nxt is not None and nxt.kind in ("colon", "name", "quoted", "iri"):
                return t.value
        return None

    def eat_keyword() -> _Tok:
        t = advance()
        if peek().kind == "colon":
            advance()
        return t

    def parse_name() -> str:
        t = peek()
        if t.kind == "quoted":
            advance()
            return t.value.replace(" ", "_")
        if t.kind == "iri":
            advance()
            return "<" + t.value + ">"
        if t.kind == "name":
            advance()
            if peek().kind == "colon" and _is_adjacent(t, toks[pos]):
                colon = advance()
                t2 = peek()
                if t2.kind == "name" and _is_adjacent(colon, t2):
                    advance()
                    return f"{t.value}:{t2.value}"
                raise ParseError("malformed prefixed name",
                                 line=t.line, col=t.col)
            return t.value
        raise ParseError(f"expected a class name, found {t.value!r}",
                         line=t.line, col=t.col,
                         expected=("name", "quoted name", "IRI"))

    def skip_entry(kw: _Tok) -> None:
        while True:
            t = peek()
            if t.kind == "eof":
                return
            if t.kind == "name" and (t.value in _FRAME_KEYWORDS
                                     or t.value in _ENTRY_KEYWORDS):
                return
            advance()

    while peek().kind != "eof":
        kw = at_keyword(_FRAME_KEYWORDS)
        if kw == "Prefix":
            eat_keyword()
            pfx = ""
            if peek().kind == "name":
                pfx = advance().value
            if peek().kind == "colon":
                advance()
            t = peek()
            if t.kind != "iri":
                raise ParseError("expected <IRI> in prefix declaration",
                                 line=t.line, col=t.col, expected=("IRI",))
            iri = advance().value
            prefixes[pfx] = iri
            if pfx == "":
                namespace = iri
            continue
        if kw == "Ontology":
            eat_keyword()
            if peek().kind == "iri":
                ontology_iri = advance().value
                if peek().kind == "iri":  # optional version IRI
                    advance()
            continue
        if kw == "Import":
            t = eat_keyword()
            warn("imports are not honored", t)
            if peek().kind in ("iri", "name", "quoted"):
                parse_name()
            continue
        if kw == "Class":
            eat_keyword()
            subject = parse_name()
            if subject not in declared_set:
                declared_set.add(subject)
                declared.append(subject)
            while True:
                entry = at_keyword(_ENTRY_KEYWORDS)
                if entry is None:
                    break
                tok = peek()
                if entry != "SubClassOf":
                    eat_keyword()
                    warn(f"{entry} entries are skipped", tok)
                    skip_entry(tok)
                    continue
                eat_keyword()
                while True:
                    t = peek()
                    if t.kind == "name" and (t.value in _FRAME_KEYWORDS
                                             or t.value in _ENTRY_KEYWORDS):
                        break
                    if t.kind not in ("name", "quoted", "iri"):
                        warn("unsupported class expression skipped", t)
                        skip_entry(t)
                        break
                    sup = parse_name()
                    nxt = peek()
                    simple = (nxt.kind in ("comma", "eof")
                              or (nxt.kind == "name"
                                  and (nxt.value in _FRAME_KEYWORDS
                                       or nxt.value in _ENTRY_KEYWORDS)))
                    if not simple:
                        warn("complex class expression skipped", t)
                        skip_entry(t)
                        break
                    edges.append((subject, sup))
                    if peek().kind == "comma":
                        advance()
                        continue
                    break
            continue
        if kw is not None:
            tok = eat_keyword()
            warn(f"{kw} frames are skipped", tok)
            skip_entry(tok)
            continue
        t = peek()
        raise ParseError(f"malformed frame near {t.value!r}",
                         line=t.line, col=t.col,
                         expected=tuple(sorted(_FRAME_KEYWORDS)))

    if namespace is None:
        namespace = (ontology_iri + "#") if ontology_iri else DEFAULT_NAMESPACE
    return declared, edges, namespace, prefixes


def parse_taxonomy(text: str, diagnostics: list[Diagnostic] | None = None,
                   source_name: str = "<ontology>") -> Taxonomy:
    """Build a Taxonomy from Manchester-subset source text.

    Only Prefix declarations, the Ontology header, and Class frames with
    named SubClassOf entries are interpreted; anything else produces a
    warning diagnostic.  Superclass targets that are never declared are
    declared implicitly.  Classes with no superclass entry get an edge to
    the top class; the top is the declared NeSy_Pattern_Element if
    present, else the unique root, else a fresh synthesized root.
    """
    decls, edge_names, namespace, prefixes = _parse_manchester(
        text, diagnostics, source_name)

    def to_ref(name: str) -> ClassRef:
        if name.startswith("<") and name.endswith(">"):
            return ClassRef.from_iri(name[1:-1])
        if ":" in name:
            pfx, local = name.split(":", 1)
            if pfx not in prefixes:
                raise UnknownClassError(f"undeclared prefix {pfx!r} in {name!r}")
            return ClassRef.from_iri(prefixes[pfx] + local)
        return ClassRef(namespace + name, name)

    refs: dict[str, ClassRef] = {}
    order: list[ClassRef] = []

    def intern(name: str) -> ClassRef:
        if name not in refs:
            refs[name] = to_ref(name)
            order.append(refs[name])
        return refs[name]

    declared = [intern(n) for n in decls]
    edges = {(intern(a), intern(b)) for a, b in edge_names}
    classes = set(order)

    top = next((c for c in order if c.local_name == TOP_LOCAL_NAME), None)
    if top is None:
        with_super = {sub for sub, _ in edges}
        roots = [c for c in order if c not in with_super]
        if len(roots) == 1 and classes:
            top = roots[0]
        else:
            top = ClassRef(namespace + TOP_LOCAL_NAME, TOP_LOCAL_NAME)
            classes.add(top)
    has_super = {sub for sub, _ in edges}
    for c in order:
        if c not in has_super and c != top:
            edges.add((c, top))
    return Taxonomy(classes, edges, top, namespace)


def _is_adjacent(a: _Tok, b: _Tok) -> bool:
    return a.line == b.line and a.col + len(a.value) == b.col
