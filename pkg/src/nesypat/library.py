"""The Library: everything one parsed document declares."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownNameError
from .network import Network
from .pattern import Pattern
from .refinement import Refinement
from .taxonomy import Taxonomy


@dataclass
class Library:
    """Resolved content of one document.

    ``taxonomies`` is keyed by the normalized ontology-reference text of
    the data clauses that produced each taxonomy.  ``combine_defs`` maps a
    pattern name to the network it combines; such patterns appear in
    ``patterns`` only once they have been materialized (see
    ``colimit.evaluate_combines``), except when a later declaration of the
    same document already forced them.
    """

    taxonomies: dict[str, Taxonomy] = field(default_factory=dict)
    patterns: dict[str, Pattern] = field(default_factory=dict)
    refinements: dict[str, Refinement] = field(default_factory=dict)
    networks: dict[str, Network] = field(default_factory=dict)
    combine_defs: dict[str, str] = field(default_factory=dict)

    def has_pattern(self, name: str) -> bool:
        return name in self.patterns

    def pattern(self, name: str) -> Pattern:
        try:
            return self.patterns[name]
        except KeyError:
            raise UnknownNameError(f"unknown pattern {name!r}") from None
