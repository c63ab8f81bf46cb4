"""Property semantics used to decide whether two differing objects conflict."""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping

from .rdf import IRI, BlankNode, Dataset, Literal, Term
from .vocab import (
    OWL_DATATYPE_PROPERTY, OWL_DIFFERENTFROM, OWL_DISJOINTWITH,
    OWL_FUNCTIONAL_PROPERTY, OWL_OBJECT_PROPERTY, OWL_SAMEAS, RDF_TYPE,
    RDFS_LABEL, RDFS_SUBCLASSOF,
)


class PropertyKind(str, enum.Enum):
    DATATYPE = "DatatypeProperty"
    OBJECT = "ObjectProperty"
    UNKNOWN = "Unknown"


class SpecialRole(str, enum.Enum):
    NONE = "None"
    TYPE_ASSERTION = "TypeAssertion"
    LABEL_LIKE = "LabelLike"
    SAME_AS_LIKE = "SameAsLike"


_FIXED_ROLES = {
    RDF_TYPE: SpecialRole.TYPE_ASSERTION,
    OWL_SAMEAS: SpecialRole.SAME_AS_LIKE,
}


@dataclass(frozen=True)
class PropertyProfile:
    iri: IRI
    kind: PropertyKind = PropertyKind.UNKNOWN
    functional: bool = False
    role: SpecialRole = SpecialRole.NONE
    # per-property label similarity threshold; None falls back to the config
    threshold: float | None = None

    def __post_init__(self):
        if isinstance(self.iri, str):
            object.__setattr__(self, "iri", IRI(self.iri))
        object.__setattr__(self, "kind", PropertyKind(self.kind))
        object.__setattr__(self, "role", SpecialRole(self.role))
        fixed = _FIXED_ROLES.get(self.iri.value)
        if fixed is not None and self.role is not fixed:
            if self.role is SpecialRole.NONE:
                object.__setattr__(self, "role", fixed)
            else:
                raise ValueError(f"{self.iri.value} must have role {fixed.value}")
        if self.threshold is not None and not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")

    @property
    def has_semantics(self) -> bool:
        """False when values for this property simply coexist."""
        return self.functional or self.role is not SpecialRole.NONE


@dataclass(frozen=True)
class SimilarityConfig:
    label_similarity_threshold: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.label_similarity_threshold <= 1.0:
            raise ValueError("label_similarity_threshold must be in [0, 1]")


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        parent = self.parent
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # deterministic representative regardless of insertion order
            lo, hi = sorted((ra, rb), key=_term_sort_key)
            self.parent[hi] = lo


def _term_sort_key(t: Term) -> str:
    return t.n3()


class SchemaGraph:
    """Class taxonomy, disjointness, property characteristics and individual
    identity (owl:sameAs / owl:differentFrom) extracted from a schema dataset."""

    def __init__(self):
        self.subclass_of: dict = defaultdict(set)
        self.disjoint_with: dict = defaultdict(set)
        self.functional_properties: set = set()
        self.datatype_properties: set = set()
        self.object_properties: set = set()
        self._same = _UnionFind()
        self._different_raw: set = set()
        self._different: set | None = None
        self._ancestors: dict = {}

    @property
    def classes(self) -> set:
        out = set(self.subclass_of) | set(self.disjoint_with)
        for sups in self.subclass_of.values():
            out |= sups
        return out

    def add_subclass(self, sub: IRI, sup: IRI):
        self.subclass_of[sub].add(sup)
        self._ancestors.clear()

    def add_disjoint(self, a: IRI, b: IRI):
        self.disjoint_with[a].add(b)
        self.disjoint_with[b].add(a)

    def add_same_as(self, a: Term, b: Term):
        self._same.union(a, b)
        self._different = None

    def add_different_from(self, a: Term, b: Term):
        self._different_raw.add((a, b))
        self._different = None

    def ancestors(self, c: IRI) -> frozenset:
        """Reflexive-transitive superclasses of ``c``."""
        cached = self._ancestors.get(c)
        if cached is not None:
            return cached
        seen = {c}
        stack = [c]
        while stack:
            for sup in self.subclass_of.get(stack.pop(), ()):
                if sup not in seen:
                    seen.add(sup)
                    stack.append(sup)
        result = frozenset(seen)
        self._ancestors[c] = result
        return result

    def subclass_closure(self) -> set:
        """All (sub, super) pairs of the reflexive-transitive closure."""
        return {(c, a) for c in self.classes for a in self.ancestors(c)}

    def same_individual(self, a: Term, b: Term) -> bool:
        return a == b or self._same.find(a) == self._same.find(b)

    def different_individuals(self, a: Term, b: Term) -> bool:
        if self._different is None:
            find = self._same.find
            self._different = {frozenset((find(x), find(y))) for x, y in self._different_raw}
        find = self._same.find
        return frozenset((find(a), find(b))) in self._different


def load_schema(d: Dataset | None) -> SchemaGraph:
    """Extract subclass, disjointness, property typing and identity assertions."""
    g = SchemaGraph()
    if d is None:
        return g
    for t in d:
        p = t.predicate.value
        s, o = t.subject, t.object
        if p == RDFS_SUBCLASSOF and isinstance(s, IRI) and isinstance(o, IRI):
            g.add_subclass(s, o)
        elif p == OWL_DISJOINTWITH and isinstance(s, IRI) and isinstance(o, IRI):
            g.add_disjoint(s, o)
        elif p == RDF_TYPE and isinstance(s, IRI) and isinstance(o, IRI):
            if o.value == OWL_FUNCTIONAL_PROPERTY:
                g.functional_properties.add(s)
            elif o.value == OWL_DATATYPE_PROPERTY:
                g.datatype_properties.add(s)
            elif o.value == OWL_OBJECT_PROPERTY:
                g.object_properties.add(s)
        elif p == OWL_SAMEAS:
            g.add_same_as(s, o)
        elif p == OWL_DIFFERENTFROM:
            g.add_different_from(s, o)
    return g


def classes_disjoint(g: SchemaGraph, c1: Term, c2: Term) -> bool:
    """True iff some superclass of ``c1`` is declared disjoint with some
    superclass of ``c2``. Unknown classes are never disjoint."""
    if c1 == c2 or not isinstance(c1, IRI) or not isinstance(c2, IRI):
        return False
    known = g.classes
    if c1 not in known or c2 not in known:
        return False
    anc2 = g.ancestors(c2)
    for a in g.ancestors(c1):
        if g.disjoint_with.get(a, set()) & anc2:
            return True
    return False


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalized_label_similarity(a: str, b: str) -> float:
    """``1 - levenshtein(a, b) / max(len(a), len(b))``; two empty strings give 1."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _text(t: Term) -> str:
    if isinstance(t, Literal):
        return t.lexical
    if isinstance(t, IRI):
        return t.value
    return t.label


def objects_conflicting(p: PropertyProfile, o1: Term, o2: Term, g: SchemaGraph,
                        cfg: SimilarityConfig = SimilarityConfig()) -> bool:
    """Semantic verdict on two differing objects of the same (subject, p)."""
    if o1 == o2:
        return False
    role = p.role
    if role is SpecialRole.TYPE_ASSERTION:
        return classes_disjoint(g, o1, o2)
    if role is SpecialRole.SAME_AS_LIKE:
        return False
    if role is SpecialRole.LABEL_LIKE:
        threshold = p.threshold if p.threshold is not None else cfg.label_similarity_threshold
        return normalized_label_similarity(_text(o1), _text(o2)) >= threshold
    if not p.functional:
        return False
    both_literals = isinstance(o1, Literal) and isinstance(o2, Literal)
    if p.kind is PropertyKind.DATATYPE or (p.kind is PropertyKind.UNKNOWN and both_literals):
        return True
    return g.different_individuals(o1, o2) or not g.same_individual(o1, o2)


class Profiles:
    """Profile lookup: explicit overrides first, then schema-derived defaults.

    Properties nobody knows about are non-functional with no special role, so
    their values coexist.
    """

    def __init__(self, overrides: Mapping | None = None, schema: SchemaGraph | None = None):
        self.schema = schema if schema is not None else SchemaGraph()
        self._overrides: dict = {}
        for key, prof in (overrides or {}).items():
            iri = key if isinstance(key, IRI) else IRI(key)
            self._overrides[iri] = prof
        self._cache: dict = {}

    def get(self, p: IRI) -> PropertyProfile:
        prof = self._overrides.get(p)
        if prof is not None:
            return prof
        prof = self._cache.get(p)
        if prof is None:
            prof = self._cache[p] = self._derive(p)
        return prof

    __getitem__ = get

    def _derive(self, p: IRI) -> PropertyProfile:
        s = self.schema
        if p in s.datatype_properties:
            kind = PropertyKind.DATATYPE
        elif p in s.object_properties:
            kind = PropertyKind.OBJECT
        else:
            kind = PropertyKind.UNKNOWN
        role = _FIXED_ROLES.get(p.value, SpecialRole.NONE)
        if p.value == RDFS_LABEL:
            role = SpecialRole.LABEL_LIKE
        return PropertyProfile(p, kind, p in s.functional_properties, role)
