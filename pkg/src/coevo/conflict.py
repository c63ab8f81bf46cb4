"""Conflict detection and case classification per (subject, predicate) key.

For every key touched by an addition on either side the candidate values are
gathered with their origin. The values that would survive a plain merge
(existing values not deleted on either side, plus both sides' additions,
minus target tombstones) are checked pairwise with the property semantics.
A key whose survivors contain a conflicting pair needs a resolution policy
(cases IV-VII); otherwise it either matches one of the straightforward cases
I-III, in which a deletion settled the conflict, or it is conflict-free.
"""
from __future__ import annotations

import enum
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .changeset import Changeset, normalize
from .rdf import IRI, Dataset, Term, Triple
from .semantics import Profiles, SchemaGraph, SimilarityConfig, objects_conflicting


class Origin(str, enum.Enum):
    EXISTING = "Existing"
    SOURCE_ADDED = "SourceAdded"
    TARGET_ADDED = "TargetAdded"
    SOURCE_DELETED = "SourceDeleted"
    TARGET_DELETED = "TargetDeleted"
    TARGET_TOMBSTONE = "TargetTombstone"


ORIGIN_ORDER = {o: i for i, o in enumerate(Origin)}


class CaseTag(str, enum.Enum):
    CASE_I = "CaseI"
    CASE_II = "CaseII"
    CASE_III = "CaseIII"
    CASE_IV = "CaseIV"
    CASE_V = "CaseV"
    CASE_VI = "CaseVI"
    CASE_VII = "CaseVII"
    NO_CONFLICT = "NoConflict"
    AUTO_KEEP_ALL = "AutoKeepAll"


FORCED_CASES = (CaseTag.CASE_I, CaseTag.CASE_II, CaseTag.CASE_III)
RESOLUTION_CASES = (CaseTag.CASE_V, CaseTag.CASE_VI, CaseTag.CASE_VII, CaseTag.CASE_IV)
# most specific first; used to pick one tag when several patterns match
CASE_PRECEDENCE = FORCED_CASES + RESOLUTION_CASES


class AmbiguousCase(Warning):
    """A key matched several case patterns; the precedence order decided."""


@dataclass(frozen=True, order=True)
class CandidateValue:
    value: Term = field(compare=False)
    origin: Origin = field(compare=False)
    _key: tuple = field(init=False, repr=False, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "origin", Origin(self.origin))
        object.__setattr__(self, "_key", (self.value.n3(), ORIGIN_ORDER[self.origin]))


@dataclass(frozen=True)
class ConflictRecord:
    subject: Term
    predicate: IRI
    candidates: tuple
    case_tag: CaseTag
    semantically_conflicting: bool
    survivors: tuple = ()
    matched_cases: tuple = ()

    @property
    def key(self) -> tuple:
        return (self.subject, self.predicate)

    @property
    def forced(self) -> bool:
        return self.case_tag in FORCED_CASES

    @property
    def ambiguous(self) -> bool:
        return len(self.matched_cases) > 1

    @property
    def reportable(self) -> bool:
        return self.case_tag not in (CaseTag.NO_CONFLICT, CaseTag.AUTO_KEEP_ALL)

    def member_triples(self) -> set:
        """Surviving triples of this key; they form X when the record conflicts."""
        return {Triple(self.subject, self.predicate, v) for v in self.survivors}

    def values(self, *origins) -> set:
        wanted = {Origin(o) for o in origins}
        return {c.value for c in self.candidates if c.origin in wanted}


def _term_key(t: Term) -> str:
    return t.n3()


def group_by_key(delta_s: Changeset, delta_t: Changeset, base: Dataset,
                 predicates: Iterable | None = None) -> dict:
    """Candidate values per (subject, predicate) for every key with an
    addition on either side. ``base`` supplies the existing values."""
    delta_s, delta_t = normalize(delta_s), normalize(delta_t)
    keep = None if predicates is None else set(predicates)

    def wanted(t: Triple) -> bool:
        return keep is None or t.predicate in keep

    keys = {t.key for t in delta_s.added if wanted(t)}
    keys |= {t.key for t in delta_t.added if wanted(t)}
    if not keys:
        return {}
    groups: dict = defaultdict(set)

    def add(triples, origin, exclude=frozenset()):
        for t in triples:
            k = (t.subject, t.predicate)
            if k in keys and t not in exclude:
                groups[k].add(CandidateValue(t.object, origin))

    tombs = delta_t.tombstones.triples
    add(delta_s.added, Origin.SOURCE_ADDED)
    add(delta_s.deleted, Origin.SOURCE_DELETED)
    add(delta_t.added, Origin.TARGET_ADDED)
    add(delta_t.deleted, Origin.TARGET_DELETED, exclude=tombs)
    add(tombs, Origin.TARGET_TOMBSTONE)
    add(base, Origin.EXISTING)
    return {k: sorted(v) for k, v in groups.items()}


@dataclass
class _Analysis:
    tag: CaseTag
    matched: tuple
    survivors: tuple
    conflicting: bool


def _split(candidates) -> dict:
    sets = {o: set() for o in Origin}
    for c in candidates:
        sets[c.origin].add(c.value)
    return sets


def _distinct(a, b) -> bool:
    return a != b


def _analyse(candidates, conflicting: Callable = _distinct) -> _Analysis:
    v = _split(candidates)
    a_s, d_s = v[Origin.SOURCE_ADDED], v[Origin.SOURCE_DELETED]
    a_t, tomb = v[Origin.TARGET_ADDED], v[Origin.TARGET_TOMBSTONE]
    d_t = v[Origin.TARGET_DELETED] | tomb
    existing = v[Origin.EXISTING]

    survivors = ((existing - d_s - d_t) | a_s | a_t) - tomb
    ordered = tuple(sorted(survivors, key=_term_key))
    sem = any(conflicting(x, y) for x, y in itertools.combinations(ordered, 2))

    def witness(left, right) -> bool:
        return any(x != y and conflicting(x, y) for x in left for y in right)

    both_deleted = d_s & d_t
    untouched_s = a_s - d_s - d_t
    untouched_t = a_t - d_s - d_t
    matched = []
    if not a_t and witness(a_s - d_t, d_t):
        matched.append(CaseTag.CASE_I)
    if witness(a_s, both_deleted):
        matched.append(CaseTag.CASE_II)
    if witness(both_deleted, a_t):
        matched.append(CaseTag.CASE_III)
    if both_deleted and witness(a_t & survivors, a_s & survivors):
        matched.append(CaseTag.CASE_V)
    if witness((a_s & d_t) & survivors, a_t & survivors):
        matched.append(CaseTag.CASE_VI)
    if witness((d_s & a_t) & survivors, a_s & survivors):
        matched.append(CaseTag.CASE_VII)
    if witness(untouched_s & survivors, untouched_t & survivors):
        matched.append(CaseTag.CASE_IV)

    allowed = RESOLUTION_CASES if sem else FORCED_CASES
    tag = next((c for c in CASE_PRECEDENCE if c in allowed and c in matched), None)
    if tag is None:
        # a conflict among survivors that no specific pattern explains is an
        # addition clashing with an existing value: the general case IV
        tag = CaseTag.CASE_IV if sem else CaseTag.NO_CONFLICT
    return _Analysis(tag, tuple(matched), ordered, sem)


def classify_case(candidates, conflicting: Callable | None = None) -> CaseTag:
    """Case tag for one key's candidates.

    ``conflicting(o1, o2)`` is the semantic check; by default any two
    distinct values conflict, which makes the classification purely
    structural.
    """
    return _analyse(candidates, conflicting or _distinct).tag


def detect_conflicts(delta_s: Changeset, delta_t: Changeset, base: Dataset,
                     profiles: Profiles | None = None, schema: SchemaGraph | None = None,
                     cfg: SimilarityConfig | None = None,
                     predicates: Iterable | None = None) -> list:
    """One :class:`ConflictRecord` per key touched by an addition, sorted by
    (subject, predicate)."""
    schema = schema if schema is not None else (profiles.schema if profiles else SchemaGraph())
    profiles = profiles if profiles is not None else Profiles(schema=schema)
    cfg = cfg or SimilarityConfig()
    groups = group_by_key(delta_s, delta_t, base, predicates)
    records = []
    for (s, p), cands in groups.items():
        prof = profiles.get(p)
        if prof.has_semantics:
            check = lambda x, y, prof=prof: objects_conflicting(prof, x, y, schema, cfg)  # noqa: E731
            res = _analyse(cands, check)
            tag = res.tag
        else:
            res = _analyse(cands, lambda x, y: False)
            tag = CaseTag.AUTO_KEEP_ALL
        records.append(ConflictRecord(s, p, tuple(cands), tag, res.conflicting,
                                      res.survivors, res.matched))
    records.sort(key=lambda r: (r.subject.n3(), r.predicate.n3()))
    return records


def conflicting_triples(records: Iterable[ConflictRecord]) -> set:
    """X: every surviving triple of a semantically conflicting record."""
    out: set = set()
    for r in records:
        if r.semantically_conflicting:
            out |= r.member_triples()
    return out


TSV_HEADER = ("subject", "predicate", "case", "semantically_conflicting",
              "matched_cases", "candidates...")


def conflicts_to_tsv(records: Iterable[ConflictRecord], only_reportable: bool = True) -> str:
    """Line-oriented report; one row per record, one trailing column per
    candidate written as ``<Origin> <term>``."""
    lines = ["\t".join(TSV_HEADER)]
    for r in records:
        if only_reportable and not r.reportable:
            continue
        row = [r.subject.n3(), r.predicate.n3(), r.case_tag.value,
               "true" if r.semantically_conflicting else "false",
               ",".join(c.value for c in r.matched_cases) or "-"]
        row += [f"{c.origin.value} {c.value.n3()}" for c in r.candidates]
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"
