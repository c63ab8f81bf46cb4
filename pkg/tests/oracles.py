"""Independent reference implementations used as test oracles.

Nothing here imports the engine's algorithms. Data types (IRI, Literal,
Triple) are shared; everything else is rebuilt from the definitions with
plain sets and loops, trading speed for obviousness.
"""
from __future__ import annotations

import functools
import itertools
import random

from coevo.rdf import IRI, BlankNode, Literal, Triple

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
OWL_SAMEAS = "http://www.w3.org/2002/07/owl#sameAs"


# -- changesets -----------------------------------------------------------

def naive_diff(old: set, new: set) -> tuple:
    return ({t for t in new if t not in old}, {t for t in old if t not in new})


def naive_apply(d: set, added: set, deleted: set) -> set:
    """Deletion wins over an addition of the same triple."""
    out = {t for t in d if t not in deleted}
    for t in added:
        if t not in deleted:
            out.add(t)
    return out


def apply_chain(d: set, steps) -> set:
    """Apply (added, deleted) pairs one after another."""
    for added, deleted in steps:
        d = naive_apply(d, added, deleted)
    return d


# -- string similarity ----------------------------------------------------

def naive_levenshtein(a: str, b: str) -> int:
    @functools.lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))
    return d(len(a), len(b))


def text_of(t) -> str:
    if isinstance(t, Literal):
        return t.lexical
    if isinstance(t, IRI):
        return t.value
    return t.label


# -- schema reasoning -----------------------------------------------------

class NaiveSchema:
    """Fixed-point closures over explicit edge lists."""

    def __init__(self, subclass=(), disjoint=(), same=(), different=()):
        self.subclass = set(subclass)
        self.disjoint = set(disjoint)
        self.same = set(same)
        self.different = set(different)
        self._sub = self._closure(self.subclass)
        self._eq = self._closure(self.same | {(b, a) for a, b in self.same})

    @staticmethod
    def _closure(edges) -> set:
        rel = set(edges)
        while True:
            extra = {(a, d) for a, b in rel for c, d in rel if b == c} - rel
            if not extra:
                return rel
            rel |= extra

    def supers(self, c) -> set:
        return {c} | {b for a, b in self._sub if a == c}

    def disjoint_classes(self, c1, c2) -> bool:
        if c1 == c2 or not isinstance(c1, IRI) or not isinstance(c2, IRI):
            return False
        return any((a, b) in self.disjoint or (b, a) in self.disjoint
                   for a in self.supers(c1) for b in self.supers(c2))

    def same_individual(self, a, b) -> bool:
        return a == b or (a, b) in self._eq

    def different_individuals(self, a, b) -> bool:
        ca = {a} | {y for x, y in self._eq if x == a}
        cb = {b} | {y for x, y in self._eq if x == b}
        return any((x, y) in self.different or (y, x) in self.different for x in ca for y in cb)

    def to_triples(self) -> set:
        rdfs = "http://www.w3.org/2000/01/rdf-schema#"
        owl = "http://www.w3.org/2002/07/owl#"
        out = {Triple(a, IRI(rdfs + "subClassOf"), b) for a, b in self.subclass}
        out |= {Triple(a, IRI(owl + "disjointWith"), b) for a, b in self.disjoint}
        out |= {Triple(a, IRI(owl + "sameAs"), b) for a, b in self.same}
        out |= {Triple(a, IRI(owl + "differentFrom"), b) for a, b in self.different}
        return out


# property settings as plain dicts: {"kind", "functional", "role", "threshold"}

def naive_conflicting(prop: dict, o1, o2, schema: NaiveSchema, default_threshold: float) -> bool:
    if o1 == o2:
        return False
    role = prop["role"]
    if role == "TypeAssertion":
        return schema.disjoint_classes(o1, o2)
    if role == "SameAsLike":
        return False
    if role == "LabelLike":
        thr = prop["threshold"] if prop["threshold"] is not None else default_threshold
        a, b = text_of(o1), text_of(o2)
        n = max(len(a), len(b))
        sim = 1.0 if n == 0 else 1.0 - naive_levenshtein(a, b) / n
        return sim >= thr
    if not prop["functional"]:
        return False
    literals = isinstance(o1, Literal) and isinstance(o2, Literal)
    if prop["kind"] == "DatatypeProperty" or (prop["kind"] == "Unknown" and literals):
        return True
    return schema.different_individuals(o1, o2) or not schema.same_individual(o1, o2)


def has_semantics(prop: dict) -> bool:
    return prop["functional"] or prop["role"] != "None"


# -- conflict detection and the case table ----------------------------------

def brute_force_records(S, T, s_add, s_del, t_add, t_del, props, schema, threshold) -> dict:
    """{(s, p): (tag, conflicting, survivors)} straight from the case table.

    Changesets are raw: a triple both added and deleted by the target is a
    target tombstone; deletion wins on both sides.
    """
    tomb = t_add & t_del
    a_s_all, a_t_all = s_add - s_del, t_add - t_del
    keys = {(t.subject, t.predicate) for t in a_s_all | a_t_all}
    out = {}
    for s, p in keys:
        def vals(ts):
            return {t.object for t in ts if t.subject == s and t.predicate == p}
        A_S, D_S, A_T, D_T, E, TB = (vals(x) for x in (a_s_all, s_del, a_t_all, t_del, T, tomb))
        surv = ((E - D_S - D_T) | A_S | A_T) - TB
        prop = props[p]
        if not has_semantics(prop):
            out[(s, p)] = ("AutoKeepAll", False, surv)
            continue

        def c(x, y):
            return naive_conflicting(prop, x, y, schema, threshold)

        conflicting = any(c(x, y) for x in surv for y in surv if x != y)
        live = surv
        matched = set()
        for o1 in A_S:
            for o2 in D_T:
                if not A_T and o1 not in D_T and o1 != o2 and c(o1, o2):
                    matched.add("CaseI")
            for o2 in D_S & D_T:
                if o1 != o2 and c(o1, o2):
                    matched.add("CaseII")
        for o1 in D_S & D_T:
            for o2 in A_T:
                if o1 != o2 and c(o1, o2):
                    matched.add("CaseIII")
        for o1 in A_S:
            for o2 in A_T:
                if (o1 not in D_S | D_T and o2 not in D_S | D_T
                        and o1 != o2 and c(o1, o2)):
                    matched.add("CaseIV")
        if D_S & D_T:
            for o2 in A_S & live:
                for o1 in A_T & live:
                    if o1 != o2 and c(o1, o2):
                        matched.add("CaseV")
        for o1 in A_S & D_T & live:
            for o2 in A_T & live:
                if o1 != o2 and c(o1, o2):
                    matched.add("CaseVI")
        for o1 in D_S & A_T & live:
            for o2 in A_S & live:
                if o1 != o2 and c(o1, o2):
                    matched.add("CaseVII")
        if conflicting:
            order = ["CaseV", "CaseVI", "CaseVII", "CaseIV"]
            tag = next((x for x in order if x in matched), "CaseIV")
        else:
            order = ["CaseI", "CaseII", "CaseIII"]
            tag = next((x for x in order if x in matched), "NoConflict")
        out[(s, p)] = (tag, conflicting, surv)
    return out



def naive_pick(function: str, s, p, surv, T, a_s, a_t) -> set:
    """Kept values for the deterministic selecting functions the equivalence
    test uses; ties go to the smallest N-Triples term."""
    ordered = sorted(surv, key=lambda o: o.n3())
    if function == "longest":
        best = max(len(text_of(o)) for o in ordered)
        return {next(o for o in ordered if len(text_of(o)) == best)}
    if function == "shortest":
        best = min(len(text_of(o)) for o in ordered)
        return {next(o for o in ordered if len(text_of(o)) == best)}
    if function == "first":
        def rank(o):
            if Triple(s, p, o) in T:
                return 0
            return 1 if Triple(s, p, o) in a_s else 2
        best = min(rank(o) for o in ordered)
        return {next(o for o in ordered if rank(o) == best)}
    raise ValueError(function)


def brute_force_sync(strategy, S, T, s_add, s_del, t_add, t_del, props, schema, threshold,
                     policies=None) -> tuple:
    """(source_after, target_after, X) for one uniform strategy."""
    tomb = t_add & t_del
    a_s, a_t = s_add - s_del, t_add - t_del
    if strategy == "I":
        return naive_apply(S, a_s, s_del), naive_apply(T, a_s, s_del), set()
    if strategy == "II":
        return naive_apply(S, a_s, s_del), naive_apply(T, a_t, t_del), set()
    recs = brute_force_records(S, T, s_add, s_del, t_add, t_del, props, schema, threshold)
    X = {Triple(s, p, o) for (s, p), (_, conf, surv) in recs.items() if conf for o in surv}
    Y = set()
    if strategy == "IV":
        for (s, p), (_, conf, surv) in recs.items():
            if conf:
                fn = (policies or {}).get(p, "longest")
                Y |= {Triple(s, p, o) for o in naive_pick(fn, s, p, surv, T, a_s, a_t)}

    def merged(base):
        return (({t for t in base if t not in s_del and t not in t_del} | a_s | a_t) - tomb)

    return (merged(S) - X) | Y, (merged(T) - X) | Y, X


def potential_conflict_keys(S, s_add, s_del, t_add, t_del) -> set:
    """Keys with a potential conflict read literally: x1 in the evolved source,
    x2 in the target changeset and not in the evolved source, objects differ."""
    s_after = naive_apply(S, s_add - s_del, s_del)
    keys = set()
    for x2 in t_add | t_del:
        if x2 in s_after:
            continue
        for x1 in s_after:
            if x1.subject == x2.subject and x1.predicate == x2.predicate and x1.object != x2.object:
                keys.add((x2.subject, x2.predicate))
    return keys


# -- random instances -----------------------------------------------------

EX = "http://example.org/"


def random_instance(rng: random.Random, max_triples: int = 40, max_preds: int = 4) -> dict:
    """A small random co-evolution problem with T ⊆ S and a random schema."""
    classes = [IRI(f"{EX}C{i}") for i in range(5)]
    people = [IRI(f"{EX}i{i}") for i in range(4)]
    literals = [Literal(x) for x in ("a", "ab", "abc", "b", "ba", "x")]
    literals += [Literal("1", IRI("http://www.w3.org/2001/XMLSchema#integer")),
                 Literal("2", IRI("http://www.w3.org/2001/XMLSchema#integer"))]
    subjects = [IRI(f"{EX}s{i}") for i in range(2)] + [BlankNode("b0")]
    pool = [IRI(f"{EX}p{i}") for i in range(3)] + [IRI(RDF_TYPE), IRI(OWL_SAMEAS)]
    preds = rng.sample(pool, rng.randint(1, max_preds))

    props = {}
    for p in preds:
        if p.value == RDF_TYPE:
            props[p] = {"kind": "ObjectProperty", "functional": False, "role": "TypeAssertion",
                        "threshold": None}
        elif p.value == OWL_SAMEAS:
            props[p] = {"kind": "ObjectProperty", "functional": False, "role": "SameAsLike",
                        "threshold": None}
        else:
            props[p] = {
                "kind": rng.choice(["DatatypeProperty", "ObjectProperty", "Unknown"]),
                "functional": rng.random() < 0.6,
                "role": rng.choice(["None", "None", "LabelLike"]),
                "threshold": rng.choice([None, 0.3, 0.6]),
            }

    def objects_for(p):
        if p.value == RDF_TYPE:
            return classes
        if p.value == OWL_SAMEAS:
            return people
        return literals + people[:2]

    universe = [Triple(s, p, o) for s in subjects for p in preds for o in objects_for(p)]
    rng.shuffle(universe)
    universe = universe[:max_triples]

    def subset(items, prob):
        # sorted, so the draw does not depend on set iteration order
        return {t for t in sorted(items, key=Triple.nt) if rng.random() < prob}

    T = subset(universe, 0.3)
    S = T | subset(universe, 0.15)
    s_del = subset(S, 0.3)
    s_add = subset(set(universe) - S, 0.3)
    t_del = subset(T, 0.3)
    t_add = subset(set(universe) - T, 0.3)
    # the target may delete a value it only heard of from the source (an
    # absent deletion); this is what makes Case VI reachable
    t_del |= subset(s_add, 0.15)
    # target tombstones: added and deleted within the timeframe
    tombs = subset(set(universe) - T, 0.1)
    t_add |= tombs
    t_del |= tombs

    subclass = {(a, b) for a in classes for b in classes if a != b and rng.random() < 0.12}
    disjoint = {(a, b) for a, b in itertools.combinations(classes, 2) if rng.random() < 0.25}
    same = {(a, b) for a, b in itertools.combinations(people, 2) if rng.random() < 0.2}
    different = {(a, b) for a, b in itertools.combinations(people, 2) if rng.random() < 0.2}
    schema = NaiveSchema(subclass, disjoint, same, different)
    return dict(S=S, T=T, s_add=s_add, s_del=s_del, t_add=t_add, t_del=t_del,
                props=props, schema=schema, threshold=rng.choice([0.3, 0.5, 0.8]))
