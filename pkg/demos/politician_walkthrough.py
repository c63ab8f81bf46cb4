"""Walk through one politician record evolving on both sides.

Run from the repository root::

    python demos/politician_walkthrough.py
"""
# %%
from pathlib import Path

from coevo import (
    Profiles, PropertyProfile, ResolutionPolicy, StrategyAssignment, detect_conflicts,
    load_changeset, normalized_label_similarity, parse_ntriples, quality_report,
    serialize_ntriples, synchronize,
)
from coevo.rdf import IRI

DATA = Path(__file__).resolve().parent.parent / "tests" / "data" / "politician"
base = parse_ntriples((DATA / "base.nt").read_bytes())
ds = load_changeset(DATA / "source-changes")
dt = load_changeset(DATA / "target-changes")

print(f"base: {len(base)} triples")
print(f"source changeset: +{len(ds.added)} -{len(ds.deleted)}")
print(f"target changeset: +{len(dt.added)} -{len(dt.deleted)} ({len(dt.tombstones)} tombstone)")

# %% The target added and then removed the Freebase link: a tombstone.
for t in dt.tombstones:
    print("tombstone:", t.nt())

# %% How far apart are the two spellings of the name?
sim = normalized_label_similarity("Adrian Sanders", "Sanders, Adrian")
print(f"name similarity: {sim:.4f}")

# %% Property semantics decide what counts as a conflict.
BY = IRI("http://dbpedia.org/property/birthYear")
NAME = IRI("http://xmlns.com/foaf/0.1/name")
profiles = Profiles({
    BY: PropertyProfile(BY, "DatatypeProperty", functional=True),
    NAME: PropertyProfile(NAME, role="LabelLike", threshold=0.5),
})
for r in detect_conflicts(ds, dt, base, profiles):
    flag = "CONFLICT" if r.semantically_conflicting else "ok"
    print(f"{r.predicate.value:45} {r.case_tag.value:12} {flag}")

# %% The four strategies side by side.
for strategy in ("I", "II", "III"):
    out = synchronize(base, base, ds, dt, strategy, profiles)
    print(f"strategy {strategy}: target has {len(out.target_after)} triples")

assign = StrategyAssignment("IV", per_predicate_policy={BY: ResolutionPolicy("any", rng_seed=2)})
out = synchronize(base, base, ds, dt, assign, profiles)
print(f"strategy IV: target has {len(out.target_after)} triples")
for key, res in out.resolutions:
    print("  resolved", key[1].value, "->", [v.n3() for v in res.kept])

# %% Quality of the strategy IV result.
q = quality_report(out, base, ds, dt)
for name, value in q.as_dict().items():
    print(f"{name:22} {value} ({float(value):.2f})")

# %% The synchronized replica.
print(serialize_ntriples(out.target_after), end="")
