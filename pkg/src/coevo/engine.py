"""Strategy dispatch and conflict detection/resolution (CDR).

Strategies, applied per predicate partition:

I    target takes the source changeset, its own changes are dropped
II   each side applies only its own changeset
III  both sides merge both changesets and drop the conflicting triples X
IV   like III, then add back Y, the resolved values of X

For III and IV a side's result is ``((base \\ deletions) ∪ additions
\\ target tombstones \\ X) ∪ Y`` where deletions and additions come from both
changesets.
"""
from __future__ import annotations

import enum
import logging
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .changeset import Changeset, apply, diff, normalize
from .conflict import ConflictRecord, Origin, conflicting_triples, detect_conflicts
from .rdf import IRI, Dataset, Triple
from .resolution import (
    Resolution, ResolutionContext, ResolutionError, ResolutionPolicy,
    ValueMetadata, auto_select_policy, resolve,
)
from .semantics import Profiles, SchemaGraph, SimilarityConfig
from .vocab import DBO, DBP, FOAF, RDF_TYPE

log = logging.getLogger(__name__)


class Strategy(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"

    @classmethod
    def parse(cls, x) -> "Strategy":
        if isinstance(x, cls):
            return x
        text = str(x).strip().upper().removeprefix("STRATEGY").strip()
        text = {"1": "I", "2": "II", "3": "III", "4": "IV"}.get(text, text)
        return cls(text)


class ResolutionFailed(Exception):
    """A resolution function failed; carries the offending key."""

    def __init__(self, key: tuple, cause: Exception):
        s, p = key
        super().__init__(f"{s.n3()} {p.n3()}: {type(cause).__name__}: {cause}")
        self.key = key
        self.cause = cause


@dataclass(frozen=True)
class StrategyAssignment:
    default_strategy: Strategy = Strategy.IV
    per_predicate: Mapping = field(default_factory=dict)
    per_predicate_policy: Mapping = field(default_factory=dict)
    name: str = ""
    # used for strategy-IV predicates without their own policy; None = automatic
    default_policy: ResolutionPolicy | None = None

    def __post_init__(self):
        object.__setattr__(self, "default_strategy", Strategy.parse(self.default_strategy))
        object.__setattr__(self, "per_predicate", {
            _iri(p): Strategy.parse(s) for p, s in self.per_predicate.items()})
        object.__setattr__(self, "per_predicate_policy", {
            _iri(p): pol if isinstance(pol, ResolutionPolicy) else ResolutionPolicy(pol)
            for p, pol in self.per_predicate_policy.items()})

    def strategy_for(self, p: IRI) -> Strategy:
        return self.per_predicate.get(p, self.default_strategy)

    def describe(self) -> str:
        overrides = sorted((p.value, s.value) for p, s in self.per_predicate.items()
                           if s is not self.default_strategy)
        if not overrides:
            return self.default_strategy.value
        parts = [f"default={self.default_strategy.value}"]
        parts += [f"{p}={s}" for p, s in overrides]
        return ";".join(parts)


def _iri(p) -> IRI:
    return p if isinstance(p, IRI) else IRI(str(p))


@dataclass
class SyncStats:
    out_source_added: int = 0
    out_source_deleted: int = 0
    out_target_added: int = 0
    out_target_deleted: int = 0
    # None when no predicate went through strategy III or IV
    conflicting_triples: int | None = None
    resolved_keys: int = 0
    runtime_seconds: float = 0.0
    sync_required: bool = True


@dataclass
class SyncOutcome:
    source_after: Dataset
    target_after: Dataset
    out_source: Changeset
    out_target: Changeset
    conflicts: list
    resolutions: list
    stats: SyncStats
    removed_conflicting: frozenset = frozenset()
    added_resolved: frozenset = frozenset()
    warnings: list = field(default_factory=list)


class EngineContext(ResolutionContext):
    """Resolution context over one synchronization run."""

    def __init__(self, source_evolved: Dataset, target_evolved: Dataset, vote_pool: Dataset):
        super().__init__()
        self._sides = {"source": source_evolved, "target": target_evolved}
        self._pool = vote_pool
        self._freq: dict = {}
        self._absent: dict = {}
        self._subjects: set | None = None

    def value_frequency(self, predicate):
        freq = self._freq.get(predicate)
        if freq is None:
            freq = self._freq[predicate] = Counter(
                t.object for t in self._pool if t.predicate == predicate)
        return freq

    def absent_counts(self, predicate):
        out = self._absent.get(predicate)
        if out is None:
            if self._subjects is None:
                self._subjects = self._sides["source"].subjects() | self._sides["target"].subjects()
            out = {}
            for side, d in self._sides.items():
                having = {t.subject for t in d if t.predicate == predicate}
                out[side] = len(self._subjects - having)
            self._absent[predicate] = out
        return out

    def side_asserts(self, side, subject, attribute, value):
        return Triple(subject, attribute, value) in self._sides[side]


_ORDER_INDEX = {Origin.EXISTING: 0, Origin.SOURCE_ADDED: 1, Origin.TARGET_ADDED: 2}


def _metadata(record: ConflictRecord, source_evolved: Dataset, target_evolved: Dataset,
              annotations: Mapping | None) -> list:
    order: dict = {}
    for c in record.candidates:
        idx = _ORDER_INDEX.get(c.origin)
        if idx is not None and c.value in record.survivors:
            order[c.value] = min(order.get(c.value, idx), idx)
    out = []
    for v in record.survivors:
        t = Triple(record.subject, record.predicate, v)
        sides = frozenset(name for name, d in (("source", source_evolved), ("target", target_evolved))
                          if t in d)
        ann = annotations.get(t) if annotations else None
        out.append((v, ValueMetadata(
            v,
            timestamp=ann.timestamp if ann else None,
            quality_score=ann.quality_score if ann else None,
            source_name=ann.source_name if ann else None,
            order_index=order.get(v),
            sides=sides,
        )))
    return out


def _merged(base: Dataset, ds: Changeset, dt: Changeset) -> frozenset:
    return (((base.triples - ds.deleted.triples - dt.deleted.triples)
             | ds.added.triples | dt.added.triples) - dt.tombstones.triples)


@dataclass
class _PartResult:
    source: frozenset
    target: frozenset
    conflicts: list = field(default_factory=list)
    resolutions: list = field(default_factory=list)
    x: frozenset = frozenset()
    y: frozenset = frozenset()


def _cdr_part(s_ti, t_ti, ds, dt, resolve_flag, profiles, schema, cfg, policies,
              annotations, seed, default_policy=None) -> _PartResult:
    records = detect_conflicts(ds, dt, t_ti, profiles, schema, cfg)
    x = conflicting_triples(records)
    y: set = set()
    resolutions = []
    if resolve_flag and x:
        s_ev, t_ev = apply(s_ti, ds), apply(t_ti, dt)
        ctx = EngineContext(s_ev, t_ev, Dataset(t_ti.triples | ds.added.triples | dt.added.triples))
        todo = [r for r in records if r.semantically_conflicting]
        # chooseCorresponding reads choices made for other keys, so it goes last
        todo.sort(key=lambda r: _policy_for(r, policies, profiles, seed, default_policy).function
                  == "chooseCorresponding")
        for r in todo:
            policy = _policy_for(r, policies, profiles, seed, default_policy)
            cands = _metadata(r, s_ev, t_ev, annotations)
            try:
                res = resolve(cands, policy, profiles.get(r.predicate), ctx.for_key(r.key))
            except ResolutionError as exc:
                raise ResolutionFailed(r.key, exc) from exc
            if not res.synthesized:
                meta = dict(cands)
                ctx.record_choice(r.key, frozenset.intersection(*(meta[v].sides for v in res.kept)))
            resolutions.append((r.key, res))
            y.update(Triple(r.subject, r.predicate, v) for v in res.kept)
    source = (_merged(s_ti, ds, dt) - x) | y
    target = (_merged(t_ti, ds, dt) - x) | y
    return _PartResult(frozenset(source), frozenset(target), records, resolutions,
                       frozenset(x), frozenset(y))


def _policy_for(record, policies, profiles, seed, default=None) -> ResolutionPolicy:
    pol = policies.get(record.predicate, default)
    if pol is None:
        pol = auto_select_policy(profiles.get(record.predicate), record.survivors, seed)
    if pol.function == "any" and pol.rng_seed is None:
        pol = ResolutionPolicy("any", pol.params, seed)
    return pol


def _setup(profiles, schema, cfg):
    if schema is None:
        schema = profiles.schema if profiles is not None else SchemaGraph()
    if profiles is None:
        profiles = Profiles(schema=schema)
    return profiles, schema, cfg or SimilarityConfig()


def cdr(s_ti: Dataset, t_ti: Dataset, delta_s: Changeset, delta_t: Changeset,
        resolve_flag: bool, profiles: Profiles | None = None, schema: SchemaGraph | None = None,
        cfg: SimilarityConfig | None = None, *, policies: Mapping | None = None,
        default_policy: ResolutionPolicy | None = None,
        annotations: Mapping | None = None, seed: int = 0) -> SyncOutcome:
    """Conflict detection (and, with ``resolve_flag``, resolution) over all
    predicates: strategy III when the flag is off, IV when it is on."""
    start = time.perf_counter()
    profiles, schema, cfg = _setup(profiles, schema, cfg)
    ds, dt = normalize(delta_s), normalize(delta_t)
    part = _cdr_part(s_ti, t_ti, ds, dt, resolve_flag, profiles, schema, cfg,
                     {_iri(k): v if isinstance(v, ResolutionPolicy) else ResolutionPolicy(v)
                      for k, v in (policies or {}).items()}, annotations, seed,
                     default_policy)
    return _outcome(s_ti, t_ti, Dataset(part.source), Dataset(part.target), part.conflicts,
                    part.resolutions, part.x, part.y, len(part.x), start, [])


def _outcome(s_ti, t_ti, s_after, t_after, conflicts, resolutions, x, y, n_conflicting,
             start, warnings, required=True) -> SyncOutcome:
    out_s, out_t = diff(s_ti, s_after), diff(t_ti, t_after)
    stats = SyncStats(
        out_source_added=len(out_s.added), out_source_deleted=len(out_s.deleted),
        out_target_added=len(out_t.added), out_target_deleted=len(out_t.deleted),
        conflicting_triples=n_conflicting, resolved_keys=len(resolutions),
        runtime_seconds=time.perf_counter() - start, sync_required=required,
    )
    return SyncOutcome(s_after, t_after, out_s, out_t, conflicts, resolutions, stats,
                       frozenset(x), frozenset(y), warnings)


def check_requirements(s_ti: Dataset, t_ti: Dataset, ds: Changeset, dt: Changeset) -> list:
    """Warnings for violated inclusion (target ⊆ source) and for identical
    changesets, where no synchronization is needed."""
    warnings = []
    missing = len(t_ti.triples - s_ti.triples)
    if missing:
        warnings.append(f"initial inclusion violated: {missing} target triples not in source")
    if ds.added == dt.added and ds.deleted == dt.deleted:
        warnings.append("source and target changesets are identical; no synchronization required")
    return warnings


def synchronize(s_ti: Dataset, t_ti: Dataset, delta_s: Changeset, delta_t: Changeset,
                assign: StrategyAssignment | Strategy | str = Strategy.IV,
                profiles: Profiles | None = None, schema: SchemaGraph | None = None,
                cfg: SimilarityConfig | None = None, *, annotations: Mapping | None = None,
                seed: int = 0) -> SyncOutcome:
    """Synchronize source and target over one timeframe.

    Triples are partitioned by predicate and each partition is processed
    with the strategy assigned to its predicate.
    """
    start = time.perf_counter()
    if not isinstance(assign, StrategyAssignment):
        assign = StrategyAssignment(assign)
    profiles, schema, cfg = _setup(profiles, schema, cfg)
    ds, dt = normalize(delta_s), normalize(delta_t)
    warnings = check_requirements(s_ti, t_ti, ds, dt)
    for w in warnings:
        log.warning(w)
    if ds.added == dt.added and ds.deleted == dt.deleted:
        return _outcome(s_ti, t_ti, apply(s_ti, ds), apply(t_ti, dt), [], [], (), (), None,
                        start, warnings, required=False)

    preds = (s_ti.predicates() | t_ti.predicates() | ds.added.predicates()
             | ds.deleted.predicates() | dt.added.predicates() | dt.deleted.predicates())
    groups: dict = defaultdict(set)
    for p in preds:
        groups[assign.strategy_for(p)].add(p)
    uniform = len(groups) <= 1

    source: set = set()
    target: set = set()
    conflicts: list = []
    resolutions: list = []
    x: set = set()
    y: set = set()
    n_conflicting = None
    for strategy in Strategy:
        if strategy not in groups:
            continue
        P = groups[strategy]
        if uniform:
            s_p, t_p, ds_p, dt_p = s_ti, t_ti, ds, dt
        else:
            s_p, t_p, ds_p, dt_p = s_ti.restrict(P), t_ti.restrict(P), ds.restrict(P), dt.restrict(P)
        if strategy is Strategy.I:
            source |= apply(s_p, ds_p).triples
            target |= apply(t_p, ds_p).triples
        elif strategy is Strategy.II:
            source |= apply(s_p, ds_p).triples
            target |= apply(t_p, dt_p).triples
        else:
            part = _cdr_part(s_p, t_p, ds_p, dt_p, strategy is Strategy.IV, profiles, schema,
                             cfg, assign.per_predicate_policy, annotations, seed,
                             assign.default_policy)
            source |= part.source
            target |= part.target
            conflicts += part.conflicts
            resolutions += part.resolutions
            x |= part.x
            y |= part.y
            n_conflicting = (n_conflicting or 0) + len(part.x)
    conflicts.sort(key=lambda r: (r.subject.n3(), r.predicate.n3()))
    resolutions.sort(key=lambda kr: (kr[0][0].n3(), kr[0][1].n3()))
    return _outcome(s_ti, t_ti, Dataset(source), Dataset(target), conflicts, resolutions,
                    x, y, n_conflicting, start, warnings)


# -- scenarios ----------------------------------------------------------------

MIXED_SCENARIO_STRATEGY_I = (
    DBP + "party", DBO + "nationality", RDF_TYPE, FOAF + "name",
    DBO + "abstract", FOAF + "depiction",
)


def default_scenarios(policy: ResolutionPolicy | None = None) -> list:
    """The four uniform strategies plus the mixed scenario (dbp:office under
    IV, the six other sliced predicates under I)."""
    policy = policy or ResolutionPolicy("any")
    mixed = {DBP + "office": Strategy.IV}
    mixed.update({p: Strategy.I for p in MIXED_SCENARIO_STRATEGY_I})
    return [
        StrategyAssignment(Strategy.I, name="1"),
        StrategyAssignment(Strategy.II, name="2"),
        StrategyAssignment(Strategy.III, name="3"),
        StrategyAssignment(Strategy.IV, name="4"),
        StrategyAssignment(Strategy.I, per_predicate=mixed,
                           per_predicate_policy={DBP + "office": policy}, name="5"),
    ]


@dataclass
class ScenarioRow:
    name: str
    assignment: StrategyAssignment
    outcome: SyncOutcome
    quality: "QualityReport"


def run_scenarios(s_ti: Dataset, t_ti: Dataset, delta_s: Changeset, delta_t: Changeset,
                  scenarios: Sequence | None = None, profiles: Profiles | None = None,
                  schema: SchemaGraph | None = None, cfg: SimilarityConfig | None = None, *,
                  annotations: Mapping | None = None, seed: int = 0) -> list:
    """Run every scenario on the same inputs; one row per scenario."""
    from .metrics import quality_report

    profiles, schema, cfg = _setup(profiles, schema, cfg)
    ds, dt = normalize(delta_s), normalize(delta_t)
    scenarios = list(scenarios) if scenarios is not None else default_scenarios()
    all_records = detect_conflicts(ds, dt, t_ti, profiles, schema, cfg)
    rows = []
    for i, assign in enumerate(scenarios, 1):
        outcome = synchronize(s_ti, t_ti, ds, dt, assign, profiles, schema, cfg,
                              annotations=annotations, seed=seed)
        quality = quality_report(outcome, t_ti, ds, dt, all_records)
        rows.append(ScenarioRow(assign.name or str(i), assign, outcome, quality))
    return rows


REPORT_COLUMNS = (
    "scenario", "strategy", "out_source_added", "out_source_removed",
    "out_target_added", "out_target_removed", "conflicting_triples", "runtime_s",
    "completeness_source", "completeness_target", "consistency",
    "conciseness_before[T+dS+dT]", "conciseness_after[T+outS+outT]",
)


def report_to_tsv(rows: Iterable[ScenarioRow]) -> str:
    from .metrics import percent

    lines = ["\t".join(REPORT_COLUMNS)]
    for row in rows:
        st, q = row.outcome.stats, row.quality
        lines.append("\t".join([
            row.name, row.assignment.describe(),
            str(st.out_source_added), str(st.out_source_deleted),
            str(st.out_target_added), str(st.out_target_deleted),
            "-" if st.conflicting_triples is None else str(st.conflicting_triples),
            f"{st.runtime_seconds:.1f}",
            percent(q.completeness_source), percent(q.completeness_target),
            percent(q.consistency), percent(q.conciseness_before), percent(q.conciseness_after),
        ]))
    return "\n".join(lines) + "\n"
