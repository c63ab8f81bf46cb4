"""Completeness, consistency and conciseness as exact ratios.

All metrics return :class:`fractions.Fraction` values in [0, 1]. An empty
denominator yields 1 and the :class:`QualityReport` lists the metric under
``vacuous``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .changeset import Changeset
from .conflict import ConflictRecord, conflicting_triples
from .rdf import Dataset


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(1) if den == 0 else Fraction(num, den)


def completeness(syncd: Dataset, initial: Dataset, changeset: Changeset) -> Fraction:
    """Share of ``initial ∪ changeset.added`` present in ``syncd``."""
    required = initial.triples | changeset.added.triples
    return _ratio(len(syncd.triples & required), len(required))


def consistency(syncd: Dataset, initial: Dataset, delta_s: Changeset, delta_t: Changeset,
                conflicts) -> Fraction:
    """Non-conflicting triples of ``syncd`` over ``initial ∪ δS+ ∪ δT+``.

    ``conflicts`` is a list of ConflictRecords or a set of conflicting triples.
    Only triples of the union count in the numerator, so values synthesized
    by mediating functions cannot push the ratio above 1.
    """
    union = initial.triples | delta_s.added.triples | delta_t.added.triples
    x = conflicts if isinstance(conflicts, (set, frozenset)) else conflicting_triples(conflicts)
    return _ratio(len((syncd.triples & union) - x), len(union))


def conciseness(triples: Iterable, unit: str = "triples") -> Fraction:
    """Unique triples over all triples of a collection with multiplicity.

    With ``unit="objects"`` the count is over object terms instead.
    """
    items = list(triples)
    if unit == "objects":
        items = [t.object for t in items]
    elif unit != "triples":
        raise ValueError(f"unit must be 'triples' or 'objects', not {unit!r}")
    return _ratio(len(set(items)), len(items))


def percent(x: Fraction) -> str:
    """Integer percent, halves rounded up."""
    return f"{int(x * 100 + Fraction(1, 2))}%"


@dataclass(frozen=True)
class QualityReport:
    completeness_source: Fraction
    completeness_target: Fraction
    consistency: Fraction
    conciseness_before: Fraction
    conciseness_after: Fraction
    vacuous: frozenset = field(default_factory=frozenset)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "completeness_source", "completeness_target", "consistency",
            "conciseness_before", "conciseness_after")}


def quality_report(outcome, initial: Dataset, delta_s: Changeset, delta_t: Changeset,
                   conflicts: list | None = None) -> QualityReport:
    """Metrics for the synchronized target.

    conciseness_before measures T ⊎ δS+ ⊎ δT+; conciseness_after measures
    T ⊎ outS+ ⊎ outT+, i.e. the same collection built from the changesets
    the engine sends back.
    """
    syncd = outcome.target_after
    conflicts = outcome.conflicts if conflicts is None else conflicts
    before = [*initial, *delta_s.added, *delta_t.added]
    after = [*initial, *outcome.out_source.added, *outcome.out_target.added]
    vacuous = set()
    if not (initial.triples | delta_s.added.triples):
        vacuous.add("completeness_source")
    if not (initial.triples | delta_t.added.triples):
        vacuous.add("completeness_target")
    if not (initial.triples | delta_s.added.triples | delta_t.added.triples):
        vacuous.add("consistency")
    if not before:
        vacuous.add("conciseness_before")
    if not after:
        vacuous.add("conciseness_after")
    return QualityReport(
        completeness(syncd, initial, delta_s),
        completeness(syncd, initial, delta_t),
        consistency(syncd, initial, delta_s, delta_t, conflicts),
        conciseness(before),
        conciseness(after),
        frozenset(vacuous),
    )
