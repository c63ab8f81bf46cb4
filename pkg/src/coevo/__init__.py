"""Co-evolution of an RDF source dataset and its replica.

Both sides evolve over the same timeframe; the engine propagates changes
between them with one of four strategies per predicate, detecting and
optionally resolving conflicting values with property-aware semantics.
"""
from .changeset import (
    Changeset, IngestError, apply, diff, inverse, load_changeset, load_changeset_folder,
    merge_changesets, normalize, write_changeset,
)
from .config import ConfigError, EngineConfig, load_config, parse_config
from .conflict import (
    CandidateValue, CaseTag, ConflictRecord, Origin, classify_case, conflicting_triples,
    conflicts_to_tsv, detect_conflicts, group_by_key,
)
from .engine import (
    ResolutionFailed, Strategy, StrategyAssignment, SyncOutcome, cdr, default_scenarios,
    report_to_tsv, run_scenarios, synchronize,
)
from .metrics import QualityReport, completeness, conciseness, consistency, percent, quality_report
from .rdf import (
    IRI, BlankNode, Dataset, Literal, ParseError, Triple, parse_ntriples, serialize_ntriples,
)
from .resolution import (
    FUNCTIONS, EmptyCandidates, MetadataMissing, NonNumericCandidate, Resolution,
    ResolutionError, ResolutionPolicy, ValueMetadata, parse_annotations, resolve,
)
from .semantics import (
    PropertyKind, PropertyProfile, Profiles, SchemaGraph, SimilarityConfig, SpecialRole,
    classes_disjoint, levenshtein, load_schema, normalized_label_similarity, objects_conflicting,
)

__version__ = "0.1.0"
