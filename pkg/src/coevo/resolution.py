"""Conflict-resolution functions and automatic policy selection.

Deciding and avoiding functions keep a subset of the candidates; mediating
functions (average, median, sum, stdDev, variance) and concatenation
synthesize one new literal. Canonical term order (the N-Triples form) breaks
every tie.
"""
from __future__ import annotations

import csv
import io
import re
import statistics
from dataclasses import dataclass, field
from datetime import datetime
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Iterable, Mapping

from .rdf import IRI, BlankNode, Literal, Term, Triple, parse_term
from .vocab import NUMERIC_DATATYPES, XSD_DECIMAL, XSD_STRING

MASK64 = (1 << 64) - 1


class ResolutionError(Exception):
    """Base class for failures while resolving one key."""


class MetadataMissing(ResolutionError):
    pass


class NonNumericCandidate(ResolutionError):
    pass


class EmptyCandidates(ResolutionError):
    pass


# -- deterministic RNG ---------------------------------------------------

def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & MASK64
    return h


class XorShift64Star:
    """xorshift64* (shifts 12/25/27, multiplier 0x2545F4914F6CDD1D).

    The seed is scrambled with splitmix64 so that small seeds give
    well-mixed, nonzero states.
    """

    MULTIPLIER = 0x2545F4914F6CDD1D

    def __init__(self, seed: int):
        self.state = splitmix64(seed & MASK64) or 0x9E3779B97F4A7C15

    def next(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * self.MULTIPLIER) & MASK64

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next()
            if r < limit:
                return r % n


def key_seed(seed: int, key: tuple | None) -> int:
    """Per-key seed: the policy seed mixed with a stable hash of (s, p)."""
    if not key:
        return seed & MASK64
    text = " ".join(t.n3() for t in key).encode("utf-8")
    return (seed ^ fnv1a64(text)) & MASK64


# -- policy / metadata types ----------------------------------------------

FUNCTIONS = (
    "any", "bestSource", "globalVote", "first", "latest", "threshold", "best",
    "topN", "stdDev", "variance", "average", "median", "sum", "concatenation",
    "longest", "shortest", "max", "min", "chooseDepending",
    "chooseCorresponding", "mostComplete",
)
MEDIATING = frozenset({"stdDev", "variance", "average", "median", "sum"})
SYNTHESIZING = MEDIATING | {"concatenation"}
# starred in the policy catalog: they only work with metadata
REQUIRES_METADATA = frozenset({"first", "latest", "threshold", "best", "topN",
                               "chooseDepending", "mostComplete"})
_REQUIRED_PARAMS = {
    "bestSource": ("preferred",),
    "threshold": ("threshold",),
    "topN": ("n",),
    "chooseDepending": ("attribute", "value"),
    "chooseCorresponding": ("attribute",),
}
_BY_LOWER = {name.lower(): name for name in FUNCTIONS}
_BY_LOWER.update({"best_source": "bestSource", "global_vote": "globalVote",
                  "top_n": "topN", "std_dev": "stdDev", "stddev": "stdDev",
                  "choose_depending": "chooseDepending",
                  "choose_corresponding": "chooseCorresponding",
                  "most_complete": "mostComplete", "concat": "concatenation"})


def canonical_function_name(name: str) -> str:
    try:
        return _BY_LOWER[name.replace("-", "_").lower()] if name not in FUNCTIONS else name
    except KeyError:
        raise ValueError(f"unknown resolution function {name!r}") from None


@dataclass(frozen=True)
class ResolutionPolicy:
    function: str
    params: Mapping = field(default_factory=dict)
    rng_seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "function", canonical_function_name(self.function))
        object.__setattr__(self, "params", dict(self.params))
        missing = [p for p in _REQUIRED_PARAMS.get(self.function, ()) if p not in self.params]
        if missing:
            raise ValueError(f"{self.function} requires params {missing}")

    def __hash__(self):
        return hash((self.function, tuple(sorted(self.params.items(), key=str)), self.rng_seed))

    def __str__(self):
        return self.function


@dataclass(frozen=True)
class ValueMetadata:
    value: Term
    timestamp: datetime | None = None
    quality_score: float | None = None
    source_name: str | None = None
    order_index: int | None = None
    # which evolved datasets ("source", "target") assert the value
    sides: frozenset = frozenset()

    def __post_init__(self):
        q = self.quality_score
        if q is not None and not 0.0 <= q <= 1.0:
            raise ValueError(f"quality score {q} outside [0, 1]")


@dataclass(frozen=True)
class Resolution:
    kept: tuple
    dropped: tuple
    policy: ResolutionPolicy
    synthesized: bool = False

    def __post_init__(self):
        if not self.kept:
            raise EmptyCandidates("resolution kept nothing")


class ResolutionContext:
    """Run-wide information some functions need beyond the candidates.

    Engine-built contexts answer frequency, completeness, side-assertion and
    previous-choice queries; the base class answers none of them.
    """

    def __init__(self, key: tuple | None = None):
        self.key = key
        self.chosen_sides: dict = {}

    def for_key(self, key: tuple) -> "ResolutionContext":
        ctx = object.__new__(type(self))
        ctx.__dict__.update(self.__dict__)
        ctx.key = key
        return ctx

    def value_frequency(self, predicate: IRI) -> Mapping:
        raise MetadataMissing("globalVote needs value frequencies for the predicate")

    def absent_counts(self, predicate: IRI) -> Mapping:
        raise MetadataMissing("mostComplete needs per-side completeness counts")

    def side_asserts(self, side: str, subject: Term, attribute: IRI, value: Term) -> bool:
        raise MetadataMissing("chooseDepending needs the evolved side datasets")

    def record_choice(self, key: tuple, sides: frozenset):
        self.chosen_sides[key] = sides


# -- value helpers --------------------------------------------------------

_NUM_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_YEAR_RE = re.compile(r"(-?\d{4,})(?:Z|[+-]\d{2}:\d{2})?")


def numeric_value(t: Term) -> Fraction | None:
    """Exact numeric value of a literal with a numeric (or untyped string)
    lexical form; None for anything else."""
    if not isinstance(t, Literal) or t.language is not None:
        return None
    dt = t.datatype.value
    if dt not in NUMERIC_DATATYPES and dt != XSD_STRING:
        return None
    lex = t.lexical.strip()
    if _NUM_RE.fullmatch(lex):
        return Fraction(Decimal(lex))
    m = _YEAR_RE.fullmatch(lex)
    if m:
        return Fraction(int(m.group(1)))
    return None


def format_decimal(x: Fraction | Decimal) -> str:
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        with localcontext() as ctx:
            ctx.prec = 28
            x = Decimal(x.numerator) / Decimal(x.denominator)
    text = format(x, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _decimal_literal(x) -> Literal:
    return Literal(format_decimal(x), IRI(XSD_DECIMAL))


def term_text(t: Term) -> str:
    if isinstance(t, Literal):
        return t.lexical
    if isinstance(t, IRI):
        return t.value
    return t.label


def _ck(t: Term) -> str:
    return t.n3()


# -- resolve --------------------------------------------------------------

def _normalize_candidates(candidates) -> list:
    """Deduplicate into (term, metadata) pairs in canonical term order."""
    seen: dict = {}
    for c in candidates:
        if isinstance(c, tuple):
            term, meta = c
        elif isinstance(c, ValueMetadata):
            term, meta = c.value, c
        else:
            term, meta = c, None
        if meta is None:
            meta = ValueMetadata(term)
        if term not in seen:
            seen[term] = meta
    return sorted(seen.items(), key=lambda kv: _ck(kv[0]))


def _numbers(cands) -> list:
    out = []
    for term, _ in cands:
        v = numeric_value(term)
        if v is None:
            raise NonNumericCandidate(f"not numeric: {term.n3()}")
        out.append(v)
    return out


def _need(cands, attr: str, fn: str):
    for term, meta in cands:
        if getattr(meta, attr) is None:
            raise MetadataMissing(f"{fn} needs {attr} for {term.n3()}")


def _pick_one(cands, key) -> list:
    """Best candidate by ``key`` (larger wins); canonical order breaks ties."""
    best = max(key(m) for _, m in cands)
    return [next(t for t, m in cands if key(m) == best)]


def _require_sides(fn, cands):
    if any(not m.sides for _, m in cands):
        raise MetadataMissing(f"{fn} needs the side each candidate came from")


def resolve(candidates: Iterable, policy: ResolutionPolicy, profile=None,
            context: ResolutionContext | None = None, key: tuple | None = None) -> Resolution:
    """Apply ``policy`` to the candidate values of one key.

    ``candidates`` holds Terms, ValueMetadata, or (Term, ValueMetadata)
    pairs. ``key`` (subject, predicate) defaults to the context's key; it
    seeds ``any`` and scopes the cross-key functions.
    """
    cands = _normalize_candidates(candidates)
    if not cands:
        raise EmptyCandidates("no candidates")
    terms = [t for t, _ in cands]
    if key is None and context is not None:
        key = context.key
    fn = policy.function
    if len(cands) == 1:
        return Resolution(tuple(terms), (), policy)

    synthesized = None
    kept: list
    if fn == "any":
        rng = XorShift64Star(key_seed(policy.rng_seed or 0, key))
        kept = [terms[rng.below(len(terms))]]
    elif fn == "bestSource":
        pref = policy.params["preferred"]
        kept = [t for t, m in cands if m.source_name == pref or pref in m.sides][:1]
        if not kept:
            raise EmptyCandidates(f"no candidate from preferred source {pref!r}")
    elif fn == "globalVote":
        if context is None or key is None:
            raise MetadataMissing("globalVote needs a resolution context")
        freq = context.value_frequency(key[1])
        kept = _pick_one(cands, lambda m: freq.get(m.value, 0))
    elif fn == "first":
        _need(cands, "order_index", fn)
        kept = _pick_one(cands, lambda m: -m.order_index)
    elif fn == "latest":
        _need(cands, "timestamp", fn)
        kept = _pick_one(cands, lambda m: m.timestamp)
    elif fn in ("threshold", "best", "topN"):
        _need(cands, "quality_score", fn)
        if fn == "threshold":
            limit = float(policy.params["threshold"])
            kept = [t for t, m in cands if m.quality_score > limit]
            if not kept:
                raise EmptyCandidates(f"no candidate scores above {limit}")
        elif fn == "best":
            kept = _pick_one(cands, lambda m: m.quality_score)
        else:
            n = int(policy.params["n"])
            if n < 1:
                raise ValueError("topN needs n >= 1")
            ranked = sorted(cands, key=lambda c: -c[1].quality_score)  # stable: canonical within ties
            kept = [t for t, _ in ranked[:n]]
    elif fn in MEDIATING:
        nums = _numbers(cands)
        if fn == "average":
            synthesized = statistics.mean(nums)
        elif fn == "median":
            synthesized = statistics.median(nums)
        elif fn == "sum":
            synthesized = sum(nums, Fraction(0))
        elif fn == "variance":
            synthesized = statistics.pvariance(nums)
        else:
            var = statistics.pvariance(nums)
            with localcontext() as ctx:
                ctx.prec = 28
                synthesized = (Decimal(var.numerator) / Decimal(var.denominator)).sqrt()
        synthesized = _decimal_literal(synthesized)
    elif fn == "concatenation":
        synthesized = Literal("; ".join(term_text(t) for t in terms))
    elif fn in ("longest", "shortest"):
        sign = 1 if fn == "longest" else -1
        kept = _pick_one(cands, lambda m: sign * len(term_text(m.value)))
    elif fn in ("max", "min"):
        nums = dict(zip(terms, _numbers(cands)))
        sign = 1 if fn == "max" else -1
        kept = _pick_one(cands, lambda m: sign * nums[m.value])
    elif fn == "chooseDepending":
        if context is None or key is None:
            raise MetadataMissing("chooseDepending needs a resolution context")
        _require_sides(fn, cands)
        attr = _as_iri(policy.params["attribute"])
        want = _as_term(policy.params["value"])
        kept = [t for t, m in cands
                if any(context.side_asserts(side, key[0], attr, want) for side in sorted(m.sides))]
        if not kept:
            raise EmptyCandidates(f"no side asserts {attr.n3()} {want.n3()}")
    elif fn == "chooseCorresponding":
        attr = _as_iri(policy.params["attribute"])
        chosen = None if context is None or key is None else context.chosen_sides.get((key[0], attr))
        if chosen is None:
            raise MetadataMissing(f"no value chosen yet for {attr.n3()}")
        kept = [t for t, m in cands if m.sides & chosen]
        if not kept:
            raise EmptyCandidates(f"no candidate from the side chosen for {attr.n3()}")
    elif fn == "mostComplete":
        if context is None or key is None:
            raise MetadataMissing("mostComplete needs a resolution context")
        _require_sides(fn, cands)
        absent = context.absent_counts(key[1])
        # ties go to the target
        side = min(("target", "source"), key=lambda s: absent.get(s, 0))
        kept = [t for t, m in cands if side in m.sides]
        if not kept:
            raise EmptyCandidates(f"no candidate from the {side} side")
    else:  # pragma: no cover - guarded by canonical_function_name
        raise ValueError(fn)

    if synthesized is not None:
        return Resolution((synthesized,), tuple(terms), policy, synthesized=True)
    kept_set = set(kept)
    return Resolution(tuple(kept), tuple(t for t in terms if t not in kept_set), policy)


def _as_iri(x) -> IRI:
    if isinstance(x, IRI):
        return x
    x = str(x)
    return parse_term(x) if x.startswith("<") else IRI(x)


def _as_term(x) -> Term:
    if isinstance(x, (IRI, Literal, BlankNode)):
        return x
    x = str(x)
    if x[:1] in ('<', '"', '_'):
        return parse_term(x)
    return IRI(x)


def auto_select_policy(profile, candidates, rng_seed: int | None = None) -> ResolutionPolicy:
    """max for numbers, longest for other literals, first for IRIs, any otherwise."""
    terms = [t for t, _ in _normalize_candidates(candidates)]
    if terms and all(numeric_value(t) is not None for t in terms):
        return ResolutionPolicy("max")
    if terms and all(isinstance(t, Literal) for t in terms):
        return ResolutionPolicy("longest")
    if terms and all(isinstance(t, IRI) for t in terms):
        return ResolutionPolicy("first")
    return ResolutionPolicy("any", rng_seed=rng_seed)


# -- annotations ------------------------------------------------------------

@dataclass(frozen=True)
class Annotation:
    timestamp: datetime | None = None
    quality_score: float | None = None
    source_name: str | None = None


def _bare_or_term(text: str) -> Term:
    text = text.strip()
    if text[:1] in ("<", '"', "_"):
        return parse_term(text)
    return IRI(text)


def parse_annotations(text: str) -> dict:
    """Read the annotations TSV (subject, predicate, object term, ISO-8601
    timestamp, quality score, source name) into ``{Triple: Annotation}``.

    Empty or ``-`` fields are missing values. Lines starting with ``#`` and a
    header row beginning with ``subject`` are skipped.
    """
    out = {}
    reader = csv.reader(io.StringIO(text), delimiter="\t", quoting=csv.QUOTE_NONE)
    for lineno, row in enumerate(reader, 1):
        if not row or not "".join(row).strip() or row[0].startswith("#"):
            continue
        if lineno == 1 and row[0].strip().lower() in ("subject", "subjectiri"):
            continue
        if len(row) < 3:
            raise ValueError(f"annotations line {lineno}: expected at least 3 columns")
        row = row + [""] * (6 - len(row))
        try:
            s, p, o = _bare_or_term(row[0]), _bare_or_term(row[1]), _bare_or_term(row[2])
            ts = row[3].strip()
            q = row[4].strip()
            src = row[5].strip()
            ann = Annotation(
                datetime.fromisoformat(ts.replace("Z", "+00:00")) if ts not in ("", "-") else None,
                float(q) if q not in ("", "-") else None,
                src if src not in ("", "-") else None,
            )
            if ann.quality_score is not None and not 0 <= ann.quality_score <= 1:
                raise ValueError(f"quality score {ann.quality_score} outside [0, 1]")
            out[Triple(s, p, o)] = ann
        except (ValueError, TypeError) as exc:
            raise ValueError(f"annotations line {lineno}: {exc}") from None
    return out
