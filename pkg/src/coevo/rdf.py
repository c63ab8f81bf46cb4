"""RDF terms, triples, datasets and N-Triples I/O.

Term equality is syntactic: a literal is identified by its lexical form,
datatype IRI and language tag, so ``"1959"^^xsd:integer`` and ``"1959"`` are
different values. Blank nodes compare by label.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .vocab import RDF_LANGSTRING, XSD_STRING

__all__ = [
    "IRI", "BlankNode", "Literal", "Term", "Triple", "Dataset", "ParseError",
    "parse_ntriples", "parse_term", "serialize_ntriples",
    "set_union", "set_minus", "set_intersect", "canonical_lines",
]

_BAD_IRI_CHARS = re.compile(r"[\s<>]")


class ParseError(ValueError):
    """Malformed N-Triples input."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True, slots=True)
class IRI:
    value: str

    def __post_init__(self):
        if not self.value or _BAD_IRI_CHARS.search(self.value):
            raise ValueError(f"invalid IRI {self.value!r}")

    def n3(self) -> str:
        return f"<{self.value}>"

    def __str__(self):
        return self.value


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def __post_init__(self):
        if not self.label or _BAD_IRI_CHARS.search(self.label):
            raise ValueError(f"invalid blank node label {self.label!r}")

    def n3(self) -> str:
        return f"_:{self.label}"

    def __str__(self):
        return self.n3()


_STRING_IRI = IRI(XSD_STRING)
_LANG_IRI = IRI(RDF_LANGSTRING)


@dataclass(frozen=True, slots=True)
class Literal:
    """A literal. ``datatype`` defaults to xsd:string, or rdf:langString when
    a language tag is given."""

    lexical: str
    datatype: IRI = None  # type: ignore[assignment]
    language: str | None = None

    def __post_init__(self):
        dt = self.datatype
        if isinstance(dt, str):
            dt = IRI(dt)
        if self.language is not None:
            if not self.language:
                raise ValueError("empty language tag")
            if dt is not None and dt != _LANG_IRI:
                raise ValueError("language tag requires rdf:langString datatype")
            dt = _LANG_IRI
        elif dt is None:
            dt = _STRING_IRI
        elif dt == _LANG_IRI:
            raise ValueError("rdf:langString literal without language tag")
        object.__setattr__(self, "datatype", dt)

    def n3(self) -> str:
        text = '"' + _escape_literal(self.lexical) + '"'
        if self.language is not None:
            return text + "@" + self.language
        if self.datatype == _STRING_IRI:
            return text
        return text + "^^" + self.datatype.n3()

    def __str__(self):
        return self.lexical


Term = Union[IRI, BlankNode, Literal]


@dataclass(frozen=True, slots=True)
class Triple:
    subject: IRI | BlankNode
    predicate: IRI
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, (IRI, BlankNode)):
            raise TypeError(f"subject must be an IRI or blank node, got {self.subject!r}")
        if not isinstance(self.predicate, IRI):
            raise TypeError(f"predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (IRI, BlankNode, Literal)):
            raise TypeError(f"object must be an RDF term, got {self.object!r}")

    @property
    def key(self) -> tuple:
        return (self.subject, self.predicate)

    def nt(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))


class Dataset:
    """Immutable set of triples, optionally tagged with a version label.

    The label is informational; equality compares the triples only.
    """

    __slots__ = ("_triples", "version_label")

    def __init__(self, triples: Iterable[Triple] = (), version_label: str | None = None):
        self._triples = triples if isinstance(triples, frozenset) else frozenset(triples)
        self.version_label = version_label

    @property
    def triples(self) -> frozenset:
        return self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __len__(self):
        return len(self._triples)

    def __contains__(self, t):
        return t in self._triples

    def __eq__(self, other):
        if isinstance(other, Dataset):
            return self._triples == other._triples
        if isinstance(other, (set, frozenset)):
            return self._triples == other
        return NotImplemented

    def __hash__(self):
        return hash(self._triples)

    def __repr__(self):
        label = f", version_label={self.version_label!r}" if self.version_label else ""
        return f"Dataset(<{len(self)} triples>{label})"

    def __or__(self, other):
        return Dataset(self._triples | _frozen(other))

    def __sub__(self, other):
        return Dataset(self._triples - _frozen(other))

    def __and__(self, other):
        return Dataset(self._triples & _frozen(other))

    def issubset(self, other) -> bool:
        return self._triples <= _frozen(other)

    def with_label(self, label: str | None) -> "Dataset":
        return Dataset(self._triples, label)

    def predicates(self) -> set:
        return {t.predicate for t in self._triples}

    def subjects(self) -> set:
        return {t.subject for t in self._triples}

    def restrict(self, predicates) -> "Dataset":
        """Triples whose predicate is in ``predicates``."""
        predicates = set(predicates)
        return Dataset(t for t in self._triples if t.predicate in predicates)

    def by_predicate(self) -> dict:
        out = defaultdict(set)
        for t in self._triples:
            out[t.predicate].add(t)
        return {p: Dataset(ts) for p, ts in out.items()}

    def index(self) -> dict:
        """Map (subject, predicate) -> set of objects."""
        out = defaultdict(set)
        for t in self._triples:
            out[(t.subject, t.predicate)].add(t.object)
        return out

    def sorted(self) -> list:
        return sorted(self._triples, key=Triple.nt)


def _frozen(x) -> frozenset:
    if isinstance(x, Dataset):
        return x._triples
    return x if isinstance(x, frozenset) else frozenset(x)


def set_union(a: Dataset, b: Dataset) -> Dataset:
    return a | b


def set_minus(a: Dataset, b: Dataset) -> Dataset:
    return a - b


def set_intersect(a: Dataset, b: Dataset) -> Dataset:
    return a & b


# -- N-Triples -----------------------------------------------------------

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t",
            "\b": "\\b", "\f": "\\f"}
_NEEDS_ESCAPE = re.compile(r'[\\"\x00-\x1f\x7f]')


def _escape_char(m: re.Match) -> str:
    c = m.group(0)
    return _ESCAPES.get(c) or f"\\u{ord(c):04X}"


def _escape_literal(s: str) -> str:
    # Control characters are always escaped so a serialized term never
    # contains a raw tab or newline (conflict reports are TSV).
    return _NEEDS_ESCAPE.sub(_escape_char, s)


_UNESCAPE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))", re.S)
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"',
          "'": "'", "\\": "\\"}


def _unescape(s: str, allow_echar: bool = True) -> str:
    if "\\" not in s:
        return s

    def repl(m):
        if m.group(1) or m.group(2):
            return chr(int(m.group(1) or m.group(2), 16))
        c = m.group(3)
        if not allow_echar or c not in _ECHAR:
            raise ValueError(f"invalid escape \\{c}")
        return _ECHAR[c]

    return _UNESCAPE.sub(repl, s)


_IRI = r'<((?:[^\x00-\x20<>"{}|^`\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)>'
_BNODE = r"_:([A-Za-z0-9_À-\U0010FFFF](?:[A-Za-z0-9_.\-·À-\U0010FFFF]*[A-Za-z0-9_\-·À-\U0010FFFF])?)"
_LITERAL = (r'"((?:[^"\\\n\r]|\\[tbnrf"\'\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)"'
            r"(?:\^\^" + _IRI + r"|@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*))?")

_TRIPLE_RE = re.compile(
    r"[ \t]*(?:" + _IRI + "|" + _BNODE + r")[ \t]*"
    + _IRI + r"[ \t]*"
    r"(?:" + _IRI + "|" + _BNODE + "|" + _LITERAL + r")[ \t]*\.[ \t]*(?:#.*)?$"
)
_TERM_RE = re.compile(r"[ \t]*(?:" + _IRI + "|" + _BNODE + "|" + _LITERAL + r")[ \t]*$")


def _iri(raw: str) -> IRI:
    return IRI(_unescape(raw, allow_echar=False))


def _object_from_groups(g) -> Term:
    o_iri, o_bnode, lex, dt, lang = g
    if o_iri is not None:
        return _iri(o_iri)
    if o_bnode is not None:
        return BlankNode(o_bnode)
    return Literal(_unescape(lex), _iri(dt) if dt is not None else None, lang)


def _diagnose(line: str) -> str:
    s = line.lstrip()
    if s.startswith('"'):
        return "literal in subject position"
    if not s.rstrip().endswith(".") and "#" not in s:
        return "missing terminating '.'"
    return "malformed triple"


def parse_term(text: str) -> Term:
    """Parse a single N-Triples term such as ``<http://x>`` or ``"a"@en``."""
    m = _TERM_RE.match(text)
    if not m:
        raise ValueError(f"malformed term {text!r}")
    return _object_from_groups(m.groups())


def iter_ntriples(lines: Iterable[str]) -> Iterator[Triple]:
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _TRIPLE_RE.match(line)
        if not m:
            raise ParseError(lineno, _diagnose(line))
        g = m.groups()
        try:
            subject = _iri(g[0]) if g[0] is not None else BlankNode(g[1])
            yield Triple(subject, _iri(g[2]), _object_from_groups(g[3:8]))
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None


def parse_ntriples(data: bytes | str, version_label: str | None = None) -> Dataset:
    """Parse N-Triples text (UTF-8 bytes or str) into a Dataset."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(data[:exc.start].count(b"\n") + 1, "invalid UTF-8") from None
    return Dataset(iter_ntriples(data.split("\n")), version_label)


def canonical_lines(triples: Iterable[Triple]) -> list:
    # str order on code points equals UTF-8 byte order
    return sorted(t.nt() for t in triples)


def serialize_ntriples(d: Iterable[Triple]) -> str:
    """Canonical N-Triples: one triple per line, lines sorted, LF endings."""
    lines = canonical_lines(d)
    return "".join(line + "\n" for line in lines)
