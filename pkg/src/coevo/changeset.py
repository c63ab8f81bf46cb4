"""Changesets between dataset versions: diff, apply, normalize, merge, and the
``NNNNNN.added.nt[.gz]`` / ``NNNNNN.removed.nt[.gz]`` folder layout."""
from __future__ import annotations

import gzip
import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .rdf import Dataset, ParseError, Triple, parse_ntriples, serialize_ntriples

log = logging.getLogger(__name__)

_EMPTY = Dataset()
_FILE_RE = re.compile(r"^(\d+)\.(added|removed)\.nt(\.gz)?$")


class IngestError(Exception):
    """A changeset folder could not be read."""


@dataclass(frozen=True)
class ApplyWarning:
    triple: Triple
    reason: str = "deleted triple not present"


@dataclass(frozen=True)
class Changeset:
    """Added and deleted triples for one timeframe.

    ``tombstones`` are triples that appeared in both ``added`` and ``deleted``
    before normalization. Deletion wins, so after :func:`normalize` a tombstone
    sits in ``deleted`` only and is also listed here for conflict handling.
    """

    added: Dataset = _EMPTY
    deleted: Dataset = _EMPTY
    tombstones: Dataset = _EMPTY
    timeframe: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("added", "deleted", "tombstones"):
            value = getattr(self, name)
            if not isinstance(value, Dataset):
                object.__setattr__(self, name, Dataset(value))

    @property
    def is_normalized(self) -> bool:
        return not (self.added.triples & self.deleted.triples) and self.tombstones.issubset(self.deleted)

    @property
    def is_empty(self) -> bool:
        return not self.added and not self.deleted

    def __len__(self):
        return len(self.added) + len(self.deleted)

    def restrict(self, predicates) -> "Changeset":
        return Changeset(self.added.restrict(predicates), self.deleted.restrict(predicates),
                         self.tombstones.restrict(predicates), self.timeframe)

    def __repr__(self):
        return (f"Changeset(+{len(self.added)}, -{len(self.deleted)}, "
                f"tombstones={len(self.tombstones)})")


def normalize(c: Changeset) -> Changeset:
    """Move triples present in both halves into ``deleted`` + ``tombstones``."""
    overlap = c.added.triples & c.deleted.triples
    if not overlap and c.tombstones.issubset(c.deleted):
        return c
    return Changeset(
        added=c.added - overlap,
        deleted=c.deleted | c.tombstones,
        tombstones=c.tombstones | overlap,
        timeframe=c.timeframe,
    )


def diff(old: Dataset, new: Dataset) -> Changeset:
    return Changeset(added=new - old, deleted=old - new,
                     timeframe=(old.version_label, new.version_label)
                     if old.version_label or new.version_label else None)


def apply(d: Dataset, c: Changeset, warnings: list | None = None) -> Dataset:
    """Return ``(d \\ deleted) ∪ added`` for the normalized form of ``c``.

    Deleting an absent triple is allowed; each one is reported through
    ``warnings`` when a list is passed.
    """
    c = normalize(c)
    if warnings is not None:
        warnings.extend(ApplyWarning(t) for t in c.deleted.triples - d.triples)
    return Dataset((d.triples - c.deleted.triples) | c.added.triples)


def inverse(c: Changeset) -> Changeset:
    c = normalize(c)
    return Changeset(added=c.deleted, deleted=c.added)


def merge_changesets(changesets: Iterable[Changeset]) -> Changeset:
    """Fold an ordered sequence of changesets into one net changeset.

    A triple deleted anywhere in the sequence existed before it. Its last
    operation decides the outcome: a final deletion makes it deleted, a final
    addition makes it added only if it never was deleted (otherwise the net
    effect is nothing). A deletion that follows an addition of the same
    triple records a tombstone; a later re-addition clears it.
    """
    last: dict = {}
    ever_deleted: set = set()
    ever_added: set = set()
    tombs: set = set()
    first = final = None
    for c in changesets:
        if c.timeframe:
            first = first or c.timeframe[0]
            final = c.timeframe[1]
        c = normalize(c)
        for t in c.added:
            last[t] = True
            ever_added.add(t)
            tombs.discard(t)
        for t in c.deleted:
            if t in ever_added:
                tombs.add(t)
            last[t] = False
            ever_deleted.add(t)
        tombs |= c.tombstones.triples
    added = {t for t, present in last.items() if present and t not in ever_deleted}
    deleted = {t for t, present in last.items() if not present}
    return Changeset(Dataset(added), Dataset(deleted), Dataset(tombs & deleted),
                     (first, final) if first is not None else None)


def _read_nt(path: Path) -> Dataset:
    raw = path.read_bytes()
    if path.suffix == ".gz":
        raw = gzip.decompress(raw)
    return parse_ntriples(raw)


def load_changeset_folder(path: str | os.PathLike) -> list:
    """Read every ``<seq>.added.nt[.gz]`` / ``<seq>.removed.nt[.gz]`` pair in
    ``path`` into normalized changesets, ascending by sequence number.

    Files not following the naming scheme are ignored.
    """
    path = Path(path)
    if not path.is_dir():
        raise IngestError(f"not a directory: {path}")
    found: dict = {}
    labels: dict = {}
    for entry in sorted(path.iterdir()):
        m = _FILE_RE.match(entry.name)
        if not m or not entry.is_file():
            continue
        seq, kind = int(m.group(1)), m.group(2)
        if (seq, kind) in found:
            raise IngestError(f"duplicate sequence number {seq} ({kind}): "
                              f"{found[(seq, kind)].name} and {entry.name}")
        found[(seq, kind)] = entry
        labels.setdefault(seq, m.group(1))
    out = []
    for seq in sorted(labels):
        halves = {}
        for kind in ("added", "removed"):
            f = found.get((seq, kind))
            if f is None:
                halves[kind] = _EMPTY
                continue
            try:
                halves[kind] = _read_nt(f)
            except (ParseError, OSError, EOFError) as exc:
                raise IngestError(f"{f.name}: {exc}") from exc
        label = labels[seq]
        out.append(normalize(Changeset(halves["added"], halves["removed"],
                                       timeframe=(label, label))))
    return out


def load_changeset(path: str | os.PathLike) -> Changeset:
    """Merge every changeset in a folder into one net changeset."""
    return merge_changesets(load_changeset_folder(path))


def write_changeset(c: Changeset, outdir: str | os.PathLike, seq: int = 1,
                    width: int = 6) -> tuple:
    """Write ``c`` as a numbered pair of N-Triples files; returns the paths.

    Tombstones go into both files so that reloading restores them.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = f"{seq:0{width}d}"
    added_path = outdir / f"{stem}.added.nt"
    removed_path = outdir / f"{stem}.removed.nt"
    added_path.write_text(serialize_ntriples(c.added | c.tombstones), encoding="utf-8", newline="\n")
    removed_path.write_text(serialize_ntriples(c.deleted), encoding="utf-8", newline="\n")
    return added_path, removed_path
