"""``coevo`` command line: diff, sync, conflicts and scenario.

Exit codes: 0 success, 2 parse or ingest error, 3 resolution error,
4 configuration error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .changeset import Changeset, IngestError, diff, load_changeset, normalize, write_changeset
from .config import ConfigError, EngineConfig, load_config, load_scenarios
from .conflict import conflicts_to_tsv, detect_conflicts
from .engine import ResolutionFailed, default_scenarios, report_to_tsv, run_scenarios
from .rdf import Dataset, ParseError, parse_ntriples, serialize_ntriples
from .resolution import parse_annotations
from .semantics import load_schema

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RESOLUTION = 3
EXIT_CONFIG = 4

log = logging.getLogger("coevo")


class InputError(Exception):
    pass


def _read_dataset(path) -> Dataset:
    try:
        return parse_ntriples(Path(path).read_bytes(), version_label=str(path))
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _read_changes(path) -> Changeset:
    if path is None:
        return Changeset()
    try:
        return load_changeset(path)
    except IngestError as exc:
        raise InputError(str(exc)) from None


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def _seed(args, cfg: EngineConfig) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("COEVO_SEED")
    if env:
        try:
            return int(env, 0)
        except ValueError:
            raise ConfigError(f"COEVO_SEED: not an integer: {env!r}") from None
    return cfg.rng_seed


class _Inputs:
    """Everything a sync-like command needs, loaded and validated."""

    def __init__(self, args):
        self.cfg = load_config(args.config) if args.config else EngineConfig()
        self.seed = _seed(args, self.cfg)
        schema_path = args.schema or self.cfg.schema_path
        self.schema = load_schema(_read_dataset(schema_path) if schema_path else None)
        self.profiles = self.cfg.profiles(self.schema)
        self.similarity = self.cfg.similarity()
        ann_path = args.annotations or self.cfg.annotations_path
        self.annotations = None
        if ann_path:
            try:
                self.annotations = parse_annotations(Path(ann_path).read_text(encoding="utf-8"))
            except (OSError, ValueError) as exc:
                raise InputError(f"{ann_path}: {exc}") from None
        self.source = _read_dataset(args.source)
        self.target = _read_dataset(args.target)
        self.ds = normalize(_read_changes(args.source_changes))
        self.dt = normalize(_read_changes(args.target_changes))
        out = args.out or self.cfg.output_dir
        self.out = Path(out) if out else Path(".")
        self._check(args.strict)

    def _check(self, strict: bool):
        problems = []
        if not self.target.issubset(self.source):
            problems.append("target contains triples absent from source")
        for name, d, c in (("source", self.source, self.ds), ("target", self.target, self.dt)):
            # a tombstone was added and deleted within the timeframe
            missing = len(c.deleted.triples - d.triples - c.tombstones.triples)
            if missing:
                problems.append(f"{name} changeset deletes {missing} triple(s) not in {name}")
        for msg in problems:
            if strict:
                raise InputError(msg)
            log.warning(msg)

    def run(self, scenarios):
        return run_scenarios(self.source, self.target, self.ds, self.dt, scenarios,
                             self.profiles, self.schema, self.similarity,
                             annotations=self.annotations, seed=self.seed)


def _write_outcome(outdir: Path, outcome, conflicts):
    _write(outdir / "source.after.nt", serialize_ntriples(outcome.source_after))
    _write(outdir / "target.after.nt", serialize_ntriples(outcome.target_after))
    for side, c in (("source", outcome.out_source), ("target", outcome.out_target)):
        _write(outdir / f"out-{side}.added.nt", serialize_ntriples(c.added))
        _write(outdir / f"out-{side}.removed.nt", serialize_ntriples(c.deleted))
    _write(outdir / "conflicts.tsv", conflicts_to_tsv(conflicts))


def cmd_diff(args) -> int:
    old, new = _read_dataset(args.old), _read_dataset(args.new)
    c = diff(old, new)
    write_changeset(c, args.out or ".", seq=args.seq)
    print(f"added {len(c.added)} removed {len(c.deleted)}")
    return EXIT_OK


def cmd_sync(args) -> int:
    inp = _Inputs(args)
    [row] = inp.run([inp.cfg.assignment()])
    _write_outcome(inp.out, row.outcome, row.outcome.conflicts)
    _write(inp.out / "report.tsv", report_to_tsv([row]))
    st = row.outcome.stats
    print(f"strategy {row.assignment.describe()}: source +{st.out_source_added}/-{st.out_source_deleted}"
          f" target +{st.out_target_added}/-{st.out_target_deleted}")
    return EXIT_OK


def cmd_conflicts(args) -> int:
    inp = _Inputs(args)
    records = detect_conflicts(inp.ds, inp.dt, inp.target, inp.profiles, inp.schema, inp.similarity)
    _write(inp.out / "conflicts.tsv", conflicts_to_tsv(records))
    print(f"{sum(r.semantically_conflicting for r in records)} conflicting key(s)")
    return EXIT_OK


def cmd_scenario(args) -> int:
    inp = _Inputs(args)
    if args.scenarios:
        scenarios = load_scenarios(args.scenarios)
    elif inp.cfg.scenarios is not None:
        scenarios = inp.cfg.scenarios
    else:
        scenarios = default_scenarios()
    rows = inp.run(scenarios)
    for row in rows:
        _write_outcome(inp.out / f"scenario-{row.name}", row.outcome, row.outcome.conflicts)
    _write(inp.out / "report.tsv", report_to_tsv(rows))
    print(f"{len(rows)} scenario(s) written to {inp.out}")
    return EXIT_OK


def _add_inputs(p: argparse.ArgumentParser):
    p.add_argument("--source", required=True, help="source dataset at t_i (N-Triples)")
    p.add_argument("--target", required=True, help="target dataset at t_i (N-Triples)")
    p.add_argument("--source-changes", help="folder of source changesets")
    p.add_argument("--target-changes", help="folder of target changesets")
    p.add_argument("--config", help="TOML engine configuration")
    p.add_argument("--out", help="output directory (default: config 'out' or .)")
    p.add_argument("--seed", type=int, help="seed for 'any'; overrides COEVO_SEED and config")
    p.add_argument("--schema", help="schema N-Triples (subclass, disjointness, property types)")
    p.add_argument("--annotations", help="TSV of per-triple timestamp, quality and source")
    p.add_argument("--strict", action="store_true",
                   help="treat inclusion violations and deletions of absent triples as errors")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coevo", description="Co-evolve an RDF source and replica.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diff", help="changeset between two versions")
    p.add_argument("old")
    p.add_argument("new")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seq", type=int, default=1, help="sequence number of the written pair")
    p.set_defaults(func=cmd_diff)

    for name, func, text in (("sync", cmd_sync, "synchronize and write both datasets"),
                             ("conflicts", cmd_conflicts, "list conflicts without changing anything"),
                             ("scenario", cmd_scenario, "run a sweep of strategy scenarios")):
        p = sub.add_parser(name, help=text)
        _add_inputs(p)
        if name == "scenario":
            p.add_argument("--scenarios", help="TOML file of [[scenarios]] tables")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResolutionFailed as exc:
        print(f"resolution error at {exc}", file=sys.stderr)
        return EXIT_RESOLUTION


if __name__ == "__main__":
    sys.exit(main())
