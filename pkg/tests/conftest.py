from pathlib import Path

import pytest

from coevo.changeset import Changeset, load_changeset, normalize
from coevo.config import load_config
from coevo.rdf import Dataset, parse_ntriples
from coevo.semantics import PropertyProfile, Profiles, SimilarityConfig, load_schema

DATA = Path(__file__).parent / "data"
POLITICIAN = DATA / "politician"


def read_nt(path) -> Dataset:
    return parse_ntriples(Path(path).read_bytes())


class PoliticianFixture:
    """One politician record, evolved on both sides."""

    dir = POLITICIAN

    def __init__(self):
        self.base = read_nt(POLITICIAN / "base.nt")
        self.ds = load_changeset(POLITICIAN / "source-changes")
        self.dt = load_changeset(POLITICIAN / "target-changes")

    def expected(self, strategy: str) -> Dataset:
        return read_nt(POLITICIAN / "expected" / f"strategy-{strategy}.nt")

    def config(self, name: str):
        return load_config(POLITICIAN / f"{name}.toml")


@pytest.fixture
def pol():
    return PoliticianFixture()


def engine_inputs(inst: dict) -> dict:
    """Translate an oracle instance into engine arguments."""
    schema = load_schema(Dataset(inst["schema"].to_triples()))
    profiles = Profiles({p: PropertyProfile(p, d["kind"], d["functional"], d["role"], d["threshold"])
                         for p, d in inst["props"].items()}, schema)
    return dict(
        S=Dataset(inst["S"]), T=Dataset(inst["T"]),
        ds=normalize(Changeset(Dataset(inst["s_add"]), Dataset(inst["s_del"]))),
        dt=normalize(Changeset(Dataset(inst["t_add"]), Dataset(inst["t_del"]))),
        schema=schema, profiles=profiles, cfg=SimilarityConfig(inst["threshold"]),
    )


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
