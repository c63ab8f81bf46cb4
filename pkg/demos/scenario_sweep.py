"""Five-scenario sweep over a synthetic DBpedia-like slice, through the CLI.

    python demos/scenario_sweep.py [n_subjects]

Writes inputs and results under a temporary directory and prints report.tsv.
"""
# %%
import random
import sys
import tempfile
from pathlib import Path

from coevo.cli import main
from coevo.rdf import IRI, Literal, Triple, serialize_ntriples

DBR, DBP, DBO = "http://dbpedia.org/resource/", "http://dbpedia.org/property/", "http://dbpedia.org/ontology/"
n_subjects = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
rng = random.Random(7)

offices = ["Member of Parliament", "Councillor", "Mayor", "Senator"]
parties = ["Liberal Democrats", "Labour", "Conservative", "Green"]

# %% A slice: every politician has an office, a party and a name.
base = []
for i in range(n_subjects):
    s = IRI(f"{DBR}P{i}")
    base += [Triple(s, IRI(DBP + "office"), Literal(rng.choice(offices))),
             Triple(s, IRI(DBP + "party"), Literal(rng.choice(parties))),
             Triple(s, IRI("http://xmlns.com/foaf/0.1/name"), Literal(f"Person {i}"))]

# %% Both sides touch about 5% of the subjects; some edits collide.
def edits(tag):
    added, removed = [], []
    for i in rng.sample(range(n_subjects), n_subjects // 20):
        s = IRI(f"{DBR}P{i}")
        added.append(Triple(s, IRI(DBP + "office"), Literal(rng.choice(offices))))
        if rng.random() < 0.3:
            removed.append(base[3 * i + 1])
    return added, removed

root = Path(tempfile.mkdtemp(prefix="coevo-sweep-"))
(root / "base.nt").write_text(serialize_ntriples(base))
for side in ("source", "target"):
    added, removed = edits(side)
    folder = root / f"{side}-changes"
    folder.mkdir()
    (folder / "000001.added.nt").write_text(serialize_ntriples(added))
    (folder / "000001.removed.nt").write_text(serialize_ntriples(removed))

# %% dbp:office holds one value per subject; `any` settles disagreements.
(root / "config.toml").write_text(f'''
seed = 42
[policy]
default = "any"
[properties."{DBP}office"]
kind = "DatatypeProperty"
functional = true
''')

# %%
code = main(["scenario", "--source", str(root / "base.nt"), "--target", str(root / "base.nt"),
             "--source-changes", str(root / "source-changes"),
             "--target-changes", str(root / "target-changes"),
             "--config", str(root / "config.toml"), "--out", str(root / "out")])
print((root / "out" / "report.tsv").read_text())
print("outputs in", root / "out")
sys.exit(code)
