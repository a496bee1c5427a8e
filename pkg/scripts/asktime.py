"""Print the fluent sets along the single AskTime branch."""

from pathlib import Path

from protorel import derive_all, load_protocol, load_taxonomy
from protorel.fluents import sorted_fluents

DATA = Path(__file__).resolve().parent.parent / "data" / "asktime"

t = load_taxonomy((DATA / "taxonomy.json").read_text())
p = load_protocol((DATA / "asktime.json").read_text(), t)
(d,) = derive_all(t, p)
acts = [None] + d.branch.acts
for state, act, g in zip(d.branch.states, acts, d.state_fluents):
    if act is not None:
        print(f"  --{act}-->")
    print(f"{state}: {{{', '.join(map(str, sorted_fluents(g)))}}}")
