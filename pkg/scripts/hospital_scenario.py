"""Replay the nurse/hospital comparison: branches, traces, table, matching, label."""

from __future__ import annotations

import argparse
from pathlib import Path

from protorel import classify, load_protocol, load_taxonomy
from protorel.branching import branch_name
from protorel.fluents import sorted_fluents

DATA = Path(__file__).resolve().parent.parent / "data" / "hospital"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", type=Path, default=DATA)
    args = ap.parse_args()
    t = load_taxonomy((args.data / "taxonomy.json").read_text())
    p1 = load_protocol((args.data / "p1.json").read_text(), t)
    p2 = load_protocol((args.data / "p2.json").read_text(), t)
    c = classify(t, p1, p2)

    for side, branches in ((1, c.left_branches), (2, c.right_branches)):
        for i, d in enumerate(branches):
            print(f"{branch_name(side, i)} = {d.branch}")
            print("    trace:", ", ".join(map(str, sorted_fluents(d.trace))))
    print()
    for row in c.table:
        cells = ["X" if not x.feasible else f"{tuple(x.valuation)} f={x.f}" for x in row]
        print(branch_name(1, row[0].i), " | ".join(cells))
    print()
    pairs = ", ".join(f"({branch_name(1, i)},{branch_name(2, j)})" for i, j in c.pairs)
    print(f"matching: {{{pairs}}}")
    for r in c.per_pair:
        print(f"  {branch_name(1, r.i)} vs {branch_name(2, r.j)}: {r.relation.kind.value} witness={r.relation.witness}")
    print("label:", c.label_text(), f"(via {c.path})")


if __name__ == "__main__":
    main()
