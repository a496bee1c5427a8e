"""Survey protocol labels on random protocol pairs and on composed triples.

Two experiments:

* ``pairs``: classify random protocol pairs and tally the labels and the
  path (optimal matching or exhaustive search) that produced them;
* ``triples``: derive M from Q and P from M with the same structural cut
  and count how often P[X]M, M[X]Q gives P[<=X]Q.
"""

from __future__ import annotations

import argparse
import random
import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from generators import random_protocol, random_taxonomy  # noqa: E402
from relation_support import STRUCTURE_OPS, at_most_as_general, derived_protocol  # noqa: E402

from protorel import classify  # noqa: E402


def pairs(n: int, seed: int) -> None:
    labels, paths = Counter(), Counter()
    for k in range(n):
        rng = random.Random(seed + k)
        t = random_taxonomy(rng)
        c = classify(t, random_protocol(rng, t, "P", 4, 4), random_protocol(rng, t, "Q", 4, 4))
        labels[str(c.label)] += 1
        paths[c.path] += 1
    print("labels:", dict(labels.most_common()))
    print("paths: ", dict(paths))


def triples(n: int, seed: int) -> None:
    seen, held = Counter(), Counter()
    for k in range(n):
        rng = random.Random(seed + k)
        t = random_taxonomy(rng, 14)
        op = STRUCTURE_OPS[k % len(STRUCTURE_OPS)]
        q = random_protocol(rng, t, "Q", 4, 5)
        m = derived_protocol(rng, t, q, op, "M")
        p = derived_protocol(rng, t, m, op, "P") if m else None
        if p is None:
            continue
        a, b = classify(t, p, m).label, classify(t, m, q).label
        if a is None or str(a) != str(b):
            continue
        seen[str(a)] += 1
        held[str(a)] += at_most_as_general(classify(t, p, q).label, a)
    for lab in sorted(seen):
        print(f"{lab:>4}: {held[lab]}/{seen[lab]} composed triples transitive")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("experiment", choices=("pairs", "triples"))
    ap.add_argument("-n", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    (pairs if args.experiment == "pairs" else triples)(args.n, args.seed)


if __name__ == "__main__":
    main()
