"""Command-line front end.

Exit codes: 0 success, 1 validation or I/O failure (diagnostics go to
stderr as JSON lines), 2 when ``classify`` finds no relation in either
direction.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path
from typing import Any, Sequence, TextIO

from .branching import branch_name, derive_all, enumerate_branches
from .errors import Diagnostic, ValidationError
from .protocol import Protocol, load_protocol
from .relations import Classification, classify
from .taxonomy import Taxonomy, load_taxonomy

EXIT_OK, EXIT_ERROR, EXIT_UNRELATED = 0, 1, 2


class CliError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.message for d in diagnostics))


class _Parser(argparse.ArgumentParser):
    # usage mistakes must not collide with the "unrelated" exit code
    def error(self, message: str) -> None:  # type: ignore[override]
        raise CliError([Diagnostic("usage", message)])


def _globals(suppress: bool) -> argparse.ArgumentParser:
    default = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--taxonomy", metavar="FILE", default=default)
    p.add_argument("--format", choices=("json", "text"), default=default)
    p.add_argument("--registry", metavar="DIR", default=default)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="protorel", parents=[_globals(False)], description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    shared = [_globals(True)]

    p = sub.add_parser("validate", parents=shared, help="check a protocol file")
    p.add_argument("protocol")
    p = sub.add_parser("branches", parents=shared, help="list the branches of a protocol")
    p.add_argument("protocol")
    p = sub.add_parser("trace", parents=shared, help="fluent sets along one branch")
    p.add_argument("protocol")
    p.add_argument("--branch", type=int, required=True, help="1-based branch index")
    p = sub.add_parser("compare", parents=shared, help="feasibility and valuation table")
    p.add_argument("left")
    p.add_argument("right")
    p = sub.add_parser("classify", parents=shared, help="relation label in both directions")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--report", action="store_true", help="emit the full JSON evidence bundle")

    reg = sub.add_parser("registry", parents=shared, help="manage the protocol registry")
    reg_sub = reg.add_subparsers(dest="action", required=True, parser_class=_Parser)
    reg_sub.add_parser("list", parents=shared)
    p = reg_sub.add_parser("add", parents=shared)
    p.add_argument("protocol")
    return parser


# -- loading ----------------------------------------------------------------


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError([Diagnostic("io-error", f"{path}: {exc.strerror or exc}")]) from None


def _taxonomy(args: argparse.Namespace, required: bool) -> Taxonomy | None:
    if args.taxonomy is None:
        if required:
            raise CliError([Diagnostic("usage", f"{args.command} needs --taxonomy")])
        return None
    return load_taxonomy(_read(Path(args.taxonomy)))


def _resolve(ref: str, registry: str | None) -> Path:
    path = Path(ref)
    if path.exists() or registry is None:
        return path
    candidate = Path(registry) / f"{ref}.json"
    if candidate.exists():
        return candidate
    raise CliError([Diagnostic("io-error", f"{ref}: no such file or registered protocol")])


def _protocol(ref: str, args: argparse.Namespace, t: Taxonomy | None) -> Protocol:
    return load_protocol(_read(_resolve(ref, args.registry)), t)


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


# -- commands ---------------------------------------------------------------


def _cmd_validate(args, out: TextIO) -> int:
    p = _protocol(args.protocol, args, _taxonomy(args, required=False))
    if args.format == "json":
        out.write(_dump({"id": p.id, "valid": True, "states": len(p.states), "transitions": len(p.transitions)}) + "\n")
    else:
        out.write(f"{p.id}: valid ({len(p.states)} states, {len(p.transitions)} transitions)\n")
    return EXIT_OK


def _cmd_branches(args, out: TextIO) -> int:
    p = _protocol(args.protocol, args, _taxonomy(args, required=False))
    branches = enumerate_branches(p)
    if args.format == "json":
        rows = [
            {"name": branch_name(1, i), "states": b.states, "acts": [a.to_json() for a in b.acts]}
            for i, b in enumerate(branches)
        ]
        out.write(_dump({"id": p.id, "branches": rows}) + "\n")
    else:
        for i, b in enumerate(branches):
            out.write(f"{branch_name(1, i)} = {b}\n")
    return EXIT_OK


def _cmd_trace(args, out: TextIO) -> int:
    t = _taxonomy(args, required=True)
    p = _protocol(args.protocol, args, t)
    derived = derive_all(t, p)
    if not 1 <= args.branch <= len(derived):
        raise CliError([Diagnostic("usage", f"--branch must be in 1..{len(derived)}")])
    d = derived[args.branch - 1]
    if args.format == "text":
        for state, g in zip(d.branch.states, d.to_json()["stateFluents"]):
            out.write(f"{state}: {{{', '.join(g['fluents'])}}}\n")
        out.write(f"trace: {{{', '.join(d.to_json()['trace'])}}}\n")
    else:
        body = {"protocol": p.id, "branch": branch_name(1, args.branch - 1)} | d.to_json()
        out.write(_dump(body) + "\n")
    return EXIT_OK


def _table_json(c: Classification) -> dict[str, Any]:
    cells = []
    for row in c.table:
        for cell in row:
            v = cell.valuation
            cells.append(
                {
                    "left": branch_name(1, cell.i),
                    "right": branch_name(2, cell.j),
                    "feasible": cell.feasible,
                    "valuation": None if v is None else list(v),
                    "f": None if v is None else str(cell.f),
                    "g": None if v is None else str(cell.g),
                }
            )
    return {
        "left": c.left.id,
        "right": c.right.id,
        "rows": [{"name": branch_name(1, i), "states": d.branch.states} for i, d in enumerate(c.left_branches)],
        "columns": [{"name": branch_name(2, j), "states": d.branch.states} for j, d in enumerate(c.right_branches)],
        "cells": cells,
    }


def _matching_json(c: Classification) -> dict[str, Any] | None:
    m = c.matching
    if m is None:
        return None
    return {
        "pairs": [[branch_name(1, i), branch_name(2, j)] for i, j in m.pairs],
        "scores": [str(s) for s in m.scores],
        "totalF": str(m.total),
        "totalG": str(m.total_g),
    }


def bundle(forward: Classification, reverse: Classification) -> dict[str, Any]:
    """Evidence for both directions; table, matching and pairs are the forward ones."""
    return {
        "table": _table_json(forward),
        "matching": _matching_json(forward),
        "perPair": [r.to_json() for r in forward.per_pair],
        "label": {
            "forward": forward.label_text(),
            "reverse": reverse.label_text(),
            "path": {"forward": forward.path, "reverse": reverse.path},
        },
    }


def _text_table(c: Classification) -> str:
    head = [""] + [branch_name(2, j) for j in range(len(c.right_branches))]
    rows = [head]
    for i, row in enumerate(c.table):
        cells = [branch_name(1, i)]
        for cell in row:
            cells.append("X" if not cell.feasible else f"({','.join(map(str, cell.valuation))}) f={cell.f}")
        rows.append(cells)
    widths = [max(len(r[k]) for r in rows) for k in range(len(head))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def _both(args) -> tuple[Classification, Classification]:
    t = _taxonomy(args, required=True)
    p1, p2 = _protocol(args.left, args, t), _protocol(args.right, args, t)
    return classify(t, p1, p2), classify(t, p2, p1)


def _cmd_compare(args, out: TextIO) -> int:
    fwd, rev = _both(args)
    if args.format == "json":
        out.write(_dump(bundle(fwd, rev)) + "\n")
        return EXIT_OK
    out.write(_text_table(fwd))
    m = fwd.matching
    if m is None:
        out.write("matching: none\n")
    else:
        pairs = ", ".join(f"({branch_name(1, i)},{branch_name(2, j)})" for i, j in m.pairs)
        out.write(f"matching: {{{pairs}}} sum f={m.total} sum g={m.total_g}\n")
    return EXIT_OK


def _cmd_classify(args, out: TextIO) -> int:
    fwd, rev = _both(args)
    labels = [c.label_text() for c in (fwd, rev) if c.related]
    if args.report or args.format == "json":
        out.write(_dump(bundle(fwd, rev)) + "\n")
    else:
        for text in labels:
            out.write(text + "\n")
        if not labels:
            out.write(f"no relation between {fwd.left.id} and {fwd.right.id}\n")
    return EXIT_OK if labels else EXIT_UNRELATED


def _cmd_registry(args, out: TextIO) -> int:
    if args.registry is None:
        raise CliError([Diagnostic("usage", "registry commands need --registry")])
    root = Path(args.registry)
    if args.action == "add":
        src = Path(args.protocol)
        p = load_protocol(_read(src), _taxonomy(args, required=False))
        root.mkdir(parents=True, exist_ok=True)
        dest = root / f"{p.id}.json"
        shutil.copyfile(src, dest)
        out.write(f"added {p.id}\n")
        return EXIT_OK
    entries = []
    for path in sorted(root.glob("*.json")) if root.is_dir() else []:
        p = load_protocol(_read(path))
        entries.append({"id": p.id, "file": path.name, "branches": len(enumerate_branches(p))})
    if args.format == "json":
        out.write(_dump({"protocols": entries}) + "\n")
    else:
        for e in entries:
            out.write(f"{e['id']}\t{e['branches']} branches\t{e['file']}\n")
    return EXIT_OK


COMMANDS = {
    "validate": _cmd_validate,
    "branches": _cmd_branches,
    "trace": _cmd_trace,
    "compare": _cmd_compare,
    "classify": _cmd_classify,
    "registry": _cmd_registry,
}


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except ValidationError as exc:
        diags = exc.diagnostics
    except CliError as exc:
        diags = exc.diagnostics
    for d in diags:
        err.write(json.dumps(d.as_dict(), sort_keys=True) + "\n")
    return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
