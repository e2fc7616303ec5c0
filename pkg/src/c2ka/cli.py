"""Command-line front end.

Commands:

* ``validate SPEC``   parse, compile and lint; diagnostics on stderr
* ``report SPEC``     enumerate interactions, classify, attack sets, scores
* ``analyze SPEC --path "A -S-> B ..."``   one interaction in detail
* ``graph SPEC``      dump the communication graph as path-literal edges

Exit codes: 0 success, 1 analysis or validation failure, 2 usage errors.

Reports are assembled as plain JSON-shaped data first; the text and CSV
renderers consume only that data, so re-rendering a parsed JSON report
reproduces the text output byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import attack as attack_mod
from . import exploit as exploit_mod
from . import semimodule, specfile, topology
from .attack import AttackKind, EdgeMismatch
from .specfile import CompilationFailed, Severity, SpecSyntaxError
from .topology import Classification, EdgeType, Interaction, PathSyntaxError, parse_path


def _load(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return specfile.compile_text(text)


class _UsageError(Exception):
    pass


# --- report assembly ---------------------------------------------------------


def _path_json(p: Interaction) -> list[dict]:
    out = [{"agent": p.agents[0], "edge": None}]
    out.extend(
        {"agent": agent, "edge": edge.value}
        for agent, edge in zip(p.agents[1:], p.edge_types)
    )
    return out


def build_report(
    model,
    from_agent: Optional[str] = None,
    to_agent: Optional[str] = None,
    max_len: Optional[int] = None,
    implicit_only: bool = False,
    sort: str = "path",
) -> dict:
    interactions = topology.enumerate_interactions(model, from_agent, to_agent, max_len)
    memo: dict = {}
    entries = []
    implicit_count = 0
    for p in interactions:
        result = attack_mod.attack_scenarios(model, p, memo)
        score = exploit_mod.exploitability(model, p, memo)
        classification = topology.classify(p, model.intended)
        if classification is Classification.IMPLICIT:
            implicit_count += 1
        entries.append((p, classification, result, score))
    if implicit_only:
        entries = [e for e in entries if e[1] is Classification.IMPLICIT]
    if sort == "exploitability":
        entries.sort(key=lambda e: (-e[3].fraction, str(e[0])))
    else:
        entries.sort(key=lambda e: str(e[0]))
    rows = []
    for i, (p, classification, result, score) in enumerate(entries, start=1):
        rows.append(
            {
                "id": i,
                "path": _path_json(p),
                "classification": classification.value,
                "attack_kind": result.kind.value,
                "attack": result.rendered_actions(),
                "exploitability": {
                    "num": score.numerator,
                    "den": score.denominator,
                    "decimal": score.decimal3,
                },
                "trivial_only": result.trivial_only,
            }
        )
    return {
        "system": model.name,
        "generated_with_convention": {"simple_paths": True, "max_len": max_len},
        "rows": rows,
        "summary": {"total": len(interactions), "implicit": implicit_count},
    }


def _row_path_literal(row: dict) -> str:
    pieces = [row["path"][0]["agent"]]
    for hop in row["path"][1:]:
        pieces.append(f" -{hop['edge']}-> {hop['agent']}")
    return "".join(pieces)


def render_text(report: dict) -> str:
    convention = report["generated_with_convention"]
    cap = convention["max_len"]
    header = (
        f"system {report['system']} "
        f"(simple paths, max_len={'none' if cap is None else cap})"
    )
    columns = ["id", "interaction", "class", "attack", "exploitability", "notes"]
    table = []
    for row in report["rows"]:
        attack_text = "; ".join(row["attack"]) if row["attack"] else "-"
        notes = "trivial-only" if row["trivial_only"] else ""
        table.append(
            [
                str(row["id"]),
                _row_path_literal(row),
                row["classification"],
                attack_text,
                row["exploitability"]["decimal"],
                notes,
            ]
        )
    widths = [len(c) for c in columns]
    for line in table:
        widths = [max(w, len(cell)) for w, cell in zip(widths, line)]
    out = [header]
    out.append("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip())
    for line in table:
        out.append("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
    summary = report["summary"]
    out.append(f"total={summary['total']} implicit={summary['implicit']}")
    return "\n".join(out) + "\n"


def render_csv(report: dict) -> str:
    lines = ["id,interaction,attack_scenarios,exploitability"]
    for row in report["rows"]:
        attack_text = "; ".join(row["attack"])
        lines.append(
            f"{row['id']},{_row_path_literal(row)},{attack_text},{row['exploitability']['decimal']}"
        )
    return "\n".join(lines) + "\n"


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


# --- commands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        model = _load(args.spec)
    except SpecSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CompilationFailed as exc:
        for diag in exc.diagnostics:
            print(str(diag), file=sys.stderr)
        return 1
    for diag in model.warnings:
        print(str(diag), file=sys.stderr)
    problems = specfile.lint(model)
    for diag in problems:
        print(str(diag), file=sys.stderr)
    if any(d.severity is Severity.ERROR for d in problems):
        return 1
    agents = len(model.agents)
    atoms = sum(len(a.atoms) for a in model.agents.values())
    print(f"ok: {model.name}: {agents} agents, {atoms} atoms, {len(model.stimuli)} stimuli")
    return 0


def cmd_report(args) -> int:
    model = _load(args.spec)
    try:
        report = build_report(
            model,
            from_agent=getattr(args, "from"),
            to_agent=args.to,
            max_len=args.max_len,
            implicit_only=args.implicit_only,
            sort=args.sort,
        )
    except KeyError as exc:
        raise _UsageError(str(exc.args[0])) from exc
    renderer = {"text": render_text, "json": render_json, "csv": render_csv}[args.format]
    sys.stdout.write(renderer(report))
    return 0


def cmd_analyze(args) -> int:
    model = _load(args.spec)
    try:
        p = parse_path(args.path)
    except PathSyntaxError as exc:
        raise _UsageError(str(exc)) from exc
    try:
        memo: dict = {}
        result = attack_mod.attack_scenarios(model, p, memo)
        score = exploit_mod.exploitability(model, p, memo)
    except EdgeMismatch as exc:
        a, b, t = exc.edge
        print(f"error: edge mismatch: no {t.value} edge {a} -> {b} in {model.name}", file=sys.stderr)
        return 1
    print(f"path: {p}")
    print(f"classification: {topology.classify(p, model.intended).value}")
    print(f"attack kind: {result.kind.value}")
    actions = ", ".join(result.rendered_actions()) if result.actions else "(empty)"
    print(f"attack scenarios: {actions}")
    if result.trivial_only:
        print("note: exploitable only trivially, by the deactivation stimulus")
    for i, step in enumerate(score.steps, start=1):
        pool = ", ".join(step.pool_rendered())
        kept = ", ".join(step.kept_rendered()) if step.kept else "-"
        print(
            f"step {i}: agent {step.agent} via {step.edge_type.value}: "
            f"pool {{{pool}}}; kept {{{kept}}}; "
            f"factor {step.fraction.numerator}/{step.fraction.denominator}"
        )
    print(f"exploitability: {score.numerator}/{score.denominator} = {score.decimal3}")
    return 0


def cmd_graph(args) -> int:
    model = _load(args.spec)
    graph = semimodule.graph_of(model)
    lines = [f"{a} -S-> {b}" for a, b in graph.s_edges]
    lines += [f"{a} -E-> {b}" for a, b in graph.e_edges]
    for line in sorted(lines):
        print(line)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="c2ka",
        description="Implicit-interaction and exploitability analysis for C2KA system specifications.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="compile and lint a specification")
    validate.add_argument("spec")
    validate.set_defaults(func=cmd_validate)

    report = sub.add_parser("report", help="analyse every interaction")
    report.add_argument("spec")
    report.add_argument("--from", dest="from", default=None, metavar="AGENT")
    report.add_argument("--to", default=None, metavar="AGENT")
    report.add_argument("--format", choices=("text", "json", "csv"), default="text")
    report.add_argument("--max-len", type=int, default=None, metavar="N")
    report.add_argument("--implicit-only", action="store_true")
    report.add_argument("--sort", choices=("path", "exploitability"), default="path")
    report.set_defaults(func=cmd_report)

    analyze = sub.add_parser("analyze", help="analyse one interaction in detail")
    analyze.add_argument("spec")
    analyze.add_argument("--path", required=True, metavar="PATH")
    analyze.set_defaults(func=cmd_analyze)

    graph = sub.add_parser("graph", help="dump the communication graph")
    graph.add_argument("spec")
    graph.set_defaults(func=cmd_graph)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SpecSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CompilationFailed as exc:
        for diag in exc.diagnostics:
            print(str(diag), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
