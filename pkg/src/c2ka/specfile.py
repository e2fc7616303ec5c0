"""System specification files: parsing, compilation, and linting.

A specification carries the three layers an analysis needs: abstract
behaviour terms per agent, the next-behaviour/next-stimulus tables, and the
concrete guarded-command program of each atomic behaviour, plus the declared
intended interactions.

Sibling agents (the two ship managers of the shipping fixture, say) may use
the same behaviour names with their own tables and programs.  Compilation
therefore instantiates every behaviour name per agent: the atom ``srvT``
used by agents SM1 and SM2 becomes the two scoped atoms ``SM1.srvT`` and
``SM2.srvT``.  Table lines and program bodies shared between indexed agents
are written once with the ``[i]`` placeholder; compilation expands the
placeholder against each agent's ``index=`` binding (``compl[i]`` becomes
the stimulus name ``compl1``, while ``serviceT[i]`` in program text becomes
the indexed variable ``serviceT[1]``).

Omitted table entries default to identity next behaviour and neutral output,
so only the responsive corner of each table is ever written down.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import gcl, terms
from .gcl import GclSyntaxError, Program, VarSet
from .terms import AtomicSymbol, BehaviourTerm, Kind, TermSyntaxError
from .topology import Interaction, PathSyntaxError, parse_path

SECTION_KEYWORDS = ("system", "stimuli", "behaviours", "agent", "next", "program", "intended")


class SpecSyntaxError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        where = f" (line {line})" if line else ""
        super().__init__(f"{message}{where}")
        self.line = line


class UnknownSymbolError(SpecSyntaxError):
    pass


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    location: Optional[str] = None

    def __str__(self) -> str:
        where = f" [{self.location}]" if self.location else ""
        return f"{self.severity.value}: {self.code}: {self.message}{where}"


class CompilationFailed(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        errors = [d for d in diagnostics if d.severity is Severity.ERROR]
        super().__init__(f"{len(errors)} error(s); first: {errors[0] if errors else '?'}")


# --- Raw specification ------------------------------------------------------


@dataclass(frozen=True)
class AgentDecl:
    name: str
    index: Optional[int]
    term_text: str
    line: int = 0


@dataclass(frozen=True)
class NextEntry:
    behaviour: str
    stimulus: str
    next_behaviour: str
    output: Optional[str]  # None means neutral
    line: int = 0


@dataclass(frozen=True)
class ProgramDecl:
    atom: str
    text: str
    line: int = 0


@dataclass(frozen=True)
class SystemSpec:
    name: str
    agents: tuple[AgentDecl, ...]
    stimuli: tuple[str, ...]
    behaviours: tuple[str, ...]
    next_entries: tuple[NextEntry, ...] = ()
    programs: tuple[ProgramDecl, ...] = ()
    intended: tuple[str, ...] = ()


_NEXT_LINE_RE = re.compile(
    r"^(?P<a>[\w\[\]]+)\s*@\s*(?P<s>[\w\[\]]+)\s*->\s*(?P<a2>[\w\[\]]+)\s*(?:/\s*(?P<t>[\w\[\]]+))?$"
)
_AGENT_RE = re.compile(r"^agent\s+(?P<name>\w+)(?:\s+index\s*=\s*(?P<index>\d+))?\s*\{(?P<rest>.*)$")
_IDENT_RE = re.compile(r"[A-Za-z_]\w*$")


class _Lines:
    def __init__(self, text: str):
        self.items: list[tuple[int, str]] = []
        for n, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.split("#", 1)[0].rstrip()
            if stripped.strip():
                self.items.append((n, stripped.strip()))
        self.pos = 0

    def peek(self) -> Optional[tuple[int, str]]:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def take(self) -> tuple[int, str]:
        item = self.items[self.pos]
        self.pos += 1
        return item


def _collect_block(lines: _Lines, first_rest: str, lineno: int, what: str) -> tuple[str, int]:
    """Text between an opening brace and its closing line; no nesting allowed."""
    collected: list[str] = []
    rest = first_rest
    while True:
        if "{" in rest:
            raise SpecSyntaxError(f"unexpected '{{' inside {what} block", lineno)
        if "}" in rest:
            before, after = rest.split("}", 1)
            if after.strip():
                raise SpecSyntaxError(f"unexpected text after '}}' in {what} block", lineno)
            collected.append(before)
            return "\n".join(collected), lineno
        collected.append(rest)
        nxt = lines.peek()
        if nxt is None:
            raise SpecSyntaxError(f"unterminated {what} block", lineno)
        lineno, rest = lines.take()


def _parse_name_list(lines: _Lines, rest: str, lineno: int, what: str) -> list[str]:
    text = rest
    while text.rstrip().endswith(","):
        nxt = lines.peek()
        if nxt is None or nxt[1].split()[0] in SECTION_KEYWORDS:
            raise SpecSyntaxError(f"dangling comma in {what} list", lineno)
        lineno, more = lines.take()
        text += " " + more
    names = [n.strip() for n in text.split(",")]
    for name in names:
        if not _IDENT_RE.fullmatch(name):
            raise SpecSyntaxError(f"bad {what} name {name!r}", lineno)
    return names


def parse_spec(text: str) -> SystemSpec:
    """Parse specification text; raises SpecSyntaxError / UnknownSymbolError."""
    lines = _Lines(text)
    name: Optional[str] = None
    agents: list[AgentDecl] = []
    stimuli: list[str] = []
    behaviours: list[str] = []
    next_entries: list[NextEntry] = []
    programs: list[ProgramDecl] = []
    intended: list[str] = []

    while lines.peek() is not None:
        lineno, line = lines.take()
        word = line.split()[0]
        if word == "system":
            parts = line.split()
            if len(parts) != 2 or not _IDENT_RE.fullmatch(parts[1]):
                raise SpecSyntaxError("expected 'system NAME'", lineno)
            if name is not None:
                raise SpecSyntaxError("duplicate system header", lineno)
            name = parts[1]
        elif word in ("stimuli", "behaviours"):
            rest = line[len(word):].strip()
            if not rest:
                raise SpecSyntaxError(f"empty {word} list", lineno)
            target = stimuli if word == "stimuli" else behaviours
            target.extend(_parse_name_list(lines, rest, lineno, word))
        elif word == "agent":
            m = _AGENT_RE.match(line)
            if not m:
                raise SpecSyntaxError("expected 'agent NAME [index=N] { behaviour = TERM }'", lineno)
            body, _ = _collect_block(lines, m.group("rest"), lineno, "agent")
            body = " ".join(body.split())
            bm = re.fullmatch(r"behaviour\s*=\s*(?P<term>.+)", body)
            if not bm:
                raise SpecSyntaxError(f"agent block must contain 'behaviour = TERM'", lineno)
            index = int(m.group("index")) if m.group("index") else None
            agents.append(AgentDecl(m.group("name"), index, bm.group("term").strip(), lineno))
        elif word == "next":
            rest = line[len(word):].strip()
            if not rest.startswith("{"):
                raise SpecSyntaxError("expected '{' after 'next'", lineno)
            body, _ = _collect_block(lines, rest[1:], lineno, "next")
            for offset, entry_line in enumerate(body.splitlines()):
                entry_line = entry_line.strip()
                if not entry_line:
                    continue
                em = _NEXT_LINE_RE.match(entry_line)
                if not em:
                    raise SpecSyntaxError(f"bad next entry {entry_line!r}", lineno + offset)
                next_entries.append(
                    NextEntry(em.group("a"), em.group("s"), em.group("a2"), em.group("t"), lineno + offset)
                )
        elif word == "program":
            pm = re.match(r"^program\s+(\w+)\s*\{(.*)$", line)
            if not pm:
                raise SpecSyntaxError("expected 'program NAME { ... }'", lineno)
            body, _ = _collect_block(lines, pm.group(2), lineno, "program")
            programs.append(ProgramDecl(pm.group(1), body.strip(), lineno))
        elif word == "intended":
            rest = line[len(word):].strip()
            if not rest.startswith("{"):
                raise SpecSyntaxError("expected '{' after 'intended'", lineno)
            body, _ = _collect_block(lines, rest[1:], lineno, "intended")
            for entry_line in body.splitlines():
                entry_line = entry_line.strip()
                if entry_line:
                    intended.append(entry_line)
        else:
            raise SpecSyntaxError(f"unknown section {word!r}", lineno)

    if name is None:
        raise SpecSyntaxError("missing 'system NAME' header")
    spec = SystemSpec(
        name=name,
        agents=tuple(agents),
        stimuli=tuple(stimuli),
        behaviours=tuple(behaviours),
        next_entries=tuple(next_entries),
        programs=tuple(programs),
        intended=tuple(intended),
    )
    problems = [d for d in _declaration_diagnostics(spec) if d.severity is Severity.ERROR]
    if problems:
        first = problems[0]
        raise UnknownSymbolError(f"{first.code}: {first.message}", _line_of(first))
    return spec


def _line_of(diag: Diagnostic) -> Optional[int]:
    if diag.location and diag.location.startswith("line "):
        return int(diag.location.split()[1])
    return None


# --- Compilation ------------------------------------------------------------


@dataclass(frozen=True)
class AgentInfo:
    name: str
    index: Optional[int]
    term: BehaviourTerm
    atoms: frozenset[AtomicSymbol]

    def base_names(self) -> frozenset[str]:
        return frozenset(a.base for a in self.atoms)


@dataclass(frozen=True, eq=False)
class SystemModel:
    """A compiled, validated system; immutable and safe to share."""

    name: str
    stimuli: tuple[AtomicSymbol, ...]
    behaviours: tuple[str, ...]
    agents: dict[str, AgentInfo]
    next_behaviour_map: dict[tuple[AtomicSymbol, AtomicSymbol], AtomicSymbol]
    next_stimulus_map: dict[tuple[AtomicSymbol, AtomicSymbol], AtomicSymbol]
    atom_def: dict[AtomicSymbol, VarSet]
    atom_ref: dict[AtomicSymbol, VarSet]
    atom_program: dict[AtomicSymbol, Program]
    intended: tuple[Interaction, ...]
    warnings: tuple[Diagnostic, ...] = ()

    def next_behaviour(self, atom: AtomicSymbol, stim: AtomicSymbol) -> AtomicSymbol:
        return self.next_behaviour_map.get((atom, stim), atom)

    def next_stimulus(self, atom: AtomicSymbol, stim: AtomicSymbol) -> Optional[AtomicSymbol]:
        return self.next_stimulus_map.get((atom, stim))

    def resolve_stimulus(self, name: str) -> AtomicSymbol:
        sym = terms.stimulus(name)
        if sym not in self._stimulus_set():
            raise KeyError(f"unknown stimulus {name!r}")
        return sym

    def _stimulus_set(self) -> frozenset[AtomicSymbol]:
        return frozenset(self.stimuli)

    def resolve_atom(self, name: str) -> AtomicSymbol:
        """Accepts a qualified name (``SM1.srvT``) or a base name unique to
        one agent (``cargo``)."""
        if "." in name:
            agent, base = name.split(".", 1)
            if agent not in self.agents:
                raise KeyError(f"unknown agent {agent!r}")
            sym = terms.behaviour(f"{agent}.{base}")
            if sym not in self.agents[agent].atoms:
                raise KeyError(f"agent {agent!r} has no atom {base!r}")
            return sym
        owners = [a for a in self.agents.values() if name in a.base_names()]
        if not owners:
            raise KeyError(f"no agent uses behaviour {name!r}")
        if len(owners) > 1:
            names = ", ".join(sorted(a.name for a in owners))
            raise KeyError(f"behaviour {name!r} is used by several agents ({names}); qualify it")
        return terms.behaviour(f"{owners[0].name}.{name}")

    def all_atoms(self) -> list[AtomicSymbol]:
        out: list[AtomicSymbol] = []
        for agent in self.agents.values():
            out.extend(sorted(agent.atoms))
        return out

    def signature(self):
        """Canonical nested structure, for determinism comparisons."""
        return (
            self.name,
            self.stimuli,
            self.behaviours,
            tuple(
                (a.name, a.index, terms.render_term(a.term), tuple(sorted(a.atoms)))
                for a in self.agents.values()
            ),
            tuple(sorted((k[0].name, k[1].name, v.name) for k, v in self.next_behaviour_map.items())),
            tuple(sorted((k[0].name, k[1].name, v.name) for k, v in self.next_stimulus_map.items())),
            tuple(sorted((k.name, tuple(sorted(map(str, v)))) for k, v in self.atom_def.items())),
            tuple(sorted((k.name, tuple(sorted(map(str, v)))) for k, v in self.atom_ref.items())),
            tuple(str(p) for p in self.intended),
        )


def _sub_name(name: str, index: Optional[int]) -> Optional[str]:
    if "[i]" not in name:
        return name
    if index is None:
        return None
    return name.replace("[i]", str(index))


def _declaration_diagnostics(spec: SystemSpec) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    def err(code: str, message: str, line: int = 0) -> None:
        diags.append(Diagnostic(Severity.ERROR, code, message, f"line {line}" if line else None))

    for pool, what in ((spec.stimuli, "stimulus"), (spec.behaviours, "behaviour")):
        seen: set[str] = set()
        for n in pool:
            if n in seen:
                err("duplicate-declaration", f"{what} {n!r} declared twice")
            seen.add(n)
    agent_names = set()
    for decl in spec.agents:
        if decl.name in agent_names:
            err("duplicate-declaration", f"agent {decl.name!r} declared twice", decl.line)
        agent_names.add(decl.name)
        if decl.name in spec.behaviours or decl.name in spec.stimuli:
            err("name-collision", f"agent name {decl.name!r} also declared as an atom", decl.line)

    behaviours = set(spec.behaviours)
    stimuli = set(spec.stimuli)
    for decl in spec.agents:
        try:
            term = terms.parse_term(decl.term_text)
        except TermSyntaxError as exc:
            err("term-syntax", f"agent {decl.name}: {exc}", decl.line)
            continue
        for sym in terms.atoms_of(term):
            if sym.name not in behaviours:
                err("unknown-symbol", f"agent {decl.name} uses undeclared behaviour {sym.name!r}", decl.line)
    for entry in spec.next_entries:
        for names, pool, what in (
            ((entry.behaviour, entry.next_behaviour), behaviours, "behaviour"),
            ((entry.stimulus, entry.output), stimuli, "stimulus"),
        ):
            for n in names:
                if n is None or "[i]" in n:
                    continue
                if n not in pool:
                    err("unknown-symbol", f"next entry uses undeclared {what} {n!r}", entry.line)
    seen_programs: set[str] = set()
    for decl in spec.programs:
        if decl.atom not in behaviours:
            err("unknown-symbol", f"program for undeclared behaviour {decl.atom!r}", decl.line)
        if decl.atom in seen_programs:
            err("duplicate-declaration", f"program {decl.atom!r} declared twice", decl.line)
        seen_programs.add(decl.atom)
    for text in spec.intended:
        try:
            path = parse_path(text)
        except PathSyntaxError as exc:
            err("path-syntax", str(exc))
            continue
        for agent in path.agents:
            if agent not in agent_names:
                err("unknown-symbol", f"intended path names unknown agent {agent!r}")
    return diags


def compile_spec(spec: SystemSpec) -> SystemModel:
    """Build the analysable model.  Raises CompilationFailed on any error;
    warnings are attached to the returned model."""
    diags = _declaration_diagnostics(spec)

    def err(code: str, message: str, location: Optional[str] = None) -> None:
        diags.append(Diagnostic(Severity.ERROR, code, message, location))

    def warn(code: str, message: str, location: Optional[str] = None) -> None:
        diags.append(Diagnostic(Severity.WARNING, code, message, location))

    stimulus_syms = tuple(terms.stimulus(n) for n in sorted(set(spec.stimuli)))
    agents: dict[str, AgentInfo] = {}
    if not any(d.severity is Severity.ERROR for d in diags):
        for decl in spec.agents:
            term = terms.parse_term(decl.term_text, qualify=decl.name)
            agents[decl.name] = AgentInfo(decl.name, decl.index, term, terms.atoms_of(term))

    next_b: dict[tuple[AtomicSymbol, AtomicSymbol], AtomicSymbol] = {}
    next_s: dict[tuple[AtomicSymbol, AtomicSymbol], AtomicSymbol] = {}
    assigned: dict[tuple[AtomicSymbol, AtomicSymbol], tuple[str, Optional[str]]] = {}
    for entry in spec.next_entries:
        applied = False
        for agent in agents.values():
            a = _sub_name(entry.behaviour, agent.index)
            s = _sub_name(entry.stimulus, agent.index)
            a2 = _sub_name(entry.next_behaviour, agent.index)
            t = _sub_name(entry.output, agent.index) if entry.output else None
            if a is None or s is None or a2 is None or (entry.output and t is None):
                continue  # placeholder with no index binding for this agent
            if a not in agent.base_names():
                continue
            applied = True
            where = f"line {entry.line}"
            if s not in spec.stimuli:
                err("unknown-symbol", f"next entry uses undeclared stimulus {s!r}", where)
                continue
            if t is not None and t not in spec.stimuli:
                err("unknown-symbol", f"next entry emits undeclared stimulus {t!r}", where)
                continue
            if a2 not in agent.base_names():
                err(
                    "invalid-next",
                    f"next behaviour {a2!r} is not an atom of agent {agent.name}",
                    where,
                )
                continue
            key = (terms.behaviour(f"{agent.name}.{a}"), terms.stimulus(s))
            value = (a2, t)
            if key in assigned:
                if assigned[key] != value:
                    err(
                        "conflicting-next",
                        f"conflicting next entries for {agent.name}.{a} under {s}",
                        where,
                    )
                else:
                    warn("duplicate-next", f"repeated next entry for {agent.name}.{a} under {s}", where)
                continue
            assigned[key] = value
            if a2 != a:
                next_b[key] = terms.behaviour(f"{agent.name}.{a2}")
            if t is not None:
                next_s[key] = terms.stimulus(t)
        if not applied:
            warn("unused-next-entry", f"next entry matches no agent atom: {entry.behaviour} @ {entry.stimulus}", f"line {entry.line}")

    program_decls = {decl.atom: decl for decl in spec.programs}
    atom_def: dict[AtomicSymbol, VarSet] = {}
    atom_ref: dict[AtomicSymbol, VarSet] = {}
    atom_program: dict[AtomicSymbol, Program] = {}
    used_programs: set[str] = set()
    for agent in agents.values():
        for sym in sorted(agent.atoms):
            decl = program_decls.get(sym.base)
            if decl is None:
                program = Program()
            else:
                used_programs.add(sym.base)
                text = decl.text
                if "[i]" in text:
                    if agent.index is None:
                        err(
                            "missing-index",
                            f"program {sym.base!r} uses [i] but agent {agent.name} has no index",
                            f"line {decl.line}",
                        )
                        continue
                    text = text.replace("[i]", f"[{agent.index}]")
                try:
                    program = gcl.parse_program(text, spec.stimuli)
                except GclSyntaxError as exc:
                    err("program-syntax", f"program {sym.base!r} for {agent.name}: {exc}", f"line {decl.line}")
                    continue
            atom_program[sym] = program
            atom_def[sym] = gcl.def_vars(program)
            atom_ref[sym] = gcl.ref_vars(program)
    for name, decl in program_decls.items():
        if name not in used_programs and name in spec.behaviours:
            warn("unused-program", f"program {name!r} matches no agent atom", f"line {decl.line}")

    intended: list[Interaction] = []
    for text in spec.intended:
        try:
            intended.append(parse_path(text))
        except PathSyntaxError:
            pass  # already reported by the declaration pass

    if any(d.severity is Severity.ERROR for d in diags):
        raise CompilationFailed(diags)
    return SystemModel(
        name=spec.name,
        stimuli=stimulus_syms,
        behaviours=tuple(spec.behaviours),
        agents=agents,
        next_behaviour_map=next_b,
        next_stimulus_map=next_s,
        atom_def=atom_def,
        atom_ref=atom_ref,
        atom_program=atom_program,
        intended=tuple(intended),
        warnings=tuple(d for d in diags if d.severity is Severity.WARNING),
    )


def compile_text(text: str) -> SystemModel:
    return compile_spec(parse_spec(text))


def load_model(path) -> SystemModel:
    with open(path, "r", encoding="utf-8") as handle:
        return compile_text(handle.read())


# --- Lint -------------------------------------------------------------------


def lint(model: SystemModel) -> list[Diagnostic]:
    """Post-compilation checks.  Never fails; returns warnings only.

    The central check is the initiation assumption: an agent must be
    influenced before it can emit, i.e. a table row that keeps the behaviour
    fixed must not output a stimulus.
    """
    out: list[Diagnostic] = []
    for (atom, stim), emitted in sorted(
        model.next_stimulus_map.items(), key=lambda kv: (kv[0][0].name, kv[0][1].name)
    ):
        if model.next_behaviour(atom, stim) == atom:
            out.append(
                Diagnostic(
                    Severity.WARNING,
                    "assumption-violated",
                    f"{atom} is unchanged by {stim} yet emits {emitted}",
                )
            )
    used = {base for agent in model.agents.values() for base in agent.base_names()}
    for name in model.behaviours:
        if name not in used:
            out.append(
                Diagnostic(Severity.WARNING, "unused-behaviour", f"behaviour {name!r} occurs in no agent term")
            )
    emitted_anywhere = set(model.next_stimulus_map.values())
    influencing = {stim for (_, stim) in model.next_behaviour_map}
    for stim in model.stimuli:
        if stim not in emitted_anywhere and stim not in influencing:
            out.append(
                Diagnostic(
                    Severity.WARNING,
                    "unused-stimulus",
                    f"stimulus {stim} is never emitted and influences nothing",
                )
            )
    return out
