"""Communication topology: typed interaction paths over the agent graph.

An interaction is an ordered walk of agents where each hop is either
stimulus communication (``-S->``) or shared-environment communication
(``-E->``).  The communication graph has a stimulus edge A -> B when some
stimulus A can emit influences B, and an environment edge when some variable
A defines is referenced by B.  Enumerated interactions are simple paths
(no repeated agent); declared intended interactions may revisit agents.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from . import semimodule


class EdgeType(str, Enum):
    STIMULI = "S"
    ENVIRONMENT = "E"


class PathSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Interaction:
    """A typed path: source first, sink last, one edge type per hop."""

    agents: tuple[str, ...]
    edge_types: tuple[EdgeType, ...]

    def __post_init__(self) -> None:
        if len(self.agents) != len(self.edge_types) + 1:
            raise ValueError("an interaction needs exactly one edge type per hop")
        if not self.edge_types:
            raise ValueError("an interaction has at least one edge")
        for a, b in zip(self.agents, self.agents[1:]):
            if a == b:
                raise ValueError(f"adjacent agents must differ (got {a!r} twice)")

    @property
    def source(self) -> str:
        return self.agents[0]

    @property
    def sink(self) -> str:
        return self.agents[-1]

    def __len__(self) -> int:
        return len(self.edge_types)

    def edges(self) -> Iterable[tuple[str, str, EdgeType]]:
        for i, t in enumerate(self.edge_types):
            yield self.agents[i], self.agents[i + 1], t

    def suffix(self, n_edges: int) -> "Interaction":
        """The interaction made of the last ``n_edges`` hops."""
        if not 1 <= n_edges <= len(self):
            raise ValueError(f"suffix length {n_edges} out of range")
        return Interaction(self.agents[-(n_edges + 1):], self.edge_types[-n_edges:])

    def is_simple(self) -> bool:
        return len(set(self.agents)) == len(self.agents)

    def __str__(self) -> str:
        out = [self.agents[0]]
        for agent, t in zip(self.agents[1:], self.edge_types):
            out.append(f" -{t.value}-> {agent}")
        return "".join(out)

    def sort_key(self):
        return (self.agents, tuple(t.value for t in self.edge_types))


_ARROW_RE = re.compile(r"-([SE])->")


def parse_path(text: str) -> Interaction:
    """Parse a path literal such as ``SV1 -S-> SM2 -E-> SV2``."""
    pieces = _ARROW_RE.split(text.strip())
    if len(pieces) < 3 or len(pieces) % 2 == 0:
        raise PathSyntaxError(f"malformed path literal: {text!r}")
    agents = []
    types = []
    for i, piece in enumerate(pieces):
        if i % 2 == 0:
            name = piece.strip()
            if not re.fullmatch(r"[A-Za-z_]\w*", name):
                raise PathSyntaxError(f"bad agent name {piece!r} in path {text!r}")
            agents.append(name)
        else:
            types.append(EdgeType(piece))
    try:
        return Interaction(tuple(agents), tuple(types))
    except ValueError as exc:
        raise PathSyntaxError(f"{exc} in path {text!r}") from None


@dataclass(frozen=True)
class CommGraph:
    s_edges: frozenset[tuple[str, str]]
    e_edges: frozenset[tuple[str, str]]

    def has_edge(self, a: str, b: str, t: EdgeType) -> bool:
        edges = self.s_edges if t is EdgeType.STIMULI else self.e_edges
        return (a, b) in edges

    def successors(self, a: str) -> list[tuple[str, EdgeType]]:
        out = [(b, EdgeType.STIMULI) for (x, b) in self.s_edges if x == a]
        out += [(b, EdgeType.ENVIRONMENT) for (x, b) in self.e_edges if x == a]
        return sorted(out, key=lambda item: (item[0], item[1].value))


def build_graph(model) -> CommGraph:
    """Potential-for-direct-communication edges between distinct agents."""
    names = list(model.agents)
    s_edges = set()
    e_edges = set()
    for a in names:
        emitted = semimodule.emitted_stimuli(model, a)
        defined = semimodule.def_agent(model, a)
        for b in names:
            if a == b:
                continue
            if emitted & semimodule.infl_agent(model, b):
                s_edges.add((a, b))
            if defined & semimodule.ref_agent(model, b):
                e_edges.add((a, b))
    return CommGraph(frozenset(s_edges), frozenset(e_edges))


def paths_over(
    graph: CommGraph,
    sources: Iterable[str],
    to_agent: Optional[str] = None,
    max_len: Optional[int] = None,
) -> list[Interaction]:
    """Simple typed paths from the given sources, in lexicographic order
    (agent sequence first, then edge types)."""
    found: list[Interaction] = []

    def extend(path_agents: list[str], path_types: list[EdgeType], seen: set[str]) -> None:
        if max_len is not None and len(path_types) >= max_len:
            return
        for succ, etype in graph.successors(path_agents[-1]):
            if succ in seen:
                continue
            path_agents.append(succ)
            path_types.append(etype)
            if to_agent is None or succ == to_agent:
                found.append(Interaction(tuple(path_agents), tuple(path_types)))
            seen.add(succ)
            extend(path_agents, path_types, seen)
            seen.remove(succ)
            path_agents.pop()
            path_types.pop()

    for source in sources:
        extend([source], [], {source})
    found.sort(key=Interaction.sort_key)
    return found


def enumerate_interactions(
    model,
    from_agent: Optional[str] = None,
    to_agent: Optional[str] = None,
    max_len: Optional[int] = None,
) -> list[Interaction]:
    """All simple typed paths over the model's communication graph."""
    graph = semimodule.graph_of(model)
    for name in (from_agent, to_agent):
        if name is not None and name not in model.agents:
            raise KeyError(f"unknown agent {name!r}")
    sources = [from_agent] if from_agent else sorted(model.agents)
    return paths_over(graph, sources, to_agent, max_len)


class Classification(str, Enum):
    INTENDED = "intended"
    IMPLICIT = "implicit"


def is_covered(p: Interaction, intended: Iterable[Interaction]) -> bool:
    """True when p occurs as a contiguous subpath of some intended interaction."""
    k = len(p)
    for decl in intended:
        m = len(decl)
        if m < k:
            continue
        for offset in range(m - k + 1):
            if (
                decl.agents[offset : offset + k + 1] == p.agents
                and decl.edge_types[offset : offset + k] == p.edge_types
            ):
                return True
    return False


def classify(p: Interaction, intended: Iterable[Interaction]) -> Classification:
    return Classification.INTENDED if is_covered(p, intended) else Classification.IMPLICIT
