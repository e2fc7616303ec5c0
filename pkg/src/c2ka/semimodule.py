"""Influence and response of agents under the next-behaviour/next-stimulus maps.

Atom-level influence is a table scan; agent-level influence steps the whole
behaviour term, which matters for sequential terms: a stimulus consumed by
the head of a sequence is never seen by the tail, so the agent can be
influenced by strictly fewer stimuli than its atoms are.  Results are cached
per model (models are immutable), so repeated queries during graph building
and scoring are cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union
from weakref import WeakKeyDictionary

from . import terms
from .gcl import VarSet, Variable
from .terms import AtomicSymbol, SAtom, normalize, step_behaviour

_caches: "WeakKeyDictionary" = WeakKeyDictionary()


def _cache(model) -> dict:
    try:
        return _caches[model]
    except KeyError:
        fresh: dict = {}
        _caches[model] = fresh
        return fresh


def _resolve_atom(model, atom: Union[AtomicSymbol, str]) -> AtomicSymbol:
    return model.resolve_atom(atom) if isinstance(atom, str) else atom


def infl_atom(model, atom: Union[AtomicSymbol, str]) -> frozenset[AtomicSymbol]:
    """Atomic stimuli that change the given atomic behaviour."""
    a = _resolve_atom(model, atom)
    return frozenset(s for s in model.stimuli if model.next_behaviour(a, s) != a)


def is_fixed_point(model, atom: Union[AtomicSymbol, str]) -> bool:
    """True when the atom responds to no stimulus but deactivation."""
    a = _resolve_atom(model, atom)
    return all(model.next_behaviour(a, s) == a for s in model.stimuli)


def infl_agent(model, agent: str) -> frozenset[AtomicSymbol]:
    """Atomic stimuli that change the agent's behaviour term."""
    cache = _cache(model)
    key = ("infl", agent)
    if key not in cache:
        term = normalize(model.agents[agent].term)
        cache[key] = frozenset(
            s for s in model.stimuli if step_behaviour(model, term, SAtom(s)) != term
        )
    return cache[key]


def def_agent(model, agent: str) -> VarSet:
    """Union of the def sets of the agent's atomic sub-behaviours."""
    cache = _cache(model)
    key = ("def", agent)
    if key not in cache:
        out: set[Variable] = set()
        for atom in model.agents[agent].atoms:
            out |= model.atom_def[atom]
        cache[key] = frozenset(out)
    return cache[key]


def ref_agent(model, agent: str) -> VarSet:
    """Union of the ref sets of the agent's atomic sub-behaviours (its
    influencing variables)."""
    cache = _cache(model)
    key = ("ref", agent)
    if key not in cache:
        out: set[Variable] = set()
        for atom in model.agents[agent].atoms:
            out |= model.atom_ref[atom]
        cache[key] = frozenset(out)
    return cache[key]


def emitted_stimuli(model, agent: str) -> frozenset[AtomicSymbol]:
    """Every stimulus some atom of the agent can output."""
    cache = _cache(model)
    key = ("emit", agent)
    if key not in cache:
        out: set[AtomicSymbol] = set()
        for atom in model.agents[agent].atoms:
            for s in model.stimuli:
                emitted = model.next_stimulus(atom, s)
                if emitted is not None:
                    out.add(emitted)
        cache[key] = frozenset(out)
    return cache[key]


@dataclass(frozen=True)
class InfluenceSets:
    agent: str
    influencing_stimuli: frozenset[AtomicSymbol]
    influencing_variables: VarSet


def influence_sets(model, agent: str) -> InfluenceSets:
    return InfluenceSets(agent, infl_agent(model, agent), ref_agent(model, agent))


def graph_of(model):
    """The model's communication graph, built once and cached."""
    cache = _cache(model)
    if "graph" not in cache:
        from . import topology

        cache["graph"] = topology.build_graph(model)
    return cache["graph"]


def atomic_sub_behaviours(model, agent: str) -> frozenset[AtomicSymbol]:
    return terms.atomic_sub_behaviours(model.agents[agent].term)
