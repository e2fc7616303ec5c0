"""Attack scenario determination for an interaction.

For a compromised source agent, the attack set of an interaction is the set
of first actions (stimuli issued, or shared variables defined, depending on
the type of the interaction's first hop) that start a chain of influence
reaching the sink.  The two carriers are computed by mutual recursion over
the interaction's suffixes:

* a stimulus s attacks a stimuli-first interaction when some atom of the
  neighbouring agent is influenced by s and, under s, either defines a
  variable attacking the remaining suffix or emits a stimulus attacking it;
* a variable v attacks an environment-first interaction when some atom of
  the neighbouring agent references v and either defines a variable
  attacking the suffix or can emit (under any stimulus) a stimulus
  attacking it.

Single-hop interactions bottom out in the sink's influencing stimuli or
influencing variables.  Suffix results are memoized per run, and an empty
suffix result short-circuits the whole evaluation (the chain is provably
dead); the short cut is checked against plain evaluation in the test suite.

``attack_scenarios_oracle`` recomputes the same sets by explicit search over
per-hop witness chains with no memoization and no short-circuiting.  It
exists so the production evaluator has an independent implementation to be
tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import semimodule
from .gcl import VarSet, Variable
from .terms import AtomicSymbol
from .topology import EdgeType, Interaction

Memo = dict  # Interaction -> (frozenset of stimuli, frozenset of variables)


class EdgeMismatch(Exception):
    """The interaction is not backed by the model's communication graph."""

    def __init__(self, interaction: Interaction, a: str, b: str, edge: EdgeType):
        self.interaction = interaction
        self.edge = (a, b, edge)
        super().__init__(f"no {edge.value} edge {a} -> {b} backing {interaction}")


class AttackKind(str, Enum):
    STIMULI = "stimuli"
    VARIABLES = "variables"
    EMPTY = "empty"


@dataclass(frozen=True)
class AttackResult:
    interaction: Interaction
    kind: AttackKind
    stimuli: frozenset[AtomicSymbol]
    variables: VarSet
    trivial_only: bool

    @property
    def actions(self) -> frozenset:
        return self.stimuli | self.variables

    def rendered_actions(self) -> list[str]:
        return sorted(str(x) for x in self.actions)


def _check_backed(model, p: Interaction) -> None:
    graph = semimodule.graph_of(model)
    for a, b, t in p.edges():
        if a not in model.agents or b not in model.agents:
            missing = a if a not in model.agents else b
            raise EdgeMismatch(p, a, b, t) from KeyError(missing)
        if not graph.has_edge(a, b, t):
            raise EdgeMismatch(p, a, b, t)


def _attack_sets(model, p: Interaction, memo: Memo) -> tuple[frozenset, frozenset]:
    """(attack stimuli, attack variables) of p, filling memo for every suffix."""
    for n in range(1, len(p) + 1):
        suffix = p.suffix(n)
        if suffix in memo:
            continue
        first = suffix.edge_types[0]
        if n == 1:
            if first is EdgeType.STIMULI:
                memo[suffix] = (semimodule.infl_agent(model, suffix.sink), frozenset())
            else:
                memo[suffix] = (frozenset(), semimodule.ref_agent(model, suffix.sink))
            continue
        prev_s, prev_v = memo[p.suffix(n - 1)]
        if not prev_s and not prev_v:
            # dead suffix: nothing can continue the chain
            memo[suffix] = (frozenset(), frozenset())
            continue
        neighbour = model.agents[suffix.agents[1]]
        if first is EdgeType.STIMULI:
            hits: set[AtomicSymbol] = set()
            for atom in neighbour.atoms:
                for s in semimodule.infl_atom(model, atom):
                    if s in hits:
                        continue
                    successor = model.next_behaviour(atom, s)
                    if model.atom_def[successor] & prev_v:
                        hits.add(s)
                        continue
                    emitted = model.next_stimulus(atom, s)
                    if emitted is not None and emitted in prev_s:
                        hits.add(s)
            memo[suffix] = (frozenset(hits), frozenset())
        else:
            var_hits: set[Variable] = set()
            for atom in neighbour.atoms:
                refs = model.atom_ref[atom]
                if not refs or refs <= var_hits:
                    continue
                if model.atom_def[atom] & prev_v:
                    var_hits |= refs
                    continue
                for s in model.stimuli:
                    emitted = model.next_stimulus(atom, s)
                    if emitted is not None and emitted in prev_s:
                        var_hits |= refs
                        break
            memo[suffix] = (frozenset(), frozenset(var_hits))
    return memo[p]


def attack_stimuli(model, p: Interaction, memo: Optional[Memo] = None) -> frozenset[AtomicSymbol]:
    """Stimuli a compromised source can issue to exploit p (empty unless the
    first hop is a stimuli hop)."""
    _check_backed(model, p)
    return _attack_sets(model, p, {} if memo is None else memo)[0]


def attack_variables(model, p: Interaction, memo: Optional[Memo] = None) -> VarSet:
    """Variables a compromised source can define to exploit p (empty unless
    the first hop is an environment hop)."""
    _check_backed(model, p)
    return _attack_sets(model, p, {} if memo is None else memo)[1]


def attack_scenarios(model, p: Interaction, memo: Optional[Memo] = None) -> AttackResult:
    """The full attack set of p with its carrier kind.

    A stimuli-first interaction with an empty set is still trivially
    exploitable by deactivating the whole chain, which is reported on the
    ``trivial_only`` flag rather than as a member of the set.
    """
    _check_backed(model, p)
    stimuli, variables = _attack_sets(model, p, {} if memo is None else memo)
    if stimuli:
        kind = AttackKind.STIMULI
    elif variables:
        kind = AttackKind.VARIABLES
    else:
        kind = AttackKind.EMPTY
    trivial = kind is AttackKind.EMPTY and p.edge_types[0] is EdgeType.STIMULI
    return AttackResult(p, kind, stimuli, variables, trivial)


# --- Independent witness-chain oracle ---------------------------------------


def _chain_exists(model, p: Interaction, action) -> bool:
    types = p.edge_types
    last = len(types) - 1

    def search(k: int, act) -> bool:
        if k == last:
            if types[k] is EdgeType.STIMULI:
                return act in semimodule.infl_agent(model, p.sink)
            return act in semimodule.ref_agent(model, p.sink)
        nxt = types[k + 1]
        for atom in model.agents[p.agents[k + 1]].atoms:
            if types[k] is EdgeType.STIMULI:
                if act not in semimodule.infl_atom(model, atom):
                    continue
                if nxt is EdgeType.ENVIRONMENT:
                    successor = model.next_behaviour(atom, act)
                    if any(search(k + 1, v) for v in model.atom_def[successor]):
                        return True
                else:
                    emitted = model.next_stimulus(atom, act)
                    if emitted is not None and search(k + 1, emitted):
                        return True
            else:
                if act not in model.atom_ref[atom]:
                    continue
                if nxt is EdgeType.ENVIRONMENT:
                    if any(search(k + 1, w) for w in model.atom_def[atom]):
                        return True
                else:
                    for s in model.stimuli:
                        emitted = model.next_stimulus(atom, s)
                        if emitted is not None and search(k + 1, emitted):
                            return True
        return False

    return search(0, action)


def attack_scenarios_oracle(model, p: Interaction) -> AttackResult:
    """Same result as attack_scenarios, by brute-force witness search."""
    _check_backed(model, p)
    stimuli: frozenset = frozenset()
    variables: frozenset = frozenset()
    if p.edge_types[0] is EdgeType.STIMULI:
        stimuli = frozenset(s for s in model.stimuli if _chain_exists(model, p, s))
    else:
        universe: set[Variable] = set()
        for pool in (model.atom_ref, model.atom_def):
            for vs in pool.values():
                universe |= vs
        variables = frozenset(v for v in sorted(universe) if _chain_exists(model, p, v))
    if stimuli:
        kind = AttackKind.STIMULI
    elif variables:
        kind = AttackKind.VARIABLES
    else:
        kind = AttackKind.EMPTY
    trivial = kind is AttackKind.EMPTY and p.edge_types[0] is EdgeType.STIMULI
    return AttackResult(p, kind, stimuli, variables, trivial)
