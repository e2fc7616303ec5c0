"""Static analysis of agent interactions in C2KA system specifications.

Given a three-level specification of a distributed system (abstract
behaviour terms, stimulus-response tables, guarded-command programs), this
package derives the communication graph, enumerates every interaction,
separates intended from implicit ones, determines the attack scenarios by
which a compromised source agent can exploit each interaction, and scores
each interaction's exploitability as an exact rational.
"""

from .attack import (
    AttackKind,
    AttackResult,
    EdgeMismatch,
    attack_scenarios,
    attack_scenarios_oracle,
    attack_stimuli,
    attack_variables,
)
from .exploit import Exploitability, StepFactor, ZeroDenominator, exploitability, render_decimal3
from .gcl import Program, Variable, def_vars, parse_program, ref_vars, render_program
from .semimodule import (
    InfluenceSets,
    def_agent,
    emitted_stimuli,
    infl_agent,
    infl_atom,
    influence_sets,
    is_fixed_point,
    ref_agent,
)
from .specfile import (
    CompilationFailed,
    Diagnostic,
    Severity,
    SpecSyntaxError,
    SystemModel,
    SystemSpec,
    UnknownSymbolError,
    compile_spec,
    compile_text,
    lint,
    load_model,
    parse_spec,
)
from .terms import (
    AtomicSymbol,
    BehaviourTerm,
    Kind,
    StimulusTerm,
    UnsupportedTerm,
    atomic_sub_behaviours,
    atoms_of,
    is_sub_stimulus,
    normalize,
    parse_term,
    step_behaviour,
)
from .topology import (
    Classification,
    CommGraph,
    EdgeType,
    Interaction,
    build_graph,
    classify,
    enumerate_interactions,
    parse_path,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
