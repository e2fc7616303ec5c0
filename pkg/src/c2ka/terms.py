"""Behaviour and stimulus terms.

Behaviour terms are built from declared atomic behaviours with choice (+),
sequence (;), concurrent composition (*) and the two iteration operators,
plus the inactive (0) and idle (1) constants.  Stimulus terms are built from
atomic stimuli with choice and sequencing plus the absorbing deactivation and
neutral constants.  Terms are immutable; every operation here is a pure
function, so values may be shared freely across threads.

Equality of terms is structural equality of normalized forms.  That is the
free-model equality generated by the declared tables: sound and complete for
every check this package performs (notably "does this stimulus change this
agent's behaviour"), and deliberately weaker than the full equational theory.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Iterable, Protocol, Union


class Kind(str, Enum):
    BEHAVIOUR = "behaviour"
    STIMULUS = "stimulus"


@dataclass(frozen=True, order=True)
class AtomicSymbol:
    """A declared atomic behaviour or stimulus name."""

    name: str
    kind: Kind

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("atomic symbol name must be nonempty")

    @property
    def base(self) -> str:
        """Name without any agent qualifier (``SM1.srvT`` -> ``srvT``)."""
        return self.name.rsplit(".", 1)[-1]

    def __str__(self) -> str:
        return self.name


def behaviour(name: str) -> AtomicSymbol:
    return AtomicSymbol(name, Kind.BEHAVIOUR)


def stimulus(name: str) -> AtomicSymbol:
    return AtomicSymbol(name, Kind.STIMULUS)


class UnsupportedTerm(Exception):
    """Raised when stepping meets a construct with no table semantics."""


# ---------------------------------------------------------------------------
# Behaviour terms


class BehaviourTerm:
    """Base class; concrete nodes are the dataclasses below."""

    __slots__ = ()


@dataclass(frozen=True)
class Zero(BehaviourTerm):
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class One(BehaviourTerm):
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class Atom(BehaviourTerm):
    symbol: AtomicSymbol

    def __str__(self) -> str:
        return self.symbol.name


@dataclass(frozen=True)
class Choice(BehaviourTerm):
    parts: tuple[BehaviourTerm, ...]

    def __str__(self) -> str:
        return " + ".join(_render(p, 1) for p in self.parts)


@dataclass(frozen=True)
class Seq(BehaviourTerm):
    parts: tuple[BehaviourTerm, ...]

    def __str__(self) -> str:
        return "; ".join(_render(p, 3) for p in self.parts)


@dataclass(frozen=True)
class Par(BehaviourTerm):
    parts: tuple[BehaviourTerm, ...]

    def __str__(self) -> str:
        return " * ".join(_render(p, 2) for p in self.parts)


@dataclass(frozen=True)
class IterSeq(BehaviourTerm):
    body: BehaviourTerm

    def __str__(self) -> str:
        return f"iter;({self.body})"


@dataclass(frozen=True)
class IterPar(BehaviourTerm):
    body: BehaviourTerm

    def __str__(self) -> str:
        return f"iter*({self.body})"


ZERO = Zero()
ONE = One()

_PRECEDENCE = {Choice: 1, Par: 2, Seq: 3}


def _render(term: BehaviourTerm, context: int) -> str:
    own = _PRECEDENCE.get(type(term), 4)
    text = str(term)
    return f"({text})" if own < context else text


def _sort_key(term: BehaviourTerm):
    if isinstance(term, Zero):
        return (0,)
    if isinstance(term, One):
        return (1,)
    if isinstance(term, Atom):
        return (2, term.symbol.name)
    if isinstance(term, Choice):
        return (3, tuple(_sort_key(p) for p in term.parts))
    if isinstance(term, Seq):
        return (4, tuple(_sort_key(p) for p in term.parts))
    if isinstance(term, Par):
        return (5, tuple(_sort_key(p) for p in term.parts))
    if isinstance(term, IterSeq):
        return (6, _sort_key(term.body))
    if isinstance(term, IterPar):
        return (7, _sort_key(term.body))
    raise TypeError(f"not a behaviour term: {term!r}")


def _normalized_parts(cls, parts: Iterable, norm):
    """Normalize each part, splicing in parts that normalize to ``cls``."""
    out = []
    for part in parts:
        part = norm(part)
        if isinstance(part, cls):
            out.extend(part.parts)
        else:
            out.append(part)
    return out


def normalize(term: BehaviourTerm) -> BehaviourTerm:
    """Canonical form: a choice of products, with the unit and zero laws
    applied, choices flattened and deduplicated, and composition distributed
    over choice.  Equality of normal forms is then exactly the equality the
    choice/composition axioms force on terms, which is what the influence
    check ("did this term change") relies on.  Idempotent.
    """
    if isinstance(term, (Zero, One, Atom)):
        return term
    if isinstance(term, Choice):
        parts = [normalize(p) for p in _flatten(Choice, term.parts)]
        parts = [p for p in parts if not isinstance(p, Zero)]
        seen: dict = {}
        for p in parts:
            seen.setdefault(_sort_key(p), p)
        ordered = [seen[k] for k in sorted(seen)]
        if not ordered:
            return ZERO
        if len(ordered) == 1:
            return ordered[0]
        return Choice(tuple(ordered))
    if isinstance(term, (Seq, Par)):
        cls = type(term)
        parts = [normalize(p) for p in _flatten(cls, term.parts)]
        if any(isinstance(p, Zero) for p in parts):
            return ZERO
        parts = [p for p in parts if not isinstance(p, One)]
        if not parts:
            return ONE
        if any(isinstance(p, Choice) for p in parts):
            options = [p.parts if isinstance(p, Choice) else (p,) for p in parts]
            combos = tuple(cls(combo) for combo in product(*options))
            return normalize(Choice(combos))
        if len(parts) == 1:
            return parts[0]
        return cls(tuple(parts))
    if isinstance(term, IterSeq):
        return IterSeq(normalize(term.body))
    if isinstance(term, IterPar):
        return IterPar(normalize(term.body))
    raise TypeError(f"not a behaviour term: {term!r}")


def choice(*parts: BehaviourTerm) -> BehaviourTerm:
    return normalize(Choice(tuple(parts)))


def seq(*parts: BehaviourTerm) -> BehaviourTerm:
    return normalize(Seq(tuple(parts)))


def par(*parts: BehaviourTerm) -> BehaviourTerm:
    return normalize(Par(tuple(parts)))


def atoms_of(term: BehaviourTerm) -> frozenset[AtomicSymbol]:
    """All atomic behaviour symbols occurring in the term."""
    out: set[AtomicSymbol] = set()
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Atom):
            out.add(t.symbol)
        elif isinstance(t, (Choice, Seq, Par)):
            stack.extend(t.parts)
        elif isinstance(t, (IterSeq, IterPar)):
            stack.append(t.body)
    return frozenset(out)


def atomic_sub_behaviours(agent_term: BehaviourTerm) -> frozenset[AtomicSymbol]:
    """Atomic candidates an agent may act as during an interaction.

    Occurrence in the agent's term, not the additive sub-order: sequential
    components (an initialisation step after a choice, say) are legitimate
    intermediate behaviours and must stay in the candidate pool.
    """
    return atoms_of(agent_term)


# ---------------------------------------------------------------------------
# Stimulus terms


class StimulusTerm:
    __slots__ = ()


@dataclass(frozen=True)
class Deactivation(StimulusTerm):
    def __str__(self) -> str:
        return "d"


@dataclass(frozen=True)
class Neutral(StimulusTerm):
    def __str__(self) -> str:
        return "n"


@dataclass(frozen=True)
class SAtom(StimulusTerm):
    symbol: AtomicSymbol

    def __str__(self) -> str:
        return self.symbol.name


@dataclass(frozen=True)
class OPlus(StimulusTerm):
    parts: tuple[StimulusTerm, ...]

    def __str__(self) -> str:
        return " (+) ".join(str(p) for p in self.parts)


@dataclass(frozen=True)
class ODot(StimulusTerm):
    parts: tuple[StimulusTerm, ...]

    def __str__(self) -> str:
        return " (.) ".join(str(p) for p in self.parts)


DEACTIVATION = Deactivation()
NEUTRAL = Neutral()


def _stim_key(term: StimulusTerm):
    if isinstance(term, Deactivation):
        return (0,)
    if isinstance(term, Neutral):
        return (1,)
    if isinstance(term, SAtom):
        return (2, term.symbol.name)
    if isinstance(term, OPlus):
        return (3, tuple(_stim_key(p) for p in term.parts))
    if isinstance(term, ODot):
        return (4, tuple(_stim_key(p) for p in term.parts))
    raise TypeError(f"not a stimulus term: {term!r}")


def normalize_stimulus(term: StimulusTerm) -> StimulusTerm:
    if isinstance(term, (Deactivation, Neutral, SAtom)):
        return term
    if isinstance(term, OPlus):
        parts = [normalize_stimulus(p) for p in _flatten(OPlus, term.parts)]
        parts = [p for p in parts if not isinstance(p, Deactivation)]
        seen: dict = {}
        for p in parts:
            seen.setdefault(_stim_key(p), p)
        ordered = [seen[k] for k in sorted(seen)]
        if not ordered:
            return DEACTIVATION
        if len(ordered) == 1:
            return ordered[0]
        return OPlus(tuple(ordered))
    if isinstance(term, ODot):
        parts = [normalize_stimulus(p) for p in _flatten(ODot, term.parts)]
        if any(isinstance(p, Deactivation) for p in parts):
            return DEACTIVATION
        parts = [p for p in parts if not isinstance(p, Neutral)]
        if not parts:
            return NEUTRAL
        if len(parts) == 1:
            return parts[0]
        return ODot(tuple(parts))
    raise TypeError(f"not a stimulus term: {term!r}")


def oplus(*parts: StimulusTerm) -> StimulusTerm:
    return normalize_stimulus(OPlus(tuple(parts)))


def odot(*parts: StimulusTerm) -> StimulusTerm:
    return normalize_stimulus(ODot(tuple(parts)))


def is_sub_stimulus(s: StimulusTerm, t: StimulusTerm) -> bool:
    """s is below t in the natural order of the stimulus semiring."""
    return normalize_stimulus(OPlus((s, t))) == normalize_stimulus(t)


# ---------------------------------------------------------------------------
# Behaviour stepping against a table model


class NextTables(Protocol):
    """Next-behaviour / next-stimulus lookups, total over declared atoms."""

    def next_behaviour(self, atom: AtomicSymbol, stim: AtomicSymbol) -> AtomicSymbol: ...

    def next_stimulus(self, atom: AtomicSymbol, stim: AtomicSymbol) -> Union[AtomicSymbol, None]: ...


def step_behaviour(model: NextTables, term: BehaviourTerm, s: StimulusTerm) -> BehaviourTerm:
    """Response of a behaviour term to a stimulus term, normalized.

    Supports terms over atoms, choice and sequence only.  Choice distributes
    pointwise; a sequence steps its head and feeds the head's output stimulus
    to the tail, so a stimulus absorbed by the head never reaches the tail.
    The neutral stimulus leaves every term unchanged and deactivation sends
    every term to 0.
    """
    term = normalize(term)
    s = normalize_stimulus(s)
    if isinstance(s, Neutral):
        return term
    if isinstance(s, Deactivation):
        return ZERO
    if isinstance(s, OPlus):
        return normalize(Choice(tuple(step_behaviour(model, term, p) for p in s.parts)))
    if isinstance(s, ODot):
        # a o (s . t) = (a o t) o s
        stepped = term
        for part in reversed(s.parts):
            stepped = step_behaviour(model, stepped, part)
        return stepped
    return _step_atomic(model, term, s.symbol)


def _step_atomic(model: NextTables, term: BehaviourTerm, stim: AtomicSymbol) -> BehaviourTerm:
    if isinstance(term, Zero):
        return ZERO
    if isinstance(term, One):
        return ONE
    if isinstance(term, Atom):
        return Atom(model.next_behaviour(term.symbol, stim))
    if isinstance(term, Choice):
        return normalize(Choice(tuple(_step_atomic(model, p, stim) for p in term.parts)))
    if isinstance(term, Seq):
        head, rest = term.parts[0], term.parts[1:]
        if isinstance(head, Atom):
            next_head = Atom(model.next_behaviour(head.symbol, stim))
            out = model.next_stimulus(head.symbol, stim)
            tail = normalize(Seq(rest))
            if out is not None:
                tail = _step_atomic(model, tail, out)
            return normalize(Seq((next_head, tail)))
        raise UnsupportedTerm(f"cannot step sequence headed by {head!r}")
    raise UnsupportedTerm(f"cannot step {term!r}: only atoms, + and ; are supported")


# ---------------------------------------------------------------------------
# Term text syntax: +, ;, *, parentheses, identifiers


class TermSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


def parse_term(text: str, qualify: Union[str, None] = None) -> BehaviourTerm:
    """Parse behaviour term text.

    ``+`` binds loosest, then ``*``, then ``;``.  With ``qualify`` set, atom
    names are prefixed ``qualify.name`` (used when compiling agent terms).
    """
    parser = _TermParser(text, qualify)
    term = parser.parse_choice()
    parser.expect_end()
    return normalize(term)


class _TermParser:
    def __init__(self, text: str, qualify: Union[str, None]):
        self.text = text
        self.pos = 0
        self.qualify = qualify

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse_choice(self) -> BehaviourTerm:
        parts = [self.parse_par()]
        while self._peek() == "+":
            self.pos += 1
            parts.append(self.parse_par())
        return parts[0] if len(parts) == 1 else Choice(tuple(parts))

    def parse_par(self) -> BehaviourTerm:
        parts = [self.parse_seq()]
        while self._peek() == "*":
            self.pos += 1
            parts.append(self.parse_seq())
        return parts[0] if len(parts) == 1 else Par(tuple(parts))

    def parse_seq(self) -> BehaviourTerm:
        parts = [self.parse_primary()]
        while self._peek() == ";":
            self.pos += 1
            parts.append(self.parse_primary())
        return parts[0] if len(parts) == 1 else Seq(tuple(parts))

    def parse_primary(self) -> BehaviourTerm:
        ch = self._peek()
        if ch == "(":
            self.pos += 1
            inner = self.parse_choice()
            if self._peek() != ")":
                raise TermSyntaxError("expected ')'", self.pos)
            self.pos += 1
            return inner
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.text) and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"
            ):
                self.pos += 1
            name = self.text[start : self.pos]
            if self.qualify is not None:
                name = f"{self.qualify}.{name}"
            return Atom(behaviour(name))
        if ch == "0":
            self.pos += 1
            return ZERO
        if ch == "1":
            self.pos += 1
            return ONE
        raise TermSyntaxError(f"unexpected character {ch!r}" if ch else "unexpected end of term", self.pos)

    def expect_end(self) -> None:
        if self._peek():
            raise TermSyntaxError(f"trailing input {self.text[self.pos:]!r}", self.pos)


def render_term(term: BehaviourTerm) -> str:
    return str(normalize(term))
