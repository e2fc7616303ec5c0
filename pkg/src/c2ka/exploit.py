"""Exploitability: the exact fraction of influence an attacker keeps per hop.

Peeling an interaction from the source, each hop contributes the fraction of
the neighbouring agent's influence surface (influencing stimuli for a
stimuli hop, influencing variables for an environment hop) that still
carries the attack through the remaining suffix.  The exploitability is the
product of these fractions; single-hop interactions score 1.

Scores are exact rationals end to end.  Rendering to the conventional three
decimal places is a separate, final step (round half up), so equality
comparisons in tests and reports never involve floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from . import semimodule
from .attack import Memo, _attack_sets, _check_backed
from .topology import EdgeType, Interaction


class ZeroDenominator(Exception):
    """An influence pool is empty: the interaction is not graph-backed."""


@dataclass(frozen=True)
class StepFactor:
    """One hop of the recursion: what the neighbour could do, what helps."""

    agent: str
    edge_type: EdgeType
    pool: frozenset
    kept: frozenset
    fraction: Fraction

    def pool_rendered(self) -> list[str]:
        return sorted(str(x) for x in self.pool)

    def kept_rendered(self) -> list[str]:
        return sorted(str(x) for x in self.kept)


@dataclass(frozen=True)
class Exploitability:
    fraction: Fraction
    steps: tuple[StepFactor, ...] = ()

    @property
    def numerator(self) -> int:
        return self.fraction.numerator

    @property
    def denominator(self) -> int:
        return self.fraction.denominator

    @property
    def decimal3(self) -> str:
        return render_decimal3(self.fraction)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator} = {self.decimal3}"


def render_decimal3(value: Union[Fraction, Exploitability]) -> str:
    """Exact decimal rendering to three places, round half up."""
    fraction = value.fraction if isinstance(value, Exploitability) else value
    if fraction < 0:
        raise ValueError("exploitability is never negative")
    scaled, remainder = divmod(fraction.numerator * 1000, fraction.denominator)
    if remainder * 2 >= fraction.denominator:
        scaled += 1
    return f"{scaled // 1000}.{scaled % 1000:03d}"


def exploitability(model, p: Interaction, memo: Optional[Memo] = None) -> Exploitability:
    """Exact exploitability of p, with the per-hop factors that produced it."""
    _check_backed(model, p)
    memo = {} if memo is None else memo
    total = Fraction(1)
    steps: list[StepFactor] = []
    for n in range(2, len(p) + 1):
        suffix = p.suffix(n)
        edge = suffix.edge_types[0]
        neighbour = suffix.agents[1]
        if edge is EdgeType.STIMULI:
            pool = semimodule.infl_agent(model, neighbour)
        else:
            pool = semimodule.ref_agent(model, neighbour)
        if not pool:
            raise ZeroDenominator(
                f"{neighbour} has no influencing "
                f"{'stimuli' if edge is EdgeType.STIMULI else 'variables'}; "
                f"{suffix} cannot be graph-backed"
            )
        attack_s, attack_v = _attack_sets(model, suffix, memo)
        kept = pool & (attack_s if edge is EdgeType.STIMULI else attack_v)
        fraction = Fraction(len(kept), len(pool))
        steps.append(StepFactor(neighbour, edge, pool, frozenset(kept), fraction))
        total *= fraction
    return Exploitability(total, tuple(steps))
