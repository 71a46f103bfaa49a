"""Greatest-fixpoint decision procedures.

All relations here are computed by iterated pair removal from the full
product of the state set: a round re-checks every surviving pair against
the current set and drops the violating ones, until a round removes
nothing.  Uncertain bisimilarity is not transitive, so partition
refinement would be unsound; the pairwise loop is the algorithm of record.

`semantic_oracle_uncertain` is a deliberately separate decision path used
to cross-check the fixpoint engine: it compares word semantics directly,
either by exhaustive word enumeration (within a budget) or by a search of
the both-defined product graph.
"""

from __future__ import annotations

import itertools
import logging
import os
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .errors import ValidationError
from .lifting import in_uncertain_lifting
from .machines import PartialMealyMachine, SuspensionAutomaton, eval_semantics
from .relations import Relation

log = logging.getLogger(__name__)

DEFAULT_ORACLE_BUDGET = 20_000
ORACLE_BUDGET_ENV = "UBISIM_ORACLE_BUDGET"


@dataclass(frozen=True)
class ApartnessWitness:
    """A word on which two states' semantics are both defined but differ."""

    word: tuple[str, ...]
    left_output: str
    right_output: str

    def __post_init__(self):
        if not self.word:
            raise ValidationError("an apartness witness needs a non-empty word")
        if self.left_output == self.right_output:
            raise ValidationError("an apartness witness needs differing outputs")


def _shrink_rounds(
    states: tuple[str, ...], violates: Callable[[str, str, frozenset], bool]
) -> Iterator[frozenset]:
    """Yield the pair set of every round, starting from the full product,
    until a round removes nothing."""
    current = frozenset((x, y) for x in states for y in states)
    yield current
    while True:
        removed = {p for p in current if violates(p[0], p[1], current)}
        if not removed:
            return
        current = current - removed
        yield current


def _greatest(states, violates) -> frozenset:
    final: frozenset = frozenset()
    for final in _shrink_rounds(states, violates):
        pass
    return final


def uncertain_bisimilarity(m: PartialMealyMachine) -> Relation:
    """The greatest relation under which related states never conflict:
    whenever both have a transition on the same input, the outputs agree
    and the successors are related again."""

    def violates(x: str, y: str, current: frozenset) -> bool:
        for i in m.inputs:
            dx, dy = m.delta.get((x, i)), m.delta.get((y, i))
            if dx is not None and dy is not None:
                if dx[0] != dy[0] or (dx[1], dy[1]) not in current:
                    return True
        return False

    return Relation.square(m.states, _greatest(m.states, violates))


def bisimilarity(m: PartialMealyMachine) -> Relation:
    """Ordinary bisimilarity: related states must have transitions on
    exactly the same inputs, with equal outputs and related successors."""

    def violates(x: str, y: str, current: frozenset) -> bool:
        for i in m.inputs:
            dx, dy = m.delta.get((x, i)), m.delta.get((y, i))
            if (dx is None) != (dy is None):
                return True
            if dx is not None:
                if dx[0] != dy[0] or (dx[1], dy[1]) not in current:
                    return True
        return False

    return Relation.square(m.states, _greatest(m.states, violates))


def ioco_compatibility(a: SuspensionAutomaton) -> Relation:
    """The greatest relation on a suspension automaton under which related
    states agree on common-input futures and share at least one output
    with related successors.  The existential output clause is re-checked
    against the current iterate in every round."""

    def violates(x: str, y: str, current: frozenset) -> bool:
        for i in a.inputs:
            dx, dy = a.din.get((x, i)), a.din.get((y, i))
            if dx is not None and dy is not None and (dx, dy) not in current:
                return True
        return not any(
            (x, o) in a.dout and (y, o) in a.dout and (a.dout[(x, o)], a.dout[(y, o)]) in current
            for o in a.outputs
        )

    return Relation.square(a.states, _greatest(a.states, violates))


def apartness_witness(m: PartialMealyMachine, x: str, y: str) -> Optional[ApartnessWitness]:
    """A minimal-length word separating x from y, or None when the two
    states are uncertain bisimilar.

    Searches the product of the two runs breadth-first, following only
    inputs on which both states move; ties between equally short words are
    broken by input declaration order.
    """
    m.check_state(x)
    m.check_state(y)
    queue = deque([(x, y, ())])
    seen = {(x, y)}
    while queue:
        u, v, word = queue.popleft()
        for i in m.inputs:
            du, dv = m.delta.get((u, i)), m.delta.get((v, i))
            if du is None or dv is None:
                continue
            if du[0] != dv[0]:
                return ApartnessWitness(word + (i,), du[0], dv[0])
            nxt = (du[1], dv[1])
            if nxt not in seen:
                seen.add(nxt)
                queue.append((du[1], dv[1], word + (i,)))
    return None


def _oracle_budget(budget: Optional[int]) -> int:
    if budget is not None:
        return budget
    return int(os.environ.get(ORACLE_BUDGET_ENV, DEFAULT_ORACLE_BUDGET))


def semantic_oracle_uncertain(
    m: PartialMealyMachine, x: str, y: str, budget: Optional[int] = None
) -> bool:
    """Decide compatibility of x and y at the level of word semantics.

    Enumerates every word up to length |states|^2 and requires agreement
    whenever both semantics are defined.  When the word count exceeds the
    budget (parameter, else the UBISIM_ORACLE_BUDGET environment variable,
    else a default), falls back to a reachability search of the
    both-defined product graph and logs that it did so.
    """
    m.check_state(x)
    m.check_state(y)
    max_len = len(m.states) ** 2
    budget = _oracle_budget(budget)
    n = len(m.inputs)
    total, power = 0, 1
    for _ in range(max_len):
        power *= n
        total += power
        if total > budget:
            break
    if total <= budget:
        for length in range(1, max_len + 1):
            for word in itertools.product(m.inputs, repeat=length):
                ox = eval_semantics(m, x, word)
                oy = eval_semantics(m, y, word)
                if ox is not None and oy is not None and ox != oy:
                    return False
        return True

    log.info(
        "oracle word budget exceeded (%d > %d); using product-graph reachability",
        total, budget,
    )
    # both-defined product reachability: a conflicting edge refutes
    stack = [(x, y)]
    seen = {(x, y)}
    while stack:
        u, v = stack.pop()
        for i in m.inputs:
            du, dv = m.delta.get((u, i)), m.delta.get((v, i))
            if du is None or dv is None:
                continue
            if du[0] != dv[0]:
                return False
            nxt = (du[1], dv[1])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def relation_is_uncertain_bisimulation(m: PartialMealyMachine, rel: Relation) -> bool:
    """Check an arbitrary relation (not necessarily the greatest one): every
    related pair's one-step behaviours must be related by the uncertain
    lifting of the relation itself."""
    if set(rel.left) - set(m.states) or set(rel.right) - set(m.states):
        raise ValidationError("relation carrier leaves the machine's state set")
    square = Relation.square(m.states, rel.pairs)
    return all(
        in_uncertain_lifting(square, m.successors(x), m.successors(y))
        for x, y in square.ordered_pairs()
    )


def relation_is_ioco_compatibility(a: SuspensionAutomaton, rel: Relation) -> bool:
    """Clause-by-clause check of the compatibility conditions for an
    arbitrary relation on a suspension automaton."""
    if set(rel.left) - set(a.states) or set(rel.right) - set(a.states):
        raise ValidationError("relation carrier leaves the automaton's state set")
    for x, y in rel.pairs:
        for i in a.inputs:
            dx, dy = a.din.get((x, i)), a.din.get((y, i))
            if dx is not None and dy is not None and (dx, dy) not in rel.pairs:
                return False
        if not any(
            (x, o) in a.dout and (y, o) in a.dout and (a.dout[(x, o)], a.dout[(y, o)]) in rel.pairs
            for o in a.outputs
        ):
            return False
    return True
