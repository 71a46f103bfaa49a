"""State machine models and their one-step successor structures.

Three system kinds are supported:

* partial Mealy machines, where a (state, input) pair either yields an
  output and a successor or is still unknown;
* suspension automata, deterministic transition systems whose labels are
  split into inputs and outputs, with every state offering at least one
  output transition;
* finite powerset systems (plain branching successor sets).

Each kind comes with a "successor structure": the one-step behaviour of a
single state, detached from the machine.  Successor structures are ordered
(`order_leq`): a smaller structure is one that might still grow into the
larger one as more behaviour gets observed.  For Mealy structures the order
fills in unknown entries, for suspension structures inputs may be added and
outputs removed, for powerset structures it is plain inclusion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterator, Mapping, Optional, Sequence

from .errors import ContractError, ValidationError

# Successor references are opaque: plain state ids inside machines, state
# pairs inside span structures.
Ref = Hashable


def _unique(items, what: str):
    seen = set()
    for it in items:
        if it in seen:
            raise ValidationError(f"duplicate {what}: {it!r}")
        seen.add(it)


# ---------------------------------------------------------------------------
# successor structures


@dataclass(frozen=True)
class MealySuccessors:
    """One-step behaviour of a Mealy state.

    `entries` is aligned with `inputs`; each entry is either a pair
    (output, successor) or None for a transition that is not (yet) known.
    Unknown entries are stored explicitly so that totality over the
    alphabet is checkable.
    """

    inputs: tuple[str, ...]
    entries: tuple[Optional[tuple[str, Ref]], ...]

    def __post_init__(self):
        if len(self.inputs) != len(self.entries):
            raise ValidationError("entries must align with the input alphabet")

    @classmethod
    def make(cls, inputs: Sequence[str], mapping: Mapping[str, tuple[str, Ref]]) -> "MealySuccessors":
        inputs = tuple(inputs)
        for i in mapping:
            if i not in inputs:
                raise ValidationError(f"unknown input symbol {i!r}")
        return cls(inputs, tuple(mapping.get(i) for i in inputs))

    def entry(self, i: str) -> Optional[tuple[str, Ref]]:
        try:
            return self.entries[self.inputs.index(i)]
        except ValueError:
            raise ValidationError(f"unknown input symbol {i!r}") from None

    def defined(self) -> Iterator[tuple[str, tuple[str, Ref]]]:
        for i, e in zip(self.inputs, self.entries):
            if e is not None:
                yield i, e

    def refs(self) -> Iterator[Ref]:
        for _, (_, ref) in self.defined():
            yield ref


@dataclass(frozen=True)
class SaSuccessors:
    """One-step behaviour of a suspension-automaton state: a partial input
    successor map and a partial output successor map.  Inside an automaton
    the output part must be non-empty (non-blocking)."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    in_entries: tuple[Optional[Ref], ...]
    out_entries: tuple[Optional[Ref], ...]

    def __post_init__(self):
        if len(self.inputs) != len(self.in_entries) or len(self.outputs) != len(self.out_entries):
            raise ValidationError("entries must align with the alphabets")

    @classmethod
    def make(cls, inputs, outputs, ins: Mapping[str, Ref], outs: Mapping[str, Ref]) -> "SaSuccessors":
        inputs, outputs = tuple(inputs), tuple(outputs)
        for a in ins:
            if a not in inputs:
                raise ValidationError(f"unknown input symbol {a!r}")
        for o in outs:
            if o not in outputs:
                raise ValidationError(f"unknown output symbol {o!r}")
        return cls(
            inputs,
            outputs,
            tuple(ins.get(a) for a in inputs),
            tuple(outs.get(o) for o in outputs),
        )

    def input_entry(self, a: str) -> Optional[Ref]:
        try:
            return self.in_entries[self.inputs.index(a)]
        except ValueError:
            raise ValidationError(f"unknown input symbol {a!r}") from None

    def output_entry(self, o: str) -> Optional[Ref]:
        try:
            return self.out_entries[self.outputs.index(o)]
        except ValueError:
            raise ValidationError(f"unknown output symbol {o!r}") from None

    def defined_inputs(self) -> Iterator[tuple[str, Ref]]:
        for a, e in zip(self.inputs, self.in_entries):
            if e is not None:
                yield a, e

    def defined_outputs(self) -> Iterator[tuple[str, Ref]]:
        for o, e in zip(self.outputs, self.out_entries):
            if e is not None:
                yield o, e

    @property
    def has_output(self) -> bool:
        return any(e is not None for e in self.out_entries)

    def refs(self) -> Iterator[Ref]:
        for _, ref in self.defined_inputs():
            yield ref
        for _, ref in self.defined_outputs():
            yield ref


@dataclass(frozen=True)
class PowSuccessors:
    """One-step behaviour of a powerset-system state: its successor set."""

    elems: frozenset

    def __post_init__(self):
        object.__setattr__(self, "elems", frozenset(self.elems))

    def refs(self) -> Iterator[Ref]:
        return iter(self.elems)


Successors = MealySuccessors | SaSuccessors | PowSuccessors


def order_leq(t: Successors, s: Successors) -> bool:
    """Decide t below s in the successor-structure order of t's kind.

    Mealy: every known entry of t must be the corresponding entry of s.
    Suspension: t's input map is a sub-map of s's, and s's output map is a
    sub-map of t's (inputs may be added going up, outputs removed).
    Powerset: subset inclusion.

    Both arguments must be of the same kind over the same alphabets;
    callers are responsible for using a common successor carrier.
    """
    if type(t) is not type(s):
        raise ContractError("cannot compare successor structures of different kinds")
    if isinstance(t, MealySuccessors):
        if t.inputs != s.inputs:
            raise ContractError("input alphabets differ")
        return all(e is None or e == se for e, se in zip(t.entries, s.entries))
    if isinstance(t, SaSuccessors):
        if t.inputs != s.inputs or t.outputs != s.outputs:
            raise ContractError("alphabets differ")
        ins_ok = all(e is None or e == se for e, se in zip(t.in_entries, s.in_entries))
        outs_ok = all(se is None or se == e for e, se in zip(t.out_entries, s.out_entries))
        return ins_ok and outs_ok
    return t.elems <= s.elems


# ---------------------------------------------------------------------------
# machines


@dataclass(frozen=True)
class PartialMealyMachine:
    """A finite Mealy machine with a partial transition map.

    `delta` maps (state, input) to (output, successor); absent keys are the
    unknown transitions.  A machine constructed with total=True must have
    delta defined on all of states x inputs.
    """

    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    states: tuple[str, ...]
    delta: Mapping[tuple[str, str], tuple[str, str]]
    total: bool = False

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "delta", dict(self.delta))
        _unique(self.inputs, "input symbol")
        _unique(self.outputs, "output symbol")
        _unique(self.states, "state")
        states = set(self.states)
        for (src, i), (o, dst) in self.delta.items():
            if src not in states:
                raise ValidationError(f"transition from unknown state {src!r}")
            if i not in self.inputs:
                raise ValidationError(f"transition on unknown input {i!r}")
            if o not in self.outputs:
                raise ValidationError(f"transition with unknown output {o!r}")
            if dst not in states:
                raise ValidationError(f"transition to unknown state {dst!r}")
        if self.total:
            for s in self.states:
                for i in self.inputs:
                    if (s, i) not in self.delta:
                        raise ValidationError(
                            f"machine declared total but {s!r} has no transition on {i!r}"
                        )

    def check_state(self, state: str) -> None:
        if state not in self.states:
            raise ValidationError(f"unknown state {state!r} in machine {self.name!r}")

    def transition(self, state: str, i: str) -> Optional[tuple[str, str]]:
        self.check_state(state)
        if i not in self.inputs:
            raise ValidationError(f"unknown input symbol {i!r}")
        return self.delta.get((state, i))

    def successors(self, state: str) -> MealySuccessors:
        self.check_state(state)
        return MealySuccessors(
            self.inputs, tuple(self.delta.get((state, i)) for i in self.inputs)
        )


@dataclass(frozen=True)
class SuspensionAutomaton:
    """A finite suspension automaton: partial input successors `din`, partial
    output successors `dout`, with every state non-blocking (at least one
    output transition)."""

    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    states: tuple[str, ...]
    din: Mapping[tuple[str, str], str]
    dout: Mapping[tuple[str, str], str]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "din", dict(self.din))
        object.__setattr__(self, "dout", dict(self.dout))
        _unique(self.inputs, "input symbol")
        _unique(self.outputs, "output symbol")
        _unique(self.states, "state")
        states = set(self.states)
        for (src, a), dst in self.din.items():
            if src not in states or dst not in states:
                raise ValidationError(f"input transition {src!r} -{a}-> {dst!r} uses unknown state")
            if a not in self.inputs:
                raise ValidationError(f"input transition on unknown symbol {a!r}")
        for (src, o), dst in self.dout.items():
            if src not in states or dst not in states:
                raise ValidationError(f"output transition {src!r} -{o}-> {dst!r} uses unknown state")
            if o not in self.outputs:
                raise ValidationError(f"output transition on unknown symbol {o!r}")
        for s in self.states:
            if not any((s, o) in self.dout for o in self.outputs):
                raise ValidationError(f"blocking state {s!r}: no output transition")

    def check_state(self, state: str) -> None:
        if state not in self.states:
            raise ValidationError(f"unknown state {state!r} in automaton {self.name!r}")

    def input_transition(self, state: str, a: str) -> Optional[str]:
        self.check_state(state)
        if a not in self.inputs:
            raise ValidationError(f"unknown input symbol {a!r}")
        return self.din.get((state, a))

    def output_transition(self, state: str, o: str) -> Optional[str]:
        self.check_state(state)
        if o not in self.outputs:
            raise ValidationError(f"unknown output symbol {o!r}")
        return self.dout.get((state, o))

    def successors(self, state: str) -> SaSuccessors:
        self.check_state(state)
        return SaSuccessors(
            self.inputs,
            self.outputs,
            tuple(self.din.get((state, a)) for a in self.inputs),
            tuple(self.dout.get((state, o)) for o in self.outputs),
        )


@dataclass(frozen=True)
class PowersetSystem:
    """A finitely branching successor system: each state maps to a finite
    set of successor states."""

    name: str
    states: tuple[str, ...]
    succ: Mapping[str, frozenset]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(
            self, "succ", {s: frozenset(v) for s, v in dict(self.succ).items()}
        )
        _unique(self.states, "state")
        states = set(self.states)
        for s, nexts in self.succ.items():
            if s not in states or not nexts <= states:
                raise ValidationError(f"successor set of {s!r} leaves the state set")

    def successors(self, state: str) -> PowSuccessors:
        if state not in self.states:
            raise ValidationError(f"unknown state {state!r} in system {self.name!r}")
        return PowSuccessors(self.succ.get(state, frozenset()))


# ---------------------------------------------------------------------------
# word semantics


def run(machine: PartialMealyMachine, state: str, word: Sequence[str]) -> Optional[str]:
    """Follow `word` from `state`; the reached state, or None as soon as a
    transition is missing.  The empty word returns `state` itself."""
    machine.check_state(state)
    current = state
    for i in word:
        if i not in machine.inputs:
            raise ValidationError(f"unknown input symbol {i!r}")
        step = machine.delta.get((current, i))
        if step is None:
            return None
        current = step[1]
    return current


def eval_semantics(machine: PartialMealyMachine, state: str, word: Sequence[str]) -> Optional[str]:
    """The output of the final transition when running `word` from `state`,
    or None if some transition along the way is missing.

    Rejects the empty word: there is no final transition to read an output
    from.
    """
    word = tuple(word)
    if not word:
        raise ContractError("eval_semantics requires a non-empty word")
    machine.check_state(state)
    current = state
    out: Optional[str] = None
    for i in word:
        if i not in machine.inputs:
            raise ValidationError(f"unknown input symbol {i!r}")
        step = machine.delta.get((current, i))
        if step is None:
            return None
        out, current = step
    return out


# ---------------------------------------------------------------------------
# disjoint unions


def _union_prefixes(names: Sequence[str]) -> list[str]:
    # a machine appearing several times gets numbered prefixes so the
    # renamed states stay distinct
    counts = {n: names.count(n) for n in names}
    seen: dict[str, int] = {}
    prefixes = []
    for n in names:
        if counts[n] == 1:
            prefixes.append(n)
        else:
            seen[n] = seen.get(n, 0) + 1
            prefixes.append(f"{n}{seen[n]}")
    return prefixes


def disjoint_union(first, second, *rest):
    """Combine machines of the same kind over identical alphabets into one
    machine on the tagged union of their state sets.

    States are renamed to "<machineName>.<state>" so that witnesses stay
    readable across machines.  Returns the combined machine and one rename
    map per argument.
    """
    parts = [first, second, *rest]
    kind = type(first)
    if any(type(p) is not kind for p in parts):
        raise ContractError("disjoint union requires machines of the same kind")
    if any(p.inputs != first.inputs for p in parts):
        raise ContractError("disjoint union requires identical input alphabets")
    if kind is not PowersetSystem and any(p.outputs != first.outputs for p in parts):
        raise ContractError("disjoint union requires identical output alphabets")

    prefixes = _union_prefixes([p.name for p in parts])
    renames = [{s: f"{pre}.{s}" for s in p.states} for pre, p in zip(prefixes, parts)]
    states = tuple(r[s] for p, r in zip(parts, renames) for s in p.states)
    name = "+".join(p.name for p in parts)

    if kind is PartialMealyMachine:
        delta = {}
        for p, r in zip(parts, renames):
            for (src, i), (o, dst) in p.delta.items():
                delta[(r[src], i)] = (o, r[dst])
        combined = PartialMealyMachine(
            name, first.inputs, first.outputs, states, delta,
            total=all(p.total for p in parts),
        )
    elif kind is SuspensionAutomaton:
        din, dout = {}, {}
        for p, r in zip(parts, renames):
            for (src, a), dst in p.din.items():
                din[(r[src], a)] = r[dst]
            for (src, o), dst in p.dout.items():
                dout[(r[src], o)] = r[dst]
        combined = SuspensionAutomaton(name, first.inputs, first.outputs, states, din, dout)
    elif kind is PowersetSystem:
        succ = {}
        for p, r in zip(parts, renames):
            for s in p.states:
                succ[r[s]] = frozenset(r[t] for t in p.succ.get(s, frozenset()))
        combined = PowersetSystem(name, states, succ)
    else:  # pragma: no cover
        raise ContractError(f"unsupported machine kind {kind.__name__}")
    return combined, tuple(renames)
