"""Line-based text format for machines, state maps and relations.

A document is a sequence of sections.  Tokens are whitespace-separated;
'#' starts a comment running to the end of the line; blank lines are
ignored.  Section grammar:

    mealy <name>            (or: total-mealy <name>)
    inputs <tok>+
    outputs <tok>+
    states <tok>+
    trans <src> <in> <out> <dst>        # absent (src, in) = unknown

    sa <name>
    inputs <tok>+
    outputs <tok>+
    states <tok>+
    itrans <src> <in> <dst>
    otrans <src> <out> <dst>

    map <name> from <m1> to <m2>
    pair <srcState> <dstState>          # one per line, total over m1

    rel <name> on <m1> [x <m2>]
    pair <s> <t>

Names must be unique in a file and references must resolve.  `render`
produces a canonical form that `parse` maps back to the same document.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import ParseError, UbisimError
from .machines import PartialMealyMachine, SuspensionAutomaton
from .morphisms import StateMap
from .relations import Relation


@dataclass(frozen=True)
class RelDecl:
    name: str
    left_machine: str
    right_machine: str
    relation: Relation


@dataclass(frozen=True)
class MapDecl:
    name: str
    source_machine: str
    target_machine: str
    statemap: StateMap


Section = Union[PartialMealyMachine, SuspensionAutomaton, RelDecl, MapDecl]


@dataclass(frozen=True)
class Document:
    sections: tuple[Section, ...]

    def machines(self) -> dict[str, Union[PartialMealyMachine, SuspensionAutomaton]]:
        return {
            s.name: s
            for s in self.sections
            if isinstance(s, (PartialMealyMachine, SuspensionAutomaton))
        }

    def maps(self) -> dict[str, MapDecl]:
        return {s.name: s for s in self.sections if isinstance(s, MapDecl)}

    def rels(self) -> dict[str, RelDecl]:
        return {s.name: s for s in self.sections if isinstance(s, RelDecl)}


# ---------------------------------------------------------------------------
# parsing


class _MachineBuilder:
    def __init__(self, kind: str, name: str, line: int):
        self.kind = kind
        self.name = name
        self.line = line
        self.inputs: Optional[tuple[str, ...]] = None
        self.outputs: Optional[tuple[str, ...]] = None
        self.states: Optional[tuple[str, ...]] = None
        self.delta: dict = {}
        self.din: dict = {}
        self.dout: dict = {}

    def need(self, what, line) -> tuple:
        value = getattr(self, what)
        if value is None:
            raise ParseError(f"{what} must be declared before use", line)
        return value

    def feed(self, key: str, args: list[str], line: int) -> None:
        if key in ("inputs", "outputs", "states"):
            if getattr(self, key) is not None:
                raise ParseError(f"duplicate {key} line", line)
            if not args:
                raise ParseError(f"empty {key} list", line)
            setattr(self, key, tuple(args))
            return
        if key == "trans":
            if self.kind not in ("mealy", "total-mealy"):
                raise ParseError("trans line outside a mealy section", line)
            if len(args) != 4:
                raise ParseError("trans needs <src> <in> <out> <dst>", line)
            src, i, o, dst = args
            self._check(src, "state", self.need("states", line), line)
            self._check(i, "input", self.need("inputs", line), line)
            self._check(o, "output", self.need("outputs", line), line)
            self._check(dst, "state", self.states, line)
            if (src, i) in self.delta:
                raise ParseError(f"duplicate transition for ({src}, {i})", line)
            self.delta[(src, i)] = (o, dst)
            return
        if key in ("itrans", "otrans"):
            if self.kind != "sa":
                raise ParseError(f"{key} line outside an sa section", line)
            if len(args) != 3:
                raise ParseError(f"{key} needs <src> <sym> <dst>", line)
            src, sym, dst = args
            self._check(src, "state", self.need("states", line), line)
            self._check(dst, "state", self.states, line)
            table = self.din if key == "itrans" else self.dout
            alphabet = self.need("inputs" if key == "itrans" else "outputs", line)
            self._check(sym, "symbol", alphabet, line)
            if (src, sym) in table:
                raise ParseError(f"duplicate {key} for ({src}, {sym})", line)
            table[(src, sym)] = dst
            return
        raise ParseError(f"unexpected {key!r} in a machine section", line)

    @staticmethod
    def _check(tok, what, declared, line):
        if tok not in declared:
            raise ParseError(f"undeclared {what} {tok!r}", line)

    def build(self) -> Union[PartialMealyMachine, SuspensionAutomaton]:
        for what in ("inputs", "outputs", "states"):
            self.need(what, self.line)
        try:
            if self.kind == "sa":
                return SuspensionAutomaton(
                    self.name, self.inputs, self.outputs, self.states, self.din, self.dout
                )
            return PartialMealyMachine(
                self.name,
                self.inputs,
                self.outputs,
                self.states,
                self.delta,
                total=(self.kind == "total-mealy"),
            )
        except UbisimError as exc:
            raise ParseError(str(exc), self.line) from None


class _PairsBuilder:
    def __init__(self, kind, name, machines, left, right, line):
        self.kind = kind  # "map" or "rel"
        self.name = name
        self.left = left
        self.right = right
        self.line = line
        self.pairs: list[tuple[str, str]] = []
        self.machines = machines
        for mname in (left, right):
            if mname not in machines:
                raise ParseError(f"unknown machine {mname!r}", line)

    def feed(self, key, args, line):
        if key != "pair" or len(args) != 2:
            raise ParseError(f"expected 'pair <s> <t>' in a {self.kind} section", line)
        s, t = args
        if s not in self.machines[self.left].states:
            raise ParseError(f"undeclared state {s!r} in machine {self.left!r}", line)
        if t not in self.machines[self.right].states:
            raise ParseError(f"undeclared state {t!r} in machine {self.right!r}", line)
        if self.kind == "map" and any(p[0] == s for p in self.pairs):
            raise ParseError(f"duplicate map entry for {s!r}", line)
        self.pairs.append((s, t))

    def build(self) -> Union[MapDecl, RelDecl]:
        left_m, right_m = self.machines[self.left], self.machines[self.right]
        if self.kind == "rel":
            return RelDecl(
                self.name,
                self.left,
                self.right,
                Relation(left_m.states, right_m.states, frozenset(self.pairs)),
            )
        try:
            statemap = StateMap(left_m, right_m, dict(self.pairs), name=self.name)
        except UbisimError as exc:
            raise ParseError(str(exc), self.line) from None
        return MapDecl(self.name, self.left, self.right, statemap)


_SECTION_KEYS = ("mealy", "total-mealy", "sa", "map", "rel")


def parse(text: str) -> Document:
    """Parse a document; raises ParseError with a line number on any
    undeclared symbol or state, duplicate transition, blocking suspension
    state, non-total map, or malformed line."""
    sections: list[Section] = []
    names: set[str] = set()
    machines: dict[str, Union[PartialMealyMachine, SuspensionAutomaton]] = {}
    builder: Union[_MachineBuilder, _PairsBuilder, None] = None

    def close():
        nonlocal builder
        if builder is None:
            return
        section = builder.build()
        sections.append(section)
        if isinstance(section, (PartialMealyMachine, SuspensionAutomaton)):
            machines[section.name] = section
        builder = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        key, args = toks[0], toks[1:]
        if key in _SECTION_KEYS:
            close()
            if not args:
                raise ParseError(f"{key} section needs a name", lineno)
            name = args[0]
            if name in names:
                raise ParseError(f"duplicate section name {name!r}", lineno)
            names.add(name)
            if key in ("mealy", "total-mealy", "sa"):
                if len(args) != 1:
                    raise ParseError(f"{key} takes exactly one name", lineno)
                builder = _MachineBuilder(key, name, lineno)
            elif key == "map":
                if len(args) != 5 or args[1] != "from" or args[3] != "to":
                    raise ParseError("expected 'map <name> from <m1> to <m2>'", lineno)
                builder = _PairsBuilder("map", name, machines, args[2], args[4], lineno)
            else:
                if len(args) == 3 and args[1] == "on":
                    left = right = args[2]
                elif len(args) == 5 and args[1] == "on" and args[3] == "x":
                    left, right = args[2], args[4]
                else:
                    raise ParseError("expected 'rel <name> on <m1> [x <m2>]'", lineno)
                builder = _PairsBuilder("rel", name, machines, left, right, lineno)
            continue
        if builder is None:
            raise ParseError(f"unexpected {key!r} outside any section", lineno)
        builder.feed(key, args, lineno)
    close()
    return Document(tuple(sections))


def parse_file(path) -> Document:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


# ---------------------------------------------------------------------------
# rendering


def _render_machine(m: Union[PartialMealyMachine, SuspensionAutomaton]) -> list[str]:
    if isinstance(m, SuspensionAutomaton):
        head = "sa"
    else:
        head = "total-mealy" if m.total else "mealy"
    lines = [
        f"{head} {m.name}",
        "inputs " + " ".join(m.inputs),
        "outputs " + " ".join(m.outputs),
        "states " + " ".join(m.states),
    ]
    if isinstance(m, SuspensionAutomaton):
        for s in m.states:
            for a in m.inputs:
                if (s, a) in m.din:
                    lines.append(f"itrans {s} {a} {m.din[(s, a)]}")
        for s in m.states:
            for o in m.outputs:
                if (s, o) in m.dout:
                    lines.append(f"otrans {s} {o} {m.dout[(s, o)]}")
    else:
        for s in m.states:
            for i in m.inputs:
                if (s, i) in m.delta:
                    o, dst = m.delta[(s, i)]
                    lines.append(f"trans {s} {i} {o} {dst}")
    return lines


def render(doc: Document) -> str:
    """Canonical text for a document: transitions and pairs emitted in
    declaration order, one blank line between sections."""
    chunks = []
    for section in doc.sections:
        if isinstance(section, (PartialMealyMachine, SuspensionAutomaton)):
            chunks.append(_render_machine(section))
        elif isinstance(section, MapDecl):
            lines = [f"map {section.name} from {section.source_machine} to {section.target_machine}"]
            for s in section.statemap.source.states:
                lines.append(f"pair {s} {section.statemap(s)}")
            chunks.append(lines)
        else:
            lines = [
                f"rel {section.name} on {section.left_machine}"
                + ("" if section.left_machine == section.right_machine else f" x {section.right_machine}")
            ]
            for s, t in section.relation.ordered_pairs():
                lines.append(f"pair {s} {t}")
            chunks.append(lines)
    return "\n\n".join("\n".join(chunk) for chunk in chunks) + "\n"
