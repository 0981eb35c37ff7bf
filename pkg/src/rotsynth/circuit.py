"""Controlled-rotation circuit IR: lines, gates, passes and the text format.

Text format, one item per line, ``#`` starts a comment::

    qrot-circuit v1
    lines 3
    line 0 input a restore
    line 1 input b restore
    line 2 input c output r
    gate crx 1 2 1/2
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .angle import Angle, AngleError

HEADER = "qrot-circuit v1"
AXES = ("x", "z")


class CircuitError(ValueError):
    pass


class ParseError(CircuitError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Line:
    index: int
    kind: str  # "input" or "ancilla"
    name: Optional[str] = None
    restore: bool = False
    output: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("input", "ancilla"):
            raise CircuitError(f"bad line kind {self.kind!r}")
        if self.kind == "input" and not self.name:
            raise CircuitError(f"input line {self.index} needs a name")
        if self.restore and (self.output is not None or self.kind != "input"):
            raise CircuitError(f"line {self.index}: only unbound inputs can be restored")

    @property
    def is_input(self) -> bool:
        return self.kind == "input"

    def label(self) -> str:
        if self.output is not None:
            return self.output
        return self.name if self.is_input else f"anc{self.index}"


@dataclass(frozen=True)
class Gate:
    axis: str
    angle: Angle
    target: int
    control: Optional[int] = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise CircuitError(f"bad axis {self.axis!r}")
        if self.control == self.target:
            raise CircuitError("control and target coincide")
        if self.angle.is_zero():
            raise CircuitError("zero-angle gates are not stored")

    @property
    def lines(self) -> Tuple[int, ...]:
        return (self.target,) if self.control is None else (self.control, self.target)

    def inverse(self) -> "Gate":
        return replace(self, angle=-self.angle)

    def __str__(self):
        if self.control is None:
            return f"gate r{self.axis} {self.target} {self.angle}"
        return f"gate cr{self.axis} {self.control} {self.target} {self.angle}"


@dataclass(frozen=True)
class Circuit:
    lines: Tuple[Line, ...]
    gates: Tuple[Gate, ...] = ()
    meta: Tuple[Tuple[str, str], ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        object.__setattr__(self, "gates", tuple(self.gates))
        for i, line in enumerate(self.lines):
            if line.index != i:
                raise CircuitError(f"line {i} carries index {line.index}")
        names = [l.name for l in self.lines if l.is_input]
        if len(set(names)) != len(names):
            raise CircuitError("duplicate input names")
        outs = [l.output for l in self.lines if l.output is not None]
        if len(set(outs)) != len(outs):
            raise CircuitError("duplicate output names")
        n = len(self.lines)
        for g in self.gates:
            if not all(0 <= x < n for x in g.lines):
                raise CircuitError(f"{g} references a missing line")

    @property
    def outputs(self) -> Dict[str, int]:
        return {l.output: l.index for l in self.lines if l.output is not None}

    @property
    def inputs(self) -> List[str]:
        return [l.name for l in self.lines if l.is_input]

    def line_of(self, name: str) -> int:
        for l in self.lines:
            if l.name == name or l.output == name:
                return l.index
        raise KeyError(name)

    def with_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.lines, tuple(gates), self.meta)

    def __len__(self):
        return len(self.gates)


def inverse(c: Circuit) -> Circuit:
    return c.with_gates(g.inverse() for g in reversed(c.gates))


def merge_rotations(c: Circuit) -> Circuit:
    """Fuse adjacent gates with the same axis, control and target.

    A stack makes this a fixpoint in one pass: cancelling a pair can expose
    a new adjacent pair, which is then merged too.
    """
    out: List[Gate] = []
    for g in c.gates:
        if out and _same_slot(out[-1], g):
            total = out[-1].angle + g.angle
            out.pop()
            if not total.is_zero():
                out.append(replace(g, angle=total))
        else:
            out.append(g)
    return c.with_gates(out)


def _same_slot(a: Gate, b: Gate) -> bool:
    return a.axis == b.axis and a.control == b.control and a.target == b.target


def layers(c: Circuit) -> List[List[Gate]]:
    """ASAP layering; each gate occupies one layer on every line it touches."""
    last: Dict[int, int] = {}
    out: List[List[Gate]] = []
    for g in c.gates:
        layer = 1 + max((last.get(x, 0) for x in g.lines), default=0)
        for x in g.lines:
            last[x] = layer
        if layer > len(out):
            out.append([])
        out[layer - 1].append(g)
    return out


def depth(c: Circuit) -> int:
    return len(layers(c))


def stats(c: Circuit) -> dict:
    two = sum(1 for g in c.gates if g.control is not None)
    return {
        "one_qubit": len(c.gates) - two,
        "two_qubit": two,
        "ancillae": sum(1 for l in c.lines if not l.is_input),
        "depth": depth(c),
        "lines": len(c.lines),
        "outputs": c.outputs,
    }


def stats_json(c: Circuit) -> str:
    return json.dumps(stats(c), indent=2, sort_keys=True)


def commutes(a: Gate, b: Gate) -> bool:
    """Sufficient condition for two gates to commute.

    Rotations about one axis on a shared target commute, and sharing only a
    control is harmless; a gate whose target is the other's control does not
    commute with it in general.
    """
    if a.target == b.target:
        return a.axis == b.axis
    return a.target != b.control and b.target != a.control


def reschedule(c: Circuit) -> Circuit:
    """Reorder commuting gates to shrink depth (critical-path list scheduling).

    The result implements the same unitary: only pairs that :func:`commutes`
    accepts ever swap relative order.
    """
    gates = list(c.gates)
    n = len(gates)
    preds: List[List[int]] = [[] for _ in range(n)]
    succs: List[List[int]] = [[] for _ in range(n)]
    for j in range(n):
        for i in range(j):
            if not commutes(gates[i], gates[j]):
                preds[j].append(i)
                succs[i].append(j)
    height = [1] * n
    for i in reversed(range(n)):
        for j in succs[i]:
            height[i] = max(height[i], height[j] + 1)
    waiting = [len(p) for p in preds]
    ready = [i for i in range(n) if waiting[i] == 0]
    order: List[int] = []
    while ready:
        ready.sort(key=lambda i: (-height[i], i))
        busy = set()
        chosen = []
        for i in ready:
            if busy.isdisjoint(gates[i].lines):
                chosen.append(i)
                busy.update(gates[i].lines)
        for i in chosen:
            ready.remove(i)
            order.append(i)
        for i in chosen:
            for j in succs[i]:
                waiting[j] -= 1
                if waiting[j] == 0:
                    ready.append(j)
    return c.with_gates(gates[i] for i in order)


def concat(a: Circuit, b: Circuit) -> Circuit:
    if a.lines != b.lines:
        raise CircuitError("circuits have different lines")
    return a.with_gates(a.gates + b.gates)


# -- text format ------------------------------------------------------------

def write_text(c: Circuit) -> str:
    out = [HEADER, f"lines {len(c.lines)}"]
    for l in c.lines:
        parts = [f"line {l.index}", l.kind]
        if l.is_input:
            parts.append(l.name)
        if l.restore:
            parts.append("restore")
        if l.output is not None:
            parts += ["output", l.output]
        out.append(" ".join(parts))
    out.extend(str(g) for g in c.gates)
    return "\n".join(out) + "\n"


def _tokens(text: str):
    """Yield (line_no, [(col, token), ...]) for non-blank lines."""
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", body)]
        if toks:
            yield no, toks


def read_text(text: str) -> Circuit:
    items = list(_tokens(text))
    if not items or [t for _, t in items[0][1]] != HEADER.split():
        no, toks = items[0] if items else (1, [(1, "")])
        raise ParseError(f"expected header {HEADER!r}", no, toks[0][0])
    pos = 1

    def need_int(no, tok, lo=0, hi=None):
        col, s = tok
        try:
            v = int(s)
        except ValueError:
            raise ParseError(f"expected an integer, got {s!r}", no, col) from None
        if v < lo or (hi is not None and v >= hi):
            raise ParseError(f"value {v} out of range", no, col)
        return v

    if pos >= len(items) or items[pos][1][0][1] != "lines" or len(items[pos][1]) != 2:
        no, toks = items[pos] if pos < len(items) else (items[-1][0] + 1, [(1, "")])
        raise ParseError("expected 'lines N'", no, toks[0][0])
    n = need_int(items[pos][0], items[pos][1][1])
    pos += 1
    lines: List[Line] = []
    gates: List[Gate] = []
    for no, toks in items[pos:]:
        head = toks[0][1]
        if head == "line":
            lines.append(_parse_line(no, toks, len(lines), n, need_int))
        elif head == "gate":
            if len(lines) != n:
                raise ParseError(f"expected {n} line declarations before gates", no, toks[0][0])
            gates.append(_parse_gate(no, toks, n, need_int))
        else:
            raise ParseError(f"unknown item {head!r}", no, toks[0][0])
    if len(lines) != n:
        raise ParseError(f"expected {n} line declarations, found {len(lines)}",
                         items[-1][0], 1)
    try:
        return Circuit(tuple(lines), tuple(gates))
    except CircuitError as e:
        raise ParseError(str(e), items[-1][0], 1) from None


def _parse_line(no, toks, expect, n, need_int) -> Line:
    if len(toks) < 3:
        raise ParseError("incomplete line declaration", no, toks[-1][0])
    idx = need_int(no, toks[1], 0, n)
    if idx != expect:
        raise ParseError(f"expected line {expect}", no, toks[1][0])
    kind = toks[2][1]
    rest = toks[3:]
    name = None
    if kind == "input":
        if not rest:
            raise ParseError("input line needs a name", no, toks[2][0])
        name = rest[0][1]
        rest = rest[1:]
    elif kind != "ancilla":
        raise ParseError(f"expected input or ancilla, got {kind!r}", no, toks[2][0])
    restore, output = False, None
    if rest and rest[0][1] == "restore" and kind == "input":
        restore, rest = True, rest[1:]
    elif rest and rest[0][1] == "output":
        if len(rest) < 2:
            raise ParseError("output needs a name", no, rest[0][0])
        output, rest = rest[1][1], rest[2:]
    if rest:
        raise ParseError(f"unexpected {rest[0][1]!r}", no, rest[0][0])
    return Line(idx, kind, name, restore, output)


def _parse_gate(no, toks, n, need_int) -> Gate:
    kind_col, kind = toks[1] if len(toks) > 1 else (toks[0][0], "")
    if kind in ("rx", "rz"):
        want = 4
    elif kind in ("crx", "crz"):
        want = 5
    else:
        raise ParseError(f"unknown gate {kind!r}", no, kind_col)
    if len(toks) != want:
        raise ParseError(f"gate {kind} takes {want - 2} operands", no, toks[-1][0])
    acol, atext = toks[-1]
    try:
        angle = Angle.parse(atext)
    except AngleError as e:
        raise ParseError(str(e), no, acol) from None
    target = need_int(no, toks[-2], 0, n)
    control = need_int(no, toks[2], 0, n) if want == 5 else None
    try:
        return Gate(kind[-1], angle, target, control)
    except CircuitError as e:
        raise ParseError(str(e), no, toks[1][0]) from None


def compile(ff, inputs: Sequence[str], **opts) -> Circuit:
    """Compile a factored form; see :func:`rotsynth.compiler.compile_form`."""
    from .compiler import compile_form

    return compile_form(ff, inputs, **opts)
