"""Emit controlled-rotation gates for factored forms.

Each line's content is tracked symbolically as a diagram over the circuit
inputs, so the compiler knows which Boolean functions are currently held
and can reuse partial results. A control ``g`` of a bi-decomposition is
materialized in place on the line of its innermost ``(v, pi)`` cascade term
when that line still holds ``v``, and on an ancilla otherwise. All
materialization gates of an output form its network, which is undone at
the end when inputs are to be restored.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set

from .angle import PI, ZERO, Angle
from .circuit import Circuit, CircuitError, Gate, Line
from .factor import FactoredForm, Leaf, spine
from .rbdd import Diagram, Manager

logger = logging.getLogger(__name__)


class CompileError(CircuitError):
    pass


class _Stuck(Exception):
    """A needed function is no longer held by any line."""


@dataclass
class _LineState:
    kind: str
    name: Optional[str]
    output: Optional[str] = None


class Builder:
    """Incrementally compiles one or more outputs onto a shared set of lines."""

    def __init__(self, inputs: Sequence[str], max_ancillae: Optional[int] = None):
        self.mgr = Manager(list(inputs))
        self.lines: List[_LineState] = [_LineState("input", n) for n in inputs]
        self.content: List[Optional[Diagram]] = [self.mgr.var(n) for n in inputs]
        self.gates: List[Gate] = []
        self.max_ancillae = max_ancillae
        self.busy: Set[int] = set()
        self._forms: Dict[FactoredForm, Diagram] = {}

    # -- bookkeeping -------------------------------------------------------

    def diagram(self, ff: FactoredForm) -> Diagram:
        hit = self._forms.get(ff)
        if hit is not None:
            return hit
        if isinstance(ff, Leaf):
            c = ff.cascade
            d = self.mgr.constant(c.prefix)
            for v, t in reversed(c.terms):
                d = self.mgr.apply(self.mgr.var(v), t, d)
        else:
            d = self.mgr.apply(self.diagram(ff.control), ff.gamma, self.diagram(ff.rest))
        self._forms[ff] = d
        return d

    def emit(self, axis: str, angle: Angle, target: int, control: Optional[int] = None,
             network: Optional[List[Gate]] = None):
        if angle.is_zero():
            return
        g = Gate(axis, angle, target, control)
        self.gates.append(g)
        if network is not None:
            network.append(g)
        self._track(g)

    def _track(self, g: Gate):
        cur = self.content[g.target]
        if g.axis == "z" or cur is None:
            self.content[g.target] = None
            return
        if g.control is None:
            self.content[g.target] = self.mgr.rotate(cur, g.angle)
        else:
            ctl = self.content[g.control]
            if ctl is None or not self.mgr.is_boolean(ctl):
                raise CompileError(f"line {g.control} does not hold a Boolean value")
            self.content[g.target] = self.mgr.apply(ctl, g.angle, cur)

    def find(self, d: Diagram, exclude=()) -> Optional[int]:
        for i, c in enumerate(self.content):
            if c == d and i not in exclude:
                return i
        return None

    def var_line(self, v: str) -> Optional[int]:
        return self.find(self.mgr.var(v))

    def ancilla(self) -> int:
        zero = self.mgr.constant(ZERO)
        for i, st in enumerate(self.lines):
            if (st.kind == "ancilla" and st.output is None and i not in self.busy
                    and self.content[i] == zero):
                return i
        used = sum(1 for st in self.lines if st.kind == "ancilla")
        if self.max_ancillae is not None and used >= self.max_ancillae:
            raise CompileError("no consumable line and no ancilla budget left")
        self.lines.append(_LineState("ancilla", None))
        self.content.append(zero)
        return len(self.lines) - 1

    def snapshot(self):
        return len(self.gates), list(self.content), len(self.lines)

    def rollback(self, snap):
        n_gates, content, n_lines = snap
        del self.gates[n_gates:]
        self.content = content
        del self.lines[n_lines:]

    def uncompute(self, network: List[Gate]):
        for g in reversed(network):
            self.emit(g.axis, -g.angle, g.target, g.control)
        network.clear()

    # -- compilation -------------------------------------------------------

    def add_output(self, name: str, ff: FactoredForm, zform: Optional[FactoredForm] = None,
                   restore: bool = True, inplace: bool = True,
                   keep: Sequence[str] = ()) -> int:
        """Compile one output and bind it to a line; returns that line.

        ``zform`` adds a Z-axis stage after the X stage. Variables in
        ``keep`` are needed by later outputs, so their lines are never
        consumed and, without restore, never modified.
        """
        if any(st.output == name for st in self.lines):
            raise CompileError(f"output {name!r} already bound")
        keep = set(keep)
        snap = self.snapshot()
        for force in (False, True):
            try:
                t = self._target(ff, inplace and not force, keep)
                self.busy.add(t)
                self._stage("x", ff, t, restore, keep, force, elided=self._elided(ff, t))
                if zform is not None:
                    self._stage("z", zform, t, restore, keep, force, elided=False)
                break
            except _Stuck:
                self.busy.discard(t)
                self.rollback(snap)
                logger.debug("output %s: retrying with ancillae only", name)
        else:  # pragma: no cover - force mode never gets stuck
            raise CompileError(f"could not compile output {name!r}")
        self.busy.discard(t)
        self.lines[t].output = name
        return t

    def _innermost_pi(self, ff: FactoredForm) -> Optional[str]:
        _, leaf = spine(ff)
        if leaf.terms and leaf.terms[-1][1] == PI:
            return leaf.terms[-1][0]
        return None

    def _target(self, ff, inplace, keep) -> int:
        v = self._innermost_pi(ff) if inplace else None
        if v is not None and v not in keep:
            i = self.var_line(v)
            if i is not None and self.lines[i].kind == "input" and self.lines[i].output is None:
                return i
        return self.ancilla()

    def _elided(self, ff, t) -> bool:
        v = self._innermost_pi(ff)
        return v is not None and self.content[t] == self.mgr.var(v)

    def _stage(self, axis, ff, t, restore, keep, force, elided):
        network: List[Gate] = []
        self._emit_form(axis, ff, t, network, elided, keep, force, restore)
        if restore:
            self.uncompute(network)

    def _emit_form(self, axis, ff, t, network, elided, keep, force, restore,
                   record: Optional[List[Gate]] = None):
        """Emit ``ff`` onto line ``t``; gates go to ``record`` if given."""
        steps, leaf = spine(ff)
        terms = list(leaf.terms)
        if elided:
            terms.pop()
        for v, theta in reversed(terms):
            c = self.var_line(v)
            if c is None or c == t:
                raise _Stuck(v)
            self.emit(axis, theta, t, c, record)
        self.emit(axis, leaf.prefix, t, None, record)

        pending = [(self.diagram(g), g, gamma) for g, gamma in steps]
        top = record is None
        while pending:
            self._flush(axis, pending, t, record)
            if not pending:
                break
            d, g, gamma = pending[0]
            self._materialize(g, d, t, network, keep, force, restore, top)
            self._flush(axis, pending, t, record)
            if pending and pending[0][0] == d:  # pragma: no cover
                raise CompileError("materialized control is not held")

    def _flush(self, axis, pending, t, record):
        """Emit every pending control currently held by some line."""
        for item in list(pending):
            d, _, gamma = item
            c = self.find(d, exclude=(t,))
            if c is not None:
                self.emit(axis, gamma, t, c, record)
                pending.remove(item)

    def _materialize(self, g: FactoredForm, d: Diagram, t: int, network: List[Gate],
                     keep, force, restore, top: bool):
        """Compute Boolean ``g`` onto some line, recording the gates.

        When a needed function has been overwritten by earlier in-place
        work, the top level undoes the whole network so far and retries
        from pristine inputs; nested levels just report failure upward.
        """
        for attempt in (0, 1):
            snap = self.snapshot()
            mark = len(network)
            line = None
            try:
                line = self._host(g, t, keep, force, restore)
                self.busy.add(line)
                elided = not force and self._elided(g, line)
                self._emit_form("x", g, line, network, elided, keep, force, restore,
                                record=network)
                self.busy.discard(line)
                return line
            except _Stuck:
                if line is not None:
                    self.busy.discard(line)
                self.rollback(snap)
                del network[mark:]
                if force or attempt or not top or not restore:
                    raise
                self.uncompute(network)

    def _host(self, g, t, keep, force, restore) -> int:
        v = None if force else self._innermost_pi(g)
        if v is not None and (restore or v not in keep):
            i = self.var_line(v)
            if i is not None and i != t and i not in self.busy \
                    and self.lines[i].output is None:
                return i
        return self.ancilla()

    # -- result --------------------------------------------------------------

    def circuit(self, restore_flags: bool = True) -> Circuit:
        """Freeze into a :class:`Circuit`.

        Unbound inputs still holding their own variable are marked restored.
        """
        lines = []
        for i, st in enumerate(self.lines):
            restored = (restore_flags and st.kind == "input" and st.output is None
                        and self.content[i] == self.mgr.var(st.name))
            lines.append(Line(i, st.kind, st.name, restored, st.output))
        return Circuit(tuple(lines), tuple(self.gates))


def compile_form(ff: FactoredForm, inputs: Sequence[str], output: str = "f",
                 restore_inputs: bool = True, inplace_target: bool = True,
                 zform: Optional[FactoredForm] = None,
                 max_ancillae: Optional[int] = None) -> Circuit:
    """Compile one factored form into a circuit over ``inputs``.

    Simulating the result on hat-basis input U leaves the output line in
    ``R(eval_form(ff, U)) 0^`` (preceded by ``zform``'s Z rotation when
    given), and restores unbound inputs when ``restore_inputs`` is set.
    """
    b = Builder(inputs, max_ancillae)
    b.add_output(output, ff, zform, restore_inputs, inplace_target)
    return b.circuit()
