"""Rotation-based decision diagrams (RbDDs).

A diagram maps bit assignments to angles. Every internal node carries a
decision variable, an unweighted 0-edge and a weighted 1-edge; the value of
an assignment is the root weight plus the weights of the 1-edges taken along
its path. All weight is kept off 0-edges (``mk_node`` pushes the 0-child's
weight up to the parent), so hash-consing alone makes diagrams canonical:
two functions are equal iff their :class:`Diagram` handles are equal.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .angle import PI, ZERO, Angle

logger = logging.getLogger(__name__)

TERMINAL = 0


class DiagramError(Exception):
    """Base class for diagram errors."""


class OrderError(DiagramError):
    """A node would violate the variable order."""


class NotBooleanError(DiagramError):
    """A diagram used as a control takes a value other than 0 or pi."""


class TableError(DiagramError):
    """A truth table is incomplete or has duplicate rows."""


@dataclass(frozen=True)
class Node:
    var: int
    lo: int
    hi: int
    hi_weight: Angle


@dataclass(frozen=True)
class Diagram:
    """Root-weighted reference into a :class:`Manager` node store."""

    weight: Angle
    node: int

    @property
    def is_constant(self) -> bool:
        return self.node == TERMINAL


class Manager:
    """Node store, unique table and apply memo for one variable order.

    ``axis`` is metadata only ("x" or "z"); weights add identically for
    both rotation axes.
    """

    def __init__(self, names: Sequence[str], axis: str = "x"):
        if len(set(names)) != len(names):
            raise DiagramError(f"duplicate variable names in {list(names)}")
        self.names: List[str] = list(names)
        self.axis = axis
        self._index = {n: i for i, n in enumerate(self.names)}
        # slot 0 is the terminal; never read as a Node
        self._nodes: List[Optional[Node]] = [None]
        self._unique: Dict[Tuple[int, int, int, Angle], int] = {}
        self._apply_memo: Dict[tuple, Diagram] = {}

    # -- store -------------------------------------------------------------

    def __len__(self):
        return len(self._nodes) - 1

    def index(self, name) -> int:
        if isinstance(name, int):
            return name
        return self._index[name]

    def name(self, var: int) -> str:
        return self.names[var]

    def node(self, ref: int) -> Node:
        return self._nodes[ref]

    def var_of(self, ref: int) -> int:
        """Level of a node; the terminal sits below every variable."""
        if ref == TERMINAL:
            return len(self.names)
        return self._nodes[ref].var

    def constant(self, angle: Angle = ZERO) -> Diagram:
        return Diagram(angle, TERMINAL)

    def var(self, name) -> Diagram:
        """Diagram of a single Boolean variable (value pi when it is 1)."""
        v = self.index(name)
        return self.mk_node(v, self.constant(ZERO), self.constant(PI))

    def mk_node(self, var: int, lo: Diagram, hi: Diagram) -> Diagram:
        """Canonical node for ``var`` with the given 0- and 1-cofactors."""
        var = self.index(var)
        if not (var < self.var_of(lo.node) and var < self.var_of(hi.node)):
            raise OrderError(
                f"variable {self.names[var]} must precede its children")
        w = hi.weight - lo.weight
        if lo.node == hi.node and w.is_zero():
            return lo
        key = (var, lo.node, hi.node, w)
        ref = self._unique.get(key)
        if ref is None:
            ref = len(self._nodes)
            self._nodes.append(Node(var, lo.node, hi.node, w))
            self._unique[key] = ref
        return Diagram(lo.weight, ref)

    # -- construction and evaluation ---------------------------------------

    def from_table(self, rows: Mapping) -> Diagram:
        """Build the diagram of a complete table ``assignment -> Angle``.

        Keys may be bit strings (``"011"``) or tuples of bits, in the
        manager's variable order.
        """
        n = len(self.names)
        table: Dict[Tuple[int, ...], Angle] = {}
        for key, value in rows.items():
            bits = _bits(key, n)
            if bits in table:
                raise TableError(f"duplicate row {_fmt(bits)}")
            table[bits] = value
        if len(table) != 1 << n:
            missing = next(b for b in _all_bits(n) if b not in table)
            raise TableError(f"missing row {_fmt(missing)}")
        return self._build(table, 0, ())

    def _build(self, table, level, prefix) -> Diagram:
        if level == len(self.names):
            return self.constant(table[prefix])
        lo = self._build(table, level + 1, prefix + (0,))
        hi = self._build(table, level + 1, prefix + (1,))
        return self.mk_node(level, lo, hi)

    def from_function(self, fn) -> Diagram:
        """Build from a callable mapping a bit tuple to an Angle."""
        return self.from_table({b: fn(b) for b in _all_bits(len(self.names))})

    def eval(self, d: Diagram, assignment) -> Angle:
        bits = self._assignment_bits(assignment)
        total = d.weight
        ref = d.node
        while ref != TERMINAL:
            nd = self._nodes[ref]
            if bits[nd.var]:
                total = total + nd.hi_weight
                ref = nd.hi
            else:
                ref = nd.lo
        return total

    def table(self, d: Diagram) -> Dict[Tuple[int, ...], Angle]:
        return {b: self.eval(d, b) for b in _all_bits(len(self.names))}

    def _assignment_bits(self, assignment) -> Tuple[int, ...]:
        if isinstance(assignment, Mapping):
            return tuple(int(assignment[n]) for n in self.names)
        return _bits(assignment, len(self.names))

    def rotate(self, d: Diagram, gamma: Angle) -> Diagram:
        """Diagram of ``R(gamma) d``: only the root weight changes."""
        return Diagram(d.weight + gamma, d.node)

    def complement(self, d: Diagram) -> Diagram:
        return self.rotate(d, PI)

    # -- Boolean test ------------------------------------------------------

    def non_boolean_value(self, d: Diagram) -> Optional[Angle]:
        """Some path value outside {0, pi}, or None if ``d`` is Boolean."""
        seen = set()
        stack = [(d.node, d.weight)]
        while stack:
            ref, off = stack.pop()
            if (ref, off) in seen:
                continue
            seen.add((ref, off))
            if ref == TERMINAL:
                if not (off.is_zero() or off == PI):
                    return off
                continue
            nd = self._nodes[ref]
            stack.append((nd.lo, off))
            stack.append((nd.hi, off + nd.hi_weight))
        return None

    def is_boolean(self, d: Diagram) -> bool:
        return self.non_boolean_value(d) is None

    # -- apply -------------------------------------------------------------

    def apply(self, f: Diagram, gamma: Angle, g: Diagram) -> Diagram:
        """Diagram of ``f R(gamma) g``: g plus gamma wherever f is pi.

        ``f`` must be Boolean-valued.
        """
        bad = self.non_boolean_value(f)
        if bad is not None:
            raise NotBooleanError(f"control takes non-Boolean value {bad}")
        if gamma.is_zero():
            return g
        return self._apply(f, gamma, g)

    def _apply(self, f: Diagram, gamma: Angle, g: Diagram) -> Diagram:
        if f.node == TERMINAL:
            # terminal conditions: 0 R(t) v = v, 1 R(t) v = R(t) v
            return self.rotate(g, gamma) if f.weight == PI else g
        # g's root weight is additive and factors out of the recursion
        key = (f, gamma, g.node)
        hit = self._apply_memo.get(key)
        if hit is None:
            top = min(self.var_of(f.node), self.var_of(g.node))
            f0, f1 = self._cofactors(f, top)
            g0, g1 = self._cofactors(Diagram(ZERO, g.node), top)
            lo = self._apply(f0, gamma, g0)
            hi = self._apply(f1, gamma, g1)
            hit = self.mk_node(top, lo, hi)
            self._apply_memo[key] = hit
        return self.rotate(hit, g.weight)

    def _cofactors(self, d: Diagram, var: int) -> Tuple[Diagram, Diagram]:
        if d.node == TERMINAL or self._nodes[d.node].var != var:
            return d, d
        nd = self._nodes[d.node]
        return Diagram(d.weight, nd.lo), Diagram(d.weight + nd.hi_weight, nd.hi)

    # -- structure ---------------------------------------------------------

    def reachable(self, d: Diagram) -> List[int]:
        """Internal node refs reachable from ``d``, parents before children."""
        order: List[int] = []
        seen = set()

        def visit(ref):
            if ref == TERMINAL or ref in seen:
                return
            seen.add(ref)
            nd = self._nodes[ref]
            visit(nd.lo)
            visit(nd.hi)
            order.append(ref)

        visit(d.node)
        order.reverse()
        return order

    def support(self, d: Diagram) -> List[int]:
        return sorted({self._nodes[r].var for r in self.reachable(d)})

    def count_nodes_with_var(self, d: Diagram, v) -> Tuple[int, bool]:
        """Number of nodes labelled ``v`` and whether some path skips them all."""
        v = self.index(v)
        m = sum(1 for r in self.reachable(d) if self._nodes[r].var == v)
        bypassed = False
        stack, seen = [d.node], set()
        while stack:
            ref = stack.pop()
            if ref in seen:
                continue
            seen.add(ref)
            if self.var_of(ref) > v:
                bypassed = True
                break
            nd = self._nodes[ref]
            if nd.var == v:
                continue
            stack.extend((nd.lo, nd.hi))
        return m, bypassed

    def angle_classes(self, d: Diagram, v) -> List[Angle]:
        """Distinct 1-edge angles of ``v`` nodes, plus 0 if ``v`` is bypassed.

        Sorted by value.
        """
        v = self.index(v)
        angles = {self._nodes[r].hi_weight for r in self.reachable(d)
                  if self._nodes[r].var == v}
        _, bypassed = self.count_nodes_with_var(d, v)
        if bypassed:
            angles.add(ZERO)
        return sorted(angles, key=lambda a: a.fraction)

    def r_degree(self, d: Diagram, v) -> int:
        return len(self.angle_classes(d, v)) - 1

    def lowest_rnonlinear(self, d: Diagram) -> Optional[int]:
        """Scanning from the last variable up, the first r-nonlinear one."""
        for v in reversed(range(len(self.names))):
            if self.r_degree(d, v) > 0:
                return v
        return None

    def to_cascade(self, d: Diagram):
        """Cascade expression of a chain diagram, or None if not a chain."""
        from .factor import CascadeExpr

        if self.lowest_rnonlinear(d) is not None:
            return None
        terms = []
        for v in self.support(d):
            (angle,) = self.angle_classes(d, v)
            terms.append((self.names[v], angle))
        return CascadeExpr(d.weight, tuple(terms), self.axis)

    def g1_extract(self, d: Diagram, vk, alpha1: Angle) -> Diagram:
        """Boolean diagram ``vk XOR g`` where g marks the ``alpha1`` class.

        Every path of ``d`` either meets a ``vk`` node (class = that node's
        1-edge angle) or bypasses ``vk`` (class 0). Nodes above ``vk`` keep
        their structure with weights cleared, each ``vk``-level edge is
        redirected to a fresh ``vk`` node with weight pi for the ``alpha1``
        class and 0 otherwise, and the result is re-reduced.
        """
        vk = self.index(vk)
        if alpha1 not in self.angle_classes(d, vk):
            raise DiagramError(
                f"{alpha1} is not an angle class of {self.names[vk]}")
        memo: Dict[int, Diagram] = {}

        def rebuild(ref: int) -> Diagram:
            if ref in memo:
                return memo[ref]
            if self.var_of(ref) > vk:
                cls = ZERO
            elif self._nodes[ref].var == vk:
                cls = self._nodes[ref].hi_weight
            else:
                nd = self._nodes[ref]
                out = self.mk_node(nd.var, rebuild(nd.lo), rebuild(nd.hi))
                memo[ref] = out
                return out
            out = self.constant(PI if cls == alpha1 else ZERO)
            memo[ref] = out
            return out

        g = rebuild(d.node)
        return self.apply(self.var(vk), PI, g)

    # -- debugging ---------------------------------------------------------

    def to_dot(self, d: Diagram, name: str = "rbdd") -> str:
        lines = [f"digraph {name} {{", '  root [shape=plaintext, label="%s"];' % d.weight,
                 '  t [shape=box, label="0^"];']

        def ident(ref):
            return "t" if ref == TERMINAL else f"n{ref}"

        lines.append(f"  root -> {ident(d.node)};")
        for ref in self.reachable(d):
            nd = self._nodes[ref]
            lines.append(f'  n{ref} [label="{self.names[nd.var]}"];')
            lines.append(f"  n{ref} -> {ident(nd.lo)} [style=dashed];")
            label = "" if nd.hi_weight.is_zero() else f' label="{nd.hi_weight}"'
            lines.append(f"  n{ref} -> {ident(nd.hi)} [{label.strip()}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _all_bits(n: int) -> Iterable[Tuple[int, ...]]:
    for k in range(1 << n):
        yield tuple((k >> (n - 1 - i)) & 1 for i in range(n))


def all_assignments(n: int) -> List[Tuple[int, ...]]:
    """All bit tuples of length ``n``, first variable most significant."""
    return list(_all_bits(n))


def _bits(key, n: int) -> Tuple[int, ...]:
    if isinstance(key, str):
        if len(key) != n or any(c not in "01" for c in key):
            raise TableError(f"bad assignment {key!r} for {n} variables")
        return tuple(int(c) for c in key)
    bits = tuple(int(b) for b in key)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise TableError(f"bad assignment {key!r} for {n} variables")
    return bits


def _fmt(bits) -> str:
    return "".join(str(b) for b in bits)
