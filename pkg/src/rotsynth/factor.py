"""Recursive bi-decomposition of diagrams into factored rotation forms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Tuple, Union

from .angle import PI, ZERO, Angle, half_difference
from .rbdd import Diagram, DiagramError, Manager


class ChainError(DiagramError):
    """bi_decompose was asked to split a diagram that is already a chain."""


@dataclass(frozen=True)
class CascadeExpr:
    """``R(prefix) [v1 R(t1) [v2 R(t2) [... 0^]]]``; terms are outermost first."""

    prefix: Angle
    terms: Tuple[Tuple[str, Angle], ...]
    axis: str = "x"

    def variables(self):
        return [v for v, _ in self.terms]

    def eval(self, assignment: Mapping[str, int]) -> Angle:
        total = self.prefix
        for v, t in self.terms:
            if assignment[v]:
                total = total + t
        return total


@dataclass(frozen=True)
class Leaf:
    cascade: CascadeExpr


@dataclass(frozen=True)
class BiDecomp:
    """``control R(gamma) rest`` with a Boolean-valued control."""

    control: "FactoredForm"
    gamma: Angle
    rest: "FactoredForm"


FactoredForm = Union[Leaf, BiDecomp]

SplitHook = Callable[[Manager, Diagram, int, Diagram, Angle, Diagram], None]


def select_classes(mgr: Manager, d: Diagram, vk: int) -> Tuple[Angle, Angle]:
    """Pick (alpha1, alpha2): 0 first if present, then smallest by value."""
    classes = mgr.angle_classes(d, vk)
    if len(classes) < 2:
        raise ChainError(f"{mgr.name(vk)} is r-linear")
    a1 = ZERO if ZERO in classes else classes[0]
    a2 = next(a for a in classes if a != a1)
    return a1, a2


def bi_decompose(mgr: Manager, d: Diagram, vk=None):
    """Split ``d`` as ``g1 R(gamma) h`` around its lowest r-nonlinear variable.

    ``g1`` is normalized so that it takes value 0 on the all-zero
    assignment; when the raw extraction comes out complemented we flip it
    and negate gamma, which leaves the identity intact and keeps the signs
    of well-known decompositions (Toffoli, carry) stable.
    """
    if vk is None:
        vk = mgr.lowest_rnonlinear(d)
        if vk is None:
            raise ChainError("diagram is a chain; use to_cascade")
    vk = mgr.index(vk)
    a1, a2 = select_classes(mgr, d, vk)
    g1 = mgr.g1_extract(d, vk, a1)
    gamma = half_difference(a2, a1)
    if g1.weight == PI:
        g1 = mgr.complement(g1)
        gamma = -gamma
    h = mgr.apply(g1, -gamma, d)
    return g1, gamma, h


def factor(mgr: Manager, d: Diagram, on_split: Optional[SplitHook] = None) -> FactoredForm:
    """Factor ``d`` until every leaf is a cascade expression."""
    memo = {}

    def go(x: Diagram) -> FactoredForm:
        hit = memo.get(x)
        if hit is not None:
            return hit
        cascade = mgr.to_cascade(x)
        if cascade is not None:
            out: FactoredForm = Leaf(cascade)
        else:
            vk = mgr.lowest_rnonlinear(x)
            g1, gamma, h = bi_decompose(mgr, x, vk)
            if on_split is not None:
                on_split(mgr, x, vk, g1, gamma, h)
            out = BiDecomp(go(g1), gamma, go(h))
        memo[x] = out
        return out

    return go(d)


def check_split(mgr: Manager, d: Diagram, vk: int, g1: Diagram, gamma: Angle, h: Diagram):
    """Assert the guarantees of one bi-decomposition step.

    Usable directly as the ``on_split`` hook of :func:`factor`.
    """
    assert mgr.apply(g1, gamma, h) == d, "recomposition failed"
    assert mgr.is_boolean(g1), "g1 is not Boolean"
    assert all(v <= vk for v in mgr.support(g1)), "g1 depends on later variables"
    assert vk in mgr.support(g1), "g1 does not depend on the pivot"
    assert mgr.r_degree(g1, vk) == 0, "pivot is r-nonlinear in g1"
    for v in range(vk + 1, len(mgr.names)):
        assert mgr.r_degree(h, v) == 0, f"{mgr.name(v)} r-nonlinear in h"
    assert mgr.r_degree(h, vk) < mgr.r_degree(d, vk), "r-degree did not drop"


def eval_form(ff: FactoredForm, assignment: Mapping[str, int]) -> Angle:
    if isinstance(ff, Leaf):
        return ff.cascade.eval(assignment)
    base = eval_form(ff.rest, assignment)
    if eval_form(ff.control, assignment) == PI:
        return base + ff.gamma
    return base


def spine(ff: FactoredForm):
    """Flatten ``g1 R(y1) [g2 R(y2) [... leaf]]`` into ([(g_i, y_i)], leaf)."""
    steps = []
    while isinstance(ff, BiDecomp):
        steps.append((ff.control, ff.gamma))
        ff = ff.rest
    return steps, ff.cascade


def form_size(ff: FactoredForm) -> int:
    """Number of cascade terms plus bi-decomposition rotations."""
    if isinstance(ff, Leaf):
        return len(ff.cascade.terms) + (0 if ff.cascade.prefix.is_zero() else 1)
    return form_size(ff.control) + 1 + form_size(ff.rest)


def format_cascade(c: CascadeExpr) -> str:
    r = "R" + c.axis[-1]
    out = "0^"
    for v, t in reversed(c.terms):
        out = f"{v} {r}({t}) [{out}]"
    if not c.prefix.is_zero():
        out = f"{r}({c.prefix}) [{out}]"
    return out


def format_form(ff: FactoredForm, axis: str = "x") -> str:
    """Bracket notation, e.g. ``[a Rx(1) [b Rx(1) [0^]]] Rx(-1/2) [...]``."""
    if isinstance(ff, Leaf):
        return format_cascade(ff.cascade)
    r = "R" + axis[-1]
    return f"[{format_form(ff.control, 'x')}] {r}({ff.gamma}) [{format_form(ff.rest, axis)}]"
