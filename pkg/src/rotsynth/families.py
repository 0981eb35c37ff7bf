"""Generators for the benchmark circuit families and their cost formulas.

The generators write down the known closed-form factored structures
directly instead of re-deriving them from truth tables, so gate counts are
deterministic.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .angle import PI, ZERO, Angle
from .circuit import Circuit, Gate, Line, merge_rotations, reschedule
from .compiler import Builder
from .factor import BiDecomp, CascadeExpr, FactoredForm, Leaf


class FamilyError(ValueError):
    pass


def _pow2(k: int) -> Angle:
    """pi / 2**k."""
    return Angle(1, 1 << k)


# -- multiple-control Toffoli ---------------------------------------------

def toffoli_form(controls: Sequence[str], target: str) -> FactoredForm:
    """Factored form of ``target XOR AND(controls)`` (value pi when true).

    With n controls i1..in the leaf gives i1 the angle pi/2^(n-1), i_m the
    angle pi/2^(n-m+1) for m >= 2 and the target pi; the k-th control term
    is the Toffoli on the first n-k controls targeting control n-k+1, with
    rotation -pi/2^k.
    """
    n = len(controls)
    if n == 0:
        return Leaf(CascadeExpr(ZERO, ((target, PI),)))
    if n == 1:
        return Leaf(CascadeExpr(ZERO, ((controls[0], PI), (target, PI))))
    terms = [(controls[0], _pow2(n - 1))]
    terms += [(controls[m - 1], _pow2(n - m + 1)) for m in range(2, n + 1)]
    terms.append((target, PI))
    ff: FactoredForm = Leaf(CascadeExpr(ZERO, tuple(terms)))
    for k in range(n - 1, 0, -1):
        ctl = toffoli_form(controls[:n - k], controls[n - k])
        ff = BiDecomp(ctl, -_pow2(k), ff)
    return ff


def toffoli_names(n: int) -> List[str]:
    return [f"i{m}" for m in range(1, n + 1)] + ["j"]


@lru_cache(maxsize=None)
def _toffoli_gates(n: int) -> Tuple[Gate, ...]:
    names = toffoli_names(n)
    b = Builder(names)
    b.add_output("r", toffoli_form(names[:-1], names[-1]), restore=True)
    return tuple(b.gates)


def gen_toffoli(n: int) -> Circuit:
    """C^n NOT on lines i1..in, j with no ancilla; controls are restored."""
    if n < 1:
        raise FamilyError("a Toffoli gate needs at least one control")
    names = toffoli_names(n)
    lines = [Line(i, "input", v, restore=(v != "j")) for i, v in enumerate(names)]
    lines[-1] = Line(n, "input", "j", output="r")
    return Circuit(tuple(lines), _toffoli_gates(n), (("family", f"toffoli {n}"),))


def toffoli_gates_on(controls: Sequence[int], target: int) -> List[Gate]:
    """The gen_toffoli gate list remapped onto arbitrary lines."""
    n = len(controls)
    mapping = list(controls) + [target]
    return [Gate(g.axis, g.angle, mapping[g.target],
                 None if g.control is None else mapping[g.control])
            for g in _toffoli_gates(n)]


# -- ripple-carry adder -----------------------------------------------------

def adder_names(n: int) -> List[str]:
    out = []
    for i in range(n):
        out += [f"a{i}", f"b{i}"]
    return out


def adder_forms(n: int) -> List[Tuple[str, FactoredForm]]:
    """Factored forms of s0..s_{n-1} and the carry c.

    Bit i is ``a_i + b_i + sum_{j<i} (a_j + b_j - s_j) / 2^(i-j)`` in units
    of pi; the carry is the same sum at i = n without the a_n, b_n terms.
    Earlier sums appear as control variables named ``s<j>``.
    """
    forms = []
    for i in range(n + 1):
        terms = []
        for j in range(i):
            terms += [(f"a{j}", _pow2(i - j)), (f"b{j}", _pow2(i - j))]
        if i < n:
            terms += [(f"a{i}", PI), (f"b{i}", PI)]
        ff: FactoredForm = Leaf(CascadeExpr(ZERO, tuple(terms)))
        for j in range(i):
            ctl = Leaf(CascadeExpr(ZERO, ((f"s{j}", PI),)))
            ff = BiDecomp(ctl, -_pow2(i - j), ff)
        forms.append((f"s{i}" if i < n else "c", ff))
    return forms


def gen_adder(n: int, schedule: bool = True) -> Circuit:
    """n-bit ripple-carry adder: b_i becomes s_i, an ancilla holds the carry.

    All leaf gates come first, with the carry and then s_{n-1} down to s_0,
    so every b line is still pristine when read; then the correction terms
    controlled by finished sums, in increasing bit order. ``schedule``
    reorders commuting gates to reduce depth.
    """
    if n < 1:
        raise FamilyError("adder needs at least one bit")
    a = [2 * i for i in range(n)]
    b = [2 * i + 1 for i in range(n)]
    c = 2 * n
    gates: List[Gate] = []
    for j in range(n):
        gates.append(Gate("x", _pow2(n - j), c, a[j]))
        gates.append(Gate("x", _pow2(n - j), c, b[j]))
    for i in reversed(range(n)):
        for j in range(i):
            gates.append(Gate("x", _pow2(i - j), b[i], a[j]))
            gates.append(Gate("x", _pow2(i - j), b[i], b[j]))
        gates.append(Gate("x", PI, b[i], a[i]))
    for i in range(1, n + 1):
        t = c if i == n else b[i]
        for j in range(i):
            gates.append(Gate("x", -_pow2(i - j), t, b[j]))
    lines = []
    for i in range(n):
        lines.append(Line(a[i], "input", f"a{i}", restore=True))
        lines.append(Line(b[i], "input", f"b{i}", output=f"s{i}"))
    lines.append(Line(c, "ancilla", output="c"))
    circ = Circuit(tuple(lines), tuple(gates), (("family", f"adder {n}"),))
    return reschedule(circ) if schedule else circ


# -- multiplexer -------------------------------------------------------------

def mux2_form() -> FactoredForm:
    """``f = s x1 + !s x2`` as [s^x2] R(pi/2) [[s^x1] R(-pi/2) [x1 R(pi/2) [x2 R(pi/2) 0^]]]."""
    half = Angle(1, 2)
    leaf = Leaf(CascadeExpr(ZERO, (("x1", half), ("x2", half))))
    g2 = Leaf(CascadeExpr(ZERO, (("s", PI), ("x1", PI))))
    g1 = Leaf(CascadeExpr(ZERO, (("s", PI), ("x2", PI))))
    return BiDecomp(g1, half, BiDecomp(g2, -half, leaf))


def mux_names(n: int) -> Tuple[List[str], List[str]]:
    k = n.bit_length() - 1
    sel = ["s"] if n == 2 else [f"s{i}" for i in range(1, k + 1)]
    return sel, [f"x{i}" for i in range(1, n + 1)]


def selected(n: int, select_bits: Sequence[int]) -> int:
    """1-based index of the data input picked by ``select_bits`` (MSB first)."""
    value = 0
    for bit in select_bits:
        value = 2 * value + bit
    return n - value


def gen_mux(n: int) -> Circuit:
    """n-to-1 multiplexer onto one ancilla; data lines are left transformed.

    Data input x_i is selected when the select bits read n - i in binary.
    For n >= 4 each x_i is XORed with its select condition by a C^k NOT
    (selects negated around it as needed), after which the same two
    rotations per input as in the 2-to-1 case finish the job.
    """
    if n < 2 or n & (n - 1):
        raise FamilyError(f"multiplexer size must be a power of two >= 2, got {n}")
    sel, data = mux_names(n)
    if n == 2:
        b = Builder(sel + data)
        b.add_output("f", mux2_form(), restore=False)
        circ = b.circuit()
        return Circuit(circ.lines, circ.gates, (("family", "mux 2"),))
    k = len(sel)
    s_lines = list(range(k))
    x_lines = [k + i for i in range(n)]
    anc = k + n
    half = Angle(1, 2)
    gates: List[Gate] = [Gate("x", half, anc, x) for x in x_lines]
    for i in range(1, n + 1):
        code = format(n - i, f"0{k}b")
        flips = [s_lines[p] for p, bit in enumerate(code) if bit == "0"]
        gates += [Gate("x", PI, s) for s in flips]
        gates += toffoli_gates_on(s_lines, x_lines[i - 1])
        gates += [Gate("x", PI, s) for s in flips]
        gates.append(Gate("x", -half, anc, x_lines[i - 1]))
    gates.append(Gate("x", half, anc))
    lines = [Line(i, "input", s, restore=True) for i, s in enumerate(sel)]
    lines += [Line(k + i, "input", x) for i, x in enumerate(data)]
    lines.append(Line(anc, "ancilla", output="f"))
    return Circuit(tuple(lines), tuple(gates), (("family", f"mux {n}"),))


# -- quantum Fourier transform ----------------------------------------------

def qft_phase_cascade(n: int, l: int) -> CascadeExpr:
    """Z-axis cascade of ``2 pi 0.j_l ... j_n`` over j_l..j_n (l is 1-based)."""
    from .rbdd import Manager

    names = [f"j{m}" for m in range(l, n + 1)]
    mgr = Manager(names, axis="z")
    d = mgr.from_function(lambda bits: sum(
        (Angle(b, 1 << i) for i, b in enumerate(bits)), ZERO))
    return mgr.to_cascade(d)


def gen_qft(n: int) -> Circuit:
    """QFT on lines j1..jn in the hat basis, outputs in reversed qubit order.

    ``unitary_of(gen_qft(n))`` equals the DFT matrix with its output qubits
    reversed, up to global phase. Line l gets Rz(pi) then Rx(pi/2), which is
    the Hadamard conjugated into the hat basis, followed by the controlled
    phases read off the Z-axis cascade of ``2 pi 0.j_l ... j_n``.
    """
    if n < 1:
        raise FamilyError("QFT needs at least one qubit")
    gates: List[Gate] = []
    for l in range(1, n + 1):
        t = l - 1
        gates += [Gate("z", PI, t), Gate("x", Angle(1, 2), t)]
        cascade = qft_phase_cascade(n, l)
        for name, angle in cascade.terms:
            m = int(name[1:])
            if m != l:
                gates.append(Gate("z", angle, t, m - 1))
    lines = [Line(i, "input", f"j{i + 1}", output=f"y{i + 1}") for i in range(n)]
    return merge_rotations(Circuit(tuple(lines), tuple(gates), (("family", f"qft {n}"),)))


# -- predictions ---------------------------------------------------------------

ADDER_DEPTH = {2: 9, 3: 12, 4: 19, 5: 23, 6: 27, 7: 31, 8: 39, 9: 43, 10: 48,
               11: 51, 12: 57, 13: 61, 14: 66, 15: 70}


@dataclass(frozen=True)
class CostPrediction:
    two_qubit: int
    ancillae: int
    depth_bound: Optional[int] = None
    total_gates: Optional[int] = None

    def as_dict(self):
        return asdict(self)


def predict(family: str, n: int) -> CostPrediction:
    if family == "toffoli":
        g = 2 * n * n - 2 * n + 1
        return CostPrediction(g, 0, total_gates=g)
    if family == "adder":
        g = (3 * n * n + 5 * n) // 2
        return CostPrediction(g, 1, ADDER_DEPTH.get(n), g)
    if family == "mux":
        if n < 2 or n & (n - 1):
            raise FamilyError(f"multiplexer size must be a power of two >= 2, got {n}")
        k = (n - 1).bit_length()
        return CostPrediction(2 * n + n * (2 * k * k - 2 * k + 1), 1)
    if family == "qft":
        return CostPrediction(n * (n - 1) // 2, 0, total_gates=n * (n + 1) // 2)
    raise FamilyError(f"unknown family {family!r}")


GENERATORS = {"toffoli": gen_toffoli, "adder": gen_adder, "mux": gen_mux, "qft": gen_qft}
