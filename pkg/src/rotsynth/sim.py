"""Dense state-vector simulation and verification of rotation circuits.

Line 0 is the most significant tensor factor. States carry a trailing batch
axis so a whole truth table can be pushed through a circuit at once; keeping
the batch innermost makes every gate touch contiguous memory.

Gates use the 2*pi-periodic rotations ``U(t) = exp(i t/2) R(t)``, which differ
from the textbook ``R(t)`` only by a global phase. Controlled versions are
then exact for normalized angles: ``U_x(pi)`` is X, ``U_z(t)`` is
``diag(1, exp(i t))``, and ``U(t)`` equals ``U(t + 2 pi)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from .angle import Angle

TOL = 1e-9
MAX_LINES = 12


class SimError(Exception):
    pass


def _radians(a) -> float:
    return a.radians if isinstance(a, Angle) else float(a)


def rx_matrix(theta) -> np.ndarray:
    """Textbook ``Rx(t) = [[cos t/2, -i sin t/2], [-i sin t/2, cos t/2]]``."""
    t = _radians(theta)
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def rz_matrix(theta) -> np.ndarray:
    t = _radians(theta)
    return np.array([[cmath.exp(-0.5j * t), 0], [0, cmath.exp(0.5j * t)]])


def gate_matrix(axis: str, theta) -> np.ndarray:
    """The periodic rotation used by the simulator for ``axis`` in {x, z}."""
    t = _radians(theta)
    e = cmath.exp(1j * t)
    if axis == "x":
        return np.array([[(1 + e) / 2, (1 - e) / 2], [(1 - e) / 2, (1 + e) / 2]])
    if axis == "z":
        return np.array([[1, 0], [0, e]])
    raise SimError(f"unknown axis {axis!r}")


def hat_state(bit: int) -> np.ndarray:
    """0^ = (1, 0) and 1^ = Rx(pi) 0^ = (0, -i)."""
    return np.array([1, 0], dtype=complex) if not bit else np.array([0, -1j])


def hat_transform(direction: str = "forward") -> np.ndarray:
    """M = diag(1, -i) maps |0>,|1> to the hat states; "inverse" gives M^-1."""
    if direction == "forward":
        return np.diag([1, -1j])
    if direction == "inverse":
        return np.diag([1, 1j])
    raise SimError(f"direction must be forward or inverse, not {direction!r}")


# -- state evolution -------------------------------------------------------

def apply_gate(state: np.ndarray, axis: str, angle, target: int,
               control: Optional[int] = None) -> None:
    """Apply one gate in place to a batched state of shape (2, ..., 2, B)."""
    u = gate_matrix(axis, angle)
    idx0: List = [slice(None)] * state.ndim
    if control is not None:
        idx0[control] = 1
    idx1 = list(idx0)
    idx0[target] = 0
    idx1[target] = 1
    idx0, idx1 = tuple(idx0), tuple(idx1)
    if axis == "z":
        state[idx1] *= u[1, 1]
        return
    s0 = state[idx0].copy()
    s1 = state[idx1]
    state[idx0] = u[0, 0] * s0 + u[0, 1] * s1
    state[idx1] = u[1, 0] * s0 + u[1, 1] * s1


def evolve(state: np.ndarray, gates) -> np.ndarray:
    for g in gates:
        apply_gate(state, g.axis, g.angle, g.target, g.control)
    return state


def _guard(n_lines: int):
    if n_lines > MAX_LINES:
        raise SimError(f"{n_lines} lines exceeds the simulator limit of {MAX_LINES}")


def product_states(singles: np.ndarray) -> np.ndarray:
    """Tensor products of per-line states; ``singles`` has shape (B, L, 2).

    The result has shape (2, ..., 2, B).
    """
    b, n, _ = singles.shape
    out = np.ones(b, dtype=complex)
    for i in reversed(range(n)):
        out = singles[:, i, :].T.reshape((2,) + (1,) * (n - 1 - i) + (b,)) * out[None]
    return out.reshape((2,) * n + (b,))


def initial_states(circuit, assignments: Sequence[Mapping[str, int]]) -> np.ndarray:
    """Hat-basis inputs for each assignment; ancillae start in 0^."""
    n = len(circuit.lines)
    singles = np.zeros((len(assignments), n, 2), dtype=complex)
    for b, asg in enumerate(assignments):
        for line in circuit.lines:
            bit = asg[line.name] if line.is_input else 0
            singles[b, line.index] = hat_state(bit)
    return product_states(singles)


def run(circuit, assignment: Mapping[str, int]) -> np.ndarray:
    """Final state vector (flattened, length 2^L) for one hat-basis input."""
    _guard(len(circuit.lines))
    state = initial_states(circuit, [assignment])
    evolve(state, circuit.gates)
    return state.reshape(-1)


def unitary_of(circuit, basis: str = "hat") -> np.ndarray:
    """Circuit matrix; column j is the image of basis state j.

    ``basis="computational"`` uses |0>,|1> on every line. ``basis="hat"``
    expresses both input and output in the hat basis, i.e. it conjugates the
    computational matrix by M on every line.
    """
    n = len(circuit.lines)
    _guard(n)
    dim = 1 << n
    state = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    evolve(state, circuit.gates)
    u = state.reshape(dim, dim)
    if basis == "computational":
        return u
    if basis != "hat":
        raise SimError(f"unknown basis {basis!r}")
    # M^{(x)n} is diagonal with entry (-i)^{popcount(j)}
    pop = np.array([bin(j).count("1") for j in range(dim)])
    m = (-1j) ** pop
    return (np.conj(m)[:, None] * u) * m[None, :]


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = TOL) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise SimError(f"shape mismatch {a.shape} vs {b.shape}")
    k = int(np.argmax(np.abs(b)))
    if abs(b.flat[k]) < tol:
        return bool(np.max(np.abs(a), initial=0.0) <= tol)
    if abs(a.flat[k]) < tol:
        return False
    phase = a.flat[k] / b.flat[k]
    phase /= abs(phase)
    return bool(np.max(np.abs(a - phase * b)) <= tol)


def qft_reference(n: int) -> np.ndarray:
    """The DFT matrix omega^{jk} / sqrt(2^n)."""
    dim = 1 << n
    j = np.arange(dim)
    return np.exp(2j * np.pi * np.outer(j, j) / dim) / math.sqrt(dim)


def reverse_qubits(u: np.ndarray, n: int) -> np.ndarray:
    """Permute rows of ``u`` so output qubit order is reversed."""
    perm = [int(format(j, f"0{n}b")[::-1], 2) if n else 0 for j in range(1 << n)]
    return u[perm, :]


# -- Bloch angles ----------------------------------------------------------

@dataclass(frozen=True)
class BlochAngles:
    theta: Angle
    gamma: Angle
    delta: float


def reconstruct(theta, gamma, delta: float = 0.0) -> np.ndarray:
    """``exp(i delta) Rz(gamma) Rx(theta) 0^`` as an amplitude pair."""
    t, g = _radians(theta), _radians(gamma)
    return cmath.exp(1j * delta) * np.array([
        cmath.exp(-0.5j * g) * math.cos(t / 2),
        -1j * cmath.exp(0.5j * g) * math.sin(t / 2),
    ])


def snap_angle(x: float, max_den: int = 4096, tol: float = TOL) -> Angle:
    frac = Fraction(x / math.pi).limit_denominator(max_den)
    if abs(float(frac) * math.pi - x) > tol:
        raise SimError(f"angle {x!r} is not a rational multiple of pi")
    return Angle(frac)


def bloch_extract(f0: complex, f1: complex) -> BlochAngles:
    norm = abs(f0) ** 2 + abs(f1) ** 2
    if abs(norm - 1) > TOL:
        raise SimError(f"state is not normalized (norm^2 = {norm})")
    theta = snap_angle(2 * math.atan2(abs(f1), abs(f0)))
    if abs(f1) <= TOL or abs(f0) <= TOL:
        gamma = Angle(0)
    else:
        gamma = snap_angle(_wrap(cmath.phase(f1) - cmath.phase(f0) + math.pi / 2))
    g = gamma.radians
    if abs(f0) >= abs(f1):
        delta = cmath.phase(f0 / (cmath.exp(-0.5j * g) * math.cos(theta.radians / 2)))
    else:
        delta = cmath.phase(f1 / (-1j * cmath.exp(0.5j * g) * math.sin(theta.radians / 2)))
    return BlochAngles(theta, gamma, delta)


def _wrap(x: float) -> float:
    """Into (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y <= -math.pi + 1e-15 else y


# -- verification ----------------------------------------------------------

def line_fidelities(states: np.ndarray, line: int, targets: np.ndarray) -> np.ndarray:
    """<t|rho|t> per batch entry, rho the reduced state of ``line``."""
    b = states.shape[-1]
    psi = np.moveaxis(states, line, 0).reshape(2, -1, b)
    rho = np.einsum("ikb,jkb->bij", psi, psi.conj())
    return np.real(np.einsum("bi,bij,bj->b", targets.conj(), rho, targets))


def all_assignments(names: Sequence[str]) -> List[Dict[str, int]]:
    n = len(names)
    return [{v: (k >> (n - 1 - i)) & 1 for i, v in enumerate(names)} for k in range(1 << n)]


def verify(circuit, expected: Callable[[Mapping[str, int]], Mapping[int, np.ndarray]],
           assignments: Optional[Iterable[Mapping[str, int]]] = None,
           tol: float = TOL, chunk: int = 16) -> dict:
    """Check every listed line against an expected single-qubit state.

    ``expected(asg)`` maps line index to a target amplitude pair; global
    phase is ignored because only reduced-state fidelity is compared.
    Restore-flagged inputs are checked automatically. Returns a JSON-ready
    verdict with the worst deviation and the first counterexample.
    """
    _guard(len(circuit.lines))
    names = [l.name for l in circuit.lines if l.is_input]
    if assignments is None:
        assignments = all_assignments(names)
    assignments = list(assignments)
    worst = 0.0
    failures: Dict[str, dict] = {}
    checked: Dict[str, bool] = {}
    for start in range(0, len(assignments), chunk):
        batch = assignments[start:start + chunk]
        state = initial_states(circuit, batch)
        evolve(state, circuit.gates)
        targets: Dict[int, List[np.ndarray]] = {}
        for asg in batch:
            want = dict(expected(asg))
            for line in circuit.lines:
                if line.restore:
                    want.setdefault(line.index, hat_state(asg[line.name]))
            for idx, vec in want.items():
                targets.setdefault(idx, []).append(np.asarray(vec, dtype=complex))
        for idx, vecs in targets.items():
            label = circuit.lines[idx].label()
            fid = line_fidelities(state, idx, np.array(vecs))
            dev = np.abs(1 - fid)
            worst = max(worst, float(dev.max()))
            checked.setdefault(label, True)
            bad = np.nonzero(dev > tol)[0]
            if bad.size:
                checked[label] = False
                if label not in failures:
                    failures[label] = {"input": dict(batch[int(bad[0])]),
                                       "deviation": float(dev[bad[0]])}
    return {
        "pass": not failures,
        "lines": checked,
        "max_deviation": worst,
        "counterexamples": failures,
    }
