import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rotsynth import sim
from rotsynth.angle import PI, ZERO, Angle
from rotsynth.circuit import Circuit, Gate, Line, inverse
from rotsynth.sim import (SimError, bloch_extract, equal_up_to_phase, gate_matrix, hat_state,
                          hat_transform, qft_reference, reconstruct, run, rx_matrix, unitary_of)

X = np.array([[0, 1], [1, 0]])
Z = np.diag([1, -1])
R = 1 / math.sqrt(2)


def lines(n, names="abcdefghijkl"):
    return tuple(Line(i, "input", names[i]) for i in range(n))


def circ(n, *gates):
    return Circuit(lines(n), tuple(gates))


def test_hat_states():
    assert np.allclose(hat_state(0), [1, 0])
    assert np.allclose(hat_state(1), [0, -1j])
    assert np.allclose(rx_matrix(PI) @ hat_state(0), hat_state(1))


def test_hat_transform():
    m, minv = hat_transform("forward"), hat_transform("inverse")
    assert np.allclose(m @ [0, 1], hat_state(1))
    assert np.allclose(minv @ m, np.eye(2))
    # M is a z rotation up to global phase
    assert equal_up_to_phase(m, sim.rz_matrix(Angle(-1, 2)))
    with pytest.raises(SimError):
        hat_transform("sideways")


def test_gate_matrices_match_textbook_up_to_phase():
    for t in [Angle(1, 2), PI, Angle(-3, 4)]:
        assert equal_up_to_phase(gate_matrix("x", t), rx_matrix(t))
        assert equal_up_to_phase(gate_matrix("z", t), sim.rz_matrix(t))
    assert np.allclose(gate_matrix("x", PI), X)
    assert np.allclose(gate_matrix("x", Angle(1)), gate_matrix("x", Angle(-1)))


def test_run_empty_is_product_of_hat_inputs():
    c = circ(2)
    out = run(c, {"a": 1, "b": 0})
    assert np.allclose(out, np.kron(hat_state(1), hat_state(0)))


def test_unitary_examples():
    assert np.allclose(unitary_of(circ(2)), np.eye(4))
    u = unitary_of(circ(1, Gate("x", PI, 0)), "computational")
    assert equal_up_to_phase(u, rx_matrix(PI))
    u_hat = unitary_of(circ(1, Gate("x", PI, 0)))
    # column 0: the image of 0^ is 1^ up to phase
    assert abs(abs(u_hat[1, 0]) - 1) < 1e-12 and abs(u_hat[0, 0]) < 1e-12


def test_unitary_of_inverse_is_identity():
    c = circ(3, Gate("x", Angle(1, 2), 2, 0), Gate("z", Angle(1, 4), 1, 2), Gate("x", PI, 0))
    u = unitary_of(c) @ unitary_of(inverse(c))
    assert np.allclose(u, np.eye(8), atol=1e-9)


def test_controlled_gate_semantics():
    c = circ(2, Gate("x", PI, 1, 0))
    u = unitary_of(c, "computational")
    cnot = np.eye(4)[[0, 1, 3, 2]]
    assert np.allclose(u, cnot)


def test_size_guard():
    c = Circuit(lines(12) + (Line(12, "ancilla"),), ())
    with pytest.raises(SimError):
        unitary_of(c)


def test_equal_up_to_phase():
    a = np.array([[1, 2], [3, 4j]])
    assert equal_up_to_phase(a, a)
    assert equal_up_to_phase(1j * a, a)
    assert not equal_up_to_phase(X, Z)
    with pytest.raises(SimError):
        equal_up_to_phase(X, np.eye(3))


def test_qft_reference():
    h = np.array([[1, 1], [1, -1]]) * R
    assert np.allclose(qft_reference(1), h)
    w = 1j
    f2 = np.array([[w ** (j * k) for k in range(4)] for j in range(4)]) / 2
    assert np.allclose(qft_reference(2), f2)
    for n in range(1, 5):
        q = qft_reference(n)
        assert np.allclose(q.conj().T @ q, np.eye(1 << n), atol=1e-9)


def test_bloch_examples():
    b = bloch_extract(1, 0)
    assert (b.theta, b.gamma) == (ZERO, ZERO)
    b = bloch_extract(0, -1j)
    assert (b.theta, b.gamma) == (PI, ZERO)
    b = bloch_extract(R, -1j * R)
    assert (b.theta, b.gamma) == (Angle(1, 2), ZERO)


def test_bloch_errors():
    with pytest.raises(SimError, match="normalized"):
        bloch_extract(1, 1)
    with pytest.raises(SimError, match="rational"):
        bloch_extract(math.cos(0.5), math.sin(0.5))


def test_bloch_round_trip_many():
    rng = random.Random(99)
    for _ in range(1000):
        theta = Angle(rng.randint(0, 64), 64)
        gamma = Angle(rng.randint(-63, 64), 64)
        delta = rng.uniform(-math.pi, math.pi)
        f = reconstruct(theta, gamma, delta)
        b = bloch_extract(*f)
        assert np.allclose(reconstruct(b.theta, b.gamma, b.delta), f, atol=1e-9)
        assert b.theta == Angle(abs(theta.fraction))
        if theta not in (ZERO, PI):
            assert b.gamma == gamma


nonzero = st.builds(Angle, st.integers(-8, 8), st.sampled_from([1, 2, 4, 8])).filter(bool)
gate_st = st.builds(
    lambda axis, a, t, c: Gate(axis, a, t, None if c == t else c),
    st.sampled_from("xz"), nonzero, st.integers(0, 3), st.integers(0, 3))


@given(st.lists(gate_st, max_size=12), st.lists(st.integers(0, 1), min_size=4, max_size=4))
def test_norm_preserved(gates, bits):
    c = circ(4, *gates)
    psi = run(c, dict(zip("abcd", bits)))
    assert abs(np.linalg.norm(psi) - 1) < 1e-9


@given(st.lists(gate_st, max_size=8), st.lists(gate_st, max_size=8))
def test_unitary_composes(g1, g2):
    c1, c2 = circ(4, *g1), circ(4, *g2)
    c12 = circ(4, *(g1 + g2))
    assert np.allclose(unitary_of(c12), unitary_of(c2) @ unitary_of(c1), atol=1e-9)


def test_verify_reports_counterexample():
    c = Circuit((Line(0, "input", "a"), Line(1, "ancilla", output="f")), (Gate("x", Angle(1, 2), 1, 0),))
    v = sim.verify(c, lambda asg: {1: hat_state(asg["a"])})
    assert not v["pass"]
    assert v["counterexamples"]["f"]["input"] == {"a": 1}
    ok = sim.verify(c, lambda asg: {1: reconstruct(Angle(asg["a"], 2), ZERO)})
    assert ok["pass"] and ok["max_deviation"] < 1e-9
