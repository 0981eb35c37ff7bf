import pytest
from hypothesis import given

from rotsynth.angle import PI, ZERO, Angle
from rotsynth.factor import (BiDecomp, CascadeExpr, ChainError, Leaf, bi_decompose, check_split,
                             eval_form, factor, format_form, spine)
from rotsynth.rbdd import Manager, all_assignments

from conftest import bool_fn, random_cases, tables

H = Angle(1, 2)


def toffoli4():
    m = Manager(list("abcd"))
    return m, m.from_function(bool_fn(lambda u: (u[0] & u[1] & u[2]) ^ u[3]))


def mux():
    m = Manager(["s", "x1", "x2"])
    return m, m.from_function(bool_fn(lambda u: u[1] if u[0] else u[2]))


def chain(m, *terms, prefix=ZERO):
    d = m.constant(prefix)
    for v, t in reversed(terms):
        d = m.apply(m.var(v), t, d)
    return d


def test_bi_decompose_toffoli_signs():
    m, s = toffoli4()
    g1, gamma, h = bi_decompose(m, s)
    assert gamma == Angle(-1, 2)
    assert g1 == m.from_function(bool_fn(lambda u: (u[0] & u[1]) ^ u[2]))
    g2, gamma2, h1 = bi_decompose(m, h)
    assert gamma2 == Angle(-1, 4)
    assert g2 == chain(m, ("a", PI), ("b", PI))
    assert m.to_cascade(h1) is not None


def test_bi_decompose_mux():
    m, f = mux()
    g1, gamma, h = bi_decompose(m, f)
    assert g1 == chain(m, ("s", PI), ("x2", PI))
    assert gamma == H
    g2, gamma2, h1 = bi_decompose(m, h)
    assert gamma2 == Angle(-1, 2)
    assert g2 == chain(m, ("s", PI), ("x1", PI))
    assert h1 == chain(m, ("x1", H), ("x2", H))


def test_bi_decompose_rejects_chain():
    m = Manager(["x"])
    with pytest.raises(ChainError):
        bi_decompose(m, m.var("x"))


def test_factor_carry():
    m = Manager(["x1", "x2", "x3"])
    c = m.from_function(bool_fn(lambda u: sum(u) >= 2))
    ff = factor(m, c, check_split)
    assert ff == BiDecomp(
        Leaf(CascadeExpr(ZERO, (("x1", PI), ("x2", PI), ("x3", PI)))),
        Angle(-1, 2),
        Leaf(CascadeExpr(ZERO, (("x1", H), ("x2", H), ("x3", H)))))


def test_factor_two_bit_sum():
    m = Manager(["a0", "b0", "a1", "b1"])
    s1 = m.from_function(bool_fn(lambda u: ((u[0] + u[1] + 2 * u[2] + 2 * u[3]) >> 1) & 1))
    ff = factor(m, s1, check_split)
    assert ff == BiDecomp(
        Leaf(CascadeExpr(ZERO, (("a0", PI), ("b0", PI)))),
        Angle(-1, 2),
        Leaf(CascadeExpr(ZERO, (("a0", H), ("b0", H), ("a1", PI), ("b1", PI)))))


def test_factor_constant():
    m = Manager(["a"])
    assert factor(m, m.constant()) == Leaf(CascadeExpr(ZERO, ()))


def test_eval_form_examples():
    leaf = Leaf(CascadeExpr(ZERO, (("a", PI),)))
    assert eval_form(leaf, {"a": 1}) == PI
    m, f = mux()
    assert eval_form(factor(m, f), {"s": 1, "x1": 1, "x2": 0}) == PI
    m, s = toffoli4()
    assert eval_form(factor(m, s), {"a": 1, "b": 1, "c": 1, "d": 0}) == PI


def test_toffoli_printed_form():
    m, s = toffoli4()
    ff = factor(m, s)
    steps, leaf = spine(ff)
    assert [g for _, g in steps] == [Angle(-1, 2), Angle(-1, 4)]
    text = format_form(ff)
    assert "Rx(-1/2)" in text and "Rx(-1/4)" in text
    assert text.index("Rx(-1/2)") < text.rindex("Rx(-1/4)")
    assert format_form(Leaf(leaf)) == "a Rx(1/4) [b Rx(1/4) [c Rx(1/2) [d Rx(1) [0^]]]]"


def test_format_cascade_prefix_and_axis():
    c = Leaf(CascadeExpr(H, (("a", PI),), "z"))
    assert format_form(c, "z") == "Rz(1/2) [a Rz(1) [0^]]"


# -- properties ------------------------------------------------------------------------

def _descent_hook(seen):
    def hook(m, d, vk, g1, gamma, h):
        check_split(m, d, vk, g1, gamma, h)
        seen.append((m.r_degree(d, vk), m.r_degree(h, vk)))
    return hook


@pytest.mark.parametrize("names,table", random_cases(200))
def test_factor_round_trip(names, table):
    m = Manager(names)
    d = m.from_table(table)
    steps = []
    ff = factor(m, d, _descent_hook(steps))
    for bits in all_assignments(len(names)):
        asg = dict(zip(names, bits))
        assert eval_form(ff, asg) == table[bits]
    assert all(after < before for before, after in steps)


def _controls(ff):
    if isinstance(ff, Leaf):
        return
    yield ff.control
    yield from _controls(ff.control)
    yield from _controls(ff.rest)


@given(tables())
def test_controls_are_boolean(case):
    names, table = case
    m = Manager(names)
    ff = factor(m, m.from_table(table), check_split)
    for ctl in _controls(ff):
        vals = {eval_form(ctl, dict(zip(names, b))) for b in all_assignments(len(names))}
        assert vals <= {ZERO, PI}


@given(tables(boolean=True))
def test_boolean_functions_round_trip(case):
    names, table = case
    m = Manager(names)
    ff = factor(m, m.from_table(table), check_split)
    for bits in all_assignments(len(names)):
        assert eval_form(ff, dict(zip(names, bits))) == table[bits]
