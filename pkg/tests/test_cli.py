import json

import pytest

from rotsynth.angle import PI, ZERO, Angle
from rotsynth.circuit import read_text, stats, write_text
from rotsynth.cli import SpecError, main, parse_spec, synthesize

MUX = """# 2-to-1 multiplexer
.vars 3
.names s x1 x2
.out f
000 0
001 1
010 0
011 1
100 0
101 0
110 1
111 1
"""


def table_spec(names, fn, name="f"):
    rows = []
    n = len(names)
    for k in range(1 << n):
        bits = format(k, f"0{n}b")
        rows.append(f"{bits} {fn([int(c) for c in bits])}")
    return f".vars {n}\n.names {' '.join(names)}\n.out {name}\n" + "\n".join(rows) + "\n"


TOF3 = table_spec(list("abcd"), lambda u: int((u[0] & u[1] & u[2]) ^ u[3]))


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    def put(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return put


# -- spec parsing -------------------------------------------------------------------------

def test_parse_mux():
    spec = parse_spec(MUX)
    assert spec.names == ["s", "x1", "x2"] and spec.axis == "x"
    f = spec.block("f")
    assert f.theta((1, 1, 0)) == PI and f.theta((0, 1, 0)) == ZERO
    assert f.is_boolean()


def test_parse_default_names_and_zx():
    spec = parse_spec(".vars 1\n.axis zx\n.out g\n0 1/4 1/2\n1 0 -1/2\n")
    assert spec.names == ["v1"]
    g = spec.block("g")
    assert (g.gamma((0,)), g.theta((0,))) == (Angle(1, 4), Angle(1, 2))
    assert not g.is_boolean()


@pytest.mark.parametrize("text,fragment,line", [
    (".vars 2\n.out f\n00 0\n01 1\n10 1\n", "missing row 11", 2),
    (".vars 1\n.out f\n0 0\n0 1\n1 0\n", "duplicate row", 4),
    (".vars 1\n.out f\n0 0\n1 x/2\n", "", 4),
    (".vars 1\n.out f\n0 0\n11 1\n", "bad assignment", 4),
    (".vars 1\n.foo\n", "unknown directive", 2),
    (".vars 1\n.axis y\n", ".axis", 2),
    (".vars 2\n.names a a\n", "duplicate", 2),
    (".vars 1\n.out f over q\n0 0\n1 1\n", "unknown variable", 2),
    ("0 0\n", "before any .out", 1),
])
def test_parse_errors(text, fragment, line):
    with pytest.raises(SpecError) as err:
        parse_spec(text)
    assert fragment in str(err.value)
    assert err.value.line == line


def test_parse_errors_without_line():
    with pytest.raises(SpecError):
        parse_spec(".out f\n")
    with pytest.raises(SpecError):
        parse_spec(".vars 2\n.names a\n.out f\n")


def test_chained_outputs():
    text = (".vars 3\n.names a b c\n.out p over a b\n00 0\n01 0\n10 0\n11 1\n"
            ".out q over p c\n00 0\n01 1\n10 1\n11 0\n")
    spec = parse_spec(text)
    q = spec.block("q")
    for k in range(8):
        a, b, c = (k >> 2) & 1, (k >> 1) & 1, k & 1
        assert q.theta((a, b, c)) == (PI if (a & b) ^ c else ZERO)
    circ = synthesize(spec)
    assert set(circ.outputs) == {"p", "q"}


def test_chain_over_non_boolean_rejected():
    text = ".vars 1\n.out p\n0 1/2\n1 0\n.out q over p\n0 0\n1 1\n"
    with pytest.raises(SpecError):
        parse_spec(text)


# -- synth ------------------------------------------------------------------------------

def test_synth_mux_no_restore(files, capsys):
    spec = files("mux.spec", MUX)
    out = files("mux.circ", "")
    code, stdout, _ = run(["synth", spec, "--no-restore", "-o", out], capsys)
    assert code == 0
    assert json.loads(stdout)["two_qubit"] == 6
    assert stats(read_text(open(out).read()))["two_qubit"] == 6


def test_synth_toffoli_thirteen(files, capsys):
    code, stdout, _ = run(["synth", files("t.spec", TOF3)], capsys)
    assert code == 0
    c = read_text(stdout)
    assert len(c.gates) == 13 and stats(c)["ancillae"] == 0


def test_synth_constant_zero(files, capsys):
    code, stdout, _ = run(["synth", files("z.spec", table_spec(["a", "b"], lambda u: 0))], capsys)
    assert code == 0
    c = read_text(stdout)
    assert c.gates == () and stats(c)["ancillae"] == 1


def test_synth_show_form_and_stats_file(files, capsys, tmp_path):
    st = tmp_path / "s.json"
    code, _, err = run(["synth", files("t.spec", TOF3), "--show-form", "--stats", str(st)], capsys)
    assert code == 0
    assert "Rx(-1/2)" in err and "Rx(-1/4)" in err
    assert json.loads(st.read_text())["two_qubit"] == 13


def test_synth_order_option(files, capsys):
    spec = files("t.spec", TOF3)
    code, stdout, _ = run(["synth", spec, "--order", "d,c,b,a"], capsys)
    assert code == 0
    assert run(["verify", files("o.circ", stdout), spec], capsys)[0] == 0
    assert run(["synth", spec, "--order", "a,b"], capsys)[0] == 2


def test_synth_zx(files, capsys):
    text = ".vars 2\n.names a b\n.axis zx\n.out f\n00 0 0\n01 1/4 1/2\n10 0 1/2\n11 1/2 1\n"
    spec = files("zx.spec", text)
    code, stdout, _ = run(["synth", spec], capsys)
    assert code == 0
    assert run(["verify", files("zx.circ", stdout), spec], capsys)[0] == 0


def test_synth_deterministic(files, capsys):
    spec = files("t.spec", TOF3)
    a = run(["synth", spec], capsys)[1]
    b = run(["synth", spec], capsys)[1]
    assert a == b


# -- verify / stats / family ---------------------------------------------------------------

def test_verify_pass_and_perturbed(files, capsys):
    spec = files("t.spec", TOF3)
    circ_text = run(["synth", spec], capsys)[1]
    code, out, _ = run(["verify", files("t.circ", circ_text), spec], capsys)
    assert code == 0 and json.loads(out)["pass"]
    # nudge one rotation by pi/8
    c = read_text(circ_text)
    g = c.gates[0]
    bad = c.with_gates((type(g)(g.axis, g.angle + Angle(1, 8), g.target, g.control),) + c.gates[1:])
    code, out, _ = run(["verify", files("bad.circ", write_text(bad)), spec], capsys)
    verdict = json.loads(out)
    assert code == 1 and not verdict["pass"] and verdict["counterexamples"]


def test_verify_line_guard(files, capsys):
    circ = run(["family", "toffoli", "--controls", "12"], capsys)[1]
    spec = files("s.spec", ".vars 1\n.out f\n0 0\n1 1\n")
    code, _, err = run(["verify", files("big.circ", circ), spec], capsys)
    assert code == 2 and "limit" in err


def test_verify_missing_output(files, capsys):
    spec = files("t.spec", TOF3.replace(".out f", ".out g"))
    circ = files("t.circ", run(["synth", files("u.spec", TOF3)], capsys)[1])
    assert run(["verify", circ, spec], capsys)[0] == 2


def test_stats_command(files, capsys):
    circ = files("m.circ", run(["family", "mux", "--inputs", "4"], capsys)[1])
    code, out, _ = run(["stats", circ], capsys)
    s = json.loads(out)
    assert code == 0 and s["two_qubit"] == 28 and s["ancillae"] == 1


def test_family_predict(capsys):
    code, out, _ = run(["family", "adder", "--bits", "5", "--predict"], capsys)
    assert code == 0
    assert json.loads(out) == {"two_qubit": 50, "ancillae": 1, "depth_bound": 23, "total_gates": 50}
    assert json.loads(run(["family", "toffoli", "--controls", "5", "--predict"], capsys)[1])["two_qubit"] == 41


def test_family_to_file(tmp_path, capsys):
    out = tmp_path / "q.circ"
    code, stdout, _ = run(["family", "qft", "--qubits", "3", "-o", str(out)], capsys)
    assert code == 0 and json.loads(stdout)["two_qubit"] == 3
    assert read_text(out.read_text()).outputs == {"y1": 0, "y2": 1, "y3": 2}


def test_family_bad_size(capsys):
    assert run(["family", "mux", "--inputs", "6"], capsys)[0] == 2


def test_export_dot(files, capsys):
    code, out, _ = run(["export-dot", files("mux.spec", MUX)], capsys)
    assert code == 0 and out.startswith("digraph") and "->" in out


def test_bad_usage(capsys, files):
    with pytest.raises(SystemExit) as e:
        main(["synth"])
    assert e.value.code == 2
    assert run(["stats", "/nonexistent/file"], capsys)[0] == 2
    assert run(["synth", files("bad.spec", ".vars 1\n.out f\n0 0\n")], capsys)[0] == 2
