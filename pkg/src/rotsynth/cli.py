"""Command-line front end.

Function spec files look like::

    # 2-to-1 multiplexer
    .vars 3
    .names s x1 x2
    .axis x
    .out f
    000 0
    001 1
    ...

Each ``.out`` block lists all 2^N rows ``bits angle`` (or ``bits gamma
theta`` with ``.axis zx``, the Z angle first). ``.out NAME over v1 v2 ...``
tabulates over a subset of inputs and earlier Boolean outputs instead;
such blocks are expanded to full tables by substitution.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .angle import PI, ZERO, Angle, AngleError
from .circuit import Circuit, CircuitError, read_text, stats, write_text
from .compiler import Builder, CompileError
from .factor import factor, format_form
from .rbdd import Manager, all_assignments
from . import families, sim

logger = logging.getLogger("rotsynth")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class SpecError(ValueError):
    def __init__(self, msg: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


@dataclass
class OutputBlock:
    name: str
    # rows map an input bit tuple (over FunctionSpec.names) to (gamma, theta)
    rows: Dict[Tuple[int, ...], Tuple[Angle, Angle]] = field(default_factory=dict)

    def theta(self, bits) -> Angle:
        return self.rows[tuple(bits)][1]

    def gamma(self, bits) -> Angle:
        return self.rows[tuple(bits)][0]

    def is_boolean(self) -> bool:
        return all(g.is_zero() and t in (ZERO, PI) for g, t in self.rows.values())


@dataclass
class FunctionSpec:
    names: List[str]
    axis: str
    outputs: List[OutputBlock]

    def block(self, name: str) -> OutputBlock:
        for b in self.outputs:
            if b.name == name:
                return b
        raise KeyError(name)


def parse_spec(text: str) -> FunctionSpec:
    nvars: Optional[int] = None
    names: Optional[List[str]] = None
    axis = "x"
    blocks: List[OutputBlock] = []
    raw: List[Tuple[str, List[str], int, List[Tuple[int, List[str]]]]] = []
    for no, line in enumerate(text.splitlines(), 1):
        toks = line.split("#", 1)[0].split()
        if not toks:
            continue
        head = toks[0]
        if head == ".vars":
            if len(toks) != 2 or not toks[1].isdigit() or int(toks[1]) < 0:
                raise SpecError(".vars takes one non-negative integer", no)
            nvars = int(toks[1])
        elif head == ".names":
            names = toks[1:]
            if len(set(names)) != len(names):
                raise SpecError("duplicate variable names", no)
        elif head == ".axis":
            if len(toks) != 2 or toks[1] not in ("x", "zx"):
                raise SpecError(".axis must be x or zx", no)
            axis = toks[1]
        elif head == ".out":
            if len(toks) < 2:
                raise SpecError(".out needs a name", no)
            over: List[str] = []
            if len(toks) > 2:
                if toks[2] != "over":
                    raise SpecError(f"unexpected {toks[2]!r} after output name", no)
                over = toks[3:]
            raw.append((toks[1], over, no, []))
        elif head.startswith("."):
            raise SpecError(f"unknown directive {head}", no)
        else:
            if not raw:
                raise SpecError("table row before any .out", no)
            raw[-1][3].append((no, toks))
    if nvars is None:
        raise SpecError("missing .vars")
    if names is None:
        names = [f"v{i}" for i in range(1, nvars + 1)]
    if len(names) != nvars:
        raise SpecError(f".names lists {len(names)} variables, .vars says {nvars}")
    if not raw:
        raise SpecError("no .out blocks")
    spec = FunctionSpec(names, axis, blocks)
    for name, over, no, rows in raw:
        if name in names or any(b.name == name for b in blocks):
            raise SpecError(f"output name {name!r} already in use", no)
        blocks.append(_parse_block(spec, name, over, no, rows))
    return spec


def _parse_block(spec: FunctionSpec, name, over, no, rows) -> OutputBlock:
    over = over or spec.names
    for v in over:
        if v not in spec.names:
            try:
                ref = spec.block(v)
            except KeyError:
                raise SpecError(f"unknown variable {v!r}", no) from None
            if not ref.is_boolean():
                raise SpecError(f"output {v!r} is not Boolean and cannot be a variable", no)
    n = len(over)
    width = 2 if spec.axis == "zx" else 1
    local: Dict[Tuple[int, ...], Tuple[Angle, Angle]] = {}
    for rno, toks in rows:
        bits = toks[0]
        if len(bits) != n or any(c not in "01" for c in bits):
            raise SpecError(f"bad assignment {bits!r}; expected {n} bits", rno)
        if len(toks) != 1 + width:
            raise SpecError(f"expected {width} angle(s) after {bits}", rno)
        try:
            angles = [Angle.parse(t) for t in toks[1:]]
        except AngleError as e:
            raise SpecError(str(e), rno) from None
        key = tuple(int(c) for c in bits)
        if key in local:
            raise SpecError(f"duplicate row {bits}", rno)
        local[key] = (angles[0], angles[1]) if width == 2 else (ZERO, angles[0])
    for key in all_assignments(n):
        if key not in local:
            raise SpecError(f"output {name!r} is missing row {''.join(map(str, key))}", no)
    block = OutputBlock(name)
    for bits in all_assignments(len(spec.names)):
        env = dict(zip(spec.names, bits))
        key = tuple(_lookup(spec, v, env, bits) for v in over)
        block.rows[bits] = local[key]
    return block


def _lookup(spec: FunctionSpec, v: str, env, bits) -> int:
    if v in env:
        return env[v]
    return int(spec.block(v).theta(bits) == PI)


# -- synthesis ------------------------------------------------------------------

def _manager(names, axis) -> Manager:
    return Manager(names, axis=axis)


def synthesize(spec: FunctionSpec, order: Optional[Sequence[str]] = None,
               restore: bool = True, show_form=None) -> Circuit:
    """Factor and compile every output, in block order, onto one circuit."""
    order = list(order) if order else list(spec.names)
    if sorted(order) != sorted(spec.names):
        raise SpecError("--order must be a permutation of the spec variables")
    perm = [spec.names.index(v) for v in order]
    builder = Builder(order)
    plans = []
    for block in spec.outputs:
        def table(pick, block=block):
            return {tuple(bits[i] for i in perm): pick(bits) for bits in block.rows}
        mx = _manager(order, "x")
        dx = mx.from_table(table(block.theta))
        plan = [block.name, mx, dx, None, None]
        if spec.axis == "zx":
            mz = _manager(order, "z")
            plan[3], plan[4] = mz, mz.from_table(table(block.gamma))
        plans.append(plan)
    for i, (name, mx, dx, mz, dz) in enumerate(plans):
        keep = set()
        for _, m2, d2, m3, d3 in plans[i + 1:]:
            keep.update(m2.name(v) for v in m2.support(d2))
            if m3 is not None:
                keep.update(m3.name(v) for v in m3.support(d3))
        fx = factor(mx, dx)
        fz = factor(mz, dz) if mz is not None else None
        if show_form is not None:
            show_form(name, format_form(fx, "x"), None if fz is None else format_form(fz, "z"))
        builder.add_output(name, fx, fz, restore=restore, keep=sorted(keep))
    return builder.circuit()


def expected_states(spec: FunctionSpec, circuit: Circuit):
    """Per-assignment target states for :func:`rotsynth.sim.verify`."""
    missing = [b.name for b in spec.outputs if b.name not in circuit.outputs]
    if missing:
        raise SpecError(f"circuit has no line bound to output(s) {', '.join(missing)}")
    unknown = [v for v in spec.names if v not in circuit.inputs]
    if unknown:
        raise SpecError(f"circuit has no input line for {', '.join(unknown)}")
    lines = {b.name: circuit.outputs[b.name] for b in spec.outputs}

    def expected(asg):
        bits = tuple(asg[v] for v in spec.names)
        return {lines[b.name]: sim.reconstruct(b.theta(bits), b.gamma(bits))
                for b in spec.outputs}

    return expected


def verify_against(spec: FunctionSpec, circuit: Circuit) -> dict:
    expected = expected_states(spec, circuit)
    extra = [v for v in circuit.inputs if v not in spec.names]
    if extra:
        raise SpecError(f"circuit inputs {', '.join(extra)} do not appear in the spec")
    return sim.verify(circuit, expected)


# -- commands -------------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_synth(args) -> int:
    spec = parse_spec(_read(args.spec))
    if args.axis:
        if args.axis == "x" and spec.axis == "zx" and any(
                not g.is_zero() for b in spec.outputs for g, _ in b.rows.values()):
            raise SpecError("--axis x would drop nonzero Z angles")
        spec.axis = args.axis
    order = args.order.split(",") if args.order else None

    def show(name, fx, fz):
        sys.stderr.write(f"{name} = {fx}\n")
        if fz is not None:
            sys.stderr.write(f"{name} (z) = {fz}\n")

    circ = synthesize(spec, order, restore=not args.no_restore,
                      show_form=show if args.show_form else None)
    if len(circ.lines) <= sim.MAX_LINES:
        verdict = verify_against(spec, circ)
        if not verdict["pass"]:
            sys.stderr.write("internal error: synthesized circuit failed verification\n")
            sys.stderr.write(_dump(verdict))
            return EXIT_FAIL
    else:
        logger.warning("%d lines: too many to verify by simulation", len(circ.lines))
    _write(args.output, write_text(circ))
    report = _dump(stats(circ))
    if args.stats:
        _write(args.stats, report)
    elif args.output not in (None, "-"):
        sys.stdout.write(report)
    return EXIT_OK


def cmd_verify(args) -> int:
    circ = read_text(_read(args.circuit))
    spec = parse_spec(_read(args.spec))
    if len(circ.lines) > sim.MAX_LINES:
        raise SpecError(f"{len(circ.lines)} lines exceeds the simulator limit of {sim.MAX_LINES}")
    verdict = verify_against(spec, circ)
    sys.stdout.write(_dump(verdict))
    return EXIT_OK if verdict["pass"] else EXIT_FAIL


def cmd_stats(args) -> int:
    circ = read_text(_read(args.circuit))
    sys.stdout.write(_dump(stats(circ)))
    return EXIT_OK


FAMILY_SIZE = {"toffoli": "controls", "adder": "bits", "mux": "inputs", "qft": "qubits"}


def cmd_family(args) -> int:
    n = getattr(args, FAMILY_SIZE[args.family])
    if args.predict:
        sys.stdout.write(_dump(families.predict(args.family, n).as_dict()))
        return EXIT_OK
    circ = families.GENERATORS[args.family](n)
    _write(args.output, write_text(circ))
    if args.output not in (None, "-"):
        sys.stdout.write(_dump(stats(circ)))
    return EXIT_OK


def cmd_export_dot(args) -> int:
    spec = parse_spec(_read(args.spec))
    blocks = [spec.block(args.name)] if args.name else spec.outputs
    out = []
    for b in blocks:
        m = _manager(spec.names, "x")
        d = m.from_table({bits: b.theta(bits) for bits in b.rows})
        out.append(m.to_dot(d, name=_dot_id(b.name)))
        if spec.axis == "zx":
            mz = _manager(spec.names, "z")
            dz = mz.from_table({bits: b.gamma(bits) for bits in b.rows})
            out.append(mz.to_dot(dz, name=_dot_id(b.name + "_z")))
    _write(args.output, "".join(out))
    return EXIT_OK


def _dot_id(name: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in name) or "f"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rotsynth",
                                description="Rotation-gate circuit synthesis and verification.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a circuit from a function spec")
    s.add_argument("spec")
    s.add_argument("-o", "--output", help="circuit file (default: stdout)")
    s.add_argument("--stats", help="write the stats JSON here")
    s.add_argument("--order", help="comma-separated variable order")
    s.add_argument("--axis", choices=("x", "zx"), help="override the spec's axis mode")
    s.add_argument("--no-restore", action="store_true",
                   help="leave intermediate results on input lines")
    s.add_argument("--show-form", action="store_true", help="print factored forms to stderr")
    s.set_defaults(func=cmd_synth)

    v = sub.add_parser("verify", help="check a circuit against a function spec")
    v.add_argument("circuit")
    v.add_argument("spec")
    v.set_defaults(func=cmd_verify)

    st = sub.add_parser("stats", help="gate counts and depth of a circuit file")
    st.add_argument("circuit")
    st.set_defaults(func=cmd_stats)

    f = sub.add_parser("family", help="generate a benchmark family circuit")
    fsub = f.add_subparsers(dest="family", required=True)
    for fam, opt in FAMILY_SIZE.items():
        fp = fsub.add_parser(fam)
        fp.add_argument(f"--{opt}", type=int, required=True)
        fp.add_argument("--predict", action="store_true",
                        help="print the predicted cost instead of generating")
        fp.add_argument("-o", "--output", help="circuit file (default: stdout)")
    f.set_defaults(func=cmd_family)

    d = sub.add_parser("export-dot", help="dump output diagrams in DOT format")
    d.add_argument("spec")
    d.add_argument("--name", help="only this output")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_export_dot)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SpecError, CircuitError, families.FamilyError, sim.SimError, KeyError) as e:
        sys.stderr.write(f"rotsynth: error: {e}\n")
        return EXIT_USAGE
    except OSError as e:
        sys.stderr.write(f"rotsynth: error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
