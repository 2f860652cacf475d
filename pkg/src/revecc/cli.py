"""Command line front end: ``revecc {gen,sim,check,resources,fit,curve-add}``.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import ecc, estimator, intarith, modarith, verify
from .gatecore import CircuitError, RegisterMap, read_netlist, reverse, write_netlist
from .modarith import ModulusContext, MulStrategy
from .simulator import format_hex, parse_hex, run_batch

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int(text: str) -> int:
    return int(text, 0)


def _int_list(text: str) -> list[int]:
    return [int(t, 0) for t in text.split(",") if t.strip()]


def _name_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _curve(args) -> ecc.CurveParams:
    if getattr(args, "curve_file", None):
        return ecc.parse_curve_file(Path(args.curve_file).read_text())
    if getattr(args, "curve", None):
        return ecc.get_curve(args.curve)
    raise UsageError("a curve is required (--curve or --curve-file)")


def _ctx(args) -> ModulusContext:
    if args.p is not None:
        return ModulusContext.of(args.p)
    if getattr(args, "curve", None) or getattr(args, "curve_file", None):
        return _curve(args).ctx
    if args.n is not None:
        return ModulusContext.of(estimator.prime_for(args.n)[0])
    raise UsageError("a modulus is required (--p, --n or --curve)")


# gen

# modular adders default to the controlled form used inside the point addition
_CTRL_DEFAULT = {"add_modp", "sub_modp"}

GEN_TAGS = ("adder", "const_adder", "comparator", "incrementer", "shift", "add_modp", "sub_modp",
            "dbl_modp", "add_const_modp", "sub_const_modp", "neg_modp", "mul_modp", "squ_modp",
            "inv_modp", "point_add")


def build_tag(args):
    """Build the circuit selected on the command line; returns (circuit, registers, info)."""
    tag = args.tag
    controlled = args.controlled if args.controlled is not None else tag in _CTRL_DEFAULT
    info: dict = {"tag": tag}
    if tag in ("adder", "const_adder", "comparator", "incrementer", "shift"):
        if args.n is None:
            raise UsageError(f"{tag} needs --n")
        info["n"] = args.n
        if tag == "adder":
            c, rm = intarith.build_adder(args.n, controlled)
        elif tag == "const_adder":
            c, rm = intarith.build_const_adder(args.n, args.c or 0, controlled)
            info["c"] = args.c or 0
        elif tag == "comparator":
            c, rm = intarith.build_comparator(args.n, controlled)
        elif tag == "incrementer":
            c, rm = intarith.build_incrementer(args.n)
        else:
            c, rm = intarith.build_cyclic_shift(args.n, args.direction)
        info["controlled"] = controlled
        return c, rm, info
    if tag == "point_add":
        curve = _curve(args)
        P2 = (args.x2, args.y2) if args.x2 is not None else curve.G
        c, rm = ecc.build_ctrl_point_add(curve, P2, MulStrategy(args.strategy))
        info.update(curve=curve.name, p=hex(curve.p), x2=hex(P2[0]), y2=hex(P2[1]), strategy=args.strategy,
                    encoding="montgomery")
        return c, rm, info
    ctx = _ctx(args)
    info["p"] = hex(ctx.p)
    if tag in ("add_modp", "sub_modp"):
        c, rm = modarith.build_add_modp(ctx, controlled)
        if tag == "sub_modp":
            c = reverse(c)
    elif tag == "dbl_modp":
        c, rm = modarith.build_dbl_modp(ctx)
    elif tag in ("add_const_modp", "sub_const_modp"):
        if args.c is None:
            raise UsageError(f"{tag} needs --c")
        c, rm = modarith.build_add_const_modp(ctx, args.c % ctx.p, controlled)
        if tag == "sub_const_modp":
            c = reverse(c)
        info["c"] = args.c % ctx.p
    elif tag == "neg_modp":
        c, rm = modarith.build_neg_modp(ctx, controlled)
    elif tag == "mul_modp":
        c, rm = modarith.build_mul_modp(ctx, MulStrategy(args.strategy))
        info["strategy"] = args.strategy
    elif tag == "squ_modp":
        c, rm = modarith.build_squ_modp(ctx, MulStrategy(args.strategy))
        info["strategy"] = args.strategy
    elif tag == "inv_modp":
        c, rm = modarith.build_inv_modp(ctx)
    else:
        raise UsageError(f"unknown tag {tag!r}")
    info["controlled"] = controlled
    return c, rm, info


def sidecar_path(out: Path) -> Path:
    return out.with_name(out.name + ".regs.json")


def cmd_gen(args) -> int:
    c, rm, info = build_tag(args)
    side = rm.to_dict()
    side["circuit"] = info
    side["toffoli"] = c.toffoli_count
    comment = " ".join(f"{k}={v}" for k, v in info.items())
    if args.no_netlist:
        target = args.regs or (str(sidecar_path(Path(args.output))) if args.output not in (None, "-") else None)
        text = json.dumps(side, indent=1) + "\n"
        if target:
            Path(target).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if args.output in (None, "-"):
        write_netlist(c, sys.stdout, comment)
        if args.regs:
            Path(args.regs).write_text(json.dumps(side, indent=1) + "\n")
    else:
        out = Path(args.output)
        with out.open("w") as fh:
            write_netlist(c, fh, comment)
        Path(args.regs or sidecar_path(out)).write_text(json.dumps(side, indent=1) + "\n")
        print(f"wrote {out} ({c.num_qubits} qubits, {c.gate_count} gates)", file=sys.stderr)
    return EXIT_OK


# sim

def cmd_sim(args) -> int:
    path = Path(args.netlist)
    regs_path = Path(args.regs) if args.regs else sidecar_path(path)
    with path.open() as fh:
        circ = read_netlist(fh)
    rm = RegisterMap.from_dict(json.loads(regs_path.read_text()))
    if rm.num_qubits != circ.num_qubits:
        raise UsageError(f"register map has {rm.num_qubits} qubits, netlist {circ.num_qubits}")
    values: dict[str, list[int]] = {}
    for item in args.set or []:
        if "=" not in item:
            raise UsageError(f"--set expects name=hex, got {item!r}")
        name, val = item.split("=", 1)
        if name not in rm:
            raise UsageError(f"unknown register {name!r}")
        v = parse_hex(val)
        if v >> len(rm[name]):
            raise UsageError(f"value {val} does not fit register {name!r}")
        values[name] = [v]
    out = run_batch(circ, rm, values, 1)
    dirty_ok = True
    for r in rm:
        v = out[r.name][0]
        print(f"{r.name}={format_hex(v)}")
        start = values.get(r.name, [0])[0]
        if r.role == "clean" and v != 0:
            dirty_ok = False
        if r.role == "dirty" and v != start:
            dirty_ok = False
    if not dirty_ok:
        print("ancilla contract violated", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# check

def cmd_check(args) -> int:
    lines: list[str] = []
    if args.suite == "modarith":
        primes = [args.p] if args.p else list(verify.SMALL_PRIMES)
        bits = [] if args.p else list(verify.LARGE_BITS)
        results = verify.suite_modarith(args.seed, args.samples, primes, bits)
    elif args.suite == "intarith":
        results = verify.suite_intarith(args.seed, args.max_n)
    elif args.suite == "kaliski":
        p = args.p or 11
        xs = _int_list(args.x) if args.x else ([8, 7] if p == 11 else None)
        results, lines = verify.suite_kaliski(p, xs)
    elif args.suite == "point-add":
        curve = _curve(args) if (args.curve or args.curve_file) else ecc.F11
        samples = None if curve.p <= 1 << 12 else args.samples
        results = verify.point_add_check(curve, samples=samples, rng=random.Random(args.seed))
    elif args.suite == "reverse":
        results = [verify.suite_reverse(args.seed, args.samples), verify.determinism_check(args.seed)]
    else:
        raise UsageError(f"unknown suite {args.suite!r}")
    for line in lines:
        print(line)
    for r in results:
        print(r.line())
    bad = sum(not r.ok for r in results)
    print(f"{len(results) - bad}/{len(results)} checks passed")
    return EXIT_OK if bad == 0 else EXIT_FAIL


# resources and fit

def cmd_resources(args) -> int:
    ns = _int_list(args.n) if args.n else []
    curves = _name_list(args.curves) if args.curves else []
    if not ns and not curves:
        raise UsageError("give --n and/or --curves")
    rows = estimator.point_add_resources(ns, curves, depth=not args.no_depth)
    sys.stdout.write(estimator.to_json(rows) + "\n" if args.format == "json" else estimator.to_csv(rows))
    return EXIT_OK


def cmd_fit(args) -> int:
    if args.csv:
        import csv

        with open(args.csv) as fh:
            data = [(int(r["n"]), float(r["toffoli"])) for r in csv.DictReader(fh)]
    else:
        ns = _int_list(args.n)
        rows = estimator.point_add_resources(ns, depth=False)
        data = [(r.n, r.report.toffoli_count) for r in rows]
    fit = estimator.fit_scaling(data, args.form)
    out = {"alpha": fit.alpha, "beta": fit.beta, "residual": fit.residual, "form": fit.form,
           "points": [{"n": n, "toffoli": t} for n, t in data]}
    print(json.dumps(out, indent=2))
    return EXIT_OK


# curve-add

def cmd_curve_add(args) -> int:
    curve = _curve(args)
    P2 = (args.x2, args.y2) if args.x2 is not None else curve.G
    P1 = (args.x1, args.y1)
    for P in (P1, P2):
        if not ecc.on_curve(curve, P):
            raise UsageError(f"point {P} is not on {curve.name}")
    if not ecc.is_generic_pair(curve, P1, P2):
        print("warning: exceptional input, the circuit output is unspecified", file=sys.stderr)
    res = ecc.simulate_point_add(curve, P2, [P1], [args.ctrl])[0]
    want = ecc.point_add(curve, P1, P2) if args.ctrl else P1
    got = (res["x"], res["y"])
    print(f"curve={curve.name} ctrl={args.ctrl}")
    print(f"P1=({format_hex(P1[0])}, {format_hex(P1[1])})")
    print(f"P2=({format_hex(P2[0])}, {format_hex(P2[1])})")
    print(f"circuit=({format_hex(got[0]) if got[0] is not None else '?'}, "
          f"{format_hex(got[1]) if got[1] is not None else '?'})")
    print("oracle=" + ("O" if want is None else f"({format_hex(want[0])}, {format_hex(want[1])})"))
    clean = all(res[k] == 0 for k in ("lam", "t0", "tmp"))
    ok = got == want and clean
    print("match" if ok else "MISMATCH")
    return EXIT_OK if ok else EXIT_FAIL


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="revecc", description="Reversible elliptic-curve point addition toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def curve_opts(p):
        p.add_argument("--curve", help="named curve (F11, P-192, ..., P-521)")
        p.add_argument("--curve-file", help="curve parameter file")

    g = sub.add_parser("gen", help="write a circuit netlist and its register map")
    g.add_argument("tag", choices=GEN_TAGS)
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=_int)
    g.add_argument("--c", type=_int, help="classical constant")
    ctl = g.add_mutually_exclusive_group()
    ctl.add_argument("--controlled", dest="controlled", action="store_true", default=None)
    ctl.add_argument("--uncontrolled", dest="controlled", action="store_false")
    g.add_argument("--strategy", choices=[s.value for s in MulStrategy], default=MulStrategy.MONTGOMERY.value)
    g.add_argument("--direction", choices=["double", "halve"], default="double")
    g.add_argument("--x2", type=_int)
    g.add_argument("--y2", type=_int)
    curve_opts(g)
    g.add_argument("-o", "--output", help="netlist path (default stdout)")
    g.add_argument("--regs", help="register map path (default <output>.regs.json)")
    g.add_argument("--no-netlist", action="store_true",
                   help="only write the register map (large circuits have 10^8+ gate lines)")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("sim", help="simulate a netlist on one basis state")
    s.add_argument("netlist")
    s.add_argument("--regs")
    s.add_argument("--set", action="append", metavar="NAME=HEX")
    s.set_defaults(func=cmd_sim)

    c = sub.add_parser("check", help="oracle-equivalence suites")
    c.add_argument("suite", choices=["modarith", "intarith", "kaliski", "point-add", "reverse"])
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--p", type=_int)
    c.add_argument("--x", help="comma separated inputs for the kaliski trace")
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--max-n", type=int, default=5)
    curve_opts(c)
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("resources", help="point-addition resource table")
    r.add_argument("--n", help="comma separated bit sizes")
    r.add_argument("--curves", help="comma separated curve names")
    r.add_argument("--format", choices=["csv", "json"], default="csv")
    r.add_argument("--no-depth", action="store_true")
    r.set_defaults(func=cmd_resources)

    f = sub.add_parser("fit", help="fit alpha n^2 log2 n + beta n^2 to point-addition counts")
    f.add_argument("--n", default="16,32,64,110")
    f.add_argument("--csv", help="read (n, toffoli) from a resources CSV instead")
    f.add_argument("--form", choices=["n2logn", "nlogn"], default="n2logn")
    f.set_defaults(func=cmd_fit)

    a = sub.add_parser("curve-add", help="simulate one controlled point addition")
    curve_opts(a)
    a.add_argument("--x1", type=_int, required=True)
    a.add_argument("--y1", type=_int, required=True)
    a.add_argument("--x2", type=_int)
    a.add_argument("--y2", type=_int)
    a.add_argument("--ctrl", type=int, choices=[0, 1], default=1)
    a.set_defaults(func=cmd_curve_add)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, CircuitError, ecc.CurveError, KeyError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
