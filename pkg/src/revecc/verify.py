"""Oracle-equivalence harness and the check suites behind ``revecc check``.

Every check simulates a block on many inputs at once, compares the
output registers with a classical oracle and verifies the ancilla
contract: clean registers end at zero, dirty registers end as they
started (they are filled with random bits), untouched inputs are
unchanged.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import ecc, intarith, modarith
import numpy as np

from .gatecore import Circuit, RegisterMap, concat, reverse
from .modarith import ModulusContext, MulStrategy
from .simulator import BasisState, apply_stream, run_batch, run_with_probes

SMALL_PRIMES = (5, 7, 11, 13, 31, 61)
LARGE_BITS = (16, 32, 64)


@dataclass
class CheckResult:
    name: str
    cases: int
    mismatches: int
    toffoli: int
    qubits: int
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (f"{status} {self.name}: {self.cases} cases, {self.mismatches} mismatches, "
                f"{self.toffoli} Toffoli, {self.qubits} qubits")


def check_block(
    name: str,
    circ: Circuit,
    regs: RegisterMap,
    inputs: Mapping[str, Sequence[int]],
    expect: Mapping[str, Sequence[int]],
    rng: random.Random,
) -> CheckResult:
    """Simulate ``circ`` on all lanes of ``inputs`` and compare with ``expect``."""
    count = len(next(iter(inputs.values())))
    feed = {k: list(v) for k, v in inputs.items()}
    for r in regs:
        if r.role == "dirty" and r.name not in feed:
            feed[r.name] = [rng.getrandbits(len(r)) for _ in range(count)]
    out = run_batch(circ, regs, feed, count)
    bad = 0
    for i in range(count):
        wrong = False
        for r in regs:
            got = out[r.name][i]
            if r.name in expect:
                want = expect[r.name][i]
            elif r.name in feed:
                want = feed[r.name][i]
            else:
                want = 0
            wrong |= got != want
        bad += wrong
    return CheckResult(name, count, bad, circ.toffoli_count, circ.num_qubits)


def _inputs_for(p: int, arity: int, samples: int | None, rng: random.Random, lo: int = 0) -> list[tuple[int, ...]]:
    """All reduced tuples when ``samples`` is None, else that many random ones."""
    if samples is None:
        vals = range(lo, p)
        if arity == 1:
            return [(x,) for x in vals]
        return [(x, y) for x in vals for y in range(p)]
    return [tuple(rng.randrange(lo, p) for _ in range(arity)) for _ in range(samples)]


def modarith_checks(p: int, samples: int | None, rng: random.Random) -> list[CheckResult]:
    """Every modular builder at prime p (exhaustive when ``samples`` is None)."""
    ctx = ModulusContext.of(p, check_prime=False)
    R = ctx.R
    Rinv = pow(R, -1, p)
    res = []
    pairs = _inputs_for(p, 2, samples, rng)
    xs = [a for a, _ in pairs]
    ys = [b for _, b in pairs]
    bits = [rng.getrandbits(1) for _ in pairs]

    def sel(ctrl, on, off):
        return [a if c else b for c, a, b in zip(ctrl, on, off)]

    c, rm = modarith.build_add_modp(ctx)
    res.append(check_block(f"add_modp p={p}", c, rm, {"x": xs, "y": ys},
                           {"y": [(a + b) % p for a, b in pairs]}, rng))
    c, rm = modarith.build_add_modp(ctx, controlled=True)
    res.append(check_block(f"ctrl_add_modp p={p}", c, rm, {"x": xs, "y": ys, "ctrl": bits},
                           {"y": sel(bits, [(a + b) % p for a, b in pairs], ys)}, rng))
    res.append(check_block(f"ctrl_sub_modp p={p}", reverse(c), rm, {"x": xs, "y": ys, "ctrl": bits},
                           {"y": sel(bits, [(b - a) % p for a, b in pairs], ys)}, rng))

    singles = [x for (x,) in _inputs_for(p, 1, samples, rng)]
    cbits = [rng.getrandbits(1) for _ in singles]
    c, rm = modarith.build_dbl_modp(ctx)
    res.append(check_block(f"dbl_modp p={p}", c, rm, {"x": singles},
                           {"x": [2 * x % p for x in singles]}, rng))
    k = rng.randrange(1, p)
    for controlled in (False, True):
        c, rm = modarith.build_add_const_modp(ctx, k, controlled)
        inp = {"x": singles}
        want = [(x + k) % p for x in singles]
        if controlled:
            inp["ctrl"] = cbits
            want = sel(cbits, want, singles)
        tag = "ctrl_" if controlled else ""
        res.append(check_block(f"{tag}add_const_modp p={p} k={k}", c, rm, inp, {"x": want}, rng))
        res.append(check_block(f"{tag}sub_const_modp p={p} k={k}", reverse(c), rm, inp,
                               {"x": sel(cbits if controlled else [1] * len(singles),
                                         [(x - k) % p for x in singles], singles)}, rng))
        c, rm = modarith.build_neg_modp(ctx, controlled)
        want = [(-x) % p for x in singles]
        if controlled:
            want = sel(cbits, want, singles)
        res.append(check_block(f"{tag}neg_modp p={p}", c, rm, inp, {"x": want}, rng))

    for strategy in MulStrategy:
        c, rm = modarith.build_mul_modp(ctx, strategy)
        scale = Rinv if strategy is MulStrategy.MONTGOMERY else 1
        res.append(check_block(f"mul_modp[{strategy.value}] p={p}", c, rm, {"x": xs, "y": ys},
                               {"out": [a * b * scale % p for a, b in pairs]}, rng))
        c, rm = modarith.build_squ_modp(ctx, strategy)
        res.append(check_block(f"squ_modp[{strategy.value}] p={p}", c, rm, {"x": singles},
                               {"out": [x * x * scale % p for x in singles]}, rng))

    nonzero = [x for (x,) in _inputs_for(p, 1, samples, rng, lo=1)]
    c, rm = modarith.build_inv_modp(ctx)
    res.append(check_block(f"inv_modp p={p}", c, rm, {"x": nonzero},
                           {"out": [pow(x, -1, p) * R * R % p for x in nonzero]}, rng))
    return res


def suite_modarith(seed: int = 0, samples: int = 1000,
                   primes: Sequence[int] = SMALL_PRIMES, bits: Sequence[int] = LARGE_BITS) -> list[CheckResult]:
    rng = random.Random(seed)
    out = []
    for p in primes:
        out += modarith_checks(p, None, rng)
    for nb in bits:
        out += modarith_checks(ecc.synthetic_prime(nb), samples, rng)
    return out


def suite_intarith(seed: int = 0, max_n: int = 5) -> list[CheckResult]:
    """Exhaustive checks of the integer blocks up to ``max_n`` bits."""
    rng = random.Random(seed)
    out = []
    for n in range(1, max_n + 1):
        N = 1 << n
        xs = [x for x in range(N) for _ in range(N)]
        ys = [y for _ in range(N) for y in range(N)]
        bits = [rng.getrandbits(1) for _ in xs]
        c, rm = intarith.build_adder(n)
        out.append(check_block(f"adder n={n}", c, rm, {"x": xs, "y": ys}, {"y": [a + b for a, b in zip(xs, ys)]}, rng))
        c, rm = intarith.build_adder(n, True)
        out.append(check_block(f"ctrl_adder n={n}", c, rm, {"x": xs, "y": ys, "ctrl": bits},
                               {"y": [a + b if t else b for a, b, t in zip(xs, ys, bits)]}, rng))
        c, rm = intarith.build_comparator(n)
        out.append(check_block(f"comparator n={n}", c, rm, {"x": xs, "y": ys},
                               {"t": [int(a > b) for a, b in zip(xs, ys)]}, rng))
        single = list(range(N)) * 2
        k = rng.randrange(N)
        for controlled in (False, True):
            sb = [rng.getrandbits(1) for _ in single]
            c, rm = intarith.build_const_adder(n, k, controlled)
            inp = {"x": single}
            want = [(x + k) % N for x in single]
            if controlled:
                inp["ctrl"] = sb
                want = [w if t else x for w, x, t in zip(want, single, sb)]
            out.append(check_block(f"{'ctrl_' if controlled else ''}const_adder n={n} c={k}", c, rm, inp,
                                   {"x": want}, rng))
        c, rm = intarith.build_incrementer(n)
        out.append(check_block(f"incrementer n={n}", c, rm, {"x": single}, {"x": [(x + 1) % N for x in single]}, rng))
        if n >= 2:
            for d in ("double", "halve"):
                c, rm = intarith.build_cyclic_shift(n, d)
                if d == "double":
                    want = [((x << 1) | (x >> (n - 1))) & (N - 1) for x in single]
                else:
                    want = [(x >> 1) | ((x & 1) << (n - 1)) for x in single]
                out.append(check_block(f"shift_{d} n={n}", c, rm, {"x": single}, {"x": want}, rng))
    return out


# Kaliski traces

def kaliski_trace(p: int, x: int) -> list[dict[str, int]]:
    """(u, v, r, s, ell) after every round of the inverse on input x, plus the implied k.

    The first entry is the state after initialization. k counts the rounds
    that still changed (u, v, r, s), which is the round index minus ell.
    """
    ctx = ModulusContext.of(p, check_prime=False)
    circ, rm = modarith.build_inv_modp(ctx)
    probes = modarith.inv_probes(ctx)
    _, rows = run_with_probes(circ, BasisState.from_registers(rm, {"x": x}), probes, rm)
    trace = []
    for i, row in enumerate(rows):
        trace.append({"u": row["u"], "v": row["x"], "r": row["r"], "s": row["s"], "ell": row["ell"],
                      "k": i - row["ell"]})
    return trace


def suite_kaliski(p: int = 11, xs: Sequence[int] | None = None) -> tuple[list[CheckResult], list[str]]:
    """Traces for the given inputs plus an exhaustive inverse check at p."""
    ctx = ModulusContext.of(p, check_prime=False)
    xs = list(xs) if xs is not None else [8, 7]
    lines = []
    results = []
    for x in xs:
        tr = kaliski_trace(p, x)
        lines.append(f"x={x}")
        for key in ("u", "v", "r", "s", "k", "ell"):
            lines.append(f"  {key:>3} " + " ".join(f"{row[key]:>3}" for row in tr))
        bad = 0
        for row in tr:
            # p = r v + s u holds in every column
            if row["r"] * row["v"] + row["s"] * row["u"] != p:
                bad += 1
        k = tr[-1]["k"]
        if not ctx.n <= k <= 2 * ctx.n:
            bad += 1
        results.append(CheckResult(f"kaliski trace p={p} x={x} (k={k}, ell={tr[-1]['ell']})", len(tr), bad,
                                   modarith.build_inv_modp(ctx)[0].toffoli_count, ctx.n * 7 + 2 * ctx.log_n + 9))
    rng = random.Random(0)
    c, rm = modarith.build_inv_modp(ctx)
    nz = list(range(1, p))
    results.append(check_block(f"inv_modp p={p}", c, rm, {"x": nz},
                               {"out": [pow(x, -1, p) * ctx.R * ctx.R % p for x in nz]}, rng))
    return results, lines


# point addition

def point_add_check(curve: ecc.CurveParams, P2=None, samples: int | None = None,
                    rng: random.Random | None = None) -> list[CheckResult]:
    """Generic-case inputs with ctrl=1 against the oracle, and ctrl=0 restoring everything.

    Exhaustive over all generic points when ``samples`` is None.
    """
    rng = rng or random.Random(0)
    P2 = P2 or curve.G
    if samples is None:
        pts = [P for P in ecc.enumerate_points(curve) if ecc.is_generic_pair(curve, P, P2)]
    else:
        pts = []
        while len(pts) < samples:
            P = ecc.random_point(curve, rng)
            if ecc.is_generic_pair(curve, P, P2):
                pts.append(P)
    circ, rm = ecc.build_ctrl_point_add(curve, P2)
    ctx = curve.ctx
    out = []
    for ctrl in (1, 0):
        want = [ecc.point_add(curve, P, P2) if ctrl else P for P in pts]
        out.append(check_block(
            f"ctrl_point_add {curve.name} ctrl={ctrl}", circ, rm,
            {"x1": [ctx.encode(P[0]) for P in pts], "y1": [ctx.encode(P[1]) for P in pts],
             "ctrl": [ctrl] * len(pts)},
            {"x1": [ctx.encode(Q[0]) for Q in want], "y1": [ctx.encode(Q[1]) for Q in want]},
            rng))
    return out


# reversibility and determinism

def _random_builder(rng: random.Random) -> tuple[str, Circuit]:
    """One randomly parameterized builder from the integer, modular and curve layers."""
    kind = rng.choice(["adder", "const_adder", "comparator", "incrementer", "shift", "add_modp",
                       "dbl_modp", "add_const_modp", "neg_modp", "mul_modp", "squ_modp", "inv_modp",
                       "point_add"])
    n = rng.randint(2, 12)
    ctl = bool(rng.getrandbits(1))
    if kind == "adder":
        return f"adder n={n}", intarith.build_adder(n, ctl)[0]
    if kind == "const_adder":
        k = rng.randrange(1 << n)
        return f"const_adder n={n} c={k}", intarith.build_const_adder(n, k, ctl)[0]
    if kind == "comparator":
        return f"comparator n={n}", intarith.build_comparator(n, ctl)[0]
    if kind == "incrementer":
        return f"incrementer n={n}", intarith.build_incrementer(n)[0]
    if kind == "shift":
        d = rng.choice(["double", "halve"])
        return f"shift_{d} n={n}", intarith.build_cyclic_shift(n, d)[0]
    if kind == "point_add":
        curve = ecc.F11 if rng.getrandbits(1) else ecc.synthetic_curve(rng.randint(6, 10))
        return f"point_add {curve.name}", ecc.build_ctrl_point_add(curve, curve.G)[0]
    p = rng.choice(SMALL_PRIMES + (ecc.synthetic_prime(16), ecc.synthetic_prime(24)))
    ctx = ModulusContext.of(p, check_prime=False)
    if kind == "add_modp":
        return f"add_modp p={p}", modarith.build_add_modp(ctx, ctl)[0]
    if kind == "dbl_modp":
        return f"dbl_modp p={p}", modarith.build_dbl_modp(ctx)[0]
    if kind == "add_const_modp":
        k = rng.randrange(p)
        return f"add_const_modp p={p} c={k}", modarith.build_add_const_modp(ctx, k, ctl)[0]
    if kind == "neg_modp":
        return f"neg_modp p={p}", modarith.build_neg_modp(ctx, ctl)[0]
    strategy = rng.choice(list(MulStrategy))
    if kind == "mul_modp":
        return f"mul_modp[{strategy.value}] p={p}", modarith.build_mul_modp(ctx, strategy)[0]
    if kind == "squ_modp":
        return f"squ_modp[{strategy.value}] p={p}", modarith.build_squ_modp(ctx, strategy)[0]
    return f"inv_modp p={p}", modarith.build_inv_modp(ctx)[0]


def suite_reverse(seed: int = 0, pairs: int = 1000, lanes: int = 16) -> CheckResult:
    """run(stream + reverse(stream)) is the identity on random full basis states.

    Every qubit, ancillas included, starts random, so each lane is an
    arbitrary basis state. ``pairs`` (builder, input) pairs are drawn as
    ceil(pairs / lanes) builders with ``lanes`` states each.
    """
    rng = random.Random(seed)
    nprng = np.random.default_rng(seed)
    blocks = -(-pairs // lanes)
    bad = 0
    notes = []
    for _ in range(blocks):
        name, c = _random_builder(rng)
        st = nprng.integers(0, 1 << lanes, size=(c.num_qubits, 1), dtype=np.uint64)
        before = st.copy()
        apply_stream(concat(c, reverse(c)), st)
        diff = int(np.bitwise_or.reduce(st ^ before, axis=0)[0])
        if diff:
            bad += bin(diff).count("1")
            notes.append(name)
    return CheckResult(f"reverse identity seed={seed}", blocks * lanes, bad, 0, 0, notes)


def clear_build_caches() -> None:
    """Drop every memoized block so the next build starts from scratch."""
    for mod in (intarith, modarith, ecc):
        for obj in vars(mod).values():
            if callable(getattr(obj, "cache_clear", None)):
                obj.cache_clear()


def determinism_check(seed: int = 0, builders: int = 40) -> CheckResult:
    """Two builds of the same randomly chosen circuits, caches cleared in between, are gate-identical."""
    first = []
    rng = random.Random(seed)
    for _ in range(builders):
        first.append(_random_builder(rng))
    tables = [c.to_table() for _, c in first]
    clear_build_caches()
    rng = random.Random(seed)
    bad = 0
    notes = []
    for (name, _), t in zip(first, tables):
        name2, c = _random_builder(rng)
        t2 = c.to_table()
        if name2 != name or t.shape != t2.shape or not np.array_equal(t, t2):
            bad += 1
            notes.append(name)
    return CheckResult(f"determinism seed={seed}", builders, bad, 0, 0, notes)
