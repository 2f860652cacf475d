"""Elliptic curves: classical group law, test curves, and the reversible
controlled point addition.

Points are ``(x, y)`` tuples with ``None`` standing for the point at
infinity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .gatecore import Circuit, CircuitError, RegisterMap
from .modarith import (
    ModulusContext,
    MulStrategy,
    _add_const_modp_block,
    _add_modp_block,
    _dbl_add_block,
    _inv_block,
    _mont_block,
    _neg_modp_block,
)

AffinePoint = Optional[tuple[int, int]]
INFINITY: AffinePoint = None


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class CurveParams:
    """Short Weierstrass curve y^2 = x^3 + a x + b over F_p with base point G of order r."""

    name: str
    p: int
    a: int
    b: int
    gx: int
    gy: int
    r: int
    h: int = 1

    @property
    def ctx(self) -> ModulusContext:
        return ModulusContext.of(self.p, check_prime=False)

    @property
    def G(self) -> tuple[int, int]:
        return (self.gx, self.gy)

    @property
    def n(self) -> int:
        return self.p.bit_length()

    def validate(self, check_order: bool = True) -> None:
        p = self.p
        if (4 * self.a ** 3 + 27 * self.b ** 2) % p == 0:
            raise CurveError(f"{self.name}: singular curve")
        if not on_curve(self, self.G):
            raise CurveError(f"{self.name}: base point not on curve")
        if check_order and scalar_mul(self, self.G, self.r) is not INFINITY:
            raise CurveError(f"{self.name}: [r]G != O")


# group law

def on_curve(curve: CurveParams, P: AffinePoint) -> bool:
    if P is INFINITY:
        return True
    x, y = P
    p = curve.p
    if not (0 <= x < p and 0 <= y < p):
        return False
    return (y * y - (x * x * x + curve.a * x + curve.b)) % p == 0


def neg(curve: CurveParams, P: AffinePoint) -> AffinePoint:
    if P is INFINITY:
        return P
    return (P[0], (-P[1]) % curve.p)


def point_add(curve: CurveParams, P1: AffinePoint, P2: AffinePoint, check: bool = True) -> AffinePoint:
    """Full affine group law including identity, inverse pair and doubling."""
    if check:
        for P in (P1, P2):
            if not on_curve(curve, P):
                raise CurveError(f"point {P} is not on {curve.name}")
    if P1 is INFINITY:
        return P2
    if P2 is INFINITY:
        return P1
    p = curve.p
    x1, y1 = P1
    x2, y2 = P2
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return INFINITY
        lam = (3 * x1 * x1 + curve.a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p
    return (x3, y3)


classical_point_add = point_add


def scalar_mul(curve: CurveParams, P: AffinePoint, m: int) -> AffinePoint:
    if m < 0:
        return scalar_mul(curve, neg(curve, P), -m)
    acc: AffinePoint = INFINITY
    add = P
    while m:
        if m & 1:
            acc = point_add(curve, acc, add, check=False)
        add = point_add(curve, add, add, check=False)
        m >>= 1
    return acc


classical_scalar_mul = scalar_mul


def montgomery_encode(ctx: ModulusContext, t: int) -> int:
    return ctx.encode(t)


def montgomery_decode(ctx: ModulusContext, T: int) -> int:
    return ctx.decode(T)


def is_generic_pair(curve: CurveParams, P1: AffinePoint, P2: AffinePoint) -> bool:
    """True when P1 + P2 avoids every exceptional case of the affine formula."""
    if P1 is INFINITY or P2 is INFINITY or P1[0] == P2[0]:
        return False
    # the slope is recomputed from the sum, so P1 + P2 must not share x with P2
    P3 = point_add(curve, P1, P2, check=False)
    return P3 is not INFINITY and P3[0] != P2[0]


def enumerate_points(curve: CurveParams) -> list[tuple[int, int]]:
    """All finite points, by brute force over x and y (small p only)."""
    p = curve.p
    if p > 1 << 16:
        raise CurveError("point enumeration is limited to p <= 2^16")
    roots: dict[int, list[int]] = {}
    for y in range(p):
        roots.setdefault(y * y % p, []).append(y)
    return [(x, y) for x in range(p) for y in roots.get((x ** 3 + curve.a * x + curve.b) % p, [])]


def random_point(curve: CurveParams, rng) -> tuple[int, int]:
    """A random multiple of the base point (never O)."""
    bound = curve.r if curve.r else curve.p
    while True:
        P = scalar_mul(curve, curve.G, rng.randrange(1, bound))
        if P is not INFINITY:
            return P


# curves

_NIST = {
    "P-192": dict(
        p=2 ** 192 - 2 ** 64 - 1,
        b=0x64210519E59C80E70FA7E9AB72243049FEB8DEECC146B9B1,
        gx=0x188DA80EB03090F67CBF20EB43A18800F4FF0AFD82FF1012,
        gy=0x07192B95FFC8DA78631011ED6B24CDD573F977A11E794811,
        r=0xFFFFFFFFFFFFFFFFFFFFFFFF99DEF836146BC9B1B4D22831,
    ),
    "P-224": dict(
        p=2 ** 224 - 2 ** 96 + 1,
        b=0xB4050A850C04B3ABF54132565044B0B7D7BFD8BA270B39432355FFB4,
        gx=0xB70E0CBD6BB4BF7F321390B94A03C1D356C21122343280D6115C1D21,
        gy=0xBD376388B5F723FB4C22DFE6CD4375A05A07476444D5819985007E34,
        r=0xFFFFFFFFFFFFFFFFFFFFFFFFFFFF16A2E0B8F03E13DD29455C5C2A3D,
    ),
    "P-256": dict(
        p=2 ** 256 - 2 ** 224 + 2 ** 192 + 2 ** 96 - 1,
        b=0x5AC635D8AA3A93E7B3EBBD55769886BC651D06B0CC53B0F63BCE3C3E27D2604B,
        gx=0x6B17D1F2E12C4247F8BCE6E563A440F277037D812DEB33A0F4A13945D898C296,
        gy=0x4FE342E2FE1A7F9B8EE7EB4A7C0F9E162BCE33576B315ECECBB6406837BF51F5,
        r=0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551,
    ),
    "P-384": dict(
        p=2 ** 384 - 2 ** 128 - 2 ** 96 + 2 ** 32 - 1,
        b=0xB3312FA7E23EE7E4988E056BE3F82D19181D9C6EFE8141120314088F5013875AC656398D8A2ED19D2A85C8EDD3EC2AEF,
        gx=0xAA87CA22BE8B05378EB1C71EF320AD746E1D3B628BA79B9859F741E082542A385502F25DBF55296C3A545E3872760AB7,
        gy=0x3617DE4A96262C6F5D9E98BF9292DC29F8F41DBD289A147CE9DA3113B5F0B8C00A60B1CE1D7E819D7A431D7C90EA0E5F,
        r=0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFC7634D81F4372DDF581A0DB248B0A77AECEC196ACCC52973,
    ),
    "P-521": dict(
        p=2 ** 521 - 1,
        b=0x0051953EB9618E1C9A1F929A21A0B68540EEA2DA725B99B315F3B8B489918EF109E156193951EC7E937B1652C0BD3BB1BF073573DF883D2C34F1EF451FD46B503F00,
        gx=0x00C6858E06B70404E9CD9E3ECB662395B4429C648139053FB521F828AF606B4D3DBAA14B5E77EFE75928FE1DC127A2FFA8DE3348B3C1856A429BF97E7E31C2E5BD66,
        gy=0x011839296A789A3BC0045C8A5FB42C7D1BD998F54449579B446817AFBD17273E662C97EE72995EF42640C550B9013FAD0761353C7086A272C24088BE94769FD16650,
        r=0x01FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFA51868783BF2F966B7FCC0148F709A5D03BB5C9B8899C47AEBB6FB71E91386409,
    ),
}

# y^2 = x^3 + x + 6 over F_11, 13 points, every non-identity point generates
F11 = CurveParams("F11", p=11, a=1, b=6, gx=2, gy=7, r=13)

CURVES: dict[str, CurveParams] = {"F11": F11}
for _name, _d in _NIST.items():
    CURVES[_name] = CurveParams(_name, a=_d["p"] - 3, **_d)


def get_curve(name: str) -> CurveParams:
    key = name.upper().replace("SECP", "P-").replace("R1", "")
    for k, c in CURVES.items():
        if k.upper() == key or k.upper() == name.upper():
            return c
    raise CurveError(f"unknown curve {name!r}; known: {', '.join(CURVES)}")


def synthetic_prime(n: int) -> int:
    """Smallest prime above 2^(n-1) + 2^(n-2): an n-bit prime for sizes without a named curve."""
    import sympy

    return int(sympy.nextprime((1 << (n - 1)) + (1 << (n - 2))))


def synthetic_curve(n: int, seed: int = 0) -> CurveParams:
    """Curve y^2 = x^3 - 3x + b over a synthetic n-bit prime, b chosen so a seeded point lies on it.

    The group order is not computed (r = 0); such curves only feed
    resource counts and generic-case simulation.
    """
    p = synthetic_prime(n)
    rng = np.random.default_rng([n, seed])
    while True:
        gx = int.from_bytes(rng.bytes((n + 7) // 8 + 8), "little") % p
        gy = int.from_bytes(rng.bytes((n + 7) // 8 + 8), "little") % p
        a = p - 3
        b = (gy * gy - gx ** 3 - a * gx) % p
        if (4 * a ** 3 + 27 * b * b) % p and gy:
            return CurveParams(f"synthetic-{n}", p, a, b, gx, gy, 0)


def parse_curve_file(text: str) -> CurveParams:
    """``name P-256`` alone, or one ``key value`` line for each of p, a, b, gx, gy, r (hex)."""
    vals: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":"):
            line = line.replace(sep, " ")
        parts = line.split()
        if len(parts) != 2:
            raise CurveError(f"cannot parse curve line {raw!r}")
        vals[parts[0].lower()] = parts[1]
    if set(vals) == {"name"}:
        return get_curve(vals["name"])
    need = ("p", "a", "b", "gx", "gy", "r")
    missing = [k for k in need if k not in vals]
    if missing:
        raise CurveError(f"curve file missing {', '.join(missing)}")
    num = {k: int(vals[k], 16) for k in need}
    h = int(vals["h"], 16) if "h" in vals else 1
    curve = CurveParams(vals.get("name", "custom"), h=h, **num)
    curve.validate()
    return curve


# reversible point addition

@dataclass
class PointAddLayout:
    regs: RegisterMap
    wires: dict[str, list[int]]
    consts: dict[str, int] = field(default_factory=dict)


def point_add_layout(ctx: ModulusContext) -> tuple[RegisterMap, dict[str, list[int]]]:
    n, L = ctx.n, ctx.log_n
    ntmp = 5 * n + 2 * L + 9
    nq = 9 * n + 2 * L + 10
    rm = RegisterMap(nq)
    w: dict[str, list[int]] = {}
    pos = 0
    for name, k, role in [("x1", n, "input"), ("y1", n, "input"), ("ctrl", 1, "control"),
                          ("lam", n, "clean"), ("t0", n, "clean"), ("tmp", ntmp, "clean")]:
        w[name] = list(range(pos, pos + k))
        rm.add(name, w[name], role)
        pos += k
    assert pos == nq
    return rm, w


@lru_cache(maxsize=32)
def _point_add_circuit(p: int, x2: int, y2: int, strategy: str) -> tuple[Circuit, RegisterMap]:
    ctx = ModulusContext.of(p, check_prime=False)
    n = ctx.n
    rm, w = point_add_layout(ctx)
    x1, y1, lam, t0, tmp = w["x1"], w["y1"], w["lam"], w["t0"], w["tmp"]
    ctrl = w["ctrl"][0]
    X2, Y2, X2x3 = ctx.encode(x2), ctx.encode(y2), ctx.encode(3 * x2)
    c = Circuit(rm.num_qubits, name="ctrl_point_add")

    def add_const(reg, k, controlled, inverse=False):
        blk = _add_const_modp_block(p, k, controlled)[0]
        wires = reg + [tmp[0]] + tmp[1:n] + ([ctrl] if controlled else [])
        c.append(blk, wires, inverse=inverse)

    def inv(src, dst):
        c.append(_inv_block(p)[0], src + dst + tmp)

    def mul(a, b, out):
        if strategy == MulStrategy.MONTGOMERY.value:
            c.append(_mont_block(p, False)[0], a + b + out + tmp[: 2 * n + 4])
        else:
            # the Horner accumulator must start at zero: work in tmp, copy out, uncompute
            z, rest = tmp[:n], tmp[n:]
            blk = _dbl_add_block(p, False)[0]
            wires = a + b + z + rest[:2]
            c.append(blk, wires)
            for i in range(n):
                c.cx(z[i], out[i])
            c.append(blk, wires, inverse=True)

    def squ(a, out):
        if strategy == MulStrategy.MONTGOMERY.value:
            c.append(_mont_block(p, True)[0], a + out + tmp[: 2 * n + 5])
        else:
            z, rest = tmp[:n], tmp[n:]
            blk = _dbl_add_block(p, True)[0]
            wires = a + z + rest[:3]
            c.append(blk, wires)
            for i in range(n):
                c.cx(z[i], out[i])
            c.append(blk, wires, inverse=True)

    def steps():
        yield "sub_const x1", lambda: add_const(x1, X2, False, inverse=True)
        yield "ctrl_sub_const y1", lambda: add_const(y1, Y2, True, inverse=True)
        yield "inv x1 t0", lambda: inv(x1, t0)
        yield "mul y1 t0 lam", lambda: mul(y1, t0, lam)
        yield "mul lam x1 y1", lambda: mul(lam, x1, y1)
        yield "inv x1 t0", lambda: inv(x1, t0)
        yield "squ lam t0", lambda: squ(lam, t0)
        # ctrl_sub_modp x1 t0: reverse of the controlled adder (x=t0, y=x1, ctrl, anc, g, h)
        yield "ctrl_sub x1 t0", lambda: c.append(
            _add_modp_block(p, True)[0], t0 + x1 + [ctrl] + tmp[:3], inverse=True)
        yield "ctrl_add_const x1 3x2", lambda: add_const(x1, X2x3, True)
        yield "squ lam t0", lambda: squ(lam, t0)
        yield "mul lam x1 y1", lambda: mul(lam, x1, y1)
        yield "inv x1 t0", lambda: inv(x1, t0)
        yield "mul t0 y1 lam", lambda: mul(t0, y1, lam)
        yield "inv x1 t0", lambda: inv(x1, t0)
        yield "ctrl_neg x1", lambda: c.append(_neg_modp_block(p, True)[0], x1 + [ctrl] + tmp[:2])
        yield "ctrl_sub_const y1", lambda: add_const(y1, Y2, True, inverse=True)
        yield "add_const x1", lambda: add_const(x1, X2, False)

    for i, (label, fn) in enumerate(steps(), 1):
        fn()
        c.mark(f"step_{i}")
    return c.freeze(), rm


def build_ctrl_point_add(curve: CurveParams, P2: AffinePoint,
                         strategy: MulStrategy = MulStrategy.MONTGOMERY) -> tuple[Circuit, RegisterMap]:
    """Controlled in-place addition of the constant point P2 to (x1, y1), Montgomery form throughout.

    Valid for the generic case P1 not in {O, P2, -P2}; ``lam``, ``t0`` and
    ``tmp`` enter and leave zero. Qubits: 9n + 2 ceil(log2 n) + 10.
    """
    if P2 is INFINITY:
        raise CurveError("P2 must be a finite point")
    if not on_curve(curve, P2):
        raise CurveError(f"P2 {P2} not on {curve.name}")
    return _point_add_circuit(curve.p, P2[0], P2[1], MulStrategy(strategy).value)


def point_add_qubits(n: int) -> int:
    return 9 * n + 2 * max(1, math.ceil(math.log2(n))) + 10


def simulate_point_add(curve: CurveParams, P2: AffinePoint, P1s: Sequence[tuple[int, int]],
                       ctrls: Sequence[int] | None = None, circuit=None) -> list[dict[str, int]]:
    """Run the point-addition circuit on many inputs at once; returns decoded registers per input."""
    from .simulator import run_batch

    ctx = curve.ctx
    circ, rm = circuit if circuit is not None else build_ctrl_point_add(curve, P2)
    if ctrls is None:
        ctrls = [1] * len(P1s)
    out = run_batch(circ, rm, {
        "x1": [ctx.encode(P[0]) for P in P1s],
        "y1": [ctx.encode(P[1]) for P in P1s],
        "ctrl": list(ctrls),
    })
    res = []
    for i in range(len(P1s)):
        d = {name: out[name][i] for name in out}
        d["x"] = ctx.decode(d["x1"]) if d["x1"] < curve.p else None
        d["y"] = ctx.decode(d["y1"]) if d["y1"] < curve.p else None
        res.append(d)
    return res


# scalar multiplication by conditional additions

@dataclass
class ScalarMulResult:
    point: AffinePoint
    invalid_step: int | None = None
    reason: str = ""

    @property
    def valid(self) -> bool:
        return self.invalid_step is None


def exceptional_case(curve: CurveParams, acc: AffinePoint, Q: AffinePoint) -> str:
    if acc is INFINITY or Q is INFINITY:
        return "identity"
    if acc == Q:
        return "doubling"
    if acc[0] == Q[0]:
        return "inverse"
    return ""


def simulate_scalar_mul(curve: CurveParams, scalar_bits: Sequence[int], a: int) -> ScalarMulResult:
    """[a]P plus conditional additions of [2^i]P, one simulated circuit per scalar bit."""
    from .simulator import BasisState, run

    if not 1 <= a < curve.r:
        raise CurveError(f"initial multiple {a} outside [1, {curve.r - 1}]")
    ctx = curve.ctx
    G = curve.G
    acc = scalar_mul(curve, G, a)
    Q = G
    for i, bit in enumerate(scalar_bits):
        if bit:
            why = exceptional_case(curve, acc, Q)
            if not why and not is_generic_pair(curve, acc, Q):
                why = "sum shares x with the addend"
            if why:
                return ScalarMulResult(None, i, why)
        circ, rm = build_ctrl_point_add(curve, Q)
        st = BasisState.from_registers(rm, {"x1": ctx.encode(acc[0]), "y1": ctx.encode(acc[1]), "ctrl": bit})
        fin = run(circ, st)
        for name in ("lam", "t0", "tmp"):
            if fin.read_reg(rm, name):
                raise CircuitError(f"register {name} not returned to zero")
        acc = (ctx.decode(fin.read_reg(rm, "x1")), ctx.decode(fin.read_reg(rm, "y1")))
        Q = point_add(curve, Q, Q, check=False)
    return ScalarMulResult(acc)


# invalid scalars

def invalid_scalar_bound(n: int, a: int, r: int | None = None) -> tuple[int, float]:
    """Upper bound 2^(n - i_a) + 8 on invalid scalars for start multiple a, and the fraction n / 2^n."""
    if a < 1 or (r is not None and a >= r):
        raise CurveError("a must lie in [1, r-1]")
    i_a = math.ceil(math.log2(a)) if a > 1 else 0
    return (1 << (n - i_a)) + 8, n / (1 << n)


def invalid_scalars(curve: CurveParams, a: int, kind: str = "doubling") -> dict[int, tuple[int, str]]:
    """Map each (n+1)-bit scalar k whose trajectory hits an exceptional case to (step, reason).

    The trajectory [a]P + sum k_i [2^i]P is followed with the full group
    law. ``kind`` selects which events count: "doubling" (the set S_a),
    "inverse" (a point added to its negative, or to O) or "any".
    """
    if kind not in ("doubling", "inverse", "any"):
        raise CurveError(f"unknown kind {kind!r}")
    if curve.r > 1 << 16:
        raise CurveError("exhaustive enumeration is limited to r <= 2^16")
    n = curve.n
    G = curve.G
    mult = [G]
    for _ in range(n):
        mult.append(point_add(curve, mult[-1], mult[-1], check=False))
    start = scalar_mul(curve, G, a)
    bad: dict[int, tuple[int, str]] = {}
    for k in range(1 << (n + 1)):
        acc = start
        for i in range(n + 1):
            if (k >> i) & 1:
                why = exceptional_case(curve, acc, mult[i])
                if why and (kind == "any" or (why == "doubling") == (kind == "doubling")):
                    bad[k] = (i, why)
                    break
                acc = point_add(curve, acc, mult[i], check=False)
    return bad


def count_invalid_scalars_bruteforce(curve: CurveParams, a: int, kind: str = "doubling") -> int:
    return len(invalid_scalars(curve, a, kind))
