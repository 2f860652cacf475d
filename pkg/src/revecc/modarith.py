"""Modular arithmetic circuits over a prime p.

Every builder returns a cached circuit in local coordinates plus its
register map. Larger circuits (multipliers, the inverse, point addition)
embed these blocks through qubit maps instead of copying gates.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import sympy

from .gatecore import Circuit, CircuitError, RegisterMap
from .intarith import (
    append_const_add,
    emit_add,
    emit_compare_gt,
    emit_const_carry,
    emit_cyclic_shift,
    emit_sub,
    mcx,
    mcx_clean,
)

Qubits = Sequence[int]


@dataclass(frozen=True)
class ModulusContext:
    p: int
    n: int
    R: int

    @classmethod
    def of(cls, p: int, check_prime: bool = True) -> "ModulusContext":
        if p <= 2 or p % 2 == 0:
            raise CircuitError(f"modulus must be an odd prime > 2, got {p}")
        if check_prime and not sympy.isprime(p):
            raise CircuitError(f"modulus {p} is not prime")
        n = p.bit_length()
        return cls(p, n, 1 << n)

    @property
    def log_n(self) -> int:
        """ceil(log2 n), the counter width parameter of the inverse."""
        return max(1, math.ceil(math.log2(self.n)))

    def encode(self, t: int) -> int:
        return t * self.R % self.p

    def decode(self, T: int) -> int:
        return T * pow(self.R, -1, self.p) % self.p


class MulStrategy(enum.Enum):
    DOUBLE_AND_ADD = "dbl_add"
    MONTGOMERY = "montgomery"


def _ctx(ctx) -> ModulusContext:
    return ctx if isinstance(ctx, ModulusContext) else ModulusContext.of(int(ctx))


def _layout(nq: int, regs: list[tuple[str, int, str]]) -> tuple[RegisterMap, dict[str, list[int]]]:
    rm = RegisterMap(nq)
    wires: dict[str, list[int]] = {}
    pos = 0
    for name, width, role in regs:
        q = list(range(pos, pos + width))
        pos += width
        if width:
            rm.add(name, q, role)
        wires[name] = q
    if pos != nq:
        raise AssertionError(f"layout uses {pos} of {nq} qubits")
    return rm, wires


# emitters

def emit_add_modp(c, p: int, x: Qubits, y: Qubits, anc: int, g: int, ctrl: int | None = None,
                  helper: int | None = None, pool: Qubits = ()) -> None:
    """y += x mod p (times ctrl). anc clean, g and helper borrowed."""
    n = len(x)
    h = g if helper is None else helper
    yy = list(y) + [anc]
    cpool = [g] + list(x) + list(pool)
    emit_add(c, x, y, anc, ctrl, h)
    append_const_add(c, yy, (1 << (n + 1)) - p, cpool, ctrl)
    append_const_add(c, y, p, cpool, anc)
    emit_compare_gt(c, x, y, anc, ctrl, h)
    if ctrl is None:
        c.x(anc)
    else:
        c.cx(ctrl, anc)


def emit_dbl_modp(c, p: int, x: Qubits, anc: int, pool: Qubits, ctrl: int | None = None) -> None:
    """x = 2x mod p (times ctrl). anc clean, pool borrowed."""
    n = len(x)
    xx = list(x) + [anc]
    emit_cyclic_shift(c, xx, "double", ctrl)
    append_const_add(c, xx, (1 << (n + 1)) - p, pool, ctrl)
    append_const_add(c, x, p, pool, anc)
    if ctrl is None:
        c.cx(x[0], anc)
        c.x(anc)
    else:
        c.x(x[0])
        c.ccx(ctrl, x[0], anc)
        c.x(x[0])


def emit_add_const_modp(c, p: int, k: int, x: Qubits, anc: int, dirty: Qubits,
                        ctrl: int | None = None) -> None:
    """x += k mod p (times ctrl). anc clean, len(x)-1 borrowed qubits."""
    n = len(x)
    k %= p
    if k == 0:
        return
    xx = list(x) + [anc]
    append_const_add(c, xx, (k - p) % (1 << (n + 1)), dirty, ctrl)
    append_const_add(c, x, p, dirty, anc)
    emit_const_carry(c, x, (1 << n) - k, anc, dirty, ctrl)


def emit_neg_modp(c, p: int, x: Qubits, t: int, g: int, ctrl: int | None = None) -> None:
    """x = -x mod p (times ctrl). t clean, g borrowed; ctrl is also borrowed by the adder."""
    n = len(x)

    def flag():
        if ctrl is None:
            c.x(t)
            ctl = list(x)
        else:
            c.cx(ctrl, t)
            ctl = [ctrl] + list(x)
        for q in x:
            c.x(q)
        mcx(c, ctl, t, [g])
        for q in x:
            c.x(q)

    flag()
    for q in x:
        c.cx(t, q)
    pool = [g] + ([ctrl] if ctrl is not None else [])
    append_const_add(c, x, (p + 1) % (1 << n), pool, t)
    flag()


# standalone blocks

@lru_cache(maxsize=256)
def _add_modp_block(p: int, controlled: bool) -> tuple[Circuit, RegisterMap]:
    ctx = ModulusContext.of(p, check_prime=False)
    n = ctx.n
    if controlled:
        regs = [("x", n, "input"), ("y", n, "output"), ("ctrl", 1, "control"),
                ("anc", 1, "clean"), ("g", 1, "dirty"), ("h", 1, "dirty")]
    else:
        regs = [("x", n, "input"), ("y", n, "output"), ("anc", 1, "clean"), ("g", 1, "dirty")]
    nq = sum(r[1] for r in regs)
    rm, w = _layout(nq, regs)
    c = Circuit(nq, name=f"{'ctrl_' if controlled else ''}add_modp")
    emit_add_modp(c, p, w["x"], w["y"], w["anc"][0], w["g"][0],
                  w["ctrl"][0] if controlled else None, w["h"][0] if controlled else None)
    return c.freeze(), rm


def build_add_modp(ctx, controlled: bool = False) -> tuple[Circuit, RegisterMap]:
    """|x>|y> -> |x>|x+y mod p>. Reverse the stream for subtraction."""
    return _add_modp_block(_ctx(ctx).p, bool(controlled))


@lru_cache(maxsize=256)
def _dbl_modp_block(p: int) -> tuple[Circuit, RegisterMap]:
    n = p.bit_length()
    rm, w = _layout(n + 2, [("x", n, "input"), ("anc", 1, "clean"), ("g", 1, "dirty")])
    c = Circuit(n + 2, name="dbl_modp")
    emit_dbl_modp(c, p, w["x"], w["anc"][0], w["g"])
    return c.freeze(), rm


def build_dbl_modp(ctx) -> tuple[Circuit, RegisterMap]:
    """|x> -> |2x mod p>, n+2 qubits."""
    return _dbl_modp_block(_ctx(ctx).p)


@lru_cache(maxsize=1024)
def _add_const_modp_block(p: int, k: int, controlled: bool) -> tuple[Circuit, RegisterMap]:
    n = p.bit_length()
    regs = [("x", n, "input"), ("anc", 1, "clean"), ("dirty", n - 1, "dirty")]
    if controlled:
        regs.append(("ctrl", 1, "control"))
    nq = 2 * n + int(controlled)
    rm, w = _layout(nq, regs)
    c = Circuit(nq, name=f"{'ctrl_' if controlled else ''}add_const_modp")
    emit_add_const_modp(c, p, k, w["x"], w["anc"][0], w["dirty"], w["ctrl"][0] if controlled else None)
    return c.freeze(), rm


def build_add_const_modp(ctx, c_val: int, controlled: bool = False) -> tuple[Circuit, RegisterMap]:
    """|x> -> |x+c mod p>, 2n qubits (2n+1 controlled)."""
    ctx = _ctx(ctx)
    if not 0 <= c_val < ctx.p:
        raise CircuitError(f"constant {c_val} not reduced mod {ctx.p}")
    return _add_const_modp_block(ctx.p, c_val, bool(controlled))


@lru_cache(maxsize=256)
def _neg_modp_block(p: int, controlled: bool) -> tuple[Circuit, RegisterMap]:
    n = p.bit_length()
    regs = [("x", n, "input")]
    if controlled:
        regs.append(("ctrl", 1, "control"))
    regs += [("t", 1, "clean"), ("g", 1, "dirty")]
    nq = n + 2 + int(controlled)
    rm, w = _layout(nq, regs)
    c = Circuit(nq, name=f"{'ctrl_' if controlled else ''}neg_modp")
    emit_neg_modp(c, p, w["x"], w["t"][0], w["g"][0], w["ctrl"][0] if controlled else None)
    return c.freeze(), rm


def build_neg_modp(ctx, controlled: bool = False) -> tuple[Circuit, RegisterMap]:
    """|x> -> |-x mod p>, n+3 qubits controlled (n+2 otherwise)."""
    return _neg_modp_block(_ctx(ctx).p, bool(controlled))


# multiplication and squaring

@lru_cache(maxsize=64)
def _mont_block(p: int, square: bool) -> tuple[Circuit, RegisterMap]:
    n = p.bit_length()
    if square:
        regs = [("x", n, "input"), ("out", n, "output"), ("acc", n + 2, "clean"),
                ("m", n, "clean"), ("g", 1, "dirty"), ("pad", 1, "clean"), ("e", 1, "clean")]
    else:
        regs = [("x", n, "input"), ("y", n, "input"), ("out", n, "output"), ("acc", n + 2, "clean"),
                ("m", n, "clean"), ("g", 1, "dirty"), ("pad", 1, "clean")]
    nq = sum(r[1] for r in regs)
    rm, w = _layout(nq, regs)
    x, out, acc, m = w["x"], w["out"], w["acc"], w["m"]
    g, pad = w["g"][0], w["pad"][0]
    addend = (x if square else w["y"]) + [pad]
    pool = [g] + out
    fwd = Circuit(nq, name="mont_fwd")
    for i in range(n):
        if square:
            e = w["e"][0]
            fwd.cx(x[i], e)
            emit_add(fwd, addend, acc[: n + 1], acc[n + 1], e, g)
            fwd.cx(x[i], e)
        else:
            emit_add(fwd, addend, acc[: n + 1], acc[n + 1], x[i], g)
        fwd.cx(acc[0], m[i])
        append_const_add(fwd, acc, p, pool, m[i])
        emit_cyclic_shift(fwd, acc, "halve")
        fwd.mark(f"round_{i + 1}")
    append_const_add(fwd, acc, (1 << (n + 2)) - p, pool)
    append_const_add(fwd, acc[: n + 1], p, pool, acc[n + 1])
    fwd.freeze()
    c = Circuit(nq, name="mont_squ" if square else "mont_mul")
    c.append(fwd, range(nq))
    c.mark("forward")
    for i in range(n):
        c.cx(acc[i], out[i])
    c.mark("copy")
    c.append(fwd, range(nq), inverse=True)
    return c.freeze(), rm


@lru_cache(maxsize=256)
def _ctrl_add_modp_lean(p: int) -> Circuit:
    """Controlled modular adder on [x, y, ctrl, anc, g], g doubling as the helper."""
    n = p.bit_length()
    nq = 2 * n + 3
    c = Circuit(nq, name="ctrl_add_modp")
    x, y = list(range(n)), list(range(n, 2 * n))
    emit_add_modp(c, p, x, y, 2 * n + 1, 2 * n + 2, ctrl=2 * n)
    return c.freeze()


@lru_cache(maxsize=64)
def _dbl_add_block(p: int, square: bool) -> tuple[Circuit, RegisterMap]:
    n = p.bit_length()
    if n < 2:
        raise CircuitError("modulus too small")
    if square:
        regs = [("x", n, "input"), ("out", n, "output"), ("anc", 1, "clean"), ("g", 1, "dirty"),
                ("e", 1, "clean")]
    else:
        regs = [("x", n, "input"), ("y", n, "input"), ("out", n, "output"), ("anc", 1, "clean"),
                ("g", 1, "dirty")]
    nq = sum(r[1] for r in regs)
    rm, w = _layout(nq, regs)
    x, out, anc, g = w["x"], w["out"], w["anc"][0], w["g"][0]
    addb = _ctrl_add_modp_lean(p)
    dbl = _dbl_modp_block(p)[0]
    c = Circuit(nq, name="da_squ" if square else "da_mul")
    # Horner from the top bit: out = 2*out + x_i*y
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            c.append(dbl, out + [anc, g])
        if square:
            e = w["e"][0]
            c.cx(x[i], e)
            c.append(addb, x + out + [e, anc, g])
            c.cx(x[i], e)
        else:
            c.append(addb, w["y"] + out + [x[i], anc, g])
    return c.freeze(), rm


def build_mul_modp(ctx, strategy: MulStrategy = MulStrategy.MONTGOMERY) -> tuple[Circuit, RegisterMap]:
    """Out-of-place product XORed into ``out``.

    MONTGOMERY gives x*y*R^-1 mod p on 5n+4 qubits, DOUBLE_AND_ADD gives
    x*y mod p on 3n+2 qubits (``out`` must enter zero).
    """
    p = _ctx(ctx).p
    if MulStrategy(strategy) is MulStrategy.MONTGOMERY:
        return _mont_block(p, False)
    return _dbl_add_block(p, False)


def build_squ_modp(ctx, strategy: MulStrategy = MulStrategy.MONTGOMERY) -> tuple[Circuit, RegisterMap]:
    """Out-of-place square: x^2 R^-1 mod p on 4n+5 qubits, or x^2 mod p on 2n+3 qubits."""
    p = _ctx(ctx).p
    if MulStrategy(strategy) is MulStrategy.MONTGOMERY:
        return _mont_block(p, True)
    return _dbl_add_block(p, True)


# Kaliski inversion

def emit_ctrl_increment_clean(c, r: Qubits, ctrl: int, clean: Qubits) -> None:
    """r += ctrl with a prefix-AND chain in len(r)-1 zeroed qubits (2(len(r)-1) Toffolis)."""
    w = len(r)
    if w == 0:
        return
    chain = [ctrl] + list(clean[: w - 1])
    if len(chain) < w:
        raise CircuitError("controlled increment needs len(r)-1 clean qubits")
    for i in range(1, w):
        c.ccx(chain[i - 1], r[i - 1], chain[i])
    for i in range(w - 1, 0, -1):
        c.cx(chain[i], r[i])
        c.ccx(chain[i - 1], r[i - 1], chain[i])
    c.cx(ctrl, r[0])


def _round_wires(n: int, L: int) -> dict[str, list[int]]:
    sizes = [("u", n), ("v", n), ("r", n + 1), ("s", n + 1), ("f", 1), ("ell", L + 1), ("a", 1),
             ("cmp", 1), ("t1", 1), ("t2", 1), ("spare", L), ("mi", 1)]
    w, pos = {}, 0
    for name, k in sizes:
        w[name] = list(range(pos, pos + k))
        pos += k
    return w


@lru_cache(maxsize=64)
def _kaliski_round(n: int, L: int) -> Circuit:
    """One round of the reversible binary-GCD on local wires (see ``_round_wires``).

    Branch encoding in (a, m_i): 10 u even, 01 v even, 11 both odd with
    u > v, 00 both odd with u <= v. Once f drops to 0 only the counter
    ell advances.
    """
    w = _round_wires(n, L)
    nq = 4 * n + 2 * L + 9
    c = Circuit(nq, name="kaliski_round")
    u, v, r, s, ell, spare = w["u"], w["v"], w["r"], w["s"], w["ell"], w["spare"]
    f, a, cmp, t1, t2, mi = w["f"][0], w["a"][0], w["cmp"][0], w["t1"][0], w["t2"][0], w["mi"][0]

    # f ^= [ell != 0]
    for q in ell:
        c.x(q)
    mcx_clean(c, ell, f, spare)
    for q in ell:
        c.x(q)
    c.x(f)
    # f ^= [v == 0]
    for q in v:
        c.x(q)
    mcx(c, v, f, r + s)
    for q in v:
        c.x(q)
    # branch encoding
    c.cx(u[0], a)
    c.x(a)
    c.x(v[0])
    c.ccx(u[0], v[0], mi)
    c.x(v[0])
    emit_compare_gt(c, u, v, cmp)
    c.ccx(u[0], v[0], t1)
    c.ccx(t1, cmp, a)
    c.ccx(t1, cmp, mi)
    c.ccx(u[0], v[0], t1)
    emit_compare_gt(c, u, v, cmp)

    def same_flag():
        # t1 ^= f & [a == m_i]
        c.cx(a, mi)
        c.x(mi)
        c.ccx(f, mi, t1)
        c.x(mi)
        c.cx(a, mi)

    same_flag()
    c.ccx(t1, a, t2)
    emit_sub(c, v, u, None, t2)
    emit_add(c, s, r, None, t2)
    c.cx(t1, t2)
    emit_sub(c, u, v, None, t2)
    emit_add(c, r, s, None, t2)
    c.cx(t1, t2)
    c.ccx(t1, a, t2)
    same_flag()
    # halvings and doublings
    c.ccx(f, a, t1)
    emit_cyclic_shift(c, u, "halve", t1)
    emit_cyclic_shift(c, s, "double", t1)
    c.cx(f, t1)
    emit_cyclic_shift(c, v, "halve", t1)
    emit_cyclic_shift(c, r, "double", t1)
    c.cx(f, t1)
    c.ccx(f, a, t1)
    # a is 1 exactly when r is now odd
    c.ccx(f, r[0], a)
    # counter
    c.x(f)
    emit_ctrl_increment_clean(c, ell, f, spare)
    c.x(f)
    return c.freeze()


def inv_layout(ctx: ModulusContext) -> tuple[RegisterMap, dict[str, list[int]]]:
    n, L = ctx.n, ctx.log_n
    regs = [("x", n, "input"), ("out", n, "output"), ("u", n, "clean"), ("r", n + 1, "clean"),
            ("s", n + 1, "clean"), ("m", 2 * n, "clean"), ("f", 1, "clean"), ("ell", L + 1, "clean"),
            ("a", 1, "clean"), ("cmp", 1, "clean"), ("t1", 1, "clean"), ("t2", 1, "clean"),
            ("spare", L, "clean"), ("w", 1, "clean")]
    return _layout(7 * n + 2 * L + 9, regs)


@lru_cache(maxsize=64)
def _inv_block(p: int) -> tuple[Circuit, RegisterMap]:
    ctx = ModulusContext.of(p, check_prime=False)
    n, L = ctx.n, ctx.log_n
    if n < 2:
        raise CircuitError("modulus too small")
    rm, w = inv_layout(ctx)
    nq = rm.num_qubits
    u, v, r, s, m, ell, spare = w["u"], w["x"], w["r"], w["s"], w["m"], w["ell"], w["spare"]
    f, t1, wq = w["f"][0], w["t1"][0], w["w"][0]
    rnd = _kaliski_round(n, L)
    base = u + v + r + s + [f] + ell + w["a"] + w["cmp"] + [t1] + w["t2"] + spare

    fwd = Circuit(nq, name="inv_fwd")
    for j in range(n):
        if (p >> j) & 1:
            fwd.x(u[j])
    fwd.x(s[0])
    fwd.x(f)
    fwd.mark("init")
    for i in range(2 * n):
        fwd.append(rnd, base + [m[i]])
        fwd.mark(f"round_{i + 1}")
    # r lies in [1, 2p): bring it below p, leaving the flag in w
    emit_const_carry(fwd, r, (1 << (n + 1)) - p, wq, m[: n])
    append_const_add(fwd, r, (1 << (n + 1)) - p, m, wq)
    fwd.mark("reduce")
    # ell doublings, one conditional doubling per possible counter value
    for j in range(n):
        k = (1 << (L + 1)) - (j + 1)
        emit_const_carry(fwd, ell, k, t1, spare)
        emit_dbl_modp(fwd, p, r[:n], r[n], m, t1)
        emit_const_carry(fwd, ell, k, t1, spare)
    fwd.mark("convert")
    for q in r[:n]:
        fwd.x(q)
    append_const_add(fwd, r[:n], (p + 1) % (1 << n), m)
    fwd.mark("negate")
    fwd.freeze()

    c = Circuit(nq, name="inv_modp")
    c.append(fwd, range(nq))
    c.marks.update(fwd.marks)
    for j in range(n):
        c.cx(r[j], w["out"][j])
    c.mark("copy")
    c.append(fwd, range(nq), inverse=True)
    return c.freeze(), rm


def build_inv_modp(ctx) -> tuple[Circuit, RegisterMap]:
    """|X>|0> -> |X>|X^-1 2^(2n) mod p>, 7n + 2 ceil(log2 n) + 9 qubits.

    Marks ``init`` and ``round_1`` .. ``round_2n`` give the gate offsets of
    the round boundaries for probing.
    """
    return _inv_block(_ctx(ctx).p)


def inv_probes(ctx, names: Sequence[str] = ("u", "x", "r", "s", "ell")):
    """Probes at the start and after every round of the inverse."""
    from .simulator import Probe

    circ, _ = build_inv_modp(ctx)
    ctx = _ctx(ctx)
    out = [Probe(circ.marks["init"], tuple(names), "round_0")]
    for i in range(1, 2 * ctx.n + 1):
        out.append(Probe(circ.marks[f"round_{i}"], tuple(names), f"round_{i}"))
    return out
