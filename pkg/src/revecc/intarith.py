"""Integer arithmetic circuits: adders, carries, comparators, shifts, incrementers.

Emitters take a gate sink (a ``Circuit`` or a ``Recorder``) plus explicit
qubit lists and append gates. The ``build_*`` functions wrap them into
stand-alone circuits with a register map.

Registers are little-endian lists of qubit indices.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .gatecore import CNOT, NOT, TOFFOLI, Circuit, CircuitError, RegisterMap

Qubits = Sequence[int]


class Recorder:
    """Gate sink that only records, so a gate sequence can be replayed in reverse."""

    __slots__ = ("rows",)

    def __init__(self):
        self.rows: list[tuple[int, int, int, int]] = []

    def x(self, t):
        self.rows.append((NOT, t, t, t))

    def cx(self, c, t):
        self.rows.append((CNOT, c, c, t))

    def ccx(self, a, b, t):
        self.rows.append((TOFFOLI, a, b, t))

    def swap(self, a, b):
        self.cx(a, b)
        self.cx(b, a)
        self.cx(a, b)

    def table(self, inverse: bool = False) -> np.ndarray:
        t = np.array(self.rows, dtype=np.int32).reshape(-1, 4)
        return t[::-1].copy() if inverse else t

    def replay(self, sink, inverse: bool = False) -> None:
        rows = reversed(self.rows) if inverse else self.rows
        for k, a, b, t in rows:
            if k == NOT:
                sink.x(t)
            elif k == CNOT:
                sink.cx(a, t)
            else:
                sink.ccx(a, b, t)


def emit_inverse(sink, fn, *args, **kw) -> None:
    """Emit the reverse of whatever ``fn(rec, *args)`` emits."""
    rec = Recorder()
    fn(rec, *args, **kw)
    rec.replay(sink, inverse=True)


# multi-controlled NOTs

def ccc(sink, x1: int, x2: int, x3: int, t: int, helper: int) -> None:
    """t ^= x1 x2 x3 using one dirty helper qubit (4 Toffolis)."""
    sink.ccx(x3, helper, t)
    sink.ccx(x1, x2, helper)
    sink.ccx(x3, helper, t)
    sink.ccx(x1, x2, helper)


def mcx(sink, controls: Qubits, t: int, dirty: Qubits = ()) -> None:
    """t ^= AND(controls) with borrowed dirty qubits.

    k-2 dirty qubits give the 4(k-2) Toffoli ladder; with fewer the
    controls are split in two halves around one borrowed qubit.
    """
    k = len(controls)
    if k == 0:
        sink.x(t)
    elif k == 1:
        sink.cx(controls[0], t)
    elif k == 2:
        sink.ccx(controls[0], controls[1], t)
    elif len(dirty) >= k - 2:
        c, a = list(controls), list(dirty[: k - 2])
        def down():
            for i in range(k - 2, 1, -1):
                sink.ccx(c[i], a[i - 2], a[i - 1])
        def up():
            for i in range(2, k - 1):
                sink.ccx(c[i], a[i - 2], a[i - 1])
        for _ in range(2):
            sink.ccx(c[k - 1], a[k - 3], t)
            down()
            sink.ccx(c[0], c[1], a[0])
            up()
    elif dirty:
        d = dirty[0]
        ka = (k + 1) // 2
        A, B = list(controls[:ka]), list(controls[ka:])
        for _ in range(2):
            mcx(sink, B + [d], t, A)
            mcx(sink, A, d, B + [t])
    else:
        raise CircuitError(f"mcx with {k} controls needs a borrowed qubit")


def mcx_clean(sink, controls: Qubits, t: int, clean: Qubits) -> None:
    """t ^= AND(controls) with k-2 zeroed ancillas, 2(k-2)+1 Toffolis."""
    k = len(controls)
    if k <= 2:
        mcx(sink, controls, t)
        return
    if len(clean) < k - 2:
        raise CircuitError("mcx_clean: not enough clean ancillas")
    rec = Recorder()
    rec.ccx(controls[0], controls[1], clean[0])
    for i in range(2, k - 1):
        rec.ccx(controls[i], clean[i - 2], clean[i - 1])
    rec.replay(sink)
    sink.ccx(controls[k - 1], clean[k - 3], t)
    rec.replay(sink, inverse=True)


# Takahashi-style in-place adder

def _ztog2(sink, ctrl, b, a, z, helper):
    if ctrl is None:
        sink.ccx(b, a, z)
    else:
        ccc(sink, ctrl, b, a, z, helper)


def _ztog1(sink, ctrl, a, z):
    if ctrl is None:
        sink.cx(a, z)
    else:
        sink.ccx(ctrl, a, z)


def _helper(helper, used: set, *candidates):
    if helper is not None:
        return helper
    for c in candidates:
        if c is not None and c not in used:
            return c
    return None


def emit_add(sink, a: Qubits, b: Qubits, z: int | None = None, ctrl: int | None = None,
             helper: int | None = None) -> None:
    """b += a in place, ``len(a) == len(b)``.

    With ``z`` the carry-out is XORed into z (so b||z holds the n+1 bit sum
    when z enters 0); without it the sum wraps mod 2^n. With ``ctrl`` every
    effect is gated. ``helper`` is a borrowed qubit for the one triple-
    controlled gate of the controlled carry; by default one of the operand
    qubits that is idle at that point is borrowed.
    """
    n = len(a)
    if n != len(b):
        raise CircuitError("adder operands differ in width")
    if n == 0:
        return
    if z is None:
        # low n-1 bits with carry into b[n-1], then the top sum bit
        if n > 1:
            h = _helper(helper, set(), a[n - 1])
            emit_add(sink, a[: n - 1], b[: n - 1], b[n - 1], ctrl, h)
        _ztog1(sink, ctrl, a[n - 1], b[n - 1])
        return
    if n == 1:
        if ctrl is not None and helper is None:
            raise CircuitError("controlled 1-bit adder needs a helper qubit")
        _ztog2(sink, ctrl, b[0], a[0], z, helper)
        _ztog1(sink, ctrl, a[0], b[0])
        return
    h = _helper(helper, set(), b[0])
    for i in range(1, n):
        sink.cx(a[i], b[i])
    _ztog1(sink, ctrl, a[n - 1], z)
    for i in range(n - 2, 0, -1):
        sink.cx(a[i], a[i + 1])
    for i in range(n - 1):
        sink.ccx(b[i], a[i], a[i + 1])
    _ztog2(sink, ctrl, b[n - 1], a[n - 1], z, h)
    for i in range(n - 1, 0, -1):
        _ztog1(sink, ctrl, a[i], b[i])
        sink.ccx(b[i - 1], a[i - 1], a[i])
    for i in range(1, n - 1):
        sink.cx(a[i], a[i + 1])
    _ztog1(sink, ctrl, a[0], b[0])
    for i in range(1, n):
        sink.cx(a[i], b[i])


def emit_sub(sink, a: Qubits, b: Qubits, z: int | None = None, ctrl: int | None = None,
             helper: int | None = None) -> None:
    """b -= a (reverse of :func:`emit_add`); z flags a negative result when it enters 0."""
    emit_inverse(sink, emit_add, a, b, z, ctrl, helper)


def emit_carry(sink, a: Qubits, b: Qubits, t: int, ctrl: int | None = None,
               helper: int | None = None) -> None:
    """t ^= carry-out of a + b (times ctrl); a and b are restored. 2n-1 Toffolis."""
    n = len(a)
    if n != len(b):
        raise CircuitError("carry operands differ in width")
    if n == 0:
        return
    if n == 1:
        if ctrl is not None and helper is None:
            raise CircuitError("controlled 1-bit carry needs a helper qubit")
        _ztog2(sink, ctrl, b[0], a[0], t, helper)
        return
    h = _helper(helper, set(), b[0])
    fwd = Recorder()
    for i in range(1, n):
        fwd.cx(a[i], b[i])
    fwd_s1 = len(fwd.rows)
    for i in range(n - 2, 0, -1):
        fwd.cx(a[i], a[i + 1])
    for i in range(n - 1):
        fwd.ccx(b[i], a[i], a[i + 1])
    s1 = Recorder()
    s1.rows = fwd.rows[:fwd_s1]
    s23 = Recorder()
    s23.rows = fwd.rows[fwd_s1:]
    s1.replay(sink)
    _ztog1(sink, ctrl, a[n - 1], t)
    s23.replay(sink)
    _ztog2(sink, ctrl, b[n - 1], a[n - 1], t, h)
    s23.replay(sink, inverse=True)
    s1.replay(sink, inverse=True)


def emit_compare_gt(sink, x: Qubits, y: Qubits, t: int, ctrl: int | None = None,
                    helper: int | None = None) -> None:
    """t ^= [x > y] (times ctrl): carry of x + not(y)."""
    for q in y:
        sink.x(q)
    emit_carry(sink, x, y, t, ctrl, helper)
    for q in y:
        sink.x(q)


# constant carry and constant addition with borrowed qubits

def emit_const_carry(sink, x: Qubits, k: int, t: int, dirty: Qubits, ctrl: int | None = None,
                     fold: bool = True) -> None:
    """t ^= carry-out of x + k (k times ctrl if controlled), x restored.

    Needs len(x)-1 borrowed qubits (fewer when k has trailing zeros); they
    come back bit-exact. With ``fold=False`` the constant only selects
    gates inside a fixed skeleton: zero constants and trailing zero bits
    are not shortcut.
    """
    L = len(x)
    k &= (1 << L) - 1
    x = list(x)
    if fold:
        if k == 0:
            return
        j0 = (k & -k).bit_length() - 1
        x = x[j0:]
        k >>= j0
        L = len(x)
    if len(dirty) < L - 1:
        raise CircuitError(f"constant carry on {L} bits needs {L - 1} borrowed qubits")
    h = [None] + list(dirty[: L - 1]) + [t]
    kb = [(k >> j) & 1 for j in range(L)]

    def base():
        if not kb[0]:
            return
        if ctrl is None:
            sink.cx(x[0], h[1])
        else:
            sink.ccx(ctrl, x[0], h[1])

    if L == 1:
        base()
        return

    def V(j):
        sink.ccx(x[j], h[j], h[j + 1])

    def A(j):
        if not kb[j]:
            return
        if ctrl is None:
            # x[j] holds not(x_j), alpha = x_j
            sink.cx(x[j], h[j + 1])
            sink.x(h[j + 1])
        else:
            # x[j] holds x_j ^ ctrl, alpha = ctrl & x_j
            sink.x(x[j])
            sink.ccx(ctrl, x[j], h[j + 1])
            sink.x(x[j])

    def prep():
        for j in range(1, L):
            if kb[j]:
                if ctrl is None:
                    sink.x(x[j])
                else:
                    sink.cx(ctrl, x[j])

    def bracket():
        for j in range(L - 2, 0, -1):
            V(j)
        base()
        for j in range(1, L - 1):
            A(j)
        for j in range(1, L - 1):
            V(j)

    prep()
    V(L - 1)
    bracket()
    V(L - 1)
    A(L - 1)
    bracket()
    prep()


def emit_increment(sink, r: Qubits, dirty: Qubits) -> None:
    """r += 1 mod 2^w using borrowed qubits (subtract d, flip d, subtract d, flip d)."""
    w = len(r)
    if w == 0:
        return
    if w == 1:
        sink.x(r[0])
        return
    if len(dirty) >= w:
        d = list(dirty[:w])
        emit_sub(sink, d, r)
        for q in d:
            sink.x(q)
        emit_sub(sink, d, r)
        for q in d:
            sink.x(q)
        return
    # not enough borrowed qubits: peel the top bit with a multi-controlled NOT
    mcx(sink, r[: w - 1], r[w - 1], dirty)
    emit_increment(sink, r[: w - 1], dirty)


def emit_decrement(sink, r: Qubits, dirty: Qubits) -> None:
    emit_inverse(sink, emit_increment, r, dirty)


def emit_const_add(sink, x: Qubits, k: int, pool: Qubits, ctrl: int | None = None,
                   fold: bool = True) -> None:
    """x += k (times ctrl) mod 2^m with only borrowed qubits from ``pool``.

    Split x into a low and a high half; the carry of the low half into the
    high half is added through a borrowed toggle qubit g = pool[0]
    (fan-out, toggle, increment, toggle, decrement, fan-out), then both
    halves recurse. Needs at least one pool qubit for m >= 2.

    Only the top call folds the constant (zero constant, trailing zeros);
    the recursion keeps its full skeleton so the cost does not depend on
    the bit pattern of k beyond single gates.
    """
    m = len(x)
    k &= (1 << m) - 1
    x = list(x)
    pool = list(pool)
    if fold:
        if k == 0:
            return
        j0 = (k & -k).bit_length() - 1
        if j0:
            emit_const_add(sink, x[j0:], k >> j0, pool + x[:j0], ctrl, fold=False)
            return
    if m == 1:
        if not k & 1:
            return
        if ctrl is None:
            sink.x(x[0])
        else:
            sink.cx(ctrl, x[0])
        return
    if not pool:
        raise CircuitError("constant adder needs at least one borrowed qubit")
    L = (m + 1) // 2
    xl, xh = x[:L], x[L:]
    kl, kh = k & ((1 << L) - 1), k >> L
    g = pool[0]
    inc_reg = [g] + xh
    inc_dirty = xl + pool[1:]

    def fan():
        for q in xh:
            sink.cx(g, q)

    fan()
    emit_const_carry(sink, xl, kl, g, xh, ctrl, fold=False)
    emit_increment(sink, inc_reg, inc_dirty)
    emit_const_carry(sink, xl, kl, g, xh, ctrl, fold=False)
    emit_decrement(sink, inc_reg, inc_dirty)
    fan()
    emit_const_add(sink, xl, kl, xh + pool, ctrl, fold=False)
    emit_const_add(sink, xh, kh, xl + pool, ctrl, fold=False)


@lru_cache(maxsize=4096)
def const_add_block(m: int, k: int, controlled: bool, npool: int) -> Circuit:
    """Cached constant adder on local wires [x (m), ctrl?, pool (npool)]."""
    nq = m + int(controlled) + npool
    c = Circuit(nq, name=f"add{'c' if controlled else ''}_const_{m}")
    ctrl = m if controlled else None
    pool = list(range(m + int(controlled), nq))
    emit_const_add(c, list(range(m)), k, pool, ctrl)
    return c.freeze()


def append_const_add(c: Circuit, x: Qubits, k: int, pool: Qubits, ctrl: int | None = None,
                     inverse: bool = False) -> None:
    """Embed a cached constant adder x += k (or x -= k with ``inverse``)."""
    m = len(x)
    k &= (1 << m) - 1
    if k == 0:
        return
    pool = list(pool)
    blk = const_add_block(m, k, ctrl is not None, len(pool))
    wires = list(x) + ([ctrl] if ctrl is not None else []) + pool
    c.append(blk, wires, inverse=inverse)


# shifts

def emit_cyclic_shift(sink, x: Qubits, direction: str, ctrl: int | None = None) -> None:
    """Rotate x by one position. 'double' moves bits toward the MSB, 'halve' toward the LSB."""
    n = len(x)
    if direction == "double":
        pairs = [(x[i], x[i - 1]) for i in range(n - 1, 0, -1)]
    elif direction == "halve":
        pairs = [(x[i], x[i + 1]) for i in range(n - 1)]
    else:
        raise CircuitError(f"unknown shift direction {direction!r}")
    for a, b in pairs:
        if ctrl is None:
            sink.swap(a, b)
        else:
            sink.cx(b, a)
            sink.ccx(ctrl, a, b)
            sink.cx(b, a)


# stand-alone builders

def build_adder(n: int, controlled: bool = False) -> tuple[Circuit, RegisterMap]:
    """|x>|y> -> |x>|x+y>, y holding n+1 bits (its top bit enters 0)."""
    if n < 1:
        raise CircuitError("adder width must be >= 1")
    nq = 2 * n + 1 + int(controlled) + int(controlled and n == 1)
    c = Circuit(nq, name=f"adder{n}")
    rm = RegisterMap(nq)
    x = list(range(n))
    y = list(range(n, 2 * n + 1))
    rm.add("x", x, "input")
    rm.add("y", y, "output")
    ctrl = helper = None
    if controlled:
        ctrl = 2 * n + 1
        rm.add("ctrl", [ctrl], "control")
        if n == 1:
            helper = 2 * n + 2
            rm.add("helper", [helper], "dirty")
    emit_add(c, x, y[:n], y[n], ctrl, helper)
    return c.freeze(), rm


def build_const_adder(n: int, c_val: int, controlled: bool = False) -> tuple[Circuit, RegisterMap]:
    """|x> -> |x + c mod 2^n> with n-1 borrowed qubits (plus one clean, left untouched).

    The clean qubit of the contract is kept in the layout for compatibility
    but this construction never needs it.
    """
    if not 0 <= c_val < (1 << n):
        raise CircuitError(f"constant {c_val} out of range for {n} bits")
    if n < 1:
        raise CircuitError("width must be >= 1")
    ndirty = max(n - 1, 1)
    nq = n + 1 + ndirty + int(controlled)
    c = Circuit(nq, name=f"const_adder{n}")
    rm = RegisterMap(nq)
    x = list(range(n))
    rm.add("x", x, "input")
    rm.add("anc", [n], "clean")
    dirty = list(range(n + 1, n + 1 + ndirty))
    rm.add("dirty", dirty, "dirty")
    ctrl = None
    if controlled:
        ctrl = nq - 1
        rm.add("ctrl", [ctrl], "control")
    append_const_add(c, x, c_val, dirty, ctrl)
    return c.freeze(), rm


def build_comparator(n: int, controlled: bool = False) -> tuple[Circuit, RegisterMap]:
    """Flip ``t`` iff x > y; x and y are restored."""
    if n < 1:
        raise CircuitError("comparator width must be >= 1")
    nq = 2 * n + 1 + (2 if controlled else 0)
    c = Circuit(nq, name=f"cmp{n}")
    rm = RegisterMap(nq)
    x, y = list(range(n)), list(range(n, 2 * n))
    rm.add("x", x, "input")
    rm.add("y", y, "input")
    rm.add("t", [2 * n], "output")
    ctrl = helper = None
    if controlled:
        ctrl, helper = 2 * n + 1, 2 * n + 2
        rm.add("ctrl", [ctrl], "control")
        rm.add("helper", [helper], "dirty")
    emit_compare_gt(c, x, y, 2 * n, ctrl, helper)
    return c.freeze(), rm


def build_cyclic_shift(n: int, direction: str) -> tuple[Circuit, RegisterMap]:
    if n < 2:
        raise CircuitError("shift width must be >= 2")
    c = Circuit(n, name=f"shift_{direction}")
    rm = RegisterMap(n)
    rm.add("x", range(n), "input")
    emit_cyclic_shift(c, list(range(n)), direction)
    return c.freeze(), rm


def build_incrementer(w: int) -> tuple[Circuit, RegisterMap]:
    """|x> -> |x+1 mod 2^w> with w borrowed qubits."""
    if w < 1:
        raise CircuitError("incrementer width must be >= 1")
    c = Circuit(2 * w, name=f"inc{w}")
    rm = RegisterMap(2 * w)
    rm.add("x", range(w), "input")
    rm.add("dirty", range(w, 2 * w), "dirty")
    emit_increment(c, list(range(w)), list(range(w, 2 * w)))
    return c.freeze(), rm


def build_const_carry(n: int, k: int, controlled: bool = False) -> tuple[Circuit, RegisterMap]:
    """t ^= carry-out of x + k with n-1 borrowed qubits."""
    nd = max(n - 1, 0)
    nq = n + 1 + nd + int(controlled)
    c = Circuit(nq, name=f"const_carry{n}")
    rm = RegisterMap(nq)
    rm.add("x", range(n), "input")
    rm.add("t", [n], "output")
    if nd:
        rm.add("dirty", range(n + 1, n + 1 + nd), "dirty")
    ctrl = None
    if controlled:
        ctrl = nq - 1
        rm.add("ctrl", [ctrl], "control")
    emit_const_carry(c, list(range(n)), k, n, list(range(n + 1, n + 1 + nd)), ctrl)
    return c.freeze(), rm
