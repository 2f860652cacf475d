"""Bit-exact classical execution of Toffoli networks.

The state is bit-sliced: ``state[q, w]`` is a 64-bit word whose bit ``j``
holds qubit ``q`` of test input ``64*w + j``. One pass over the gate stream
therefore evaluates up to ``64*W`` independent basis states.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from numba import njit

from .gatecore import Circuit, CircuitError, RegisterMap

_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True, nogil=True)
def _apply(tab, state, w0, w1):
    ones = np.uint64(0xFFFFFFFFFFFFFFFF)
    for i in range(tab.shape[0]):
        k = tab[i, 0]
        t = tab[i, 3]
        if k == 0:
            for w in range(w0, w1):
                state[t, w] ^= ones
        elif k == 1:
            c = tab[i, 1]
            for w in range(w0, w1):
                state[t, w] ^= state[c, w]
        else:
            a = tab[i, 1]
            b = tab[i, 2]
            for w in range(w0, w1):
                state[t, w] ^= state[a, w] & state[b, w]


def workers() -> int:
    """Worker count for independent test vectors (``REVECC_WORKERS``, default all cores)."""
    env = os.environ.get("REVECC_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def apply_stream(stream: Circuit, state: np.ndarray, nworkers: int | None = None) -> np.ndarray:
    """Run ``stream`` in place on a packed state of shape (qubits, words)."""
    if state.shape[0] != stream.num_qubits:
        raise CircuitError(f"state has {state.shape[0]} qubits, stream needs {stream.num_qubits}")
    W = state.shape[1]
    nw = min(nworkers or workers(), W)
    if nw <= 1:
        for tab in stream.chunks():
            _apply(tab, state, 0, W)
        return state
    bounds = np.linspace(0, W, nw + 1).astype(int)
    with ThreadPoolExecutor(nw) as ex:
        for tab in stream.chunks():
            list(ex.map(lambda i: _apply(tab, state, bounds[i], bounds[i + 1]), range(nw)))
    return state


# packing between Python integers and bit slices

def pack_values(values: Sequence[int], nbits: int, words: int) -> np.ndarray:
    """Pack integers (one per lane) into an (nbits, words) uint64 slice."""
    lanes = words * 64
    if len(values) > lanes:
        raise ValueError("more values than lanes")
    bits = np.zeros((nbits, lanes), dtype=np.uint8)
    if nbits <= 62:
        v = np.asarray([int(x) for x in values], dtype=np.int64)
        for j in range(nbits):
            bits[j, : len(v)] = (v >> j) & 1
    else:
        for i, x in enumerate(values):
            x = int(x)
            if x:
                row = np.frombuffer(x.to_bytes((nbits + 7) // 8, "little"), dtype=np.uint8)
                bits[:, i] = np.unpackbits(row, bitorder="little")[:nbits]
    packed = np.packbits(bits, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").reshape(nbits, words).astype(np.uint64)


def unpack_values(slice_: np.ndarray, count: int) -> list[int]:
    nbits = slice_.shape[0]
    bits = np.unpackbits(np.ascontiguousarray(slice_.astype("<u8")).view(np.uint8), axis=1, bitorder="little")
    bits = bits[:, :count]
    if nbits <= 62:
        w = (np.int64(1) << np.arange(nbits, dtype=np.int64))[:, None]
        return [int(v) for v in (bits.astype(np.int64) * w).sum(axis=0)]
    by = np.packbits(bits.T, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in by]


@dataclass
class BasisState:
    """One computational basis state as a bit vector (index 0 = qubit 0)."""

    bits: np.ndarray

    @classmethod
    def zeros(cls, num_qubits: int) -> "BasisState":
        return cls(np.zeros(num_qubits, dtype=np.uint8))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BasisState":
        return cls(np.asarray(bits, dtype=np.uint8) & 1)

    @classmethod
    def from_registers(cls, regs: RegisterMap, values: Mapping[str, int]) -> "BasisState":
        st = cls.zeros(regs.num_qubits)
        for name, v in values.items():
            st.write(regs[name].qubits, v)
        return st

    def __len__(self) -> int:
        return len(self.bits)

    def write(self, qubits: Sequence[int], value: int) -> None:
        value = int(value)
        if value < 0 or value >> len(qubits):
            raise ValueError(f"value {value} does not fit in {len(qubits)} bits")
        for j, q in enumerate(qubits):
            self.bits[q] = (value >> j) & 1

    def read(self, qubits: Sequence[int]) -> int:
        v = 0
        for j, q in enumerate(qubits):
            v |= int(self.bits[q]) << j
        return v

    def read_reg(self, regs: RegisterMap, name: str) -> int:
        return self.read(regs[name].qubits)

    def to_packed(self) -> np.ndarray:
        return self.bits.astype(np.uint64).reshape(-1, 1)

    @classmethod
    def from_packed(cls, packed: np.ndarray, lane: int = 0) -> "BasisState":
        w, b = divmod(lane, 64)
        return cls(((packed[:, w] >> np.uint64(b)) & np.uint64(1)).astype(np.uint8))

    def copy(self) -> "BasisState":
        return BasisState(self.bits.copy())


def run(stream: Circuit, initial: BasisState) -> BasisState:
    if len(initial) != stream.num_qubits:
        raise CircuitError(f"state length {len(initial)} != qubit count {stream.num_qubits}")
    st = initial.to_packed()
    apply_stream(stream, st, 1)
    return BasisState.from_packed(st)


@dataclass(frozen=True)
class Probe:
    """Read ``registers`` once ``offset`` gates have been applied."""

    offset: int
    registers: tuple[str, ...]
    label: str = ""


def run_with_probes(
    stream: Circuit, initial: BasisState, probes: Sequence[Probe], regs: RegisterMap
) -> tuple[BasisState, list[dict[str, int]]]:
    total = stream.gate_count
    for p in probes:
        if not 0 <= p.offset <= total:
            raise CircuitError(f"probe offset {p.offset} outside [0, {total}]")
        for name in p.registers:
            regs[name]
    order = sorted(range(len(probes)), key=lambda i: probes[i].offset)
    out: list[dict[str, int] | None] = [None] * len(probes)
    st = initial.to_packed()
    pos = 0
    k = 0

    def fire(upto: int) -> None:
        nonlocal k
        while k < len(order) and probes[order[k]].offset <= upto:
            cur = BasisState.from_packed(st)
            p = probes[order[k]]
            out[order[k]] = {name: cur.read_reg(regs, name) for name in p.registers}
            k += 1

    fire(0)
    for tab in stream.chunks():
        start = 0
        while k < len(order) and probes[order[k]].offset < pos + len(tab):
            cut = probes[order[k]].offset - pos
            _apply(tab[start:cut], st, 0, 1)
            start = cut
            fire(pos + cut)
        _apply(tab[start:], st, 0, 1)
        pos += len(tab)
    fire(pos)
    return BasisState.from_packed(st), out  # type: ignore[return-value]


def run_batch(
    stream: Circuit,
    regs: RegisterMap,
    inputs: Mapping[str, Sequence[int]],
    count: int | None = None,
    nworkers: int | None = None,
) -> dict[str, list[int]]:
    """Simulate many basis states in one pass and read back every register.

    ``inputs`` gives one value per lane for each named register; registers
    not listed start at zero. Returns the final value of every register for
    each lane.
    """
    if count is None:
        count = len(next(iter(inputs.values()))) if inputs else 1
    words = max(1, (count + 63) // 64)
    st = np.zeros((stream.num_qubits, words), dtype=np.uint64)
    for name, vals in inputs.items():
        if len(vals) != count:
            raise ValueError(f"register {name!r}: expected {count} values")
        q = np.asarray(regs[name].qubits, dtype=np.int64)
        st[q] = pack_values(vals, len(q), words)
    apply_stream(stream, st, nworkers)
    return {r.name: unpack_values(st[np.asarray(r.qubits, dtype=np.int64)], count) for r in regs if len(r)}


def format_hex(value: int) -> str:
    return f"0x{value:x}"


def parse_hex(text: str) -> int:
    return int(text, 16)
