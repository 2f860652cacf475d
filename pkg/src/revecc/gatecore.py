"""Circuit representation, register maps and the Toffoli cost model.

A ``Circuit`` is a lazy tree. Leaves are small numpy gate tables, inner
nodes reference another circuit together with a qubit map and an inverse
flag. Consumers walk the tree and receive gate tables in global qubit
coordinates, so a circuit with 1e8 gates never has to exist in memory at
once.

Gate tables have shape ``(k, 4)`` and dtype int32 with rows
``[kind, c1, c2, t]``. A NOT repeats its target in both control slots and a
CNOT repeats its control, which keeps remapping a single fancy-index.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Sequence

import numpy as np
from numba import njit

NOT, CNOT, TOFFOLI = 0, 1, 2
KIND_NAMES = {NOT: "x", CNOT: "cx", TOFFOLI: "ccx"}

ROLES = ("input", "output", "clean", "dirty", "control")

_EMPTY = np.zeros((0, 4), dtype=np.int32)


class CircuitError(ValueError):
    pass


def _gate_counts(table: np.ndarray) -> np.ndarray:
    return np.bincount(table[:, 0], minlength=3)[:3].astype(np.int64)


class Circuit:
    """Ordered gate stream over ``num_qubits`` wires.

    Gates are appended with :meth:`x`, :meth:`cx`, :meth:`ccx` or by
    embedding another circuit with :meth:`append`. Embedded circuits are
    frozen and shared, which is what makes repeated sub-blocks cheap.
    """

    __slots__ = ("num_qubits", "name", "_items", "_buf", "_counts", "_frozen", "marks")

    def __init__(self, num_qubits: int, name: str = ""):
        if num_qubits < 0:
            raise CircuitError("negative qubit count")
        self.num_qubits = int(num_qubits)
        self.name = name
        self._items: list = []
        self._buf: list[tuple[int, int, int, int]] = []
        self._counts = np.zeros(3, dtype=np.int64)
        self._frozen = False
        # name -> gate offset, recorded by mark()
        self.marks: dict[str, int] = {}

    # construction

    def _check(self, *qs: int) -> None:
        if self._frozen:
            raise CircuitError("circuit is frozen")
        for q in qs:
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f"qubit {q} out of range for {self.num_qubits} qubits")
        if len(set(qs)) != len(qs):
            raise CircuitError(f"repeated qubit in gate {qs}")

    def x(self, t: int) -> None:
        self._check(t)
        self._buf.append((NOT, t, t, t))

    def cx(self, c: int, t: int) -> None:
        self._check(c, t)
        self._buf.append((CNOT, c, c, t))

    def ccx(self, a: int, b: int, t: int) -> None:
        self._check(a, b, t)
        self._buf.append((TOFFOLI, a, b, t))

    def swap(self, a: int, b: int) -> None:
        self.cx(a, b)
        self.cx(b, a)
        self.cx(a, b)

    def extend_table(self, table: np.ndarray) -> None:
        """Append a raw gate table given in this circuit's coordinates."""
        if self._frozen:
            raise CircuitError("circuit is frozen")
        table = np.ascontiguousarray(table, dtype=np.int32).reshape(-1, 4)
        if len(table) == 0:
            return
        _validate_table(table, self.num_qubits)
        self._flush()
        self._items.append(table)
        self._counts += _gate_counts(table)

    def append(self, sub: "Circuit", qubits: Sequence[int], inverse: bool = False) -> None:
        """Embed ``sub`` with its local qubit ``i`` wired to ``qubits[i]``."""
        if self._frozen:
            raise CircuitError("circuit is frozen")
        qmap = np.asarray(qubits, dtype=np.int32)
        if qmap.shape != (sub.num_qubits,):
            raise CircuitError(f"expected {sub.num_qubits} wires, got {qmap.shape}")
        if len(qmap) and (qmap.min() < 0 or qmap.max() >= self.num_qubits):
            raise CircuitError("wire map out of range")
        if len(np.unique(qmap)) != len(qmap):
            raise CircuitError("wire map repeats a qubit")
        sub.freeze()
        if sub.gate_count == 0:
            return
        self._flush()
        self._items.append((sub, qmap, bool(inverse)))
        self._counts += sub._counts

    def mark(self, name: str) -> int:
        """Record the current gate offset under ``name``."""
        self._flush()
        off = self.gate_count
        self.marks[name] = off
        return off

    def _flush(self) -> None:
        if self._buf:
            table = np.array(self._buf, dtype=np.int32)
            self._buf = []
            self._items.append(table)
            self._counts += _gate_counts(table)

    def freeze(self) -> "Circuit":
        if not self._frozen:
            self._flush()
            self._frozen = True
        return self

    # inspection

    @property
    def qubit_count(self) -> int:
        return self.num_qubits

    @property
    def counts(self) -> tuple[int, int, int]:
        """(not, cnot, toffoli) counts, computed without walking the tree."""
        c = self._counts.copy()
        for g in self._buf:
            c[g[0]] += 1
        return int(c[0]), int(c[1]), int(c[2])

    @property
    def gate_count(self) -> int:
        return sum(self.counts)

    @property
    def toffoli_count(self) -> int:
        return self.counts[2]

    def __len__(self) -> int:
        return self.gate_count

    def _walk(self, qmap, inverse: bool) -> Iterator[np.ndarray]:
        items = reversed(self._items) if inverse else self._items
        for it in items:
            if isinstance(it, np.ndarray):
                tab = it[::-1] if inverse else it
                if qmap is None:
                    yield tab
                else:
                    out = np.empty_like(tab)
                    out[:, 0] = tab[:, 0]
                    out[:, 1:] = qmap[tab[:, 1:]]
                    yield out
            else:
                sub, m, inv = it
                yield from sub._walk(m if qmap is None else qmap[m], inverse ^ inv)

    def chunks(self, size: int = 1 << 18) -> Iterator[np.ndarray]:
        """Yield contiguous gate tables of roughly ``size`` rows in order."""
        self.freeze()
        pending: list[np.ndarray] = []
        n = 0
        for tab in self._walk(None, False):
            if len(tab) >= size and not pending:
                yield np.ascontiguousarray(tab)
                continue
            pending.append(tab)
            n += len(tab)
            if n >= size:
                yield np.ascontiguousarray(np.concatenate(pending))
                pending, n = [], 0
        if pending:
            yield np.ascontiguousarray(np.concatenate(pending))

    def to_table(self) -> np.ndarray:
        """Materialize the whole stream. Only sensible for small circuits."""
        parts = list(self.chunks())
        return np.concatenate(parts) if parts else _EMPTY.copy()

    def gates(self) -> Iterator[tuple]:
        """Iterate gates as tuples ``('x', t)``, ``('cx', c, t)`` or ``('ccx', a, b, t)``."""
        for tab in self.chunks():
            for k, a, b, t in tab.tolist():
                if k == NOT:
                    yield ("x", t)
                elif k == CNOT:
                    yield ("cx", a, t)
                else:
                    yield ("ccx", a, b, t)

    def inverse(self) -> "Circuit":
        return reverse(self)

    def __repr__(self) -> str:
        nx, ncx, nccx = self.counts
        return f"Circuit({self.name or '?'}, qubits={self.num_qubits}, x={nx}, cx={ncx}, ccx={nccx})"


def _validate_table(table: np.ndarray, nq: int) -> None:
    if len(table) == 0:
        return
    k = table[:, 0]
    if k.min() < 0 or k.max() > 2:
        raise CircuitError("unknown gate kind")
    q = table[:, 1:]
    if q.min() < 0 or q.max() >= nq:
        raise CircuitError("gate index out of range")
    bad_cx = (k == CNOT) & (q[:, 0] == q[:, 2])
    bad_ccx = (k == TOFFOLI) & ((q[:, 0] == q[:, 1]) | (q[:, 0] == q[:, 2]) | (q[:, 1] == q[:, 2]))
    if bad_cx.any() or bad_ccx.any():
        raise CircuitError("gate with repeated qubit")


def reverse(stream: Circuit) -> Circuit:
    """Gates of ``stream`` in reverse order. Every gate is self-inverse."""
    out = Circuit(stream.num_qubits, name=f"rev({stream.name})")
    out.append(stream, np.arange(stream.num_qubits), inverse=True)
    return out.freeze()


def concat(*streams: Circuit) -> Circuit:
    nq = max(s.num_qubits for s in streams)
    out = Circuit(nq)
    for s in streams:
        out.append(s, np.arange(s.num_qubits))
    return out.freeze()


def swap_pair(a: int, b: int, num_qubits: int | None = None) -> Circuit:
    if a == b:
        raise CircuitError("swap_pair needs two distinct qubits")
    c = Circuit(num_qubits if num_qubits is not None else max(a, b) + 1, name="swap")
    c.swap(a, b)
    return c.freeze()


def from_gates(num_qubits: int, gates: Iterable[Sequence]) -> Circuit:
    """Build a flat circuit from tuples like ``('ccx', 0, 1, 2)`` or ``(2, 0, 1, 2)``."""
    c = Circuit(num_qubits)
    for g in gates:
        kind = g[0]
        if kind in ("x", NOT):
            c.x(g[1])
        elif kind in ("cx", CNOT):
            c.cx(g[1], g[2])
        elif kind in ("ccx", TOFFOLI):
            c.ccx(g[1], g[2], g[3])
        else:
            raise CircuitError(f"unknown gate {g!r}")
    return c.freeze()


# registers

@dataclass(frozen=True)
class Register:
    name: str
    qubits: tuple[int, ...]
    role: str

    def __len__(self) -> int:
        return len(self.qubits)


@dataclass
class RegisterMap:
    """Named non-overlapping qubit ranges with role tags."""

    num_qubits: int
    registers: dict[str, Register] = field(default_factory=dict)

    def add(self, name: str, qubits: Sequence[int], role: str) -> Register:
        if role not in ROLES:
            raise CircuitError(f"unknown role {role!r}")
        if name in self.registers:
            raise CircuitError(f"duplicate register {name!r}")
        qs = tuple(int(q) for q in qubits)
        used = {q for r in self.registers.values() for q in r.qubits}
        if used.intersection(qs) or len(set(qs)) != len(qs):
            raise CircuitError(f"register {name!r} overlaps another register")
        if any(q < 0 or q >= self.num_qubits for q in qs):
            raise CircuitError(f"register {name!r} out of range")
        reg = Register(name, qs, role)
        self.registers[name] = reg
        return reg

    def __getitem__(self, name: str) -> Register:
        try:
            return self.registers[name]
        except KeyError:
            raise KeyError(f"unknown register {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.registers

    def __iter__(self):
        return iter(self.registers.values())

    def names(self, role: str | None = None) -> list[str]:
        return [r.name for r in self.registers.values() if role is None or r.role == role]

    def to_dict(self) -> dict:
        return {
            "qubits": self.num_qubits,
            "registers": [
                {"name": r.name, "role": r.role, "qubits": list(r.qubits)} for r in self.registers.values()
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegisterMap":
        rm = cls(int(d["qubits"]))
        for r in d["registers"]:
            rm.add(r["name"], r["qubits"], r["role"])
        return rm

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


# cost model

@dataclass(frozen=True)
class ResourceReport:
    toffoli_count: int
    toffoli_depth: int
    cnot_count: int
    not_count: int
    qubit_highwater: int

    def as_dict(self) -> dict:
        return {
            "qubits": self.qubit_highwater,
            "toffoli": self.toffoli_count,
            "depth": self.toffoli_depth,
            "cnot": self.cnot_count,
            "not": self.not_count,
        }


@njit(cache=True, nogil=True)
def _depth_sweep(tab, cnt, sync):
    for i in range(tab.shape[0]):
        if tab[i, 0] == 1 and sync:
            # Clifford: no new layer, but the target now depends on the control
            a = tab[i, 1]
            t = tab[i, 3]
            if cnt[a] > cnt[t]:
                cnt[t] = cnt[a]
            else:
                cnt[a] = cnt[t]
        elif tab[i, 0] == 2:
            a = tab[i, 1]
            b = tab[i, 2]
            c = tab[i, 3]
            d = cnt[a]
            if cnt[b] > d:
                d = cnt[b]
            if cnt[c] > d:
                d = cnt[c]
            d += 1
            cnt[a] = d
            cnt[b] = d
            cnt[c] = d


def toffoli_depth(stream: Circuit, sync_cnot: bool = True) -> int:
    """Per-qubit running-counter sweep.

    A Toffoli lifts all three of its qubits to one past their maximum. A
    CNOT adds no layer but, with ``sync_cnot``, aligns control and target
    to the later of the two (the target now depends on the control).
    With ``sync_cnot=False`` CNOTs are skipped like NOTs, which ignores
    that ordering and can only give a smaller depth.
    """
    cnt = np.zeros(max(stream.num_qubits, 1), dtype=np.int64)
    for tab in stream.chunks():
        _depth_sweep(tab, cnt, sync_cnot)
    return int(cnt.max())


def touched_highwater(stream: Circuit) -> int:
    """1 + largest qubit index referenced by any gate (0 for an empty stream)."""
    hi = -1
    for tab in stream.chunks():
        hi = max(hi, int(tab[:, 1:].max()))
    return hi + 1


def measure(stream: Circuit, depth: bool = True, sync_cnot: bool = True) -> ResourceReport:
    """Resource report for ``stream``. ``depth=False`` skips the gate walk (depth reported as -1)."""
    nx, ncx, nccx = stream.counts
    d = toffoli_depth(stream, sync_cnot) if depth else -1
    return ResourceReport(nccx, d, ncx, nx, stream.num_qubits)


# netlist format

def write_netlist(stream: Circuit, fh: IO[str], comment: str | None = None) -> None:
    if comment:
        for line in comment.splitlines():
            fh.write(f"# {line}\n")
    fh.write(f"qubits {stream.num_qubits}\n")
    for tab in stream.chunks(1 << 16):
        if not len(tab):
            continue
        s = tab.astype(str)
        body = np.where(tab[:, 0] == NOT, np.char.add("x ", s[:, 3]),
                        np.where(tab[:, 0] == CNOT, np.char.add(np.char.add("cx ", s[:, 1]), np.char.add(" ", s[:, 3])),
                                 np.char.add(np.char.add(np.char.add("ccx ", s[:, 1]), np.char.add(" ", s[:, 2])),
                                             np.char.add(" ", s[:, 3]))))
        fh.write("\n".join(body.tolist()))
        fh.write("\n")


def read_netlist(fh: IO[str] | Iterable[str]) -> Circuit:
    nq = None
    rows: list[tuple[int, int, int, int]] = []
    for lineno, raw in enumerate(fh, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op, args = parts[0], parts[1:]
        try:
            vals = [int(a) for a in args]
        except ValueError:
            raise CircuitError(f"line {lineno}: bad integer in {raw.strip()!r}") from None
        if op == "qubits":
            if nq is not None or len(vals) != 1:
                raise CircuitError(f"line {lineno}: bad header")
            nq = vals[0]
            continue
        if nq is None:
            raise CircuitError(f"line {lineno}: gate before 'qubits' header")
        if op == "x" and len(vals) == 1:
            rows.append((NOT, vals[0], vals[0], vals[0]))
        elif op == "cx" and len(vals) == 2:
            rows.append((CNOT, vals[0], vals[0], vals[1]))
        elif op == "ccx" and len(vals) == 3:
            rows.append((TOFFOLI, vals[0], vals[1], vals[2]))
        else:
            raise CircuitError(f"line {lineno}: cannot parse {raw.strip()!r}")
    if nq is None:
        raise CircuitError("missing 'qubits' header")
    c = Circuit(nq)
    if rows:
        c.extend_table(np.array(rows, dtype=np.int32))
    return c.freeze()
