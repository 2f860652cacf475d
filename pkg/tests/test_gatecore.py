import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from revecc.gatecore import (
    Circuit,
    CircuitError,
    RegisterMap,
    concat,
    from_gates,
    measure,
    read_netlist,
    reverse,
    swap_pair,
    toffoli_depth,
    write_netlist,
)
from revecc.simulator import BasisState, run


def test_reverse_swaps_order():
    c = from_gates(3, [("cx", 0, 1), ("ccx", 0, 1, 2)])
    assert list(reverse(c).gates()) == [("ccx", 0, 1, 2), ("cx", 0, 1)]


def test_reverse_empty():
    assert reverse(Circuit(4)).gate_count == 0


def test_nested_reverse_of_embedded_blocks():
    inner = from_gates(2, [("x", 0), ("cx", 0, 1)])
    c = Circuit(3)
    c.append(inner, [2, 0])
    c.ccx(0, 1, 2)
    c.append(inner, [1, 2], inverse=True)
    c.freeze()
    assert list(c.gates()) == [("x", 2), ("cx", 2, 0), ("ccx", 0, 1, 2), ("cx", 1, 2), ("x", 1)]
    assert list(reverse(reverse(c)).gates()) == list(c.gates())


gate = st.one_of(
    st.tuples(st.just("x"), st.integers(0, 15)),
    st.lists(st.integers(0, 15), min_size=2, max_size=2, unique=True).map(lambda q: ("cx", *q)),
    st.lists(st.integers(0, 15), min_size=3, max_size=3, unique=True).map(lambda q: ("ccx", *q)),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(gate, max_size=60), st.integers(0, (1 << 16) - 1))
def test_stream_then_reverse_is_identity(gates, x):
    c = from_gates(16, gates)
    both = concat(c, reverse(c))
    st0 = BasisState.from_bits([(x >> i) & 1 for i in range(16)])
    assert run(both, st0).bits.tolist() == st0.bits.tolist()


def test_measure_serial_chain():
    r = measure(from_gates(3, [("ccx", 0, 1, 2)] * 5))
    assert (r.toffoli_count, r.toffoli_depth) == (5, 5)


def test_measure_parallel():
    r = measure(from_gates(12, [("ccx", 3 * i, 3 * i + 1, 3 * i + 2) for i in range(4)]))
    assert (r.toffoli_count, r.toffoli_depth) == (4, 1)


def test_measure_clifford_only():
    r = measure(from_gates(3, [("x", 0), ("cx", 0, 1), ("cx", 1, 2)]))
    assert (r.toffoli_count, r.toffoli_depth, r.cnot_count, r.not_count) == (0, 0, 2, 1)


def test_depth_cnot_carries_dependency():
    # the second Toffoli reads qubit 3, which a CNOT just wrote from a depth-1 qubit
    c = from_gates(6, [("ccx", 0, 1, 2), ("cx", 2, 3), ("ccx", 3, 4, 5)])
    assert toffoli_depth(c) == 2
    assert toffoli_depth(c, sync_cnot=False) == 1


@settings(max_examples=100, deadline=None)
@given(st.lists(gate, max_size=40), gate)
def test_depth_monotone_and_bounded(gates, extra):
    c = from_gates(16, gates)
    d = from_gates(16, gates + [extra])
    for sync in (True, False):
        assert toffoli_depth(d, sync) >= toffoli_depth(c, sync)
        assert toffoli_depth(c, sync) <= c.toffoli_count


def test_swap_pair():
    s = swap_pair(0, 1)
    assert run(s, BasisState.from_bits([1, 0])).bits.tolist() == [0, 1]
    assert run(s, BasisState.from_bits([0, 0])).bits.tolist() == [0, 0]
    r = measure(s)
    assert (r.toffoli_count, r.cnot_count) == (0, 3)
    with pytest.raises(CircuitError):
        swap_pair(2, 2)


def test_gate_validation():
    c = Circuit(3)
    with pytest.raises(CircuitError):
        c.ccx(0, 0, 1)
    with pytest.raises(CircuitError):
        c.cx(0, 3)
    c.freeze()
    with pytest.raises(CircuitError):
        c.x(0)


def test_netlist_roundtrip():
    c = from_gates(4, [("x", 3), ("cx", 0, 1), ("ccx", 0, 1, 2), ("ccx", 3, 2, 0)])
    buf = io.StringIO()
    write_netlist(c, buf, "demo")
    text = buf.getvalue()
    assert text.splitlines()[:3] == ["# demo", "qubits 4", "x 3"]
    back = read_netlist(io.StringIO(text))
    assert back.num_qubits == 4
    assert np.array_equal(back.to_table(), c.to_table())


@pytest.mark.parametrize("text", ["x 0\n", "qubits 2\nccx 0 1\n", "qubits 2\ncx 0 0\n", "qubits 2\nfoo 1\n"])
def test_netlist_errors(text):
    with pytest.raises(CircuitError):
        read_netlist(io.StringIO(text))


def test_register_map():
    rm = RegisterMap(5)
    rm.add("x", [0, 1], "input")
    rm.add("anc", [2], "clean")
    with pytest.raises(CircuitError):
        rm.add("y", [1, 3], "output")
    with pytest.raises(CircuitError):
        rm.add("z", [4], "bogus")
    back = RegisterMap.from_dict(rm.to_dict())
    assert back.to_dict() == rm.to_dict()
    assert rm.names("clean") == ["anc"]


def test_marks_and_counts():
    c = Circuit(3)
    c.x(0)
    c.mark("a")
    c.ccx(0, 1, 2)
    c.freeze()
    assert c.marks["a"] == 1
    assert c.counts == (1, 0, 1)
