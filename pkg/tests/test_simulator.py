import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from revecc.gatecore import Circuit, CircuitError, RegisterMap, from_gates
from revecc.modarith import ModulusContext, build_inv_modp, inv_probes
from revecc.simulator import (
    BasisState,
    Probe,
    format_hex,
    pack_values,
    parse_hex,
    run,
    run_batch,
    run_with_probes,
    unpack_values,
)


@pytest.mark.parametrize("kind", ["x", "cx", "ccx"])
def test_gate_truth_tables(kind):
    g = {"x": ("x", 2), "cx": ("cx", 0, 2), "ccx": ("ccx", 0, 1, 2)}[kind]
    c = from_gates(3, [g])
    for v in range(8):
        bits = [(v >> i) & 1 for i in range(3)]
        flip = {"x": 1, "cx": bits[0], "ccx": bits[0] & bits[1]}[kind]
        want = bits[:2] + [bits[2] ^ flip]
        assert run(c, BasisState.from_bits(bits)).bits.tolist() == want


def test_toffoli_examples():
    c = from_gates(3, [("ccx", 0, 1, 2)])
    assert run(c, BasisState.from_bits([1, 1, 0])).bits.tolist() == [1, 1, 1]
    assert run(c, BasisState.from_bits([1, 0, 0])).bits.tolist() == [1, 0, 0]


def test_length_mismatch():
    with pytest.raises(CircuitError):
        run(Circuit(3), BasisState.zeros(2))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 200), st.lists(st.integers(0, 2 ** 200 - 1), min_size=1, max_size=150))
def test_pack_roundtrip(nbits, vals):
    vals = [v % (1 << nbits) for v in vals]
    words = (len(vals) + 63) // 64
    assert unpack_values(pack_values(vals, nbits, words), len(vals)) == vals


def test_batch_matches_single_runs():
    rng = random.Random(3)
    gates = []
    for _ in range(300):
        q = rng.sample(range(10), 3)
        gates.append(rng.choice([("x", q[0]), ("cx", q[0], q[1]), ("ccx", *q)]))
    c = from_gates(10, gates)
    rm = RegisterMap(10)
    rm.add("a", range(6), "input")
    rm.add("b", range(6, 10), "input")
    a = [rng.randrange(64) for _ in range(200)]
    b = [rng.randrange(16) for _ in range(200)]
    out = run_batch(c, rm, {"a": a, "b": b}, nworkers=2)
    for i in range(200):
        fin = run(c, BasisState.from_registers(rm, {"a": a[i], "b": b[i]}))
        assert fin.read_reg(rm, "a") == out["a"][i]
        assert fin.read_reg(rm, "b") == out["b"][i]


def test_probes_kaliski_example():
    ctx = ModulusContext.of(11)
    circ, rm = build_inv_modp(ctx)
    probes = inv_probes(ctx)
    _, rows = run_with_probes(circ, BasisState.from_registers(rm, {"x": 8}), probes, rm)
    # column k=3 of the x=8 example: (u, v, r, s) = (11, 1, 0, 1)
    assert (rows[3]["u"], rows[3]["x"], rows[3]["r"], rows[3]["s"]) == (11, 1, 0, 1)
    _, rows = run_with_probes(circ, BasisState.from_registers(rm, {"x": 7}), probes, rm)
    assert rows[-1]["ell"] == 3


def test_probe_at_zero_and_errors():
    c = from_gates(2, [("x", 0)])
    rm = RegisterMap(2)
    rm.add("a", [0, 1], "input")
    fin, rows = run_with_probes(c, BasisState.from_registers(rm, {"a": 2}), [Probe(0, ("a",)), Probe(1, ("a",))], rm)
    assert rows == [{"a": 2}, {"a": 3}]
    with pytest.raises(KeyError):
        run_with_probes(c, BasisState.zeros(2), [Probe(0, ("nope",))], rm)
    with pytest.raises(CircuitError):
        run_with_probes(c, BasisState.zeros(2), [Probe(5, ("a",))], rm)


def test_hex_io():
    assert format_hex(255) == "0xff"
    assert parse_hex("0xff") == parse_hex("FF") == 255


def test_streaming_large_circuit_memory():
    # 10^7 gates on 5000 qubits through shared blocks: nothing is materialized at once
    import tracemalloc

    blk = from_gates(5000, [("ccx", i % 4998, i % 4998 + 1, i % 4998 + 2) for i in range(10_000)])
    big = Circuit(5000)
    for _ in range(1000):
        big.append(blk, np.arange(5000))
    big.freeze()
    assert big.gate_count == 10 ** 7
    tracemalloc.start()
    run(big, BasisState.zeros(5000))
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    assert peak < 50 * 2 ** 20
