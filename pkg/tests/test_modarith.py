import random

import pytest
from sympy import prevprime

from revecc import modarith as ma
from revecc.gatecore import CircuitError, reverse
from revecc.modarith import ModulusContext, MulStrategy
from revecc.simulator import BasisState, run
from revecc.verify import kaliski_trace, modarith_checks, suite_kaliski

DA, MONT = MulStrategy.DOUBLE_AND_ADD, MulStrategy.MONTGOMERY


def sim(built, **vals):
    c, rm = built
    fin = run(c, BasisState.from_registers(rm, vals))
    return {r.name: fin.read_reg(rm, r.name) for r in rm}


def test_context():
    ctx = ModulusContext.of(11)
    assert (ctx.n, ctx.R) == (4, 16)
    assert ctx.decode(ctx.encode(3)) == 3
    assert ctx.encode(3) == 4
    with pytest.raises(ValueError):
        ModulusContext.of(12)


@pytest.mark.parametrize("x,y,want", [(3, 5, 1), (0, 5, 5), (6, 6, 5)])
def test_add_modp_examples(x, y, want):
    assert sim(ma.build_add_modp(7), x=x, y=y)["y"] == want
    r = sim(ma.build_add_modp(7, True), x=x, y=y, ctrl=1)
    assert r["y"] == want and r["anc"] == 0
    assert sim(ma.build_add_modp(7, True), x=x, y=y, ctrl=0)["y"] == y


def test_sub_by_reversal():
    c, rm = ma.build_add_modp(7, True)
    fin = run(reverse(c), BasisState.from_registers(rm, {"x": 3, "y": 1, "ctrl": 1}))
    assert fin.read_reg(rm, "y") == 5


@pytest.mark.parametrize("x,want", [(7, 3), (0, 0), (5, 10)])
def test_dbl_modp_examples(x, want):
    assert sim(ma.build_dbl_modp(11), x=x)["x"] == want


def test_add_const_modp_examples():
    assert sim(ma.build_add_const_modp(11, 4), x=9)["x"] == 2
    assert sim(ma.build_add_const_modp(11, 4, True), x=9, ctrl=0)["x"] == 9
    with pytest.raises(CircuitError):
        ma.build_add_const_modp(11, 11)


def test_neg_modp_examples():
    assert sim(ma.build_neg_modp(11), x=4)["x"] == 7
    assert sim(ma.build_neg_modp(11), x=0)["x"] == 0
    assert sim(ma.build_neg_modp(11, True), x=4, ctrl=0)["x"] == 4
    assert sim(ma.build_neg_modp(11, True), x=4, ctrl=1)["x"] == 7


def test_mul_squ_examples():
    assert sim(ma.build_mul_modp(11, DA), x=3, y=5)["out"] == 4
    assert sim(ma.build_mul_modp(11, MONT), x=3, y=5)["out"] == 3
    assert sim(ma.build_squ_modp(11, DA), x=5)["out"] == 3
    assert sim(ma.build_squ_modp(11, MONT), x=5)["out"] == 5
    assert sim(ma.build_squ_modp(11, MONT), x=1)["out"] == 9


@pytest.mark.parametrize("x,want", [(8, 10), (7, 2), (1, 3)])
def test_inv_examples(x, want):
    r = sim(ma.build_inv_modp(11), x=x)
    assert r["out"] == want and r["x"] == x
    assert all(r[k] == 0 for k in ("u", "r", "s", "m", "ell", "w"))


def test_montgomery_matches_plain_in_encoded_domain():
    p = 61
    ctx = ModulusContext.of(p)
    rng = random.Random(3)
    for _ in range(20):
        a, b = rng.randrange(p), rng.randrange(p)
        mont = sim(ma.build_mul_modp(p, MONT), x=ctx.encode(a), y=ctx.encode(b))["out"]
        plain = sim(ma.build_mul_modp(p, DA), x=a, y=b)["out"]
        assert ctx.decode(mont) == plain == a * b % p


@pytest.mark.parametrize("n", [4, 8, 16, 32])
def test_qubit_totals(n):
    p = prevprime(1 << n)
    ctx = ModulusContext.of(p)
    L = ctx.log_n
    assert ma.build_add_const_modp(p, 1)[0].num_qubits == 2 * n
    assert ma.build_add_const_modp(p, 1, True)[0].num_qubits == 2 * n + 1
    assert ma.build_add_modp(p, True)[0].num_qubits == 2 * n + 4
    assert ma.build_add_modp(p)[0].num_qubits == 2 * n + 2
    assert ma.build_neg_modp(p, True)[0].num_qubits == n + 3
    assert ma.build_mul_modp(p, DA)[0].num_qubits == 3 * n + 2
    assert ma.build_mul_modp(p, MONT)[0].num_qubits == 5 * n + 4
    assert ma.build_squ_modp(p, DA)[0].num_qubits == 2 * n + 3
    assert ma.build_squ_modp(p, MONT)[0].num_qubits == 4 * n + 5
    assert ma.build_inv_modp(p)[0].num_qubits == 7 * n + 2 * L + 9


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_exhaustive_small_primes(p):
    res = modarith_checks(p, None, random.Random(p))
    assert all(r.ok for r in res), [r.line() for r in res if not r.ok]


def test_random_32bit():
    from revecc.ecc import synthetic_prime

    res = modarith_checks(synthetic_prime(32), 200, random.Random(1))
    assert all(r.ok for r in res), [r.line() for r in res if not r.ok]


# frozen from the p=11 example runs of the reversible Kaliski inverse
TRACE_8 = {
    "u": [11, 11, 11, 11, 5, 2, 1, 1, 1],
    "v": [8, 4, 2, 1, 1, 1, 1, 0, 0],
    "r": [0, 0, 0, 0, 1, 3, 3, 6, 6],
    "s": [1, 1, 1, 1, 2, 4, 8, 11, 11],
    "k": [0, 1, 2, 3, 4, 5, 6, 7, 7],
    "ell": [0, 0, 0, 0, 0, 0, 0, 0, 1],
}
TRACE_7 = {
    "u": [11, 2, 1, 1, 1, 1, 1, 1, 1],
    "v": [7, 7, 7, 3, 1, 0, 0, 0, 0],
    "r": [0, 1, 1, 2, 4, 8, 8, 8, 8],
    "s": [1, 2, 4, 5, 7, 11, 11, 11, 11],
    "k": [0, 1, 2, 3, 4, 5, 5, 5, 5],
    "ell": [0, 0, 0, 0, 0, 0, 1, 2, 3],
}


@pytest.mark.parametrize("x,table", [(8, TRACE_8), (7, TRACE_7)])
def test_kaliski_trace(x, table):
    tr = kaliski_trace(11, x)
    for key, want in table.items():
        assert [row[key] for row in tr] == want, key


@pytest.mark.parametrize("p", [11, 13, 31, 61])
def test_kaliski_invariants(p):
    n = p.bit_length()
    for x in range(1, p):
        tr = kaliski_trace(p, x)
        assert all(row["r"] * row["v"] + row["s"] * row["u"] == p for row in tr)
        final = tr[-1]
        assert final["v"] == 0 and final["u"] == 1 and final["s"] == p
        assert n <= final["k"] <= 2 * n
        # almost inverse: r = -x^-1 2^k mod p
        assert final["r"] % p == (-pow(x, -1, p) * pow(2, final["k"], p)) % p


def test_suite_kaliski_passes():
    res, lines = suite_kaliski(11)
    assert all(r.ok for r in res)
    assert lines[0] == "x=8"


def test_inv_marks():
    c, _ = ma.build_inv_modp(11)
    assert c.marks["init"] < c.marks["round_1"] < c.marks["round_8"]
