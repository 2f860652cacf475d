"""
Reversible modular inversion
============================

The inverse runs a fixed 2n rounds of the binary extended Euclidean
algorithm whatever the input, keeping one branch bit per round. Once v
reaches zero the rounds only bump a counter ell. Probing the registers
after every round shows both phases.
"""
from revecc import modarith
from revecc.modarith import ModulusContext
from revecc.simulator import BasisState, run
from revecc.verify import kaliski_trace

p = 11
ctx = ModulusContext.of(p)

for x in (8, 7):
    print(f"x = {x}")
    tr = kaliski_trace(p, x)
    for key in ("u", "v", "r", "s", "k", "ell"):
        print(f"  {key:>3} " + " ".join(f"{row[key]:>3}" for row in tr))
    # the almost inverse -x^-1 2^k sits in r once v = 0
    k = tr[-1]["k"]
    print(f"  r = {tr[-1]['r']} = -x^-1 * 2^{k} mod p: {(-pow(x, -1, p) * 2 ** k) % p}")

# the full block returns x^-1 2^(2n) mod p and cleans every work register
c, regs = modarith.build_inv_modp(ctx)
print(f"\ninv_modp p={p}: {c.num_qubits} qubits, {c.toffoli_count} Toffoli")
for x in range(1, p):
    fin = run(c, BasisState.from_registers(regs, {"x": x}))
    out = fin.read_reg(regs, "out")
    junk = sum(fin.read_reg(regs, r.name) for r in regs if r.role == "clean")
    print(f"  x={x:2d} -> {out:2d}   check {pow(x, -1, p) * ctx.R ** 2 % p:2d}   leftover {junk}")
