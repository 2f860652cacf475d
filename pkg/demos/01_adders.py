"""
Adders built from Toffoli, CNOT and NOT gates
=============================================

Integer addition, constant addition with borrowed qubits, and the modular
adder that everything else is built on. Each block is simulated on a whole
batch of inputs at once.
"""
import random

from revecc import intarith, modarith
from revecc.estimator import prime_for
from revecc.gatecore import measure, reverse
from revecc.simulator import run_batch

# an in-place 8-bit adder: |x>|y> -> |x>|x+y>, no ancillas at all
c, regs = intarith.build_adder(8)
print(c.name, measure(c))
xs = [7, 200, 255]
ys = [9, 100, 255]
out = run_batch(c, regs, {"x": xs, "y": ys})
for x, y, s in zip(xs, ys, out["y"]):
    print(f"  {x} + {y} = {s}")

# adding a classical constant needs only borrowed (dirty) qubits:
# they may hold anything and are handed back untouched
c, regs = intarith.build_const_adder(8, 77)
rng = random.Random(1)
xs = [rng.randrange(256) for _ in range(5)]
junk = [rng.getrandbits(len(regs["dirty"])) for _ in xs]
out = run_batch(c, regs, {"x": xs, "dirty": junk})
print(c.name, measure(c))
for x, y, d0, d1 in zip(xs, out["x"], junk, out["dirty"]):
    print(f"  {x} + 77 mod 256 = {y}   dirty {d0:#x} -> {d1:#x}")

# modular addition mod p = 251, and subtraction by running the gates backwards
p = 251
c, regs = modarith.build_add_modp(p)
xs = [rng.randrange(p) for _ in range(4)]
ys = [rng.randrange(p) for _ in range(4)]
add = run_batch(c, regs, {"x": xs, "y": ys})["y"]
sub = run_batch(reverse(c), regs, {"x": xs, "y": ys})["y"]
for x, y, a, s in zip(xs, ys, add, sub):
    print(f"  y={y:3d} x={x:3d}   y+x mod p = {a:3d}   y-x mod p = {s:3d}")

# Toffoli counts grow like n log n for the constant adders
for n in (16, 32, 64, 128):
    p = prime_for(n)[0]
    c, _ = modarith.build_add_const_modp(p, p // 3)
    print(f"  n={n:3d} add_const_modp: {c.num_qubits} qubits, {c.toffoli_count} Toffoli")
