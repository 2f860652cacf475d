"""
Controlled elliptic curve point addition
========================================

A classically known point P2 is added to a point (x1, y1) held in qubits,
under a control qubit. All coordinates live in Montgomery form. The
17-step sequence needs two inversions for the slope and two more to clear
it again, so the result replaces P1 in place and every scratch register
comes back zero.
"""
import random
import time

from revecc import ecc
from revecc.gatecore import measure

# a toy curve y^2 = x^3 + x + 6 over F_11 with 13 points
curve = ecc.F11
P2 = curve.G
c, regs = ecc.build_ctrl_point_add(curve, P2)
print(f"{curve.name}: {c.num_qubits} qubits, {c.toffoli_count} Toffoli")
pts = [P for P in ecc.enumerate_points(curve) if ecc.is_generic_pair(curve, P, P2)]
res = ecc.simulate_point_add(curve, P2, pts)
for P, r in zip(pts, res):
    print(f"  {P} + {P2} = ({r['x']}, {r['y']})   oracle {ecc.point_add(curve, P, P2)}")

# with the control off nothing changes
res = ecc.simulate_point_add(curve, P2, pts, ctrls=[0] * len(pts))
print("  ctrl=0 leaves every input alone:", all((r["x"], r["y"]) == P for P, r in zip(pts, res)))

# scalar multiplication by conditional additions of [2^i]P, starting from [a]P
bits = [1, 1, 0]
out = ecc.simulate_scalar_mul(curve, bits, a=2)
print(f"\n[2]P + bits {bits} -> {out.point}   oracle [5]P = {ecc.scalar_mul(curve, P2, 5)}")
out = ecc.simulate_scalar_mul(curve, [1, 0, 0], a=1)
print(f"[1]P + bits [1, 0, 0] -> invalid at step {out.invalid_step} ({out.reason})")

# a real curve: NIST P-192, a handful of random points in one simulator pass
curve = ecc.get_curve("P-192")
t0 = time.time()
c, regs = ecc.build_ctrl_point_add(curve, curve.G)
rep = measure(c, depth=False)
print(f"\n{curve.name}: {rep.qubit_highwater} qubits, {rep.toffoli_count:.3e} Toffoli (built in {time.time() - t0:.1f}s)")
rng = random.Random(7)
pts = [ecc.random_point(curve, rng) for _ in range(4)]
t0 = time.time()
res = ecc.simulate_point_add(curve, curve.G, pts, circuit=(c, regs))
for P, r in zip(pts, res):
    ok = (r["x"], r["y"]) == ecc.point_add(curve, P, curve.G)
    print(f"  x1={P[0]:#050x}  {'ok' if ok else 'MISMATCH'}")
print(f"  simulated in {time.time() - t0:.1f}s")
