"""
Resource counts and scaling
===========================

Counts come straight from the circuit structure, so even a 10^8-gate
point addition is counted without walking its gates. Depth does need a
pass over the gates, which takes a few seconds at these sizes.
"""
import numpy as np

from revecc import estimator as est

# the building blocks against their reference formulas
print("block                  n   qubits   Toffoli   formula   ratio")
for tag in est.REFERENCE:
    if tag == "point_add":
        continue
    for n in (32, 64):
        chk = est.reference_check(tag, n)
        print(f"{tag:<20} {n:4d} {chk.measured_qubits:8d} {chk.measured_toffoli:9d} "
              f"{chk.expected_toffoli:9.0f} {chk.ratio:7.2f}")

# point additions over a range of sizes, then the leading-order fit
ns = [16, 24, 32, 48, 64, 110]
rows = est.point_add_resources(ns)
print()
print(est.to_csv(rows), end="")
fit = est.fit_scaling([(r.n, r.report.toffoli_count) for r in rows])
print(f"\nfit: {fit.alpha:.1f} n^2 log2 n + {fit.beta:.1f} n^2   (residual {fit.residual:.3g})")

# a full Shor run iterates the controlled addition 2n times
print("\n   n  qubits   per addition   Shor total   fitted total   published")
for r in rows:
    tot = est.shor_totals(r.report, r.n)
    pub = est.TABLE2.get(r.n, (None, np.nan))[1]
    print(f"{r.n:4d} {tot.qubits:7d} {r.report.toffoli_count:14.3e} {tot.toffoli:12.3e} "
          f"{2 * r.n * fit(r.n):14.3e} {pub:11.3e}")
