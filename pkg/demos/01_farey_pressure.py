"""Pressure of the harmonic alpha-Farey system, three ways.

The interval map is conjugate to the renewal shift on the positive
integers; its geometric potential is log 2 on the first cylinder and
log((n+1)/(n-1)) on the n-th.  The simple loops at the root are the
descending staircases (1, k, k-1, ..., 2), one per length, and the
induced potential telescopes to log(k(k+1)).  That makes every quantity
checkable against a closed form:

* the pressure of the zero potential in geometric time is exactly 1
  (the telescoping series sum 1/(k(k+1)) = 1);
* with unit time instead, the root of the geometric series is log 2;
* truncations exhaust both values from below.
"""

import math

import induced_pressure as ip
from induced_pressure.fixtures import farey_tail_majorant

renewal = ip.renewal_shift()
psi = ip.alpha_farey_geometric()

CAP = 10**5
trunc = ip.truncate_range(renewal, CAP)
inventory = ip.enumerate_simple_loops(renewal, ip.periodic_at(1), trunc, CAP)

print("== loop inventory ==")
print(f"representation: {inventory.kind}; one loop per length up to {CAP}")
vals = ip.induce_potential(psi, inventory)
for k in (1, 2, 3, 10, 100):
    print(f"  induced value on loop {k}: {vals.values[k-1]:.10f}"
          f"   closed form log(k(k+1)) = {math.log(k*(k+1)):.10f}")

print("\n== geometric-time pressure of the zero potential ==")
res = ip.loop_pressure(inventory, ip.zero(), psi,
                       tail_majorant=farey_tail_majorant(CAP))
print(f"value   : {res.value:.12f}   (exact answer: 1)")
print(f"bracket : [{res.bracket[0]:.12f}, {res.bracket[1]:.12f}]")
print("the lower end is the certified truncated root; the upper end adds")
print("the integral tail bound on the dropped loop mass")

print("\n== unit-time pressure (root of the geometric series) ==")
res2 = ip.loop_pressure(inventory, ip.zero(), ip.constant(1.0), tol=1e-12)
print(f"value   : {res2.value:.12f}   (exact answer: log 2 = {math.log(2):.12f})")

print("\n== the pressure curve t(beta) ==")
print("root t of  sum_k (k(k+1))^-beta e^(-t k) = 1;  t(0) = log 2, t(1) = 0")
for beta in (0.0, 0.25, 0.5, 0.75, 1.0):
    phi = ip.scale(psi, -beta)
    t = ip.loop_pressure(inventory, phi, ip.constant(1.0)).value
    print(f"  t({beta:4.2f}) = {t: .10f}")

print("\n== exhaustion by finite truncations ==")
seq = ip.exhaustion_sequence(
    renewal, ip.zero(), psi, ip.periodic_at(1),
    [range(1, n + 1) for n in (4, 16, 64, 256, 1024)],
)
for n, v in zip((4, 16, 64, 256, 1024), seq.sequence):
    print(f"  retain 1..{n:<5d} -> {v:.8f}")
print("monotone from below toward 1, as the exhausting principle promises")
