"""Entropy and pressure of special semi-flows.

A semi-flow climbs at unit speed under the graph of a positive height
function over a shift.  Its entropy is the unique beta at which the
height-discounted mass of the simple loops drops to one; pressure of an
observable discounts by the observable's fiber integral as well.  Sanity
laws that pin the implementation down:

* constant height 1 reproduces the base entropy;
* doubling the height halves the entropy (time rescaling);
* a constant fiber c shifts any pressure by exactly c;
* the value does not depend on which base symbol anchors the loops.
"""

import math

import numpy as np

import induced_pressure as ip
from induced_pressure.fixtures import farey_tail_majorant

full2 = ip.full_shift(2)
tr2 = ip.truncate(full2, full2.symbols)

print("== suspensions of the 2-shift ==")
for c in (1.0, 2.0, 0.5):
    r = ip.savchenko_entropy(full2, tr2, 80, height=ip.constant(c), tol=1e-12)
    print(f"height {c:4.1f}: entropy {r.value:.12f}   (log2/c = {math.log(2)/c:.12f})")

print("\n== the harmonic-Farey flow ==")
renewal = ip.renewal_shift()
cap = 10**5
tr = ip.truncate_range(renewal, cap)
r = ip.savchenko_entropy(renewal, tr, cap, height=ip.alpha_farey_geometric(),
                         at=1, tail_majorant=farey_tail_majorant(cap))
print(f"entropy under the geometric height: {r.value:.10f}   (exact: 1)")
print("the height is positive but not bounded away from zero; the loop")
print("route handles it because induced heights grow like log(k(k+1))")

print("\n== constant-fiber shift law on a random base ==")
rng = np.random.default_rng(7)
rows = (rng.random((4, 4)) < 0.6).astype(int)
for i in range(4):
    rows[i, (i + 1) % 4] = 1
spec = ip.from_matrix(rows)
trunc = ip.truncate(spec, spec.symbols)
tau = ip.from_table(1, {s: v for s, v in zip(spec.symbols, rng.uniform(0.5, 2, 4))},
                    strictly_positive=True)
base = ip.flow_pressure(ip.FlowSpec(spec, tau, ip.zero()), trunc, 4000)
print(f"entropy: {base.value:.10f}")
for c in (-1.0, 0.5, 2.0):
    shifted = ip.flow_pressure(ip.FlowSpec(spec, tau, ip.scale(tau, c)), trunc, 4000)
    print(f"fiber {c:+.1f}: pressure {shifted.value:.10f}"
          f"   minus entropy = {shifted.value - base.value:+.10f}")

print("\n== base-symbol independence ==")
flow = ip.FlowSpec(spec, tau, ip.zero())
res = ip.flow_pressure(flow, trunc, 4000)
for a, v in res.diagnostics["per_symbol"].items():
    print(f"  anchored at {a}: {v:.12f}")
