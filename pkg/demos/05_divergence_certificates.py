"""Infinite pressure, certified rather than saturated.

Over a countable alphabet, the all-words pressure can genuinely be
infinite while restricted collections stay finite.  On the renewal shift
with the geometric height and the zero potential, any single window of
height-sums already holds infinitely many words -- one for every large
symbol -- so the window estimator returns +inf together with evidence:
the witnessing window, the words it found at every dyadic symbol scale,
and the non-decaying per-scale masses.

Negating the first symbol kills that family exponentially.  The pressure
becomes finite, and the all-words value coincides with the periodic-at-1
value, which the two independent routes confirm to solver accuracy.
"""

import induced_pressure as ip

renewal = ip.renewal_shift()
psi = ip.alpha_farey_geometric()

print("== zero potential: divergence with a certificate ==")
trunc = ip.truncate_range(renewal, 800)
res = ip.estimate_pressure_window(
    renewal, ip.zero(), psi, ip.all_words(), trunc,
    eta=1.0, t_grid=[1, 2], length_cap=30,
)
print(f"verdict : {res.verdict}")
cert = res.certificate
print(f"rule    : {cert.rule}")
print(f"window  : ({cert.window[0]:g}, {cert.window[1]:g}]")
print(f"mass    : {cert.partial_sum:.3e} words found in this window alone")
print("sample words, one per dyadic scale of the largest symbol:")
for w in cert.sample_words:
    print("   ", w)
print("per-scale masses (they keep growing to the probe boundary):")
for b, mass in cert.detail["block_masses"].items():
    print(f"    scale 2^{int(b)-1}..2^{int(b)}: {mass:g}")

print("\n== negated-first-symbol potential: finite, and collections agree ==")
phi = ip.first_symbol_negated()
tr200 = ip.truncate_range(renewal, 200)
pseudo = ip.pseudo_inverse_pressure(tr200, phi, psi, ip.all_words())
inv = ip.enumerate_simple_loops(renewal, ip.periodic_at(1), tr200, 200)
loop = ip.loop_pressure(inv, phi, psi)
print(f"all-words pseudo-inverse value : {pseudo.value:.12f}")
print(f"periodic-at-1 loop-route value : {loop.value:.12f}")
print(f"difference                     : {abs(pseudo.value - loop.value):.2e}")
print("the exhausting principle holds for this potential, so restricting")
print("to loops at the root loses nothing")

window = ip.estimate_pressure_window(
    renewal, phi, psi, ip.all_words(), ip.truncate_range(renewal, 600),
    eta=1.0, t_grid=[1, 2, 3], length_cap=25,
)
print(f"\nwindow estimator verdict on the same data: {window.verdict}")
print("(the per-scale masses now decay like e^-n, so no family is declared)")
