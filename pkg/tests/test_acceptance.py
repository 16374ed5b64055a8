"""Acceptance gate: one test per criterion, tolerances pinned, one printed
PASS line each.  Criteria 1-2 and 5 carry wall-clock budgets; criterion 7
runs the full pressure-law suite on fifty random finite systems."""

import math
import time

import numpy as np
import pytest

import induced_pressure as ip
from conftest import random_depth1, random_irreducible_spec
from induced_pressure.fixtures import farey_tail_majorant

LOG2 = math.log(2.0)


def report(num, text):
    print(f"[acceptance] criterion {num:02d} PASS: {text}")


def binomial(n, k):
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def farey_inventory(cap):
    rn = ip.renewal_shift()
    tr = ip.truncate_range(rn, cap)
    return ip.enumerate_simple_loops(rn, ip.periodic_at(1), tr, cap)


def test_criterion_01_farey_loop_pressure():
    cap = 10**5
    t0 = time.perf_counter()
    inv = farey_inventory(cap)
    res = ip.loop_pressure(inv, ip.zero(), ip.alpha_farey_geometric(),
                           tail_majorant=farey_tail_majorant(cap))
    elapsed = time.perf_counter() - t0
    assert res.value == pytest.approx(1.0, abs=1e-6)
    assert elapsed < 1.0
    report(1, f"value {res.value:.12f} (target 1.0 +- 1e-6) in {elapsed:.2f} s")


def test_criterion_02_farey_unit_scaling():
    cap = 10**5
    t0 = time.perf_counter()
    inv = farey_inventory(cap)
    res = ip.loop_pressure(inv, ip.zero(), ip.constant(1.0), tol=1e-12)
    elapsed = time.perf_counter() - t0
    assert res.value == pytest.approx(LOG2, abs=1e-9)
    assert elapsed < 1.0
    report(2, f"value {res.value:.12f} (target log 2 +- 1e-9) in {elapsed:.2f} s")


def oracle_farey_family_root(beta, tol=1e-12):
    """Independent series bisection for the root of
    sum_k (k(k+1))^-beta e^{-tk} = 1: direct partial sums with the
    geometric tail bound a_{k+1} <= a_k e^{-t} (valid for beta >= 0)."""

    def exceeds_one(t):
        q = math.exp(-t)
        s = 0.0
        k = 1
        while k < 10**6:
            a = (k * (k + 1.0)) ** (-beta) * math.exp(-t * k)
            s += a
            if s > 1.0:
                return True
            if s + a * q / (1.0 - q) < 1.0:
                return False
            k += 1
        return s > 1.0

    lo, hi = 1e-9, 2.0
    assert exceeds_one(lo) and not exceeds_one(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if exceeds_one(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_criterion_03_farey_beta_family_vs_oracle():
    cap = 10**5
    inv = farey_inventory(cap)
    psi = ip.alpha_farey_geometric()
    for beta in (0.25, 0.5, 0.75):
        phi = ip.scale(psi, -beta)
        got = ip.loop_pressure(inv, phi, ip.constant(1.0), tol=1e-12).value
        want = oracle_farey_family_root(beta)
        assert got == pytest.approx(want, abs=1e-8)
    report(3, "t(beta) matches the series-bisection oracle at beta=0.25/0.5/0.75 "
              "within 1e-8")


def test_criterion_04_z_extension_counts_and_loop_route():
    ext = ip.ExtensionShift(ip.ZPowerGroup(1), "plain")
    dp = ext.count_sequence(128, "return", method="dp")
    for n in range(1, 65):
        want = binomial(2 * n, n)
        assert dp[2 * n - 1] == want, f"bridge count at 2n={2*n}"
    fr = ext.first_return_sequence(64, method="dp")
    for n in range(1, 33):
        want = 2 * binomial(2 * n - 2, n - 1) // n
        assert fr[2 * n - 1] == want, f"simple count at 2n={2*n}"
    inv = ext.bridge_loop_inventory(10**4)
    res = ip.loop_pressure(inv, ip.zero(), ip.constant(1.0))
    assert LOG2 - 0.01 <= res.value <= LOG2
    report(4, f"counts bit-exact (binomials to n=64, first returns to n=32); "
              f"loop route {res.value:.6f} in [log2 - 0.01, log2]")


def test_criterion_05_amenability_gap():
    t0 = time.perf_counter()
    z = ip.pressure_gap(ip.ExtensionShift(ip.ZPowerGroup(1), "plain"), 5000)
    t_z = time.perf_counter() - t0
    assert z.verdict == "amenable-consistent"
    assert z.gap <= 0.01
    assert t_z < 30.0

    t0 = time.perf_counter()
    f2 = ip.pressure_gap(ip.ExtensionShift(ip.FreeGroup(2), "plain"), 2000)
    t_f = time.perf_counter() - t0
    want = math.log(2.0 * math.sqrt(3.0))
    assert f2.verdict == "nonamenable-consistent"
    assert abs(f2.p_bridge_estimate - want) <= 0.01
    assert t_f < 30.0
    report(5, f"Z gap {z.gap:.2e} amenable-consistent ({t_z:.1f} s); free-rank-2 "
              f"estimate {f2.p_bridge_estimate:.5f} vs {want:.5f} "
              f"nonamenable-consistent ({t_f:.1f} s)")


def test_criterion_06_inducing_invariance():
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(20):
        spec = random_irreducible_spec(rng, 4)
        tr = ip.truncate(spec, spec.symbols)
        phi = random_depth1(rng, spec, -1.0, 1.0)
        psi = random_depth1(rng, spec, 0.5, 2.0, strictly_positive=True)
        vals = []
        for a in spec.symbols:
            pseudo = ip.pseudo_inverse_pressure(tr, phi, psi, ip.periodic_at(a)).value
            inv = ip.enumerate_simple_loops(spec, ip.periodic_at(a), tr, 5000,
                                            representation="matrix")
            loop = ip.loop_pressure(inv, phi, psi).value
            assert abs(loop - pseudo) <= 1e-8
            vals.extend([pseudo, loop])
        spread = max(vals) - min(vals)
        assert spread <= 1e-8
        worst = max(worst, spread)
    report(6, f"loop route == pseudo-inverse at every base symbol on 20 random "
              f"4-symbol systems (worst spread {worst:.2e} <= 1e-8)")


def test_criterion_07_pressure_law_suite():
    rng = np.random.default_rng(707)
    TOL = 1e-9
    t0 = time.perf_counter()
    for _ in range(50):
        spec = random_irreducible_spec(rng, 5)
        tr = ip.truncate(spec, spec.symbols)
        phi = random_depth1(rng, spec, -1.0, 1.0)
        psi = random_depth1(rng, spec, 0.5, 2.0, strictly_positive=True)
        psi_vals = [psi((s,)) for s in spec.symbols]
        m, M = min(psi_vals), max(psi_vals)

        def P(p, collection=None, scaling=psi):
            return ip.pseudo_inverse_pressure(tr, p, scaling, collection).value

        base = P(phi)

        # monotonicity in phi + translation bracket c/M <= delta <= c/m
        c = float(rng.uniform(0.2, 2.0))
        up = P(ip.combine(phi, ip.constant(c), (1.0, 1.0)))
        assert up >= base - TOL
        assert c / M - TOL <= up - base <= c / m + TOL

        # monotonicity in the collection and in the truncation
        a = int(rng.integers(1, 6))
        assert P(phi, ip.periodic_at(a)) <= base + TOL
        sub = ip.truncate(spec, spec.symbols[:3])
        assert ip.pseudo_inverse_pressure(sub, phi, psi).value <= base + TOL

        # growing the scaling potential pulls the value toward zero,
        # preserving its sign (the corrected form of scaling monotonicity)
        psi2 = ip.scale(psi, 1.0 + float(rng.uniform(0.1, 1.0)))
        p2 = P(phi, scaling=psi2)
        if base >= 0:
            assert -TOL <= p2 <= base + TOL
        else:
            assert base - TOL <= p2 <= TOL

        # convexity at three interior points
        phi_b = random_depth1(rng, spec, -1.0, 1.0)
        pb = P(phi_b)
        for t in (0.25, 0.5, 0.75):
            mix = P(ip.combine(phi, phi_b, (t, 1.0 - t)))
            assert mix <= t * base + (1.0 - t) * pb + TOL

        # subadditivity
        assert P(ip.combine(phi, phi_b, (1.0, 1.0))) <= base + pb + TOL

        # subhomogeneity on both sides of 1
        assert P(ip.scale(phi, 2.0)) <= 2.0 * base + TOL
        assert P(ip.scale(phi, 0.5)) >= 0.5 * base - TOL

        # bounded-cocycle invariance
        h = random_depth1(rng, spec, -1.0, 1.0)
        perturbed = ip.combine(phi, ip.coboundary(h), (1.0, 1.0))
        assert P(perturbed) == pytest.approx(base, abs=TOL)

        # stability: on a two-block system the all-words value is the max
        # over the per-component periodic collections
        b_rows = [[1, 1], [1, 0]]
        n5 = len(spec.symbols)
        rows7 = [[0] * (n5 + 2) for _ in range(n5 + 2)]
        for i, s in enumerate(spec.symbols):
            for j, t in enumerate(spec.symbols):
                rows7[i][j] = int(spec.allows(s, t))
        for i in range(2):
            for j in range(2):
                rows7[n5 + i][n5 + j] = b_rows[i][j]
        spec7 = ip.from_matrix(rows7)
        tr7 = ip.truncate(spec7, spec7.symbols)
        vals7 = list(rng.uniform(-1, 1, n5 + 2))
        psis7 = list(rng.uniform(0.5, 2, n5 + 2))
        phi7 = ip.from_table(1, dict(zip(spec7.symbols, vals7)))
        psi7 = ip.from_table(1, dict(zip(spec7.symbols, psis7)),
                             strictly_positive=True)
        whole = ip.pseudo_inverse_pressure(tr7, phi7, psi7).value
        part_a = ip.pseudo_inverse_pressure(tr7, phi7, psi7, ip.periodic_at(1)).value
        part_b = ip.pseudo_inverse_pressure(
            tr7, phi7, psi7, ip.periodic_at(n5 + 1)
        ).value
        assert whole == pytest.approx(max(part_a, part_b), abs=TOL)

    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    report(7, f"monotonicity/translation/subadditivity/stability/convexity/"
              f"subhomogeneity/cocycle hold at 1e-9 on 50 systems in {elapsed:.1f} s")


def test_criterion_08_variational_crosscheck():
    rng = np.random.default_rng(808)
    worst = 0.0
    for _ in range(20):
        spec = random_irreducible_spec(rng, int(rng.integers(3, 7)))
        tr = ip.truncate(spec, spec.symbols)
        phi = random_depth1(rng, spec, -1.0, 1.0)
        psi = random_depth1(rng, spec, 0.5, 2.0, strictly_positive=True)
        beta = ip.pseudo_inverse_pressure(tr, phi, psi).value
        defect = ip.variational_defect(tr, phi, psi, beta)
        assert abs(defect) <= 1e-8
        worst = max(worst, abs(defect))
    report(8, f"entropy + integral identity holds at the computed root on 20 "
              f"systems (worst defect {worst:.2e} <= 1e-8)")


def test_criterion_09_divergence_and_route_agreement():
    rn = ip.renewal_shift()
    psi = ip.alpha_farey_geometric()

    tr = ip.truncate_range(rn, 800)
    res = ip.estimate_pressure_window(
        rn, ip.zero(), psi, ip.all_words(), tr,
        eta=1.0, t_grid=[1, 2], length_cap=30,
    )
    assert res.verdict == "+inf"
    assert res.certificate is not None and res.certificate.sample_words
    window = res.certificate.window

    phi = ip.first_symbol_negated()
    tr200 = ip.truncate_range(rn, 200)
    pseudo = ip.pseudo_inverse_pressure(tr200, phi, psi, ip.all_words()).value
    inv = ip.enumerate_simple_loops(rn, ip.periodic_at(1), tr200, 200)
    loop = ip.loop_pressure(inv, phi, psi).value
    assert abs(pseudo - loop) <= 0.01
    report(9, f"+inf certified on window ({window[0]:g}, {window[1]:g}] by rule "
              f"'{res.certificate.rule}'; all-words vs periodic-at-1 routes agree "
              f"to {abs(pseudo - loop):.2e} at truncation 200")


def test_criterion_10_flow_sanity():
    fs = ip.full_shift(2)
    tr = ip.truncate(fs, fs.symbols)
    e1 = ip.savchenko_entropy(fs, tr, 80, height=ip.constant(1.0), tol=1e-12).value
    e2 = ip.savchenko_entropy(fs, tr, 80, height=ip.constant(2.0), tol=1e-12).value
    assert e1 == pytest.approx(LOG2, abs=1e-10)
    assert e2 == pytest.approx(LOG2 / 2.0, abs=1e-10)

    rng = np.random.default_rng(1010)
    for _ in range(10):
        spec = random_irreducible_spec(rng, 4)
        trs = ip.truncate(spec, spec.symbols)
        tau = random_depth1(rng, spec, 0.5, 2.0, strictly_positive=True)
        c = float(rng.uniform(-1.5, 1.5))
        base = ip.flow_pressure(ip.FlowSpec(spec, tau, ip.zero()), trs, 4000,
                                at=1).value
        shifted = ip.flow_pressure(ip.FlowSpec(spec, tau, ip.scale(tau, c)), trs,
                                   4000, at=1).value
        assert shifted == pytest.approx(c + base, abs=1e-9)
    report(10, f"unit suspension log 2, doubled height log2/2 (1e-10); constant-"
               f"fiber shift law holds at 1e-9 on 10 systems")
