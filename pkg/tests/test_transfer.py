import math

import numpy as np
import pytest

import induced_pressure as ip
from conftest import random_fixture
from induced_pressure.errors import PreconditionError


class TestFinitePressure:
    def test_full_shift_zero_potential(self):
        fs = ip.full_shift(2)
        tr = ip.truncate(fs, fs.symbols)
        assert ip.finite_pressure(tr, ip.zero()) == pytest.approx(math.log(2), abs=1e-13)

    def test_full_shift_rank_one_formula(self, rng):
        # depth-1 weights on a full shift: pressure is log of the weight sum
        for n in (2, 3, 5):
            fs = ip.full_shift(n)
            tr = ip.truncate(fs, fs.symbols)
            vals = rng.uniform(-1, 1, n)
            p = ip.from_table(1, {s: v for s, v in zip(fs.symbols, vals)})
            want = math.log(np.exp(vals).sum())
            assert ip.finite_pressure(tr, p) == pytest.approx(want, abs=1e-12)

    def test_renewal_truncations_increase_to_log2(self):
        rn = ip.renewal_shift()
        golden = math.log((1 + math.sqrt(5)) / 2)
        assert ip.finite_pressure(ip.truncate(rn, [1, 2]), ip.zero()) == pytest.approx(
            golden, abs=1e-12
        )
        vals = [
            ip.finite_pressure(ip.truncate(rn, range(1, n + 1)), ip.zero())
            for n in (2, 4, 8, 16, 32)
        ]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] == pytest.approx(math.log(2), abs=1e-6)

    def test_reducible_takes_max_over_components(self):
        # two blocks with different entropies, no interaction
        rows = [
            [1, 1, 0, 0, 0],
            [1, 1, 0, 0, 0],
            [0, 0, 1, 1, 1],
            [0, 0, 1, 1, 1],
            [0, 0, 1, 1, 1],
        ]
        spec = ip.from_matrix(rows)
        tr = ip.truncate(spec, spec.symbols)
        assert ip.finite_pressure(tr, ip.zero()) == pytest.approx(math.log(3), abs=1e-12)
        assert ip.finite_pressure(tr, ip.zero(), ip.periodic_at(1)) == pytest.approx(
            math.log(2), abs=1e-12
        )
        assert ip.finite_pressure(tr, ip.zero(), ip.periodic_at(4)) == pytest.approx(
            math.log(3), abs=1e-12
        )

    def test_nilpotent_pattern_has_no_pressure(self):
        rows = [[0, 1], [0, 0]]
        spec = ip.from_matrix(rows)
        tr = ip.truncate(spec, spec.symbols)
        assert ip.finite_pressure(tr, ip.zero()) == -math.inf

    def test_empty_truncation_rejected(self):
        fs = ip.full_shift(2)
        with pytest.raises(PreconditionError):
            ip.finite_pressure(ip.truncate(fs, []), ip.zero())

    def test_periodic_matrix_converges(self):
        # 3-cycle with unequal weights: root is the geometric mean
        rows = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
        spec = ip.from_matrix(rows)
        tr = ip.truncate(spec, spec.symbols)
        p = ip.from_table(1, {1: 0.3, 2: -0.9, 3: 0.45})
        want = (0.3 - 0.9 + 0.45) / 3
        assert ip.finite_pressure(tr, p) == pytest.approx(want, abs=1e-12)

    def test_depth2_matches_conjugated_depth1(self, rng):
        # adding a coboundary is a diagonal similarity: same pressure
        spec, tr, phi, _ = random_fixture(rng)
        h = ip.from_table(1, {s: v for s, v in zip(spec.symbols, rng.uniform(-1, 1, 5))})
        phi2 = ip.combine(phi, ip.coboundary(h), (1.0, 1.0))
        assert ip.finite_pressure(tr, phi2) == pytest.approx(
            ip.finite_pressure(tr, phi), abs=1e-11
        )

    def test_depth3_states_are_pairs(self, rng):
        # a depth-3 potential that only reads its first coordinate must
        # reproduce the depth-1 value through the pair-state matrix
        spec, tr, phi, _ = random_fixture(rng)
        lifted = ip.Potential(3, lambda t: phi((t[0],)), name="lifted")
        tm = ip.TransferMatrix(tr, lifted)
        assert all(len(st) == 2 for st in tm.states)
        got = ip.finite_pressure(tr, lifted)
        assert got == pytest.approx(ip.finite_pressure(tr, phi), abs=1e-11)

    def test_extreme_weight_ranges_are_balanced(self):
        # the dominant cycle sits far below the largest entry; linear-scale
        # iteration alone cannot see it
        rows = [[0, 1, 1], [1, 0, 0], [0, 0, 1]]
        spec = ip.from_matrix(rows)
        tr = ip.truncate(spec, spec.symbols)
        p = ip.from_table(1, {1: 500.0, 2: -2500.0, 3: -1500.0})
        # cycles: 1->2->1 with mean (500-2500)/2 = -1000, 3->3 with -1500
        assert ip.finite_pressure(tr, p) == pytest.approx(-1000.0, rel=1e-12)


class TestEquilibriumMeasure:
    def test_full_shift_equilibrium_is_uniform(self):
        fs = ip.full_shift(3)
        tr = ip.truncate(fs, fs.symbols)
        tm = ip.TransferMatrix(tr, ip.zero())
        mu = ip.equilibrium_measure(tm)
        assert mu.entropy_rate == pytest.approx(math.log(3), abs=1e-10)
        assert np.allclose(mu.stationary, 1 / 3, atol=1e-10)

    def test_defect_vanishes_at_the_root(self, rng):
        for _ in range(5):
            _, tr, phi, psi = random_fixture(rng)
            beta = ip.pseudo_inverse_pressure(tr, phi, psi).value
            assert ip.variational_defect(tr, phi, psi, beta) == pytest.approx(0.0, abs=1e-9)

    def test_defect_sees_wrong_beta(self, rng):
        _, tr, phi, psi = random_fixture(rng)
        beta = ip.pseudo_inverse_pressure(tr, phi, psi).value
        assert abs(ip.variational_defect(tr, phi, psi, beta + 0.1)) > 1e-3

    def test_root_is_the_supremum_over_markov_measures(self, rng):
        # (entropy + int phi) / int psi <= root for any stationary chain on
        # the pattern, with equality at the equilibrium chain
        spec, tr, phi, psi = random_fixture(rng)
        root = ip.pseudo_inverse_pressure(tr, phi, psi).value
        n = len(spec.symbols)
        pattern = np.array(
            [[spec.allows(a, b) for b in spec.symbols] for a in spec.symbols]
        )
        for _ in range(20):
            P = np.where(pattern, rng.random((n, n)), 0.0)
            P /= P.sum(axis=1, keepdims=True)
            # stationary vector by power iteration on the left
            pi = np.ones(n) / n
            for _ in range(4000):
                pi = pi @ P
            pi /= pi.sum()
            with np.errstate(divide="ignore"):
                logP = np.where(P > 0, np.log(np.where(P > 0, P, 1.0)), 0.0)
            h = float(-(pi[:, None] * P * logP).sum())
            iphi = sum(pi[i] * phi((s,)) for i, s in enumerate(spec.symbols))
            ipsi = sum(pi[i] * psi((s,)) for i, s in enumerate(spec.symbols))
            assert (h + iphi) / ipsi <= root + 1e-7
