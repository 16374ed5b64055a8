import math

import numpy as np
import pytest

import induced_pressure as ip
from conftest import random_fixture, random_irreducible_spec, random_depth1
from induced_pressure.errors import PreconditionError

LOG2 = math.log(2.0)


class TestPseudoInverse:
    def test_full_shift_unit_scaling(self):
        fs = ip.full_shift(2)
        tr = ip.truncate(fs, fs.symbols)
        r = ip.pseudo_inverse_pressure(tr, ip.zero(), ip.constant(1.0))
        assert r.value == pytest.approx(LOG2, abs=1e-10)
        assert r.bracket[0] <= r.value <= r.bracket[1]

    def test_phi_equals_psi_shifts_by_one(self):
        # log(2 e^{1-beta}) = 0  <=>  beta = 1 + log 2
        fs = ip.full_shift(2)
        tr = ip.truncate(fs, fs.symbols)
        one = ip.constant(1.0)
        r = ip.pseudo_inverse_pressure(tr, one, one)
        assert r.value == pytest.approx(1 + LOG2, abs=1e-10)

    def test_phi_minus_psi(self):
        fs = ip.full_shift(2)
        tr = ip.truncate(fs, fs.symbols)
        r = ip.pseudo_inverse_pressure(tr, ip.constant(-1.0), ip.constant(1.0))
        assert r.value == pytest.approx(LOG2 - 1, abs=1e-10)

    def test_root_zeroes_the_inner_pressure(self, rng):
        # the defining contract on finite alphabets: the value is the
        # unique zero of beta -> pressure(phi - beta*psi)
        for _ in range(3):
            _, tr, phi, psi = random_fixture(rng, 5)
            beta = ip.pseudo_inverse_pressure(tr, phi, psi).value
            residual = ip.finite_pressure(tr, ip.combine(phi, psi, (1.0, -beta)))
            assert residual == pytest.approx(0.0, abs=1e-9)

    def test_requires_strictly_positive_scaling(self):
        fs = ip.full_shift(2)
        tr = ip.truncate(fs, fs.symbols)
        with pytest.raises(PreconditionError):
            ip.pseudo_inverse_pressure(tr, ip.zero(), ip.zero())

    def test_nilpotent_gives_minus_infinity(self):
        spec = ip.from_matrix([[0, 1], [0, 0]])
        tr = ip.truncate(spec, spec.symbols)
        r = ip.pseudo_inverse_pressure(tr, ip.zero(), ip.constant(1.0))
        assert r.value == -math.inf and r.verdict == "-inf"

    def test_collection_restriction_on_reducible(self):
        rows = [
            [1, 1, 0, 0, 0],
            [1, 1, 0, 0, 0],
            [0, 0, 1, 1, 1],
            [0, 0, 1, 1, 1],
            [0, 0, 1, 1, 1],
        ]
        spec = ip.from_matrix(rows)
        tr = ip.truncate(spec, spec.symbols)
        one = ip.constant(1.0)
        r_all = ip.pseudo_inverse_pressure(tr, ip.zero(), one)
        r_1 = ip.pseudo_inverse_pressure(tr, ip.zero(), one, ip.periodic_at(1))
        r_4 = ip.pseudo_inverse_pressure(tr, ip.zero(), one, ip.periodic_at(4))
        assert r_all.value == pytest.approx(math.log(3), abs=1e-10)
        assert r_1.value == pytest.approx(LOG2, abs=1e-10)
        assert r_4.value == pytest.approx(math.log(3), abs=1e-10)
        # stability: the union of the component collections is everything
        assert r_all.value == pytest.approx(max(r_1.value, r_4.value), abs=1e-9)

    def test_plateau_reports_infimum_endpoint(self):
        # a two-sided plateau cannot occur for strictly positive psi on a
        # finite shift, so emulate the tie-break contract on a synthetic
        # nonincreasing function with a flat zero stretch
        def f(x):
            if x < 1.0:
                return 1.0 - x
            if x <= 2.0:
                return 0.0
            return 2.0 - x

        root, lo, hi, status = ip.solve_decreasing(f, 0.0, 1.0, tol=1e-12)
        assert status == "ok"
        assert root == pytest.approx(1.0, abs=1e-9)


class TestWindowEstimator:
    def test_full_shift_every_window_is_exact(self):
        fs = ip.full_shift(2)
        tr = ip.truncate(fs, fs.symbols)
        r = ip.estimate_pressure_window(
            fs, ip.zero(), ip.constant(1.0), ip.all_words(), tr,
            eta=1.0, t_grid=range(1, 13), length_cap=20,
        )
        assert r.verdict == "finite"
        assert all(v == pytest.approx(LOG2, abs=1e-12) for v in r.sequence)
        assert r.value == pytest.approx(LOG2, abs=1e-12)

    def test_single_loop_constant_phi(self):
        fs = ip.full_shift(1)
        tr = ip.truncate(fs, fs.symbols)
        r = ip.estimate_pressure_window(
            fs, ip.constant(0.7), ip.constant(1.0), ip.all_words(), tr,
            eta=1.0, t_grid=range(1, 11), length_cap=15,
        )
        assert r.value == pytest.approx(0.7, abs=1e-12)

    def test_renewal_geometric_scaling_diverges_with_witness(self):
        rn = ip.renewal_shift()
        tr = ip.truncate_range(rn, 800)
        r = ip.estimate_pressure_window(
            rn, ip.zero(), ip.alpha_farey_geometric(), ip.all_words(), tr,
            eta=1.0, t_grid=[1, 2], length_cap=30,
        )
        assert r.verdict == "+inf"
        assert r.certificate is not None
        assert r.certificate.rule in ("unbounded-symbol-family", "partial-sum-threshold")
        lo, hi = r.certificate.window
        assert hi - lo == pytest.approx(1.0)
        assert r.certificate.sample_words

    def test_partial_sum_threshold_rule(self):
        rn = ip.renewal_shift()
        tr = ip.truncate_range(rn, 400)
        r = ip.estimate_pressure_window(
            rn, ip.zero(), ip.alpha_farey_geometric(), ip.all_words(), tr,
            eta=1.0, t_grid=[1, 2], length_cap=30, sum_threshold=100.0,
        )
        assert r.verdict == "+inf"
        assert r.certificate.rule == "partial-sum-threshold"
        assert r.certificate.partial_sum > 100.0

    def test_no_false_divergence_when_weights_decay(self):
        # phi = -(first symbol): mass per symbol scale dies exponentially
        rn = ip.renewal_shift()
        tr = ip.truncate_range(rn, 600)
        r = ip.estimate_pressure_window(
            rn, ip.first_symbol_negated(), ip.alpha_farey_geometric(),
            ip.all_words(), tr, eta=1.0, t_grid=[1, 2, 3], length_cap=25,
        )
        assert r.verdict == "finite"

    def test_route_agreement_and_lower_bound(self, rng):
        # window tail estimate vs pseudo-inverse within 10/T_max + 1e-6;
        # the pseudo-inverse never exceeds the partition-sum estimate by
        # more than that allowance.  Scaling values ~3 keep the word count
        # through the windows enumerable (the DFS sees every admissible
        # word with psi-sum below T_max, whatever its weight).
        t_max = 25
        tol = 10.0 / t_max + 1e-6
        for _ in range(3):
            spec = random_irreducible_spec(rng, 4)
            tr = ip.truncate(spec, spec.symbols)
            phi = random_depth1(rng, spec, -1.2, -0.4)
            psi = random_depth1(rng, spec, 2.5, 4.0, strictly_positive=True)
            pseudo = ip.pseudo_inverse_pressure(tr, phi, psi).value
            window = ip.estimate_pressure_window(
                spec, phi, psi, ip.all_words(), tr,
                eta=1.0, t_grid=range(1, t_max + 1), length_cap=20,
            )
            assert window.verdict == "finite"
            assert abs(window.value - pseudo) <= tol
            assert pseudo <= window.value + tol

    def test_eta_independence(self, rng):
        spec = random_irreducible_spec(rng, 4)
        tr = ip.truncate(spec, spec.symbols)
        phi = random_depth1(rng, spec, -1.2, -0.4)
        psi = random_depth1(rng, spec, 2.5, 4.0, strictly_positive=True)
        t_max = 20
        vals = []
        for eta in (0.5, 1.0, 2.0):
            r = ip.estimate_pressure_window(
                spec, phi, psi, ip.all_words(), tr,
                eta=eta, t_grid=np.arange(eta, t_max + 1e-9, eta), length_cap=16,
            )
            vals.append(r.value)
        allowance = 2 * (10.0 / t_max + 1e-6)
        assert max(vals) - min(vals) <= allowance

    def test_deterministic_across_runs(self):
        rn = ip.renewal_shift()
        tr = ip.truncate_range(rn, 50)
        args = (rn, ip.first_symbol_negated(), ip.alpha_farey_geometric(),
                ip.all_words(), tr)
        r1 = ip.estimate_pressure_window(*args, eta=1.0, t_grid=[1, 2, 3], length_cap=20)
        r2 = ip.estimate_pressure_window(*args, eta=1.0, t_grid=[1, 2, 3], length_cap=20)
        assert r1.sequence == r2.sequence
        assert r1.value == r2.value


class TestExhaustion:
    def test_farey_sequence_increases_to_one(self):
        rn = ip.renewal_shift()
        r = ip.exhaustion_sequence(
            rn, ip.zero(), ip.alpha_farey_geometric(), ip.periodic_at(1),
            [range(1, n + 1) for n in (4, 16, 64, 256)],
        )
        assert r.diagnostics["monotone"]
        assert r.sequence[-1] < 1.0
        assert r.sequence[-1] == pytest.approx(1.0, abs=0.01)
        assert r.bracket == (r.sequence[-1], math.inf)

    def test_finite_system_exhausts_itself(self):
        fs = ip.full_shift(3)
        r = ip.exhaustion_sequence(
            fs, ip.zero(), ip.constant(1.0), ip.all_words(),
            [[1], [1, 2], [1, 2, 3]],
        )
        assert r.sequence[-1] == pytest.approx(math.log(3), abs=1e-10)
        tr = ip.truncate(fs, fs.symbols)
        direct = ip.pseudo_inverse_pressure(tr, ip.zero(), ip.constant(1.0)).value
        assert r.value == pytest.approx(direct, abs=1e-12)

    def test_renewal_unit_scaling_increases_to_log2(self):
        rn = ip.renewal_shift()
        r = ip.exhaustion_sequence(
            rn, ip.zero(), ip.constant(1.0), ip.periodic_at(1),
            [range(1, n + 1) for n in (2, 8, 32)],
        )
        assert r.diagnostics["monotone"]
        assert r.sequence[-1] == pytest.approx(LOG2, abs=1e-8)


class TestCrossRouteInequality:
    def test_pseudo_inverse_below_critical_exponent_estimate(self, rng):
        # on finite irreducible systems the two coincide; the certified
        # direction is pseudo-inverse <= partition-sum critical exponent
        for _ in range(3):
            _, tr, phi, psi = random_fixture(rng, 4)
            pseudo = ip.pseudo_inverse_pressure(tr, phi, psi).value
            loop = ip.loop_pressure(
                ip.enumerate_simple_loops(tr.owner, ip.periodic_at(1), tr, 2000,
                                          representation="matrix"),
                phi, psi,
            ).value
            assert pseudo <= loop + 1e-8
            assert loop == pytest.approx(pseudo, abs=1e-8)
