import numpy as np
import pytest

import induced_pressure as ip


def random_irreducible_spec(rng, n, density=0.55):
    """Random 0/1 incidence with a forced n-cycle, so one component."""
    rows = (rng.random((n, n)) < density).astype(int)
    for i in range(n):
        rows[i, (i + 1) % n] = 1
    return ip.from_matrix(rows)


def random_depth1(rng, spec, lo, hi, **flags):
    vals = rng.uniform(lo, hi, len(spec.symbols))
    return ip.from_table(1, {s: v for s, v in zip(spec.symbols, vals)}, **flags)


def random_fixture(rng, n=5, phi_range=(-1.0, 1.0), psi_range=(0.5, 2.0)):
    spec = random_irreducible_spec(rng, n)
    trunc = ip.truncate(spec, spec.symbols)
    phi = random_depth1(rng, spec, *phi_range)
    psi = random_depth1(rng, spec, *psi_range, strictly_positive=True)
    return spec, trunc, phi, psi


@pytest.fixture
def rng():
    return np.random.default_rng(20250809)
