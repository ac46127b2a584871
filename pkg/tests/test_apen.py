import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from effimetrics.apen import (ApEnConfig, chebyshev_distance, compute_apen, correlation_fraction,
                              match_counts, phi)


def test_chebyshev_examples():
    assert chebyshev_distance([1, 2], [1, 2]) == 0
    assert chebyshev_distance([0, 0], [3, -4]) == 4
    assert chebyshev_distance([1, 5, 2], [2, 3, 2]) == 2


def test_chebyshev_length_mismatch():
    with pytest.raises(ValueError):
        chebyshev_distance([1, 2], [1, 2, 3])


def test_correlation_fraction_constant():
    for i in (1, 3, 5):
        assert correlation_fraction([4.0] * 6, i, 2, 0.1) == 1.0


def test_correlation_fraction_enumeration():
    # templates [0,10], [10,0], [0,10]: template 1 matches 1 and 3
    assert correlation_fraction([0, 10, 0, 10], 1, 2, 1.0) == pytest.approx(2 / 3)
    assert correlation_fraction([0, 10, 0, 10], 2, 2, 1.0) == pytest.approx(1 / 3)


def test_correlation_fraction_index_range():
    with pytest.raises(ValueError):
        correlation_fraction([0, 1, 2, 3], 4, 2, 1.0)
    with pytest.raises(ValueError):
        correlation_fraction([0, 1, 2, 3], 0, 2, 1.0)


def test_match_symmetry(rng):
    x = rng.standard_normal(6)
    n_t = 5
    r = 0.8
    pairs = {(i, j) for i in range(n_t) for j in range(n_t)
             if chebyshev_distance(x[i:i + 2], x[j:j + 2]) <= r}
    assert all((j, i) in pairs for i, j in pairs)
    assert match_counts(x, 2, r).sum() == len(pairs)


def test_phi_constant():
    assert phi([2.0] * 10, 2, 0.5) == 0.0


def test_phi_two_isolated_templates():
    assert phi([0.0, 5.0, 10.0], 2, 1.0) == pytest.approx(math.log(1 / 2))


def test_phi_enumeration():
    expected = (math.log(2 / 3) + math.log(1 / 3) + math.log(2 / 3)) / 3
    assert phi([0, 10, 0, 10], 2, 1.0) == pytest.approx(expected, abs=1e-15)


def test_value_is_phi_difference(rng):
    res = compute_apen(rng.standard_normal(300))
    assert res.value == res.phi_m - res.phi_m_plus_1
    assert res.n_used == 300


def test_alternating_is_regular():
    x = np.tile([1.0, -1.0], 500)
    assert compute_apen(x).value < 0.02


def test_gaussian_magnitude_band(rng):
    assert 1.0 <= compute_apen(rng.standard_normal(1260)).value <= 2.5


@pytest.mark.parametrize("a,b", [(2.0, 0.0), (0.001, 0.0), (7.5, -3.0)])
def test_positive_affine_invariance(rng, a, b):
    x = rng.standard_normal(400)
    # scaling by a power of two is exact, so use a tolerance for generic a
    assert compute_apen(a * x + b).value == pytest.approx(compute_apen(x).value, abs=1e-9)


def test_power_of_two_scaling_exact(rng):
    x = rng.standard_normal(400)
    assert compute_apen(4.0 * x).value == compute_apen(x).value


def test_zero_variance_rejected():
    with pytest.raises(ValueError, match="zero-variance"):
        compute_apen([0.3] * 50)


def test_too_short():
    with pytest.raises(ValueError):
        compute_apen([1.0, 2.0, 3.0])


def test_config_validation():
    with pytest.raises(ValueError):
        ApEnConfig(m=0)
    with pytest.raises(ValueError):
        ApEnConfig(r_fraction=1.0)


def test_regular_below_shuffled():
    x = np.tile([1.0, -1.0], 500)
    base = compute_apen(x).value
    for seed in range(50):
        shuffled = np.random.default_rng(seed).permutation(x)
        assert base < compute_apen(shuffled).value


def test_oracle_equivalence():
    rng = np.random.default_rng(99)
    for _ in range(30):
        n = int(rng.integers(10, 200))
        x = rng.standard_normal(n)
        r = 0.2 * float(np.std(x, ddof=1))
        assert abs(compute_apen(x).value - oracles.apen(x.tolist(), 2, r)) <= 1e-12


def test_blocked_counts_match(monkeypatch, rng):
    import effimetrics.apen as mod
    x = rng.standard_normal(300)
    full = match_counts(x, 3, 0.3)
    monkeypatch.setattr(mod, "_BLOCK", 17)
    assert np.array_equal(mod.match_counts(x, 3, 0.3), full)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(5, 80),
              elements=st.floats(-1e3, 1e3, allow_nan=False, allow_subnormal=False)))
def test_phi_nonpositive(x):
    assume(np.ptp(x) > 0 and np.std(x, ddof=1) > 0)
    res = compute_apen(x)
    assert res.phi_m <= 0 and res.phi_m_plus_1 <= 0


def test_underflowing_spread_is_rejected():
    # nonzero spread but the standard deviation underflows to 0
    with pytest.raises(ValueError, match="zero-variance"):
        compute_apen([6.36848555e-174, 0.0, 0.0, 0.0, 0.0])


def test_all_unique_templates_go_slightly_negative():
    # m+1 has one template fewer, so with no cross-matches ApEn = ln((N-m)/(N-m+1))
    x = [1.0, 0.0, 2.0, 0.0, 0.0]
    assert compute_apen(x).value == pytest.approx(math.log(3 / 4))


def test_nonnegative_on_realistic_windows():
    rng = np.random.default_rng(5)
    for _ in range(50):
        x = rng.standard_normal(int(rng.integers(100, 500)))
        assert compute_apen(x).value >= -1e-12
