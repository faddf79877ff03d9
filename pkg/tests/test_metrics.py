import math

import pytest

from swiptgrid.metrics import (
    InfeasibleWetError,
    ps_ratio_for_wet,
    rate_energy_curve,
    swipt_metrics,
    wet_energy,
    wit_rate,
)


def test_wet_energy_values():
    assert wet_energy(10.0, 1.0, 0.5, 1.0) == 0.0
    assert wet_energy(45.0, 0.5, 0.5, 1.0) == pytest.approx(11.5)
    assert wet_energy(0.0, 0.5, 1.0, 1.0) == pytest.approx(0.5)


def test_wet_energy_rejects_bad_fractions():
    with pytest.raises(ValueError):
        wet_energy(1.0, 0.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        wet_energy(1.0, 1.2, 0.5, 1.0)
    with pytest.raises(ValueError):
        wet_energy(1.0, 0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        wet_energy(-1.0, 0.5, 0.5, 1.0)


def test_wit_rate_values():
    assert wit_rate(0.0, 0.5, 1.0, 1.0) == 0.0
    assert wit_rate(3.0, 1.0, 1.0, 1.0) == pytest.approx(math.log2(2.5))


def test_wit_rate_monotone_in_split_ratio():
    rates = [wit_rate(7.0, rho, 1.0, 1.0) for rho in (0.1, 0.4, 0.7, 1.0)]
    assert all(b >= a for a, b in zip(rates, rates[1:]))


def test_ps_ratio_for_wet_values():
    assert ps_ratio_for_wet(0.0, 10.0, 0.5, 1.0) == 1.0
    full = 0.5 * (10.0 + 1.0)
    assert ps_ratio_for_wet(full / 2, 10.0, 0.5, 1.0) == pytest.approx(0.5)
    with pytest.raises(InfeasibleWetError):
        ps_ratio_for_wet(full, 10.0, 0.5, 1.0)


def test_ps_ratio_round_trip(rng):
    for _ in range(40):
        objective = float(rng.uniform(0.0, 100.0))
        xi = float(rng.uniform(0.1, 1.0))
        sigma2 = float(rng.uniform(0.1, 4.0))
        q_min = float(rng.uniform(0.0, 0.99)) * xi * (objective + sigma2)
        rho = ps_ratio_for_wet(q_min, objective, xi, sigma2)
        back = wet_energy(objective, rho, xi, sigma2)
        assert back == pytest.approx(q_min, rel=1e-12, abs=1e-15)


def test_both_metrics_increase_with_objective():
    rho, xi, s2, t2 = 0.4, 0.5, 1.0, 1.0
    lo, hi = 5.0, 6.0
    assert wet_energy(hi, rho, xi, s2) > wet_energy(lo, rho, xi, s2)
    assert wit_rate(hi, rho, s2, t2) > wit_rate(lo, rho, s2, t2)


def test_rate_energy_curve_shape_and_monotonicity():
    curve = rate_energy_curve(20.0, 0.5, 1.0, 1.0, 50)
    assert len(curve) == 50
    rhos = [r for r, _, _ in curve]
    assert rhos[0] == pytest.approx(1 / 50) and rhos[-1] == 1.0
    wits = [w for _, w, _ in curve]
    wets = [q for _, _, q in curve]
    assert all(b >= a for a, b in zip(wits, wits[1:]))
    assert all(b <= a for a, b in zip(wets, wets[1:]))
    assert wets[-1] == 0.0
    for rho, wit, wet in curve:
        assert wit == pytest.approx(wit_rate(20.0, rho, 1.0, 1.0))
        assert wet == pytest.approx(wet_energy(20.0, rho, 0.5, 1.0))
    with pytest.raises(ValueError):
        rate_energy_curve(20.0, 0.5, 1.0, 1.0, 1)


def test_swipt_metrics_bundle_consistency():
    m = swipt_metrics(45.0, 0.5, 0.5, 1.0, 1.0)
    assert m.wet == pytest.approx(0.5 * 0.5 * 46.0, abs=1e-12)
    assert m.wit == pytest.approx(math.log2(1 + 0.5 * 45.0 / 1.5), abs=1e-12)
