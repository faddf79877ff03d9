"""Parity between the compiled kernel and the numpy fallback."""

import numpy as np
import pytest

import swiptgrid._kernels as kernels
from swiptgrid._kernels import pure

try:
    from swiptgrid._kernels import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled kernel not built")


def _random_problem(rng, n):
    gains2 = np.sort(rng.uniform(0.01, 4.0, n))[::-1].copy() ** 2
    harvest = rng.uniform(0.0, 10.0, n)
    eta = float(rng.uniform(0.3, 1.0))
    return np.ascontiguousarray(gains2), np.ascontiguousarray(harvest), eta


def test_backend_is_exposed():
    assert kernels.BACKEND in ("compiled", "pure")
    for name in ("balance_at", "solve_kappa_bisect", "candidate_powers", "weighted_root_sum"):
        assert callable(getattr(kernels, name))


@needs_core
def test_balance_parity(rng):
    for _ in range(100):
        g2, e, eta = _random_problem(rng, int(rng.integers(1, 33)))
        kappa = float(rng.uniform(0.0, 20.0))
        fixed = float(rng.uniform(-5.0, 5.0))
        a = pure.balance_at(kappa, g2, e, eta, fixed)
        b = _core.balance_at(kappa, g2, e, eta, fixed)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@needs_core
def test_solve_kappa_parity(rng):
    for _ in range(100):
        g2, e, eta = _random_problem(rng, int(rng.integers(1, 33)))
        fixed = float(rng.uniform(-0.5, 0.5)) * eta * float(np.sum(e))
        hi = float(np.sqrt(5.0) / np.sqrt(g2[-1]))
        a = pure.solve_kappa(g2, e, eta, fixed, hi)
        b = _core.solve_kappa(g2, e, eta, fixed, hi)
        assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


@needs_core
def test_candidate_powers_parity(rng):
    for _ in range(100):
        g2, e, eta = _random_problem(rng, int(rng.integers(1, 33)))
        kappa = float(rng.uniform(0.0, 10.0))
        pa, ta = pure.candidate_powers(kappa, g2, e, eta)
        pb, tb = _core.candidate_powers(kappa, g2, e, eta)
        assert np.allclose(pa, pb, rtol=1e-14, atol=0)
        assert np.array_equal(ta, tb)


@needs_core
def test_weighted_root_sum_parity(rng):
    for _ in range(50):
        n = int(rng.integers(1, 65))
        p = np.ascontiguousarray(rng.uniform(0.0, 5.0, n))
        g = np.ascontiguousarray(rng.uniform(0.01, 2.0, n))
        assert pure.weighted_root_sum(p, g) == pytest.approx(
            _core.weighted_root_sum(p, g), rel=1e-12
        )


@pytest.mark.parametrize("impl", [pure] + ([_core] if _core else []))
def test_solve_kappa_root_actually_balances(impl, rng):
    for _ in range(60):
        g2, e, eta = _random_problem(rng, int(rng.integers(1, 17)))
        hi = float(np.sqrt(5.0) / np.sqrt(g2[-1]))
        kappa = impl.solve_kappa(g2, e, eta, 0.0, hi)
        residual = impl.balance_at(kappa, g2, e, eta, 0.0)
        assert abs(residual) <= 1e-9 * (eta * float(np.sum(e)) + 1.0)


@pytest.mark.parametrize("impl", [pure] + ([_core] if _core else []))
def test_solve_kappa_degenerate_cases(impl):
    g2 = np.array([1.0])
    # nothing to trade at all
    assert impl.solve_kappa(g2, np.array([0.0]), 0.8, 0.0, 1.0) == 0.0
    # fixed deficit larger than any available charge
    assert impl.solve_kappa(g2, np.array([1.0]), 0.8, -10.0, 1.0) == 0.0
    # plateau: single passive RAU, root anywhere in [sqrt(E), sqrt(E)/eta^2]
    kappa = impl.solve_kappa(g2, np.array([4.0]), 0.8, 0.0, 1.0)
    assert 2.0 - 1e-9 <= kappa <= 2.0 / 0.64 + 1e-9
    powers, tags = impl.candidate_powers(kappa, g2, np.array([4.0]), 0.8)
    assert powers[0] == pytest.approx(4.0)


def test_zero_hi_bracket_recovers():
    kappa = pure.solve_kappa(np.array([1.0]), np.array([2.0]), 1.0, 0.0, 0.0)
    assert kappa**2 == pytest.approx(2.0, rel=1e-9)
