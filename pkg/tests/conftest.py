import numpy as np
import pytest

from swiptgrid.allocator import Instance
from swiptgrid.channel import effective_gains, generate_realization


def random_instance(rng, n=None, eta=None, p_max=None, harvest_low=0.0,
                    harvest_high=None, n_max=32, style="channel"):
    """Random but well-formed instance for property-style tests.

    ``style="channel"`` draws gains from the physical model (distances
    uniform on [10, 50], Rayleigh fading, decay exponent 2);
    ``style="spread"`` uses log-normal gains to exercise wide dynamic
    ranges.
    """
    if n is None:
        n = int(rng.integers(1, n_max + 1))
    if p_max is None:
        p_max = float(rng.uniform(0.5, 8.0))
    if eta is None:
        eta = 1.0 if rng.random() < 0.15 else float(rng.uniform(0.5, 1.0))
    if harvest_high is None:
        harvest_high = 2.0 * p_max
    if style == "channel":
        real = generate_realization(n, int(rng.integers(1, 5)), 10.0, 50.0, 2.0, rng)
        gains = effective_gains(real).gains
    else:
        gains = np.sort(np.exp(rng.normal(0.0, 1.5, n)))[::-1].copy()
    harvest = rng.uniform(harvest_low, harvest_high, n)
    return Instance(gains=gains, harvest=harvest, p_max=p_max, eta=eta)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
