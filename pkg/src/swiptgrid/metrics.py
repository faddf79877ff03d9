"""Receiver-side SWIPT quantities for a power-splitting receiver.

A fraction rho of the received signal power feeds the information
decoder and 1-rho feeds the energy harvester, so with beamformed signal
power ``objective`` = (sum sqrt(p)*gain)^2:

    harvested power  Q = xi*(1-rho)*(objective + sigma2)
    achievable rate  R = log2(1 + rho*objective/(rho*sigma2 + tau2))
"""

import math

from dataclasses import dataclass


class InfeasibleWetError(ValueError):
    """Raised when a harvested-energy demand exceeds what rho -> 0 yields."""


@dataclass
class SwiptMetrics:
    objective: float
    wet: float
    wit: float
    ps_ratio: float
    conv_eff: float
    noise_rf: float
    noise_proc: float


def _check_unit_interval(name, value):
    if not 0 < value <= 1:
        raise ValueError(f"{name} must lie in (0, 1]")


def wet_energy(objective, rho, xi, sigma2):
    """Harvested power xi*(1-rho)*(objective + sigma2)."""
    _check_unit_interval("rho", rho)
    _check_unit_interval("xi", xi)
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if objective < 0:
        raise ValueError("objective must be nonnegative")
    return xi * (1.0 - rho) * (objective + sigma2)


def wit_rate(objective, rho, sigma2, tau2):
    """Rate log2(1 + rho*objective/(rho*sigma2 + tau2)) in bits/s/Hz."""
    return math.log2(1.0 + rho * objective / (rho * sigma2 + tau2))


def ps_ratio_for_wet(q_min, objective, xi, sigma2):
    """Largest split ratio meeting a minimum harvested-power demand.

    rho = 1 - q_min/(xi*(objective + sigma2)); demands at or above the
    rho -> 0 harvest are infeasible.
    """
    _check_unit_interval("xi", xi)
    if q_min < 0:
        raise ValueError("q_min must be nonnegative")
    rho = 1.0 - q_min / (xi * (objective + sigma2))
    if rho <= 0:
        raise InfeasibleWetError(
            f"demand {q_min} requires more than the full received power"
        )
    return rho


def swipt_metrics(objective, rho, xi, sigma2, tau2) -> SwiptMetrics:
    return SwiptMetrics(
        objective=objective,
        wet=wet_energy(objective, rho, xi, sigma2),
        wit=wit_rate(objective, rho, sigma2, tau2),
        ps_ratio=rho,
        conv_eff=xi,
        noise_rf=sigma2,
        noise_proc=tau2,
    )


def rate_energy_curve(objective, xi, sigma2, tau2, n_points):
    """Sample (rho, rate, harvested power) over rho in (0, 1].

    rho runs from 1/n_points to 1 in uniform steps, so the rate column
    is nondecreasing and the harvest column nonincreasing.
    """
    if n_points < 2:
        raise ValueError("need at least two sample points")
    out = []
    for j in range(1, n_points + 1):
        rho = j / n_points
        out.append(
            (rho, wit_rate(objective, rho, sigma2, tau2), wet_energy(objective, rho, xi, sigma2))
        )
    return out
