"""Reference allocation policies for benchmark comparison.

Both policies respect the per-RAU cap and end with a nonnegative total
trade state (zero unless every RAU saturates), but neither exploits the
optimal double-threshold structure:

* greedy -- spend local harvest first, pool the surplus in the grid,
  then discharge the pool to the best-gain unsaturated RAUs.
* water-filling -- classic cutoff rule p = min(p_max, [level - 1/gain]+)
  with the level chosen to zero the total trade state; blind to the
  transfer efficiency except through that balance.
"""

import numpy as np

from .allocator import (
    CHARGING,
    DISCHARGING,
    FULL_POWER,
    NEUTRAL,
    PASSIVE,
    PROFITABLE,
    ZERO_POWER,
    Allocation,
    Instance,
    TradePlan,
    objective_value,
)

_BALANCE_TOL = 1e-9


def _finish(powers, inst: Instance) -> Allocation:
    charge = np.maximum(inst.harvest - powers, 0.0)
    discharge = np.maximum(powers - inst.harvest, 0.0)
    states = inst.eta * charge - discharge / inst.eta
    classification = []
    for i in range(inst.n_raus):
        if powers[i] >= inst.p_max * (1.0 - 1e-9):
            classification.append(FULL_POWER)
        elif powers[i] <= 1e-12 * inst.p_max:
            classification.append(ZERO_POWER)
        elif charge[i] > 0:
            classification.append(CHARGING)
        elif discharge[i] > 0:
            classification.append(DISCHARGING)
        else:
            classification.append(PASSIVE)
    total = float(np.sum(states))
    return Allocation(
        powers=powers,
        trade=TradePlan(charge=charge, discharge=discharge, states=states),
        kappa_g=None,
        kappa_l=None,
        classification=classification,
        scenario=PROFITABLE if total > _BALANCE_TOL else NEUTRAL,
        objective=objective_value(powers, inst.gains),
    )


def greedy_allocation(inst: Instance) -> Allocation:
    """Spend harvest locally, then route pooled surplus to the best gains.

    Phase 1 transmits min(E, p_max) everywhere; RAUs with surplus charge
    it to the grid, pooling eta*sum(C) of grid-side credit.  Phase 2
    walks the unsaturated RAUs in descending gain order and tops each up
    toward the cap; discharging D to a RAU burns D/eta of credit, so the
    end-to-end efficiency of re-routed energy is eta^2.  The last top-up
    may be partial, which lands the total trade state exactly at zero.
    """
    p_max, eta = inst.p_max, inst.eta
    powers = np.minimum(inst.harvest, p_max)
    credit = eta * float(np.sum(np.maximum(inst.harvest - p_max, 0.0)))
    for i in range(inst.n_raus):  # instance order is descending gain
        if credit <= 0:
            break
        room = p_max - powers[i]
        if room <= 0:
            continue
        discharge = min(room, credit * eta)
        powers[i] += discharge
        credit -= discharge / eta
    return _finish(powers, inst)


def waterfilling_allocation(inst: Instance) -> Allocation:
    """Adaptive water-filling: p = min(p_max, [level - 1/gain]+).

    The cutoff level is bisected so the total trade state is zero; if
    even the all-cap point leaves the grid in surplus, the all-cap
    allocation is returned.
    """
    gains, harvest, eta, p_max = inst.gains, inst.harvest, inst.eta, inst.p_max
    inv = 1.0 / gains

    def powers_at(level):
        return np.minimum(p_max, np.maximum(level - inv, 0.0))

    def balance(level):
        p = powers_at(level)
        return float(
            np.sum(eta * np.maximum(harvest - p, 0.0) - np.maximum(p - harvest, 0.0) / eta)
        )

    lo = float(np.min(inv))  # every power is zero here, so balance >= 0
    hi = float(np.max(inv)) + p_max  # every power is capped here
    if balance(hi) >= 0.0:
        return _finish(powers_at(hi), inst)
    while hi - lo > 1e-13 * (1.0 + hi):
        mid = 0.5 * (lo + hi)
        if balance(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return _finish(powers_at(lo), inst)
