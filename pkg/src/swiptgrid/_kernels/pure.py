"""Numpy implementation of the allocator hot loops.

Used when the compiled extension is unavailable (or forced via the
``SWIPTGRID_PURE`` environment variable).  The compiled module in
``_core.pyx`` implements the same four functions with identical
bracketing and termination rules.
"""

import numpy as np

TAG_PASSIVE = 0
TAG_CHARGING = 1
TAG_DISCHARGING = 2


def balance_at(kappa, gains2, harvest, eta, fixed):
    """Net grid trade at threshold ``kappa``: sum of eta*C - D/eta plus ``fixed``."""
    cut_hi = gains2 * (kappa * kappa)
    cut_lo = cut_hi * eta**4
    charge = np.maximum(harvest - cut_hi, 0.0)
    discharge = np.maximum(cut_lo - harvest, 0.0)
    return eta * float(np.sum(charge)) - float(np.sum(discharge)) / eta + fixed


def _piece_polish(kappa, gains2, harvest, eta, fixed):
    """Exact root on the linear piece containing ``kappa``.

    With every RAU's regime frozen at its value at ``kappa``, the
    balance is linear in kappa^2; solving that line removes the
    bisection residual.  Falls back to ``kappa`` when the regimes do
    not survive at the candidate root (kink crossing) or the piece is
    flat.
    """
    u = kappa * kappa
    cut_hi = gains2 * u
    cut_lo = cut_hi * eta**4
    charging = harvest > cut_hi
    discharging = harvest < cut_lo
    den = eta * float(np.sum(gains2[charging])) + eta**3 * float(np.sum(gains2[discharging]))
    if den <= 0.0:
        return kappa
    num = (
        fixed
        + eta * float(np.sum(harvest[charging]))
        + float(np.sum(harvest[discharging])) / eta
    )
    u_star = num / den
    if u_star < 0.0:
        return kappa
    new_hi = gains2 * u_star
    new_lo = new_hi * eta**4
    ok = np.all(harvest[charging] >= new_hi[charging]) and np.all(
        harvest[discharging] <= new_lo[discharging]
    )
    passive = ~charging & ~discharging
    ok = ok and np.all(
        (harvest[passive] >= new_lo[passive]) & (harvest[passive] <= new_hi[passive])
    )
    return np.sqrt(u_star) if ok else kappa


def solve_kappa(gains2, harvest, eta, fixed, hi):
    """Root of ``balance_at`` in kappa >= 0 by bracketed bisection.

    The balance is continuous and nonincreasing in kappa and tends to
    -inf, so doubling the upper end always produces a sign change.
    Bisection stops once the bracket width falls below 1e-12*(1+kappa)
    or the residual balance is negligible; the result is then polished
    exactly on its linear piece.
    """
    sum_e = float(np.sum(harvest))
    if eta * sum_e + fixed <= 0.0:
        return 0.0
    b_tol = 1e-13 * (eta * sum_e + 1.0)
    lo = 0.0
    if hi <= 0.0:
        hi = 1.0
    for _ in range(1200):
        if balance_at(hi, gains2, harvest, eta, fixed) <= 0.0:
            break
        lo = hi
        hi *= 2.0
    else:
        raise RuntimeError("no sign change while expanding kappa bracket")
    while hi - lo > 1e-12 * (1.0 + 0.5 * (lo + hi)):
        mid = 0.5 * (lo + hi)
        bal = balance_at(mid, gains2, harvest, eta, fixed)
        if abs(bal) <= b_tol:
            break
        if bal > 0.0:
            lo = mid
        else:
            hi = mid
    return float(_piece_polish(0.5 * (lo + hi), gains2, harvest, eta, fixed))


def candidate_powers(kappa, gains2, harvest, eta):
    """Per-RAU power under the double-threshold rule, plus a tag array.

    Harvest above the charge cutoff gains2*kappa^2 clips power to the
    cutoff (surplus charges the grid); harvest below the discharge
    cutoff gains2*(eta^2*kappa)^2 clips to that floor; in between the
    RAU spends exactly its harvest.
    """
    cut_hi = gains2 * (kappa * kappa)
    cut_lo = cut_hi * eta**4
    tags = np.full(gains2.shape, TAG_PASSIVE, dtype=np.int8)
    tags[harvest > cut_hi] = TAG_CHARGING
    tags[harvest < cut_lo] = TAG_DISCHARGING
    powers = np.where(tags == TAG_CHARGING, cut_hi,
                      np.where(tags == TAG_DISCHARGING, cut_lo, harvest))
    return powers, tags


def weighted_root_sum(powers, gains):
    """sum_i sqrt(p_i) * gain_i, the square root of the objective."""
    return float(np.sum(np.sqrt(powers) * gains))
