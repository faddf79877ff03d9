"""Structure-blind reference solvers for small instances.

Two independent routes certify the allocator without reusing any of its
threshold machinery: an exhaustive grid search with local refinement
(N <= 4) and a projected-ascent solver on the square-root
parameterization polished by SLSQP (any N).  Both only ever touch the
raw problem: maximize sum(sqrt(p)*gain) over 0 <= p <= p_max with
total trade state sum(S(p)) >= 0.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.optimize import minimize

GRID_SEARCH = "grid_search"
PROJECTED_ASCENT = "projected_ascent"

_FEAS_SLACK = 1e-9


@dataclass
class OracleResult:
    powers: np.ndarray
    objective: float
    method: str
    resolution: float
    converged: bool = True


def _total_state(powers, harvest, eta):
    return float(
        np.sum(
            eta * np.maximum(harvest - powers, 0.0)
            - np.maximum(powers - harvest, 0.0) / eta
        )
    )


def _root_sum(powers, gains):
    return float(np.sum(np.sqrt(np.maximum(powers, 0.0)) * gains))


def _rebalance_one(powers, j, harvest, eta, target, p_max):
    """Power for coordinate j that restores the total state to ``target``.

    S_j is piecewise linear and strictly decreasing in p_j, so the value
    inverts in closed form; the result is clipped to [0, p_max] and may
    therefore fall short of the target (caller re-checks feasibility).
    """
    others = _total_state(powers, harvest, eta) - (
        eta * max(harvest[j] - powers[j], 0.0)
        - max(powers[j] - harvest[j], 0.0) / eta
    )
    need = target - others  # required S_j
    if need > 0:
        p_j = harvest[j] - need / eta
    else:
        p_j = harvest[j] - need * eta
    return min(max(p_j, 0.0), p_max)


def oracle_grid_search(inst, steps_per_axis=21):
    """Exhaustive feasible search on a uniform power grid, then local
    refinement.

    Refinement alternates single-coordinate moves with pair moves that
    bump one coordinate and rebalance another onto the pre-move trade
    state, shrinking the step by 10x per level; the pair moves are what
    lets the search slide along the active balance surface.
    """
    n = inst.n_raus
    if n > 4:
        raise ValueError("grid oracle is limited to 4 RAUs")
    if steps_per_axis < 11:
        raise ValueError("need at least 11 grid steps per axis")
    gains, harvest, eta, p_max = inst.gains, inst.harvest, inst.eta, inst.p_max
    axis = np.linspace(0.0, p_max, steps_per_axis)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    states = np.sum(
        eta * np.maximum(harvest - pts, 0.0)
        - np.maximum(pts - harvest, 0.0) / eta,
        axis=1,
    )
    feasible = states >= -_FEAS_SLACK
    vals = np.where(feasible, np.sqrt(pts) @ gains, -np.inf)
    best = pts[int(np.argmax(vals))].copy()

    step0 = p_max / (steps_per_axis - 1)
    best_val = _root_sum(best, gains)
    for level in range(1, 7):
        step = step0 / 10.0**level
        for _ in range(400):
            improved = False
            for i in range(n):
                for s in (step, -step):
                    trial = best.copy()
                    trial[i] = min(max(trial[i] + s, 0.0), p_max)
                    if _total_state(trial, harvest, eta) < -_FEAS_SLACK:
                        continue
                    v = _root_sum(trial, gains)
                    if v > best_val:
                        best, best_val, improved = trial, v, True
            if n > 1:
                base_state = min(_total_state(best, harvest, eta), 0.0)
                for i, j in permutations(range(n), 2):
                    trial = best.copy()
                    trial[i] = min(trial[i] + step, p_max)
                    trial[j] = _rebalance_one(trial, j, harvest, eta, base_state, p_max)
                    if _total_state(trial, harvest, eta) < -_FEAS_SLACK:
                        continue
                    v = _root_sum(trial, gains)
                    if v > best_val:
                        best, best_val, improved = trial, v, True
            if not improved:
                break
    return OracleResult(
        powers=best,
        objective=best_val**2,
        method=GRID_SEARCH,
        resolution=step0 / 1e6,
    )


def _restore_feasibility(powers, harvest, eta, p_max):
    """Pull an infeasible point back onto sum(S) >= 0.

    Shifts along the (componentwise negative) gradient of the total
    trade state -- i.e. uniformly shrinks powers at the per-RAU trade
    rates -- bisecting the shift until the balance is restored; the box
    is re-applied inside the bisection.  All-zero power is always
    feasible, so a root exists.
    """
    powers = np.clip(powers, 0.0, p_max)
    if _total_state(powers, harvest, eta) >= 0.0:
        return powers
    rate = np.where(powers > harvest, 1.0 / eta, eta)

    def shifted(t):
        return np.clip(powers - t * rate, 0.0, p_max)

    t_hi = p_max / eta
    lo, hi = 0.0, t_hi
    while hi - lo > 1e-13 * t_hi:
        mid = 0.5 * (lo + hi)
        if _total_state(shifted(mid), harvest, eta) >= 0.0:
            hi = mid
        else:
            lo = mid
    return shifted(hi)


def oracle_ascent(inst, tol=1e-10, max_iter=120):
    """Feasible ascent in q = sqrt(p) coordinates with an SLSQP polish.

    The objective is linear in q and the trade-state constraint stays
    concave, so the problem is convex there.  Adaptive-step projected
    ascent from the always-feasible start p = min(E, p_max) supplies a
    good feasible incumbent; scipy's SLSQP then polishes it.  The better
    of the two (made feasible again if needed) is returned.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    gains, harvest, eta, p_max = inst.gains, inst.harvest, inst.eta, inst.p_max
    q_max = np.sqrt(p_max)

    def feas_q(q):
        p = _restore_feasibility(q * q, harvest, eta, p_max)
        return np.sqrt(p)

    q = np.sqrt(np.minimum(harvest, p_max))
    best_q = q.copy()
    best_val = float(gains @ q)
    step = 0.25 * q_max
    stall = 0
    converged = False
    for _ in range(max_iter):
        trial = feas_q(np.clip(q + step * gains / max(np.linalg.norm(gains), 1e-300), 0.0, q_max))
        val = float(gains @ trial)
        if val > best_val:
            rel_gain = (val - best_val) / max(best_val, 1e-300)
            q, best_q, best_val = trial, trial.copy(), val
            step *= 1.3
            stall = 0 if rel_gain > tol else stall + 1
        else:
            step *= 0.5
            stall += 1
            if step < 1e-14 * (1.0 + q_max):
                converged = True
                break
        if stall >= 30:
            converged = True
            break

    def neg_obj(qv):
        return -float(gains @ qv)

    def state_q(qv):
        return _total_state(qv * qv, harvest, eta)

    def state_q_jac(qv):
        # d/dq of S(q^2): charging side slope -eta, discharging -1/eta
        return -2.0 * qv * np.where(qv * qv < harvest, eta, 1.0 / eta)

    res = minimize(
        neg_obj,
        best_q,
        jac=lambda qv: -gains,
        method="SLSQP",
        bounds=[(0.0, q_max)] * inst.n_raus,
        constraints=[{"type": "ineq", "fun": state_q, "jac": state_q_jac}],
        options={"maxiter": 400, "ftol": 1e-14},
    )
    if res.success or res.x is not None:
        cand = feas_q(np.clip(res.x, 0.0, q_max))
        if float(gains @ cand) > best_val:
            best_q, best_val = cand, float(gains @ cand)
    return OracleResult(
        powers=best_q**2,
        objective=best_val**2,
        method=PROJECTED_ASCENT,
        resolution=tol,
        converged=converged,
    )
