"""Experiment engine: instance I/O, Monte-Carlo sweeps, policy comparison
and oracle verification.

All commands are pure functions of their inputs and the seed.  Per-trial
randomness comes from ``numpy.random.SeedSequence([seed, i_n, i_m,
trial])`` where i_n/i_m index the swept system size: every (n, m, trial)
triple owns a private stream.  Runs are therefore reproducible byte for
byte, all policies inside one trial see the same realization, and sweep
points that differ only in p_max or eta are paired on identical
realizations (those parameters do not enter the channel or harvest
distribution).  Within a trial the draw order is distances, fading,
harvest.

CSV output is UTF-8, comma-separated, header row first, floats printed
with 12 significant digits and no locale formatting.
"""

import csv
import io
import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import metrics, oracle
from .allocator import (
    CHARGING,
    DISCHARGING,
    FULL_POWER,
    NEUTRAL,
    PASSIVE,
    ZERO_POWER,
    Allocation,
    Instance,
    optimal_allocation,
    profitable_full_power_test,
)
from .baselines import greedy_allocation, waterfilling_allocation
from .channel import effective_gains, generate_realization

SEED_ENV_VAR = "SWIPTGRID_SEED"
DEFAULT_SEED = 12345

POLICIES = {
    "optimal": optimal_allocation,
    "greedy": greedy_allocation,
    "waterfilling": waterfilling_allocation,
}

# rho/xi/noise defaults used for the WIT/WET columns and the region command.
DEFAULT_RHO = 0.5
DEFAULT_XI = 0.5
DEFAULT_SIGMA2 = 1.0
DEFAULT_TAU2 = 1.0

SWEEP_COLUMNS = [
    "n", "m", "p_max", "eta", "policy",
    "mean_objective", "mean_wit", "mean_wet", "trials", "seed",
]
COMPARE_COLUMNS = SWEEP_COLUMNS + ["dominance_violations"]
REGION_COLUMNS = ["rho", "wit", "wet"]


class InstanceFormatError(ValueError):
    """Raised when an instance document violates the schema."""


def default_seed():
    return int(os.environ.get(SEED_ENV_VAR, DEFAULT_SEED))


@dataclass
class ExperimentConfig:
    """Monte-Carlo sweep description (JSON-loadable)."""

    n_values: list
    m_values: list = field(default_factory=lambda: [4])
    p_max_values: list = field(default_factory=lambda: [5.0])
    eta_values: list = field(default_factory=lambda: [0.8])
    trials: int = 1000
    harvest_low: float = 1.0
    harvest_high: float = 8.0
    dist_low: float = 10.0
    dist_high: float = 50.0
    alpha: float = 2.0
    seed: int | None = None
    policies: list = field(default_factory=lambda: ["optimal"])

    def __post_init__(self):
        if self.seed is None:
            self.seed = default_seed()
        self.seed = int(self.seed)
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.n_values or any(int(n) < 1 for n in self.n_values):
            raise ValueError("n_values must be nonempty positive counts")
        if not self.m_values or any(int(m) < 1 for m in self.m_values):
            raise ValueError("m_values must be nonempty positive counts")
        if any(p <= 0 for p in self.p_max_values):
            raise ValueError("p_max_values must be positive")
        if any(not 0 < e <= 1 for e in self.eta_values):
            raise ValueError("eta_values must lie in (0, 1]")
        if not 0 <= self.harvest_low <= self.harvest_high:
            raise ValueError("need 0 <= harvest_low <= harvest_high")
        if not 0 < self.dist_low <= self.dist_high:
            raise ValueError("need 0 < dist_low <= dist_high")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        for p in self.policies:
            if p not in POLICIES:
                raise ValueError(f"unknown policy {p!r}")

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ValueError("config document must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        if "n_values" not in doc:
            raise ValueError("config requires n_values")
        return cls(**doc)


def _require(cond, path, message):
    if not cond:
        raise InstanceFormatError(f"{path}: {message}")


def load_instance(path_or_doc):
    """Build an Instance from a JSON file path or parsed document.

    The document carries ``harvest``, ``p_max`` and ``eta`` plus exactly
    one of ``gains`` (direct, descending) or ``channel`` (generative:
    m, dist_low, dist_high, alpha, seed).  Returns (instance, order)
    where order[k] is the physical RAU behind row k (identity for
    direct-gain documents).
    """
    if isinstance(path_or_doc, (str, os.PathLike)):
        with open(path_or_doc, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InstanceFormatError(f"$: not valid JSON ({exc})") from exc
    else:
        doc = path_or_doc
    _require(isinstance(doc, dict), "$", "instance document must be a JSON object")
    for key in ("harvest", "p_max", "eta"):
        _require(key in doc, f"$.{key}", "required field missing")
    has_gains = "gains" in doc
    has_channel = "channel" in doc
    _require(
        has_gains != has_channel,
        "$",
        "exactly one of 'gains' or 'channel' is required",
    )
    harvest = doc["harvest"]
    _require(
        isinstance(harvest, list) and len(harvest) >= 1,
        "$.harvest",
        "must be a nonempty array",
    )
    for i, e in enumerate(harvest):
        _require(isinstance(e, (int, float)) and not isinstance(e, bool), f"$.harvest[{i}]", "must be a number")
        _require(e >= 0, f"$.harvest[{i}]", "must be nonnegative")
        _require(e == e, f"$.harvest[{i}]", "must not be NaN")
    harvest = np.asarray(harvest, dtype=float)
    n = harvest.size

    if has_gains:
        gains = doc["gains"]
        _require(isinstance(gains, list), "$.gains", "must be an array")
        _require(len(gains) == n, "$.gains", "length must match harvest")
        for i, g in enumerate(gains):
            _require(isinstance(g, (int, float)) and not isinstance(g, bool), f"$.gains[{i}]", "must be a number")
            _require(g == g, f"$.gains[{i}]", "must not be NaN")
            _require(g > 0, f"$.gains[{i}]", "must be strictly positive")
        gains = np.asarray(gains, dtype=float)
        _require(
            bool(np.all(np.diff(gains) <= 0)),
            "$.gains",
            "must be sorted in descending order",
        )
        order = np.arange(n)
    else:
        ch = doc["channel"]
        _require(isinstance(ch, dict), "$.channel", "must be an object")
        for key in ("m", "dist_low", "dist_high", "alpha", "seed"):
            _require(key in ch, f"$.channel.{key}", "required field missing")
        real = generate_realization(
            n, int(ch["m"]), float(ch["dist_low"]), float(ch["dist_high"]),
            float(ch["alpha"]), int(ch["seed"]),
        )
        eg = effective_gains(real)
        gains = eg.gains
        order = eg.order
        harvest = harvest[order]

    try:
        inst = Instance(
            gains=gains, harvest=harvest,
            p_max=float(doc["p_max"]), eta=float(doc["eta"]),
        )
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"$: {exc}") from exc
    return inst, order


def allocation_document(alloc: Allocation, order=None):
    """JSON-serializable result document for one allocation."""
    doc = {
        "scenario": alloc.scenario,
        "powers": alloc.powers.tolist(),
        "charge": alloc.trade.charge.tolist(),
        "discharge": alloc.trade.discharge.tolist(),
        "states": alloc.trade.states.tolist(),
        "sum_state": alloc.trade.total_state,
        "kappa_g": alloc.kappa_g,
        "kappa_l": alloc.kappa_l,
        "classification": list(alloc.classification),
        "objective": alloc.objective,
    }
    if order is not None:
        doc["order"] = [int(i) for i in order]
    return doc


def run_solve(instance_file, out_path=None):
    """Solve one instance file; write/return the result document."""
    inst, order = load_instance(instance_file)
    alloc = optimal_allocation(inst)
    doc = allocation_document(alloc, order=order)
    text = json.dumps(doc, indent=2) + "\n"
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return doc


def _fmt(value):
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _write_csv(path, columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def _trial_instance(cfg: ExperimentConfig, n, m, p_max, eta, key):
    """Instance for one (n, m, trial) stream key."""
    rng = np.random.default_rng(np.random.SeedSequence(key))
    real = generate_realization(n, m, cfg.dist_low, cfg.dist_high, cfg.alpha, rng)
    harvest = rng.uniform(cfg.harvest_low, cfg.harvest_high, size=n)
    eg = effective_gains(real)
    return Instance(gains=eg.gains, harvest=harvest[eg.order], p_max=p_max, eta=eta)


def _combo_iter(cfg: ExperimentConfig):
    for i_n, n in enumerate(cfg.n_values):
        for i_m, m in enumerate(cfg.m_values):
            for i_p, p_max in enumerate(cfg.p_max_values):
                for i_eta, eta in enumerate(cfg.eta_values):
                    yield (i_n, i_m, i_p, i_eta), (int(n), int(m), float(p_max), float(eta))


def _mean_metrics(objectives):
    arr = np.asarray(objectives)
    wits = [metrics.wit_rate(o, DEFAULT_RHO, DEFAULT_SIGMA2, DEFAULT_TAU2) for o in arr]
    wets = [metrics.wet_energy(o, DEFAULT_RHO, DEFAULT_XI, DEFAULT_SIGMA2) for o in arr]
    return float(arr.mean()), float(np.mean(wits)), float(np.mean(wets))


# Refuse configs whose total RAU-trial volume would run for hours.
MAX_SWEEP_CELLS = 50_000_000


def _check_config_scale(cfg: ExperimentConfig):
    combos = (
        len(cfg.n_values) * len(cfg.m_values) * len(cfg.p_max_values) * len(cfg.eta_values)
    )
    cells = combos * cfg.trials * len(cfg.policies) * max(int(n) for n in cfg.n_values)
    if cells > MAX_SWEEP_CELLS:
        raise ValueError(
            f"config asks for ~{cells:.2e} RAU-trials "
            f"({combos} points x {cfg.trials} trials x {len(cfg.policies)} policies); "
            f"the limit is {MAX_SWEEP_CELLS:.0e}"
        )


def run_sweep(cfg: ExperimentConfig, out_path=None):
    """Monte-Carlo averages per configuration point and policy (CSV)."""
    _check_config_scale(cfg)
    rows = []
    for (i_n, i_m, i_p, i_eta), (n, m, p_max, eta) in _combo_iter(cfg):
        per_policy = {p: [] for p in cfg.policies}
        for trial in range(cfg.trials):
            inst = _trial_instance(
                cfg, n, m, p_max, eta, [cfg.seed, i_n, i_m, trial]
            )
            for policy in cfg.policies:
                per_policy[policy].append(POLICIES[policy](inst).objective)
        for policy in cfg.policies:
            mo, mwit, mwet = _mean_metrics(per_policy[policy])
            rows.append([n, m, p_max, eta, policy, mo, mwit, mwet, cfg.trials, cfg.seed])
    return _write_csv(out_path, SWEEP_COLUMNS, rows)


def run_compare(cfg: ExperimentConfig, out_path=None):
    """Paired policy comparison; counts per-trial dominance violations.

    Every policy sees the same realizations.  A violation is a trial
    where a policy's objective exceeds the optimal policy's by more
    than 1e-9; the optimal row always reports zero.
    """
    if len(cfg.policies) < 2:
        raise ValueError("compare needs at least two policies")
    if "optimal" not in cfg.policies:
        raise ValueError("compare requires the optimal policy as the reference")
    _check_config_scale(cfg)
    rows = []
    for (i_n, i_m, i_p, i_eta), (n, m, p_max, eta) in _combo_iter(cfg):
        per_policy = {p: [] for p in cfg.policies}
        for trial in range(cfg.trials):
            inst = _trial_instance(
                cfg, n, m, p_max, eta, [cfg.seed, i_n, i_m, trial]
            )
            for policy in cfg.policies:
                per_policy[policy].append(POLICIES[policy](inst).objective)
        reference = np.asarray(per_policy["optimal"])
        for policy in cfg.policies:
            mo, mwit, mwet = _mean_metrics(per_policy[policy])
            violations = int(np.sum(np.asarray(per_policy[policy]) > reference + 1e-9))
            rows.append(
                [n, m, p_max, eta, policy, mo, mwit, mwet, cfg.trials, cfg.seed, violations]
            )
    return _write_csv(out_path, COMPARE_COLUMNS, rows)


def run_region(instance_file, n_points, out_path=None, xi=DEFAULT_XI,
               sigma2=DEFAULT_SIGMA2, tau2=DEFAULT_TAU2, q_min=None):
    """Rate-energy curve of one solved instance over the split ratio.

    Returns (csv_text, rho_for_q_min); the latter is None unless a
    minimum harvested-power demand was given.
    """
    inst, _ = load_instance(instance_file)
    alloc = optimal_allocation(inst)
    curve = metrics.rate_energy_curve(alloc.objective, xi, sigma2, tau2, n_points)
    text = _write_csv(out_path, REGION_COLUMNS, curve)
    rho = None
    if q_min is not None:
        rho = metrics.ps_ratio_for_wet(q_min, alloc.objective, xi, sigma2)
    return text, rho


def run_verify(cfg: ExperimentConfig, grid_steps=21):
    """Allocator-versus-oracle audit over random instances.

    Per configuration point, ``trials`` random instances are solved and
    checked against the structural invariants; the grid oracle runs when
    n <= 4 and the ascent oracle when n <= 32.  Returns a report dict;
    ``violations`` empty means a clean bill.
    """
    report = {
        "instances": 0,
        "grid_checked": 0,
        "ascent_checked": 0,
        "max_grid_gap": 0.0,
        "max_ascent_gap": 0.0,
        "violations": [],
    }
    for (i_n, i_m, i_p, i_eta), (n, m, p_max, eta) in _combo_iter(cfg):
        for trial in range(cfg.trials):
            inst = _trial_instance(
                cfg, n, m, p_max, eta, [cfg.seed, i_n, i_m, trial]
            )
            alloc = optimal_allocation(inst)
            report["instances"] += 1
            label = f"n={n} m={m} p_max={p_max} eta={eta} trial={trial}"
            for problem in check_allocation_invariants(inst, alloc):
                report["violations"].append(f"{label}: {problem}")
            if n <= 4:
                res = oracle.oracle_grid_search(inst, grid_steps)
                gap = abs(alloc.objective - res.objective) / max(1.0, alloc.objective)
                report["grid_checked"] += 1
                report["max_grid_gap"] = max(report["max_grid_gap"], gap)
                if gap > 1e-4:
                    report["violations"].append(f"{label}: grid oracle gap {gap:.3e}")
                if res.objective > alloc.objective + 1e-5 * (1 + alloc.objective):
                    report["violations"].append(f"{label}: grid oracle beats allocator")
            if n <= 32:
                res = oracle.oracle_ascent(inst)
                gap = abs(alloc.objective - res.objective) / max(1.0, alloc.objective)
                report["ascent_checked"] += 1
                report["max_ascent_gap"] = max(report["max_ascent_gap"], gap)
                if gap > 1e-4:
                    report["violations"].append(f"{label}: ascent oracle gap {gap:.3e}")
                if res.objective > alloc.objective + 1e-5 * (1 + alloc.objective):
                    report["violations"].append(f"{label}: ascent oracle beats allocator")
    return report


def check_allocation_invariants(inst: Instance, alloc: Allocation):
    """Structural checks every returned allocation must satisfy.

    Covers trade complementarity, the power identity, cap bounds, the
    balance/sign condition per scenario, monotone full-/zero-power
    pinning in gain order and the threshold ratio equalities.
    """
    problems = []
    n = inst.n_raus
    p, charge, discharge = alloc.powers, alloc.trade.charge, alloc.trade.discharge
    harvest, p_max, eta = inst.harvest, inst.p_max, inst.eta
    if np.any(charge * discharge != 0.0):
        problems.append("simultaneous charge and discharge")
    if not np.allclose(p, harvest + discharge - charge, rtol=0, atol=1e-12 * (1 + p_max)):
        problems.append("power identity broken")
    if np.any(p < -1e-15) or np.any(p > p_max + 1e-12):
        problems.append("cap bounds broken")
    total = alloc.trade.total_state
    if alloc.scenario == NEUTRAL:
        if abs(total) > 1e-6 * (eta * float(np.sum(harvest)) + 1.0):
            problems.append(f"trade balance off ({total:.3e})")
    else:
        if total < -1e-12:
            problems.append("profitable scenario with grid deficit")
        if not np.all(p == p_max):
            problems.append("profitable scenario without full power")
    if profitable_full_power_test(inst) != (alloc.scenario == "profitable"):
        problems.append("scenario disagrees with the full-power criterion")
    cls = alloc.classification
    for k in range(n):
        if cls[k] == FULL_POWER and harvest[k] < p_max:
            if any(cls[j] != FULL_POWER for j in range(k)):
                problems.append(f"better-gain RAU not at full power above {k}")
                break
    for k in range(n):
        if cls[k] == FULL_POWER and harvest[k] > p_max:
            if any(cls[j] != FULL_POWER for j in range(k) if harvest[j] > p_max):
                problems.append(f"better-gain surplus RAU not at full power above {k}")
                break
    zero_at = [k for k in range(n) if cls[k] == ZERO_POWER and harvest[k] > 0]
    if zero_at:
        k = min(zero_at)
        if any(cls[j] != ZERO_POWER for j in range(k + 1, n)):
            problems.append(f"worse-gain RAU not silenced below {k}")
    if alloc.kappa_g is not None:
        kg, kl = alloc.kappa_g, alloc.kappa_l
        if kl != eta**2 * kg:
            problems.append("threshold ratio is not eta**2 exactly")
        tol = 1e-9 * (1.0 + kg)
        for k in range(n):
            ratio = np.sqrt(p[k]) / inst.gains[k]
            if cls[k] == CHARGING and abs(ratio - kg) > tol:
                problems.append(f"charging RAU {k} off the upper threshold")
            elif cls[k] == DISCHARGING and abs(ratio - kl) > tol:
                problems.append(f"discharging RAU {k} off the lower threshold")
            elif cls[k] == PASSIVE and not (kl - tol <= ratio <= kg + tol):
                problems.append(f"passive RAU {k} outside the threshold band")
    return problems
