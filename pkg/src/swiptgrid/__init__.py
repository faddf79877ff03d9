"""Power allocation for SWIPT distributed antenna systems that trade
harvested energy through a smart grid under a no-deficit constraint."""

from ._kernels import BACKEND
from .allocator import (
    Allocation,
    Instance,
    TradePlan,
    objective_value,
    optimal_allocation,
    profitable_full_power_test,
    solve_kappa,
    threshold_power,
    trade_split,
    trade_state,
)
from .baselines import greedy_allocation, waterfilling_allocation
from .channel import (
    ChannelRealization,
    EffectiveGains,
    dmrt_beamformer,
    effective_gains,
    generate_realization,
)
from .metrics import (
    SwiptMetrics,
    ps_ratio_for_wet,
    rate_energy_curve,
    wet_energy,
    wit_rate,
)
from .oracle import OracleResult, oracle_ascent, oracle_grid_search

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "BACKEND",
    "ChannelRealization",
    "EffectiveGains",
    "Instance",
    "OracleResult",
    "SwiptMetrics",
    "TradePlan",
    "dmrt_beamformer",
    "effective_gains",
    "generate_realization",
    "greedy_allocation",
    "objective_value",
    "optimal_allocation",
    "oracle_ascent",
    "oracle_grid_search",
    "profitable_full_power_test",
    "ps_ratio_for_wet",
    "rate_energy_curve",
    "solve_kappa",
    "threshold_power",
    "trade_split",
    "trade_state",
    "waterfilling_allocation",
    "wet_energy",
    "wit_rate",
]
