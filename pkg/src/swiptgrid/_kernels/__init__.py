"""Kernel backend selection.

The allocator's inner loops (trade-balance evaluation, the threshold
bisection and the candidate-power rule) dominate Monte-Carlo runtime, so
they exist twice: a Cython extension (``_core``) and a numpy fallback
(``pure``).  The compiled module is preferred at import; set
``SWIPTGRID_PURE=1`` to force the fallback.  ``benchmarks/bench_kernels.py``
compares the two.
"""

import os

from .pure import TAG_CHARGING, TAG_DISCHARGING, TAG_PASSIVE

if os.environ.get("SWIPTGRID_PURE"):
    from . import pure as impl

    BACKEND = "pure"
else:
    try:
        from . import _core as impl

        BACKEND = "compiled"
    except ImportError:
        from . import pure as impl

        BACKEND = "pure"

balance_at = impl.balance_at
solve_kappa_bisect = impl.solve_kappa
candidate_powers = impl.candidate_powers
weighted_root_sum = impl.weighted_root_sum

__all__ = [
    "BACKEND",
    "TAG_CHARGING",
    "TAG_DISCHARGING",
    "TAG_PASSIVE",
    "balance_at",
    "solve_kappa_bisect",
    "candidate_powers",
    "weighted_root_sum",
]
