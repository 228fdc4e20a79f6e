"""Reference resolutions, theory constants and default tolerances.

All defaults live in :data:`TOLERANCES`; every stage takes overrides as
keyword arguments or through a ``tolerances`` mapping.

==================  ========  ====================================================
key                 default   meaning
==================  ========  ====================================================
``det``             1e-6      max |a d + sigma b conj(b(-k)) - 1| on the k grid
``sym``             1e-6      max |conj(a(-k)) - a(k)|, same for d
``wronskian``       1e-4      integral expressions vs Wronskians at the centre node
                              (the gap is O(h^2 ||q||_1^2): about 3e-4 ||q||_1^2 at
                              reference resolution)
``decay``           1e-8      max |q| allowed at the two ends of the x grid
``division``        1e-12     smallest |a|, |d| accepted when forming r1, r2
``rh_update``       1e-10     update (relative to max(|row|, |row of S|)) that stops Neumann
``rh_residual``     1e-8      max Frobenius norm of M+ - M- - M- S
``rh_max_iter``     200       Neumann iterations before the dense fallback
``roundtrip``       1e-3      relative L2 error of scatter -> reconstruct
``compare``         1e-3      L-infinity distance IST vs split step
``conservation``    1e-8      |Q(t) - Q(0)| under split step
``operator_norm``   1e-10     slack on ||P+- f|| <= ||f||
``tail``            1e-3      |a-1|, |d-1|, |b| at the ends of the k grid
``support``         1e-13     |r| below this (relative to sup|r|) counts as zero
                              when locating the edge for the sampling rule
==================  ========  ====================================================
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

from .grid import UniformGrid

SMALL_NORM_THRESHOLD = 1.0 / 6.0
#: L1 bound under which the Jost integral equations are contractions.
JOST_NORM_THRESHOLD = 1.0
#: lower bound for |a|, |d| on the real line in the small-norm regime
A_LOWER_BOUND = 1.0 - math.exp(1.0 / 3.0) / 6.0
#: bounds for |b| and |r_{1,2}| in the small-norm regime
B_UPPER_BOUND = (1.0 + math.exp(1.0 / 3.0)) / 6.0
R_UPPER_BOUND = B_UPPER_BOUND / A_LOWER_BOUND

TOLERANCES = {
    "det": 1e-6,
    "sym": 1e-6,
    "wronskian": 1e-4,
    "decay": 1e-8,
    "division": 1e-12,
    "rh_update": 1e-10,
    "rh_residual": 1e-8,
    "rh_max_iter": 200,
    "roundtrip": 1e-3,
    "compare": 1e-3,
    "conservation": 1e-8,
    "operator_norm": 1e-10,
    "tail": 1e-3,
    "support": 1e-13,
}


def tolerance(name: str, overrides=None) -> float:
    if overrides and name in overrides and overrides[name] is not None:
        return overrides[name]
    return TOLERANCES[name]


def reference_xgrid() -> UniformGrid:
    return UniformGrid(-16.0, 16.0, 512)


def reference_kgrid() -> UniformGrid:
    return UniformGrid(-24.0, 24.0, 1024)


def parallel_map(func, items, workers: int = 1) -> list:
    """Ordered map; the output never depends on ``workers``."""
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
