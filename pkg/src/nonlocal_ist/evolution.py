"""Time evolution of reflection data and the full IST solution map.

Along the flow the Jost solutions pick up the time factor of the linear
problem, which gives ``b(t;k) = b(0;k) exp(4ik^2 t)`` with ``a, d`` fixed.
Hence

    r1(t;k) = r1(0;k) exp(+4ik^2 t),    r2(t;k) = r2(0;k) exp(-4ik^2 t).

The signs agree with the linear limit: for small data ``q`` is the
Fourier inversion of ``r2`` against ``exp(-2ikx)``, and the free equation
``i q_t + q_xx = 0`` multiplies the ``exp(-2ikx)`` mode by ``exp(-4ik^2 t)``.

Evolutions compose additively: a pair stamped ``t0`` evolved by ``t``
comes back stamped ``t0 + t``.
"""

from __future__ import annotations

import warnings
from typing import Optional

import numpy as np

from . import config
from .errors import DomainError, GridError
from .grid import UniformGrid
from .reconstruction import reconstruct_q
from .scattering import (Potential, ReflectionPair, reflection_coefficients,
                         scattering_coefficients)


def support_edge(reflection: ReflectionPair, rel_tol: Optional[float] = None) -> float:
    """Largest ``|k|`` where ``|r1|`` or ``|r2|`` exceeds ``rel_tol * sup|r|``."""
    rel_tol = config.TOLERANCES["support"] if rel_tol is None else rel_tol
    sup = reflection.sup_r
    if sup == 0:
        return 0.0
    mag = np.maximum(np.abs(reflection.r1), np.abs(reflection.r2))
    k = reflection.kgrid.nodes
    return float(np.max(np.abs(k[mag > rel_tol * sup])))


def sampling_number(reflection: ReflectionPair, t: float) -> float:
    """``4 k_edge t dk``: phase change of ``exp(4ik^2 t)`` per k step at the support edge."""
    return 4.0 * support_edge(reflection) * abs(t) * reflection.kgrid.spacing


def check_sampling(reflection: ReflectionPair, t: float) -> float:
    """Raise if the evolved data would be undersampled in k."""
    value = sampling_number(reflection, t)
    if value > np.pi / 4:
        raise GridError(
            f"k grid too coarse for t = {t:g}: 4 k_edge t dk = {value:.3g} > pi/4 "
            f"(k_edge = {support_edge(reflection):.3g}, dk = {reflection.kgrid.spacing:.3g}); increase nk"
        )
    return value


def evolve_reflection(reflection: ReflectionPair, t: float, check: bool = True) -> ReflectionPair:
    """Multiply by the unimodular phases; the time stamp advances by ``t``."""
    if not np.isfinite(t) or t < 0:
        raise DomainError(f"t must be a finite number >= 0, got {t}")
    t_new = reflection.t + float(t)
    if check:
        check_sampling(reflection, t_new)
    k = reflection.kgrid.nodes
    phase = np.exp(4j * k ** 2 * t)
    meta = dict(reflection.metadata)
    meta["t"] = t_new
    return ReflectionPair(reflection.kgrid, reflection.r1 * phase, reflection.r2 * np.conj(phase),
                          t_new, reflection.sigma, reflection.small_norm, reflection.realizable, meta)


def ist_solve(q0: Potential, t: float, kgrid: Optional[UniformGrid] = None,
              xgrid: Optional[UniformGrid] = None, workers: int = 1, **rh_opts) -> Potential:
    """Scatter ``q0``, evolve the reflection data to ``t`` and reconstruct."""
    kgrid = config.reference_kgrid() if kgrid is None else kgrid
    xgrid = q0.grid if xgrid is None else xgrid
    notes = []
    if not q0.small_norm:
        msg = f"||q0||_1 = {q0.l1_norm:.4f} >= 1/6: small-norm hypothesis fails, result not covered by theory"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    data = scattering_coefficients(q0, kgrid, workers=workers)
    refl = evolve_reflection(reflection_coefficients(data), t)
    out = reconstruct_q(refl, xgrid, q0.sigma, workers=workers, **rh_opts)
    meta = dict(out.metadata)
    meta.update({"kind": "ist_solution", "t": float(t), "warnings": notes,
                 "sampling_number": sampling_number(refl, refl.t), "source": dict(q0.metadata)})
    return Potential(out.field, q0.sigma, meta)
