"""Potential from reflection data.

Large-k expansion of the RH solution gives two independent formulas

    q(x)        = -(sigma/pi) int r2(k) exp(-2ikx) mu-^(1)(x;k) dk
    conj(q(-x)) = -(sigma/pi) int r1(k) exp(+2ikx) nu+^(2)(x;k) dk

with ``mu-^(1) = 1 + (Psi-)_11`` and ``nu+^(2) = 1 + (Psi+)_22``. The first
is the primary reconstruction, the second is kept as a cross-check. In the
Born limit (one reflection zero) both reduce to Fourier inversion of the
other reflection, which fixes the overall sign.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from . import config
from .errors import InvalidInputError, ReconstructionError, SingularEquationError
from .grid import SampledField, UniformGrid, trapezoid, weighted_norm
from .report import DiagnosticsReport, info, upper
from .rh import solve_rh_many
from .scattering import (Potential, ReflectionPair, reflection_coefficients,
                         scattering_coefficients)


def _sigma(reflection: ReflectionPair, sigma: Optional[int]) -> int:
    if sigma is None:
        return reflection.sigma
    if sigma != reflection.sigma:
        raise InvalidInputError(f"sigma = {sigma} does not match the reflection data (sigma = {reflection.sigma})")
    return sigma


def _solutions(reflection, xgrid, workers, **rh_opts):
    xgrid.require_symmetric("reconstruction x grid")
    try:
        return solve_rh_many(reflection, xgrid.nodes, workers=workers, **rh_opts)
    except SingularEquationError as exc:
        raise ReconstructionError(getattr(exc, "x", float("nan")), exc) from exc


def _metadata(reflection, formula, sols):
    return {
        "kind": "reconstruction",
        "formula": formula,
        "t": reflection.t,
        "realizable": reflection.realizable,
        "max_jump_residual": max(s.jump_residual for s in sols),
        "max_iterations": max(s.iterations for s in sols),
        "dense_fallbacks": sum(s.method == "dense" for s in sols),
    }


def reconstruct_q(reflection: ReflectionPair, xgrid: UniformGrid, sigma: Optional[int] = None,
                  workers: int = 1, solutions=None, **rh_opts) -> Potential:
    """Primary reconstruction, one RH solve per x node."""
    sigma = _sigma(reflection, sigma)
    sols = solutions if solutions is not None else _solutions(reflection, xgrid, workers, **rh_opts)
    k, h = reflection.kgrid.nodes, reflection.kgrid.spacing
    x = xgrid.nodes
    mu = np.stack([s.mu_minus_1 for s in sols])
    integrand = reflection.r2[None, :] * np.exp(-2j * np.outer(x, k)) * mu
    q = -(sigma / np.pi) * trapezoid(integrand, h, axis=-1)
    return Potential(SampledField(xgrid, q), sigma, _metadata(reflection, "primary", sols))


def reconstruct_q_mirror(reflection: ReflectionPair, xgrid: UniformGrid, sigma: Optional[int] = None,
                         workers: int = 1, solutions=None, **rh_opts) -> Potential:
    """Cross-check reconstruction through ``conj(q(-x))``."""
    sigma = _sigma(reflection, sigma)
    sols = solutions if solutions is not None else _solutions(reflection, xgrid, workers, **rh_opts)
    k, h = reflection.kgrid.nodes, reflection.kgrid.spacing
    x = xgrid.nodes
    nu = np.stack([s.nu_plus_2 for s in sols])
    integrand = reflection.r1[None, :] * np.exp(2j * np.outer(x, k)) * nu
    mirrored = -(sigma / np.pi) * trapezoid(integrand, h, axis=-1)
    q = np.conj(mirrored[::-1])
    return Potential(SampledField(xgrid, q), sigma, _metadata(reflection, "mirror", sols))


def reconstruct_both(reflection: ReflectionPair, xgrid: UniformGrid, sigma: Optional[int] = None,
                     workers: int = 1, **rh_opts):
    """Both formulas from a single set of RH solves."""
    sols = _solutions(reflection, xgrid, workers, **rh_opts)
    return (reconstruct_q(reflection, xgrid, sigma, solutions=sols),
            reconstruct_q_mirror(reflection, xgrid, sigma, solutions=sols))


def relative_l2(a: np.ndarray, b: np.ndarray, h: float) -> float:
    """``||a - b||_2 / ||b||_2`` (absolute error when ``b`` vanishes)."""
    num = np.sqrt(trapezoid(np.abs(a - b) ** 2, h).real)
    den = np.sqrt(trapezoid(np.abs(b) ** 2, h).real)
    return float(num / den) if den > 0 else float(num)


def roundtrip_report(potential: Potential, kgrid: Optional[UniformGrid] = None,
                     tolerances=None, workers: int = 1, **rh_opts) -> DiagnosticsReport:
    """Scatter, reflect and reconstruct ``potential`` by both formulas.

    Reports the relative L2 and H^{1,1} errors, the distance between the two
    reconstructions, and the ratio ``||q||_H11 / (||r1||_H + ||r2||_H)``
    (``H`` the reflection-space norm ``H_script``).
    """
    kgrid = config.reference_kgrid() if kgrid is None else kgrid
    tol = config.tolerance("roundtrip", tolerances)
    data = scattering_coefficients(potential, kgrid, workers=workers)
    refl = reflection_coefficients(data)
    primary, mirror = reconstruct_both(refl, potential.grid, potential.sigma, workers, **rh_opts)
    h = potential.grid.spacing
    q = potential.values
    rep = DiagnosticsReport()
    rep.add(upper("roundtrip_rel_l2", relative_l2(primary.values, q, h), tol, "scattering/inverse bijection"))
    rep.add(upper("mirror_rel_l2", relative_l2(mirror.values, q, h), 2 * tol, "scattering/inverse bijection"))
    rep.add(upper("formula_agreement_rel_l2", relative_l2(primary.values, mirror.values, h) if np.any(q)
                  else float(np.sqrt(trapezoid(np.abs(primary.values - mirror.values) ** 2, h).real)),
                  2 * tol, "two reconstruction formulas"))
    dq = potential.field.with_values(primary.values - q)
    qn = weighted_norm(potential.field, "H11")
    rep.add(info("roundtrip_rel_h11", weighted_norm(dq, "H11") / qn if qn > 0 else weighted_norm(dq, "H11"),
                 "scattering/inverse bijection"))
    r_norm = sum(weighted_norm(SampledField(kgrid, r), "H_script") for r in (refl.r1, refl.r2))
    rep.add(info("h11_over_reflection_norm", qn / r_norm if r_norm > 0 else 0.0,
                 "||q||_H11 <= c (||r1|| + ||r2||)"))
    rep.add(info("max_jump_residual", primary.metadata["max_jump_residual"], "plumbing"))
    if not potential.small_norm:
        rep.warnings.append(f"||q||_1 = {potential.l1_norm:.4f} >= 1/6: small-norm hypothesis fails")
    return rep
