"""Invariant suite and empirical Lipschitz probes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import config
from .errors import ConfigurationError, InvalidInputError
from .grid import SampledField, UniformGrid, weighted_norm
from .plemelj import operator_norm_check, project
from .reconstruction import reconstruct_q
from .report import DiagnosticsReport, info, upper
from .rh import positivity_diagnostics
from .scattering import (Potential, ReflectionPair, ScatteringData, no_resonance_check,
                         reflection_coefficients, scattering_coefficients)

CHECKS = ("determinant", "symmetry", "wronskian", "tail", "no_resonance", "positivity", "operator_norm")


@dataclass
class SuiteInputs:
    """Whatever is available; missing stages are computed from earlier ones when possible."""

    potential: Optional[Potential] = None
    data: Optional[ScatteringData] = None
    reflection: Optional[ReflectionPair] = None
    kgrid: Optional[UniformGrid] = None
    probe: Optional[SampledField] = None


def _need(value, what, check):
    if value is None:
        raise ConfigurationError(f"check {check!r} needs {what}, which was not supplied")
    return value


def _tail_items(data: ScatteringData, tol: float) -> list:
    """Tail values at the grid edge and the ``C/k`` fit through an interior tail point."""
    k = data.kgrid.nodes
    i_max = int(np.argmax(k))
    i_mid = int(np.argmin(np.abs(k - k[i_max] / 2)))
    items = []
    for name, arr, target in (("a", data.a, 1.0), ("d", data.d, 1.0), ("b", data.b, 0.0)):
        # both edges: values at k_max and -k_max
        end = max(abs(arr[i_max] - target), abs(arr[0] - target))
        mid = max(abs(arr[i_mid] - target), abs(arr[len(k) - 1 - i_mid] - target))
        C = mid * abs(k[i_mid])
        items.append(upper(f"tail_{name}", end, tol, "a, d -> 1 and b -> 0 as |k| -> infinity",
                           note=f"fitted C = {C:.3g}, C/k_max = {C / k[i_max]:.3g}"))
    return items


def run_invariant_suite(inputs: SuiteInputs, selection: Optional[Iterable[str]] = None,
                        tolerances=None, workers: int = 1) -> DiagnosticsReport:
    """Evaluate the selected structural checks (all of :data:`CHECKS` by default)."""
    selection = list(CHECKS if selection is None else selection)
    unknown = [s for s in selection if s not in CHECKS]
    if unknown:
        raise ConfigurationError(f"unknown checks {unknown}; available: {CHECKS}")

    data, refl = inputs.data, inputs.reflection
    needs_data = {"determinant", "symmetry", "wronskian", "tail", "no_resonance"}
    if data is None and inputs.potential is not None and (needs_data & set(selection)
                                                          or (refl is None and "positivity" in selection)):
        kgrid = inputs.kgrid or config.reference_kgrid()
        data = scattering_coefficients(inputs.potential, kgrid, workers=workers)
    if refl is None and data is not None and ({"positivity", "operator_norm"} & set(selection)):
        refl = reflection_coefficients(data)

    tol = lambda name: config.tolerance(name, tolerances)  # noqa: E731
    rep = DiagnosticsReport()
    for check in selection:
        if check == "determinant":
            d = _need(data, "scattering data or a potential", check)
            rep.add(upper("determinant", d.det_residual, tol("det"), "a d + sigma b conj(b(-k)) = 1"))
        elif check == "symmetry":
            d = _need(data, "scattering data or a potential", check)
            rep.add(upper("symmetry_a", d.sym_residual_a, tol("sym"), "conj(a(-conj k)) = a(k)"))
            rep.add(upper("symmetry_d", d.sym_residual_d, tol("sym"), "conj(d(-conj k)) = d(k)"))
        elif check == "wronskian":
            d = _need(data, "scattering data or a potential", check)
            rep.add(upper("wronskian_vs_integral", d.wronskian_residual, tol("wronskian"),
                          "Wronskian and integral expressions of a, b, d"))
        elif check == "tail":
            d = _need(data, "scattering data or a potential", check)
            for item in _tail_items(d, tol("tail")):
                rep.add(item)
        elif check == "no_resonance":
            q = _need(inputs.potential, "a potential", check)
            rep.extend(no_resonance_check(q, _need(data, "scattering data", check)))
        elif check == "positivity":
            r = _need(refl, "reflection data or a potential", check)
            rep.extend(positivity_diagnostics(r).to_report(r.sup_r))
        elif check == "operator_norm":
            field = inputs.probe
            if field is None:
                r = _need(refl, "a probe field, reflection data or a potential", check)
                if r.sup_r > 0:
                    field = SampledField(r.kgrid, r.r1 if np.any(r.r1) else r.r2)
                else:
                    rng = np.random.default_rng(0)
                    field = SampledField(r.kgrid, rng.standard_normal(r.kgrid.n) + 1j * rng.standard_normal(r.kgrid.n))
            ratio = operator_norm_check(field)
            rep.add(upper("plemelj_norm_ratio", ratio, 1.0 + tol("operator_norm"), "||P+- f|| <= ||f|| (C_2 = 1)"))
            p = project(field.values, field.grid, "+")
            m = project(field.values, field.grid, "-")
            # the halved zero mode is the only overlap between the two ranges
            zero = abs(np.sum(field.values)) ** 2 / field.grid.n / 2
            total = np.linalg.norm(field.values) ** 2
            split = abs(np.linalg.norm(p) ** 2 + np.linalg.norm(m) ** 2 + zero - total) / total
            rep.add(upper("plemelj_orthogonal_split", split, tol("operator_norm"), "P+ and P- complementary",
                          "relative, zero mode accounted for"))
    if inputs.potential is not None and not inputs.potential.small_norm and "no_resonance" not in selection:
        rep.warnings.append(f"||q||_1 = {inputs.potential.l1_norm:.4f} >= 1/6: small-norm hypothesis fails")
    return rep


def _reflection_norm(a: ReflectionPair, b: ReflectionPair) -> float:
    return sum(weighted_norm(SampledField(a.kgrid, x - y), "H_script")
               for x, y in ((a.r1, b.r1), (a.r2, b.r2)))


def lipschitz_probe(q_a: Potential, q_b: Potential, kgrid: Optional[UniformGrid] = None,
                    inverse: bool = True, workers: int = 1) -> DiagnosticsReport:
    """Measured ratios ``||dr||_H / ||dq||_H11`` and ``||dq_rec||_H11 / ||dr||_H``.

    ``H`` is the reflection-space norm ``H_script`` applied to ``r1`` and
    ``r2`` and summed.
    """
    if q_a.grid != q_b.grid:
        raise InvalidInputError("both potentials must live on the same x grid")
    dq = q_a.field.with_values(q_a.values - q_b.values)
    dq_norm = weighted_norm(dq, "H11")
    if dq_norm == 0:
        raise InvalidInputError("identical potentials: Lipschitz ratio undefined")
    kgrid = config.reference_kgrid() if kgrid is None else kgrid
    r_a = reflection_coefficients(scattering_coefficients(q_a, kgrid, workers=workers))
    r_b = reflection_coefficients(scattering_coefficients(q_b, kgrid, workers=workers))
    dr = _reflection_norm(r_a, r_b)
    rep = DiagnosticsReport()
    rep.add(info("forward_ratio", dr / dq_norm, "potential -> reflection map is Lipschitz"))
    if inverse:
        if dr == 0:
            raise InvalidInputError("identical reflection data: inverse ratio undefined")
        rec_a = reconstruct_q(r_a, q_a.grid, workers=workers)
        rec_b = reconstruct_q(r_b, q_b.grid, workers=workers)
        drec = weighted_norm(q_a.field.with_values(rec_a.values - rec_b.values), "H11")
        rep.add(info("inverse_ratio", drec / dr, "reflection -> potential map is Lipschitz"))
    for q in (q_a, q_b):
        if not q.small_norm:
            rep.warnings.append(f"||q||_1 = {q.l1_norm:.4f} >= 1/6: outside the small-norm regime")
    return rep
