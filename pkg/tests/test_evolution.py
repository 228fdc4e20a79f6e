import numpy as np
import pytest

from nonlocal_ist import (DomainError, GridError, ReflectionPair, UniformGrid, gaussian_potential,
                          reflection_coefficients, scattering_coefficients, zero_potential)
from nonlocal_ist.evolution import check_sampling, evolve_reflection, ist_solve, sampling_number, support_edge
from nonlocal_ist.grid import SampledField, derivative, weighted_norm
from nonlocal_ist.reconstruction import reconstruct_q


def test_zero_data(kgrid):
    refl = ReflectionPair.from_arrays(kgrid, np.zeros(kgrid.n), np.zeros(kgrid.n))
    out = evolve_reflection(refl, 3.0)
    assert np.all(out.r1 == 0) and np.all(out.r2 == 0) and out.t == 3.0
    assert support_edge(refl) == 0 and sampling_number(refl, 100.0) == 0


def test_modulus_preserved(gauss_refl, shifted_refl):
    for refl in (gauss_refl, shifted_refl):
        for t in (0.1, 0.5):
            out = evolve_reflection(refl, t)
            assert np.max(np.abs(np.abs(out.r1) - np.abs(refl.r1))) <= 1e-15
            assert np.max(np.abs(np.abs(out.r2) - np.abs(refl.r2))) <= 1e-15
            assert out.sup_r == pytest.approx(refl.sup_r, rel=1e-14)
            for r0, rt in ((refl.r1, out.r1), (refl.r2, out.r2)):
                n0 = weighted_norm(SampledField(refl.kgrid, r0), "L21")
                nt = weighted_norm(SampledField(refl.kgrid, rt), "L21")
                assert abs(nt - n0) <= 1e-14 * n0


def test_unit_k_quarter_period():
    kg = UniformGrid(-1.0, 1.0, 16)
    refl = ReflectionPair.from_arrays(kg, np.ones(16), np.ones(16))
    out = evolve_reflection(refl, np.pi / 4, check=False)
    assert abs(out.r1[-1] + 1) < 1e-15 and abs(out.r2[-1] + 1) < 1e-15
    assert abs(out.r1[0] + 1) < 1e-15 and abs(out.r2[0] + 1) < 1e-15


def test_phase_signs(shifted_refl):
    out = evolve_reflection(shifted_refl, 0.2)
    k = shifted_refl.kgrid.nodes
    j = np.argmax(np.abs(shifted_refl.r1))
    assert np.isclose(out.r1[j], shifted_refl.r1[j] * np.exp(4j * k[j] ** 2 * 0.2), rtol=1e-14)
    assert np.isclose(out.r2[j], shifted_refl.r2[j] * np.exp(-4j * k[j] ** 2 * 0.2), rtol=1e-14)


def test_group_law(shifted_refl):
    a = evolve_reflection(evolve_reflection(shifted_refl, 0.2), 0.3)
    b = evolve_reflection(shifted_refl, 0.5)
    assert a.t == b.t == pytest.approx(0.5)
    assert np.max(np.abs(a.r1 - b.r1)) <= 1e-15 and np.max(np.abs(a.r2 - b.r2)) <= 1e-15


def test_negative_time(gauss_refl):
    for t in (-0.1, float("nan")):
        with pytest.raises(DomainError):
            evolve_reflection(gauss_refl, t)


def test_sampling_rule(gauss_refl):
    edge = support_edge(gauss_refl)
    assert 3 < edge < 24
    assert check_sampling(gauss_refl, 0.5) <= np.pi / 4
    with pytest.raises(GridError):
        evolve_reflection(gauss_refl, 5.0)
    evolve_reflection(gauss_refl, 5.0, check=False)
    # additive stamps count towards the rule
    mid = evolve_reflection(gauss_refl, 0.5)
    with pytest.raises(GridError):
        evolve_reflection(mid, 4.5)


@pytest.mark.parametrize("t", [0.1, 0.25, 0.5])
def test_derivative_growth_bound(shifted_refl, t):
    kg = shifted_refl.kgrid
    h = kg.spacing
    out = evolve_reflection(shifted_refl, t)
    d0 = np.sqrt(np.sum(np.abs(derivative(shifted_refl.r1, h)) ** 2) * h)
    dt = np.sqrt(np.sum(np.abs(derivative(out.r1, h)) ** 2) * h)
    bound = d0 + 8 * t * weighted_norm(SampledField(kg, shifted_refl.r1), "L21")
    assert dt <= bound * (1 + 1e-3)
    # the bound is not vacuous: the phase term dominates the growth
    assert dt > d0


def test_ist_zero(xgrid, kgrid):
    out = ist_solve(zero_potential(xgrid), 0.4)
    assert np.all(out.values == 0)


def test_ist_time_zero_is_roundtrip(shifted, kgrid):
    out = ist_solve(shifted, 0.0)
    refl = reflection_coefficients(scattering_coefficients(shifted, kgrid))
    direct = reconstruct_q(refl, shifted.grid)
    assert np.array_equal(out.values, direct.values)
    assert out.metadata["t"] == 0.0 and out.metadata["warnings"] == []


def test_ist_warns_outside_small_norm(xgrid):
    q = gaussian_potential(xgrid, 0.2)
    with pytest.warns(RuntimeWarning, match="small-norm"):
        out = ist_solve(q, 0.05)
    assert out.metadata["warnings"]
