import numpy as np
import pytest

from nonlocal_ist import (GridError, InvalidInputError, ReconstructionError, ReflectionPair, UniformGrid, gaussian_potential,
                          reflection_coefficients, scattering_coefficients, zero_potential)
from nonlocal_ist.grid import trapezoid
from nonlocal_ist.reconstruction import (reconstruct_both, reconstruct_q, reconstruct_q_mirror, relative_l2,
                                         roundtrip_report)


def fourier_inversion(r, kgrid, x, sign):
    """-(sigma/pi) int r exp(sign 2ikx) dk with sigma = 1, by the trapezoid rule."""
    return -trapezoid(r[None, :] * np.exp(sign * 2j * np.outer(x, kgrid.nodes)), kgrid.spacing, axis=-1) / np.pi


def born_data(kgrid, scale=1.0, which="r2"):
    k = kgrid.nodes
    r = scale * 0.2 * np.exp(-(k - 0.3) ** 2) * np.exp(0.4j * k)
    zero = np.zeros_like(r)
    return ReflectionPair.from_arrays(kgrid, zero, r) if which == "r2" else ReflectionPair.from_arrays(kgrid, r, zero)


def test_zero_reflection(xgrid, kgrid):
    refl = ReflectionPair.from_arrays(kgrid, np.zeros(kgrid.n), np.zeros(kgrid.n))
    q, qm = reconstruct_both(refl, xgrid)
    assert np.all(q.values == 0) and np.all(qm.values == 0)


def test_born_limit_primary(xgrid, kgrid):
    refl = born_data(kgrid)
    q = reconstruct_q(refl, xgrid)
    expected = fourier_inversion(refl.r2, kgrid, xgrid.nodes, -1)
    assert np.max(np.abs(q.values - expected)) <= 1e-14
    assert q.metadata["realizable"] is False


def test_born_limit_mirror(xgrid, kgrid):
    refl = born_data(kgrid, which="r1")
    q = reconstruct_q_mirror(refl, xgrid)
    mirrored = fourier_inversion(refl.r1, kgrid, xgrid.nodes, +1)
    assert np.max(np.abs(q.values - np.conj(mirrored[::-1]))) <= 1e-14


def test_born_limit_linear_in_scale(xgrid, kgrid):
    base = reconstruct_q(born_data(kgrid), xgrid).values
    for eps in (1e-1, 1e-3, 1e-6):
        scaled = reconstruct_q(born_data(kgrid, eps), xgrid).values
        assert np.max(np.abs(scaled - eps * base)) <= 1e-13 * eps


def test_born_limit_matches_weak_potential(xgrid, kgrid):
    # a weak potential is close to the Fourier inversion of its own b
    q = gaussian_potential(xgrid, 1e-4, shift=0.5)
    refl = reflection_coefficients(scattering_coefficients(q, kgrid))
    approx = fourier_inversion(refl.r2, kgrid, xgrid.nodes, -1)
    assert relative_l2(approx, q.values, xgrid.spacing) < 1e-3


@pytest.mark.parametrize("shift", [0.0, 0.5])
def test_roundtrip_gaussian(xgrid, kgrid, shift, sigma):
    q = gaussian_potential(xgrid, 0.08, shift=shift, sigma=sigma)
    refl = reflection_coefficients(scattering_coefficients(q, kgrid))
    primary, mirror = reconstruct_both(refl, xgrid)
    h = xgrid.spacing
    assert relative_l2(primary.values, q.values, h) <= 1e-3
    assert relative_l2(mirror.values, q.values, h) <= 2e-3
    assert relative_l2(primary.values, mirror.values, h) <= 2e-3
    assert primary.sigma == sigma and primary.metadata["dense_fallbacks"] == 0


def test_roundtrip_report_zero(xgrid):
    rep = roundtrip_report(zero_potential(xgrid))
    for name in ("roundtrip_rel_l2", "mirror_rel_l2", "formula_agreement_rel_l2", "roundtrip_rel_h11"):
        assert rep[name].value == 0
    assert rep.overall


def test_roundtrip_report_fields(shifted):
    rep = roundtrip_report(shifted)
    assert rep.overall and not rep.warnings
    assert rep["roundtrip_rel_l2"].value <= 1e-3
    assert rep["max_jump_residual"].value <= 1e-8
    d = rep.to_dict()
    assert {item["name"] for item in d["items"]} >= {"roundtrip_rel_l2", "h11_over_reflection_norm"}


def test_norm_bound_ratio_stable(xgrid):
    ratios = [roundtrip_report(gaussian_potential(xgrid, A, shift=s))["h11_over_reflection_norm"].value
              for A, s in ((0.03, 0.0), (0.08, 0.0), (0.05, 0.5))]
    assert max(ratios) / min(ratios) <= 1.2


def test_sigma_mismatch(gauss_refl, xgrid):
    with pytest.raises(InvalidInputError):
        reconstruct_q(gauss_refl, xgrid, sigma=-1)


def test_asymmetric_xgrid(gauss_refl):
    with pytest.raises(GridError):
        reconstruct_q(gauss_refl, UniformGrid(-10, 12, 64))


def test_failure_names_x(monkeypatch):
    import nonlocal_ist.rh as rh

    def singular(*args):
        raise np.linalg.LinAlgError("Singular matrix")

    monkeypatch.setattr(rh, "_dense_row", singular)
    kg = UniformGrid.symmetric(8.0, 256)
    r = 2.0 * np.exp(-kg.nodes**2)
    refl = ReflectionPair.from_arrays(kg, r, r)
    xg = UniformGrid.symmetric(1.0, 16)
    with pytest.warns(RuntimeWarning), pytest.raises(ReconstructionError) as info:
        reconstruct_q(refl, xg, max_iter=3)
    assert info.value.x == xg.nodes[0]
    assert "x = -1" in str(info.value)
