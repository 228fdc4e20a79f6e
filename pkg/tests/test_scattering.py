import numpy as np
import pytest
from scipy.linalg import expm

from nonlocal_ist import (A_LOWER_BOUND, DivisionHazardError, DomainError, GridError, InvalidInputError,
                          ScatteringData, UniformGrid, box_potential, compute_s_fields, gaussian_potential,
                          march_jost, no_resonance_check, reflection_coefficients, scattering_coefficients,
                          zero_potential)
from nonlocal_ist.config import R_UPPER_BOUND
from nonlocal_ist.scattering import JOST_KINDS, Potential, jost_traces, large_k_residual
from nonlocal_ist.grid import SampledField


def box_oracle(k, amp=0.1, sigma=1):
    """Transfer matrices of the normalised equations across [-1, 0] and [0, 1].

    On [-1, 0] only conj(q(-x)) = amp is active, on [0, 1] only q = amp.
    Returns phi_minus at x = 1 and a, b, d.
    """
    A_phi = lambda q, p: np.array([[0, q], [-sigma * p, 2j * k]])  # noqa: E731
    A_psi = lambda q, p: np.array([[-2j * k, q], [-sigma * p, 0]])  # noqa: E731
    phi = expm(A_phi(amp, 0)) @ expm(A_phi(0, amp)) @ np.array([1, 0])
    psi = expm(A_psi(amp, 0)) @ expm(A_psi(0, amp)) @ np.array([0, 1])
    a = phi[0]
    b = np.exp(-2j * k) * phi[1]  # e^{-2ikx} v(x) is constant once q vanishes
    d = psi[1]
    return phi, a, b, d


def test_box_oracle_closed_form_at_zero():
    phi, a, b, d = box_oracle(0.0)
    assert np.allclose(phi, [0.99, -0.1]) and np.isclose(a, 0.99) and np.isclose(b, -0.1) and np.isclose(d, 1)


def test_potential_basics(xgrid):
    q = gaussian_potential(xgrid, 0.08)
    assert q.l1_norm == pytest.approx(0.08 * np.sqrt(np.pi), abs=1e-10)
    assert q.small_norm and q.decayed
    assert not gaussian_potential(xgrid, 0.2).small_norm
    with pytest.raises(InvalidInputError):
        Potential(q.field, sigma=2)
    wide = gaussian_potential(UniformGrid(-2, 2, 64), 0.08)
    assert not wide.decayed
    with pytest.raises(InvalidInputError):
        march_jost(wide, 0.0, "phi_minus")


def test_box_potential_l1(box_grid):
    assert box_potential(box_grid, 0.1).l1_norm == pytest.approx(0.1, abs=1e-14)


def test_march_zero_potential(xgrid):
    q = zero_potential(xgrid)
    for k in (-3.0, 0.0, 7.5):
        tr = march_jost(q, k, "phi_minus")
        assert np.array_equal(tr.values, np.tile([1, 0], (xgrid.n, 1)))
    tr = march_jost(q, 2.0, "psi_plus")
    assert np.array_equal(tr.values, np.tile([0, 1], (xgrid.n, 1)))


def test_march_box_at_zero(box_grid):
    q = box_potential(box_grid, 0.1)
    tr = march_jost(q, 0.0, "phi_minus")
    i1 = np.argmin(np.abs(box_grid.nodes - 1.0))
    assert np.allclose(tr.values[i1], [0.99, -0.1], atol=1e-6)
    assert np.allclose(tr.start_value, [1, 0])


@pytest.mark.parametrize("k", [0.5, 2.0, -1.5])
def test_march_box_transfer_matrix(box_grid, k):
    q = box_potential(box_grid, 0.1)
    phi, a, b, d = box_oracle(k)
    i1 = np.argmin(np.abs(box_grid.nodes - 1.0))
    assert np.allclose(march_jost(q, k, "phi_minus").values[i1], phi, atol=1e-6)


def test_march_box_first_order_at_jumps():
    # the step next to a jump sees the half value, an O(h) local error
    phi, *_ = box_oracle(3.0)
    errs = []
    for n in (1025, 2049, 4097):
        g = UniformGrid(-2, 2, n)
        i1 = np.argmin(np.abs(g.nodes - 1.0))
        errs.append(np.linalg.norm(march_jost(box_potential(g, 0.1), 3.0, "phi_minus").values[i1] - phi))
    for e1, e2 in zip(errs, errs[1:]):
        assert 1.6 <= e1 / e2 <= 2.5


def test_march_smooth_second_order():
    def a_at(n):
        g = UniformGrid(-8, 8, n)
        return march_jost(gaussian_potential(g, 0.08, shift=0.3), 2.0, "phi_minus").values[-1, 0]

    ref = a_at(16 * 256 + 1)
    errs = [abs(a_at(m * 256 + 1) - ref) for m in (1, 2, 4)]
    for e1, e2 in zip(errs, errs[1:]):
        assert 3 <= e1 / e2 <= 5


def test_half_plane_domain(gauss):
    march_jost(gauss, 1.0 + 0.5j, "phi_minus")
    march_jost(gauss, 1.0 + 0.5j, "psi_plus")
    march_jost(gauss, 1.0 - 0.5j, "phi_plus")
    march_jost(gauss, 1.0 - 0.5j, "psi_minus")
    for which, k in (("phi_minus", -0.5j), ("psi_plus", -0.5j), ("phi_plus", 0.5j), ("psi_minus", 0.5j)):
        with pytest.raises(DomainError):
            march_jost(gauss, k, which)
    with pytest.raises(InvalidInputError):
        march_jost(gauss, 0.0, "chi_minus")


def test_march_needs_symmetric_grid():
    q = gaussian_potential(UniformGrid(-10, 12, 256), 0.08)
    with pytest.raises(GridError):
        march_jost(q, 0.0, "phi_minus")


def test_vectorised_march_matches_scalar(gauss):
    ks = np.array([-2.0, 0.3, 5.0])
    many = jost_traces(gauss, ks, "psi_minus")
    for j, k in enumerate(ks):
        assert np.array_equal(many[:, :, j], march_jost(gauss, k, "psi_minus").values)


@pytest.mark.parametrize("which", JOST_KINDS)
def test_large_k_limits(which, sigma):
    # fine grid: the discrete march resolves the tail only while k h << 1
    g = UniformGrid(-6, 6, 2**15 + 1)
    q = gaussian_potential(g, 0.08, shift=0.3, sigma=sigma)
    r50, r100 = large_k_residual(q, 50.0, which), large_k_residual(q, 100.0, which)
    assert r100 < r50
    assert 1.6 < r50 / r100 < 2.4  # O(1/k)


def test_s_fields(xgrid):
    z = compute_s_fields(zero_potential(xgrid))
    assert all(np.all(f == 0) for f in (z.s1_minus, z.s1_plus, z.s2_minus, z.s2_plus))
    q = gaussian_potential(xgrid, 0.08)
    s = compute_s_fields(q)
    l2sq = 0.08**2 * np.sqrt(np.pi / 2)
    assert abs(s.s1_minus[-1] - l2sq) < 1e-12
    assert s.s1_minus[0] == 0 and s.s1_plus[-1] == 0
    diff = s.s1_minus - s.s1_plus
    assert np.max(np.abs(diff - diff[0])) < 1e-10
    with pytest.raises(GridError):
        compute_s_fields(gaussian_potential(UniformGrid(-10, 12, 256), 0.08))


def test_zero_scattering(xgrid, kgrid):
    data = scattering_coefficients(zero_potential(xgrid), kgrid)
    assert np.all(data.a == 1) and np.all(data.b == 0) and np.all(data.d == 1) and np.all(data.c == 0)
    refl = reflection_coefficients(data)
    assert np.all(refl.r1 == 0) and np.all(refl.r2 == 0) and refl.sup_r == 0 and refl.t == 0


def test_box_scattering_at_zero(box_grid):
    kg = UniformGrid(-1, 1, 17)  # node at k = 0
    data = scattering_coefficients(box_potential(box_grid, 0.1), kg)
    i0 = 8
    assert abs(data.a[i0] - 0.99) < 1e-6 and abs(data.b[i0] + 0.1) < 1e-6 and abs(data.d[i0] - 1) < 1e-6
    assert abs(data.a[i0] * data.d[i0] + data.b[i0] * np.conj(data.b[kg.n - 1 - i0]) - 1) < 1e-8
    refl = reflection_coefficients(data)
    assert abs(refl.r1[i0] - (-0.1 / 0.99)) < 1e-6 and abs(refl.r2[i0] + 0.1) < 1e-6


@pytest.mark.parametrize("k", [0.7, -2.5])
def test_box_scattering_transfer_matrix(box_grid, k):
    kg = UniformGrid(-abs(k), abs(k), 16)
    data = scattering_coefficients(box_potential(box_grid, 0.1), kg)
    j = 0 if k < 0 else kg.n - 1
    _, a, b, d = box_oracle(kg.nodes[j])
    assert abs(data.a[j] - a) < 1e-6 and abs(data.b[j] - b) < 1e-6 and abs(data.d[j] - d) < 1e-6


def test_gaussian_identities(sigma, xgrid, kgrid):
    for shift in (0.0, 0.5):
        data = scattering_coefficients(gaussian_potential(xgrid, 0.08, shift, sigma=sigma), kgrid)
        assert data.det_residual <= 1e-6 and not data.flagged
        assert data.sym_residual_a <= 1e-6 and data.sym_residual_d <= 1e-6
        assert data.wronskian_residual <= 1e-4
        assert data.tail_residual <= 1e-3
        assert np.allclose(data.c, -sigma * np.conj(data.b[::-1]))


def test_wronskian_gap_second_order():
    gaps = []
    for nx in (512, 1024):
        q = gaussian_potential(UniformGrid(-16, 16, nx), 0.08)
        gaps.append(scattering_coefficients(q, UniformGrid(-24, 24, 128)).wronskian_residual)
    assert 3 <= gaps[0] / gaps[1] <= 5


def test_workers_bitwise_identical(gauss, kgrid):
    one = scattering_coefficients(gauss, kgrid, workers=1, chunk=100)
    three = scattering_coefficients(gauss, kgrid, workers=3, chunk=100)
    assert np.array_equal(one.a, three.a) and np.array_equal(one.b, three.b) and np.array_equal(one.d, three.d)


def test_asymmetric_kgrid_rejected(gauss):
    with pytest.raises(GridError):
        scattering_coefficients(gauss, UniformGrid(-10, 24, 128))


def test_reflection_small_norm_bound(gauss_refl):
    assert gauss_refl.sup_r <= R_UPPER_BOUND < 1
    assert gauss_refl.realizable and gauss_refl.small_norm


def test_division_hazard(kgrid):
    n = kgrid.n
    a = np.ones(n, complex)
    a[n // 2] = 1e-13
    a[n // 2 - 1] = 1e-13
    data = ScatteringData(kgrid, a, np.zeros(n), np.ones(n))
    with pytest.raises(DivisionHazardError):
        reflection_coefficients(data)


def test_no_resonance_zero(xgrid, kgrid):
    q = zero_potential(xgrid)
    rep = no_resonance_check(q, scattering_coefficients(q, kgrid))
    assert rep.overall and rep["min_abs_a"].value == 1 and rep["min_abs_d"].value == 1


def test_no_resonance_small(gauss, gauss_data):
    rep = no_resonance_check(gauss, gauss_data)
    assert rep.overall and rep["min_abs_a"].value >= A_LOWER_BOUND
    assert rep["l1_norm_below_1_6"].passed and not rep.warnings


def test_no_resonance_large(xgrid, kgrid):
    q = gaussian_potential(xgrid, 0.2)
    assert q.l1_norm == pytest.approx(0.2 * np.sqrt(np.pi), abs=1e-9)
    data = scattering_coefficients(q, kgrid)
    rep = no_resonance_check(q, data)
    assert not rep["l1_norm_below_1_6"].passed and rep.warnings
    reflection_coefficients(data)  # downstream still permitted


def test_reflection_pair_validation(kgrid):
    with pytest.raises(InvalidInputError):
        from nonlocal_ist import ReflectionPair
        ReflectionPair(kgrid, np.zeros(3), np.zeros(3))
    with pytest.raises(GridError):
        from nonlocal_ist import ReflectionPair
        ReflectionPair(UniformGrid(0, 1, 16), np.zeros(16), np.zeros(16))


def test_potential_field_roundtrip(xgrid):
    f = SampledField(xgrid, np.exp(-xgrid.nodes**2))
    q = Potential(f, -1, {"kind": "custom"})
    assert q.with_values(2 * f.values).values[256] == pytest.approx(2 * f.values[256])
