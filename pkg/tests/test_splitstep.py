import numpy as np
import pytest

from nonlocal_ist import (DomainError, GridError, InstabilityError, InvalidInputError, UniformGrid,
                          gaussian_potential, zero_potential)
from nonlocal_ist.splitstep import conserved_quantity, free_evolution, split_step


def test_zero(xgrid):
    q = split_step(zero_potential(xgrid), 0.5, 0.05)
    assert np.all(q.values == 0) and conserved_quantity(q) == 0


def test_even_real_q(gauss):
    Q = conserved_quantity(gauss)
    assert Q.imag == 0
    assert Q.real == pytest.approx(np.sum(gauss.values**2) * gauss.grid.spacing, rel=1e-12)


def test_q_is_real(xgrid, rng):
    # x -> -x maps Q to its conjugate, so Q is real for every q
    q = gaussian_potential(xgrid, 0.08, shift=0.5)
    assert conserved_quantity(q).real > 0
    noise = rng.standard_normal(xgrid.n) + 1j * rng.standard_normal(xgrid.n)
    Q = conserved_quantity(q.with_values(q.values * (1 + noise)))
    assert abs(Q.imag) <= 1e-15 * abs(Q)


def test_linear_exactness(shifted):
    for dt in (0.5, 0.05):
        a = split_step(shifted, 1.0, dt, nonlinear=False)
        b = free_evolution(shifted, 1.0)
        assert np.max(np.abs(a.values - b.values)) <= 1e-14


def test_small_amplitude_limit(xgrid):
    errs = []
    for eps in (0.04, 0.02, 0.01):
        q0 = gaussian_potential(xgrid, eps, shift=0.5)
        err = np.max(np.abs(split_step(q0, 0.5, 0.01).values - free_evolution(q0, 0.5).values))
        errs.append(err / eps)
    for e1, e2 in zip(errs, errs[1:]):
        assert 3.5 <= e1 / e2 <= 4.5  # relative error O(eps^2)


@pytest.mark.parametrize("shift", [0.0, 0.5])
def test_conservation(xgrid, sigma, shift):
    q0 = gaussian_potential(xgrid, 0.08, shift=shift, sigma=sigma)
    q0 = q0.with_values(q0.values * np.exp(0.3j * xgrid.nodes + 0.2j * xgrid.nodes**2))
    Q0 = conserved_quantity(q0)
    q1 = split_step(q0, 1.0, 1e-3)
    assert abs(conserved_quantity(q1) - Q0) <= 1e-8


def test_strang_second_order(shifted):
    ref = split_step(shifted, 0.5, 0.05 / 8).values
    errs = [np.max(np.abs(split_step(shifted, 0.5, dt).values - ref)) for dt in (0.05, 0.025)]
    assert 3 <= errs[0] / errs[1] <= 5


def test_dealias_flag(shifted):
    a = split_step(shifted, 0.2, 0.01)
    b = split_step(shifted, 0.2, 0.01, dealias=True)
    assert b.metadata["dealias"] and np.max(np.abs(a.values - b.values)) < 1e-8


def test_input_validation(shifted):
    with pytest.raises(GridError):
        split_step(gaussian_potential(UniformGrid(-10, 12, 256), 0.08), 0.1, 0.01)
    with pytest.raises(InvalidInputError):
        split_step(shifted, 0.1, 0.03)
    with pytest.raises(DomainError):
        split_step(shifted, 0.1, 0.0)
    with pytest.raises(DomainError):
        split_step(shifted, -0.1, 0.01)


def test_blowup_detected(xgrid):
    q0 = gaussian_potential(xgrid, 1.0, shift=1.0)
    q0 = q0.with_values(3e3 * q0.values * np.exp(1j * xgrid.nodes))
    with pytest.raises(InstabilityError):
        split_step(q0, 1.0, 0.01)
