"""Cauchy operator and Plemelj projections on a uniform k grid.

The projections are sharp half-line multipliers in the conjugate variable:

    P+ f = F^-1[(1_{xi>0} + 1/2 1_{xi=0}) F f]
    P- f = -F^-1[(1_{xi<0} + 1/2 1_{xi=0}) F f]

so ``P+ - P- = I`` holds exactly on the grid, both are orthogonal
projections up to the shared zero mode, and ``||P+- f|| <= ||f||``. The
Nyquist mode counts as negative (see :mod:`nonlocal_ist.grid`).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, InvalidInputError
from .grid import SampledField, UniformGrid, apply_multiplier, frequencies, trapezoid

NEAR_AXIS = 1e-8


@dataclass(frozen=True)
class HalfLineMultiplier:
    sign: int
    zero_mode_weight: float = 0.5

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InvalidInputError(f"sign must be +1 or -1, got {self.sign}")
        if self.zero_mode_weight != 0.5:
            raise InvalidInputError("the zero mode is always split evenly")

    def symbol(self, grid: UniformGrid) -> np.ndarray:
        """Multiplier in natural FFT order, sign included (so P- carries the minus)."""
        return _symbol(grid.n, grid.spacing, self.sign)


@lru_cache(maxsize=32)
def _symbol(n: int, h: float, sign: int) -> np.ndarray:
    xi = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
    if n % 2 == 0:
        xi[n // 2] = -abs(xi[n // 2])
    half = np.where(sign * xi > 0, 1.0, 0.0)
    half[0] = 0.5
    out = sign * half
    out.setflags(write=False)
    return out


def _sign(sign) -> int:
    if sign in ("+", 1, "plus"):
        return 1
    if sign in ("-", -1, "minus"):
        return -1
    raise InvalidInputError(f"sign must be '+' or '-', got {sign!r}")


def project(values, grid: UniformGrid, sign, axis: int = -1) -> np.ndarray:
    """Array-level projection along ``axis`` (no grid checks beyond size)."""
    grid.require_power_of_two()
    mult = _symbol(grid.n, grid.spacing, _sign(sign))
    return apply_multiplier(values, mult, axis=axis)


def plemelj(field: SampledField, sign) -> SampledField:
    """``P+ f`` or ``P- f`` for samples on a symmetric power-of-two k grid."""
    field.grid.require_symmetric("Plemelj projection")
    return SampledField(field.grid, project(field.values, field.grid, sign))


def cauchy_offaxis(field: SampledField, z: complex) -> complex:
    """``(1/2 pi i) int h(s)/(s - z) ds`` by the trapezoid rule, ``Im z`` away from 0."""
    z = complex(z)
    if abs(z.imag) < NEAR_AXIS:
        raise DomainError(f"|Im z| = {abs(z.imag):.2g} is too close to the axis; use plemelj instead")
    s = field.grid.nodes
    return complex(trapezoid(field.values / (s - z), field.grid.spacing) / (2j * np.pi))


def operator_norm_check(field: SampledField) -> float:
    """``max(||P+ f||, ||P- f||) / ||f||`` in the discrete l2 norm."""
    norm = np.linalg.norm(field.values)
    if norm == 0:
        raise InvalidInputError("operator norm ratio undefined for the zero field")
    plus = np.linalg.norm(project(field.values, field.grid, "+"))
    minus = np.linalg.norm(project(field.values, field.grid, "-"))
    return float(max(plus, minus) / norm)
