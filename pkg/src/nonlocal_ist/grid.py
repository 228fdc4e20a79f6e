"""Uniform grids, sampled fields, quadrature, norms and the Fourier convention.

Everything in the package that needs a discrete Fourier transform goes
through :func:`frequencies` and :func:`apply_multiplier` so the layout and
normalisation below are the only ones in use.

Fourier convention
------------------
For samples ``f_j = f(lo + j*h)``, ``j = 0..n-1``, the forward transform is
the unitary DFT::

    F_m = n**-0.5 * sum_j f_j exp(-2j*pi*j*m/n)

and the inverse is its adjoint, so ``inverse(forward(f)) == f`` and the
Euclidean norm of the sample vector is preserved. Mode ``m`` is attached to
the conjugate variable ``xi_m = 2*pi*m/(n*h)`` (``m`` taken in
``-n/2 .. n/2-1``; the Nyquist mode counts as negative). With this sign a
coefficient at ``xi > 0`` multiplies ``exp(+i*xi*k)``, which is analytic
and bounded in the upper half plane. :func:`fourier_pair` returns the
coefficients in ascending ``xi`` order (``fftshift`` layout); internal
multipliers work in natural FFT order.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .errors import GridError, InvalidInputError

MIN_NODES = 16
NORM_KINDS = ("L1", "L2", "L21", "H1", "H11", "H_script")
_DERIVATIVE_KINDS = {"H1", "H11", "H_script"}


@dataclass(frozen=True)
class UniformGrid:
    """Closed uniform grid ``lo = x_0 < ... < x_{n-1} = hi``."""

    lo: float
    hi: float
    n: int

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
            raise GridError(f"need finite lo < hi, got lo={self.lo}, hi={self.hi}")
        if int(self.n) != self.n or self.n < MIN_NODES:
            raise GridError(f"need an integer n >= {MIN_NODES}, got {self.n}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def symmetric(cls, half_width: float, n: int) -> "UniformGrid":
        return cls(-float(half_width), float(half_width), n)

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    @property
    def is_power_of_two(self) -> bool:
        return self.n & (self.n - 1) == 0

    @property
    def is_symmetric(self) -> bool:
        return abs(self.lo + self.hi) <= 1e-12 * max(abs(self.lo), abs(self.hi))

    def require_symmetric(self, what: str = "operation") -> None:
        if not self.is_symmetric:
            raise GridError(f"{what} needs a grid symmetric about 0, got [{self.lo}, {self.hi}]")

    def require_power_of_two(self) -> None:
        if not self.is_power_of_two:
            raise GridError(f"unsupported size n={self.n}: a power of two is required")

    def refined(self, factor: int = 2) -> "UniformGrid":
        """Same interval with ``factor`` times as many nodes."""
        return UniformGrid(self.lo, self.hi, self.n * factor)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "n": self.n}


@dataclass(frozen=True)
class SampledField:
    """Complex samples on a :class:`UniformGrid`.

    ``conjugate`` is only set on the output of :func:`fourier_pair` and
    remembers the grid the transform came from, so the inverse can return
    to it.
    """

    grid: UniformGrid
    values: np.ndarray
    conjugate: Optional[UniformGrid] = dc_field(default=None, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise InvalidInputError(
                f"expected {self.grid.n} samples, got array of shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("field contains NaN or Inf samples")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: UniformGrid, func) -> "SampledField":
        return cls(grid, func(grid.nodes))

    @classmethod
    def zeros(cls, grid: UniformGrid) -> "SampledField":
        return cls(grid, np.zeros(grid.n, dtype=complex))

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def reflected(self) -> np.ndarray:
        """Samples of ``f(-x)`` (index reversal; grid must be symmetric)."""
        self.grid.require_symmetric("reflection x -> -x")
        return self.values[::-1]

    def with_values(self, values) -> "SampledField":
        return SampledField(self.grid, values)

    def __mul__(self, c):
        return self.with_values(c * self.values)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def trapezoid(values, h: float, axis: int = -1):
    """Composite trapezoid rule on uniformly spaced samples (array level)."""
    return np.trapezoid(values, dx=h, axis=axis)


def cumulative_trapezoid(values, h: float, reverse: bool = False) -> np.ndarray:
    """Running trapezoid integral starting at 0 on the left (or right) end.

    With ``reverse=True`` the result is ``int_{hi}^{x}`` (so it is minus the
    integral over ``[x, hi]``).
    """
    v = np.asarray(values)
    if reverse:
        return -cumulative_trapezoid(v[::-1], h)[::-1]
    out = np.zeros_like(v, dtype=complex)
    out[1:] = np.cumsum(0.5 * h * (v[1:] + v[:-1]))
    return out


def trapezoid_integrate(field: SampledField) -> complex:
    """Trapezoid approximation of the integral of ``field`` over ``[lo, hi]``."""
    if not isinstance(field, SampledField):
        field = SampledField(*field)
    return complex(trapezoid(field.values, field.grid.spacing))


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def derivative(values, h: float) -> np.ndarray:
    """Centered differences inside, second-order one-sided at the two ends."""
    v = np.asarray(values)
    if v.shape[-1] < 3:
        raise GridError("derivative needs at least 3 nodes")
    return np.gradient(v, h, edge_order=2, axis=-1)


def weighted_norm(field: SampledField, kind: str) -> float:
    """Discrete weighted Lebesgue/Sobolev norms.

    ``L1``        int |f|
    ``L2``        (int |f|^2)^(1/2)
    ``L21``       (int <x>^2 |f|^2)^(1/2),   <x> = (1 + x^2)^(1/2)
    ``H1``        (int |f|^2 + |f'|^2)^(1/2)
    ``H11``       (||f||_L21^2 + ||f'||_L21^2)^(1/2)
    ``H_script``  ||f||_H1 + ||f||_L21 + max |x f(x)|

    Integrals use the trapezoid rule, ``f'`` uses :func:`derivative`.
    """
    if kind not in NORM_KINDS:
        raise InvalidInputError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")
    g, f = field.grid, field.values
    h, x = g.spacing, g.nodes
    if kind in _DERIVATIVE_KINDS and g.n < 3:
        raise GridError("grid too coarse for a derivative-based norm")

    def l2(w, weight=1.0):
        return float(np.sqrt(trapezoid(weight * np.abs(w) ** 2, h).real))

    bracket2 = 1.0 + x**2
    if kind == "L1":
        return float(trapezoid(np.abs(f), h))
    if kind == "L2":
        return l2(f)
    if kind == "L21":
        return l2(f, bracket2)
    df = derivative(f, h)
    if kind == "H1":
        return float(np.hypot(l2(f), l2(df)))
    if kind == "H11":
        return float(np.hypot(l2(f, bracket2), l2(df, bracket2)))
    return float(np.hypot(l2(f), l2(df)) + l2(f, bracket2) + np.max(np.abs(x * f)))


# ---------------------------------------------------------------------------
# Fourier
# ---------------------------------------------------------------------------

def frequencies(grid: UniformGrid) -> np.ndarray:
    """Conjugate-variable values ``xi_m`` in natural FFT order."""
    return 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.spacing)


def conjugate_grid(grid: UniformGrid) -> UniformGrid:
    """Ascending ``xi`` grid matching the :func:`fourier_pair` output layout."""
    dxi = 2.0 * np.pi / (grid.n * grid.spacing)
    return UniformGrid(-(grid.n // 2) * dxi, (grid.n - grid.n // 2 - 1) * dxi, grid.n)


def apply_multiplier(values, multiplier, axis: int = -1) -> np.ndarray:
    """``inverse(multiplier * forward(values))`` along ``axis``.

    ``multiplier`` is given in natural FFT order (see :func:`frequencies`).
    """
    spec = np.fft.fft(values, axis=axis)
    shape = [1] * np.ndim(spec)
    shape[axis] = -1
    return np.fft.ifft(spec * np.reshape(multiplier, shape), axis=axis)


def fourier_pair(field: SampledField, direction: str = "forward") -> SampledField:
    """Unitary DFT of a power-of-two field (see module docstring for layout)."""
    field.grid.require_power_of_two()
    if direction == "forward":
        coeffs = np.fft.fftshift(np.fft.fft(field.values, norm="ortho"))
        return SampledField(conjugate_grid(field.grid), coeffs, conjugate=field.grid)
    if direction == "inverse":
        target = field.conjugate
        if target is None:
            # no remembered origin: centre the physical grid on 0
            h = 2.0 * np.pi / (field.grid.n * field.grid.spacing)
            target = UniformGrid(-(field.grid.n - 1) * h / 2, (field.grid.n - 1) * h / 2, field.grid.n)
        samples = np.fft.ifft(np.fft.ifftshift(field.values), norm="ortho")
        return SampledField(target, samples)
    raise InvalidInputError(f"direction must be 'forward' or 'inverse', got {direction!r}")
