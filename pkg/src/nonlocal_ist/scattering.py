"""Direct scattering for the nonlocal Zakharov-Shabat problem.

The spatial Lax equation ``Phi_x + i k sigma_3 Phi = U Phi`` with

    U = [[0, q(x)], [-sigma * conj(q(-x)), 0]]

is solved through the normalised Jost functions. Writing ``p(x) = conj(q(-x))``
and ``u, v`` for the two components, the left/right normalised solutions obey

    phi-type:  u' = q v,              v' = 2ik v - sigma p u,   -> e1 at the start
    psi-type:  u' = -2ik u + q v,     v' = -sigma p u,          -> e2 at the start

in integral form. ``phi_minus``/``psi_minus`` start at the left end of the
grid, ``phi_plus``/``psi_plus`` at the right end. Marching uses the
trapezoid rule on the integral equations after removing the oscillatory
factor, so ``exp(+-2ik h)`` enters each step exactly and the scheme is
implicit only through a scalar 2x2 solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import config
from .config import A_LOWER_BOUND, R_UPPER_BOUND, SMALL_NORM_THRESHOLD
from .errors import DivisionHazardError, DomainError, GridError, InvalidInputError
from .grid import SampledField, UniformGrid, cumulative_trapezoid, trapezoid
from .report import DiagnosticsReport, info, lower, upper

JOST_KINDS = ("phi_minus", "phi_plus", "psi_minus", "psi_plus")

# Which half plane each Jost function continues into (sign of Im k allowed).
_HALF_PLANE = {"phi_minus": +1, "psi_plus": +1, "phi_plus": -1, "psi_minus": -1}


@dataclass(frozen=True)
class Potential:
    """Samples of ``q(x)`` together with the sign ``sigma`` of the nonlinearity."""

    field: SampledField
    sigma: int = 1
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.sigma not in (1, -1):
            raise InvalidInputError(f"sigma must be +1 or -1, got {self.sigma}")

    @property
    def grid(self) -> UniformGrid:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    @property
    def l1_norm(self) -> float:
        return float(trapezoid(np.abs(self.values), self.grid.spacing))

    @property
    def small_norm(self) -> bool:
        return self.l1_norm < SMALL_NORM_THRESHOLD

    @property
    def edge_magnitude(self) -> float:
        return float(max(abs(self.values[0]), abs(self.values[-1])))

    @property
    def decayed(self) -> bool:
        return self.edge_magnitude <= config.TOLERANCES["decay"]

    @property
    def mirrored(self) -> np.ndarray:
        """Samples of ``conj(q(-x))``."""
        return np.conj(self.field.reflected())

    def with_values(self, values, **metadata) -> "Potential":
        meta = dict(self.metadata)
        meta.update(metadata)
        return Potential(SampledField(self.grid, values), self.sigma, meta)


# ---------------------------------------------------------------------------
# potential factories
# ---------------------------------------------------------------------------

def zero_potential(xgrid: UniformGrid, sigma: int = 1) -> Potential:
    return Potential(SampledField.zeros(xgrid), sigma, {"kind": "zero", "params": {}})


def gaussian_potential(xgrid: UniformGrid, amplitude: float, shift: float = 0.0,
                       width: float = 1.0, sigma: int = 1) -> Potential:
    """``amplitude * exp(-((x - shift)/width)**2)``."""
    x = xgrid.nodes
    values = amplitude * np.exp(-(((x - shift) / width) ** 2))
    kind = "gaussian" if shift == 0.0 else "shifted_gaussian"
    params = {"amplitude": amplitude, "shift": shift, "width": width}
    return Potential(SampledField(xgrid, values), sigma, {"kind": kind, "params": params})


def box_potential(xgrid: UniformGrid, amplitude: float, left: float = 0.0,
                  right: float = 1.0, sigma: int = 1) -> Potential:
    """``amplitude`` on ``[left, right]``; nodes sitting on a jump get half the value.

    With the jumps on grid nodes the trapezoid rule then integrates the
    piecewise-constant profile exactly.
    """
    x = xgrid.nodes
    tol = 1e-9 * xgrid.spacing
    values = np.where((x > left + tol) & (x < right - tol), amplitude, 0.0).astype(complex)
    values[np.abs(x - left) <= tol] = amplitude / 2
    values[np.abs(x - right) <= tol] = amplitude / 2
    params = {"amplitude": amplitude, "left": left, "right": right}
    return Potential(SampledField(xgrid, values), sigma, {"kind": "box", "params": params})


# ---------------------------------------------------------------------------
# Jost functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JostTrace:
    k: complex
    which: str
    values: np.ndarray  # shape (n, 2)
    grid: UniformGrid

    @property
    def start_value(self) -> np.ndarray:
        return self.values[0] if self.which.endswith("minus") else self.values[-1]


def _check_potential(potential: Potential) -> None:
    if not potential.decayed:
        raise InvalidInputError(
            f"potential has not decayed at the grid ends (|q| = {potential.edge_magnitude:.3g} "
            f"> {config.TOLERANCES['decay']:.1g}); enlarge the x interval"
        )


def _check_half_plane(which: str, k) -> None:
    if which not in JOST_KINDS:
        raise InvalidInputError(f"unknown Jost function {which!r}; expected one of {JOST_KINDS}")
    im = np.imag(np.asarray(k, dtype=complex))
    bad = im * _HALF_PLANE[which] < 0
    if np.any(bad):
        side = "upper" if _HALF_PLANE[which] > 0 else "lower"
        raise DomainError(f"{which} only continues into the {side} half plane; got Im k = {im[bad][0]:.3g}")


def _march(q, p, h, sigma, ks, which):
    """Trapezoid marching of one Jost function for a vector of ``k``.

    Returns an array of shape ``(n, 2, len(ks))`` indexed along the grid
    from left to right whatever the marching direction.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    forward = which.endswith("minus")
    if not forward:
        q, p, h = q[::-1], p[::-1], -h
    phi_type = which.startswith("phi")
    n = len(q)
    ea = np.ones_like(ks) if phi_type else np.exp(-2j * ks * h)
    eb = np.exp(2j * ks * h) if phi_type else np.ones_like(ks)
    u = np.full(ks.shape, 1.0 + 0j) if phi_type else np.zeros(ks.shape, complex)
    v = np.zeros(ks.shape, complex) if phi_type else np.full(ks.shape, 1.0 + 0j)
    out = np.empty((n, 2, ks.size), dtype=complex)
    out[0, 0], out[0, 1] = u, v
    half = 0.5 * h
    for j in range(n - 1):
        qn, pn = q[j + 1], p[j + 1]
        A = ea * (u + half * q[j] * v)
        B = eb * (v - sigma * half * p[j] * u)
        u = (A + half * qn * B) / (1.0 + sigma * half * half * qn * pn)
        v = B - sigma * half * pn * u
        out[j + 1, 0], out[j + 1, 1] = u, v
    return out if forward else out[::-1]


def march_jost(potential: Potential, k: complex, which: str) -> JostTrace:
    """March one Jost function across the x grid at spectral parameter ``k``."""
    _check_potential(potential)
    _check_half_plane(which, k)
    g = potential.grid
    p = potential.mirrored if g.is_symmetric else None
    if p is None:
        raise GridError("Jost marching needs an x grid symmetric about 0 (q(-x) by reflection)")
    trace = _march(potential.values, p, g.spacing, potential.sigma, [k], which)
    return JostTrace(complex(k), which, trace[:, :, 0], g)


def jost_traces(potential: Potential, ks, which: str) -> np.ndarray:
    """Vectorised :func:`march_jost`: array ``(n, 2, len(ks))``."""
    _check_potential(potential)
    _check_half_plane(which, ks)
    potential.grid.require_symmetric("Jost marching")
    return _march(potential.values, potential.mirrored, potential.grid.spacing,
                  potential.sigma, ks, which)


def large_k_residual(potential: Potential, k: float, which: str = "phi_minus") -> float:
    """Sup over x of ``|2 i sigma k (jost - e) - limit(x)|``.

    The limits are those of the large-|k| expansion of the integral
    equations: ``s(x) e1 + conj(q(-x)) e2`` for phi-type and
    ``sigma q(x) e1 - s(x) e2`` for psi-type, with ``s`` the running
    integral of ``q(y) conj(q(-y))`` from the normalisation end.
    """
    trace = march_jost(potential, k, which).values
    s = compute_s_fields(potential)
    sig = potential.sigma
    if which.startswith("phi"):
        s_end = s.s1_minus if which.endswith("minus") else s.s1_plus
        scaled = 2j * sig * k * (trace - np.array([1.0, 0.0]))
        limit = np.stack([s_end, potential.mirrored], axis=1)
    else:
        s_end = s.s2_minus if which.endswith("minus") else s.s2_plus
        scaled = 2j * sig * k * (trace - np.array([0.0, 1.0]))
        limit = np.stack([sig * potential.values, -s_end], axis=1)
    return float(np.max(np.linalg.norm(scaled - limit, axis=1)))


@dataclass(frozen=True)
class SFields:
    s1_minus: np.ndarray
    s1_plus: np.ndarray
    s2_minus: np.ndarray
    s2_plus: np.ndarray


def compute_s_fields(potential: Potential) -> SFields:
    """Running integrals of ``q(y) conj(q(-y))`` from each end of the grid."""
    g = potential.grid
    g.require_symmetric("s-fields (q(-y) by reflection)")
    integrand = potential.values * potential.mirrored
    minus = cumulative_trapezoid(integrand, g.spacing)
    plus = cumulative_trapezoid(integrand, g.spacing, reverse=True)
    for arr in (minus, plus):
        arr.setflags(write=False)
    # both second-index fields are the same integrals as the first-index ones
    return SFields(minus, plus, minus, plus)


# ---------------------------------------------------------------------------
# scattering coefficients
# ---------------------------------------------------------------------------

def _mirror(values: np.ndarray) -> np.ndarray:
    """``conj(f(-k))`` on a symmetric grid."""
    return np.conj(values[::-1])


@dataclass(frozen=True)
class ScatteringData:
    kgrid: UniformGrid
    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    sigma: int = 1
    small_norm: Optional[bool] = None
    wronskian_residual: float = float("nan")
    det_tolerance: float = config.TOLERANCES["det"]
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.kgrid.require_symmetric("scattering data")
        for name in ("a", "b", "d"):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != (self.kgrid.n,):
                raise InvalidInputError(f"{name} has shape {arr.shape}, expected ({self.kgrid.n},)")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def c(self) -> np.ndarray:
        return -self.sigma * _mirror(self.b)

    @property
    def det_residual(self) -> float:
        return float(np.max(np.abs(self.a * self.d + self.sigma * self.b * _mirror(self.b) - 1.0)))

    @property
    def sym_residual_a(self) -> float:
        return float(np.max(np.abs(_mirror(self.a) - self.a)))

    @property
    def sym_residual_d(self) -> float:
        return float(np.max(np.abs(_mirror(self.d) - self.d)))

    @property
    def tail_residual(self) -> float:
        ends = [0, -1]
        return float(max(np.max(np.abs(self.a[ends] - 1)), np.max(np.abs(self.d[ends] - 1)),
                         np.max(np.abs(self.b[ends]))))

    @property
    def flagged(self) -> bool:
        """True when the determinant identity is violated beyond tolerance."""
        return self.det_residual > self.det_tolerance


def scattering_coefficients(potential: Potential, kgrid: UniformGrid,
                            det_tolerance: Optional[float] = None,
                            workers: int = 1, chunk: int = 256) -> ScatteringData:
    """``a, b, d`` on a real symmetric k grid from the integral expressions.

    ``a = 1 + int q phi^(2)``, ``b = -sigma int exp(-2iky) conj(q(-y)) phi^(1)``
    and ``d = 1 - sigma int conj(q(-y)) psi^(1)``, all with the left
    normalised solutions. The Wronskians of left and right solutions at the
    centre node are evaluated as an independent cross-check.
    """
    _check_potential(potential)
    kgrid.require_symmetric("scattering k grid")
    potential.grid.require_symmetric("scattering x grid")
    ks = kgrid.nodes
    chunks = [ks[i:i + chunk] for i in range(0, ks.size, chunk)]
    parts = config.parallel_map(lambda kc: _coefficients_chunk(potential, kc), chunks, workers)
    a, b, d, a_w, b_w, d_w = (np.concatenate([p[i] for p in parts]) for i in range(6))
    wr = float(max(np.max(np.abs(a - a_w)), np.max(np.abs(b - b_w)), np.max(np.abs(d - d_w))))
    tol = config.TOLERANCES["det"] if det_tolerance is None else det_tolerance
    return ScatteringData(kgrid, a, b, d, potential.sigma, potential.small_norm, wr, tol,
                          {"potential": dict(potential.metadata)})


def _coefficients_chunk(potential: Potential, ks):
    q, p, h, sig = potential.values, potential.mirrored, potential.grid.spacing, potential.sigma
    x = potential.grid.nodes
    phi_m = _march(q, p, h, sig, ks, "phi_minus")
    psi_m = _march(q, p, h, sig, ks, "psi_minus")
    phase = np.exp(-2j * np.outer(x, ks))
    a = 1.0 + trapezoid(q[:, None] * phi_m[:, 1], h, axis=0)
    b = -sig * trapezoid(phase * (p[:, None] * phi_m[:, 0]), h, axis=0)
    d = 1.0 - sig * trapezoid(p[:, None] * psi_m[:, 0], h, axis=0)

    # Wronskians at the centre node, right-normalised solutions marched inward
    c = len(x) // 2
    phi_p = _march(q[c:], p[c:], h, sig, ks, "phi_plus")[0]
    psi_p = _march(q[c:], p[c:], h, sig, ks, "psi_plus")[0]
    fm, sm = phi_m[c], psi_m[c]
    a_w = fm[0] * psi_p[1] - fm[1] * psi_p[0]
    b_w = np.exp(-2j * ks * x[c]) * (phi_p[0] * fm[1] - phi_p[1] * fm[0])
    d_w = phi_p[0] * sm[1] - phi_p[1] * sm[0]
    return a, b, d, a_w, b_w, d_w


# ---------------------------------------------------------------------------
# reflection coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReflectionPair:
    """``r1 = b/a`` and ``r2 = conj(b(-k))/d`` on a symmetric k grid at time ``t``."""

    kgrid: UniformGrid
    r1: np.ndarray
    r2: np.ndarray
    t: float = 0.0
    sigma: int = 1
    small_norm: Optional[bool] = None
    realizable: bool = True
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.kgrid.require_symmetric("reflection data")
        if self.sigma not in (1, -1):
            raise InvalidInputError(f"sigma must be +1 or -1, got {self.sigma}")
        for name in ("r1", "r2"):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != (self.kgrid.n,):
                raise InvalidInputError(f"{name} has shape {arr.shape}, expected ({self.kgrid.n},)")
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"{name} contains NaN or Inf")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def sup_r(self) -> float:
        return float(max(np.max(np.abs(self.r1)), np.max(np.abs(self.r2))))

    @classmethod
    def from_arrays(cls, kgrid, r1, r2, sigma=1, **kw) -> "ReflectionPair":
        """Arbitrary (possibly non-realizable) reflection data for the inverse problem."""
        kw.setdefault("realizable", False)
        return cls(kgrid, r1, r2, sigma=sigma, **kw)


def reflection_coefficients(data: ScatteringData, division_tolerance: Optional[float] = None) -> ReflectionPair:
    tol = config.TOLERANCES["division"] if division_tolerance is None else division_tolerance
    min_a, min_d = float(np.min(np.abs(data.a))), float(np.min(np.abs(data.d)))
    if min_a < tol or min_d < tol:
        raise DivisionHazardError(
            f"min|a| = {min_a:.3g}, min|d| = {min_d:.3g} below {tol:.1g}: "
            "possible resonance, small-norm assumption likely violated"
        )
    r1 = data.b / data.a
    r2 = _mirror(data.b) / data.d
    return ReflectionPair(data.kgrid, r1, r2, 0.0, data.sigma, data.small_norm, True,
                          dict(data.metadata))


def no_resonance_check(potential: Potential, data: ScatteringData) -> DiagnosticsReport:
    """Small-norm hypothesis and the resulting lower bounds on |a|, |d| and upper bound on |r|."""
    rep = DiagnosticsReport()
    l1 = potential.l1_norm
    rep.add(upper("l1_norm_below_1_6", l1, SMALL_NORM_THRESHOLD, "no eigenvalues or resonances (small norm)"))
    rep.add(info("l1_norm_below_1", l1, "unique Jost solutions (||q||_1 < 1)",
                 note="holds" if l1 < config.JOST_NORM_THRESHOLD else "violated"))
    min_a, min_d = float(np.min(np.abs(data.a))), float(np.min(np.abs(data.d)))
    if potential.small_norm:
        rep.add(lower("min_abs_a", min_a, A_LOWER_BOUND, "|a| >= 1 - e^(1/3)/6"))
        rep.add(lower("min_abs_d", min_d, A_LOWER_BOUND, "|d| >= 1 - e^(1/3)/6"))
        try:
            sup_r = reflection_coefficients(data).sup_r
        except DivisionHazardError:
            sup_r = float("inf")
        rep.add(upper("sup_abs_r", sup_r, R_UPPER_BOUND, "|r_{1,2}| < 1"))
    else:
        rep.add(info("min_abs_a", min_a, "|a| >= 1 - e^(1/3)/6", note="bound not applicable"))
        rep.add(info("min_abs_d", min_d, "|d| >= 1 - e^(1/3)/6", note="bound not applicable"))
        rep.warnings.append(
            f"||q||_1 = {l1:.4f} >= 1/6: small-norm hypothesis fails, bounds on |a|, |d|, |r| are not guaranteed"
        )
    return rep
