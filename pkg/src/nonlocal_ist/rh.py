"""Riemann-Hilbert problem on the real k line.

For fixed ``x`` the boundary values ``M+- = I + Psi+-`` satisfy
``M+ - M- = M- S`` with

    S(x; k) = [[sigma r1 r2,           sigma r2 exp(-2ikx)],
               [r1 exp(2ikx),          0                  ]].

``Psi-`` solves ``Psi- = P-(Psi- S + S)``. Right multiplication by ``S``
acts on each row separately, so the two rows are independent 1x2
problems. They are solved by Neumann iteration with a dense solve of the
discretised ``I - P-(. S)`` system as fallback. ``Psi+ = P+(Psi- S + S)``
follows from one more projection.

Several ``x`` are solved together as one batch. Every ``(x, row)`` pair
keeps its own stopping test and is frozen once it converges, so each
result is the same whatever batch it was solved in.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import config
from .errors import InvalidInputError, SingularEquationError
from .grid import UniformGrid
from .plemelj import _symbol, project
from .report import DiagnosticsReport, info, lower, upper
from .scattering import ReflectionPair


@dataclass(frozen=True)
class JumpMatrix:
    x: float
    kgrid: UniformGrid
    entries: np.ndarray  # (2, 2, nk)
    sigma: int = 1


def _jump_entries(r1, r2, k, xs, sigma) -> np.ndarray:
    """Jump matrices for several ``x`` at once: shape ``(nx, 2, 2, nk)``."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    phase = np.exp(2j * np.outer(xs, k))
    out = np.zeros((xs.size, 2, 2, k.size), dtype=complex)
    out[:, 0, 0] = sigma * r1 * r2
    out[:, 0, 1] = sigma * r2 * np.conj(phase)
    out[:, 1, 0] = r1 * phase
    return out


def build_jump(reflection: ReflectionPair, x: float) -> JumpMatrix:
    entries = _jump_entries(reflection.r1, reflection.r2, reflection.kgrid.nodes, [x],
                            reflection.sigma)[0]
    entries.setflags(write=False)
    return JumpMatrix(float(x), reflection.kgrid, entries, reflection.sigma)


@dataclass(frozen=True)
class RHSolution:
    x: float
    kgrid: UniformGrid
    psi_minus: np.ndarray  # (2, 2, nk)
    psi_plus: np.ndarray
    iterations: int
    method: str = "neumann"
    jump_residual: float = float("nan")
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def m_minus(self) -> np.ndarray:
        return self.psi_minus + np.eye(2)[:, :, None]

    @property
    def m_plus(self) -> np.ndarray:
        return self.psi_plus + np.eye(2)[:, :, None]

    @property
    def mu_minus_1(self) -> np.ndarray:
        """First component of the first column of ``M-``."""
        return 1.0 + self.psi_minus[0, 0]

    @property
    def nu_plus_2(self) -> np.ndarray:
        """Second component of the second column of ``M+``."""
        return 1.0 + self.psi_plus[1, 1]


def _row_times_jump(rows: np.ndarray, S: np.ndarray) -> np.ndarray:
    """``rows @ S`` per k; ``rows`` is ``(..., 2, nk)`` and ``S`` is ``(..., 2, 2, nk)``."""
    return np.einsum("...ik,...ijk->...jk", rows, S)


def _dense_row(S: np.ndarray, srow: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Direct solve of ``psi = P-(psi S + s)`` for one row."""
    n = S.shape[-1]
    PD = [[P * S[i, j][None, :] for j in range(2)] for i in range(2)]
    eye = np.eye(n)
    # unknown (psi_1, psi_2); the (2,2) entry of S is zero
    A = np.block([[eye - PD[0][0], -PD[1][0]],
                  [-PD[0][1], eye - PD[1][1]]])
    rhs = np.concatenate([P @ srow[0], P @ srow[1]])
    sol = np.linalg.solve(A, rhs)
    if not np.all(np.isfinite(sol)):
        raise np.linalg.LinAlgError("non-finite dense solution")
    return sol.reshape(2, n)


def _minus_matrix(kgrid: UniformGrid) -> np.ndarray:
    return project(np.eye(kgrid.n, dtype=complex), kgrid, "-", axis=0)


def _solve_batch(S: np.ndarray, kgrid: UniformGrid, update_tol: float, max_iter: int,
                 rows_together: bool = False):
    """Neumann iteration for a stack of jumps ``S`` of shape ``(nx, 2, 2, nk)``.

    Returns ``psi_minus`` (nx, 2, 2, nk), iteration counts (nx, 2) and the
    method used per x. A row stops once its update is below ``update_tol``
    times the larger of its own norm and the norm of its row of ``S``. With ``rows_together`` the stopping rule looks at the
    whole matrix instead of each row.
    """
    nx, nk = S.shape[0], S.shape[-1]
    mult = _symbol(nk, kgrid.spacing, -1)
    psi = np.zeros_like(S)
    iters = np.zeros((nx, 2), dtype=int)
    active = np.ones((nx, 2), dtype=bool)
    data_norm = np.sqrt(np.sum(np.abs(S) ** 2, axis=(-2, -1)))  # (nx, 2)
    for it in range(1, max_iter + 1):
        idx = np.nonzero(active)
        if idx[0].size == 0:
            break
        rows = psi[idx]  # (m, 2, nk)
        S_sel = S[idx[0]]  # (m, 2, 2, nk)
        new = _row_times_jump(rows, S_sel) + S[idx[0], idx[1]]
        new = np.fft.ifft(np.fft.fft(new, axis=-1) * mult, axis=-1)
        diff = np.sqrt(np.sum(np.abs(new - rows) ** 2, axis=(-2, -1)))
        # scale by the data as well: a row that is zero up to rounding
        # (P- kills it) would otherwise never pass a purely relative test
        size = np.maximum(np.sqrt(np.sum(np.abs(new) ** 2, axis=(-2, -1))), data_norm[idx])
        psi[idx] = new
        iters[idx] = it
        if rows_together:
            d2 = np.zeros((nx, 2))
            s2 = np.zeros((nx, 2))
            d2[idx], s2[idx] = diff ** 2, size ** 2
            dx = np.sqrt(d2.sum(axis=1))
            sx = np.sqrt(s2.sum(axis=1))
            done_x = dx <= update_tol * np.maximum(sx, 1e-300)
            done = done_x[idx[0]]
        else:
            done = diff <= update_tol * np.maximum(size, 1e-300)
        active[idx[0][done], idx[1][done]] = False
        if not np.all(np.isfinite(new)):
            bad = ~np.isfinite(new).all(axis=(-2, -1))
            active[idx[0][bad], idx[1][bad]] = True
            psi[idx[0][bad], idx[1][bad]] = np.nan
            break

    methods = ["neumann"] * nx
    failed = np.argwhere(active | ~np.isfinite(psi).all(axis=(-2, -1)))
    if failed.size:
        P = _minus_matrix(kgrid)
        for ix, row in failed:
            try:
                psi[ix, row] = _dense_row(S[ix], S[ix, row], P)
            except np.linalg.LinAlgError as exc:
                err = SingularEquationError(
                    f"Neumann iteration did not converge in {max_iter} steps and the dense solve failed: {exc}"
                )
                err.index = int(ix)
                raise err from exc
            methods[ix] = "dense"
            iters[ix, row] = max_iter
    return psi, iters, methods


def _finish(psi, S, kgrid, xs, iters, methods, opts) -> List[RHSolution]:
    X = np.einsum("xrik,xijk->xrjk", psi, S) + S
    spec = np.fft.fft(X, axis=-1)
    plus = np.fft.ifft(spec * _symbol(kgrid.n, kgrid.spacing, 1), axis=-1)
    minus = np.fft.ifft(spec * _symbol(kgrid.n, kgrid.spacing, -1), axis=-1)
    resid = np.max(np.sqrt(np.sum(np.abs(minus - psi) ** 2, axis=(1, 2))), axis=-1)
    out = []
    for i, x in enumerate(xs):
        pm, pp = psi[i].copy(), plus[i].copy()
        pm.setflags(write=False)
        pp.setflags(write=False)
        out.append(RHSolution(float(x), kgrid, pm, pp, int(iters[i].max()), methods[i],
                              float(resid[i]), dict(opts)))
    return out


def _check_reflection(reflection: ReflectionPair) -> None:
    reflection.kgrid.require_power_of_two()
    reflection.kgrid.require_symmetric("RH solve")
    if reflection.sup_r >= 1.0:
        warnings.warn(
            f"sup|r| = {reflection.sup_r:.3f} >= 1: outside the regime where the RH problem is known "
            "to be uniquely solvable; attempting anyway",
            RuntimeWarning, stacklevel=3,
        )


def solve_rh_many(reflection: ReflectionPair, xs: Sequence[float], update_tol: Optional[float] = None,
                  max_iter: Optional[int] = None, rowwise: bool = True, batch: int = 64,
                  workers: int = 1) -> List[RHSolution]:
    """Solve the RH problem at every ``x`` in ``xs`` (batched, optionally threaded)."""
    _check_reflection(reflection)
    update_tol = config.TOLERANCES["rh_update"] if update_tol is None else update_tol
    max_iter = int(config.TOLERANCES["rh_max_iter"] if max_iter is None else max_iter)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    k = reflection.kgrid.nodes
    opts = {"update_tol": update_tol, "max_iter": max_iter, "rowwise": rowwise}

    def run(chunk):
        S = _jump_entries(reflection.r1, reflection.r2, k, chunk, reflection.sigma)
        try:
            psi, iters, methods = _solve_batch(S, reflection.kgrid, update_tol, max_iter,
                                               rows_together=not rowwise)
        except SingularEquationError as exc:
            exc.x = float(chunk[getattr(exc, "index", 0)])
            raise
        return _finish(psi, S, reflection.kgrid, chunk, iters, methods, opts)

    chunks = [xs[i:i + batch] for i in range(0, xs.size, max(int(batch), 1))]
    return [sol for part in config.parallel_map(run, chunks, workers) for sol in part]


def solve_rh(reflection: ReflectionPair, x: float, update_tol: Optional[float] = None,
             max_iter: Optional[int] = None, rowwise: bool = True) -> RHSolution:
    """Solve ``Psi- = P-(Psi- S + S)`` at one ``x``.

    ``rowwise=False`` iterates the full 2x2 equation with one stopping test
    for the whole matrix; the default treats the rows as separate problems.
    """
    return solve_rh_many(reflection, [x], update_tol, max_iter, rowwise)[0]


def solve_rh_dense(reflection: ReflectionPair, x: float) -> RHSolution:
    """Dense solve only (used as an independent check on the iteration)."""
    _check_reflection(reflection)
    kg = reflection.kgrid
    S = _jump_entries(reflection.r1, reflection.r2, kg.nodes, [x], reflection.sigma)
    P = _minus_matrix(kg)
    psi = np.stack([_dense_row(S[0], S[0, row], P) for row in range(2)])[None]
    return _finish(psi, S, kg, [x], np.zeros((1, 2), int), ["dense"], {"method": "dense"})[0]


def jump_residual(solution: RHSolution, jump: JumpMatrix) -> float:
    """``max_k |M+ - M- - M- S|_F``."""
    if solution.kgrid != jump.kgrid or solution.x != jump.x:
        raise InvalidInputError("solution and jump matrix belong to different x or k grids")
    lhs = solution.m_plus - solution.m_minus
    rhs = np.einsum("ijk,jlk->ilk", solution.m_minus, jump.entries)
    return float(np.max(np.sqrt(np.sum(np.abs(lhs - rhs) ** 2, axis=(0, 1)))))


def dump_psi_csv(solutions: Sequence[RHSolution], path) -> None:
    """Flat records ``x, k_index, re/im of Psi-_11, _12, _21, _22``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "k_index", "re_11", "im_11", "re_12", "im_12",
                    "re_21", "im_21", "re_22", "im_22"])
        for sol in solutions:
            p = sol.psi_minus
            for j in range(p.shape[-1]):
                vals = [p[0, 0, j], p[0, 1, j], p[1, 0, j], p[1, 1, j]]
                w.writerow([repr(sol.x), j] + [repr(float(f(v))) for v in vals for f in (np.real, np.imag)])


# ---------------------------------------------------------------------------
# positivity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PositivityReport:
    mu_plus: np.ndarray
    mu_minus: np.ndarray
    mu_plus_min: float
    mu_minus_min: float
    c_minus_estimate: float
    product_residual: float

    def to_report(self, sup_r: float) -> DiagnosticsReport:
        rep = DiagnosticsReport()
        if sup_r < 1:
            rep.add(lower("mu_minus_min", self.mu_minus_min, 0.0, "I + S_H positive definite when |r| < 1",
                          note="strict positivity required"))
        else:
            rep.add(info("mu_minus_min", self.mu_minus_min, "I + S_H positive definite when |r| < 1",
                         note="sup|r| >= 1, not asserted"))
        rep.add(info("mu_plus_min", self.mu_plus_min, "I + S_H positive definite when |r| < 1"))
        rep.add(upper("mu_product_vs_determinant", self.product_residual, 1e-12, "plumbing",
                      "mu+ mu- against det(I + S_H)"))
        return rep


def positivity_diagnostics(reflection: ReflectionPair) -> PositivityReport:
    """Eigenvalues of ``I + S_H`` with ``S_H`` the Hermitian part of the jump.

    They do not depend on ``x``. The product is checked against the
    determinant of the 2x2 Hermitian matrix computed directly.
    """
    r1, r2, sig = reflection.r1, reflection.r2, reflection.sigma
    re = np.real(r1 * r2)
    off = np.abs(r1 + sig * np.conj(r2))
    root = np.sqrt(re ** 2 + off ** 2)
    mu_plus = (2 + sig * re + root) / 2
    mu_minus = (2 + sig * re - root) / 2
    # determinant of I + S_H entry by entry (x = 0; unimodular phases drop out)
    S = _jump_entries(r1, r2, reflection.kgrid.nodes, [0.0], sig)[0]
    H = np.eye(2)[:, :, None] + 0.5 * (S + np.conj(np.transpose(S, (1, 0, 2))))
    det = (H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0]).real
    resid = float(np.max(np.abs(mu_plus * mu_minus - det))) if det.size else 0.0
    for arr in (mu_plus, mu_minus):
        arr.setflags(write=False)
    mm = float(np.min(mu_minus))
    return PositivityReport(mu_plus, mu_minus, float(np.min(mu_plus)), mm, mm, resid)
