"""Newton solver with backtracking line search.

The nonlinear system is passed as a callable ``system(z, need_tangent)``
returning ``(R, K)`` with Dirichlet rows already replaced by identity.
Setting ``ptc=True`` switches to pseudo-transient continuation: a shifted
system ``(K + delta D) dz = -R`` whose shift decays with the residual.
It follows a damped descent path and so survives snap-in instabilities
where plain Newton has no nearby root to converge to.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .material import ElementInversionError

log = logging.getLogger(__name__)


class NonConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    rtol: float = 1e-8
    force_scale: float = 1.0
    max_iter: int = 25
    max_backtracks: int = 8
    backtrack_factor: float = 0.5
    max_halvings: int = 6
    grow_after: int = 3
    ptc_after: int = 2
    ptc_max_iter: int = 400
    ptc_delta0: float = 1.0

    def __post_init__(self):
        if not self.rtol > 0:
            raise ValueError("tolerance must be positive")


@dataclass
class NewtonResult:
    z: np.ndarray
    converged: bool
    iterations: int
    residuals: list = field(default_factory=list)


def _solve(K, rhs):
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            dz = spla.spsolve(K.tocsc(), rhs)
        except (spla.MatrixRankWarning, RuntimeError):
            return None
    if not np.all(np.isfinite(dz)):
        return None
    return dz


def _residual_norm(system, z):
    try:
        R, _ = system(z, False)
    except ElementInversionError:
        return np.inf, None
    return float(np.linalg.norm(R)), R


def newton_solve(system, z0, config: SolverConfig = SolverConfig(), ptc: bool = False) -> NewtonResult:
    """Solve ``R(z) = 0`` from ``z0``.

    Convergence: ``|R| <= rtol * max(|R(z0)|, force_scale)``. The iteration
    count includes the evaluation that verifies convergence, so a
    consistent initial guess reports one iteration.
    """
    z = np.array(z0, dtype=float, copy=True)
    try:
        R, K = system(z, True)
    except ElementInversionError:
        return NewtonResult(z, False, 0, [np.inf])
    norm = float(np.linalg.norm(R))
    tol = config.rtol * max(norm, config.force_scale)
    history = [norm]
    if ptc:
        return _ptc(system, z, R, K, tol, config, history)
    for it in range(1, config.max_iter + 1):
        if norm <= tol:
            return NewtonResult(z, True, it, history)
        dz = _solve(K, -R)
        if dz is None:
            log.debug("singular tangent at iteration %d", it)
            return NewtonResult(z, False, it, history)
        alpha, best = 1.0, None
        for _ in range(config.max_backtracks + 1):
            trial_norm, _ = _residual_norm(system, z + alpha * dz)
            if best is None or trial_norm < best[1]:
                best = (alpha, trial_norm)
            if trial_norm <= (1.0 - 1e-4 * alpha) * norm:
                break
            alpha *= config.backtrack_factor
        if not np.isfinite(best[1]):
            return NewtonResult(z, False, it, history)
        z = z + best[0] * dz
        R, K = system(z, True)
        norm = float(np.linalg.norm(R))
        history.append(norm)
    return NewtonResult(z, norm <= tol, config.max_iter, history)


def _ptc(system, z, R, K, tol, config, history):
    norm = history[-1]
    delta = config.ptc_delta0
    for it in range(1, config.ptc_max_iter + 1):
        if norm <= tol:
            return NewtonResult(z, True, it, history)
        D = sp.diags(np.maximum(np.abs(K.diagonal()), 1e-12))
        while True:
            dz = _solve(K + delta * D, -R)
            trial_norm = np.inf if dz is None else _residual_norm(system, z + dz)[0]
            if np.isfinite(trial_norm) and trial_norm < 10.0 * norm:
                break
            delta = max(delta, 1e-8) * 10.0
            if delta > 1e12:
                return NewtonResult(z, False, it, history)
        z = z + dz
        R, K = system(z, True)
        new_norm = float(np.linalg.norm(R))
        # switched evolution relaxation
        delta = min(max(delta * new_norm / norm, 0.0), 1e12)
        if delta < 1e-10:
            delta = 0.0
        norm = new_norm
        history.append(norm)
    return NewtonResult(z, norm <= tol, config.ptc_max_iter, history)
