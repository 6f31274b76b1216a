"""Bounded Levenberg-Marquardt least squares with a central-difference Jacobian.

Parameters are mapped to O(1) coordinates by their bounds before any
derivative is taken; Hz and ampere parameters otherwise differ by twelve
orders of magnitude and the normal equations lose all precision.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from ..errors import ContractError, RankDeficientError
from .models import get_model

log = logging.getLogger(__name__)

MAX_ITER = 500
REL_COST_TOL = 1e-10
STEP_TOL = 1e-12
RANK_RTOL = 1e-10


@dataclass
class FitProblem:
    model_id: str
    x: np.ndarray
    y: np.ndarray
    sigma: np.ndarray
    init: np.ndarray
    bounds: Sequence[tuple]
    mask: Optional[np.ndarray] = None  # True marks an excluded point
    context: Any = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        n = self.y.size
        sigma = np.asarray(self.sigma, dtype=float)
        self.sigma = np.full(n, float(sigma)) if sigma.ndim == 0 else sigma
        self.init = np.asarray(self.init, dtype=float)
        self.mask = np.zeros(n, dtype=bool) if self.mask is None else np.asarray(self.mask, dtype=bool)
        if not (self.x.size == n and self.sigma.size == n and self.mask.size == n):
            raise ContractError("x, y, sigma and mask must have equal lengths")
        if np.any(self.sigma[~self.mask] <= 0):
            raise ContractError("sigma must be > 0 on every unmasked point")
        if len(self.bounds) != self.init.size:
            raise ContractError("one (lo, hi) bound pair is required per parameter")
        for p, (lo, hi) in zip(self.init, self.bounds):
            if not lo <= p <= hi:
                raise ContractError(f"initial value {p!r} outside bounds ({lo!r}, {hi!r})")


@dataclass
class FitResult:
    params: np.ndarray
    covariance: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    param_names: tuple = ()
    degenerate: tuple = ()  # indices of parameters the data cannot identify

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0, None))

    def named(self) -> dict:
        return dict(zip(self.param_names, self.params.tolist()))

    def to_json(self) -> dict:
        def clean(a):
            return [[None if not math.isfinite(v) else v for v in row] for row in a.tolist()]

        return {
            "param_names": list(self.param_names),
            "params": self.params.tolist(),
            "covariance": clean(self.covariance),
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "degenerate": list(self.degenerate),
        }


class _Scaling:
    def __init__(self, init, bounds):
        lo = np.array([b[0] for b in bounds], dtype=float)
        hi = np.array([b[1] for b in bounds], dtype=float)
        finite = np.isfinite(lo) & np.isfinite(hi) & (hi > lo)
        self.offset = np.where(finite, lo, init)
        self.width = np.where(finite, hi - lo, np.maximum(np.abs(init), 1.0))
        self.u_lo = (lo - self.offset) / self.width
        self.u_hi = (hi - self.offset) / self.width

    def to_params(self, u):
        return self.offset + self.width * u

    def to_unit(self, p):
        return (p - self.offset) / self.width

    def project(self, u):
        return np.minimum(np.maximum(u, self.u_lo), self.u_hi)


def least_squares_fit(problem: FitProblem, max_iter: int = MAX_ITER, allow_degenerate: bool = False) -> FitResult:
    """Minimise sum(((y - model(x, p)) / sigma)^2) over unmasked points.

    Returns a result with ``converged=False`` when the iteration cap is hit.
    Raises :class:`RankDeficientError` if the final normal equations are
    singular, unless ``allow_degenerate`` is set, in which case unidentifiable
    parameters are listed in ``FitResult.degenerate`` with infinite variance.
    """
    model = get_model(problem.model_id)
    keep = ~problem.mask
    n_used = int(keep.sum())
    n_par = problem.init.size
    if n_used < n_par:
        raise ContractError(f"{n_used} unmasked points cannot constrain {n_par} parameters")

    y = problem.y[keep]
    w = 1.0 / problem.sigma[keep]
    scale = _Scaling(problem.init, problem.bounds)

    def residual(u):
        f = model.evaluate(problem.x, scale.to_params(u), problem.context)
        return (y - f[keep]) * w

    def jacobian(u, r0):
        jac = np.empty((n_used, n_par))
        for i in range(n_par):
            h = max(1e-6 * abs(u[i]), 1e-9)
            up, dn = u.copy(), u.copy()
            up[i] += h
            dn[i] -= h
            if up[i] > scale.u_hi[i]:
                jac[:, i] = (r0 - residual(dn)) / h
            elif dn[i] < scale.u_lo[i]:
                jac[:, i] = (residual(up) - r0) / h
            else:
                jac[:, i] = (residual(up) - residual(dn)) / (2 * h)
        # jacobian of the model, i.e. minus that of the residual
        return -jac

    u = scale.project(scale.to_unit(problem.init))
    r = residual(u)
    cost = float(r @ r)
    if not math.isfinite(cost):
        raise ContractError("model is not finite at the initial parameters")
    lam = 1e-3
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        jac = jacobian(u, r)
        a = jac.T @ jac
        grad = jac.T @ r
        diag = np.diag(a).copy()
        diag = np.maximum(diag, 1e-12 * max(diag.max(), 1e-300))
        improved = False
        while lam < 1e20:
            try:
                step = np.linalg.solve(a + lam * np.diag(diag), grad)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            u_new = scale.project(u + step)
            r_new = residual(u_new)
            cost_new = float(r_new @ r_new)
            if math.isfinite(cost_new) and cost_new < cost:
                improved = True
                break
            lam *= 10
        if not improved:
            converged = True
            break
        step_norm = float(np.linalg.norm(u_new - u))
        rel = (cost - cost_new) / cost
        u, r, cost = u_new, r_new, cost_new
        log.debug("iter %d cost %.6e lambda %.1e step %.3e", it, cost, lam, step_norm)
        lam = max(lam / 10, 1e-12)
        if rel < REL_COST_TOL or step_norm < STEP_TOL or cost == 0.0:
            converged = True
            break

    jac = jacobian(u, r)
    cov_u, degenerate = _covariance(jac, cost, n_used, n_par)
    if degenerate and not allow_degenerate:
        names = [model.param_names(problem.context)[i] for i in degenerate]
        raise RankDeficientError(f"normal equations singular; unidentifiable parameters: {names}")
    cov = cov_u * np.outer(scale.width, scale.width)
    for i in degenerate:
        cov[i, :] = 0.0
        cov[:, i] = 0.0
        cov[i, i] = math.inf
    return FitResult(
        params=scale.to_params(u),
        covariance=cov,
        residual_norm=math.sqrt(cost),
        iterations=it,
        converged=converged,
        param_names=tuple(model.param_names(problem.context)),
        degenerate=tuple(degenerate),
    )


def _covariance(jac, cost, n_used, n_par):
    _, s, vt = np.linalg.svd(jac, full_matrices=False)
    tol = RANK_RTOL * (s[0] if s.size and s[0] > 0 else 1.0)
    good = s > tol
    degenerate = []
    if not np.all(good):
        null = vt[~good]
        degenerate = sorted(int(i) for i in np.nonzero(np.max(np.abs(null), axis=0) > 0.1)[0])
    inv_s2 = np.where(good, 1.0 / np.where(good, s, 1.0) ** 2, 0.0)
    cov = (vt.T * inv_s2) @ vt
    dof = n_used - n_par
    s2 = cost / dof if dof > 0 else 1.0
    cov = s2 * cov
    return 0.5 * (cov + cov.T), degenerate
