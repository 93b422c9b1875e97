# scms.py
# Subspace-constrained mean shift for ridge extraction.  Each step projects
# the mean-shift vector onto the span of the trailing Hessian eigenvectors
# (the d-s+1 smallest eigenvalues), so fixed points are locations where the
# surface is maximal transverse to an s-1 dimensional ridge.
#
# The stopping rule is the norm of the projected shift; consecutive-point
# distance would be identical here (the step IS the projected shift) but the
# projected norm is the quantity that vanishes at ridge stationarity.
#
# The gaussian kernel is recommended: the biweight second derivative jumps
# at the support boundary, which makes Hessians (and therefore the projector)
# noisy for points near support distance of a sample.

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .estimators import FittedModel, NoActiveWeights, _shift_batch, reg_hess, mean_shift, sqdist

__all__ = ["RidgeConfig", "RidgePoint", "scms_step", "scms_iterate", "ridge_points"]

logger = logging.getLogger(__name__)

EIGENGAP_RTOL = 1e-12


@dataclass(frozen=True)
class RidgeConfig:
    s: int = 2
    step_tol: float = 1e-6
    max_iter: int = 2000

    def __post_init__(self):
        if self.s < 2:
            raise ValueError("subspace index s must be at least 2")
        if self.step_tol <= 0 or self.max_iter < 1:
            raise ValueError("step_tol must be positive and max_iter at least 1")

    @classmethod
    def for_bandwidth(cls, h: float, s: int = 2, step_tol: float | None = None,
                      max_iter: int = 2000) -> "RidgeConfig":
        return cls(s=s, step_tol=1e-6 * h if step_tol is None else step_tol, max_iter=max_iter)


@dataclass(frozen=True)
class RidgePoint:
    point: np.ndarray
    projected_step_norm: float
    eigenvalues: np.ndarray      # Hessian spectrum at the point, descending
    converged: bool
    iterations: int
    stall_reason: str            # "none" | "no_active_weights" | "max_iter"


def _check_s(model: FittedModel, s: int):
    if not 2 <= s <= model.dim:
        raise ValueError(f"subspace index s must lie in [2, {model.dim}], got {s}")


def _projector(hess: np.ndarray, s: int) -> np.ndarray:
    """Orthogonal projector onto the span of the d-s+1 trailing eigenvectors.

    Works on a single (d, d) Hessian or a batch (m, d, d).  eigh returns the
    spectrum in ascending order, so the trailing subspace is the leading
    eigh columns.  A near-degenerate gap at the cut makes the subspace
    ill-defined; that is logged and the computed ordering is used as is.
    """
    single = hess.ndim == 2
    H = hess[None] if single else hess
    vals, vecs = np.linalg.eigh(H)
    d = H.shape[-1]
    keep = d - s + 1
    gap = vals[:, keep] - vals[:, keep - 1]             # ascending: cut between keep-1 and keep
    scale = np.abs(vals).max(axis=1)
    tight = gap < EIGENGAP_RTOL * np.maximum(scale, 1e-300)
    if np.any(tight):
        logger.debug("near-degenerate eigengap at the subspace cut for %d point(s)", int(tight.sum()))
    V = vecs[:, :, :keep]
    P = V @ np.transpose(V, (0, 2, 1))
    return P[0] if single else P


def scms_step(model: FittedModel, z, s: int = 2):
    """One constrained update: z plus the projected mean-shift vector."""
    _check_s(model, s)
    z = np.asarray(z, dtype=float)
    P = _projector(reg_hess(model, z), s)
    return z + P @ mean_shift(model, z)


def scms_iterate(model: FittedModel, z0, config: RidgeConfig | None = None) -> RidgePoint:
    """Iterate projected updates until the projected shift norm is below tol."""
    if config is None:
        config = RidgeConfig.for_bandwidth(model.h)
    _check_s(model, config.s)
    z = np.asarray(z0, dtype=float)
    if z.shape != (model.dim,) or not np.all(np.isfinite(z)):
        raise ValueError(f"z0 must be a finite point of dimension {model.dim}")

    converged = False
    reason = "max_iter"
    norm = np.inf
    its = 0
    for _ in range(config.max_iter):
        try:
            shift = mean_shift(model, z)
        except NoActiveWeights:
            reason = "no_active_weights"
            break
        P = _projector(reg_hess(model, z), config.s)
        proj = P @ shift
        z = z + proj
        its += 1
        norm = float(np.linalg.norm(proj))
        if norm < config.step_tol:
            converged = True
            reason = "none"
            break
    vals = np.sort(np.linalg.eigvalsh(reg_hess(model, z)))[::-1]
    return RidgePoint(
        point=z,
        projected_step_norm=norm,
        eigenvalues=vals,
        converged=converged,
        iterations=its,
        stall_reason=reason,
    )


def ridge_points(model: FittedModel, starts, config: RidgeConfig | None = None) -> list[RidgePoint]:
    """Run the constrained iteration from many starts with frozen finishes.

    Same per-point semantics as scms_iterate, batched so a sweep costs one
    profile-matrix evaluation instead of one per start.
    """
    if config is None:
        config = RidgeConfig.for_bandwidth(model.h)
    _check_s(model, config.s)
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    m = len(starts)
    z = starts.copy()
    status = np.full(m, -1, dtype=int)
    iters = np.zeros(m, dtype=int)
    norms = np.full(m, np.inf)
    active = np.arange(m)

    it = 0
    while len(active) and it < config.max_iter:
        pts = z[active]
        t = sqdist(pts, model.x) / model.h**2
        shift, ok = _shift_batch(model, pts, t)
        if np.any(~ok):
            status[active[~ok]] = 1
        moving = active[ok]
        if len(moving):
            P = _projector(reg_hess(model, z[moving]), config.s)
            proj = np.einsum("mde,me->md", P, shift[ok])
            z[moving] += proj
            iters[moving] += 1
            stepn = np.linalg.norm(proj, axis=1)
            norms[moving] = stepn
            done = stepn < config.step_tol
            status[moving[done]] = 0
            active = moving[~done]
        else:
            active = moving
        it += 1
    status[status == -1] = 2

    spectra = np.sort(np.linalg.eigvalsh(reg_hess(model, z)), axis=1)[:, ::-1]
    reasons = {0: "none", 1: "no_active_weights", 2: "max_iter"}
    return [
        RidgePoint(
            point=z[i],
            projected_step_norm=float(norms[i]),
            eigenvalues=spectra[i],
            converged=status[i] == 0,
            iterations=int(iters[i]),
            stall_reason=reasons[int(status[i])],
        )
        for i in range(m)
    ]
