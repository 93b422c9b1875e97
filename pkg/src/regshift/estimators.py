# estimators.py
# Kernel estimators over a fitted sample.  Everything is built around the
# density-normalized regression estimator
#
#     reg(x) = c_k(d) / (n h^d) * sum_i  yt_i * k(||x - X_i||^2 / h^2) / dens_i
#
# where dens_i is the kernel density estimate at sample point X_i (floored
# away from zero) and yt_i the transformed positive response.  Dividing each
# term by the density at its own design point means derivatives only touch
# the numerator profile, which keeps the gradient and Hessian closed-form:
#
#     grad(x) = 2 c_k / (n h^{d+2}) * sum_i  yt_i (X_i - x) g(t_i) / dens_i
#     hess(x) = 2 c_k / (n h^{d+2}) * sum_i (yt_i / dens_i)
#               * [ (2/h^2) k''(t_i) (x-X_i)(x-X_i)^T + k'(t_i) I ]
#
# with t_i = ||x - X_i||^2 / h^2 and g = -k'.  The mean shift
#
#     shift(x) = sum w_i(x) yt_i X_i / sum w_i(x) yt_i - x,
#     w_i(x) = g(t_i) / dens_i
#
# factors the gradient exactly:  grad(x) = 2 c_k / (h^2 c_g) * reg_g(x) * shift(x),
# where reg_g is reg with profile g and normalization c_g.  That identity is
# what makes the fixed-point iteration in modeseek a gradient ascent.
#
# The Nadaraya-Watson estimator and its gradient are also provided; they are
# used by the bandwidth selector as a pilot gradient estimate, not for mode
# seeking (the ratio form loses the ascent guarantee).
#
# All evaluation functions accept a single point (d,) or a batch (m, d) and
# are read-only on the immutable FittedModel, so concurrent evaluation is
# safe.

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .kernels import KernelProfile
from .transforms import ResponseTransform

__all__ = [
    "NoActiveWeights",
    "FittedModel",
    "fit",
    "kde_at",
    "reg_at",
    "reg_grad",
    "reg_hess",
    "mean_shift",
    "unity_at",
    "nw_at",
    "nw_grad",
]

DEFAULT_FLOOR_SCALE = 1e-8


class NoActiveWeights(RuntimeError):
    """Raised when every kernel weight vanishes at the requested point."""


def sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise squared euclidean distances, (m, n) for a (m, d) and b (n, d)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    d2 = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
    return np.maximum(d2, 0.0)


@dataclass(frozen=True)
class FittedModel:
    """Immutable fitted state; all estimator evaluations flow through it."""

    x: np.ndarray          # (n, d) sample inputs
    yt: np.ndarray         # (n,) transformed positive responses
    dens: np.ndarray       # (n,) kernel density at samples, floored
    h: float
    kernel: KernelProfile
    floor: float           # the density floor actually applied
    shift_applied: float   # uniform response shift recorded from the transform
    _wy: np.ndarray = field(repr=False)  # yt / dens, the recurring weight vector

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]


def fit(
    dataset: Dataset,
    transform: ResponseTransform,
    kernel: KernelProfile,
    h: float,
    density_floor: float | None = None,
) -> FittedModel:
    """Precompute transformed responses and the floored sample densities.

    The density at each sample includes its own kernel term.  density_floor
    defaults to 1e-8 times the maximum raw density; it guards the division
    in the weights against samples sitting in near-empty regions.
    """
    if h <= 0:
        raise ValueError("bandwidth h must be strictly positive")
    x = dataset.x
    n, d = x.shape
    ck = kernel.c_kd(d)
    raw = ck / (n * h**d) * kernel.k(sqdist(x, x) / h**2).sum(axis=1)
    floor = DEFAULT_FLOOR_SCALE * float(raw.max()) if density_floor is None else float(density_floor)
    if floor <= 0:
        raise ValueError("density floor must be strictly positive")
    dens = np.maximum(raw, floor)
    yt = transform.apply(dataset.y)
    return FittedModel(
        x=x,
        yt=yt.y_tilde,
        dens=dens,
        h=float(h),
        kernel=kernel,
        floor=floor,
        shift_applied=yt.shift_applied,
        _wy=yt.y_tilde / dens,
    )


def _prepare(model: FittedModel, x):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[1] != model.dim:
        raise ValueError(f"evaluation points have dimension {pts.shape[1]}, model has {model.dim}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("evaluation points must be finite")
    t = sqdist(pts, model.x) / model.h**2
    return pts, t, single


def kde_at(model: FittedModel, x):
    """Kernel density estimate of the input density."""
    _, t, single = _prepare(model, x)
    ck = model.kernel.c_kd(model.dim)
    out = ck / (model.n * model.h**model.dim) * model.kernel.k(t).sum(axis=1)
    return float(out[0]) if single else out


def _ratio_sum(model: FittedModel, t: np.ndarray, weights: np.ndarray, profile: str) -> np.ndarray:
    if profile == "k":
        mat = model.kernel.k(t)
        c = model.kernel.c_kd(model.dim)
    elif profile == "g":
        mat = model.kernel.g(t)
        c = model.kernel.c_gd(model.dim)
    else:
        raise ValueError("profile must be 'k' or 'g'")
    return c / (model.n * model.h**model.dim) * (mat @ weights)


def reg_at(model: FittedModel, x, profile: str = "k"):
    """Density-normalized regression estimate; profile='g' gives the companion
    estimate with the shift profile used in the gradient factorization."""
    _, t, single = _prepare(model, x)
    out = _ratio_sum(model, t, model._wy, profile)
    return float(out[0]) if single else out


def unity_at(model: FittedModel, x):
    """The estimator of unity: reg_at with all responses identically one."""
    _, t, single = _prepare(model, x)
    out = _ratio_sum(model, t, 1.0 / model.dens, "k")
    return float(out[0]) if single else out


def reg_grad(model: FittedModel, x):
    """Analytic gradient of reg_at."""
    pts, t, single = _prepare(model, x)
    w = model.kernel.g(t) * model._wy[None, :]
    coef = 2.0 * model.kernel.c_kd(model.dim) / (model.n * model.h ** (model.dim + 2))
    out = coef * (w @ model.x - w.sum(axis=1)[:, None] * pts)
    return out[0] if single else out


def reg_hess(model: FittedModel, x):
    """Analytic Hessian of reg_at; symmetric by construction."""
    pts, t, single = _prepare(model, x)
    wy = model._wy
    a = wy[None, :] * model.kernel.d2k(t)   # (m, n)
    b = (wy[None, :] * model.kernel.dk(t)).sum(axis=1)  # (m,)
    diff = pts[:, None, :] - model.x[None, :, :]        # (m, n, d)
    coef = 2.0 * model.kernel.c_kd(model.dim) / (model.n * model.h ** (model.dim + 2))
    outer = np.einsum("mi,mid,mie->mde", a, diff, diff)
    eye = np.eye(model.dim)
    out = coef * ((2.0 / model.h**2) * outer + b[:, None, None] * eye[None, :, :])
    out = 0.5 * (out + np.transpose(out, (0, 2, 1)))  # kill roundoff asymmetry
    return out[0] if single else out


def _shift_batch(model: FittedModel, pts: np.ndarray, t: np.ndarray):
    """Mean-shift vectors for a batch; rows with no active weight are flagged.

    Returns (shift, active) where shift rows for inactive points are zero.
    """
    w = model.kernel.g(t) * model._wy[None, :]
    den = w.sum(axis=1)
    active = den > 0.0
    shift = np.zeros_like(pts)
    if np.any(active):
        shift[active] = (w[active] @ model.x) / den[active, None] - pts[active]
    return shift, active


def mean_shift(model: FittedModel, x):
    """The mean-shift vector: weighted sample average minus the point itself.

    Raises NoActiveWeights when the point lies outside the shift-profile
    support of every sample (possible for compact kernels only).
    """
    pts, t, single = _prepare(model, x)
    shift, active = _shift_batch(model, pts, t)
    if not np.all(active):
        raise NoActiveWeights("no sample has positive weight at the evaluation point")
    return shift[0] if single else shift


def nw_at(model: FittedModel, x):
    """Nadaraya-Watson regression estimate on the transformed responses."""
    _, t, single = _prepare(model, x)
    k = model.kernel.k(t)
    den = k.sum(axis=1)
    if np.any(den <= 0.0):
        raise NoActiveWeights("empty kernel neighborhood for the NW estimate")
    out = (k @ model.yt) / den
    return float(out[0]) if single else out


def nw_grad(model: FittedModel, x):
    """Quotient-rule gradient of the NW estimate.

    With star weights  w*_i = yt_i g_i * sum_l k_l - g_i * sum_l yt_l k_l
    the gradient is (2/h^2) * sum_i w*_i (X_i - x) / (sum_l k_l)^2.
    """
    pts, t, single = _prepare(model, x)
    k = model.kernel.k(t)
    g = model.kernel.g(t)
    sk = k.sum(axis=1)
    if np.any(sk <= 0.0):
        raise NoActiveWeights("empty kernel neighborhood for the NW gradient")
    syk = k @ model.yt
    wstar = g * (model.yt[None, :] * sk[:, None] - syk[:, None])
    num = wstar @ model.x - wstar.sum(axis=1)[:, None] * pts
    out = (2.0 / model.h**2) * num / (sk**2)[:, None]
    return out[0] if single else out
