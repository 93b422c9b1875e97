# kernels.py
# Spherically symmetric kernel profiles and their derivatives.
# Conventions:
#   t = ||x||^2  (profiles are functions of the squared norm)
#   K(x) = c_k(d) * k(||x||^2)   is a density on R^d
#   g(t) = -k'(t)                is the shift profile; its normalization is c_g(d)
#
# Two profiles are shipped:
#   gaussian:  k(t) = exp(-t/2), unbounded support, k' < 0 everywhere
#              (strict decrease is what the ascent guarantee of the mean-shift
#              iteration relies on)
#   biweight:  k(t) = (1/2)(1-t)^2 on [0,1], zero beyond; g is then the
#              Epanechnikov profile (1-t)_+ with support radius 1
#
# The biweight second derivative jumps at t=1; d2k(1) returns 0 (the limit
# from t>1), which only matters when an evaluation point sits at exactly
# support distance from a sample.

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = [
    "KernelProfile",
    "GAUSSIAN",
    "BIWEIGHT",
    "get_kernel",
    "profile_k",
    "profile_g",
    "normalization",
]

MAX_DIM = 10


@dataclass(frozen=True)
class KernelProfile:
    """Radial kernel profile with first two derivatives.

    k, dk, d2k act elementwise on arrays of squared norms t >= 0.
    support_radius is in units of ||x||, i.e. k(t) = 0 for t > support_radius**2.
    """

    name: str
    k: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    dk: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    d2k: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    support_radius: float = math.inf

    def g(self, t):
        """Shift profile g = -k'."""
        return -self.dk(t)

    def c_kd(self, d: int) -> float:
        return normalization(self, d, "k")

    def c_gd(self, d: int) -> float:
        return normalization(self, d, "g")


def _gauss_k(t):
    return np.exp(-0.5 * np.asarray(t, dtype=float))


def _gauss_dk(t):
    return -0.5 * np.exp(-0.5 * np.asarray(t, dtype=float))


def _gauss_d2k(t):
    return 0.25 * np.exp(-0.5 * np.asarray(t, dtype=float))


def _biweight_k(t):
    t = np.asarray(t, dtype=float)
    return np.where(t <= 1.0, 0.5 * (1.0 - np.minimum(t, 1.0)) ** 2, 0.0)


def _biweight_dk(t):
    t = np.asarray(t, dtype=float)
    return np.where(t <= 1.0, -(1.0 - np.minimum(t, 1.0)), 0.0)


def _biweight_d2k(t):
    # left/right limits differ at t=1; return the outside value there
    t = np.asarray(t, dtype=float)
    return np.where(t < 1.0, 1.0, 0.0)


GAUSSIAN = KernelProfile(
    name="gaussian", k=_gauss_k, dk=_gauss_dk, d2k=_gauss_d2k, support_radius=math.inf
)

BIWEIGHT = KernelProfile(
    name="biweight", k=_biweight_k, dk=_biweight_dk, d2k=_biweight_d2k, support_radius=1.0
)

_KERNELS = {"gaussian": GAUSSIAN, "biweight": BIWEIGHT}


def get_kernel(name: str) -> KernelProfile:
    try:
        return _KERNELS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; available: {sorted(_KERNELS)}") from None


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("profile argument t must be nonnegative (t is a squared norm)")
    return t


def profile_k(kernel: KernelProfile, t):
    """Evaluate the profile k at squared norm t >= 0."""
    return kernel.k(_check_t(t))


def profile_g(kernel: KernelProfile, t):
    """Evaluate g = -k' at squared norm t >= 0."""
    return -kernel.dk(_check_t(t))


def _sphere_area(d: int) -> float:
    # surface area of the unit sphere in R^d
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


_norm_cache: dict[tuple[str, int, str], float] = {}


def normalization(kernel: KernelProfile, d: int, which: str = "k") -> float:
    """Constant c such that c * integral of p(||x||^2) over R^d equals 1.

    p is the profile k or its negative derivative g.  The gaussian k case has
    the closed form (2*pi)^(-d/2); all other cases are reduced to a radial
    1-D quadrature  c^{-1} = S_{d-1} * int_0^inf r^{d-1} p(r^2) dr.
    """
    if which not in ("k", "g"):
        raise ValueError("which must be 'k' or 'g'")
    if not 1 <= int(d) <= MAX_DIM:
        raise ValueError(f"dimension must be in [1, {MAX_DIM}], got {d}")
    d = int(d)

    key = (kernel.name, d, which)
    if key in _norm_cache:
        return _norm_cache[key]

    if kernel.name == "gaussian" and which == "k":
        c = (2.0 * math.pi) ** (-d / 2.0)
    else:
        prof = kernel.k if which == "k" else kernel.g
        upper = kernel.support_radius if math.isfinite(kernel.support_radius) else np.inf
        val, err = integrate.quad(lambda r: r ** (d - 1) * float(prof(r * r)), 0.0, upper,
                                  epsabs=1e-13, epsrel=1e-13)
        total = _sphere_area(d) * val
        if not np.isfinite(total) or total <= 0 or err > 1e-6 * max(total, 1.0):
            raise ValueError(f"profile {kernel.name}/{which} is not integrable in d={d}")
        c = 1.0 / total

    _norm_cache[key] = c
    return c
