# modeseek.py
# Fixed-point mode seeking:  z <- z + shift(z)  until the step falls below a
# tolerance.  Because step * (weighted response sum) bounds the objective
# increase from below, the surface value is non-decreasing along every
# trajectory whenever the profile is convex; the iteration is monitored for
# that and an AscentViolation aborts the run if arithmetic ever breaks it
# (beyond a 1e-12 relative slack).
#
# partition_samples runs the iteration from every sample point, merges the
# limits by single linkage, and labels each sample by the basin its limit
# landed in.  Points whose iteration stalls (no active weights under a
# compact kernel, or the iteration cap) are labeled -1 and create no mode.

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimators import FittedModel, NoActiveWeights, _shift_batch, _ratio_sum, mean_shift, reg_at, sqdist

__all__ = [
    "AscentViolation",
    "IterationConfig",
    "ModeSeekResult",
    "Partition",
    "ms_step",
    "ms_iterate",
    "partition_samples",
    "hausdorff",
]

ASCENT_SLACK = 1e-12


class AscentViolation(RuntimeError):
    """The surface value decreased along a trajectory beyond numerical slack."""


@dataclass(frozen=True)
class IterationConfig:
    step_tol: float
    max_iter: int = 2000
    merge_radius: float = 0.0

    def __post_init__(self):
        if self.step_tol <= 0:
            raise ValueError("step_tol must be strictly positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.merge_radius <= 0:
            raise ValueError("merge_radius must be strictly positive")

    @classmethod
    def for_bandwidth(cls, h: float, step_tol: float | None = None,
                      max_iter: int = 2000, merge_radius: float | None = None) -> "IterationConfig":
        """Scale-aware defaults: step_tol = 1e-6 h, merge_radius = h/4."""
        return cls(
            step_tol=1e-6 * h if step_tol is None else step_tol,
            max_iter=max_iter,
            merge_radius=h / 4.0 if merge_radius is None else merge_radius,
        )


@dataclass(frozen=True)
class ModeSeekResult:
    final_point: np.ndarray
    converged: bool
    iterations: int
    stall_reason: str  # "none" | "no_active_weights" | "max_iter"
    rstar_values: np.ndarray | None = None   # surface audit trail, z0..final
    trajectory: np.ndarray | None = None     # (iterations+1, d) when recorded


@dataclass(frozen=True)
class Partition:
    labels: np.ndarray            # (n,) basin index per sample, -1 unassigned
    modes: np.ndarray             # (m, d) merged mode representatives
    counts: np.ndarray            # (m,) member count per mode
    results: list = field(repr=False, default_factory=list)
    config: IterationConfig | None = None

    def to_payload(self) -> dict:
        cfg = {}
        if self.config is not None:
            cfg = {
                "step_tol": self.config.step_tol,
                "max_iter": self.config.max_iter,
                "merge_radius": self.config.merge_radius,
            }
        return {
            "labels": [int(v) for v in self.labels],
            "modes": [[float(c) for c in m] for m in self.modes],
            "counts": [int(c) for c in self.counts],
            "config": cfg,
        }


def ms_step(model: FittedModel, z):
    """One mean-shift update; the new point is a weighted sample average."""
    return np.asarray(z, dtype=float) + mean_shift(model, z)


def _check_ascent(prev: float, cur: float):
    if cur < prev - ASCENT_SLACK * abs(prev):
        raise AscentViolation(f"surface value fell from {prev!r} to {cur!r}")


def ms_iterate(model: FittedModel, z0, config: IterationConfig | None = None) -> ModeSeekResult:
    """Iterate mean-shift updates from z0 until the step is below step_tol."""
    if config is None:
        config = IterationConfig.for_bandwidth(model.h)
    z = np.asarray(z0, dtype=float)
    if z.shape != (model.dim,):
        raise ValueError(f"z0 must be a point of dimension {model.dim}")
    if not np.all(np.isfinite(z)):
        raise ValueError("z0 must be finite")

    traj = [z.copy()]
    rvals = [reg_at(model, z)]
    converged = False
    reason = "max_iter"
    its = 0
    for _ in range(config.max_iter):
        try:
            step = mean_shift(model, z)
        except NoActiveWeights:
            reason = "no_active_weights"
            break
        z = z + step
        its += 1
        traj.append(z.copy())
        r = reg_at(model, z)
        _check_ascent(rvals[-1], r)
        rvals.append(r)
        if float(np.linalg.norm(step)) < config.step_tol:
            converged = True
            reason = "none"
            break
    return ModeSeekResult(
        final_point=z,
        converged=converged,
        iterations=its,
        stall_reason=reason,
        rstar_values=np.array(rvals),
        trajectory=np.array(traj),
    )


def _iterate_batch(model: FittedModel, starts: np.ndarray, config: IterationConfig,
                   record_trajectories: bool = False):
    """Run the iteration from many starts at once, freezing finished rows.

    Behaves identically to per-point ms_iterate; exists so that a full
    partition costs one profile-matrix evaluation per sweep instead of one
    per point.
    """
    m = len(starts)
    z = np.array(starts, dtype=float)
    final = np.array(starts, dtype=float)
    status = np.full(m, -1, dtype=int)      # -1 running, 0 converged, 1 stalled, 2 max_iter
    iters = np.zeros(m, dtype=int)
    active = np.arange(m)
    r_prev = np.full(m, -np.inf)
    trajs = [[p.copy()] for p in starts] if record_trajectories else None

    it = 0
    while len(active) and it < config.max_iter:
        pts = z[active]
        t = sqdist(pts, model.x) / model.h**2
        r_cur = _ratio_sum(model, t, model._wy, "k")
        prev = r_prev[active]
        seen = np.isfinite(prev)
        bad = seen & (r_cur < prev - ASCENT_SLACK * np.abs(prev))
        if np.any(bad):
            i = int(np.argmax(bad))
            _check_ascent(prev[i], r_cur[i])
        r_prev[active] = r_cur

        shift, ok = _shift_batch(model, pts, t)
        if np.any(~ok):
            stalled = active[~ok]
            final[stalled] = z[stalled]
            status[stalled] = 1
        moving = active[ok]
        znew = pts[ok] + shift[ok]
        stepn = np.linalg.norm(shift[ok], axis=1)
        z[moving] = znew
        iters[moving] += 1
        if record_trajectories:
            for row, p in zip(moving, znew):
                trajs[row].append(p.copy())
        done = stepn < config.step_tol
        conv = moving[done]
        final[conv] = z[conv]
        status[conv] = 0
        active = moving[~done]
        it += 1

    if len(active):
        final[active] = z[active]
        status[active] = 2

    # close the audit trail at the final points
    r_final = _ratio_sum(model, sqdist(final, model.x) / model.h**2, model._wy, "k")
    seen = np.isfinite(r_prev)
    bad = seen & (r_final < r_prev - ASCENT_SLACK * np.abs(r_prev))
    if np.any(bad):
        i = int(np.argmax(bad))
        _check_ascent(r_prev[i], r_final[i])

    reasons = {0: "none", 1: "no_active_weights", 2: "max_iter"}
    results = [
        ModeSeekResult(
            final_point=final[i],
            converged=status[i] == 0,
            iterations=int(iters[i]),
            stall_reason=reasons[int(status[i])],
            rstar_values=None,
            trajectory=np.array(trajs[i]) if record_trajectories else None,
        )
        for i in range(m)
    ]
    return final, status, results


def _single_linkage(points: np.ndarray, radius: float) -> np.ndarray:
    """Connected components of the graph linking points within radius."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    adj = csr_matrix(sqdist(points, points) <= radius * radius)
    _, labels = connected_components(adj, directed=False)
    return labels


def _merge_modes(points: np.ndarray, radius: float):
    """Single-linkage clusters, then count-weighted representatives.

    Representatives closer than the radius (possible for chain-shaped
    clusters) are merged again until all pairs are farther apart.
    """
    roots = _single_linkage(points, radius)
    remap0: dict[int, int] = {}
    for r in roots:
        if r not in remap0:
            remap0[r] = len(remap0)
    labels = np.array([remap0[r] for r in roots])
    reps = np.array([points[labels == i].mean(axis=0) for i in range(len(remap0))])
    counts = np.array([(labels == i).sum() for i in range(len(remap0))])

    while len(reps) > 1:
        rr = _single_linkage(reps, radius)
        if len(set(rr.tolist())) == len(reps):
            break
        new_reps, new_counts, remap = [], [], {}
        for i, r in enumerate(rr):
            if r not in remap:
                remap[r] = len(new_reps)
                members = rr == r
                w = counts[members].astype(float)
                new_reps.append((reps[members] * w[:, None]).sum(axis=0) / w.sum())
                new_counts.append(int(w.sum()))
        labels = np.array([remap[rr[l]] for l in labels])
        reps = np.array(new_reps)
        counts = np.array(new_counts)
    return labels, reps, counts


def partition_samples(model: FittedModel, config: IterationConfig | None = None,
                      record_trajectories: bool = False) -> Partition:
    """Partition the sample points by the basin their iteration limit lands in."""
    if config is None:
        config = IterationConfig.for_bandwidth(model.h)
    final, status, results = _iterate_batch(model, model.x, config, record_trajectories)

    labels = np.full(model.n, -1, dtype=int)
    conv_idx = np.where(status == 0)[0]
    if len(conv_idx) == 0:
        return Partition(labels=labels, modes=np.empty((0, model.dim)),
                         counts=np.empty(0, dtype=int), results=results, config=config)
    cl, reps, counts = _merge_modes(final[conv_idx], config.merge_radius)
    labels[conv_idx] = cl
    return Partition(labels=labels, modes=reps, counts=counts, results=results, config=config)


def hausdorff(a, b) -> float:
    """Hausdorff distance between two non-empty point sets."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("hausdorff distance requires non-empty point sets")
    dd = np.sqrt(sqdist(a, b))
    return float(max(dd.min(axis=1).max(), dd.min(axis=0).max()))
