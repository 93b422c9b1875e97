# transforms.py
# Strictly increasing positive response transformations applied before
# fitting.  The downstream estimators divide by weighted response sums, so
# responses must be bounded away from zero:
#
#   t1: squash through a bounded logistic,  y -> 1/(1 + exp(-scale*y)) + offset
#   t2: shift the whole sample up so its minimum is at least c0,
#       y -> y + max(c0 - min(y), 0)
#
# t1 is deterministic and bounded in (offset, 1 + offset); t2 depends on the
# realized sample minimum but preserves response differences exactly.

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ResponseTransform",
    "TransformedResponses",
    "apply_t1",
    "apply_t2",
]


@dataclass(frozen=True)
class TransformedResponses:
    """Positive responses along with the uniform shift that produced them (0 for t1)."""

    y_tilde: np.ndarray
    shift_applied: float = 0.0


@dataclass(frozen=True)
class ResponseTransform:
    kind: str = "t1"  # "t1" (bounded logistic) or "t2" (minimum shift)
    t1_scale: float = 10.0
    t1_offset: float = 0.01
    t2_c0: float = 0.1

    def __post_init__(self):
        if self.kind not in ("t1", "t2"):
            raise ValueError(f"transform kind must be 't1' or 't2', got {self.kind!r}")
        if self.t1_scale <= 0 or self.t1_offset <= 0 or self.t2_c0 <= 0:
            raise ValueError("transform parameters must be strictly positive")

    def apply(self, y) -> TransformedResponses:
        if self.kind == "t1":
            return apply_t1(y, self.t1_scale, self.t1_offset)
        return apply_t2(y, self.t2_c0)


def apply_t1(y, scale: float = 10.0, offset: float = 0.01) -> TransformedResponses:
    """Bounded logistic transform; output lies in (offset, 1 + offset).

    For |scale*y| beyond roughly 36 the logistic saturates in double
    precision, so extremely spread-out responses collapse onto the bounds.
    """
    if scale <= 0 or offset <= 0:
        raise ValueError("scale and offset must be strictly positive")
    y = np.asarray(y, dtype=float)
    if y.size < 1:
        raise ValueError("need at least one response")
    with np.errstate(over="ignore"):  # exp overflow saturates to the floor, by design
        out = 1.0 / (1.0 + np.exp(-scale * y)) + offset
    return TransformedResponses(y_tilde=out, shift_applied=0.0)


def apply_t2(y, c0: float = 0.1) -> TransformedResponses:
    """Shift responses uniformly so the minimum is at least c0.

    No shift is applied when min(y) >= c0 already (the indicator is strict:
    min(y) == c0 stays untouched).  Ordering and pairwise differences of the
    responses are preserved exactly.
    """
    if c0 <= 0:
        raise ValueError("c0 must be strictly positive")
    y = np.asarray(y, dtype=float)
    if y.size < 1:
        raise ValueError("need at least one response")
    m = float(y.min())
    shift = (c0 - m) if m < c0 else 0.0
    return TransformedResponses(y_tilde=y + shift, shift_applied=shift)
