"""Vector-valued signals sampled at arbitrary times, evaluated by linear interpolation.

A :class:`Signal` is defined by knots ``(t_k, v_k)`` on the normalized time
interval [0, 1]. Between knots it interpolates linearly; outside the first
and last knot it extends constantly. Construction through
:meth:`Signal.from_samples` rescales the input times affinely so the first
sample lands on 0 and the last on 1; the original range is retained in
``original_span`` for reporting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Signal"]


@dataclass(frozen=True)
class Signal:
    """Piecewise-linear signal on [0, 1] with constant extension.

    Attributes
    ----------
    knot_times : ndarray, shape (n,)
        Strictly increasing times in [0, 1].
    knot_values : ndarray, shape (n, d)
        Signal values at the knots.
    original_span : tuple of float
        Time range of the raw samples before normalization.
    """

    knot_times: np.ndarray
    knot_values: np.ndarray
    original_span: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        times = np.asarray(self.knot_times, dtype=float)
        values = np.asarray(self.knot_values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if times.ndim != 1 or values.ndim != 2:
            raise ValueError("knot_times must be 1-d and knot_values 2-d")
        if times.shape[0] != values.shape[0]:
            raise ValueError(
                f"length mismatch: {times.shape[0]} times vs {values.shape[0]} values"
            )
        if times.shape[0] < 2:
            raise ValueError("a signal needs at least 2 samples")
        if not np.all(np.isfinite(times)):
            raise ValueError("knot times must be finite")
        if not np.all(np.isfinite(values)):
            raise ValueError("knot values must be finite (drop missing rows first)")
        if np.any(np.diff(times) <= 0):
            raise ValueError("knot times must be strictly increasing")
        if times[0] < 0.0 or times[-1] > 1.0:
            raise ValueError("knot times must lie in [0, 1]; use from_samples to normalize")
        times = times.copy()
        values = values.copy()
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "knot_times", times)
        object.__setattr__(self, "knot_values", values)
        object.__setattr__(
            self, "original_span", (float(self.original_span[0]), float(self.original_span[1]))
        )

    @classmethod
    def from_samples(cls, times, values) -> "Signal":
        """Build a signal from samples at arbitrary (strictly increasing) times.

        Times are rescaled affinely onto [0, 1]; ``original_span`` records the
        input range. Values may be scalars (treated as dimension 1) or vectors
        of a consistent dimension.
        """
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1:
            raise ValueError("times must be a 1-d sequence")
        if times.shape[0] < 2:
            raise ValueError("a signal needs at least 2 samples")
        if not np.all(np.isfinite(times)):
            raise ValueError("times must be finite")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        span = (float(times[0]), float(times[-1]))
        scaled = (times - span[0]) / (span[1] - span[0])
        # guard against endpoint drift from the division
        scaled[0] = 0.0
        scaled[-1] = 1.0
        return cls(knot_times=scaled, knot_values=values, original_span=span)

    @property
    def dim(self) -> int:
        return self.knot_values.shape[1]

    @property
    def n_knots(self) -> int:
        return self.knot_times.shape[0]

    def eval(self, t):
        """Evaluate at time(s) ``t``.

        Linear interpolation between knots, constant extension outside them.
        A scalar ``t`` returns shape ``(d,)``; an array of shape ``s`` returns
        shape ``s + (d,)``.
        """
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        flat = np.atleast_1d(t).ravel()
        out = np.empty((flat.shape[0], self.dim))
        for j in range(self.dim):
            out[:, j] = np.interp(flat, self.knot_times, self.knot_values[:, j])
        out = out.reshape(np.atleast_1d(t).shape + (self.dim,))
        if scalar:
            return out[0]
        return out

    __call__ = eval
