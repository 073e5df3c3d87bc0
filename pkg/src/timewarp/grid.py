"""Per-stage candidate grids for the warp values, with bounds and refinement.

Stage ``i`` (time ``t_i``) gets candidates spread linearly between lower and
upper bounds derived from the slope box and the boundary margin. Refinement
shrinks each stage's range around the previous optimum by a fixed fraction,
clipped to the initial bounds, so candidates become denser where it matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Grid", "GridInfeasibleError", "compute_bounds", "build", "refine"]


class GridInfeasibleError(ValueError):
    """Raised when a stage has no feasible candidate or transition."""

    def __init__(self, message: str, stage: int | None = None):
        super().__init__(message)
        self.stage = stage


@dataclass(frozen=True)
class Grid:
    """Immutable candidate grid: stage times, bounds, and sorted candidate rows."""

    t: np.ndarray          # (N,) strictly increasing, t[0]=0, t[-1]=1
    lower: np.ndarray      # (N,)
    upper: np.ndarray      # (N,)
    candidates: np.ndarray  # (N, M), rows sorted ascending

    def __post_init__(self):
        for name in ("t", "lower", "upper", "candidates"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def num_stages(self) -> int:
        return self.t.shape[0]

    @property
    def num_candidates(self) -> int:
        return self.candidates.shape[1]


def _validate_stage_times(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.shape[0] < 2:
        raise ValueError("stage times must be a 1-d vector of length >= 2")
    if t[0] != 0.0 or t[-1] != 1.0:
        raise ValueError("stage times must start at 0 and end at 1")
    if np.any(np.diff(t) <= 0):
        raise ValueError("stage times must be strictly increasing")
    return t


def compute_bounds(t, s_min: float, s_max: float, beta: float = 0.0):
    """Lower/upper bounds on the warp value at each stage.

    For beta=0 these are the slope-feasibility bounds
    ``l_i = max(s_min t_i, 1 - s_max (1 - t_i))`` and
    ``u_i = min(s_max t_i, 1 - s_min (1 - t_i))``; beta>0 widens them at the
    boundaries to permit partial alignment. Results are clipped to [0, 1].

    Raises
    ------
    GridInfeasibleError
        If some stage ends up with an empty interval (names the stage).
    """
    t = _validate_stage_times(t)
    if not s_min < s_max:
        raise ValueError(f"s_min ({s_min}) must be < s_max ({s_max})")
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must be in [0, 1), got {beta}")
    lower = np.maximum(s_min * t, (1.0 - s_max * (1.0 - t)) - beta)
    upper = np.minimum(s_max * t + beta, 1.0 - s_min * (1.0 - t))
    lower = np.clip(lower, 0.0, 1.0)
    upper = np.clip(upper, 0.0, 1.0)
    bad = np.nonzero(lower > upper)[0]
    if bad.size:
        i = int(bad[0])
        raise GridInfeasibleError(
            f"empty feasible interval at stage {i} (t={t[i]:.6g}): "
            f"lower {lower[i]:.6g} > upper {upper[i]:.6g}; "
            "widen [s_min, s_max] or increase beta",
            stage=i,
        )
    return lower, upper


def _insert_values(candidates: np.ndarray, values, lower, upper) -> np.ndarray:
    """Replace, per row, the candidate nearest to the given value (clipped to
    the row's bounds). Keeps rows sorted."""
    values = np.clip(np.asarray(values, dtype=float), lower, upper)
    rows = np.arange(candidates.shape[0])
    nearest = np.argmin(np.abs(candidates - values[:, None]), axis=1)
    candidates[rows, nearest] = values
    candidates.sort(axis=1)
    return candidates


def _check_transitions(t, candidates, s_min, s_max):
    """Every stage must admit at least one slope-feasible transition."""
    n = t.shape[0]
    tol = 1e-9 * max(1.0, abs(s_min), abs(s_max))
    s_min = s_min - tol
    s_max = s_max + tol
    for i in range(n - 1):
        dt = t[i + 1] - t[i]
        row = candidates[i]
        nxt = candidates[i + 1]
        lo = np.searchsorted(nxt, row + s_min * dt, side="left")
        hi = np.searchsorted(nxt, row + s_max * dt, side="right")
        if not np.any(hi > lo):
            raise GridInfeasibleError(
                f"no slope-feasible transition from stage {i} to {i + 1} "
                f"(dt={dt:.6g}); increase M or widen [s_min, s_max]",
                stage=i,
            )


def build(t, bounds, num_candidates: int, s_min: float, s_max: float,
          include=None) -> Grid:
    """Linearly spaced candidates between the bounds, with 0 forced into the
    first row and 1 into the last.

    ``include`` optionally gives one value per stage (e.g. a previous
    solution) that replaces the nearest spaced candidate, guaranteeing the
    value stays representable.
    """
    t = _validate_stage_times(t)
    lower, upper = (np.asarray(b, dtype=float) for b in bounds)
    if num_candidates < 1:
        raise ValueError("need at least one candidate per stage")
    if num_candidates == 1:
        if np.any(lower != upper):
            raise ValueError("num_candidates=1 requires degenerate bounds everywhere")
        candidates = lower[:, None].copy()
    else:
        frac = np.linspace(0.0, 1.0, num_candidates)
        candidates = lower[:, None] + frac[None, :] * (upper - lower)[:, None]
    if include is not None:
        candidates = _insert_values(candidates, include, lower, upper)
    # pin the boundary values exactly if they are feasible there
    if lower[0] <= 0.0 <= upper[0]:
        nearest = int(np.argmin(np.abs(candidates[0])))
        candidates[0, nearest] = 0.0
        candidates[0].sort()
    if lower[-1] <= 1.0 <= upper[-1]:
        nearest = int(np.argmin(np.abs(candidates[-1] - 1.0)))
        candidates[-1, nearest] = 1.0
        candidates[-1].sort()
    _check_transitions(t, candidates, s_min, s_max)
    return Grid(t=t, lower=lower, upper=upper, candidates=candidates)


def refine(bounds, tau_star, eta: float, initial_bounds):
    """Shrink each stage's range by factor ``eta`` around the previous
    optimum, clipped to the initial bounds."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must be in (0, 1), got {eta}")
    lower, upper = (np.asarray(b, dtype=float) for b in bounds)
    lower0, upper0 = (np.asarray(b, dtype=float) for b in initial_bounds)
    tau_star = np.asarray(tau_star, dtype=float)
    half = eta * (upper - lower) / 2.0
    new_lower = np.maximum(tau_star - half, lower0)
    new_upper = np.minimum(tau_star + half, upper0)
    return new_lower, new_upper
