"""Full warping solves: bounds, grid, DP, and iterative refinement.

Also exposes the warped distance between signals, bidirectional symmetric
warping, and softmax distance features over a template set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dp
from . import grid as gridmod
from .dp import ObjectiveBreakdown, WarpProblem
from .penalty import PenaltySpec
from .signal import Signal

__all__ = [
    "WarpFunction",
    "SolveParams",
    "SolveResult",
    "solve",
    "distance",
    "symmetric_distance",
    "solve_symmetric",
    "softmax_features",
]


@dataclass(frozen=True)
class WarpFunction:
    """Piecewise-linear time warp given by knots ``(t_k, tau_k)``.

    Callable anywhere in [0, 1]; exact at the knots. Strict monotonicity of
    the values holds whenever the solve used a positive minimum slope, but is
    not enforced here (negative-slope and margin variants relax it).
    """

    t: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        tau = np.asarray(self.tau, dtype=float)
        if t.ndim != 1 or t.shape != tau.shape:
            raise ValueError("t and tau must be 1-d arrays of equal length")
        if t.shape[0] < 2:
            raise ValueError("a warp needs at least 2 knots")
        if np.any(np.diff(t) <= 0):
            raise ValueError("knot times must be strictly increasing")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise ValueError("warp knots must span [0, 1]")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(tau))):
            raise ValueError("warp knots must be finite")
        t = t.copy(); tau = tau.copy()
        t.flags.writeable = False
        tau.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "tau", tau)

    @classmethod
    def identity(cls, t) -> "WarpFunction":
        t = np.asarray(t, dtype=float)
        return cls(t=t, tau=t.copy())

    def __call__(self, times):
        return np.interp(times, self.t, self.tau)

    def cumulative(self, times=None):
        """Accumulated displacement warp(t) - t (at the knots by default)."""
        if times is None:
            return self.tau - self.t
        times = np.asarray(times, dtype=float)
        return self(times) - times

    def slopes(self):
        """Per-interval derivative of the warp."""
        return np.diff(self.tau) / np.diff(self.t)

    def inverse(self) -> "WarpFunction":
        """Piecewise-linear inverse; requires strictly increasing values
        spanning [0, 1]."""
        if np.any(np.diff(self.tau) <= 0):
            raise ValueError("warp is not strictly increasing; cannot invert")
        if self.tau[0] != 0.0 or self.tau[-1] != 1.0:
            raise ValueError("warp values must span [0, 1] to invert")
        return WarpFunction(t=self.tau, tau=self.t)


@dataclass(frozen=True)
class SolveParams:
    """Discretization and refinement controls.

    ``s_min``/``s_max`` default to None, meaning the slope box is taken from
    the instantaneous regularizer spec; explicit values override it for both
    the grid bounds and edge feasibility.
    """

    N: int | None = None
    M: int = 100
    eta: float = 0.15
    refinements: int = 3
    s_min: float | None = None
    s_max: float | None = None
    beta: float = 0.0
    second_order: bool = False
    second_order_m_cap: int = 30
    early_stop_rel: float = 1e-7
    materialize_edges: bool = False

    def __post_init__(self):
        if self.N is not None and self.N < 2:
            raise ValueError("N must be at least 2")
        if self.M < 1:
            raise ValueError("M must be positive")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must be in (0, 1)")
        if self.refinements < 0:
            raise ValueError("refinements must be nonnegative")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError("beta must be in [0, 1)")


@dataclass(frozen=True)
class SolveResult:
    """Optimal warp with its objective decomposition and solve diagnostics."""

    warp: WarpFunction
    objective: float
    components: ObjectiveBreakdown
    history: list[float] = field(default_factory=list)
    timing: dict[str, float] = field(default_factory=dict)


def _resolve_box(penalties: PenaltySpec, params: SolveParams) -> tuple[float, float]:
    s_min = params.s_min if params.s_min is not None else penalties.reg_inst.slope_min
    s_max = params.s_max if params.s_max is not None else penalties.reg_inst.slope_max
    if not s_min < s_max:
        raise ValueError(f"s_min ({s_min}) must be < s_max ({s_max})")
    return float(s_min), float(s_max)


def _resolve_stage_times(y: Signal, params: SolveParams, stage_times) -> np.ndarray:
    if stage_times is not None:
        t = np.asarray(stage_times, dtype=float)
        if t.ndim != 1 or t.shape[0] < 2 or t[0] != 0.0 or t[-1] != 1.0 \
                or np.any(np.diff(t) <= 0):
            raise ValueError("stage_times must increase strictly from 0 to 1")
        return t
    if params.N is not None:
        return np.linspace(0.0, 1.0, params.N)
    if y.n_knots >= 16:
        return y.knot_times.copy()
    return np.linspace(0.0, 1.0, 16)


def _refinement_loop(problem: WarpProblem, t: np.ndarray, params: SolveParams,
                     bounds0, warm_tau=None) -> SolveResult:
    if params.second_order:
        def run(g):
            return dp.shortest_path_second_order(problem, g, m_cap=params.second_order_m_cap)
    else:
        def run(g):
            return dp.shortest_path(problem, g, materialize_edges=params.materialize_edges)

    node_s = 0.0
    path_s = 0.0

    g = gridmod.build(t, bounds0, params.M, problem.s_min, problem.s_max,
                      include=warm_tau)
    sol = run(g)
    node_s += sol.node_seconds
    path_s += sol.path_seconds
    history = [sol.breakdown.total]
    best = sol
    bounds = bounds0
    for _ in range(params.refinements):
        bounds = gridmod.refine(bounds, best.tau, params.eta, bounds0)
        g = gridmod.build(t, bounds, params.M, problem.s_min, problem.s_max,
                          include=best.tau)
        sol = run(g)
        node_s += sol.node_seconds
        path_s += sol.path_seconds
        history.append(sol.breakdown.total)
        previous = history[-2]
        best = sol
        if previous - history[-1] < params.early_stop_rel * max(abs(previous), 1e-15):
            break

    warp = WarpFunction(t=t, tau=best.tau)
    timing = {
        "node_cost": node_s,
        "shortest_path": path_s,
        "total": node_s + path_s,
    }
    return SolveResult(warp=warp, objective=best.breakdown.total,
                       components=best.breakdown, history=history, timing=timing)


def solve(x: Signal, y: Signal, penalties: PenaltySpec | None = None,
          params: SolveParams | None = None, stage_times=None,
          warm_start: WarpFunction | None = None) -> SolveResult:
    """Find the warp minimizing the regularized alignment objective of
    ``x`` onto target ``y``.

    ``stage_times`` overrides the discretization grid (defaults to the
    target's sample times, or a uniform grid of at least 16 points).
    ``warm_start`` inserts a previous warp's values into every candidate row,
    guaranteeing the result is no worse than the given warp.
    """
    penalties = penalties if penalties is not None else PenaltySpec()
    params = params if params is not None else SolveParams()
    t = _resolve_stage_times(y, params, stage_times)
    s_min, s_max = _resolve_box(penalties, params)
    problem = WarpProblem(x=x, y=y, penalties=penalties,
                          s_min=s_min, s_max=s_max)
    bounds0 = gridmod.compute_bounds(t, s_min, s_max, params.beta)
    warm_tau = None
    if warm_start is not None:
        warm_tau = warm_start(t)
    return _refinement_loop(problem, t, params, bounds0, warm_tau=warm_tau)


def distance(x: Signal, y: Signal, penalties: PenaltySpec | None = None,
             params: SolveParams | None = None) -> float:
    """Time-warped distance: the optimal objective of warping x onto y.

    Generally asymmetric in its arguments; with zero regularization weights
    it reduces to an unconstrained warped-fit distance (up to the slope box).
    """
    return solve(x, y, penalties, params).objective


def symmetric_distance(x: Signal, y: Signal, penalties: PenaltySpec | None = None,
                       params: SolveParams | None = None) -> float:
    """Symmetrized distance: mean of the two one-way distances."""
    return 0.5 * (distance(x, y, penalties, params) + distance(y, x, penalties, params))


def solve_symmetric(x: Signal, y: Signal, penalties: PenaltySpec | None = None,
                    params: SolveParams | None = None, stage_times=None):
    """Bidirectional warping symmetric about the identity.

    Both signals warp toward each other under the constraint that the two
    warps mirror each other: the second warp is ``2 t - warp(t)``. Returns
    ``(warp_x, warp_y, objective)``; the pair satisfies
    ``warp_x(t) + warp_y(t) = 2 t`` at every knot.
    """
    penalties = penalties if penalties is not None else PenaltySpec()
    params = params if params is not None else SolveParams()
    s_min, s_max = _resolve_box(penalties, params)
    if s_min < 2.0 - s_max:
        raise ValueError(
            f"symmetric warping requires s_min >= 2 - s_max so the mirrored "
            f"slopes stay admissible; got s_min={s_min}, s_max={s_max}"
        )
    t = _resolve_stage_times(y, params, stage_times)
    lower, upper = gridmod.compute_bounds(t, s_min, s_max, params.beta)
    # the mirrored time 2t - tau must stay inside [0, 1]
    lower = np.maximum(lower, 2.0 * t - 1.0)
    upper = np.minimum(upper, 2.0 * t)
    bad = np.nonzero(lower > upper)[0]
    if bad.size:
        i = int(bad[0])
        raise gridmod.GridInfeasibleError(
            f"mirrored-time constraint empties stage {i} (t={t[i]:.6g})",
            stage=i,
        )
    problem = WarpProblem(x=x, y=y, penalties=penalties,
                          s_min=s_min, s_max=s_max, symmetric=True)
    result = _refinement_loop(problem, t, params, (lower, upper))
    warp_x = result.warp
    warp_y = WarpFunction(t=t, tau=2.0 * t - warp_x.tau)
    return warp_x, warp_y, result.objective


def softmax_features(x: Signal, templates, sigma: float,
                     penalties: PenaltySpec | None = None,
                     params: SolveParams | None = None) -> np.ndarray:
    """Softmax-normalized warped-distance features against a template set.

    Uses the positive exponent exp(d_i / sigma): farther templates get larger
    weight. Components are positive and sum to 1; the max is subtracted
    before exponentiation to avoid overflow without changing the value.
    """
    templates = list(templates)
    if not templates:
        raise ValueError("need at least one template")
    d = np.array([distance(x, tpl, penalties, params) for tpl in templates])
    return _softmax(d, sigma)


def _softmax(distances, sigma: float) -> np.ndarray:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    scaled = np.asarray(distances, dtype=float) / sigma
    z = np.exp(scaled - scaled.max())
    return z / z.sum()
