"""Group alignment onto a learned target, exact recentering, and
time-warped K-means clustering.

Alignment alternates between (a) warping every signal onto the current
target (independent solves) and (b) refitting the target pointwise from the
warped values. The centered variant composes all warps with the inverse of
their pointwise mean after each warp update, which satisfies the
mean-warp-equals-identity constraint exactly. Clustering adds a template per
group and an assignment step, cycling warps -> templates -> assignments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .dp import WarpProblem, evaluate_objective
from .parallel import parallel_map
from .penalty import LossSpec, PenaltySpec, loss_value, loss_value_pair
from .signal import Signal
from .solver import SolveParams, WarpFunction, _resolve_box, solve

__all__ = [
    "AlignmentResult",
    "ClusterResult",
    "align",
    "update_target",
    "recenter",
    "cluster",
]

_EARLY_STOP_REL = 1e-7


@dataclass(frozen=True)
class AlignmentResult:
    """Learned target, final warps, and per-round diagnostics.

    ``round_warps[r]`` holds the warp family as of round ``r`` (after
    recentering, when enabled) so convergence across rounds can be inspected.
    """

    target: Signal
    warps: list[WarpFunction]
    objective_history: list[float]
    rounds: int
    round_warps: list[list[WarpFunction]] = field(default_factory=list)


@dataclass(frozen=True)
class ClusterResult:
    """Cluster assignments, per-cluster templates, and warps."""

    assignments: np.ndarray
    templates: list[Signal]
    warps: list[WarpFunction]
    objective_history: list[float]
    rounds: int
    seed: int


def _stage_grid(signals, params: SolveParams) -> np.ndarray:
    if params.N is not None:
        return np.linspace(0.0, 1.0, params.N)
    n = max(s.n_knots for s in signals)
    return np.linspace(0.0, 1.0, max(n, 16))


def _check_same_dim(signals):
    dims = {s.dim for s in signals}
    if len(dims) > 1:
        raise ValueError(f"signals must share one dimension, got {sorted(dims)}")


def update_target(values, loss: LossSpec | None = None) -> np.ndarray:
    """Pointwise target update from warped values, shape (num_signals, N, d).

    Squared loss takes the per-stage mean, absolute loss the coordinate-wise
    median; other kinds minimize the summed loss per stage and coordinate by
    bounded scalar search over the value range.
    """
    loss = loss if loss is not None else LossSpec()
    values = np.asarray(values, dtype=float)
    if values.ndim == 2:
        values = values[:, :, None]
    if values.shape[0] < 1:
        raise ValueError("need at least one signal")
    if loss.kind == "squared_l2":
        return values.mean(axis=0)
    if loss.kind == "l1":
        return np.median(values, axis=0)
    out = np.empty(values.shape[1:])
    for k in range(values.shape[1]):
        for c in range(values.shape[2]):
            col = values[:, k, c]
            lo, hi = float(col.min()), float(col.max())
            if lo == hi:
                out[k, c] = lo
                continue
            def objective(center):
                return float(np.sum(loss_value(loss, (col - center)[:, None])))
            res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-8})
            out[k, c] = res.x
    return out


def recenter(warps) -> list[WarpFunction]:
    """Compose each warp with the inverse of the family's pointwise mean.

    The mean warp is piecewise linear on the union of all knot times; the
    composition amounts to re-timing each warp's values onto the mean's
    values, so the returned family's pointwise mean is the identity up to
    float arithmetic.
    """
    warps = list(warps)
    if not warps:
        raise ValueError("need at least one warp")
    knots = np.unique(np.concatenate([w.t for w in warps]))
    values = np.stack([w(knots) for w in warps])
    mean = values.mean(axis=0)
    if np.any(np.diff(mean) <= 0):
        raise ValueError("mean warp is not strictly increasing; cannot recenter")
    return [WarpFunction(t=mean, tau=values[i]) for i in range(len(warps))]


def _round_objective(signals, targets, warps, penalties, s_min, s_max, t) -> float:
    total = 0.0
    for sig, target, warp in zip(signals, targets, warps):
        problem = WarpProblem(x=sig, y=target, penalties=penalties,
                              s_min=s_min, s_max=s_max)
        total += evaluate_objective(problem, t, warp(t)).total
    return total


def align(signals, penalties: PenaltySpec | None = None,
          params: SolveParams | None = None, rounds: int = 5,
          centered: bool = False, stage_times=None,
          n_jobs: int = 1) -> AlignmentResult:
    """Warp a group of signals onto a jointly learned target.

    Runs up to ``rounds`` full rounds (warp updates, optional recentering,
    target update), stopping early once the group objective improves by less
    than 1e-7 relative. Warps start at the identity; the target starts as the
    pointwise update of the unwarped signals. The per-signal solves inside a
    round are independent and fan out over ``n_jobs`` worker threads.
    """
    signals = list(signals)
    if not signals:
        raise ValueError("need at least one signal")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    _check_same_dim(signals)
    penalties = penalties if penalties is not None else PenaltySpec()
    params = params if params is not None else SolveParams()
    t = np.asarray(stage_times, dtype=float) if stage_times is not None \
        else _stage_grid(signals, params)
    s_min, s_max = _resolve_box(penalties, params)

    unwarped = np.stack([sig(t) for sig in signals])
    target = Signal(knot_times=t, knot_values=update_target(unwarped, penalties.loss))
    warps = [WarpFunction.identity(t) for _ in signals]

    history: list[float] = []
    round_warps: list[list[WarpFunction]] = []
    executed = 0
    for r in range(rounds):
        current = target
        results = parallel_map(
            lambda pair: solve(pair[0], current, penalties, params,
                               stage_times=t, warm_start=pair[1]),
            zip(signals, warps), n_jobs=n_jobs)
        warps = [res.warp for res in results]
        if centered:
            warps = recenter(warps)
        warped_vals = np.stack([sig(w(t)) for sig, w in zip(signals, warps)])
        target = Signal(knot_times=t, knot_values=update_target(warped_vals, penalties.loss))
        objective = _round_objective(signals, [target] * len(signals), warps,
                                     penalties, s_min, s_max, t)
        history.append(objective)
        round_warps.append(list(warps))
        executed = r + 1
        if r > 0 and history[-2] - history[-1] < _EARLY_STOP_REL * max(abs(history[-2]), 1e-15):
            break
    return AlignmentResult(target=target, warps=warps, objective_history=history,
                           rounds=executed, round_warps=round_warps)


def _seed_templates(signals, t, penalties, params, num_clusters, rng):
    """Farthest-point template seeding on warped distances.

    Picks the first center at random, then repeatedly the signal farthest
    (in warped distance) from its nearest chosen center. Unwarped distances
    are a poor proxy here: phase-shifted copies of one shape look mutually
    far before warping, so they would hog the centers.
    """
    m = len(signals)
    centers = [int(rng.integers(m))]
    dist_to = np.full((m, num_clusters), np.inf)
    for kk in range(num_clusters):
        c = centers[kk]
        for i in range(m):
            if i == c:
                dist_to[i, kk] = 0.0
            else:
                dist_to[i, kk] = solve(signals[i], signals[c], penalties, params,
                                       stage_times=t).objective
        if kk < num_clusters - 1:
            nearest = dist_to[:, :kk + 1].min(axis=1)
            nearest[centers] = -np.inf
            centers.append(int(np.argmax(nearest)))
    assignments = np.argmin(dist_to, axis=1).astype(np.intp)
    return centers, assignments


def cluster(signals, num_clusters: int, penalties: PenaltySpec | None = None,
            params: SolveParams | None = None, rounds: int = 5, seed: int = 0,
            stage_times=None, n_jobs: int = 1) -> ClusterResult:
    """Time-warped K-means: cycle warps, per-cluster templates, assignments.

    Templates initialize from a seeded farthest-point pick on warped
    distances (for one cluster: the pointwise target of the group, matching
    :func:`align`). Empty clusters are reseeded with the worst-fit signal.
    Deterministic for a fixed seed.
    """
    signals = list(signals)
    m = len(signals)
    if not 1 <= num_clusters <= m:
        raise ValueError(f"num_clusters must be in [1, {m}], got {num_clusters}")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    _check_same_dim(signals)
    penalties = penalties if penalties is not None else PenaltySpec()
    params = params if params is not None else SolveParams()
    t = np.asarray(stage_times, dtype=float) if stage_times is not None \
        else _stage_grid(signals, params)
    s_min, s_max = _resolve_box(penalties, params)
    loss = penalties.loss
    gaps = np.diff(t)

    unwarped = np.stack([sig(t) for sig in signals])
    if num_clusters == 1:
        templates = [Signal(knot_times=t, knot_values=update_target(unwarped, loss))]
        assignments = np.zeros(m, dtype=np.intp)
    else:
        rng = np.random.default_rng(seed)
        centers, assignments = _seed_templates(signals, t, penalties, params,
                                               num_clusters, rng)
        templates = [Signal(knot_times=t, knot_values=unwarped[c]) for c in centers]
    warps = [WarpFunction.identity(t) for _ in signals]

    history: list[float] = []
    executed = 0
    for r in range(rounds):
        assigned = [templates[assignments[i]] for i in range(m)]
        results = parallel_map(
            lambda triple: solve(triple[0], triple[1], penalties, params,
                                 stage_times=t, warm_start=triple[2]),
            zip(signals, assigned, warps), n_jobs=n_jobs)
        warps = [res.warp for res in results]
        warped_times = np.stack([w(t) for w in warps])
        warped_vals = np.stack([signals[i](warped_times[i]) for i in range(m)])

        for j in range(num_clusters):
            members = np.nonzero(assignments == j)[0]
            if members.size:
                templates[j] = Signal(knot_times=t,
                                      knot_values=update_target(warped_vals[members], loss))

        fit = np.empty((m, num_clusters))
        for j in range(num_clusters):
            lv = loss_value_pair(loss, warped_vals, templates[j](t)[None],
                                 warped_times, t[None, :])
            fit[:, j] = np.sum(gaps[None, :] * lv[:, :-1], axis=1)
        assignments = np.argmin(fit, axis=1).astype(np.intp)

        reg_costs = np.empty(m)
        for i in range(m):
            problem = WarpProblem(x=signals[i], y=templates[assignments[i]],
                                  penalties=penalties, s_min=s_min, s_max=s_max)
            b = evaluate_objective(problem, t, warps[i](t))
            reg_costs[i] = b.cum_reg + b.inst_reg + b.inst2_reg
        per_signal = fit[np.arange(m), assignments] + reg_costs

        for j in range(num_clusters):
            if not np.any(assignments == j):
                worst = int(np.argmax(per_signal))
                assignments[worst] = j
                templates[j] = Signal(knot_times=t, knot_values=warped_vals[worst])
                per_signal[worst] = reg_costs[worst]

        objective = float(np.sum(per_signal))
        history.append(objective)
        executed = r + 1
        if r > 0 and history[-2] - history[-1] < _EARLY_STOP_REL * max(abs(history[-2]), 1e-15):
            break
    return ClusterResult(assignments=assignments, templates=templates, warps=warps,
                         objective_history=history, rounds=executed, seed=int(seed))
