"""Exact minimum-cost warp path on the candidate trellis by forward dynamic
programming.

Stage costs carry the fit loss and the cumulative-warp penalty, transition
costs carry the instantaneous-rate penalty; both are weighted by the stage
spacing so a path's total cost is the Riemann-sum objective. Transitions
whose slope leaves the box [s_min, s_max] cost +inf, which subsumes path
feasibility. An expanded-state sweep handles the optional second-derivative
penalty at O(N*M^3).
"""

from __future__ import annotations

from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .grid import Grid
from .penalty import PenaltySpec, _kind_value, loss_value_pair
from .signal import Signal

__all__ = [
    "WarpProblem",
    "ObjectiveBreakdown",
    "Trellis",
    "DpSolution",
    "NoFeasiblePathError",
    "node_cost",
    "edge_cost",
    "node_cost_matrix",
    "shortest_path",
    "shortest_path_second_order",
    "second_derivative",
    "evaluate_objective",
]


class NoFeasiblePathError(RuntimeError):
    """Raised when every terminal candidate has cost +inf."""


def _box_tolerance(s_min: float, s_max: float) -> float:
    # The slope box is closed; candidate geometries routinely put transitions
    # exactly on its boundary (e.g. rows tracking the s_min envelope), where
    # float rounding of (tau' - tau) / dt can land an ulp outside. Membership
    # is therefore tested with a tiny relative slack.
    return 1e-9 * max(1.0, abs(s_min), abs(s_max))


@dataclass(frozen=True)
class WarpProblem:
    """One warping instance: signals, penalties, and the effective slope box.

    With ``symmetric=True`` the target is evaluated at the mirrored time
    ``2 t - tau`` instead of ``t``, which realizes bidirectional warping
    symmetric about the identity with a single warp variable.
    """

    x: Signal
    y: Signal
    penalties: PenaltySpec
    s_min: float
    s_max: float
    symmetric: bool = False


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """Weighted objective components; they sum to ``total`` exactly."""

    loss: float
    cum_reg: float
    inst_reg: float
    inst2_reg: float = 0.0

    @property
    def total(self) -> float:
        return self.loss + self.cum_reg + self.inst_reg + self.inst2_reg


@dataclass(frozen=True)
class Trellis:
    """Filled DP arrays kept for inspection and testing."""

    grid: Grid
    node_cost: np.ndarray     # (N, M)
    value: np.ndarray         # (N, M) cost-to-come
    backpointers: np.ndarray  # (N, M); row i holds the chosen index at stage i-1


@dataclass(frozen=True)
class DpSolution:
    tau: np.ndarray
    objective: float          # DP-accumulated path cost
    breakdown: ObjectiveBreakdown
    node_seconds: float
    path_seconds: float
    trellis: Trellis | None = None


def _pair_values(problem: WarpProblem, tau, t):
    """Warped and target values at the given path points, last axis the
    vector dimension. ``tau`` may have any shape; ``t`` must broadcast."""
    tau = np.asarray(tau, dtype=float)
    xv = problem.x(tau)
    if problem.symmetric:
        yv = problem.y(2.0 * np.asarray(t, dtype=float) - tau)
    else:
        yv = np.broadcast_to(problem.y(t), xv.shape)
    return xv, yv


def node_cost_matrix(problem: WarpProblem, grid: Grid) -> np.ndarray:
    """Per-stage costs for every candidate; the terminal stage costs zero."""
    t = grid.t
    cand = grid.candidates
    dts = np.diff(t)
    pen = problem.penalties
    xv, yv = _pair_values(problem, cand[:-1], t[:-1, None])
    stage = loss_value_pair(pen.loss, xv, yv, cand[:-1],
                            np.broadcast_to(t[:-1, None], cand[:-1].shape))
    if pen.lambda_cum > 0:
        stage = stage + pen.lambda_cum * _kind_value(pen.reg_cum, cand[:-1] - t[:-1, None])
    node = np.zeros_like(cand)
    node[:-1] = dts[:, None] * stage
    return node


def node_cost(problem: WarpProblem, grid: Grid, i: int, j: int) -> float:
    """Cost of candidate ``j`` at stage ``i`` (0-based); 0 at the last stage."""
    n = grid.num_stages
    if i == n - 1:
        return 0.0
    t_i = grid.t[i]
    value = grid.candidates[i, j]
    pen = problem.penalties
    xv, yv = _pair_values(problem, np.asarray(value), np.asarray(t_i))
    stage = float(loss_value_pair(pen.loss, xv, yv, np.asarray(value), np.asarray(t_i)))
    if pen.lambda_cum > 0:
        stage = stage + pen.lambda_cum * float(_kind_value(pen.reg_cum, value - t_i))
    return (grid.t[i + 1] - t_i) * stage


def _edge_fn(problem: WarpProblem):
    """Vectorized (M, M) transition-cost builder for one stage."""
    pen = problem.penalties
    spec = pen.reg_inst
    lam = pen.lambda_inst
    tol = _box_tolerance(problem.s_min, problem.s_max)
    s_min, s_max = problem.s_min - tol, problem.s_max + tol

    def edges(dt, row, row_next):
        slopes = (row_next[None, :] - row[:, None]) / dt
        feasible = (slopes >= s_min) & (slopes <= s_max)
        if lam > 0:
            soft = (dt * lam) * _kind_value(spec, slopes - 1.0)
        else:
            soft = np.zeros_like(slopes)
        return np.where(feasible, soft, np.inf)

    return edges


def edge_cost(problem: WarpProblem, grid: Grid, i: int, j: int, k: int) -> float:
    """Cost of the transition from candidate ``j`` at stage ``i`` to candidate
    ``k`` at stage ``i+1``; +inf when the slope leaves the box."""
    dt = grid.t[i + 1] - grid.t[i]
    slope = (grid.candidates[i + 1, k] - grid.candidates[i, j]) / dt
    tol = _box_tolerance(problem.s_min, problem.s_max)
    if not (problem.s_min - tol <= slope <= problem.s_max + tol):
        return float("inf")
    pen = problem.penalties
    if pen.lambda_inst > 0:
        return (dt * pen.lambda_inst) * float(_kind_value(pen.reg_inst, slope - 1.0))
    return 0.0


def shortest_path(problem: WarpProblem, grid: Grid,
                  materialize_edges: bool = False,
                  keep_trellis: bool = False) -> DpSolution:
    """Globally optimal candidate path by a forward sweep, O(N*M^2).

    Ties in each minimization break toward the smaller candidate index, so
    the result is deterministic. Raises :class:`NoFeasiblePathError` when no
    finite-cost path reaches the terminal stage.
    """
    t0 = perf_counter()
    node = node_cost_matrix(problem, grid)
    node_seconds = perf_counter() - t0

    t1 = perf_counter()
    t = grid.t
    cand = grid.candidates
    n, m = cand.shape
    dts = np.diff(t)
    edge_at = _edge_fn(problem)
    edges = None
    if materialize_edges:
        edges = [edge_at(dts[i], cand[i], cand[i + 1]) for i in range(n - 1)]

    value = np.empty((n, m))
    value[0] = node[0]
    backptr = np.zeros((n, m), dtype=np.intp)
    cols = np.arange(m)
    for i in range(n - 1):
        e = edges[i] if materialize_edges else edge_at(dts[i], cand[i], cand[i + 1])
        total = value[i][:, None] + e
        best = np.argmin(total, axis=0)
        value[i + 1] = total[best, cols] + node[i + 1]
        backptr[i + 1] = best

    end = int(np.argmin(value[-1]))
    if not np.isfinite(value[-1, end]):
        raise NoFeasiblePathError(
            "no feasible warp path: all terminal candidates cost +inf; "
            "increase M or widen [s_min, s_max]"
        )
    path = np.empty(n, dtype=np.intp)
    path[-1] = end
    for i in range(n - 2, -1, -1):
        path[i] = backptr[i + 1, path[i + 1]]
    tau = cand[np.arange(n), path]
    objective = float(value[-1, end])
    path_seconds = perf_counter() - t1

    trellis = Trellis(grid=grid, node_cost=node, value=value, backpointers=backptr) \
        if keep_trellis else None
    breakdown = evaluate_objective(problem, t, tau)
    return DpSolution(tau=tau, objective=objective, breakdown=breakdown,
                      node_seconds=node_seconds, path_seconds=path_seconds,
                      trellis=trellis)


def second_derivative(tau_prev, tau_mid, tau_next, delta_prev, delta_next):
    """Three-point approximation of the warp's second derivative on possibly
    uneven spacing (``delta_prev = t_i - t_{i-1}``, ``delta_next = t_{i+1} - t_i``).

    Reduces to the classic central difference when the spacings are equal.
    """
    d1, d2 = delta_prev, delta_next
    num = 2.0 * (d1 * np.asarray(tau_next) - (d1 + d2) * np.asarray(tau_mid)
                 + d2 * np.asarray(tau_prev))
    return num / (d1 * d2 * (d1 + d2))


def shortest_path_second_order(problem: WarpProblem, grid: Grid,
                               m_cap: int = 30) -> DpSolution:
    """Exact optimum with the second-derivative penalty via pair states.

    The state at each stage is the (previous, current) candidate pair, so the
    sweep costs O(N*M^3); the ``m_cap`` guard refuses grids too large for
    that.
    """
    n, m = grid.candidates.shape
    if m > m_cap:
        raise ValueError(
            f"second-order solve is O(N*M^3); M={m} exceeds the cap {m_cap}. "
            "Reduce M or raise the cap explicitly."
        )
    t0 = perf_counter()
    node = node_cost_matrix(problem, grid)
    node_seconds = perf_counter() - t0

    t1 = perf_counter()
    t = grid.t
    cand = grid.candidates
    dts = np.diff(t)
    pen = problem.penalties
    lam2 = pen.lambda_inst2
    edge_at = _edge_fn(problem)

    value = node[0][:, None] + edge_at(dts[0], cand[0], cand[1]) + node[1][None, :]
    if n == 2:
        flat = int(np.argmin(value))
        j0, j1 = divmod(flat, m)
        if not np.isfinite(value[j0, j1]):
            raise NoFeasiblePathError("no feasible warp path")
        tau = np.array([cand[0, j0], cand[1, j1]])
        objective = float(value[j0, j1])
        path_seconds = perf_counter() - t1
        return DpSolution(tau=tau, objective=objective,
                          breakdown=evaluate_objective(problem, t, tau),
                          node_seconds=node_seconds, path_seconds=path_seconds)

    backptr = np.zeros((n, m, m), dtype=np.intp)
    for s in range(1, n - 1):
        e = edge_at(dts[s], cand[s], cand[s + 1])
        trans = value[:, :, None] + e[None, :, :]
        if lam2 > 0:
            curv = second_derivative(
                cand[s - 1][:, None, None], cand[s][None, :, None],
                cand[s + 1][None, None, :], t[s] - t[s - 1], t[s + 1] - t[s],
            )
            trans = trans + (dts[s] * lam2) * _kind_value(pen.reg_inst2, curv)
        idx = np.argmin(trans, axis=0)
        value = np.take_along_axis(trans, idx[None, :, :], axis=0)[0] + node[s + 1][None, :]
        backptr[s + 1] = idx

    flat = int(np.argmin(value))
    j_prev, j_last = divmod(flat, m)
    if not np.isfinite(value[j_prev, j_last]):
        raise NoFeasiblePathError(
            "no feasible warp path: all terminal states cost +inf; "
            "increase M or widen [s_min, s_max]"
        )
    path = np.empty(n, dtype=np.intp)
    path[-1] = j_last
    path[-2] = j_prev
    for s in range(n - 3, -1, -1):
        path[s] = backptr[s + 2, path[s + 1], path[s + 2]]
    tau = cand[np.arange(n), path]
    objective = float(value[j_prev, j_last])
    path_seconds = perf_counter() - t1
    return DpSolution(tau=tau, objective=objective,
                      breakdown=evaluate_objective(problem, t, tau),
                      node_seconds=node_seconds, path_seconds=path_seconds)


def evaluate_objective(problem: WarpProblem, t, tau) -> ObjectiveBreakdown:
    """Recompute the discretized objective of a warp path from first
    principles (independent of any DP sweep)."""
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    dts = np.diff(t)
    pen = problem.penalties

    xv, yv = _pair_values(problem, tau, t)
    stage_loss = loss_value_pair(pen.loss, xv, yv, tau, t)
    loss = float(np.sum(dts * stage_loss[:-1]))

    if pen.lambda_cum > 0:
        cum = pen.lambda_cum * float(np.sum(dts * _kind_value(pen.reg_cum, tau - t)[:-1]))
    else:
        cum = 0.0

    slopes = np.diff(tau) / dts
    tol = _box_tolerance(problem.s_min, problem.s_max)
    feasible = (slopes >= problem.s_min - tol) & (slopes <= problem.s_max + tol)
    if not np.all(feasible):
        inst = float("inf")
    elif pen.lambda_inst > 0:
        inst = pen.lambda_inst * float(np.sum(dts * _kind_value(pen.reg_inst, slopes - 1.0)))
    else:
        inst = 0.0

    inst2 = 0.0
    if pen.lambda_inst2 > 0 and t.shape[0] >= 3:
        curv = second_derivative(tau[:-2], tau[1:-1], tau[2:], t[1:-1] - t[:-2], t[2:] - t[1:-1])
        inst2 = pen.lambda_inst2 * float(np.sum(dts[1:] * _kind_value(pen.reg_inst2, curv)))

    return ObjectiveBreakdown(loss=loss, cum_reg=cum, inst_reg=inst, inst2_reg=inst2)
