"""Out-of-sample validation for warping penalties.

Stage times are split into train/test point sets (both keeping the interval
boundaries); the warp is fit using only the train points, and Riemann-sum
losses are evaluated separately on each set. When a ground-truth warp is
known, the same sums score the warp error directly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .parallel import parallel_map
from .penalty import LossSpec, PenaltySpec, loss_value, loss_value_pair
from .signal import Signal
from .solver import SolveParams, solve

__all__ = [
    "TimeSplit",
    "ValidationReport",
    "split_times",
    "train_test_losses",
    "warp_errors",
    "grid_search",
]


@dataclass(frozen=True)
class TimeSplit:
    """Disjoint train/test time points; both sets contain 0 and 1."""

    t_train: np.ndarray
    t_test: np.ndarray
    seed: int

    def __post_init__(self):
        for name in ("t_train", "t_test"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr[0] != 0.0 or arr[-1] != 1.0 or np.any(np.diff(arr) <= 0):
                raise ValueError(f"{name} must increase strictly from 0 to 1")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def split_times(t, test_fraction: float, seed: int) -> TimeSplit:
    """Randomly partition stage times into train/test sets.

    Each interior point goes to the test set independently with probability
    ``test_fraction``; the boundaries 0 and 1 belong to both sets. The draw
    is deterministic for a fixed seed.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.shape[0] < 4:
        raise ValueError("need at least 4 time points to split")
    if t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0):
        raise ValueError("times must increase strictly from 0 to 1")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    interior = t[1:-1]
    to_test = rng.random(interior.shape[0]) < test_fraction
    t_test = np.concatenate(([0.0], interior[to_test], [1.0]))
    t_train = np.concatenate(([0.0], interior[~to_test], [1.0]))
    return TimeSplit(t_train=t_train, t_test=t_test, seed=int(seed))


def _riemann_loss(values, points) -> float:
    """Sum of gap-weighted losses over a point set; the last point carries no
    term (as many terms as gaps)."""
    gaps = np.diff(points)
    return float(np.sum(gaps * values[:-1]))


def train_test_losses(x: Signal, y: Signal, penalties: PenaltySpec,
                      params: SolveParams, split: TimeSplit) -> tuple[float, float]:
    """Fit the warp on the train points only, then evaluate the fit loss
    separately over train and test point sets."""
    result = solve(x, y, penalties, params, stage_times=split.t_train)
    return losses_of_warp(x, y, result.warp, penalties.loss, split)


def losses_of_warp(x: Signal, y: Signal, warp, loss: LossSpec,
                   split: TimeSplit) -> tuple[float, float]:
    """Riemann-sum fit losses of an already-fit warp on both point sets."""
    out = []
    for pts in (split.t_train, split.t_test):
        warped = warp(pts)
        vals = loss_value_pair(loss, x(warped), y(pts), warped, pts)
        out.append(_riemann_loss(vals, pts))
    return out[0], out[1]


def warp_errors(warp, warp_true, split: TimeSplit,
                loss: LossSpec | None = None) -> tuple[float, float]:
    """Score a fitted warp against a known ground-truth warp.

    Both arguments may be :class:`WarpFunction` objects or plain callables on
    [0, 1]. The configured loss is applied to the scalar difference at each
    point, gap-weighted as in the train/test losses.
    """
    loss = loss if loss is not None else LossSpec()
    out = []
    for pts in (split.t_train, split.t_test):
        diff = np.asarray(warp_true(pts), dtype=float) - np.asarray(warp(pts), dtype=float)
        vals = loss_value(loss, diff[:, None], None, pts)
        out.append(_riemann_loss(vals, pts))
    return out[0], out[1]


@dataclass(frozen=True)
class ValidationReport:
    """Grid-search result: per-cell test losses and the selected cell.

    ``test_loss``/``train_loss`` have shape (len(lambda_cum_grid),
    len(lambda_inst_grid)); failed cells hold +inf. ``best_cell`` is the
    row-major argmin of ``test_loss`` (ties to the smallest index). The
    warp-error matrices are present only when a ground-truth warp was given.
    """

    lambda_cum_grid: np.ndarray
    lambda_inst_grid: np.ndarray
    train_loss: np.ndarray
    test_loss: np.ndarray
    best_cell: tuple[int, int]
    l_train: float
    l_test: float
    eps_train_matrix: np.ndarray | None = None
    eps_test_matrix: np.ndarray | None = None
    eps_train: float | None = None
    eps_test: float | None = None

    @property
    def best_lambda_cum(self) -> float:
        return float(self.lambda_cum_grid[self.best_cell[0]])

    @property
    def best_lambda_inst(self) -> float:
        return float(self.lambda_inst_grid[self.best_cell[1]])


def grid_search(x: Signal, y: Signal, penalties: PenaltySpec,
                params: SolveParams, lambda_cum_grid, lambda_inst_grid,
                split: TimeSplit, warp_true=None,
                n_jobs: int = 1) -> ValidationReport:
    """Fit one warp per (lambda_cum, lambda_inst) pair on the train points
    and tabulate the test losses.

    A cell whose solve fails records +inf and does not abort the sweep.
    Cells are independent; ``n_jobs`` fans them out onto worker threads
    without changing the (deterministic) result.
    """
    lc = np.asarray(lambda_cum_grid, dtype=float)
    li = np.asarray(lambda_inst_grid, dtype=float)
    if lc.size == 0 or li.size == 0:
        raise ValueError("lambda grids must be nonempty")
    shape = (lc.size, li.size)
    train_loss = np.full(shape, np.inf)
    test_loss = np.full(shape, np.inf)
    eps_train = np.full(shape, np.inf) if warp_true is not None else None
    eps_test = np.full(shape, np.inf) if warp_true is not None else None

    def run_cell(cell):
        lam_c, lam_i = cell
        pen = replace(penalties, lambda_cum=float(lam_c), lambda_inst=float(lam_i))
        try:
            result = solve(x, y, pen, params, stage_times=split.t_train)
        except Exception:
            return None
        l_tr, l_te = losses_of_warp(x, y, result.warp, pen.loss, split)
        errors = None
        if warp_true is not None:
            errors = warp_errors(result.warp, warp_true, split, pen.loss)
        return l_tr, l_te, errors

    cells = [(lam_c, lam_i) for lam_c in lc for lam_i in li]
    outcomes = parallel_map(run_cell, cells, n_jobs=n_jobs)
    for (a, b), outcome in zip(np.ndindex(shape), outcomes):
        if outcome is None:
            continue
        train_loss[a, b], test_loss[a, b], errors = outcome
        if errors is not None:
            eps_train[a, b], eps_test[a, b] = errors
    flat = int(np.argmin(test_loss))
    best = (flat // li.size, flat % li.size)
    return ValidationReport(
        lambda_cum_grid=lc, lambda_inst_grid=li,
        train_loss=train_loss, test_loss=test_loss,
        best_cell=best,
        l_train=float(train_loss[best]), l_test=float(test_loss[best]),
        eps_train_matrix=eps_train, eps_test_matrix=eps_test,
        eps_train=None if eps_train is None else float(eps_train[best]),
        eps_test=None if eps_test is None else float(eps_test[best]),
    )
