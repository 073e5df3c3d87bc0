"""Regularized time warping on [0, 1] solved exactly on a candidate trellis.

The warp minimizing a fit loss plus cumulative- and instantaneous-warp
penalties is found by dynamic programming over per-stage candidate values,
then sharpened by iterative range refinement. On top of the single-pair
solve the package provides warped distances, out-of-sample validation for
penalty selection, group alignment to a learned target (optionally centered),
and time-warped clustering, plus a batch CLI (``python -m timewarp`` or the
``timewarp`` script).
"""

from .alignment import (AlignmentResult, ClusterResult, align, cluster,
                        recenter, update_target)
from .dp import (DpSolution, NoFeasiblePathError, ObjectiveBreakdown, Trellis,
                 WarpProblem, evaluate_objective, second_derivative,
                 shortest_path, shortest_path_second_order)
from .grid import Grid, GridInfeasibleError, build, compute_bounds, refine
from .penalty import (LossSpec, PenaltySpec, RegularizerSpec, loss_value,
                      loss_value_pair, reg_cum_value, reg_inst_value,
                      register_loss, register_regularizer)
from .signal import Signal
from .solver import (SolveParams, SolveResult, WarpFunction, distance,
                     softmax_features, solve, solve_symmetric,
                     symmetric_distance)
from .validation import (TimeSplit, ValidationReport, grid_search, split_times,
                         train_test_losses, warp_errors)

__version__ = "0.1.0"

__all__ = [
    "Signal",
    "LossSpec",
    "RegularizerSpec",
    "PenaltySpec",
    "loss_value",
    "loss_value_pair",
    "reg_cum_value",
    "reg_inst_value",
    "register_loss",
    "register_regularizer",
    "Grid",
    "GridInfeasibleError",
    "compute_bounds",
    "build",
    "refine",
    "WarpProblem",
    "Trellis",
    "DpSolution",
    "ObjectiveBreakdown",
    "NoFeasiblePathError",
    "shortest_path",
    "shortest_path_second_order",
    "second_derivative",
    "evaluate_objective",
    "WarpFunction",
    "SolveParams",
    "SolveResult",
    "solve",
    "distance",
    "symmetric_distance",
    "solve_symmetric",
    "softmax_features",
    "TimeSplit",
    "ValidationReport",
    "split_times",
    "train_test_losses",
    "warp_errors",
    "grid_search",
    "AlignmentResult",
    "ClusterResult",
    "align",
    "update_target",
    "recenter",
    "cluster",
]
