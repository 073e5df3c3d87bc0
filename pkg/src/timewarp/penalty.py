"""Pointwise penalties: the fit loss and the two (extended-valued) warp regularizers.

The loss compares warped and target signal values; the cumulative regularizer
penalizes the accumulated time displacement; the instantaneous regularizer
penalizes the local warping rate and carries the hard slope box (values
outside [slope_min, slope_max] cost +inf). All evaluators are vectorized:
they accept ndarrays and return ndarrays of the broadcast shape, using
float64 with ``inf`` as the extended value.

Custom penalties are registered by name. A custom loss callable has signature
``fn(warped_values, target_values, warped_time, stage_time)`` — both the
warped and target signal values (vector dimension on the last axis) plus the
two time arrays broadcasting against their leading axes — so losses on value
differences and categorical losses on the times themselves are both
expressible. It must return an array of the leading shape. When only a bare
difference is available (:func:`loss_value`), the hook receives it as the
warped values with zero target values. A custom regularizer callable maps an
array elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "LossSpec",
    "RegularizerSpec",
    "PenaltySpec",
    "loss_value",
    "loss_value_pair",
    "reg_cum_value",
    "reg_inst_value",
    "register_loss",
    "register_regularizer",
]

_LOSS_KINDS = ("squared_l2", "l1", "huber", "band", "custom")
_REG_KINDS = ("square", "abs", "zero", "custom")

_custom_losses: dict[str, object] = {}
_custom_regularizers: dict[str, object] = {}


def register_loss(name: str, fn) -> None:
    """Register a custom loss callable ``fn(diff, warped_time, stage_time)``."""
    _custom_losses[name] = fn


def register_regularizer(name: str, fn) -> None:
    """Register a custom elementwise regularizer callable."""
    _custom_regularizers[name] = fn


@dataclass(frozen=True)
class LossSpec:
    """Vector penalty applied to the difference of warped and target values.

    kind is one of ``squared_l2``, ``l1``, ``huber`` (parameter ``huber_m``),
    ``band`` (parameters ``band_eps`` and ``band_norm`` in {"l2", "linf"}),
    or ``custom`` (registered name in ``custom``).
    """

    kind: str = "squared_l2"
    huber_m: float | None = None
    band_eps: float | None = None
    band_norm: str = "l2"
    custom: str | None = None

    def __post_init__(self):
        if self.kind not in _LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind == "huber":
            if self.huber_m is None or not self.huber_m > 0:
                raise ValueError("huber loss needs huber_m > 0")
        if self.kind == "band":
            if self.band_eps is None or not self.band_eps > 0:
                raise ValueError("band loss needs band_eps > 0")
            if self.band_norm not in ("l2", "linf"):
                raise ValueError("band_norm must be 'l2' or 'linf'")
        if self.kind == "custom" and not self.custom:
            raise ValueError("custom loss needs a registered name")


@dataclass(frozen=True)
class RegularizerSpec:
    """Scalar penalty on a warp quantity; may evaluate to +inf.

    ``slope_min``/``slope_max`` form the hard slope box used when the spec
    plays the instantaneous role; they are ignored in the cumulative role.
    """

    kind: str = "square"
    slope_min: float = 0.001
    slope_max: float = 10.0
    custom: str | None = None

    def __post_init__(self):
        if self.kind not in _REG_KINDS:
            raise ValueError(f"unknown regularizer kind {self.kind!r}")
        if not self.slope_min < self.slope_max:
            raise ValueError(
                f"slope_min ({self.slope_min}) must be < slope_max ({self.slope_max})"
            )
        if self.kind == "custom" and not self.custom:
            raise ValueError("custom regularizer needs a registered name")


def _default_loss() -> LossSpec:
    return LossSpec(kind="squared_l2")


def _default_reg() -> RegularizerSpec:
    return RegularizerSpec(kind="square")


@dataclass(frozen=True)
class PenaltySpec:
    """Full penalty configuration: loss plus weighted regularizers.

    ``reg_inst2``/``lambda_inst2`` enable the optional second-derivative term
    used by the expanded-state solver.
    """

    loss: LossSpec = field(default_factory=_default_loss)
    reg_cum: RegularizerSpec = field(default_factory=_default_reg)
    lambda_cum: float = 0.01
    reg_inst: RegularizerSpec = field(default_factory=_default_reg)
    lambda_inst: float = 0.1
    reg_inst2: RegularizerSpec | None = None
    lambda_inst2: float = 0.0

    def __post_init__(self):
        for name in ("lambda_cum", "lambda_inst", "lambda_inst2"):
            w = getattr(self, name)
            if not np.isfinite(w) or w < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {w}")
        if self.lambda_inst2 > 0 and self.reg_inst2 is None:
            object.__setattr__(self, "reg_inst2", _default_reg())

    def with_weights(self, lambda_cum=None, lambda_inst=None, lambda_inst2=None) -> "PenaltySpec":
        kw = {}
        if lambda_cum is not None:
            kw["lambda_cum"] = float(lambda_cum)
        if lambda_inst is not None:
            kw["lambda_inst"] = float(lambda_inst)
        if lambda_inst2 is not None:
            kw["lambda_inst2"] = float(lambda_inst2)
        return replace(self, **kw)


def loss_value(spec: LossSpec, u, warped_time=None, stage_time=None):
    """Evaluate the loss on difference vectors.

    The last axis of ``u`` is the vector dimension; the result drops it.
    Scalar differences should be passed with a trailing axis of length 1.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim == 0:
        u = u[None]
    if spec.kind == "squared_l2":
        return np.sum(u * u, axis=-1)
    if spec.kind == "l1":
        return np.sum(np.abs(u), axis=-1)
    if spec.kind == "huber":
        m = spec.huber_m
        r = np.sqrt(np.sum(u * u, axis=-1))
        return np.where(r <= m, r * r, 2.0 * m * r - m * m)
    if spec.kind == "band":
        if spec.band_norm == "l2":
            r = np.sqrt(np.sum(u * u, axis=-1))
        else:
            r = np.max(np.abs(u), axis=-1)
        return np.where(r <= spec.band_eps, 0.0, 1.0)
    fn = _custom_losses.get(spec.custom)
    if fn is None:
        raise KeyError(f"custom loss {spec.custom!r} is not registered")
    return np.asarray(fn(u, np.zeros_like(u), warped_time, stage_time), dtype=float)


def loss_value_pair(spec: LossSpec, warped_values, target_values,
                    warped_time=None, stage_time=None):
    """Loss of warped signal values against target values.

    Built-in kinds act on the difference; custom hooks see both value arrays
    and both time arrays, so categorical losses on the times are expressible.
    """
    if spec.kind == "custom":
        fn = _custom_losses.get(spec.custom)
        if fn is None:
            raise KeyError(f"custom loss {spec.custom!r} is not registered")
        out = fn(np.asarray(warped_values, dtype=float),
                 np.asarray(target_values, dtype=float), warped_time, stage_time)
        return np.asarray(out, dtype=float)
    return loss_value(spec, np.asarray(warped_values, dtype=float)
                      - np.asarray(target_values, dtype=float),
                      warped_time, stage_time)


def _kind_value(spec: RegularizerSpec, w):
    """Apply the regularizer kind elementwise, without any box."""
    w = np.asarray(w, dtype=float)
    if spec.kind == "square":
        return w * w
    if spec.kind == "abs":
        return np.abs(w)
    if spec.kind == "zero":
        return np.zeros_like(w)
    fn = _custom_regularizers.get(spec.custom)
    if fn is None:
        raise KeyError(f"custom regularizer {spec.custom!r} is not registered")
    return np.asarray(fn(w), dtype=float)


def reg_cum_value(spec: RegularizerSpec, w):
    """Penalty on the cumulative warp (argument: warped time minus time)."""
    return _kind_value(spec, w)


def reg_inst_value(spec: RegularizerSpec, slope):
    """Penalty on the warping rate: +inf outside [slope_min, slope_max], else
    the kind applied to slope − 1."""
    slope = np.asarray(slope, dtype=float)
    inside = (slope >= spec.slope_min) & (slope <= spec.slope_max)
    soft = _kind_value(spec, slope - 1.0)
    return np.where(inside, soft, np.inf)
