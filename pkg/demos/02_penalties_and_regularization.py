#!/usr/bin/env python3
"""How the two regularizers shape the warp.

The objective charges three things: the fit loss, a penalty on cumulative
displacement warp(t)-t, and a penalty on the warping rate warp'(t)-1. Ridge
(square) rate penalties smooth the warp; lasso (absolute value) penalties
drive the rate offset to exactly zero over long stretches. The slope box
[s_min, s_max] is a hard constraint carried inside the rate penalty.
"""

import numpy as np

import timewarp as tw

n = 200
t = np.linspace(0.0, 1.0, n)
x = tw.Signal.from_samples(t, np.sin(2 * np.pi * t) + 0.5 * np.sin(6 * np.pi * t))
bump = 0.05 * np.sin(np.pi * np.clip((t - 0.3) / 0.4, 0.0, 1.0)) ** 2
y = tw.Signal.from_samples(t, x(t + bump))

params = tw.SolveParams(M=60, refinements=4)

print("=== square rate penalty: larger weight, smoother warp ===")
for lam in (0.01, 0.1, 1.0):
    pen = tw.PenaltySpec(lambda_cum=0.0, lambda_inst=lam)
    res = tw.solve(x, y, pen, params)
    roughness = float(np.sum(np.diff(res.warp.slopes()) ** 2))
    print(f"lambda_inst={lam:<5}: loss={res.components.loss:.2e} "
          f"slope roughness={roughness:.2e}")

print()
print("=== absolute rate penalty: slopes snap to exactly 1 ===")
for lam in (0.01, 1.0):
    pen = tw.PenaltySpec(reg_inst=tw.RegularizerSpec(kind="abs"),
                         lambda_cum=0.0, lambda_inst=lam)
    res = tw.solve(x, y, pen, tw.SolveParams(M=60, refinements=8))
    frac = np.mean(np.abs(res.warp.slopes() - 1.0) <= 1e-3)
    print(f"lambda_inst={lam:<5}: fraction of intervals at unit rate = {frac:.2f}")

print()
print("=== loss choices ===")
noisy = tw.Signal.from_samples(t, y(t)[:, 0] + np.where(t == t[n // 2], 3.0, 0.0))
for loss in (tw.LossSpec("squared_l2"),
             tw.LossSpec("huber", huber_m=0.5),
             tw.LossSpec("band", band_eps=0.25)):
    pen = tw.PenaltySpec(loss=loss)
    res = tw.solve(x, noisy, pen, params)
    dev = np.max(np.abs(res.warp.cumulative()))
    print(f"{loss.kind:<11}: objective={res.objective:.4f} max displacement={dev:.4f}")

print()
print("=== hard constraints through extended values ===")
tw.register_regularizer("cap_displacement",
                        lambda w: np.where(np.abs(w) > 0.02, np.inf, 0.0))
pen = tw.PenaltySpec(reg_cum=tw.RegularizerSpec("custom", custom="cap_displacement"),
                     lambda_cum=1.0)
res = tw.solve(x, y, pen, params)
print("with |warp(t)-t| <= 0.02 enforced:",
      "max displacement =", float(np.max(np.abs(res.warp.cumulative()))))
