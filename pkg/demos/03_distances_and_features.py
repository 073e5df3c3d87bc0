#!/usr/bin/env python3
"""Warped distances between signals, and distance-based features.

The optimal objective value is a distance D(x, y): how well x can be warped
onto y, plus how much warping that took. It is generally asymmetric; a
symmetric variant averages the two directions. Against a set of template
signals, the per-template distances can be softmax-normalized into features.
"""

import numpy as np

import timewarp as tw

n = 150
t = np.linspace(0.0, 1.0, n)
params = tw.SolveParams(M=50, refinements=2)

narrow = tw.Signal.from_samples(t, np.exp(-0.5 * ((t - 0.3) / 0.08) ** 2))
wide = tw.Signal.from_samples(t, 0.6 * np.exp(-0.5 * ((t - 0.6) / 0.2) ** 2))

d_nw = tw.distance(narrow, wide, params=params)
d_wn = tw.distance(wide, narrow, params=params)
print(f"D(narrow, wide) = {d_nw:.5f}")
print(f"D(wide, narrow) = {d_wn:.5f}   (asymmetric by design)")
print(f"symmetric distance = {tw.symmetric_distance(narrow, wide, params=params):.5f}")
print(f"D(x, x) = {tw.distance(narrow, narrow, params=params):.2e}")

print()
print("=== softmax features against waveform templates ===")
templates = [
    tw.Signal.from_samples(t, np.cos(2 * np.pi * t)),
    tw.Signal.from_samples(t, np.tanh(8 * np.cos(2 * np.pi * t)) / np.tanh(8.0)),
    tw.Signal.from_samples(t, (2 / np.pi) * np.arcsin(np.cos(2 * np.pi * t))),
]
probe = tw.Signal.from_samples(t, 1.04 * np.cos(2 * np.pi * (t + 0.02)))
z = tw.softmax_features(probe, templates, sigma=0.05, params=params)
print("distances:", [f"{tw.distance(probe, tpl, params=params):.4f}" for tpl in templates])
print("features :", np.round(z, 4), " (positive exponent: farther template, larger weight)")
print("sum =", z.sum())
