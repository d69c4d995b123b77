#!/usr/bin/env python3
"""Reference spectral norms for 2x2x2 tensors, frozen into the C++ tests.

For d1=2 the rank-one maximization collapses to one angle: with
u = (cos t, sin t), the best (v, w) pair is the top singular pair of
M(t) = cos(t) X[0,:,:] + sin(t) X[1,:,:], so

    ||X|| = max_t sigma_max(M(t)),  t in [0, pi)

(u and -u give the same value). A dense grid plus local golden-section
refinement pins the value far below the 1e-4 comparison tolerance. This
is independent of the library's alternating power iteration.
"""
import numpy as np

# Arbitrary fixed test tensor, canonical entry order (c fastest):
# values[(a*2 + b)*2 + c] = X(a+1, b+1, c+1)
FIXED = np.array([0.9572, -0.8003, 0.1419, 0.4218,
                  0.9157, -0.7922, 0.6557, 0.0357]).reshape(2, 2, 2)

# Three-term unit-entry witness: e1 x e2 x e2 + e2 x e1 x e2 + e2 x e2 x e1.
U = np.zeros((2, 2, 2))
U[0, 1, 1] = U[1, 0, 1] = U[1, 1, 0] = 1.0

ONES = np.ones((2, 2, 2))


def smax(X, t):
    return np.linalg.svd(np.cos(t) * X[0] + np.sin(t) * X[1], compute_uv=False)[0]


def spectral(X, grid=2_000_001):
    ts = np.linspace(0.0, np.pi, grid)
    vals = np.array([np.linalg.svd(c * X[0] + s * X[1], compute_uv=False)[0]
                     for c, s in zip(np.cos(ts[:: grid // 20001]), np.sin(ts[:: grid // 20001]))])
    # coarse pass above picks the basin; refine with golden section
    k = int(np.argmax(vals))
    step = ts[grid // 20001]
    lo, hi = ts[::grid // 20001][k] - step, ts[::grid // 20001][k] + step
    phi = (np.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    for _ in range(200):
        if smax(X, c) < smax(X, d):
            a = c
        else:
            b = d
        c, d = b - phi * (b - a), a + phi * (b - a)
    t = (a + b) / 2
    return smax(X, t)


for name, X in [("fixed", FIXED), ("witness3", U), ("all_ones", ONES)]:
    print(f"spectral_{name} = {spectral(X):.17g}")
