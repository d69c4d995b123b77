#!/usr/bin/env python3
"""Reference counts and maxima over digital vector sets, frozen into C++ tests.

A digital vector of depth m in dimension d has entries in
{0, +-1, +-2^(-1/2), ..., +-2^(-m/2)} and Euclidean norm <= 1. The counts
below come from direct enumeration (exponential, fine at these sizes) and
double as oracles for the library's dynamic-programming counter. The
digitalized spectral values enumerate all triples for small tensors.
"""
import itertools
import numpy as np


def enum_digital(m, d):
    symbols = [0.0] + [s * 2.0 ** (-j / 2.0) for j in range(m + 1) for s in (1.0, -1.0)]
    out = []
    for combo in itertools.product(symbols, repeat=d):
        if sum(x * x for x in combo) <= 1.0 + 1e-12:
            out.append(combo)
    return np.array(out)


for m, d in [(1, 1), (1, 2), (2, 2), (2, 3), (2, 4), (3, 4), (3, 5), (3, 6)]:
    print(f"count_B_m{m}_d{d} = {len(enum_digital(m, d))}")


def digitalized_spectral(X):
    d1, d2, d3 = X.shape
    ms = [max(1, int(np.ceil(np.log2(d)))) for d in (d1, d2, d3)]
    B1, B2, B3 = (enum_digital(m, d) for m, d in zip(ms, (d1, d2, d3)))
    best = 0.0
    for u in B1:
        Xu = np.einsum("a,abc->bc", u, X)
        vals = np.abs(B2 @ Xu @ B3.T)
        best = max(best, vals.max())
    return best


FIXED = np.array([0.9572, -0.8003, 0.1419, 0.4218,
                  0.9157, -0.7922, 0.6557, 0.0357]).reshape(2, 2, 2)
U = np.zeros((2, 2, 2))
U[0, 1, 1] = U[1, 0, 1] = U[1, 1, 0] = 1.0

print(f"digitalized_fixed = {digitalized_spectral(FIXED):.17g}")
print(f"digitalized_witness3 = {digitalized_spectral(U):.17g}")
print(f"digitalized_all_ones = {digitalized_spectral(np.ones((2,2,2))):.17g}")
