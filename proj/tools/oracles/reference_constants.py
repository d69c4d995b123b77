#!/usr/bin/env python3
"""High-precision reference scalars frozen into the C++ tests.

Every value below is computed from the defining formula alone, with mpmath
at 50 digits, independently of the library implementation. Run and paste
the printed literals into the tests; do not import library code here.
"""
import mpmath as mp

mp.mp.dps = 50


def show(name, value):
    print(f"{name:38s} = {mp.nstr(mp.mpf(value), 20)}")


# --- small closed-form constants -------------------------------------------
show("two_over_sqrt3", 2 / mp.sqrt(3))            # spectral norm of the three-term witness example
show("two_sqrt2", 2 * mp.sqrt(2))                 # nuclear norm of the all-ones 2x2x2 tensor
show("one_plus_3sqrt3_over_2", 1 + 3 * mp.sqrt(3) / 2)   # violating witness: RHS of the failed inequality
show("one_plus_3sqrt3_over_4", 1 + 3 * mp.sqrt(3) / 4)   # halved witness: RHS of the holding inequality
show("sqrt3", mp.sqrt(3))                         # HS norm of the three-unit-entry tensor
show("sqrt8", mp.sqrt(8))                         # HS norm of all-ones 2x2x2; also alpha for e1^3 in 2x2x2

# --- rbar(ranks, dims) = sqrt((r1*r2*d3 + r1*r3*d2 + r2*r3*d1)/d), d = d1+d2+d3
def rbar(r, d):
    num = r[0] * r[1] * d[2] + r[0] * r[2] * d[1] + r[1] * r[2] * d[0]
    return mp.sqrt(mp.mpf(num) / sum(d))

show("rbar_111_222", rbar((1, 1, 1), (2, 2, 2)))
show("rbar_222_10", rbar((2, 2, 2), (10, 10, 10)))
show("rbar_121_345", rbar((1, 2, 1), (3, 4, 5)))

# --- projector rank d1*r2*r3 + (d2-r2)*r1*r3 + (d3-r3)*r1*r2 ----------------
def prank(r, d):
    return d[0] * r[1] * r[2] + (d[1] - r[1]) * r[0] * r[2] + (d[2] - r[2]) * r[0] * r[1]

print("prank_111_222", prank((1, 1, 1), (2, 2, 2)))
print("prank_222_444", prank((2, 2, 2), (4, 4, 4)))
print("prank_222_888", prank((2, 2, 2), (8, 8, 8)))
print("prank_122_345", prank((1, 2, 2), (3, 4, 5)))

# --- batch count: smallest integer n2 with n2 >= log(sqrt(32) d1d2d3 / sqrt(n)) / log(1/tau)
def batches(tau, n, dims):
    D = dims[0] * dims[1] * dims[2]
    bound = -mp.log(mp.sqrt(32) * D / mp.sqrt(n)) / mp.log(tau)
    return bound, max(1, int(mp.ceil(bound)))

b, nb = batches(mp.mpf(1) / 2, 1000, (10, 10, 10))
show("batches_bound_tau0.5_n1000_d10", b)
print("required_batches_tau0.5_n1000_d10", nb)
b, nb = batches(mp.mpf(1) / 4, 1000, (10, 10, 10))
show("batches_bound_tau0.25_n1000_d10", b)
print("required_batches_tau0.25_n1000_d10", nb)
b, nb = batches(mp.mpf(1) / 4, 400, (8, 8, 8))
show("batches_bound_tau0.25_n400_d8", b)
print("required_batches_tau0.25_n400_d8", nb)

# --- sample-size threshold (threshold formula, case with two polylog terms) --
# q1 = (beta + log d)^2 * alpha0^2 * r * log d
# q2 = (1 + beta) * (log d) * mu0^2 * r^2
# value = c0/delta2 * ( sqrt(q1*(1+beta)/delta1 * d1d2d3) + q1*d^(1+delta1) + q2*d^(1+delta2) )
def threshold(dims, r, mu0, alpha0, beta, delta1, delta2, c0):
    d = sum(dims)
    D = dims[0] * dims[1] * dims[2]
    logd = mp.log(d)
    q1 = (beta + logd) ** 2 * alpha0**2 * r * logd
    q2 = (1 + beta) * logd * mu0**2 * r**2
    return (c0 / delta2) * (mp.sqrt(q1 * (1 + beta) / delta1 * D)
                            + q1 * d ** (1 + delta1) + q2 * d ** (1 + delta2))

d30 = mp.mpf(30)
t = threshold((10, 10, 10), 1, 1, 1, 1, 1 / mp.log(d30), 1 / mp.log(d30), 1)
show("threshold_d10_r1_unit", t)

# --- tail bound shapes -------------------------------------------------------
# without-replacement / iid operator bound: 2 r^2 d exp(-(tau^2/2)/(1+2 tau/3) * n/(mu^2 r^2 d))
def op_bound(tau, n, mu, r, d, prefactor):
    expo = -(tau**2 / 2) / (1 + 2 * tau / 3) * (n / (mu**2 * r**2 * d))
    return prefactor * mp.e**expo

show("opnorm_bound_tau.5_n150_mu1.5_r1_d18", op_bound(mp.mpf(1) / 2, 150, mp.mpf(3) / 2, 1, 18, 2 * 1 * 18))
show("maxnorm_bound_tau.5_n1_150_mu1.5_r1_d18_216", op_bound(mp.mpf(1) / 2, 150, mp.mpf(3) / 2, 1, 18, 2 * 216))

# Bernstein remainder of the symmetrization bound:
# 4 exp( -(n t^2/2) / (eta^2 + 2 eta t sqrt(d1d2d3)/3) )
def sym_tail(n, t, eta, D):
    return 4 * mp.e ** (-(n * t**2 / 2) / (eta**2 + 2 * eta * t * mp.sqrt(D) / 3))

show("sym_tail_n64_t1_eta1_D64", sym_tail(64, 1, 1, 64))

# fiber-occupancy tail bound d^(-beta-1)/3 and its threshold
# nu1 = max(d^delta1 * e * n * p, (3+beta)/delta1), p = max(dims)/(d1 d2 d3)
def aspect_refs(dims, n, beta, delta1):
    d = sum(dims)
    D = dims[0] * dims[1] * dims[2]
    p = mp.mpf(max(dims)) / D
    nu1 = max(d**delta1 * mp.e * n * p, (3 + beta) / delta1)
    return nu1, d ** mp.mpf(-beta - 1) / 3

nu1, bnd = aspect_refs((6, 6, 6), 60, 1, 1 / mp.log(18))
show("aspect_nu1_d666_n60", nu1)
show("aspect_bound_d18_beta1", bnd)
nu1, bnd = aspect_refs((6, 6, 6), 20, 1, 1 / mp.log(18))
show("aspect_nu1_d666_n20", nu1)

# thinning constant upper bound 1/C <= sqrt(2 + 2(d-1)/(2^m - 1))
def inv_c_bound(m, d):
    return mp.sqrt(2 + mp.mpf(2 * (d - 1)) / (2**m - 1))

for d in range(1, 7):
    m = max(1, int(mp.ceil(mp.log(d, 2))))
    show(f"inv_c_bound_m{m}_d{d}", inv_c_bound(m, d))
show("inv_c_bound_m3_d4", inv_c_bound(3, 4))
