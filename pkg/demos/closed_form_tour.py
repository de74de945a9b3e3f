#!/usr/bin/env python3
"""Tour of the closed-form residual SI statistics.

Walks through the moment formulas and the Gamma moment matching for a few
full-duplex MIMO configurations, and shows that the special-case formulas
(single-user, Rayleigh, massive MIMO) line up with the general matching.

Run:
    python3 demos/closed_form_tour.py
"""
import numpy as np

from fdsim import (
    RicianSpec,
    SpecialCase,
    SystemGeometry,
    gamma_mimo,
    gamma_siso,
    gamma_special,
    moment1,
    moment2,
    si_variance,
)

spec = RicianSpec(mu=0.5, nu=1.0)
print(f"SI channel entries: CN(mu={spec.mu}, nu^2={spec.nu**2})")
print(f"Rician factor {spec.varpi:.3f}, total entry power {spec.omega:.3f}\n")

# SISO first: a single-antenna FD radio's SI gain |h|^2.
p = gamma_siso(spec)
print(f"SISO matching: Gamma(kappa={p.kappa:.6f}, theta={p.theta:.6f})")
print(f"  mean {p.mean:.4f} (= mu^2 + nu^2), variance {p.variance:.4f}\n")

# The MIMO node: moments and matching for a few geometries.
print(f"{'M':>4} {'N':>4} {'K':>3} {'m1':>8} {'m2':>10} {'var':>10} "
      f"{'kappa':>10} {'theta':>10}")
for M, N, K in [(16, 8, 1), (16, 8, 3), (8, 8, 4), (64, 64, 4)]:
    geom = SystemGeometry(L=1, K=K, M=M, N=N)
    g = gamma_mimo(geom, spec)
    print(f"{M:>4} {N:>4} {K:>3} {moment1(K, spec):>8.4f} "
          f"{moment2(geom, spec):>10.4f} {si_variance(geom, spec):>10.4f} "
          f"{g.kappa:>10.6f} {g.theta:>10.6f}")

# The mean is always K (mu^2 + nu^2): the matching preserves it exactly.
print("\nMean preservation: kappa * theta == K (mu^2 + nu^2) for every row above.")

# Special cases.  Single-user equals the general matching at K = 1:
geom = SystemGeometry(L=1, K=1, M=16, N=8)
su = gamma_special(SpecialCase.SINGLE_USER, geom, spec)
g = gamma_mimo(geom, spec)
print(f"\nSingle-user row:     kappa={su.kappa:.9f} theta={su.theta:.9f}")
print(f"general matching:    kappa={g.kappa:.9f} theta={g.theta:.9f}")

# Massive MIMO is the M = N -> infinity limit:
print("\nMassive-MIMO limit (K=2):")
mm = gamma_special(SpecialCase.MASSIVE_MIMO, SystemGeometry(L=1, K=2, M=8, N=8), spec)
for side in (16, 128, 2048):
    g = gamma_mimo(SystemGeometry(L=1, K=2, M=side, N=side), spec)
    err = abs(g.kappa - mm.kappa) / mm.kappa
    print(f"  M=N={side:>5}: kappa={g.kappa:.6f} (limit {mm.kappa:.6f}, "
          f"rel dev {err:.2e})")

# The Rayleigh row is Table-verbatim with max(N, M); note it differs from
# the mu -> 0 limit of the general matching when N > M.
ray_geom = SystemGeometry(L=1, K=2, M=4, N=8)
ray = gamma_special(SpecialCase.RAYLEIGH_CHANNEL, ray_geom, RicianSpec(0.0, 1.0))
lim = gamma_mimo(ray_geom, RicianSpec(0.0, 1.0))
print(f"\nRayleigh row (M=4, N=8, K=2):      kappa={ray.kappa:.4f} theta={ray.theta:.4f}")
print(f"mu->0 limit of general matching:   kappa={lim.kappa:.4f} theta={lim.theta:.4f}")
print("(the row uses max(N, M); the limit carries M; both are exposed)")
