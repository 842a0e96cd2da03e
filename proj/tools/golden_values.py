#!/usr/bin/env python3
"""Straight-line evaluation of the radius, constant and bound formulas at the golden spot values.

Written independently of the C++ sources; the acceptance binary freezes its output.
"""
from math import e, exp, log, pi, sqrt

values = {}

# L0: L=1, t=1, c1=2, |J*|=1, n=1, K=0, alpha_mix=0.5, eps=0.2
values["radius_l0"] = 3 * 1 / 1 + 8 * 2 * (1 * log(e * 1 * 1 * sqrt(0 * 1 + 1) / 1) - log(0.5 * 0.5) + log(2 / 0.2))

# OffDiag: N=4, K=1, theta_min=0.5, t=2, L=1, c1=2, eps=0.5
values["radius_offdiag"] = (3 * 1 * 0.25 / 2
                            + 8 * 2 * (1 * 4 + 7 * log(2 / 0.5) + 4 * log(4) + log(pi ** 2 / 6) + log(2 / 0.5)))

# Scaling: n=1, t=1, alpha=0.75, beta=0.25, eps=0.2, c1=2, L=1, constants 1, norm 1 (display exponent)
growth = (1 - 0.75) / (1 - 0.25)
values["radius_spectral_scaling"] = 3 + 16 * (1 * 1 ** 0 * (4 * 1 * 1) ** growth + log(2 * 1 * 1) ** 2 + log(2 / 0.2))

# Powers: t=1, n=1, L=1, c1=2, norm^2=1, eps=0.2, constants 1
values["radius_spectral_powers"] = 3 / 1 + 16 * (1 + log(1) ** 2 + log(2 / 0.2))

# C1 = max{(Q+KL)KL, sigma^2 + K^2}
for name, (q, k, l, s) in {"c1_a": (1, 1, 1, 1), "c1_b": (2, 1, 3, 0), "c1_c": (0.5, 2, 1, 1)}.items():
    values[name] = max((q + k * l) * k * l, s * s + k * k)

# lambda_t = t / (2 C1)
values["lambda_a"] = 4 / (2 * 2)
values["lambda_b"] = 1 / (2 * 0.5)
values["lambda_c"] = 100 / (2 * 5)

# Lemma 1: T=1, N=1, L=1, K=1, beta_1^2 = 1
values["regret_bound_lemma1"] = 1 * sqrt(8 * 1 * log(1 + 2 * 1 * 1 / 1)) * sqrt(1 + 2 * 1 * 1 * 1)

for k, v in values.items():
    print(f"{k} {v:.17g}")
