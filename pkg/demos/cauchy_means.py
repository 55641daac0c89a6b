# %% [markdown]
# # Three ways to one number
#
# The Cauchy mean of |D(st)|^(2q) can be computed exactly as a kernel sum over
# the coefficients of D^q, as a telescoping sum of squared tails, or by brute
# numerical integration.  This script runs all three on a random polynomial and
# shows the s -> 0 and s -> infinity limits.

# %%
import numpy as np

from dirichlet_cauchy import (DirichletPoly, cauchy_mean_2q, cauchy_mean_quadrature,
                              cauchy_mean_telescope, limit_s_infinity)

rng = np.random.default_rng(0)
x = np.sqrt(rng.random(40)) * np.exp(2j * np.pi * rng.random(40))
poly = DirichletPoly(x, sigma=0.3)

# %%
for q in (1, 2):
    values = {name: fn(poly, 0.8, q).value
              for name, fn in [("kernel", cauchy_mean_2q), ("telescope", cauchy_mean_telescope),
                               ("quadrature", cauchy_mean_quadrature)]}
    spread = max(values.values()) - min(values.values())
    print(f"q={q}: " + ", ".join(f"{k}={v:.12f}" for k, v in values.items())
          + f"  spread={spread:.1e}")

# %% [markdown]
# As s grows the Cauchy weight flattens relative to the oscillation, and the
# mean tends to the sum of squared coefficients of D^q (only coincident
# products survive).  At s = 0 it is simply |D(0)|^(2q).

# %%
for s in (0.0, 0.1, 1.0, 10.0, 100.0):
    print(f"s={s:>6}: {cauchy_mean_2q(poly, s, 2).value:.8f}")
print(f"limit : {limit_s_infinity(poly, 2):.8f}")
print(f"|D(0)|^4 = {abs(np.sum(poly.weighted())) ** 4:.8f}")
