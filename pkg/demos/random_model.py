# %% [markdown]
# # A random model for the mean value
#
# With Y = log n drawn with probability proportional to n^(-sigma) (n <= N), the
# Cauchy mean of the unit polynomial equals L^(2k) E exp(-s|S~_k|), where S~_k
# is the symmetrized sum of k copies and L = sum n^(-sigma).  Scaling s by the
# spread of S~_k makes the expectation approach E exp(-|g|) for a standard
# Gaussian g.

# %%
import math

from dirichlet_cauchy import DirichletPoly, cauchy_mean_2q
from dirichlet_cauchy.random_model import (YDistribution, c0_closed_form, exp_abs_sym_exact,
                                           theorem_sk_estimate)

# %%
sigma, N, k, s = 0.25, 6, 3, 0.5
y = YDistribution(sigma, N)
lhs = y.L ** (2 * k) * exp_abs_sym_exact(sigma, N, k, s)
rhs = cauchy_mean_2q(DirichletPoly.unit(N, sigma), s, k).value
print(f"exact identity: {lhs:.12f} vs {rhs:.12f}")

# %% [markdown]
# Monte Carlo estimates for growing k.  The deviation from the Gaussian
# constant shrinks until it is hidden by sampling noise.

# %%
print(f"c0 = {c0_closed_form():.10f}")
for k in (25, 100, 400):
    r = theorem_sk_estimate(0.0, 100, k, 200_000, seed=1)
    print(f"k={k:>4}: {r.estimate:.5f} +- {r.stderr:.1e}  (deviation {r.abs_error:.1e})")
