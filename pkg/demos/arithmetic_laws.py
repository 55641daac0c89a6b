# %% [markdown]
# # Growth laws at desk scale
#
# Sweeps over N with the quantities the library tracks: the Wilf-type double
# sum W(N) against log N, the count of quadruples with n nu = m mu against
# N^2 log N, and a completely multiplicative identity for the Liouville
# function evaluated two ways.

# %%
from dirichlet_cauchy.mult_kernel import CMFunction, f1_check
from dirichlet_cauchy.suites import sweep_acz, sweep_wilf2

# %%
sw = sweep_wilf2(16, 4096)
for N, W, ratio in sw.rows:
    print(f"N={N:>5}  W={W:9.4f}  W/log N={ratio:.4f}")

# %%
acz = sweep_acz(256, 2000, points=6)
print(f"fitted a = {acz.summary['a']:.4f} against 12/pi^2 = {acz.summary['target']:.4f}")

# %% [markdown]
# The divisor series and the bilinear form agree within the combined
# truncation budget.

# %%
c = f1_check(CMFunction.liouville(), 1.0, 0.0, M=100_000, N=20_000)
print(f"series {c.lhs:.8f}  form {c.rhs:.8f}  |diff| {c.difference:.1e}  budget {c.budget:.1e}")
