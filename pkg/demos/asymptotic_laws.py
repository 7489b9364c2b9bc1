# %% [markdown]
# # Large-n laws for isomonodromy sequences

# %%
import math

from heuniso.asymptotics import (
    che_pole_asymptotic,
    compare_rbhe_synthetic,
    dhe_zero_asymptotic,
    mtw_numeric_zeros,
    rows_to_csv,
)

# %% [markdown]
# RBHE: zeros of PXXXIV on the negative axis. The law is compared with the
# zeros of the leading oscillatory behaviour of y.

# %%
print(rows_to_csv(compare_rbhe_synthetic(1.0, 0.3j, [2, 4, 8, 16])))

# %% [markdown]
# CHE: poles of PV spiral into 0; ln|a_n| drops by 2 pi |Im s| / |s|^2 per step.

# %%
sigma = 0.4 + 0.3j
for n in range(1, 6):
    p = che_pole_asymptotic(n, sigma, 1.2, 0.3, 0.45, 0.7)
    print(f"n={n}  ln|a|={p.log_abs_a:9.4f}  arg a={p.arg_a:9.4f}  q={p.q:.6f}")

# %% [markdown]
# DHE: integrate PIII from the small-x law and locate its zeros. The
# accessory parameter at each zero comes from the tau limit and tends to
# -(mu^2 + 1)/4.

# %%
mu = 1.0
print("law:", [f"{dhe_zero_asymptotic(n, mu)[0]:.3e}" for n in (1, 2)], "q =", dhe_zero_asymptotic(1, mu)[1])
for z in mtw_numeric_zeros(mu, range(2, 6)):
    print(f"k={z.k}  x={z.measured.real:.6e}  law={z.predicted:.6e}  {z.branch:7s} q={z.q.real:+.6f}")
print("zero ratio exp(-pi/(2 mu)) =", math.exp(-math.pi / (2 * mu)))
