# %% [markdown]
# # Exact solutions as anchors
#
# y = -1/x solves PII with mu = 1 and y = -2x solves PIV with
# theta0 = theta_inf = 1/2. Both have a single event at the origin whose
# Heun data is known in closed form.

# %%
from heuniso.accessory import accessory_from_expansion
from heuniso.complex_core import Path
from heuniso.painleve import PainleveKind, integrate_painleve

k2 = PainleveKind.make("P2", mu=1)
tr = integrate_painleve(k2, (1, -1, 1), Path.line(1, -1))
e = tr.events[0]
pair = accessory_from_expansion(k2, e, tr)
print(e.event, e.branch, f"a={e.a:.2e} b={e.b:.2e}")
print(pair.case, "p =", pair.params["p"], f"q = {pair.q:.2e} (tau route {pair.q_tau:.2e})")

# %% [markdown]
# The PIV zero has no closed q; it comes from the tau limit alone.

# %%
k4 = PainleveKind.make("P4", theta0=0.5, thetainf=0.5)
tr = integrate_painleve(k4, (1, -2, -2), Path.line(1, -1))
e = tr.events[0]
pair = accessory_from_expansion(k4, e, tr)
print(e.event, e.branch, "y'(a) =", e.datum)
print(pair.case, "p =", pair.params["p"], f"q = {pair.q:.2e} +- {pair.err_est:.1e}")

# %% [markdown]
# Away from exact solutions: seed PV at a simple pole from its local series,
# integrate across and check that the fitted (a, b) come back.

# %%
from heuniso.painleve import branches, seed_from_series

k5 = PainleveKind.make("P5", theta0=0.3, theta1=0.45, thetainf=0.7)
a, b = 1.3 + 0.2j, 0.15 - 0.1j
br = next(x for x in branches(k5, "pole") if x.label == "eps+")
tr = integrate_painleve(k5, seed_from_series(k5, br, a, b, -0.12), Path.line(a - 0.12, a + 0.12))
e = tr.events[0]
pair = accessory_from_expansion(k5, e, tr)
print(f"fit a err {abs(e.a - a):.1e}, b err {abs(e.b - b):.1e}")
print(f"{pair.case}: closed q {pair.q_closed:.8f}, tau q {pair.q_tau:.8f}")
