# %% [markdown]
# # Poles of PI and the triconfluent Heun equation
#
# Every pole a_n of a PI solution gives a triconfluent Heun equation with
# accessory pair (a_n, -28 b_n). All of them should share one set of Stokes
# multipliers. We follow y(0) = y'(0) = 0 along the real axis.

# %%
from heuniso.accessory import accessory_from_expansion, attach_invariants, isomonodromy_set
from heuniso.monodromy import invariants_distance
from heuniso.painleve import PainleveKind, scan_trajectories
from heuniso.tau import LimitRecipe, regularized_limit

P1 = PainleveKind("P1")
poles, trajs = scan_trajectories(P1, (0, 0, 0), (0, 15))
for e in poles:
    print(f"a = {e.a.real:.12f}   b = {e.b.real:+.10f}   fit residual {e.residual:.1e}")

# %% [markdown]
# q has two routes: the closed form -28 b and the regularized limit of the
# tau function, lim 2 (log tau)' - 2/(x - a).

# %%
for tr in trajs:
    for e in tr.events:
        lim = regularized_limit(tr, e, LimitRecipe(factor=2, subtract=2))
        print(f"a = {e.a.real:.6f}   -28b = {-28 * e.b.real:+.9f}   tau limit = {lim.value.real:+.9f}")

# %%
first = accessory_from_expansion(P1, trajs[0].events[0], trajs[0])
pairs = isomonodromy_set(first.spec(), trajs, 3)
attach_invariants(pairs)
for p in pairs:
    s = dict(p.invariants.stokes)
    print(f"(a, q) = ({p.a.real:.6f}, {p.q.real:+.6f})   s0 = {s['0']:.8f}")
print("max pairwise distance:",
      max(invariants_distance(x.invariants, y.invariants) for x in pairs for y in pairs))
