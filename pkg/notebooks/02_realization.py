# %% [markdown]
# # Rational connections as Okubo data
#
# A rational connection with poles of finite order is written as
# -B (z - S)^{-1} C with S in Jordan form.  The realization is then reduced
# to a minimal one and completed to a gauge G, which yields an Okubo system
# with exponents (lambda_1, ..., lambda_m, 0, ..., 0).

# %%
import numpy as np

from okuboflat.okubo import rank_reduce
from okuboflat.painleve import default_state, linear_problem
from okuboflat.realize import minimize, probe_points, realization_frame, realize, relative_error, to_okubo

conn = linear_problem("V", default_state("V"))
print("m =", conn.m, " poles:", [(complex(p.a), p.r) for p in conn.poles])

# %% [markdown]
# The block-companion realization uses m (r_k + 1) states per pole.  For the
# rank-two PV problem that is six; the minimal size is three.

# %%
raw = realize(conn)
small = minimize(raw)
print("raw size", raw.N, " minimal size", small.N, " Jordan type", small.jordan_spec().partition())
probes = probe_points([p.a for p in conn.poles], 10)
print(f"pointwise error of the minimal realization: {relative_error(conn.evaluate, small.evaluate, probes):.1e}")

# %% [markdown]
# Going back: the Okubo system of the realization reduces to the original
# connection when its frame is used.

# %%
back = rank_reduce(to_okubo(raw), frame=realization_frame(raw))
print(f"round trip error: {relative_error(conn.evaluate, back.evaluate, probes):.1e}")
sys3 = to_okubo(small)
print("lambda of the 3x3 system:", np.round(sys3.lam, 6))
