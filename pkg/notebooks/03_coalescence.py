# %% [markdown]
# # Jordan types and the coalescence scheme
#
# Each Painleve equation corresponds to a Jordan type of T.  Merging
# eigenvalues of a diagonalizable T (the sixth equation) step by step walks
# down the scheme VI -> V -> IV, III -> II.  The first equation gives a T
# with two Jordan blocks on the same eigenvalue, which is not regular.

# %%
import numpy as np

from okuboflat.okubo import assemble_z, confluence_frame
from okuboflat.painleve import coalescence_table

for row in coalescence_table():
    c = row.classification
    print(f"{row.label:6s} partition {c['partition']:5s} regular {str(c['regular']):5s} "
          f"pattern {str(c['pattern']):5s} match {row.match}")

# %% [markdown]
# ## Confluence
#
# A Jordan block is the limit of diagonal matrices.  With P_eps and Z_eps
# from :func:`confluence_frame`, the error of P_eps Z_eps P_eps^{-1} against
# the Toeplitz block is linear in eps.

# %%
z = [0.3, 0.5 - 0.2j, 0.4 + 0.1j]
Z = assemble_z([3], z)
eps = np.array([1e-1, 1e-2, 1e-3, 1e-4])
err = []
for e in eps:
    P, Ze = confluence_frame(z, e)
    err.append(np.linalg.norm(P @ Ze @ np.linalg.inv(P) - Z))
for e, x in zip(eps, err):
    print(f"eps={e:.0e}  error={x:.3e}")
print("log-log slope", round(float(np.polyfit(np.log(eps), np.log(err), 1)[0]), 4))
