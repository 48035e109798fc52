# %% [markdown]
# # Isomonodromy along a trajectory, and the command line
#
# The deformation of Y' = A(z) Y is generated by
# Omega(z) = -(z - T)^{-1} Omega~ B_inf.  Along a fine path the finite
# difference of A must match dOmega/dz + [Omega, A].

# %%
import tempfile
from pathlib import Path

import numpy as np

from okuboflat.cli import main
from okuboflat.isomono import decay_slope, default_probes, isomonodromy_residual
from okuboflat.painleve import default_state, okubo_path
from okuboflat.plotdata import plotdata

state0 = default_state("V")
frames = okubo_path("V", state0, state0.t + np.linspace(0.0, 0.3, 21))
rep = isomonodromy_residual(frames, [2, 5 + 1j, -3])
print(f"PV: worst relative residual {rep.max():.2e} over {len(rep.rows)} probe evaluations")
print("default probes:", np.round(default_probes(frames[0]), 3))

# %% [markdown]
# Omega decays like 1/z at infinity:

# %%
print([round(decay_slope(frames[0], d), 4) for d in frames[0].directions()])

# %% [markdown]
# ## A full run
#
# `okuboflat painleve-run` writes the trajectory, flat frames, all residual
# families and the classification; `okuboflat plotdata` turns completed runs
# into plot-ready tables.

# %%
work = Path(tempfile.mkdtemp())
status = main(["painleve-run", "--kind", "pii", "--samples", "6", "--report", str(work / "pii")])
print("exit status", status)
print((work / "pii" / "summary.json").read_text())
print(plotdata([work / "pii"], work / "plot"))
print((work / "plot" / "residual_vs_sample.csv").read_text().splitlines()[:3])
