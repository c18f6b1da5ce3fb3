"""The limiting point process behind the strong-disorder maximum.

The rescaled fitness landscape converges to a Poisson point process, and
the maximum degree (over u_n) converges to sup f (t^(-1/theta) - 1) over
its points.  That supremum has an explicit Frechet-type law with constant
g(0,1), and the maximizer's time coordinate has CDF g(0,t)/g(0,1).  Both
show up cleanly against 20k sampled functionals, and the simulated graphs
at n = 1e5 already sit close to the limit curve.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import paflab as pl
from paflab import measures, ppp

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

ALPHA, THETA, DELTA = 2.5, 4.0, 1e-2

rng = pl.stream(77, 0)
values, locs, _ = ppp.strong_sup_batch(ALPHA, DELTA, THETA, 20_000, rng)
g01 = ppp.g_integral(THETA, ALPHA, 0.0, 1.0)
print(f"g(0,1) = {g01:.6f} (Beta identity {ppp.g_beta_identity(THETA, ALPHA):.6f})")
print("KS sup vs Frechet-type law:",
      round(measures.ks_statistic(values, lambda x: ppp.frechet_cdf(g01, ALPHA, x)), 4))
print("KS argmax-t vs g(0,t)/g(0,1):",
      round(measures.ks_statistic(locs, lambda t: ppp.law_of_I_cdf(THETA, ALPHA, t)), 4))

# a handful of real graphs for comparison (ParetoTail(1.5) has alpha = 2.5)
spec = pl.ParetoTail(1.5, 1.0, 1.0)
n = 10 ** 5
u_n = pl.quantile_u(spec, n)
sim = []
for rep in range(60):
    g = pl.stream(78, rep)
    st = pl.init_graph(2, "path", pl.ModelKind.paffd(1), spec, g)
    out = pl.grow_to(st, n, checkpoints=[n], rng=g)
    sim.append(out.summaries[0].max_degree / u_n)

fig, axes = plt.subplots(1, 2, figsize=(9, 4))
xs = np.linspace(1e-3, np.quantile(values, 0.99), 400)
axes[0].hist(values, bins=80, range=(0, xs[-1]), density=True, alpha=0.5,
             label="sampled functional")
pdf = np.gradient(ppp.frechet_cdf(g01, ALPHA, xs), xs)
axes[0].plot(xs, pdf, "k-", lw=1.5, label="limit density")
axes[0].hist(sim, bins=25, range=(0, xs[-1]), density=True, histtype="step",
             lw=1.5, label="max Z_n/u_n, n=1e5")
axes[0].set_xlabel("sup f (t^(-1/theta) - 1)")
axes[0].legend(fontsize=8)

ts = np.linspace(0, 1, 200)
axes[1].plot(np.sort(locs), np.linspace(0, 1, len(locs)), label="argmax time ECDF")
axes[1].plot(ts, ppp.law_of_I_cdf(THETA, ALPHA, ts), "k--", label="g(0,t)/g(0,1)")
axes[1].set_xlabel("t")
axes[1].legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "point_process_limit.png", dpi=150)
print(f"figure -> {OUT / 'point_process_limit.png'}")
