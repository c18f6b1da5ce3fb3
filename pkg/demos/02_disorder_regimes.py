"""The three disorder regimes in one table.

Light fitness tails reproduce the constant-fitness exponent 1 + theta; a
heavy tail with alpha in (2, 1+theta) wins and imposes its own exponent
alpha; an infinite-mean tail (alpha < 2) destroys the stationary picture
altogether: almost all vertices keep in-degree zero.  The Hill estimates
of the simulated degree tails track the predicted exponent minus one (the
CCDF index) in the first two phases.
"""

from paflab import ModelKind, ParetoTail, Uniform
from paflab.harness import ExperimentConfig, compare_regimes

config = ExperimentConfig(
    experiment="regime_scan",
    model=ModelKind.paffd(1),
    fitness=Uniform(0.0, 1.0),
    n_target=2 ** 17,
    # late checkpoints only: the log-log slope needs the transient gone
    checkpoints=tuple(2 ** j for j in range(12, 18)),
    replications=8,
    master_seed=7,
    outputs="unused",
)

specs = [
    Uniform(0.0, 1.0),        # weak disorder     (theta = 1.5, exponent 2.5)
    ParetoTail(3.0, 1.0, 1.0),  # weak disorder   (beta=3 > theta=2.5)
    ParetoTail(1.5, 1.0, 1.0),  # strong disorder (alpha = 2.5 < 1+theta = 5)
    ParetoTail(0.5, 1.0, 1.0),  # extreme disorder (alpha = 1.5)
]

rows = compare_regimes(config, specs)
header = ("spec", "m", "regime", "predicted tau", "hill", "hill(f/2)", "hill(2f)",
          "slope", "zero first", "zero final")
widths = (34, 3, 10, 14, 7, 9, 9, 7, 11, 11)
print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
for row in rows:
    cells = [str(row[0]), str(row[1]), row[2]] + [
        f"{v:.3f}" if v == v else "-" for v in row[3:]
    ]
    print("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
