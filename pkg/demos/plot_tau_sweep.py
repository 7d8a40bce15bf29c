"""
Sweeping the fusion threshold
=============================

Score the fixture corpus at a range of thresholds.  At 0 nearly everything
comes from the context model; at 1 everything comes from set covering.
"""

import numpy as np

import toporesolve as tr
from toporesolve.evaluation import tau_sweep

g = tr.load_fixture_gazetteer()
with tr.fixture_path("fixture_corpus.json").open(encoding="utf-8") as fh:
    docs = tr.load_corpus(fh)

taus = np.round(np.linspace(0.0, 1.0, 21), 2)
rows = tau_sweep(docs, g, tr.CbhConfig(), taus)

print(f"{'tau':>5} {'P':>7} {'R':>7} {'F1':>7}")
for tau, m in rows:
    print(f"{tau:5.2f} {m.precision:7.4f} {m.recall:7.4f} {m.f1:7.4f}")

# where does F1 peak on this tiny corpus?
f1 = np.array([m.f1 for _, m in rows])
best = taus[f1 == f1.max()]
print("best F1 at tau in", best.tolist())

###############################################################################
# With matplotlib installed the curve is one call away.
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    plt.plot(taus, [m.precision for _, m in rows], label="precision")
    plt.plot(taus, f1, label="F1")
    plt.xlabel("tau")
    plt.legend()
    plt.savefig("tau_sweep.png", dpi=120)
