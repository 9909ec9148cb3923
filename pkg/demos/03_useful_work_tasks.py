"""
Useful-work tasks side by side
==============================

k-Orthogonal-Vectors and threshold TSP plugged into the same
generate / solve / verify interface as the hash puzzle, and where their
behaviour departs from it.
"""

import numpy as np

from puwbench.backends import kov, tsp, tsplib
from puwbench.base import FULL, OpCount, SpotCheck
from puwbench.probes import probe_amortization, probe_spot_check, probe_switchability, probe_verification_ratio

rng = np.random.default_rng(3)

# %%
# k-OV: every tuple of vectors, one per set, with no coordinate where all are 1.
inst = kov.random_kov_instance(k=2, n=32, d=12, density=0.5, rng=rng)
proof, ops = kov.kov_solve(inst)
print(f"{len(proof.tuples)} orthogonal pairs, {ops} ops = n^2 d = {32 * 32 * 12}")
full, spot = OpCount(), OpCount()
print("full verify", kov.kov_verify(inst, proof, FULL, full), full.ops, "ops")
print("spot check ", kov.kov_verify(inst, proof, SpotCheck(0.1, seed=1), spot), spot.ops, "ops")

# A sampled check lets one bad tuple in 100 slip through about 90% of the time.
r = probe_spot_check(fraction=0.1, tuples=100, trials=1000)
print(f"spot-check false accepts {r.value:.3f} (expected {r.details['expected']:.3f})")

# Hash-budget parity: the matrix size a 600 s block would need at 4e17 ops/s.
print(f"n for 4e17 ops/s over 600 s: {kov.kov_dimension_for_budget(4e17, 600):.3g}")

# %%
# TSP: a tour is a valid proof when it costs no more than a threshold.
berlin = tsplib.load_bundled("berlin52")
opt = tsplib.bundled_optimal_tour("berlin52")
task = tsp.TspTask(berlin, tsp.tsp_derive_threshold(berlin, alpha=1.05))
tour, ops, restarts = tsp.tsp_solve(task, seed=0, budget=20)
print(f"berlin52 optimum {tsp.tour_cost(berlin, opt.order):.0f}, threshold {task.t_d:.0f}")
if tour is None:
    print(f"no tour under threshold in {restarts} restarts ({ops} ops)")
else:
    print(f"2-opt tour {tsp.tour_cost(berlin, tour.order):.0f} after {restarts} restart(s), {ops} ops")

# %%
# Where the classes part ways.
for backend in ("cryptopuzzle", "kov"):
    sw = probe_switchability(backend, elapsed_fraction=0.9, trials=2000)
    am = probe_amortization(backend, overlap_fraction=0.5)
    print(f"{backend:12s} progress lost on switch at 90%: {sw.value:.2f} +- {sw.dispersion:.2f}; "
          f"cold/warm ratio with half shared: {am.value:.2f}")
# Sparse vectors so proofs carry tuples for SpotCheck to sample.
for r in probe_verification_ratio("kov", trials=20, shape={"k": 2, "n": 64, "d": 8, "density": 0.3}):
    print(f"k-OV {r.statistic}: {r.value:.3g}")
