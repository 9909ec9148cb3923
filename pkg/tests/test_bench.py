import numpy as np
from scipy import stats

from puwbench.bench import bench_samples, bench_task


def test_kov_solve_ops_closed_form():
    rows = bench_task("kov", 3, n=256, d=16)
    solve = next(r for r in rows if r[1] == "solve")
    assert solve[3] == solve[5] == 256 * 256 * 16


def test_tsp_verify_ops_linear_in_n():
    ns = [20, 40, 60, 80, 100]
    ops = [bench_samples("tsp", 2, cities=n, restarts=10)["verify"][0].mean() for n in ns]
    fit = stats.linregress(ns, ops)
    assert fit.rvalue**2 > 0.99


def test_op_columns_reproducible():
    a = bench_task("tsp", 5, seed=3, cities=15)
    b = bench_task("tsp", 5, seed=3, cities=15)
    assert [r[:6] for r in a] == [r[:6] for r in b]
    assert np.all(np.array([r[3] for r in a]) > 0)
