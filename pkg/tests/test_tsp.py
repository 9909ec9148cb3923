import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import BERLIN52_OPTIMUM, tour_length, tsp_optimum
from puwbench import OpCount
from puwbench.base import ZERO_DIGEST
from puwbench.backends import tsp
from puwbench.backends.tsplib import bundled_optimal_tour, format_tsplib, load_bundled, parse_tsplib
from puwbench.errors import TooLarge, TsplibError

EXACT, ROUNDED = tsp.DistanceMode.EUC_2D_EXACT, tsp.DistanceMode.EUC_2D_ROUNDED
SQUARE = tsp.TspInstance([[0, 0], [1, 0], [1, 1], [0, 1]])
TRIANGLE = tsp.TspInstance([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])


def test_distances():
    assert tsp.tsp_distance((0, 0), (3, 4), EXACT) == 5
    assert tsp.tsp_distance((0, 0), (3, 4), ROUNDED) == 5
    assert tsp.tsp_distance((0, 0), (1, 1), ROUNDED) == 1
    assert tsp.tour_cost(TRIANGLE, (0, 1, 2)) == pytest.approx(3)
    assert tsp.tour_cost(TRIANGLE, (2, 1, 0)) == pytest.approx(3)
    assert tsp.tour_cost(SQUARE, (0, 1, 2, 3)) == pytest.approx(4)


def test_square_solve_and_unsatisfiable_threshold():
    tour, ops, restarts = tsp.tsp_solve(tsp.TspTask(SQUARE, 4.0), seed=1)
    assert tsp.tour_cost(SQUARE, tour) == pytest.approx(4)
    assert restarts == 1 and ops > 0
    tour, _, restarts = tsp.tsp_solve(tsp.TspTask(SQUARE, 3.9), budget=5)
    assert tour is None and restarts == 5


def test_verify_rules():
    task = tsp.TspTask(SQUARE, 4.0)
    assert tsp.tsp_verify(task, tsp.TspTour((0, 1, 2, 3)))
    assert not tsp.tsp_verify(task, tsp.TspTour((0, 1, 1, 3)))
    assert not tsp.tsp_verify(task, tsp.TspTour((0, 1, 2)))
    assert not tsp.tsp_verify(task, tsp.TspTour((0, 2, 1, 3)))
    c = OpCount()
    tsp.tsp_verify(task, tsp.TspTour((0, 1, 2, 3)), c)
    assert c.ops == 4


def test_cost_above_threshold_rejected(rng):
    inst = tsp.random_tsp_instance(12, rng, scale=100)
    order = tuple(range(12))
    cost = tour_length(inst.coords.tolist(), order)
    assert tsp.tsp_verify(tsp.TspTask(inst, cost), tsp.TspTour(order))
    assert not tsp.tsp_verify(tsp.TspTask(inst, cost - 1), tsp.TspTour(order))


@pytest.mark.parametrize("inst,want", [(TRIANGLE, 3.0), (SQUARE, 4.0)])
def test_brute_force_small(inst, want):
    tour, cost = tsp.brute_force_optimal(inst)
    assert cost == pytest.approx(want)
    assert tsp.is_permutation(tour.order, inst.n)


@settings(max_examples=15, deadline=None)
@given(st.integers(4, 8), st.integers(0, 2**32 - 1))
def test_brute_force_matches_oracle_and_dominates_2opt(n, seed):
    inst = tsp.random_tsp_instance(n, seed, scale=50)
    tour, cost = tsp.brute_force_optimal(inst)
    assert cost == pytest.approx(tsp_optimum(inst.coords.tolist()), rel=1e-12)
    assert cost == pytest.approx(tsp.tour_cost(inst, tour))
    assert cost <= tsp.baseline_cost(inst, seed=seed) + 1e-9


def test_brute_force_too_large(rng):
    with pytest.raises(TooLarge):
        tsp.brute_force_optimal(tsp.random_tsp_instance(12, rng))


def test_threshold_derivation():
    assert tsp.tsp_derive_threshold(SQUARE, 1.5) == pytest.approx(6)
    assert tsp.tsp_derive_threshold(SQUARE, 1.0) == pytest.approx(tsp.baseline_cost(SQUARE))
    with pytest.raises(ValueError):
        tsp.tsp_derive_threshold(SQUARE, 0.9)


def test_two_opt_reaches_local_optimum(rng):
    inst = tsp.random_tsp_instance(25, rng)
    tour = tsp.two_opt(inst.distances, rng.permutation(25))
    assert tsp.is_permutation(tour, 25)
    assert tsp.two_opt_deltas(inst.distances, tour).min() > -1e-9


def test_identity_transform_from_zero_digest():
    t = tsp.TspTransform.from_digest(ZERO_DIGEST, 5)
    assert t.is_identity and t.apply(SQUARE) is SQUARE


@settings(max_examples=25, deadline=None)
@given(st.binary(min_size=32, max_size=32), st.integers(0, 2**32 - 1))
def test_transform_is_isometry_and_round_trips(digest, seed):
    rng = np.random.default_rng(seed)
    inst = tsp.random_tsp_instance(9, rng, scale=1000)
    task, transform = tsp.tsp_contextualize(inst, digest, 1e9)
    order = rng.permutation(9)
    moved = task.instance
    assert tsp.tour_cost(moved, order) == pytest.approx(tsp.tour_cost(inst, transform.restore_tour(tsp.TspTour(order))),
                                                        rel=1e-9)
    assert np.allclose(transform.restore_coords(moved), inst.coords, atol=1e-6)
    restored = transform.restore_tour(tsp.TspTour(order))
    assert [transform.perm[i] for i in order] == list(restored.order)


def test_tour_bytes():
    t = tsp.TspTour((3, 0, 2, 1))
    assert tsp.TspTour.from_bytes(t.to_bytes()) == t
    with pytest.raises(ValueError):
        tsp.TspTour.from_bytes(b"\x00\x00\x01")


def test_berlin52_optimum():
    inst = load_bundled("berlin52")
    tour = bundled_optimal_tour("berlin52")
    assert inst.n == 52 and inst.mode is ROUNDED
    assert tsp.is_permutation(tour.order, 52)
    assert tsp.tour_cost(inst, tour) == BERLIN52_OPTIMUM
    assert tour_length(inst.coords.tolist(), tour.order, rounded=True) == BERLIN52_OPTIMUM


def test_tsplib_round_trip(rng):
    inst = tsp.random_tsp_instance(7, rng, mode=ROUNDED, scale=100)
    again = parse_tsplib(format_tsplib(inst, "r7"))
    assert again == inst and again.name == "r7"


@pytest.mark.parametrize("text,line", [
    ("NAME: x\nTYPE: ATSP\n", 2),
    ("NAME: x\nEDGE_WEIGHT_TYPE: GEO\n", 2),
    ("DIMENSION: 3\nNODE_COORD_SECTION\n1 0 0\n2 1\n", 4),
    ("DIMENSION: 3\nBOGUS: 1\n", 2),
])
def test_tsplib_errors_carry_line_numbers(text, line):
    with pytest.raises(TsplibError, match=f"line {line}"):
        parse_tsplib(text)


def test_tsplib_missing_nodes():
    with pytest.raises(TsplibError):
        parse_tsplib("DIMENSION: 4\nNODE_COORD_SECTION\n1 0 0\n2 1 0\n3 1 1\nEOF\n")
