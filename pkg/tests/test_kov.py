import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import kov_tuples
from puwbench import FULL, OpCount, SpotCheck
from puwbench.backends import kov
from puwbench.errors import DimensionMismatch
from puwbench.probes.task_probes import expected_spot_miss, spot_check_instance


def inst(*sets):
    return kov.KovInstance(tuple(np.array(s, dtype=np.uint8) for s in sets))


def test_hand_example():
    proof, ops = kov.kov_solve(inst([[1, 0], [1, 1]], [[0, 1], [1, 1]]))
    assert proof.tuples == ((0, 0),)
    assert ops == 2 * 2 * 2


def test_zero_vector_pairs_with_everything(rng):
    u2 = (rng.random((6, 5)) < 0.7).astype(np.uint8)
    u1 = np.vstack([np.zeros((1, 5), np.uint8), np.ones((1, 5), np.uint8)])
    proof, _ = kov.kov_solve(kov.KovInstance((u1, u2)))
    assert {t for t in proof.tuples if t[0] == 0} == {(0, j) for j in range(6)}


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3), st.integers(1, 6), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_solver_matches_oracle(k, n, d, seed):
    instance = kov.random_kov_instance(k, n, d, 0.5, seed)
    proof, ops = kov.kov_solve(instance)
    assert list(proof.tuples) == kov_tuples([s.tolist() for s in instance.sets])
    assert ops == n**k * d


def test_ragged_sets_op_count():
    instance = inst([[0, 1]] * 3, [[1, 0]] * 5)
    _, ops = kov.kov_solve(instance)
    assert ops == 3 * 5 * 2 == instance.enumeration_ops


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        inst([[0, 1]], [[1, 0, 1]])


def test_verify_round_trip_and_injected_bad_tuple(rng):
    instance = kov.random_kov_instance(2, 8, 6, 0.5, rng)
    proof, _ = kov.kov_solve(instance)
    assert kov.kov_verify(instance, proof)
    bad = next((i, j) for i in range(8) for j in range(8) if (i, j) not in proof.tuples)
    forged = kov.KovProof(tuple(sorted(proof.tuples + (bad,))), claimed_complete=False)
    assert not kov.kov_verify(instance, forged, FULL)


def test_incomplete_claim_checks_listed_tuples_only(rng):
    instance = kov.random_kov_instance(2, 8, 6, 0.5, rng)
    proof, _ = kov.kov_solve(instance)
    assert len(proof.tuples) > 1
    partial = kov.KovProof(proof.tuples[:1], claimed_complete=False)
    assert kov.kov_verify(instance, partial)
    assert not kov.kov_verify(instance, kov.KovProof(proof.tuples[:1], claimed_complete=True))


def test_malformed_proofs_rejected():
    instance = inst([[0, 1], [1, 1]], [[1, 0], [0, 0]])
    assert not kov.kov_verify(instance, kov.KovProof(((0, 5),), False))
    assert not kov.kov_verify(instance, kov.KovProof(((0, 1), (0, 1)), False))
    assert not kov.kov_verify(instance, kov.KovProof(((0, 1), (0, 0)), False))


def test_proof_bytes_strict():
    p = kov.KovProof(((0, 1), (2, 3)), True)
    assert kov.KovProof.from_bytes(p.to_bytes(), 2) == p
    data = p.to_bytes()
    for broken in (data[:-1], data + b"\x00", b"\x02" + data[1:], data[:1] + b"\x03" + data[2:]):
        with pytest.raises(ValueError):
            kov.KovProof.from_bytes(broken, 2)


def test_spot_check_hit_rate_matches_hypergeometric():
    instance, proof = spot_check_instance(100)
    assert len(proof.tuples) == 100
    assert sum(not kov.is_orthogonal(instance, t) for t in proof.tuples) == 1
    expected = expected_spot_miss(100, 0.1)
    assert expected == pytest.approx(0.9)
    accepts = sum(kov.kov_verify(instance, proof, SpotCheck(0.1, s)) for s in range(1000))
    assert abs(accepts / 1000 - expected) <= 0.05


def test_spot_check_counts_sampled_products():
    instance, proof = spot_check_instance(100)
    c = OpCount()
    kov.kov_verify(instance, proof, SpotCheck(0.25, 1), c)
    assert c.ops == 25 * instance.d


def test_partition_identity_and_merge(rng):
    instance = kov.random_kov_instance(2, 8, 5, 0.5, rng)
    assert kov.kov_partition(instance, 1) == [instance]
    parts = kov.kov_partition(instance, 4)
    proofs = [kov.kov_solve(p)[0] for p in parts]
    merged = kov.kov_merge(proofs, [p.n for p in parts])
    assert merged == kov.kov_solve(instance)[0]
    with pytest.raises(DimensionMismatch):
        kov.kov_partition(instance, 3)


def test_batch_with_cross_pairs_killed(rng):
    # two marker columns: instance one is (1,0) in U1 / (0,1) in U2, instance two the reverse,
    # so a cross pair always shares a 1 and only in-instance pairs can be orthogonal
    one, zero = np.ones((5, 1), np.uint8), np.zeros((5, 1), np.uint8)

    def make(m1, m2):
        u1, u2 = ((rng.random((5, 6)) < 0.4).astype(np.uint8) for _ in range(2))
        return kov.KovInstance((np.hstack([u1, *m1]), np.hstack([u2, *m2])))

    first = make((one, zero), (zero, one))
    second = make((zero, one), (one, zero))
    counts = [len(kov.kov_solve(x)[0].tuples) for x in (first, second)]
    batched, ops = kov.kov_solve(kov.kov_batch([first, second]))
    assert len(batched.tuples) == sum(counts)
    assert all((i < 5) == (j < 5) for i, j in batched.tuples)
    assert ops > kov.kov_solve(first)[1]


def test_dimension_for_budget():
    n = kov.kov_dimension_for_budget(4e17, 600)
    assert n == pytest.approx(6.21e6, rel=0.02)
    assert n**3 <= 4e17 * 600 < (n + 1) ** 3
    assert kov.kov_dimension_for_budget(1, 1) == 1
    ratio = kov.kov_dimension_for_budget(8e17, 600) / n
    assert ratio == pytest.approx(2 ** (1 / 3), rel=1e-5)


def test_budget_returns_partial_work(rng):
    instance = kov.random_kov_instance(2, 10, 4, 0.5, rng)
    proof, ops = kov.kov_solve(instance, budget=instance.enumeration_ops // 2)
    assert proof is None and ops == instance.enumeration_ops // 2


def test_memo_reuses_identical_rows(rng):
    instance = kov.random_kov_instance(2, 16, 8, 0.5, rng)
    memo = kov.KovMemo()
    first, ops1 = kov.kov_solve(instance, memo=memo)
    again, ops2 = kov.kov_solve(instance, memo=memo)
    assert first == again and ops2 == 0 and memo.hits >= 16 - len({r.tobytes() for r in instance.sets[0]}) + 16


def test_text_format_round_trip(tmp_path, rng):
    instance = kov.random_kov_instance(3, 4, 5, 0.5, rng)
    path = tmp_path / "x.kov"
    kov.write_kov(instance, path)
    assert kov.read_kov(path) == instance
    assert path.read_text().splitlines()[0] == "3 4 5"
    with pytest.raises(ValueError):
        kov.parse_kov("2 1 2\n01\n")
