import itertools

import numpy as np
import pytest

from zurn import (
    RngStream,
    UrnOverflowError,
    compute_a,
    draw_index,
    new_urn,
    run,
    sample_draw,
    step,
)

INT64_MAX = 2**63 - 1


def test_new_urn_symmetric_start():
    urn = new_urn([-1, 1])
    assert urn.n == 2
    assert urn.tau0 == 2
    assert urn.sum_s == (0,)
    assert urn.sum_q == (2,)


def test_new_urn_positive_start():
    urn = new_urn([1, 1])
    assert urn.sum_s == (2,)
    assert urn.sum_q == (2,)


def test_new_urn_zero_vector_d2():
    urn = new_urn([(0, 0)], d=2)
    assert urn.n == 1
    assert urn.sum_s == (0, 0)
    assert urn.sum_q == (0, 0)


def test_new_urn_rejects_empty():
    with pytest.raises(ValueError):
        new_urn([])


def test_new_urn_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        new_urn([(1, 2, 3)], d=2)
    with pytest.raises(ValueError):
        new_urn([(1, 2)], d=1)


def test_draw_index_single_ball():
    urn = new_urn([5])
    rng = RngStream(1, 0)
    assert all(draw_index(urn, rng) == 0 for _ in range(20))


def test_draw_index_unbiased_two_balls():
    # binomial 3-sigma bound at 1e6 draws is 0.0015; spec allows 0.002
    urn = new_urn([-1, 1])
    rng = RngStream(42, 0)
    draws = rng.integers(0, urn.n, size=1_000_000)
    freq = np.mean(draws == 0)
    assert abs(freq - 0.5) < 0.002


def test_draw_index_replay_is_identical():
    urn = new_urn([-1, 1, 3])
    seq1 = [draw_index(urn, RngStream(9, 4)) for _ in range(1)]
    a = RngStream(9, 4)
    b = RngStream(9, 4)
    assert [draw_index(urn, a) for _ in range(100)] == [
        draw_index(urn, b) for _ in range(100)
    ]
    assert seq1[0] == draw_index(urn, RngStream(9, 4))


def test_step_forced_symmetric_cancellation():
    urn = new_urn([-1, 1])
    lab = step(urn, None, indices=(0, 1))
    assert lab == 0
    assert urn.n == 3
    assert urn.sum_s == (0,)


def test_step_exhaustive_all_pairs_positive_urn():
    # every one of the 4 equally likely ordered pairs gives 1 + 1 = 2
    for pair in itertools.product(range(2), repeat=2):
        urn = new_urn([1, 1])
        lab = step(urn, None, indices=pair)
        assert lab == 2
        assert urn.sum_s == (4,)
        assert urn.sum_q == (6,)


def test_step_exhaustive_triples_k3():
    for triple in itertools.product(range(2), repeat=3):
        urn = new_urn([1, 1])
        assert step(urn, None, k=3, indices=triple) == 3


def test_step_martingale_one_step_exhaustive():
    # E[A_3] over all 4 equally likely draw pairs equals A_2 = 1/3 exactly
    urn0 = new_urn([1, 1])
    a2 = compute_a(urn0)[0]
    a3_values = []
    for pair in itertools.product(range(2), repeat=2):
        urn = new_urn([1, 1])
        step(urn, None, indices=pair)
        a3_values.append(compute_a(urn)[0])
    assert sum(a3_values) / len(a3_values) == a2 == pytest.approx(1 / 3)


def test_step_martingale_one_step_exhaustive_symmetric():
    urn0 = new_urn([-1, 1])
    a2 = compute_a(urn0)[0]
    total = 0.0
    for pair in itertools.product(range(2), repeat=2):
        urn = new_urn([-1, 1])
        step(urn, None, indices=pair)
        total += compute_a(urn)[0]
    assert total / 4 == a2 == 0.0


def test_step_rejects_small_k():
    with pytest.raises(ValueError):
        step(new_urn([1, 1]), RngStream(0), k=1)


def test_step_d2_vector_sum():
    urn = new_urn([(1, 2), (3, -4)], d=2)
    lab = step(urn, None, indices=(0, 1))
    assert lab == (4, -2)
    assert urn.sum_s == (8, -4)
    assert urn.sum_q == (1 + 9 + 16, 4 + 16 + 4)


def test_run_zero_additions_is_noop():
    urn = new_urn([1, 1])
    calls = []
    out = run(urn, 0, RngStream(3), recorder=calls.append)
    assert out is urn
    assert urn.n == 2
    assert calls == []


def test_run_checkpoint_deterministic_urn():
    urn = new_urn([1, 1])
    seen = []
    run(urn, 1, RngStream(5), checkpoints=[3], recorder=seen.append)
    assert len(seen) == 1
    snap = seen[0]
    assert snap.n == 3
    assert snap.a == (4 / 12,)
    assert snap.r == (16,)
    assert snap.q == (6,)


def test_run_reaches_5000_balls():
    urn = new_urn([-1, 1])
    run(urn, 4998, RngStream(11, 0))
    assert urn.n == 5000
    assert urn.verify_sums()


def test_run_rejects_checkpoint_outside_range():
    urn = new_urn([1, 1])
    with pytest.raises(ValueError):
        run(urn, 10, RngStream(0), checkpoints=[2])
    with pytest.raises(ValueError):
        run(urn, 10, RngStream(0), checkpoints=[13])


def test_run_fast_path_matches_step_path():
    # the d=1/k=2 loop must replay exactly what repeated step() calls produce
    # when both consume the same pre-generated index table
    urn_fast = new_urn([-1, 1])
    run(urn_fast, 200, RngStream(77, 3))

    urn_slow = new_urn([-1, 1])
    rng = RngStream(77, 3)
    counts = np.arange(2, 202)
    idx = rng.integers(0, counts[:, None], size=(200, 2))
    for row in idx:
        step(urn_slow, None, indices=row)

    assert urn_fast.labels == urn_slow.labels
    assert urn_fast.sum_s == urn_slow.sum_s
    assert urn_fast.sum_q == urn_slow.sum_q


def test_run_checkpoints_match_recomputation():
    urn = new_urn([-1, 1])
    seen = []
    run(urn, 300, RngStream(13, 1), checkpoints=[10, 100, 302], recorder=seen.append)
    assert [s.n for s in seen] == [10, 100, 302]
    for snap in seen:
        labels = snap.urn.labels[: snap.n] if snap.urn.n >= snap.n else None
        assert labels is not None
    # final snapshot taken at the end of the run: recompute from labels
    final = seen[-1]
    s = sum(urn.labels)
    assert final.r == (s * s,)


def test_sample_draw_single_ball():
    urn = new_urn([5])
    assert sample_draw(urn, RngStream(2)) == 5
    assert urn.n == 1


def test_sample_draw_mean_matches_quenched_mean():
    # CLT 3-sigma bound: sd = 1, 1e6 samples -> 0.003
    urn = new_urn([-1, 1])
    rng = RngStream(8, 0)
    idx = rng.integers(0, urn.n, size=1_000_000)
    vals = np.array(urn.labels)[idx]
    assert abs(vals.mean() - 0.0) < 0.003
    # quenched mean over all balls is S_n / n exactly
    assert np.mean(urn.labels) == urn.sum_s[0] / urn.n


def test_conservation_after_random_run():
    for seed in (0, 1, 2):
        urn = new_urn([-1, 1, 2])
        run(urn, 500, RngStream(100, seed))
        assert urn.verify_sums()
    urn = new_urn([(1, 0), (0, -1)], d=2)
    run(urn, 300, RngStream(100, 9))
    assert urn.verify_sums()


def test_growth_bound_k2():
    urn = new_urn([-1, 1, 3])
    rng = RngStream(6, 0)
    prev_max = 3
    for _ in range(400):
        lab = step(urn, rng)
        assert abs(lab) <= 2 * prev_max
        prev_max = max(prev_max, abs(lab))


def test_growth_bound_k3():
    urn = new_urn([2, -5])
    rng = RngStream(6, 1)
    prev_max = 5
    for _ in range(200):
        lab = step(urn, rng, k=3)
        assert abs(lab) <= 3 * prev_max
        prev_max = max(prev_max, abs(lab))


def test_determinism_same_stream_same_labels():
    runs = []
    for _ in range(2):
        urn = new_urn([-1, 1])
        run(urn, 1000, RngStream(314159, 7))
        runs.append(urn.labels)
    assert runs[0] == runs[1]


def test_independent_realizations_differ():
    urn_a = new_urn([-1, 1])
    run(urn_a, 100, RngStream(314159, 0))
    urn_b = new_urn([-1, 1])
    run(urn_b, 100, RngStream(314159, 1))
    assert urn_a.labels != urn_b.labels


def test_overflow_label_rejected_at_construction():
    with pytest.raises(UrnOverflowError) as exc:
        new_urn([2**63])
    assert exc.value.quantity == "label"
    assert new_urn([2**63], bigint=True).sum_s == (2**63,)


def test_overflow_sum_sq_in_step():
    # the running sum of squares trips int64 well before any label can
    urn = new_urn([3_000_000_000])
    with pytest.raises(UrnOverflowError) as exc:
        step(urn, None, indices=(0, 0))
    assert exc.value.ball == 2
    assert exc.value.coord == 0
    assert exc.value.quantity == "sum_sq"
    # urn left at the last consistent state
    assert urn.n == 1
    assert urn.verify_sums()


def test_overflow_in_run_reports_ball():
    urn = new_urn([3_000_000_000])
    with pytest.raises(UrnOverflowError) as exc:
        run(urn, 10, RngStream(0, 0))
    assert exc.value.ball == 2
    assert exc.value.quantity == "sum_sq"
    assert urn.verify_sums()


def test_overflow_sum_sq_detected_at_construction():
    big = 3037000500  # big^2 just exceeds int64
    with pytest.raises(UrnOverflowError):
        new_urn([big])
    urn = new_urn([big], bigint=True)
    assert urn.sum_q == (big * big,)


def test_bigint_mode_allows_huge_labels():
    urn = new_urn([2**62], bigint=True)
    for _ in range(8):
        step(urn, None, indices=(urn.n - 1, urn.n - 1))
    assert urn.label_at(urn.n - 1) == 2**70
    assert urn.verify_sums()


def test_labels_array_shape_and_values():
    urn = new_urn([(1, 2), (3, 4)], d=2)
    arr = urn.labels_array()
    assert arr.shape == (2, 2)
    assert arr.dtype == np.int64
    assert arr.tolist() == [[1, 2], [3, 4]]
    one = new_urn([-1, 1]).labels_array()
    assert one.shape == (2, 1)
