import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amoebot_energy.oracle import (
    EnergyConfigSnapshot,
    brute_force_worst_recharge,
    canonical_form,
    dominates,
    parallel_recharge_rounds,
    parallel_step,
    parallel_trajectory,
    path_tree,
    rooted_trees,
    suffix_sums,
)
from amoebot_energy.system import ParameterError


def snap(*b, kp):
    return EnergyConfigSnapshot(tuple(float(x) for x in b), kp)


def test_parallel_step_examples():
    assert parallel_step(snap(0, kp=1), 1).batteries == (1.0,)
    assert parallel_step(snap(2, 1, kp=2), 1).batteries == (2.0, 2.0)
    assert parallel_step(snap(2, 2, 2, kp=2), 1).batteries == (2.0, 2.0, 2.0)


@pytest.mark.parametrize("k,kappa,alpha,expected", [(1, 2, 1, 1), (3, 10, 1, 27), (5, 4, 2, 5)])
def test_recharge_examples(k, kappa, alpha, expected):
    assert parallel_recharge_rounds(k, kappa, alpha) == expected


def test_recharge_exact_grid():
    for alpha in (1.0, 2.0, 0.5):
        for ratio in range(1, 11):
            for k in range(1, 21):
                assert parallel_recharge_rounds(k, ratio * alpha, alpha) == (ratio - 1) * k


def test_recharge_rejects_fractional_ratio():
    with pytest.raises(ParameterError):
        parallel_recharge_rounds(3, 2.5, 1.0)


def test_trajectory_stays_in_capacity():
    for c in parallel_trajectory(6, 5.0, 1.0, 40):
        assert all(0 <= x <= 4.0 for x in c.batteries)


def test_dominates_examples():
    a = snap(1, 0, kp=9)
    assert dominates(a, a)
    assert suffix_sums([1, 0]) == [1, 0]
    assert not dominates((1, 0), (0, 1))
    assert dominates((0, 2), (1, 0))
    with pytest.raises(ParameterError):
        dominates((1,), (1, 2))


vecs = st.lists(st.integers(0, 5), min_size=3, max_size=3)


@settings(max_examples=200, deadline=None)
@given(vecs, vecs, vecs)
def test_dominates_is_partial_order(a, b, c):
    assert dominates(a, a)
    if dominates(a, b) and dominates(b, a):
        assert suffix_sums(a) == suffix_sums(b)
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


def test_rooted_tree_counts():
    # number of unlabeled rooted trees, OEIS A000081
    assert [len(rooted_trees(n)) for n in range(1, 7)] == [1, 1, 2, 4, 9, 20]
    assert len({canonical_form(t) for t in rooted_trees(5)}) == 9


def test_brute_force_small_cases():
    assert brute_force_worst_recharge(path_tree(1), 2, 1) == 2
    assert brute_force_worst_recharge(path_tree(2), 2, 1) == 4


def test_path_is_worst_up_to_five():
    for n in range(1, 6):
        path = brute_force_worst_recharge(path_tree(n), 3, 1)
        assert path == 3 * n
        for tree in rooted_trees(n):
            assert brute_force_worst_recharge(tree, 3, 1) <= path


def test_brute_force_bounds():
    with pytest.raises(ParameterError):
        brute_force_worst_recharge(path_tree(7), 3, 1)
    with pytest.raises(RuntimeError):
        brute_force_worst_recharge(path_tree(3), 3, 1, horizon=2)
