import numpy as np
import pytest

from mengerline import (
    FiniteMetricSpace,
    InputError,
    MovingLemmaViolation,
    angle_omega_witness,
    find_order,
    in_omega,
    is_between_pattern,
    is_valid_order,
    moving_lemma_i,
    moving_lemma_ii,
)


def _line(xs):
    xs = np.asarray(xs, dtype=float)
    return FiniteMetricSpace.from_coords(np.column_stack([xs, np.zeros_like(xs)]))


def _square():
    return FiniteMetricSpace.from_coords(
        np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


def test_between_pattern_on_line():
    space = _line([0.0, 1.0, 3.0])
    assert is_between_pattern(space, 0, 1, 2)
    assert is_between_pattern(space, 2, 1, 0)
    assert not is_between_pattern(space, 1, 0, 2)
    assert not is_between_pattern(space, 0, 2, 1)


def test_between_pattern_strict():
    # exactly equilateral: no point is between the other two
    space = FiniteMetricSpace.from_matrix(np.ones((3, 3)) - np.eye(3))
    for p in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        assert not is_between_pattern(space, *p)


def test_is_valid_order_line():
    space = _line([0.0, 0.5, 1.7, 2.0, 4.0])
    assert is_valid_order(space, [0, 1, 2, 3, 4])
    assert is_valid_order(space, [4, 3, 2, 1, 0])
    assert not is_valid_order(space, [0, 2, 1, 3, 4])
    assert not is_valid_order(space, [1, 0, 2, 3, 4])


def test_is_valid_order_short_sequences():
    space = _line([0.0, 1.0])
    assert is_valid_order(space, [0])
    assert is_valid_order(space, [1, 0])
    assert not is_valid_order(space, [0, 0])


def test_find_order_line_canonical():
    space = _line([0.0, 1.0, 2.5, 4.0])
    res = find_order(space, [2, 0, 3, 1])
    assert res.kind == "orderable"
    assert res.sequence == (0, 1, 2, 3)  # canonical: starts at smaller endpoint


def test_find_order_singleton_and_pair():
    space = _line([0.0, 1.0, 2.0])
    assert find_order(space, [2]).sequence == (2,)
    assert find_order(space, [2, 0]).sequence == (0, 2)


def test_find_order_empty_rejected():
    space = _line([0.0, 1.0])
    with pytest.raises(InputError):
        find_order(space, [])


def test_find_order_square_cyclic():
    res = find_order(_square(), [0, 1, 2, 3])
    assert res.kind == "cyclic_quadruple"
    v1, v2, v3, v4 = res.quadruple
    sq = _square()
    assert is_between_pattern(sq, v1, v2, v3)
    assert is_between_pattern(sq, v2, v3, v4)
    assert is_between_pattern(sq, v3, v4, v1)
    assert is_between_pattern(sq, v4, v1, v2)


def test_find_order_hint_short_circuits():
    xs = np.sort(np.random.default_rng(2).uniform(0, 1, 30))
    space = _line(xs)
    ids = list(range(30))
    res = find_order(space, ids, hint=ids)
    assert res.kind == "orderable"
    assert list(res.sequence) == ids


def test_find_order_bad_hint_ignored():
    space = _line([0.0, 1.0, 2.0, 3.0])
    res = find_order(space, [0, 1, 2, 3], hint=[0, 2, 1, 3])
    assert res.kind == "orderable"
    assert res.sequence == (0, 1, 2, 3)


def test_find_order_budget_exhaustion_reported():
    # 12 sorted line points insert in 11 attempts (each lands at the front of
    # the growing chain), so a budget of 10 must run out; the same call
    # without the cap succeeds
    space = _line(np.arange(12, dtype=float))
    res = find_order(space, list(range(12)), budget=10)
    assert res.kind == "not_orderable"
    assert res.budget_exhausted
    res = find_order(space, list(range(12)))
    assert res.kind == "orderable"
    assert res.sequence == tuple(range(12))


def test_find_order_perturbed_line_random():
    rng = np.random.default_rng(13)
    for _ in range(25):
        n = int(rng.integers(3, 9))
        xs = np.sort(rng.uniform(0, 1, n))
        while n > 1 and np.min(np.diff(xs)) < 1e-4:
            xs = np.sort(rng.uniform(0, 1, n))
        space = _line(xs)
        perm = rng.permutation(n)
        res = find_order(space, perm.tolist())
        assert res.kind == "orderable"
        assert is_valid_order(space, res.sequence)
        assert res.sequence == tuple(range(n))


def test_in_omega_accepts_line():
    space = _line([0.0, 1.0, 2.0, 3.5])
    assert in_omega(space, [0, 1, 2, 3], 0.9).ok
    assert in_omega(space, [0, 1, 2, 3], 1.0).ok


def test_in_omega_flags_obtuse_angle():
    # 120-degree corner: d(x,z) = sqrt(3) < 1 + 0.9 * 1, so phi=0.9 fails
    space = FiniteMetricSpace.from_coords(
        np.array([[0.0, 0.0], [1.0, 0.0], [1.5, np.sqrt(3) / 2]]))
    res = in_omega(space, [0, 1, 2], 0.9)
    assert not res.ok
    assert res.violation == (0, 1, 2)
    assert in_omega(space, [0, 1, 2], 0.5).ok


def test_in_omega_small_sets_trivial():
    space = _line([0.0, 1.0])
    assert in_omega(space, [0, 1], 0.9).ok
    assert in_omega(space, [0], 0.9).ok


def test_in_omega_phi_range():
    space = _line([0.0, 1.0, 2.0])
    with pytest.raises(InputError):
        in_omega(space, [0, 1, 2], 1.5)


def test_angle_omega_witness():
    space = _line([0.0, 1.0, 2.0])
    assert angle_omega_witness(space, (0, 1, 2), 0.9)  # straight: cos = -1
    sq = _square()
    assert not angle_omega_witness(sq, (0, 1, 2), 0.9)  # right angle: cos = 0


def test_moving_lemma_i_on_line():
    space = _line([0.0, 1.0, 10.0, 10.05])
    # y=1 between x=0 and z=2; z1=3 is within phi*min(d(x,y), ...) of z
    assert moving_lemma_i(space, 0, 1, 2, 3, 0.9) is True


def test_moving_lemma_i_hypothesis_fails():
    space = _line([0.0, 1.0, 10.0, 15.0])
    assert moving_lemma_i(space, 0, 1, 2, 3, 0.9) is False
    # pattern missing: y not between
    assert moving_lemma_i(space, 1, 0, 2, 3, 0.9) is False


def test_moving_lemma_i_precondition_fails():
    sq = _square()
    assert moving_lemma_i(sq, 0, 1, 2, 3, 0.9) is None


def test_moving_lemma_ii_on_line():
    space = _line([0.0, 5.0, 10.0, 5.1])
    # z=1 (at 5.0) between x=0 and y=2; z1=3 (at 5.1) close to z
    assert moving_lemma_ii(space, 0, 1, 2, 3, 0.9) is True


def test_moving_lemma_ii_far_point():
    space = _line([0.0, 5.0, 10.0, 9.9])
    # z1 at 9.9 is not within phi * min(...) of z at 5.0 -> hypothesis False
    res = moving_lemma_ii(space, 0, 1, 2, 3, 0.9)
    assert res is False


def test_moving_lemma_phi_range():
    space = _line([0.0, 1.0, 2.0, 3.0])
    with pytest.raises(InputError):
        moving_lemma_i(space, 0, 1, 2, 3, 0.0)
