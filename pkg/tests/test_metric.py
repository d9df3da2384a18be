import numpy as np
import pytest

from mengerline import (
    FiniteMetricSpace,
    InputError,
    Measure,
    ball,
    diameter,
    distance,
    mass,
    nearest_in,
    validate_metric,
)


def test_from_coords_euclidean():
    coords = np.array([[0.0, 0.0], [3.0, 0.0], [3.0, 4.0]])
    space = FiniteMetricSpace.from_coords(coords)
    assert space.size == 3
    assert distance(space, 0, 1) == 3.0
    assert distance(space, 1, 2) == 4.0
    assert distance(space, 0, 2) == 5.0
    assert space.diameter() == 5.0


def test_from_matrix_symmetrizes_rounding():
    d = np.array([[0.0, 1.0], [1.0 + 1e-12, 0.0]])
    space = FiniteMetricSpace.from_matrix(d)
    assert space.dist[0, 1] == space.dist[1, 0]


def test_rejects_asymmetric():
    d = np.array([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(InputError):
        FiniteMetricSpace.from_matrix(d)


def test_rejects_nonzero_diagonal():
    d = np.array([[0.5, 1.0], [1.0, 0.0]])
    with pytest.raises(InputError):
        FiniteMetricSpace.from_matrix(d)


def test_rejects_negative():
    d = np.array([[0.0, -1.0], [-1.0, 0.0]])
    with pytest.raises(InputError):
        FiniteMetricSpace.from_matrix(d)


def test_rejects_nonfinite():
    d = np.array([[0.0, np.inf], [np.inf, 0.0]])
    with pytest.raises(InputError):
        FiniteMetricSpace.from_matrix(d)


def test_rejects_empty():
    with pytest.raises(InputError):
        FiniteMetricSpace.from_matrix(np.zeros((0, 0)))


def test_rejects_triangle_violation():
    d = np.array([
        [0.0, 1.0, 5.0],
        [1.0, 0.0, 1.0],
        [5.0, 1.0, 0.0],
    ])
    with pytest.raises(InputError):
        FiniteMetricSpace.from_matrix(d)


def test_validate_metric_reports_triangle():
    d = np.array([
        [0.0, 1.0, 5.0],
        [1.0, 0.0, 1.0],
        [5.0, 1.0, 0.0],
    ])
    space = FiniteMetricSpace.from_matrix(d, check_triangle=False)
    report = validate_metric(space)
    assert not report.ok
    assert any(v.kind == "triangle" for v in report.violations)


def test_validate_metric_clean():
    space = FiniteMetricSpace.from_coords(np.random.default_rng(0).uniform(0, 1, (20, 2)))
    assert validate_metric(space).ok


def test_single_point_space():
    space = FiniteMetricSpace.from_matrix(np.zeros((1, 1)))
    assert space.size == 1
    assert space.diameter() == 0.0


def test_ball_closed_and_sorted():
    coords = np.array([[0.0], [1.0], [2.0], [3.0]])
    space = FiniteMetricSpace.from_coords(coords)
    got = ball(space, 0, 2.0)
    assert got.tolist() == [0, 1, 2]
    got = ball(space, 0, 2.0, within=[3, 2, 0])
    assert got.tolist() == [0, 2]


def test_ball_rejects_negative_radius():
    space = FiniteMetricSpace.from_coords(np.array([[0.0], [1.0]]))
    with pytest.raises(InputError):
        ball(space, 0, -0.1)


def test_nearest_in_tie_picks_smallest_id():
    coords = np.array([[0.0], [1.0], [-1.0], [5.0]])
    space = FiniteMetricSpace.from_coords(coords)
    idx, d = nearest_in(space, 0, [3, 2, 1])
    assert idx == 1 and d == 1.0


def test_diameter_of_subset():
    coords = np.array([[0.0], [1.0], [10.0]])
    space = FiniteMetricSpace.from_coords(coords)
    assert diameter(space, [0, 1]) == 1.0
    assert diameter(space, [2]) == 0.0
    with pytest.raises(InputError):
        diameter(space, [])


def test_check_ids_rejects_out_of_range_and_duplicates():
    space = FiniteMetricSpace.from_coords(np.array([[0.0], [1.0]]))
    with pytest.raises(InputError):
        space.check_ids([0, 2])
    with pytest.raises(InputError):
        space.check_ids([1, 1])


def test_measure_basics():
    m = Measure(np.array([0.25, 0.75]))
    assert m.total == 1.0
    assert mass(m, [1]) == 0.75
    assert mass(m, []) == 0.0


def test_measure_rejects_negative():
    with pytest.raises(InputError):
        Measure(np.array([0.5, -0.1]))


def test_measure_uniform_totals_diameter():
    space = FiniteMetricSpace.from_coords(np.array([[0.0], [2.0], [4.0]]))
    m = Measure.uniform(space)
    assert m.total == pytest.approx(4.0)
    assert np.allclose(m.weights, 4.0 / 3)


def test_distance_matrix_readonly():
    space = FiniteMetricSpace.from_coords(np.array([[0.0], [1.0]]))
    with pytest.raises(ValueError):
        space.dist[0, 1] = 7.0
