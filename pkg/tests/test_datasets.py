import numpy as np
import pytest

from mengerline import (
    InputError,
    gen_cantor4,
    gen_circle,
    gen_lipschitz_graph,
    gen_segment,
    gen_snowflake,
    validate_metric,
)


def test_segment_shape_and_weights():
    space, measure = gen_segment(5)
    assert space.size == 5
    assert space.coords[:, 0].tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    # half-gap weights: ends carry half a gap, interior a full gap
    assert measure.weights.tolist() == [0.125, 0.25, 0.25, 0.25, 0.125]
    assert measure.total == pytest.approx(1.0)


def test_segment_uniform_flag():
    space, measure = gen_segment(5, uniform=True)
    assert np.allclose(measure.weights, 0.2)


def test_segment_jitter_bounded_and_seeded():
    s1, _ = gen_segment(50, jitter=1e-3, seed=42)
    s2, _ = gen_segment(50, jitter=1e-3, seed=42)
    s3, _ = gen_segment(50, jitter=1e-3, seed=43)
    assert np.array_equal(s1.coords, s2.coords)
    assert not np.array_equal(s1.coords, s3.coords)
    assert np.abs(s1.coords[:, 1]).max() <= 1e-3


def test_segment_rejects_bad_params():
    with pytest.raises(InputError):
        gen_segment(1)
    with pytest.raises(InputError):
        gen_segment(5, jitter=-0.1)


def test_circle_chord_weights():
    space, measure = gen_circle(4, radius=2.0)
    chord = 2.0 * 2.0 * np.sin(np.pi / 4)
    assert np.allclose(measure.weights, chord)
    assert space.diameter() == pytest.approx(4.0)


def test_circle_points_on_circle():
    space, _ = gen_circle(12, radius=1.5)
    r = np.hypot(space.coords[:, 0], space.coords[:, 1])
    assert np.allclose(r, 1.5)


def test_circle_rejects_bad_params():
    with pytest.raises(InputError):
        gen_circle(2)
    with pytest.raises(InputError):
        gen_circle(5, radius=0.0)


def test_cantor4_generation_one():
    space, measure = gen_cantor4(1)
    assert space.size == 4
    want = np.array([[0.125, 0.125], [0.125, 0.875], [0.875, 0.125], [0.875, 0.875]])
    assert np.array_equal(space.coords, want)
    assert np.allclose(measure.weights, 0.25)


def test_cantor4_sizes_and_mass():
    for g in (1, 2, 3):
        space, measure = gen_cantor4(g)
        assert space.size == 4 ** g
        assert np.allclose(measure.weights, 4.0 ** -g)
        assert measure.total == pytest.approx(1.0)


def test_cantor4_self_similar():
    # the lower-left quarter of generation 2, rescaled by 4, is generation 1
    g2, _ = gen_cantor4(2)
    g1, _ = gen_cantor4(1)
    sub = g2.coords[(g2.coords[:, 0] < 0.5) & (g2.coords[:, 1] < 0.5)]
    sub = sub[np.lexsort((sub[:, 1], sub[:, 0]))]
    assert np.allclose(sub * 4.0, g1.coords, atol=1e-12)


def test_cantor4_coords_lex_sorted():
    space, _ = gen_cantor4(3)
    order = np.lexsort((space.coords[:, 1], space.coords[:, 0]))
    assert np.array_equal(order, np.arange(space.size))


def test_cantor4_rejects_bad_generation():
    with pytest.raises(InputError):
        gen_cantor4(0)
    with pytest.raises(InputError):
        gen_cantor4(8)


def test_lipschitz_graph_is_lipschitz():
    for slope in (0.2, 0.5, 1.0):
        space, _ = gen_lipschitz_graph(80, slope=slope, seed=7)
        x = space.coords[:, 0]
        y = space.coords[:, 1]
        dx = np.diff(x)
        dy = np.diff(y)
        assert (np.abs(dy) <= slope * dx * (1 + 1e-12)).all()
        assert (dx > 0).all()


def test_lipschitz_graph_seeded():
    a, _ = gen_lipschitz_graph(30, seed=1)
    b, _ = gen_lipschitz_graph(30, seed=1)
    c, _ = gen_lipschitz_graph(30, seed=2)
    assert np.array_equal(a.coords, b.coords)
    assert not np.array_equal(a.coords, c.coords)


def test_snowflake_metric_valid():
    space, measure = gen_snowflake(10, 0.5)
    assert validate_metric(space).ok
    # snowflaked line: d(0, 1) = |x0 - x1|^s
    xs = np.linspace(0, 1, 10)
    assert space.dist[0, 1] == pytest.approx(abs(xs[1] - xs[0]) ** 0.5)


def test_snowflake_weights_match_gaps():
    space, measure = gen_snowflake(6, 0.7)
    # half-gap weights in the snowflake metric itself
    gaps = np.array([space.dist[i, i + 1] for i in range(5)])
    want = np.empty(6)
    want[0] = gaps[0] / 2
    want[-1] = gaps[-1] / 2
    want[1:-1] = (gaps[:-1] + gaps[1:]) / 2
    assert np.allclose(measure.weights, want)


def test_snowflake_rejects_bad_exponent():
    with pytest.raises(InputError):
        gen_snowflake(5, 0.0)
    with pytest.raises(InputError):
        gen_snowflake(5, 1.0)


def test_snowflake_has_no_coords():
    space, _ = gen_snowflake(8, 0.5)
    assert space.coords is None
