"""Synthetic point sets with known structure.

Every generator returns a (space, measure) pair, is deterministic for a given
seed, and passes metric validation.  Weights follow the half-gap rule on
curve-like families so that the discrete measure approximates arc length;
uniform weighting is available where it makes sense.
"""
from __future__ import annotations

import numpy as np

from .errors import InputError
from .metric import FiniteMetricSpace, Measure

__all__ = [
    "gen_segment",
    "gen_circle",
    "gen_cantor4",
    "gen_lipschitz_graph",
    "gen_snowflake",
]


def _half_gap_weights(gaps: np.ndarray) -> np.ndarray:
    """Interior points get half of each adjacent gap, endpoints one half-gap."""
    n = gaps.size + 1
    w = np.zeros(n)
    w[:-1] += gaps / 2.0
    w[1:] += gaps / 2.0
    return w


def _chain_weights(coords: np.ndarray, uniform: bool) -> np.ndarray:
    gaps = np.linalg.norm(np.diff(coords, axis=0), axis=1)
    if uniform:
        total = float(gaps.sum())
        return np.full(coords.shape[0], total / coords.shape[0])
    return _half_gap_weights(gaps)


def gen_segment(n: int, jitter: float = 0.0, seed: int = 0,
                uniform: bool = False) -> tuple[FiniteMetricSpace, Measure]:
    """n points spread over [0, 1] with perpendicular jitter."""
    if n < 2:
        raise InputError("gen_segment needs n >= 2")
    if jitter < 0:
        raise InputError("gen_segment needs jitter >= 0")
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, 1.0, n)
    y = rng.uniform(-1.0, 1.0, n) * jitter
    coords = np.column_stack([x, y])
    space = FiniteMetricSpace.from_coords(coords)
    return space, Measure(_chain_weights(coords, uniform))


def gen_circle(n: int, radius: float = 1.0,
               uniform: bool = False) -> tuple[FiniteMetricSpace, Measure]:
    """n equally spaced points on a circle; weights sum to ~2*pi*radius."""
    if n < 3:
        raise InputError("gen_circle needs n >= 3")
    if radius <= 0:
        raise InputError("gen_circle needs radius > 0")
    angles = 2.0 * np.pi * np.arange(n) / n
    coords = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    space = FiniteMetricSpace.from_coords(coords)
    chord = float(np.linalg.norm(coords[1] - coords[0]))
    # closed loop: every point carries two half-chords
    return space, Measure(np.full(n, chord))


def gen_cantor4(generation: int) -> tuple[FiniteMetricSpace, Measure]:
    """Centers of the four-corner Cantor construction, ratio 1/4.

    Generation g has 4**g points with uniform weights 4**-g (unit total
    mass).  Points are ordered lexicographically by coordinates.
    """
    if generation < 1:
        raise InputError("gen_cantor4 needs generation >= 1")
    if generation > 7:
        raise InputError("gen_cantor4 beyond generation 7 is not supported")
    cells = [(0.5, 0.5, 1.0)]
    for _ in range(generation):
        nxt = []
        for cx, cy, size in cells:
            off = 3.0 * size / 8.0
            for dx in (-off, off):
                for dy in (-off, off):
                    nxt.append((cx + dx, cy + dy, size / 4.0))
        cells = nxt
    coords = np.asarray(sorted((c[0], c[1]) for c in cells))
    space = FiniteMetricSpace.from_coords(coords)
    weights = np.full(coords.shape[0], 4.0 ** (-generation))
    return space, Measure(weights)


def gen_lipschitz_graph(n: int, slope: float = 0.5, seed: int = 0,
                        uniform: bool = False) -> tuple[FiniteMetricSpace, Measure]:
    """Graph of a random slope-Lipschitz function sampled over [0, 1].

    Each increment is drawn uniformly from [-slope*dx, slope*dx], so the
    function is slope-Lipschitz by construction and slope=0 reduces to
    gen_segment with zero jitter.
    """
    if n < 2:
        raise InputError("gen_lipschitz_graph needs n >= 2")
    if slope < 0:
        raise InputError("gen_lipschitz_graph needs slope >= 0")
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, 1.0, n)
    dx = np.diff(x)
    increments = rng.uniform(-1.0, 1.0, n - 1) * slope * dx
    y = np.concatenate([[0.0], np.cumsum(increments)])
    coords = np.column_stack([x, y])
    space = FiniteMetricSpace.from_coords(coords)
    return space, Measure(_chain_weights(coords, uniform))


def gen_snowflake(n: int, s: float) -> tuple[FiniteMetricSpace, Measure]:
    """Grid on [0, 1] with the snowflaked metric |x - y|**s, s in (0, 1).

    Matrix source: the snowflaked distances are not Euclidean, so no
    coordinates are attached.  Weights use half-gaps in the new metric.
    """
    if n < 2:
        raise InputError("gen_snowflake needs n >= 2")
    if not 0.0 < s < 1.0:
        raise InputError("gen_snowflake needs s strictly between 0 and 1")
    x = np.linspace(0.0, 1.0, n)
    dist = np.abs(x[:, None] - x[None, :]) ** s
    space = FiniteMetricSpace.from_matrix(dist)
    gaps = np.diff(x) ** s
    return space, Measure(_half_gap_weights(gaps))
