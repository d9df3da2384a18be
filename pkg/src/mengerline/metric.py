"""Finite metric measure spaces backed by explicit distance matrices.

A space is an n x n symmetric nonnegative matrix with zero diagonal; points
are the row indices.  Coordinates are optional and only used for plotting and
segment-mode diagnostics.  A measure is a nonnegative weight per point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

__all__ = [
    "FiniteMetricSpace",
    "Measure",
    "MetricViolation",
    "ValidationReport",
    "validate_metric",
    "distance",
    "diameter",
    "ball",
    "nearest_in",
    "mass",
]

# Full triangle-inequality validation is O(n^3); above this size it is skipped
# at load time (still available through validate_metric).
TRIANGLE_CHECK_LIMIT = 2000
DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MetricViolation:
    kind: str          # "symmetry" | "diagonal" | "negative" | "triangle"
    indices: tuple
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    violations: list[MetricViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _triangle_violations(dist: np.ndarray, tol: float, limit: int | None = None):
    """Blocked scan for d(i,k) > d(i,j) + d(j,k) + tol.  Yields (i, j, k, excess)."""
    n = dist.shape[0]
    found = 0
    for j in range(n):
        excess = dist - (dist[:, j][:, None] + dist[j, :][None, :])
        bad = np.argwhere(excess > tol)
        for i, k in bad:
            yield int(i), int(j), int(k), float(excess[i, k])
            found += 1
            if limit is not None and found >= limit:
                return


class FiniteMetricSpace:
    """Immutable wrapper around a validated distance matrix."""

    def __init__(self, dist: np.ndarray, coords: np.ndarray | None = None, *,
                 check_triangle: bool | None = None, tolerance: float = DEFAULT_TOLERANCE):
        dist = np.asarray(dist, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise InputError("distance matrix must be square")
        n = dist.shape[0]
        if n == 0:
            raise InputError("empty space")
        if not np.all(np.isfinite(dist)):
            raise InputError("distance matrix contains non-finite entries")
        scale = float(dist.max(initial=0.0))
        tol = tolerance * max(scale, 1.0)
        if np.any(np.abs(dist - dist.T) > tol):
            i, j = map(int, np.argwhere(np.abs(dist - dist.T) > tol)[0])
            raise InputError(f"distance matrix is not symmetric at ({i}, {j})")
        if np.any(np.abs(np.diag(dist)) > tol):
            i = int(np.argmax(np.abs(np.diag(dist))))
            raise InputError(f"distance matrix has a nonzero diagonal at {i}")
        if np.any(dist < -tol):
            i, j = map(int, np.argwhere(dist < -tol)[0])
            raise InputError(f"negative distance at ({i}, {j})")
        dist = np.maximum((dist + dist.T) / 2.0, 0.0)
        np.fill_diagonal(dist, 0.0)
        if check_triangle is None:
            check_triangle = n <= TRIANGLE_CHECK_LIMIT
        self.triangle_checked = bool(check_triangle)
        if check_triangle:
            for i, j, k, excess in _triangle_violations(dist, tol, limit=1):
                raise InputError(
                    f"triangle inequality fails: d({i},{k}) exceeds "
                    f"d({i},{j}) + d({j},{k}) by {excess:.3e}")
        self.dist = dist
        self.dist.setflags(write=False)
        if coords is not None:
            coords = np.asarray(coords, dtype=float)
            if coords.ndim != 2 or coords.shape[0] != n:
                raise InputError("coordinates must be one row per point")
            coords.setflags(write=False)
        self.coords = coords
        self.size = n
        self._diameter = scale if n > 1 else 0.0

    @classmethod
    def from_coords(cls, coords, **kwargs) -> "FiniteMetricSpace":
        coords = np.asarray(coords, dtype=float)
        if coords.ndim != 2:
            raise InputError("coordinates must be a 2-d array")
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        # Euclidean matrices satisfy the axioms up to rounding; skip the scan.
        kwargs.setdefault("check_triangle", False)
        space = cls(dist, coords=coords, **kwargs)
        space.triangle_checked = True
        return space

    @classmethod
    def from_matrix(cls, dist, **kwargs) -> "FiniteMetricSpace":
        return cls(dist, **kwargs)

    def check_ids(self, ids) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64).ravel()
        if ids.size and (ids.min() < 0 or ids.max() >= self.size):
            raise InputError(f"point id out of range 0..{self.size - 1}")
        if np.unique(ids).size != ids.size:
            raise InputError("duplicate point ids in subset")
        return np.sort(ids)

    def all_ids(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def diameter(self) -> float:
        return self._diameter


@dataclass(frozen=True)
class Measure:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1:
            raise InputError("weights must be a flat array")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InputError("weights must be finite and nonnegative")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, space: FiniteMetricSpace) -> "Measure":
        # Default when no weights are supplied: each point carries
        # diameter/n so the total mass matches the diameter.
        n = space.size
        total = space.diameter() if space.diameter() > 0 else 1.0
        return cls(np.full(n, total / n))

    @property
    def total(self) -> float:
        return float(self.weights.sum())


def validate_metric(space: FiniteMetricSpace, tolerance: float = DEFAULT_TOLERANCE,
                    max_violations: int = 100) -> ValidationReport:
    """Re-check the axioms and report every violation beyond tolerance."""
    dist = space.dist
    tol = tolerance * max(float(dist.max(initial=0.0)), 1.0)
    violations: list[MetricViolation] = []
    asym = np.argwhere(np.abs(dist - dist.T) > tol)
    for i, j in asym[: max_violations]:
        violations.append(MetricViolation("symmetry", (int(i), int(j)),
                                          float(abs(dist[i, j] - dist[j, i]))))
    diag = np.argwhere(np.abs(np.diag(dist)) > tol).ravel()
    for i in diag[: max_violations]:
        violations.append(MetricViolation("diagonal", (int(i),), float(dist[i, i])))
    neg = np.argwhere(dist < -tol)
    for i, j in neg[: max_violations]:
        violations.append(MetricViolation("negative", (int(i), int(j)), float(dist[i, j])))
    for i, j, k, excess in _triangle_violations(dist, tol, limit=max_violations):
        violations.append(MetricViolation("triangle", (i, j, k), excess))
    return ValidationReport(violations)


def distance(space: FiniteMetricSpace, i: int, j: int) -> float:
    if not (0 <= i < space.size and 0 <= j < space.size):
        raise InputError(f"point id out of range 0..{space.size - 1}")
    return float(space.dist[i, j])


def diameter(space: FiniteMetricSpace, ids=None) -> float:
    if ids is None:
        return space.diameter()
    ids = space.check_ids(ids)
    if ids.size == 0:
        raise InputError("diameter of an empty subset is undefined")
    if ids.size == 1:
        return 0.0
    sub = space.dist[np.ix_(ids, ids)]
    return float(sub.max())


def ball(space: FiniteMetricSpace, center: int, r: float, within=None) -> np.ndarray:
    """Closed ball B(center, r) as a sorted id array (optionally within a subset)."""
    if not (0 <= center < space.size):
        raise InputError(f"point id out of range 0..{space.size - 1}")
    if r < 0:
        raise InputError("ball radius must be nonnegative")
    row = space.dist[center]
    if within is None:
        return np.flatnonzero(row <= r).astype(np.int64)
    within = space.check_ids(within)
    return within[row[within] <= r]


def nearest_in(space: FiniteMetricSpace, x: int, candidates) -> tuple[int, float]:
    """Closest candidate to x (ties resolved to the smallest id)."""
    candidates = space.check_ids(candidates)
    if candidates.size == 0:
        raise InputError("nearest_in needs a nonempty candidate set")
    dists = space.dist[x, candidates]
    k = int(np.argmin(dists))  # argmin takes the first minimum = smallest id (sorted)
    return int(candidates[k]), float(dists[k])


def mass(measure: Measure, ids) -> float:
    ids = np.asarray(ids, dtype=np.int64).ravel()
    if ids.size == 0:
        return 0.0
    return float(measure.weights[ids].sum())
