"""Curvature of point triples and triple-sum energies.

The curvature of a triple is the reciprocal circumradius of its distance
triangle.  Energies are sums over ordered triples of pairwise-distinct points,
weighted by the product of point masses; the comparable-triple sum restricts
to triples whose pairwise distances lie within a factor K of each other
(strictly).  Everything here is permutation-symmetric, scale-covariant of
degree -1 (curvature) or +1 (energies with matching weight scaling), and
deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTripleError, InputError
from .metric import FiniteMetricSpace, Measure, ball

__all__ = [
    "EnergyReport",
    "CpReport",
    "angle",
    "menger",
    "partial_defect",
    "in_t_k",
    "c2_of_sides",
    "c2_k",
    "beta",
    "local_c2",
    "check_cp",
]

# Slack for the arccos argument and for triangle defects, relative to scale.
CLAMP_TOL = 1e-9
CP_SLACK = 1e-12


@dataclass(frozen=True)
class EnergyReport:
    value: float
    triples_counted: int
    K: float | None

    def to_json_dict(self) -> dict:
        if self.K is None:
            k_out = None
        elif math.isinf(self.K):
            k_out = "inf"
        else:
            k_out = self.K
        return {"K": k_out, "triples_counted": self.triples_counted, "value": self.value}


@dataclass(frozen=True)
class CpReport:
    lhs: float   # c2_K / (4 K^2)
    mid: float   # beta
    rhs: float   # c2_inf / 2
    K: float
    holds: bool

    def to_json_dict(self) -> dict:
        return {"K": self.K, "holds": self.holds,
                "lhs": self.lhs, "mid": self.mid, "rhs": self.rhs}


def _check_k(K: float) -> float:
    K = float(K)
    if math.isnan(K) or K < 1:
        raise InputError("K must be >= 1 (math.inf allowed)")
    return K


def angle(space: FiniteMetricSpace, i: int, j: int, k: int) -> float:
    """Angle at the middle point j of the triple (i, j, k), in [0, pi].

    Computed from the law of cosines on the pairwise distances; the arccos
    argument is clamped when within 1e-9 of [-1, 1] and rejected beyond.
    """
    a = space.dist[i, j]
    b = space.dist[j, k]
    if a <= 0 or b <= 0:
        raise DegenerateTripleError("angle needs d(i,j) > 0 and d(j,k) > 0")
    c = space.dist[i, k]
    u = (a * a + b * b - c * c) / (2.0 * a * b)
    if u > 1.0 + CLAMP_TOL or u < -1.0 - CLAMP_TOL:
        raise InputError(f"non-metric distances: cosine argument {u!r} outside [-1, 1]")
    return math.acos(min(1.0, max(-1.0, u)))


def _defects(a: float, b: float, c: float) -> tuple[float, float, float]:
    # The three path excesses of the distance triangle, one per middle point.
    return (a + b - c, a + c - b, b + c - a)


def menger(space: FiniteMetricSpace, i: int, j: int, k: int) -> float:
    """Curvature of the triple: twice the sine of the middle angle over the
    opposite distance, evaluated in the symmetric factored form
    sqrt(p*s1*s2*s3)/(abc) (p the perimeter, s_i the triangle defects), which
    is the numerically stable identity for the same quantity and returns an
    exact 0 on collinear matrix inputs.
    """
    a = space.dist[i, j]
    b = space.dist[j, k]
    c = space.dist[i, k]
    if a <= 0 or b <= 0 or c <= 0:
        raise DegenerateTripleError("curvature is undefined on repeated points")
    p = a + b + c
    s1, s2, s3 = _defects(a, b, c)
    floor = -CLAMP_TOL * max(p, space.diameter())
    if min(s1, s2, s3) < floor:
        raise InputError("non-metric distances: triangle inequality fails on the triple")
    prod = p * max(s1, 0.0) * max(s2, 0.0) * max(s3, 0.0)
    return math.sqrt(prod) / (a * b * c)


def partial_defect(space: FiniteMetricSpace, i: int, j: int, k: int) -> float:
    """Smallest path excess d(x,y) + d(y,z) - d(x,z) over the orderings of the triple."""
    a = space.dist[i, j]
    b = space.dist[j, k]
    c = space.dist[i, k]
    return max(min(_defects(a, b, c)), 0.0)


def in_t_k(space: FiniteMetricSpace, triple, K: float) -> bool:
    """Comparability: every pairwise distance strictly below K times every other."""
    K = _check_k(K)
    i, j, k = triple
    a = space.dist[i, j]
    b = space.dist[j, k]
    c = space.dist[i, k]
    lo = min(a, b, c)
    if lo <= 0:
        return False
    if math.isinf(K):
        return True
    return max(a, b, c) < K * lo


def c2_of_sides(x: np.ndarray, y: np.ndarray, z: np.ndarray,
                defect_floor: float = 0.0) -> np.ndarray:
    """Vectorized squared curvature from three side-length arrays.

    Entries with a zero side are returned as 0 (degenerate).  A triangle
    defect below defect_floor (a nonpositive threshold) raises: the sides do
    not come from a metric.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    p = x + y + z
    s1 = x + y - z
    s2 = x + z - y
    s3 = y + z - x
    smin = np.minimum(np.minimum(s1, s2), s3)
    if smin.size and float(smin.min()) < defect_floor:
        raise InputError("non-metric distances: triangle inequality fails on a triple")
    num = p * np.maximum(s1, 0.0) * np.maximum(s2, 0.0) * np.maximum(s3, 0.0)
    den = np.square(x * y * z)
    ok = den > 0
    return np.where(ok, num / np.where(ok, den, 1.0), 0.0)


def _triple_blocks(m: int):
    """Unordered triples a < J < K over range(m), one block per smallest index."""
    for a in range(m - 2):
        jj, kk = np.triu_indices(m - a - 1, k=1)
        yield a, jj + a + 1, kk + a + 1


def _subset_view(space: FiniteMetricSpace, measure: Measure, ids):
    ids = space.check_ids(space.all_ids() if ids is None else ids)
    if measure.weights.shape[0] != space.size:
        raise InputError("measure length does not match the space")
    D = space.dist[np.ix_(ids, ids)]
    w = measure.weights[ids]
    return ids, D, w


def c2_k(space: FiniteMetricSpace, measure: Measure, ids=None, K: float = math.inf) -> EnergyReport:
    """Triple energy sum of squared curvature over comparable ordered triples.

    Ordered triples of pairwise-distinct points whose distance triangle lies
    in the comparability class are counted; the integrand and weight product
    are permutation-invariant, so unordered triples are enumerated and scaled
    by 6.  Block sums use numpy's pairwise reduction and are combined with
    math.fsum.
    """
    K = _check_k(K)
    ids, D, w = _subset_view(space, measure, ids)
    m = ids.size
    defect_floor = -CLAMP_TOL * max(space.diameter(), 1.0)
    block_sums: list[float] = []
    counted = 0
    for a, J, Kk in _triple_blocks(m):
        x = D[a, J]
        y = D[a, Kk]
        z = D[J, Kk]
        lo = np.minimum(np.minimum(x, y), z)
        keep = lo > 0
        if not math.isinf(K):
            hi = np.maximum(np.maximum(x, y), z)
            keep &= hi < K * lo
        if not keep.any():
            continue
        x = x[keep]; y = y[keep]; z = z[keep]
        c2 = c2_of_sides(x, y, z, defect_floor)
        wk = w[J][keep] * w[Kk][keep] * w[a]
        block_sums.append(float(np.sum(c2 * wk)))
        counted += int(keep.sum())
    return EnergyReport(value=6.0 * math.fsum(block_sums),
                        triples_counted=6 * counted, K=K)


def beta(space: FiniteMetricSpace, measure: Measure, ids=None) -> EnergyReport:
    """Triple energy sum of minimal path excess over cubed triple diameter."""
    ids, D, w = _subset_view(space, measure, ids)
    m = ids.size
    block_sums: list[float] = []
    counted = 0
    for a, J, Kk in _triple_blocks(m):
        x = D[a, J]
        y = D[a, Kk]
        z = D[J, Kk]
        hi = np.maximum(np.maximum(x, y), z)
        keep = hi > 0  # fully coincident triples contribute nothing
        if not keep.any():
            continue
        s1 = x + y - z
        s2 = x + z - y
        s3 = y + z - x
        dpart = np.maximum(np.minimum(np.minimum(s1, s2), s3), 0.0)
        terms = np.where(keep, dpart / np.where(keep, hi, 1.0) ** 3, 0.0)
        wk = w[J] * w[Kk] * w[a]
        block_sums.append(float(np.sum(terms * wk)))
        counted += int(keep.size)  # all distinct-id triples are counted
    return EnergyReport(value=6.0 * math.fsum(block_sums),
                        triples_counted=6 * counted, K=None)


def local_c2(space: FiniteMetricSpace, measure: Measure, x: int, r: float,
             K: float = math.inf) -> float:
    """Energy of the closed ball B(x, r) normalized by r."""
    if r <= 0:
        raise InputError("local energy needs a positive radius")
    members = ball(space, x, r)
    return c2_k(space, measure, members, K).value / r


def check_cp(space: FiniteMetricSpace, measure: Measure, ids=None,
             K: float = 2.0) -> CpReport:
    """Sandwich check: c2_K/(4K^2) <= beta <= c2_inf/2, with absolute slack 1e-12."""
    K = _check_k(K)
    if math.isinf(K):
        raise InputError("the sandwich check needs a finite K")
    lhs = c2_k(space, measure, ids, K).value / (4.0 * K * K)
    mid = beta(space, measure, ids).value
    rhs = c2_k(space, measure, ids, math.inf).value / 2.0
    holds = (lhs <= mid + CP_SLACK) and (mid <= rhs + CP_SLACK)
    return CpReport(lhs=lhs, mid=mid, rhs=rhs, K=K, holds=holds)
