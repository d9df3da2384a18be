"""Coverage measurement and hypothesis gating for built curves.

Answers two questions after a build: how much mass sits farther than epsilon
from the curve (and why -- thin density or a stopped region), and whether the
input satisfied the linear-growth/low-energy hypotheses in the first place.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .builder import BuildResult
from .config import Config
from .curvature import c2_k
from .errors import InputError
from .metric import FiniteMetricSpace, Measure
from .nets import coarsest_scale, finest_scale

__all__ = [
    "CoverageReport",
    "GateReport",
    "point_to_curve",
    "curve_distances",
    "coverage",
    "proposition_gate",
]


def _curve_data(curve) -> tuple[np.ndarray, list[int] | None, list[tuple[int, int]]]:
    """Normalize a curve argument to (vertex ids, path sequence, stopped info).

    Accepts a BuildResult, a plain sequence of vertex ids (treated as path
    order), or a dict with "vertices" and optional "stopped" entries
    (the JSON report shape).
    """
    if isinstance(curve, BuildResult):
        seq = list(curve.sequence)
        stopped = []
        final = curve.cascade.final
        for y, m in sorted(final.H.items()):
            stopped.append((final.q_inverse[y], m))
        return np.asarray(seq, dtype=np.int64), seq, stopped
    if isinstance(curve, dict):
        seq = [int(v) for v in curve.get("vertices", [])]
        stopped = [(int(s["center"]), int(s["m"]))
                   for s in curve.get("stopped", [])]
        return np.asarray(seq, dtype=np.int64), seq, stopped
    seq = [int(v) for v in curve]
    return np.asarray(seq, dtype=np.int64), seq, []


def _segment_distances(coords: np.ndarray, z: np.ndarray,
                       seq: list[int]) -> float:
    best = math.inf
    p = z
    for a, b in zip(seq, seq[1:]):
        va = coords[a]
        vb = coords[b]
        ab = vb - va
        denom = float(ab @ ab)
        if denom == 0.0:
            d = float(np.linalg.norm(p - va))
        else:
            t = float((p - va) @ ab) / denom
            t = min(1.0, max(0.0, t))
            d = float(np.linalg.norm(p - (va + t * ab)))
        if d < best:
            best = d
    return best


def point_to_curve(space: FiniteMetricSpace, curve, z: int,
                   mode: str = "vertex") -> float:
    """Distance from point z to the curve.

    vertex mode takes the minimum metric distance to the curve vertices and
    works for any source.  segment mode measures against the polyline in
    coordinate space and needs a coordinate source.
    """
    ids, seq, _ = _curve_data(curve)
    if ids.size == 0:
        raise InputError("point_to_curve needs a nonempty curve")
    z = int(space.check_ids([z])[0])
    if mode == "vertex":
        return float(space.dist[z, ids].min())
    if mode == "segment":
        if space.coords is None:
            raise InputError("segment mode needs a coordinate source")
        if len(seq) == 1:
            return float(np.linalg.norm(space.coords[z] - space.coords[seq[0]]))
        return _segment_distances(space.coords, space.coords[z], seq)
    raise InputError(f"unknown distance mode {mode!r}")


def curve_distances(space: FiniteMetricSpace, curve,
                    mode: str = "vertex") -> np.ndarray:
    """Vector of point_to_curve over all points."""
    ids, seq, _ = _curve_data(curve)
    if ids.size == 0:
        raise InputError("curve_distances needs a nonempty curve")
    if mode == "vertex":
        return space.dist[:, ids].min(axis=1)
    return np.asarray([point_to_curve(space, curve, z, mode)
                       for z in range(space.size)])


@dataclass(frozen=True)
class CoverageReport:
    epsilon: float
    mode: str
    uncovered_mass: float
    uncovered_fraction: float
    v1_mass: float
    v2_mass: float
    other_mass: float
    per_point_distance: tuple[float, ...]
    v1_ids: tuple[int, ...]
    v2_ids: tuple[int, ...]
    other_ids: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "mode": self.mode,
            "uncovered_mass": self.uncovered_mass,
            "uncovered_fraction": self.uncovered_fraction,
            "v1_mass": self.v1_mass,
            "v2_mass": self.v2_mass,
            "other_mass": self.other_mass,
            "v1_ids": list(self.v1_ids),
            "v2_ids": list(self.v2_ids),
            "other_ids": list(self.other_ids),
            "per_point_distance": list(self.per_point_distance),
        }


def _min_positive_gap(space: FiniteMetricSpace) -> float:
    d = space.dist.copy()
    np.fill_diagonal(d, np.inf)
    gaps = d[np.isfinite(d) & (d > 0)]
    if gaps.size == 0:
        raise InputError("space has no positive distances")
    return float(gaps.min())


def _thin_at(space, weights, z, r, tau0) -> bool:
    return float(weights[space.dist[z] <= r].sum()) <= tau0 * r / 20.0


def _is_thin(space: FiniteMetricSpace, measure: Measure, z: int, lo: float,
             hi: float, tau0: float, exact: bool) -> bool:
    """Does some radius in [lo, hi] see mass at most tau0*r/20 around z?"""
    if lo > hi:
        return False
    w = measure.weights
    if _thin_at(space, w, z, lo, tau0) or _thin_at(space, w, z, hi, tau0):
        return True
    if exact:
        row = space.dist[z]
        breakpoints = np.unique(row[(row > lo) & (row <= hi)])
        for b in breakpoints:
            if _thin_at(space, w, z, float(b), tau0):
                return True
            # just below a jump the ball is open; the threshold is a left
            # limit, hence the strict comparison
            left_mass = float(w[row < b].sum())
            if left_mass < tau0 * float(b) / 20.0:
                return True
        return False
    diam = space.diameter()
    levels = math.ceil(math.log2(diam / _min_positive_gap(space))) if diam > 0 else 0
    for m in range(0, max(levels, 0) + 1):
        r = diam * 2.0 ** (-m)
        if lo <= r <= hi and _thin_at(space, w, z, r, tau0):
            return True
    return False


def coverage(space: FiniteMetricSpace, measure: Measure, curve,
             epsilon: float, *, mode: str = "vertex",
             config: Config | None = None,
             exact_thin_scan: bool = False) -> CoverageReport:
    """Mass farther than epsilon from the curve, split by explanation.

    Uncovered points are classified greedily: thin-density points (some
    radius in [6 d(z, curve), diameter] carries mass <= tau0 r / 20) first,
    then points inside a doubled stop ball, then an unexplained remainder.
    """
    if epsilon < 0:
        raise InputError("coverage needs epsilon >= 0")
    if config is None:
        config = Config()
    _, seq, stopped = _curve_data(curve)
    dists = curve_distances(space, curve, mode)
    w = measure.weights
    total = float(w.sum())
    uncovered = np.flatnonzero(dists > epsilon)
    diam = space.diameter()
    v1: list[int] = []
    v2: list[int] = []
    other: list[int] = []
    for z in map(int, uncovered):
        if _is_thin(space, measure, z, 6.0 * float(dists[z]), diam,
                    config.tau0, exact_thin_scan):
            v1.append(z)
            continue
        in_stop = False
        for center, m in stopped:
            if space.dist[z, center] <= 2.0 ** (-m + 4):
                in_stop = True
                break
        (v2 if in_stop else other).append(z)
    um = float(w[uncovered].sum())
    return CoverageReport(
        epsilon=epsilon,
        mode=mode,
        uncovered_mass=um,
        uncovered_fraction=um / total if total > 0 else 0.0,
        v1_mass=float(w[v1].sum()),
        v2_mass=float(w[v2].sum()),
        other_mass=float(w[other].sum()),
        per_point_distance=tuple(float(d) for d in dists),
        v1_ids=tuple(v1),
        v2_ids=tuple(v2),
        other_ids=tuple(other),
    )


@dataclass(frozen=True)
class GateReport:
    """Hypothesis screen: total mass vs diameter, ball growth, energy."""
    mass: float
    mass_floor: float
    mass_ok: bool
    growth_max: float
    growth_argmax: tuple[int, float]
    growth_cap: float
    growth_ok: bool
    energy: float
    energy_cap: float
    energy_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.mass_ok and self.growth_ok and self.energy_ok

    def to_json_dict(self) -> dict:
        return {
            "mass": self.mass,
            "mass_floor": self.mass_floor,
            "mass_ok": self.mass_ok,
            "growth_max": self.growth_max,
            "growth_argmax": [self.growth_argmax[0], self.growth_argmax[1]],
            "growth_cap": self.growth_cap,
            "growth_ok": self.growth_ok,
            "energy": self.energy,
            "energy_cap": self.energy_cap,
            "energy_ok": self.energy_ok,
            "all_ok": self.all_ok,
        }


def proposition_gate(space: FiniteMetricSpace, measure: Measure,
                     config: Config | None = None) -> GateReport:
    """Evaluate the three standing hypotheses on the input.

    (1) total mass at least mu0 * diameter; (2) every ball's mass at most
    C0 * radius, scanned over dyadic radii between the finest and coarsest
    working scales; (3) curvature energy at most eps0 * diameter.
    The builder runs regardless of the outcome; the report travels with it.
    """
    if config is None:
        config = Config()
    w = measure.weights
    total = float(w.sum())
    diam = space.diameter()
    mass_floor = config.mu0 * diam
    growth_max = 0.0
    argmax = (0, 0.0)
    if diam > 0:
        n0 = coarsest_scale(space)
        n_hi = finest_scale(space, config)
        for m in range(n0, n_hi + 1):
            r = 2.0 ** (-m)
            ratios = ((space.dist <= r) @ w) / r
            k = int(np.argmax(ratios))
            if float(ratios[k]) > growth_max:
                growth_max = float(ratios[k])
                argmax = (k, r)
    energy = c2_k(space, measure, K=config.K).value
    energy_cap = config.eps0 * diam
    return GateReport(
        mass=total,
        mass_floor=mass_floor,
        mass_ok=total >= mass_floor,
        growth_max=growth_max,
        growth_argmax=argmax,
        growth_cap=config.C0,
        growth_ok=growth_max <= config.C0,
        energy=energy,
        energy_cap=energy_cap,
        energy_ok=energy <= energy_cap,
    )
