"""Multiscale nets: density screening, representatives, separation, stopping.

Scale n works at resolution 2^-n.  At each scale the space is screened for
points whose balls carry linear mass (density set), each surviving center is
replaced by a low-curvature representative from its small ball, a maximal
separated subset becomes the net D_n, and net points whose neighborhood mass
has been exhausted are frozen into the stopped set H_n with a stop ball that
later scales must avoid.  X_n = D_n u H_n feeds the curve builder.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .curvature import c2_k, c2_of_sides
from .errors import InputError, StructuralError
from .metric import FiniteMetricSpace, Measure, ball, mass

__all__ = [
    "NetState",
    "CascadeResult",
    "ScreenReport",
    "coarsest_scale",
    "finest_scale",
    "density_set",
    "select_representative",
    "separated_subset",
    "stopped_update",
    "initial_state",
    "advance_scale",
    "run_cascade",
    "find_dense_ball",
    "epsilon1_screen",
]

_REL_TOL = 1e-12


def coarsest_scale(space: FiniteMetricSpace) -> int:
    """Largest integer n0 with diameter <= 2^-n0."""
    d = space.diameter()
    if d <= 0:
        raise StructuralError("coarsest scale undefined: zero diameter")
    n0 = math.floor(-math.log2(d))
    while 2.0 ** (-(n0 + 1)) >= d:
        n0 += 1
    while 2.0 ** (-n0) < d:
        n0 -= 1
    return n0


def finest_scale(space: FiniteMetricSpace, config: Config) -> int:
    """Configured n_max, or the smallest n with 2^-n below half the minimum
    positive nearest-neighbor distance."""
    if config.n_max is not None:
        return config.n_max
    D = space.dist.copy()
    np.fill_diagonal(D, np.inf)
    nn = D.min(axis=1)
    nn = nn[(nn > 0) & np.isfinite(nn)]
    if nn.size == 0:
        raise StructuralError("finest scale undefined: no positive nearest-neighbor distance")
    half = float(nn.min()) / 2.0
    n = math.floor(-math.log2(half))
    while 2.0 ** (-n) >= half:
        n += 1
    while n > 0 and 2.0 ** (-(n - 1)) < half:
        n -= 1
    return max(n, coarsest_scale(space))


def density_set(space: FiniteMetricSpace, measure: Measure, config: Config,
                n: int, n0: int | None = None) -> np.ndarray:
    """Points whose closed balls carry mass >= delta * 2^-m at every scale m
    from the coarsest through n + N0."""
    if n0 is None:
        n0 = coarsest_scale(space)
    keep = np.ones(space.size, dtype=bool)
    w = measure.weights
    for m in range(n0, n + config.N0 + 1):
        r = 2.0 ** (-m)
        bmass = (space.dist <= r) @ w
        keep &= bmass >= config.delta * r
        if not keep.any():
            break
    return np.flatnonzero(keep).astype(np.int64)


def select_representative(space: FiniteMetricSpace, measure: Measure,
                          config: Config, n: int, x: int) -> int:
    """Point of B(x, 2^-n-N0) minimizing the weighted squared curvature against
    the annulus pair set around x (ties to the smallest id)."""
    r_ball = 2.0 ** (-n - config.N0)
    scale = 2.0 ** (-n)
    candidates = ball(space, x, r_ball)
    if candidates.size == 1:
        return int(candidates[0])
    row = space.dist[x]
    ring = np.flatnonzero((row > config.r1 * scale) & (row <= config.R1 * scale))
    if ring.size < 2:
        return int(candidates[0])
    sub = space.dist[np.ix_(ring, ring)]
    ii, jj = np.triu_indices(ring.size, k=1)
    sep = sub[ii, jj] > config.r1 * scale
    if not sep.any():
        return int(candidates[0])
    p1 = ring[ii[sep]]
    p2 = ring[jj[sep]]
    base = space.dist[p1, p2]
    wpair = measure.weights[p1] * measure.weights[p2]
    floor = -1e-9 * max(space.diameter(), 1.0)
    best_id = int(candidates[0])
    best_val = math.inf
    for c in candidates:
        c2 = c2_of_sides(base, space.dist[p1, c], space.dist[p2, c], floor)
        val = float(np.sum(c2 * wpair))
        if val < best_val:
            best_val = val
            best_id = int(c)
    return best_id


def separated_subset(space: FiniteMetricSpace, candidates, n: int) -> np.ndarray:
    """Greedy maximal subset with pairwise distance > 2^-n, scanning ascending ids."""
    candidates = space.check_ids(candidates)
    sep = 2.0 ** (-n)
    kept: list[int] = []
    for c in candidates:
        if not kept or float(space.dist[c, kept].min()) > sep:
            kept.append(int(c))
    return np.asarray(kept, dtype=np.int64)


@dataclass(frozen=True)
class NetState:
    n: int
    D: np.ndarray                  # net point ids, sorted
    D_prime: np.ndarray            # their pre-representative centers, sorted
    H: dict[int, int]              # stopped id -> scale at which it stopped
    q_inverse: dict[int, int]      # net or stopped id -> its selection center
    density_index: int             # density-set index used to build D
    le2_violations: tuple = ()     # prior-scale points left 2^-n+5-far (warning)

    @property
    def X(self) -> np.ndarray:
        return np.asarray(sorted(set(map(int, self.D)) | set(self.H)), dtype=np.int64)

    def stop_ball(self, y: int) -> tuple[int, float]:
        """Center id and radius of the exclusion ball around a stopped point."""
        m = self.H[y]
        return self.q_inverse[y], 2.0 ** (-m + 3)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "D": [int(v) for v in self.D],
            "H": [{"id": int(y), "m": int(m)} for y, m in sorted(self.H.items())],
            "q_inverse": {str(int(k)): int(v) for k, v in sorted(self.q_inverse.items())},
            "density_index": self.density_index,
        }


def _stop_mask(space: FiniteMetricSpace, H: dict[int, int],
               q_inverse: dict[int, int]) -> np.ndarray:
    mask = np.zeros(space.size, dtype=bool)
    for y, m in H.items():
        center = q_inverse[y]
        mask |= space.dist[center] <= 2.0 ** (-m + 3)
    return mask


def stopped_update(space: FiniteMetricSpace, measure: Measure, config: Config,
                   state: NetState) -> dict[int, int]:
    """Freeze net points whose enlarged ball, minus existing stop balls, holds
    at most C1 * delta * 2^-n mass.  Returns the enlarged stopped map."""
    n = state.n
    old_mask = _stop_mask(space, state.H, state.q_inverse)
    w = measure.weights
    new_H = dict(state.H)
    threshold = config.C1 * config.delta * 2.0 ** (-n)
    for x in state.D:
        x = int(x)
        center = state.q_inverse[x]
        members = space.dist[center] <= 2.0 ** (-n + 4)
        residual = float(w[members & ~old_mask].sum())
        if residual <= threshold:
            new_H[x] = n
    return new_H


def _build_net(space, measure, config, scale, density_index, H, q_inverse, n0):
    dens = density_set(space, measure, config, density_index, n0)
    if H:
        mask = _stop_mask(space, H, q_inverse)
        dens = dens[~mask[dens]]
    d_prime = separated_subset(space, dens, scale)
    reps: dict[int, int] = {}
    for x in d_prime:
        r = select_representative(space, measure, config, scale, int(x))
        if r in reps:
            raise StructuralError(
                f"representative collision at scale {scale}: {r} chosen twice")
        if r in H:
            raise StructuralError(
                f"representative {r} at scale {scale} is already stopped")
        reps[r] = int(x)
    D = np.asarray(sorted(reps), dtype=np.int64)
    q_inv = dict(q_inverse)
    q_inv.update(reps)
    return D, np.sort(d_prime), q_inv


def initial_state(space: FiniteMetricSpace, measure: Measure, config: Config) -> NetState:
    n0 = coarsest_scale(space)
    D, d_prime, q_inv = _build_net(space, measure, config, n0, n0, {}, {}, n0)
    if D.size == 0:
        raise StructuralError("no point passes the density screen at the coarsest scale")
    # A maximal 2^-n0-separated set in a space of diameter <= 2^-n0 is a point.
    if D.size != 1:
        raise StructuralError(f"coarsest net has {D.size} points; expected one")
    return NetState(n=n0, D=D, D_prime=d_prime, H={},
                    q_inverse={int(k): v for k, v in q_inv.items()},
                    density_index=n0)


def _min_dist_to(space: FiniteMetricSpace, ids_from, ids_to) -> np.ndarray:
    ids_from = np.asarray(ids_from, dtype=np.int64)
    ids_to = np.asarray(ids_to, dtype=np.int64)
    return space.dist[np.ix_(ids_from, ids_to)].min(axis=1)


def advance_scale(space: FiniteMetricSpace, measure: Measure, config: Config,
                  state: NetState) -> NetState:
    """One scale step: update the stopped set, rebuild the separated net at the
    finer scale, and verify the separation/proximity guarantees."""
    n = state.n
    s = n + 1
    n0 = coarsest_scale(space)
    new_H = stopped_update(space, measure, config, state)
    q_carry = {y: state.q_inverse[y] for y in new_H}
    density_index = s if config.density_index_aligned else n
    D, d_prime, q_inv = _build_net(space, measure, config, s, density_index,
                                   new_H, q_carry, n0)
    new_state = NetState(n=s, D=D, D_prime=d_prime, H=new_H, q_inverse=q_inv,
                         density_index=density_index)
    X_new = new_state.X
    if X_new.size == 0:
        raise StructuralError(f"scale {s}: the net and the stopped set are both empty")

    diam = max(space.diameter(), 1.0)
    # Separation: distinct members of X stay (1 - 2^(1-N0)) * 2^-s apart.
    if X_new.size > 1:
        sub = space.dist[np.ix_(X_new, X_new)].copy()
        np.fill_diagonal(sub, np.inf)
        required = (1.0 - 2.0 ** (1 - config.N0)) * 2.0 ** (-s)
        closest = float(sub.min())
        if closest <= required - _REL_TOL * diam:
            i, j = np.unravel_index(int(sub.argmin()), sub.shape)
            raise StructuralError(
                f"scale {s}: separation fails for ({int(X_new[i])}, {int(X_new[j])}): "
                f"{closest:.6e} <= {required:.6e}")
    # Proximity of centers: new centers sit within 2^-n of the old centers.
    if d_prime.size and state.D_prime.size:
        gap = _min_dist_to(space, d_prime, state.D_prime)
        bound = 2.0 ** (-n) * (1.0 + _REL_TOL)
        if float(gap.max()) > bound:
            k = int(gap.argmax())
            raise StructuralError(
                f"scale {s}: center {int(d_prime[k])} is {float(gap[k]):.6e} "
                f"from the previous centers (bound {bound:.6e})")
    # Proximity of net points: within (1 + 2^(1-N0)) * 2^-n of the old net.
    if D.size and state.D.size:
        gap = _min_dist_to(space, D, state.D)
        bound = (1.0 + 2.0 ** (1 - config.N0)) * 2.0 ** (-n) * (1.0 + _REL_TOL)
        if float(gap.max()) > bound:
            k = int(gap.argmax())
            raise StructuralError(
                f"scale {s}: net point {int(D[k])} is {float(gap[k]):.6e} "
                f"from the previous net (bound {bound:.6e})")
    # Soft persistence check: old members should stay 2^-n+5-close (warn only).
    le2: list[int] = []
    X_old = state.X
    if X_old.size:
        gap = _min_dist_to(space, X_old, X_new)
        limit = 2.0 ** (-n + 5)
        le2 = [int(X_old[i]) for i in np.flatnonzero(gap >= limit)]
    return NetState(n=s, D=D, D_prime=d_prime, H=new_H, q_inverse=q_inv,
                    density_index=density_index, le2_violations=tuple(le2))


@dataclass(frozen=True)
class CascadeResult:
    states: list[NetState]
    n0: int
    n_max: int
    density_variant: str
    warnings: list[str] = field(default_factory=list)

    @property
    def final(self) -> NetState:
        return self.states[-1]


def run_cascade(space: FiniteMetricSpace, measure: Measure, config: Config) -> CascadeResult:
    """Build the full net cascade from the coarsest to the finest scale."""
    if measure.weights.shape[0] != space.size:
        raise InputError("measure length does not match the space")
    n0 = coarsest_scale(space)
    n_max = finest_scale(space, config)
    if n_max < n0:
        raise InputError(f"n_max {n_max} is coarser than the coarsest scale {n0}")
    states = [initial_state(space, measure, config)]
    warnings: list[str] = []
    while states[-1].n < n_max:
        nxt = advance_scale(space, measure, config, states[-1])
        if nxt.le2_violations:
            warnings.append(
                f"scale {nxt.n}: {len(nxt.le2_violations)} prior point(s) "
                f"farther than 2^{-nxt.n + 6} from the new net "
                f"(ids {list(nxt.le2_violations)[:5]}...)")
        states.append(nxt)
    variant = "aligned" if config.density_index_aligned else "lagged"
    return CascadeResult(states=states, n0=n0, n_max=n_max,
                         density_variant=variant, warnings=warnings)


def find_dense_ball(space: FiniteMetricSpace, measure: Measure, ids,
                    eta: float, r: float) -> tuple[int, float]:
    """Subset point whose eta*r-ball captures the most subset mass
    (ties to the smallest id)."""
    if eta <= 0 or r <= 0:
        raise InputError("find_dense_ball needs positive eta and r")
    ids = space.check_ids(ids)
    if ids.size == 0:
        raise InputError("find_dense_ball needs a nonempty subset")
    radius = eta * r
    sub = space.dist[np.ix_(ids, ids)]
    masses = (sub <= radius) @ measure.weights[ids]
    k = int(np.argmax(masses))
    return int(ids[k]), float(masses[k])


@dataclass(frozen=True)
class ScreenReport:
    violations: list[tuple[int, float, float]]  # (point, radius, value)
    n0: int
    n_max: int
    threshold: float

    @property
    def ok(self) -> bool:
        return not self.violations


def epsilon1_screen(space: FiniteMetricSpace, measure: Measure, config: Config) -> ScreenReport:
    """Scan local ball energies c2(B(x, r))/r over the dyadic radius grid and
    report points exceeding the eps1 threshold.  Diagnostic only."""
    n0 = coarsest_scale(space)
    n_max = finest_scale(space, config)
    cache: dict[tuple, float] = {}
    violations: list[tuple[int, float, float]] = []
    for m in range(n0, n_max + 1):
        r = 2.0 ** (-m)
        for x in range(space.size):
            members = np.flatnonzero(space.dist[x] <= r)
            if members.size < 3:
                continue
            key = tuple(members.tolist())
            if key not in cache:
                cache[key] = c2_k(space, measure, members, config.K).value
            value = cache[key] / r
            if value > config.eps1:
                violations.append((x, r, value))
    return ScreenReport(violations=violations, n0=n0, n_max=n_max,
                        threshold=config.eps1)
