"""Betweenness patterns and linear orderability of finite metric subsets.

A sequence of points is a valid order when every ascending triple (x, y, z)
satisfies d(x, z) > max(d(x, y), d(y, z)); for three points this is the
between pattern "y lies between x and z".  Some four-point sets (the unit
square corners) admit no order at all and instead exhibit a cyclic pattern;
find_order decides which case holds.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTripleError, InputError, MovingLemmaViolation
from .metric import FiniteMetricSpace

__all__ = [
    "OmegaResult",
    "OrderabilityResult",
    "is_between_pattern",
    "in_omega",
    "angle_omega_witness",
    "is_valid_order",
    "find_order",
    "moving_lemma_i",
    "moving_lemma_ii",
]

EXACT_SIZE_LIMIT = 9
DEFAULT_BUDGET = 1_000_000


def is_between_pattern(space: FiniteMetricSpace, x: int, y: int, z: int) -> bool:
    """True when y sits between x and z: d(x,z) strictly dominates the legs."""
    D = space.dist
    return D[x, z] > max(D[x, y], D[y, z])


@dataclass(frozen=True)
class OmegaResult:
    ok: bool
    violation: tuple[int, int, int] | None = None  # first (x, y, z) failing

    def __bool__(self) -> bool:  # allow `if in_omega(...)`
        return self.ok


def in_omega(space: FiniteMetricSpace, ids, phi: float) -> OmegaResult:
    """Strengthened triangle inequality: every between-patterned ordered triple
    (x, y, z) must satisfy d(x,z) >= d(x,y) + phi*d(y,z).

    Returns the lexicographically first violating triple when one exists.
    """
    if not (0 <= phi <= 1):
        raise InputError("phi must lie in [0, 1]")
    ids = space.check_ids(ids)
    m = ids.size
    if m < 3:
        return OmegaResult(True)
    D = space.dist[np.ix_(ids, ids)]
    best: tuple[int, int, int] | None = None
    for yi in range(m):
        dxy = D[:, yi][:, None]
        dyz = D[yi, :][None, :]
        pattern = D > np.maximum(dxy, dyz)
        viol = pattern & (D < dxy + phi * dyz)
        viol[yi, :] = False
        viol[:, yi] = False
        np.fill_diagonal(viol, False)
        if viol.any():
            xs, zs = np.nonzero(viol)
            cand = (int(ids[xs[0]]), int(ids[yi]), int(ids[zs[0]]))
            if best is None or cand < best:
                best = cand
    return OmegaResult(best is None, best)


def angle_omega_witness(space: FiniteMetricSpace, triple, phi: float) -> bool:
    """Sufficient angle test: cos of the middle angle <= -phi certifies the
    three-point set lies in the phi-strengthened class."""
    if not (0 <= phi <= 1):
        raise InputError("phi must lie in [0, 1]")
    x, y, z = triple
    a = space.dist[x, y]
    b = space.dist[y, z]
    if a <= 0 or b <= 0:
        raise DegenerateTripleError("angle witness needs distinct adjacent points")
    c = space.dist[x, z]
    u = (a * a + b * b - c * c) / (2.0 * a * b)
    return u <= -phi


def is_valid_order(space: FiniteMetricSpace, sequence) -> bool:
    """Exhaustive check of the ascending-triple condition on a sequence."""
    seq = np.asarray(sequence, dtype=np.int64).ravel()
    if np.unique(seq).size != seq.size:
        return False
    m = seq.size
    if m <= 2:
        return True
    D = space.dist[np.ix_(seq, seq)]
    for j in range(1, m - 1):
        block = D[:j, j + 1:]
        if not np.all(block > D[:j, j][:, None]):
            return False
        if not np.all(block > D[j, j + 1:][None, :]):
            return False
    return True


@dataclass(frozen=True)
class OrderabilityResult:
    kind: str  # "orderable" | "cyclic_quadruple" | "not_orderable"
    sequence: tuple[int, ...] | None = None
    quadruple: tuple[int, int, int, int] | None = None
    budget_exhausted: bool = False

    def to_json_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "orderable":
            out["sequence"] = list(self.sequence)
        elif self.kind == "cyclic_quadruple":
            out["quadruple"] = list(self.quadruple)
        else:
            out["budget_exhausted"] = self.budget_exhausted
        return out


def _canonical(seq: list[int]) -> tuple[int, ...]:
    # Orders come in reversal pairs; present the one starting at the smaller id.
    if seq[0] > seq[-1]:
        seq = seq[::-1]
    return tuple(int(v) for v in seq)


def _can_insert(D: np.ndarray, chain: list[int], pos: int, v: int) -> bool:
    # Check only the ascending triples that involve v placed at position pos;
    # every other triple was validated when the chain was built.
    prefix = chain[:pos]
    suffix = chain[pos:]
    # v last: (c_i, c_j, v) for i < j in the prefix.
    for j in range(len(prefix)):
        djv = D[prefix[j], v]
        for i in range(j):
            div = D[prefix[i], v]
            if div <= djv or div <= D[prefix[i], prefix[j]]:
                return False
    # v first: (v, c_j, c_k) for j < k in the suffix.
    for j in range(len(suffix)):
        djv = D[suffix[j], v]
        for k in range(j + 1, len(suffix)):
            dkv = D[suffix[k], v]
            if dkv <= djv or dkv <= D[suffix[j], suffix[k]]:
                return False
    # v middle: (c_i, v, c_k) across the split.
    for ci in prefix:
        div = D[ci, v]
        for ck in suffix:
            dik = D[ci, ck]
            if dik <= div or dik <= D[v, ck]:
                return False
    return True


def _cyclic_quadruple(space: FiniteMetricSpace, ids) -> tuple[int, int, int, int] | None:
    # Look for a labeling v1..v4 with the four wrap-around between patterns.
    for perm in itertools.permutations(sorted(int(i) for i in ids)):
        v1, v2, v3, v4 = perm
        if (is_between_pattern(space, v1, v2, v3)
                and is_between_pattern(space, v2, v3, v4)
                and is_between_pattern(space, v3, v4, v1)
                and is_between_pattern(space, v4, v1, v2)):
            return perm
    return None


def find_order(space: FiniteMetricSpace, ids, *, hint=None,
               exact_limit: int = EXACT_SIZE_LIMIT,
               budget: int = DEFAULT_BUDGET) -> OrderabilityResult:
    """Decide orderability of a subset.

    Sizes up to exact_limit are searched completely (insertion with full
    backtracking is exhaustive: restricting a valid order to a subset keeps it
    valid).  Larger sets use the same search under a node budget; exhaustion
    is reported distinctly.  A hint sequence, when valid, short-circuits the
    search.  Four-point sets with no order are tested for the cyclic pattern.
    """
    ids = space.check_ids(ids)
    m = ids.size
    if m == 0:
        raise InputError("find_order needs a nonempty subset")
    if m == 1:
        return OrderabilityResult("orderable", sequence=(int(ids[0]),))
    if m == 2:
        return OrderabilityResult("orderable", sequence=_canonical([int(i) for i in ids]))
    if hint is not None:
        hseq = [int(v) for v in hint]
        if sorted(hseq) == [int(v) for v in ids] and is_valid_order(space, hseq):
            return OrderabilityResult("orderable", sequence=_canonical(hseq))
    D = space.dist
    order_ids = [int(v) for v in ids]
    limit = None if m <= exact_limit else budget
    nodes = 0
    exhausted = False

    def search(chain: list[int], t: int) -> list[int] | None:
        nonlocal nodes, exhausted
        if t == m:
            return list(chain)
        v = order_ids[t]
        for pos in range(len(chain) + 1):
            nodes += 1
            if limit is not None and nodes > limit:
                exhausted = True
                return None
            if _can_insert(D, chain, pos, v):
                chain.insert(pos, v)
                found = search(chain, t + 1)
                if found is not None:
                    return found
                chain.pop(pos)
            if exhausted:
                return None
        return None

    seq = search([order_ids[0]], 1)
    if seq is not None:
        return OrderabilityResult("orderable", sequence=_canonical(seq))
    if exhausted:
        return OrderabilityResult("not_orderable", budget_exhausted=True)
    if m == 4:
        quad = _cyclic_quadruple(space, ids)
        if quad is not None:
            return OrderabilityResult("cyclic_quadruple", quadruple=quad)
    return OrderabilityResult("not_orderable")


def _omega_pre(space: FiniteMetricSpace, pts, phi: float) -> bool:
    return in_omega(space, sorted(set(int(p) for p in pts)), phi).ok


def moving_lemma_i(space: FiniteMetricSpace, x: int, y: int, z: int, z1: int,
                   phi: float) -> bool | None:
    """Endpoint move: when y lies between x and z and z1 is close enough to z,
    y still lies between x and z1.

    Returns None when the three-point strengthened-class preconditions fail,
    False when the closeness hypothesis fails, True when it holds (and the
    conclusion is then asserted).
    """
    if not (0 < phi <= 1):
        raise InputError("phi must lie in (0, 1]")
    if not (_omega_pre(space, (x, y, z), phi) and _omega_pre(space, (x, y, z1), phi)):
        return None
    D = space.dist
    if not is_between_pattern(space, x, y, z):
        return False
    if not D[z, z1] < phi * min(D[x, y], D[y, z] + D[y, z1]):
        return False
    if not is_between_pattern(space, x, y, z1):
        raise MovingLemmaViolation(
            f"endpoint move failed: ({x},{y},{z1}) lost the between pattern")
    return True


def moving_lemma_ii(space: FiniteMetricSpace, x: int, z: int, y: int, z1: int,
                    phi: float) -> bool | None:
    """Middle move: when z lies between x and y and z1 is close enough to z,
    z1 also lies between x and y.  Return convention as moving_lemma_i."""
    if not (0 < phi <= 1):
        raise InputError("phi must lie in (0, 1]")
    if not (_omega_pre(space, (x, y, z), phi) and _omega_pre(space, (x, y, z1), phi)):
        return None
    D = space.dist
    if not is_between_pattern(space, x, z, y):
        return False
    if not D[z, z1] < phi * min(D[z, x] + D[z1, x], D[z, y] + D[z1, y]):
        return False
    if not is_between_pattern(space, x, z1, y):
        raise MovingLemmaViolation(
            f"middle move failed: ({x},{z1},{y}) lost the between pattern")
    return True
