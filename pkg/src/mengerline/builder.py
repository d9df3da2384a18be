"""Incremental path construction over the net cascade.

The curve at each scale is a path graph on X_n = D_n u H_n.  A scale
transition runs three phases: new net points close to the old net replace
their nearest vertex, the remaining new points are inserted farthest-first
with edge surgery, and vertices that dropped out of X are pruned.  Every
mutation is recorded with its length delta, the path invariant (degrees <= 2,
edge count = vertex count - 1, connected) is re-verified after each step, and
local ordering hypotheses H1-H4 are probed on ball snapshots.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .errors import PathInvariantError, StructuralError, TieBreakError
from .metric import FiniteMetricSpace, Measure
from .nets import CascadeResult, NetState, run_cascade
from .ordering import find_order

__all__ = [
    "StepRecord",
    "CurveSnapshot",
    "CheckReport",
    "BuildResult",
    "build_curve",
    "replay_steps",
]

CHECK_BUDGET = 200_000
_DELTA_SLACK = 1e-12
_LENGTH_RTOL = 1e-9


@dataclass(frozen=True)
class StepRecord:
    """One recorded mutation of the path graph.

    witness holds the extra ids needed to replay the step: the replaced
    vertex's neighbors for Replace, the split edge partner for InsertSplit,
    and the removed vertex's neighbors for Prune.
    """
    scale: int
    index: int
    kind: str                     # Replace | InsertSplit | InsertAppend | Prune
    x: int
    anchor: int | None
    witness: tuple[int, ...]
    delta: float
    lambda_class: str | None

    def to_json_dict(self) -> dict:
        return {
            "scale": self.scale,
            "step": self.index,
            "kind": self.kind,
            "x": self.x,
            "anchor": self.anchor,
            "witness": list(self.witness),
            "delta": self.delta,
            "lambda": self.lambda_class,
        }


@dataclass(frozen=True)
class CurveSnapshot:
    scale: int
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    sequence: tuple[int, ...]
    length: float

    def to_json_dict(self) -> dict:
        return {
            "scale": self.scale,
            "vertices": list(self.sequence),
            "edges": [list(e) for e in self.edges],
            "length": self.length,
        }


@dataclass(frozen=True)
class CheckReport:
    """Result of one ball-ordering hypothesis screen.

    checked counts distinct ball contents that were actually tested;
    inapplicable counts contents the order search could not certify
    (not orderable, or search budget exhausted).  A failure is a triple
    (ball center, a, b) where a, b are consecutive in the certified order
    but {a, b} is not an edge.
    """
    name: str
    scale: int
    checked: int
    inapplicable: int
    failures: tuple[tuple[int, int, int], ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "scale": self.scale,
            "checked": self.checked,
            "inapplicable": self.inapplicable,
            "failures": [list(f) for f in self.failures],
        }


class _PathGraph:
    """Mutable path graph with incremental length accounting."""

    __slots__ = ("adj", "length")

    def __init__(self) -> None:
        self.adj: dict[int, set[int]] = {}
        self.length = 0.0

    def vertices(self) -> list[int]:
        return sorted(self.adj)

    def edges(self) -> list[tuple[int, int]]:
        out = set()
        for v, nbrs in self.adj.items():
            for w in nbrs:
                out.add((v, w) if v < w else (w, v))
        return sorted(out)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    def add_vertex(self, v: int) -> None:
        if v in self.adj:
            raise StructuralError(f"vertex {v} added twice")
        self.adj[v] = set()

    def remove_vertex(self, v: int) -> None:
        if self.adj[v]:
            raise StructuralError(f"vertex {v} removed while still connected")
        del self.adj[v]

    def add_edge(self, a: int, b: int, d: float) -> None:
        if b in self.adj[a]:
            raise StructuralError(f"edge ({a}, {b}) added twice")
        self.adj[a].add(b)
        self.adj[b].add(a)
        self.length += d

    def remove_edge(self, a: int, b: int, d: float) -> None:
        if b not in self.adj[a]:
            raise StructuralError(f"edge ({a}, {b}) removed but absent")
        self.adj[a].discard(b)
        self.adj[b].discard(a)
        self.length -= d

    def check_path(self) -> None:
        n = len(self.adj)
        if n == 0:
            raise PathInvariantError("graph has no vertices")
        n_edges = sum(len(s) for s in self.adj.values()) // 2
        if n_edges != n - 1:
            raise PathInvariantError(f"{n_edges} edges on {n} vertices")
        for v, nbrs in self.adj.items():
            if len(nbrs) > 2:
                raise PathInvariantError(f"vertex {v} has degree {len(nbrs)}")
        start = next(iter(self.adj))
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in self.adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != n:
            raise PathInvariantError(
                f"graph is disconnected ({len(seen)} of {n} reachable)")

    def sequence(self) -> list[int]:
        """Vertex ids in path order, starting from the smaller endpoint."""
        if len(self.adj) == 1:
            return list(self.adj)
        ends = sorted(v for v, s in self.adj.items() if len(s) <= 1)
        if len(ends) != 2:
            raise PathInvariantError(f"path has {len(ends)} endpoints")
        seq = [ends[0]]
        prev = None
        while True:
            nxt = [w for w in self.adj[seq[-1]] if w != prev]
            if not nxt:
                break
            prev = seq[-1]
            seq.append(nxt[0])
        if seq[0] > seq[-1]:
            seq.reverse()
        return seq

    def recomputed_length(self, space: FiniteMetricSpace) -> float:
        return math.fsum(space.dist[a, b] for a, b in self.edges())


@dataclass(frozen=True)
class BuildResult:
    cascade: CascadeResult
    snapshots: list[CurveSnapshot]
    steps: list[StepRecord]
    checks: list[CheckReport]
    warnings: list[str]
    final_length: float
    length_bound: float
    length_ok: bool

    @property
    def sequence(self) -> tuple[int, ...]:
        return self.snapshots[-1].sequence

    def check_failures(self) -> int:
        return sum(len(c.failures) for c in self.checks)


def _nearest_vertex(space: FiniteMetricSpace, graph: _PathGraph, x: int,
                    *, unique: bool) -> tuple[int, float]:
    verts = np.asarray(graph.vertices(), dtype=np.int64)
    row = space.dist[x, verts]
    k = int(np.argmin(row))
    d1 = float(row[k])
    if unique and verts.size > 1:
        rest = np.delete(row, k)
        d2 = float(rest.min())
        if d2 - d1 <= 1e-12 * d1:
            raise TieBreakError(
                f"nearest vertex to {x} is ambiguous: {d1:.17g} vs {d2:.17g}")
    return int(verts[k]), d1


def _snapshot(graph: _PathGraph, scale: int) -> CurveSnapshot:
    return CurveSnapshot(
        scale=scale,
        vertices=tuple(graph.vertices()),
        edges=tuple(graph.edges()),
        sequence=tuple(graph.sequence()),
        length=graph.length,
    )


def _ball_check(name: str, scale: int, space: FiniteMetricSpace,
                graph: _PathGraph, centers, radius: float) -> CheckReport:
    pool = np.asarray(graph.vertices(), dtype=np.int64)
    edge_set = set(graph.edges())
    order = {v: i for i, v in enumerate(graph.sequence())}
    unique: dict[bytes, tuple[int, np.ndarray]] = {}
    for c in centers:
        members = pool[space.dist[int(c), pool] <= radius]
        if members.size < 2:
            continue
        key = members.tobytes()
        if key not in unique:
            unique[key] = (int(c), members)
    checked = 0
    inapplicable = 0
    failures: list[tuple[int, int, int]] = []
    for center, members in unique.values():
        hint = sorted(members.tolist(), key=order.__getitem__)
        result = find_order(space, members, hint=hint, budget=CHECK_BUDGET)
        if result.kind != "orderable":
            inapplicable += 1
            continue
        checked += 1
        seq = result.sequence
        for a, b in zip(seq, seq[1:]):
            pair = (a, b) if a < b else (b, a)
            if pair not in edge_set:
                failures.append((center, pair[0], pair[1]))
    return CheckReport(name=name, scale=scale, checked=checked,
                       inapplicable=inapplicable, failures=tuple(failures))


def _replace_phase(space, config, graph, state_old: NetState,
                   state_new: NetState, steps, warnings, index: int) -> int:
    s = state_new.n
    threshold = config.theta * 2.0 ** (-s + 1)
    ball_r = 2.0 ** (-s + config.M2 + 1)
    old_D = set(map(int, state_old.D))
    for x in map(int, state_new.D):
        if x in graph.adj:
            continue
        d_old = float(space.dist[x, state_old.D].min())
        if d_old > threshold * (1.0 + 1e-12):
            continue
        p, dxp = _nearest_vertex(space, graph, x, unique=True)
        if p not in old_D:
            if p in state_new.H:
                raise StructuralError(
                    f"scale {s}: replacement target {p} for {x} is stopped")
            # p was itself installed earlier in this phase, so the coarse
            # vertex x would have displaced is already gone.  Leave x for
            # the insertion phase instead of cascading replacements.
            continue
        if p in state_new.H:
            raise StructuralError(
                f"scale {s}: replacement target {p} for {x} is stopped")
        nbrs = graph.neighbors(p)
        if dxp > config.theta * 2.0 ** (-s + 1) * (1.0 + 1e-9):
            warnings.append(
                f"scale {s}: replacement distance d({x},{p})={dxp:.6e} "
                f"exceeds {threshold:.6e}")
        deg = len(nbrs)
        if deg == 2 and all(space.dist[x, w] <= ball_r for w in nbrs):
            lam = "L1"
        elif deg <= 1:
            lam = "L3"
        elif any(space.dist[p, w] > ball_r for w in nbrs):
            lam = "L4"
        else:
            lam = None
        delta = 0.0
        for w in nbrs:
            graph.remove_edge(p, w, float(space.dist[p, w]))
        graph.remove_vertex(p)
        graph.add_vertex(x)
        for w in nbrs:
            graph.add_edge(x, w, float(space.dist[x, w]))
            delta += float(space.dist[x, w]) - float(space.dist[p, w])
        slack = _DELTA_SLACK * max(1.0, space.diameter())
        if abs(delta) > deg * dxp + slack:
            raise StructuralError(
                f"scale {s}: replacement of {p} by {x} changed length by "
                f"{delta:.6e}, beyond {deg} * {dxp:.6e}")
        index += 1
        steps.append(StepRecord(scale=s, index=index, kind="Replace", x=x,
                                anchor=p, witness=tuple(nbrs), delta=delta,
                                lambda_class=lam))
        graph.check_path()
    return index


def _insert_phase(space, config, graph, state_old: NetState,
                  state_new: NetState, steps, warnings, index: int) -> int:
    s = state_new.n
    ball_r = 2.0 ** (-s + config.M2 + 1)
    dxy_limit = (1.0 + 2.0 ** (1 - config.N0) + config.theta) * 2.0 ** (-s + 1)
    est21_limit = (1.0 + 2.0 ** (1 - config.N0)) * 2.0 ** (-s + 1)
    slack = _DELTA_SLACK * max(1.0, space.diameter())
    pending = np.asarray([x for x in map(int, state_new.D) if x not in graph.adj],
                         dtype=np.int64)
    if pending.size == 0:
        return index
    verts = np.asarray(graph.vertices(), dtype=np.int64)
    dmin = space.dist[np.ix_(pending, verts)].min(axis=1)
    order: list[int] = []
    alive = np.ones(pending.size, dtype=bool)
    for _ in range(pending.size):
        masked = np.where(alive, dmin, -np.inf)
        k = int(np.argmax(masked))
        order.append(int(pending[k]))
        alive[k] = False
        dmin = np.minimum(dmin, space.dist[pending, pending[k]])
    for x in order:
        y, dxy = _nearest_vertex(space, graph, x, unique=False)
        if dxy > dxy_limit * (1.0 + 1e-9):
            warnings.append(
                f"scale {s}: insertion point {x} is {dxy:.6e} from the "
                f"curve (expected <= {dxy_limit:.6e})")
        nbrs = graph.neighbors(y)
        dy = space.dist[y]
        dx = space.dist[x]
        pattern = [w for w in nbrs if dy[w] > max(dxy, dx[w])]
        if pattern:
            w = min(pattern, key=lambda v: (dy[v], v))
            lam = "L2" if dy[w] <= ball_r else (
                "L3" if len(nbrs) <= 1 else (
                    "L4" if any(dy[v] > ball_r for v in nbrs) else None))
        elif len(nbrs) == 2:
            w = max(nbrs, key=lambda v: (dy[v], -v))
            lam = "L4" if any(dy[v] > ball_r for v in nbrs) else None
        else:
            w = None
            lam = "L3"
        graph.add_vertex(x)
        if w is None:
            delta = dxy
            graph.add_edge(y, x, dxy)
            if delta > est21_limit * (1.0 + 1e-9):
                warnings.append(
                    f"scale {s}: appended edge ({y},{x}) has length "
                    f"{delta:.6e} (expected <= {est21_limit:.6e})")
            kind = "InsertAppend"
            witness: tuple[int, ...] = ()
        else:
            delta = dxy + float(dx[w]) - float(dy[w])
            if delta < -slack or delta > 2.0 * dxy + slack:
                raise StructuralError(
                    f"scale {s}: split of ({y},{w}) at {x} changed length by "
                    f"{delta:.6e}, outside [0, {2.0 * dxy:.6e}]")
            graph.remove_edge(y, w, float(dy[w]))
            graph.add_edge(y, x, dxy)
            graph.add_edge(x, w, float(dx[w]))
            kind = "InsertSplit"
            witness = (w,)
        index += 1
        steps.append(StepRecord(scale=s, index=index, kind=kind, x=x,
                                anchor=y, witness=witness, delta=delta,
                                lambda_class=lam))
        graph.check_path()
    return index


def _prune_phase(space, graph, state_new: NetState, steps, index: int) -> int:
    s = state_new.n
    keep = set(map(int, state_new.X))
    slack = _DELTA_SLACK * max(1.0, space.diameter())
    for v in [v for v in graph.vertices() if v not in keep]:
        nbrs = graph.neighbors(v)
        if len(nbrs) == 2:
            w1, w2 = nbrs
            delta = (float(space.dist[w1, w2]) - float(space.dist[v, w1])
                     - float(space.dist[v, w2]))
            if delta > slack:
                raise StructuralError(
                    f"scale {s}: pruning {v} increased length by {delta:.6e}")
            graph.remove_edge(v, w1, float(space.dist[v, w1]))
            graph.remove_edge(v, w2, float(space.dist[v, w2]))
            graph.add_edge(w1, w2, float(space.dist[w1, w2]))
        elif len(nbrs) == 1:
            delta = -float(space.dist[v, nbrs[0]])
            graph.remove_edge(v, nbrs[0], float(space.dist[v, nbrs[0]]))
        else:
            delta = 0.0
        graph.remove_vertex(v)
        index += 1
        steps.append(StepRecord(scale=s, index=index, kind="Prune", x=v,
                                anchor=None, witness=tuple(nbrs), delta=delta,
                                lambda_class=None))
        graph.check_path()
    if set(graph.adj) != keep:
        raise StructuralError(
            f"scale {s}: vertices after pruning do not match X "
            f"(extra {sorted(set(graph.adj) - keep)}, "
            f"missing {sorted(keep - set(graph.adj))})")
    return index


def build_curve(space: FiniteMetricSpace, measure: Measure,
                config: Config | None = None,
                cascade: CascadeResult | None = None) -> BuildResult:
    """Run the net cascade and construct the path scale by scale."""
    if config is None:
        config = Config()
    if cascade is None:
        cascade = run_cascade(space, measure, config)
    warnings = list(cascade.warnings)
    steps: list[StepRecord] = []
    checks: list[CheckReport] = []

    graph = _PathGraph()
    first = cascade.states[0]
    graph.add_vertex(int(first.D[0]))
    graph.check_path()
    snapshots = [_snapshot(graph, first.n)]
    checks.append(_ball_check("H1", first.n, space, graph, first.X,
                              2.0 ** (-first.n + config.M1)))

    for state_old, state_new in zip(cascade.states, cascade.states[1:]):
        s = state_new.n
        n_old = state_old.n
        index = 0
        index = _replace_phase(space, config, graph, state_old, state_new,
                               steps, warnings, index)
        v1 = np.asarray(graph.vertices(), dtype=np.int64)
        checks.append(_ball_check("H2", s, space, graph, v1,
                                  (2.0 ** config.M1 - 1.0) * 2.0 ** (-n_old)))
        index = _insert_phase(space, config, graph, state_old, state_new,
                              steps, warnings, index)
        checks.append(_ball_check("H3", s, space, graph, v1,
                                  (2.0 ** config.M1 - 3.0) * 2.0 ** (-n_old)))
        v2 = np.asarray(graph.vertices(), dtype=np.int64)
        checks.append(_ball_check("H4", s, space, graph, v2,
                                  2.0 ** (-n_old + config.M1 - 1)))
        _prune_phase(space, graph, state_new, steps, index)
        checks.append(_ball_check("H1", s, space, graph, state_new.X,
                                  2.0 ** (-s + config.M1)))
        recomputed = graph.recomputed_length(space)
        if abs(graph.length - recomputed) > _LENGTH_RTOL * max(recomputed, 1e-300):
            raise StructuralError(
                f"scale {s}: incremental length {graph.length:.17g} drifted "
                f"from recomputed {recomputed:.17g}")
        snapshots.append(_snapshot(graph, s))

    bound = (1.0 + config.tau0) * space.diameter()
    ok = graph.length <= bound * (1.0 + 1e-12)
    if not ok:
        warnings.append(
            f"final length {graph.length:.6e} exceeds bound {bound:.6e}")
    return BuildResult(cascade=cascade, snapshots=snapshots, steps=steps,
                       checks=checks, warnings=warnings,
                       final_length=graph.length, length_bound=bound,
                       length_ok=ok)


def replay_steps(space: FiniteMetricSpace, start: CurveSnapshot,
                 steps: list[StepRecord],
                 check_each: bool = True) -> tuple[list[int], float]:
    """Re-apply recorded steps from a snapshot and return (vertices, length).

    Used to audit the ledger: the replay recomputes every delta from the
    distance matrix alone and verifies the path invariant after each step
    when check_each is set.
    """
    graph = _PathGraph()
    for v in start.vertices:
        graph.add_vertex(int(v))
    for a, b in start.edges:
        graph.add_edge(int(a), int(b), float(space.dist[a, b]))
    for rec in steps:
        if rec.kind == "Replace":
            p = rec.anchor
            for w in rec.witness:
                graph.remove_edge(p, w, float(space.dist[p, w]))
            graph.remove_vertex(p)
            graph.add_vertex(rec.x)
            for w in rec.witness:
                graph.add_edge(rec.x, w, float(space.dist[rec.x, w]))
        elif rec.kind == "InsertSplit":
            y, (w,) = rec.anchor, rec.witness
            graph.add_vertex(rec.x)
            graph.remove_edge(y, w, float(space.dist[y, w]))
            graph.add_edge(y, rec.x, float(space.dist[y, rec.x]))
            graph.add_edge(rec.x, w, float(space.dist[rec.x, w]))
        elif rec.kind == "InsertAppend":
            graph.add_vertex(rec.x)
            graph.add_edge(rec.anchor, rec.x, float(space.dist[rec.anchor, rec.x]))
        elif rec.kind == "Prune":
            nbrs = rec.witness
            for w in nbrs:
                graph.remove_edge(rec.x, w, float(space.dist[rec.x, w]))
            graph.remove_vertex(rec.x)
            if len(nbrs) == 2:
                graph.add_edge(nbrs[0], nbrs[1],
                               float(space.dist[nbrs[0], nbrs[1]]))
        else:
            raise StructuralError(f"unknown step kind {rec.kind!r}")
        if check_each:
            graph.check_path()
    return graph.vertices(), graph.length
