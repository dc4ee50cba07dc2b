"""Finite multigraphs as darts (half-edges) with a pairing involution.

A graph is a set of darts, each with a tail vertex; the involution pairs
every dart with its reversal.  A dart fixed by the involution is a
half-loop and contributes 1 to the degree of its vertex; a 2-orbit of the
involution is an undirected edge (a 2-orbit with both tails equal is a
full loop, contributing 2 to the degree and 2 to the diagonal of the
adjacency matrix).  This one model covers simple graphs, multi-edges,
loops, and the half-loops that show up in Schreier graphs of involutive
generators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional

import numpy as np


class ValidationError(ValueError):
    """A graph, map, or assignment violates a structural invariant."""


class ResourceLimitError(RuntimeError):
    """A computation exceeded its configured size or node budget."""


@dataclass(frozen=True)
class HalfEdgeGraph:
    """Immutable finite multigraph in dart form.

    dart_tails[d] is the tail vertex of dart d; the head of d is the tail
    of involution[d].  deg(v) counts darts with tail v, so half-loops
    contribute 1 and full loops 2.
    """

    vertex_count: int
    dart_tails: tuple[int, ...]
    involution: tuple[int, ...]
    labels: Optional[dict[int, str]] = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "dart_tails", tuple(self.dart_tails))
        object.__setattr__(self, "involution", tuple(self.involution))
        n, tails, inv = self.vertex_count, self.dart_tails, self.involution
        if n < 0:
            raise ValidationError("vertex_count must be nonnegative")
        if len(inv) != len(tails):
            raise ValidationError("involution length differs from dart count")
        for d, t in enumerate(tails):
            if not 0 <= t < n:
                raise ValidationError(f"dart {d}: tail {t} out of range")
        for d, e in enumerate(inv):
            if not 0 <= e < len(tails):
                raise ValidationError(f"dart {d}: involution image {e} out of range")
            if inv[e] != d:
                raise ValidationError(f"dart {d}: involution is not self-inverse")

    @property
    def num_darts(self) -> int:
        return len(self.dart_tails)

    def head(self, d: int) -> int:
        return self.dart_tails[self.involution[d]]

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.vertex_count
        for t in self.dart_tails:
            deg[t] += 1
        return tuple(deg)

    def degree(self, v: int) -> int:
        return self.degrees[v]

    @cached_property
    def darts_by_vertex(self) -> tuple[tuple[int, ...], ...]:
        buckets: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for d, t in enumerate(self.dart_tails):
            buckets[t].append(d)
        return tuple(tuple(b) for b in buckets)

    def darts_at(self, v: int) -> tuple[int, ...]:
        return self.darts_by_vertex[v]

    @cached_property
    def half_loop_counts(self) -> tuple[int, ...]:
        cnt = [0] * self.vertex_count
        for d in range(self.num_darts):
            if self.involution[d] == d:
                cnt[self.dart_tails[d]] += 1
        return tuple(cnt)

    @property
    def num_half_loops(self) -> int:
        return sum(self.half_loop_counts)

    @property
    def edge_count(self) -> int:
        """Undirected edge count: 2-orbits plus fixed darts of the involution."""
        fixed = self.num_half_loops
        return (self.num_darts - fixed) // 2 + fixed

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def regular_degree(self) -> Optional[int]:
        """Common degree if the graph is regular, else None."""
        if self.vertex_count == 0:
            return None
        k = self.degrees[0]
        return k if all(deg == k for deg in self.degrees) else None


@dataclass(frozen=True)
class MarkedGraph:
    """Graph with a distinguished basepoint vertex."""

    graph: HalfEdgeGraph
    basepoint: int

    def __post_init__(self):
        if not 0 <= self.basepoint < max(self.graph.vertex_count, 1):
            raise ValidationError(f"basepoint {self.basepoint} out of range")


@dataclass(frozen=True)
class CoveringMap:
    """Graph morphism that is a local bijection on darts at every vertex."""

    source: HalfEdgeGraph
    target: HalfEdgeGraph
    vertex_map: tuple[int, ...]
    dart_map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", tuple(self.vertex_map))
        object.__setattr__(self, "dart_map", tuple(self.dart_map))
        if len(self.vertex_map) != self.source.vertex_count:
            raise ValidationError("vertex_map length mismatch")
        if len(self.dart_map) != self.source.num_darts:
            raise ValidationError("dart_map length mismatch")


@dataclass(frozen=True)
class GraphAutomorphism:
    """Automorphism of a HalfEdgeGraph: compatible vertex and dart permutations."""

    graph: HalfEdgeGraph
    vertex_perm: tuple[int, ...]
    dart_perm: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertex_perm", tuple(self.vertex_perm))
        object.__setattr__(self, "dart_perm", tuple(self.dart_perm))
        g = self.graph
        if sorted(self.vertex_perm) != list(range(g.vertex_count)):
            raise ValidationError("vertex_perm is not a permutation")
        if sorted(self.dart_perm) != list(range(g.num_darts)):
            raise ValidationError("dart_perm is not a permutation")
        for d in range(g.num_darts):
            if g.dart_tails[self.dart_perm[d]] != self.vertex_perm[g.dart_tails[d]]:
                raise ValidationError(f"dart {d}: tails not preserved")
            if self.dart_perm[g.involution[d]] != g.involution[self.dart_perm[d]]:
                raise ValidationError(f"dart {d}: involution not preserved")

    def compose(self, other: "GraphAutomorphism") -> "GraphAutomorphism":
        """self after other (function composition self∘other)."""
        return GraphAutomorphism(
            self.graph,
            tuple(self.vertex_perm[v] for v in other.vertex_perm),
            tuple(self.dart_perm[d] for d in other.dart_perm),
        )

    def inverse(self) -> "GraphAutomorphism":
        nv = [0] * len(self.vertex_perm)
        nd = [0] * len(self.dart_perm)
        for i, v in enumerate(self.vertex_perm):
            nv[v] = i
        for i, d in enumerate(self.dart_perm):
            nd[d] = i
        return GraphAutomorphism(self.graph, tuple(nv), tuple(nd))


def identity_automorphism(g: HalfEdgeGraph) -> GraphAutomorphism:
    return GraphAutomorphism(
        g, tuple(range(g.vertex_count)), tuple(range(g.num_darts))
    )


# ---------------------------------------------------------------------------
# matrices

def adjacency_matrix(g: HalfEdgeGraph) -> np.ndarray:
    """Symmetric integer adjacency: A[u,v] = #darts from u to v.

    A half-loop at v adds 1 to A[v,v]; a full loop adds 2.
    """
    a = np.zeros((g.vertex_count, g.vertex_count), dtype=np.int64)
    for d, t in enumerate(g.dart_tails):
        a[t, g.head(d)] += 1
    return a


def degree_matrix_q(g: HalfEdgeGraph) -> np.ndarray:
    """Diagonal matrix with entries deg(v) - 1."""
    return np.diag(np.array(g.degrees, dtype=np.int64) - 1)


def distances_from(g: HalfEdgeGraph, start: int) -> list[int]:
    """BFS distances; -1 for vertices unreachable from start."""
    dist = [-1] * g.vertex_count
    dist[start] = 0
    queue = [start]
    while queue:
        nxt = []
        for u in queue:
            for d in g.darts_at(u):
                h = g.head(d)
                if dist[h] < 0:
                    dist[h] = dist[u] + 1
                    nxt.append(h)
        queue = nxt
    return dist


# ---------------------------------------------------------------------------
# balls and the marked-graph metric

def ball_with_origin(mg: MarkedGraph, radius: int) -> tuple[MarkedGraph, tuple[int, ...]]:
    """Induced sub-multigraph on vertices within `radius` of the basepoint.

    Returns the ball as a MarkedGraph together with the tuple mapping each
    ball vertex back to its original vertex index.
    """
    if radius < 0:
        raise ValidationError("radius must be nonnegative")
    g = mg.graph
    dist = distances_from(g, mg.basepoint)
    keep = [v for v in range(g.vertex_count) if 0 <= dist[v] <= radius]
    new_index = {v: i for i, v in enumerate(keep)}
    kept_darts = [
        d
        for d in range(g.num_darts)
        if g.dart_tails[d] in new_index and g.head(d) in new_index
    ]
    dart_index = {d: i for i, d in enumerate(kept_darts)}
    tails = tuple(new_index[g.dart_tails[d]] for d in kept_darts)
    inv = tuple(dart_index[g.involution[d]] for d in kept_darts)
    labels = None
    if g.labels is not None:
        labels = {new_index[v]: g.labels[v] for v in keep if v in g.labels}
    sub = HalfEdgeGraph(len(keep), tails, inv, labels)
    return MarkedGraph(sub, new_index[mg.basepoint]), tuple(keep)


def ball(mg: MarkedGraph, radius: int) -> MarkedGraph:
    """Combinatorial ball of given radius around the basepoint."""
    return ball_with_origin(mg, radius)[0]


def _vertex_signature(g: HalfEdgeGraph, dist: list[int]) -> list[tuple[int, int, int]]:
    return [
        (g.degrees[v], g.half_loop_counts[v], dist[v]) for v in range(g.vertex_count)
    ]


def marked_isometric(
    a: MarkedGraph, b: MarkedGraph
) -> tuple[bool, Optional[tuple[tuple[int, ...], tuple[int, ...]]]]:
    """Basepoint-preserving multigraph isomorphism test.

    Returns (True, (vertex_map, dart_map)) with one witness, or (False, None).
    The witness commutes with tails and involutions and sends basepoint to
    basepoint.  Backtracking with degree / half-loop / basepoint-distance
    refinement; exponential worst case, fine at ball scale.
    """
    ga, gb = a.graph, b.graph
    if ga.vertex_count != gb.vertex_count or ga.num_darts != gb.num_darts:
        return False, None
    dist_a = distances_from(ga, a.basepoint)
    dist_b = distances_from(gb, b.basepoint)
    sig_a = _vertex_signature(ga, dist_a)
    sig_b = _vertex_signature(gb, dist_b)
    if sorted(sig_a) != sorted(sig_b):
        return False, None
    if sig_a[a.basepoint] != sig_b[b.basepoint]:
        return False, None

    nv, nd = ga.vertex_count, ga.num_darts
    vmap: list[int] = [-1] * nv
    vused = [False] * max(gb.vertex_count, 1)
    dmap: list[int] = [-1] * max(nd, 1)
    dused = [False] * max(nd, 1)

    def assign_vertex(u: int, w: int) -> bool:
        if sig_a[u] != sig_b[w]:
            return False
        vmap[u] = w
        vused[w] = True
        return True

    def unassign_vertex(u: int):
        vused[vmap[u]] = False
        vmap[u] = -1

    def next_pending_dart() -> int:
        for d in range(nd):
            if dmap[d] < 0 and vmap[ga.dart_tails[d]] >= 0:
                return d
        return -1

    def extend() -> bool:
        d = next_pending_dart()
        if d < 0:
            # All darts at mapped vertices done; handle remaining vertices
            # (other components, or isolated vertices).
            for u in range(nv):
                if vmap[u] < 0:
                    for w in range(gb.vertex_count):
                        if not vused[w] and sig_a[u] == sig_b[w]:
                            if assign_vertex(u, w) and extend():
                                return True
                            unassign_vertex(u)
                    return False
            return True
        u = ga.dart_tails[d]
        h = ga.head(d)
        half = ga.involution[d] == d
        for d2 in gb.darts_at(vmap[u]):
            if dused[d2]:
                continue
            if (gb.involution[d2] == d2) != half:
                continue
            h2 = gb.head(d2)
            newly_mapped_head = False
            if vmap[h] >= 0:
                if vmap[h] != h2:
                    continue
            else:
                if vused[h2] or not assign_vertex(h, h2):
                    continue
                newly_mapped_head = True
            dmap[d] = d2
            dused[d2] = True
            e, e2 = ga.involution[d], gb.involution[d2]
            if not half:
                dmap[e] = e2
                dused[e2] = True
            if extend():
                return True
            dmap[d] = -1
            dused[d2] = False
            if not half:
                dmap[e] = -1
                dused[e2] = False
            if newly_mapped_head:
                unassign_vertex(h)
        return False

    if not assign_vertex(a.basepoint, b.basepoint):
        return False, None
    if extend():
        return True, (tuple(vmap), tuple(dmap))
    return False, None


@dataclass(frozen=True)
class MarkedDistance:
    """Result of the marked-graph metric probe up to a radius cap.

    distance is 1/(r+1) for the first radius r at which balls fail to be
    isometric.  When every tested radius matches, `saturated` is set and
    `distance` is the upper bound 1/(max_radius+2).
    """

    distance: Fraction
    saturated: bool
    first_mismatch_radius: Optional[int]


def marked_distance(a: MarkedGraph, b: MarkedGraph, max_radius: int) -> MarkedDistance:
    if max_radius < 0:
        raise ValidationError("max_radius must be nonnegative")
    for r in range(max_radius + 1):
        ok, _ = marked_isometric(ball(a, r), ball(b, r))
        if not ok:
            return MarkedDistance(Fraction(1, r + 1), False, r)
    return MarkedDistance(Fraction(1, max_radius + 2), True, None)


# ---------------------------------------------------------------------------
# covering maps

@dataclass(frozen=True)
class CoveringValidation:
    ok: bool
    violation: Optional[str]


def validate_covering(p: CoveringMap) -> CoveringValidation:
    """Check morphism conditions and local dart bijectivity at every vertex."""
    s, t = p.source, p.target
    for v, w in enumerate(p.vertex_map):
        if not 0 <= w < t.vertex_count:
            return CoveringValidation(False, f"vertex {v}: image {w} out of range")
    for d, e in enumerate(p.dart_map):
        if not 0 <= e < t.num_darts:
            return CoveringValidation(False, f"dart {d}: image {e} out of range")
    for d in range(s.num_darts):
        if t.dart_tails[p.dart_map[d]] != p.vertex_map[s.dart_tails[d]]:
            return CoveringValidation(False, f"dart {d}: tail map not commuting")
        if p.dart_map[s.involution[d]] != t.involution[p.dart_map[d]]:
            return CoveringValidation(False, f"dart {d}: involution not commuting")
    for v in range(s.vertex_count):
        images = [p.dart_map[d] for d in s.darts_at(v)]
        target_darts = t.darts_at(p.vertex_map[v])
        if len(set(images)) != len(images):
            return CoveringValidation(False, f"vertex {v}: dart map not injective locally")
        if len(images) != len(target_darts):
            return CoveringValidation(
                False,
                f"vertex {v}: degree {len(images)} != target degree {len(target_darts)}",
            )
    return CoveringValidation(True, None)


def compose_coverings(outer: CoveringMap, inner: CoveringMap) -> CoveringMap:
    """Covering outer∘inner (inner: A→B first, then outer: B→C)."""
    if inner.target is not outer.source and inner.target != outer.source:
        raise ValidationError("coverings not composable")
    return CoveringMap(
        inner.source,
        outer.target,
        tuple(outer.vertex_map[v] for v in inner.vertex_map),
        tuple(outer.dart_map[d] for d in inner.dart_map),
    )


def identity_covering(g: HalfEdgeGraph) -> CoveringMap:
    return CoveringMap(g, g, tuple(range(g.vertex_count)), tuple(range(g.num_darts)))


# ---------------------------------------------------------------------------
# JSON interchange

def graph_to_json(g: HalfEdgeGraph) -> dict:
    out = {
        "vertices": g.vertex_count,
        "darts": [{"tail": t} for t in g.dart_tails],
        "involution": list(g.involution),
    }
    if g.labels:
        out["labels"] = {str(v): s for v, s in sorted(g.labels.items())}
    return out


def graph_from_json(obj: dict) -> HalfEdgeGraph:
    try:
        n = int(obj["vertices"])
        tails = tuple(int(d["tail"]) for d in obj["darts"])
        inv = tuple(int(i) for i in obj["involution"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed graph JSON: {exc}") from exc
    labels = None
    if "labels" in obj and obj["labels"]:
        labels = {int(k): str(v) for k, v in obj["labels"].items()}
    return HalfEdgeGraph(n, tails, inv, labels)


def load_graph(path: str) -> HalfEdgeGraph:
    with open(path) as fh:
        return graph_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# constructors

def graph_from_edges(
    vertex_count: int,
    edges: list[tuple[int, int]],
    half_loops: list[int] | None = None,
) -> HalfEdgeGraph:
    """Build a multigraph from an undirected edge list plus optional half-loops.

    Repeated pairs produce parallel edges; (v, v) produces a full loop.
    """
    tails: list[int] = []
    inv: list[int] = []
    for u, v in edges:
        d = len(tails)
        tails.extend([u, v])
        inv.extend([d + 1, d])
    for v in half_loops or []:
        d = len(tails)
        tails.append(v)
        inv.append(d)
    return HalfEdgeGraph(vertex_count, tuple(tails), tuple(inv))


def empty_graph(n: int) -> HalfEdgeGraph:
    return HalfEdgeGraph(n, (), ())


def single_vertex(half_loops: int = 0) -> HalfEdgeGraph:
    return graph_from_edges(1, [], [0] * half_loops)


def cycle_graph(n: int) -> HalfEdgeGraph:
    if n < 1:
        raise ValidationError("cycle needs at least 1 vertex")
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> HalfEdgeGraph:
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> HalfEdgeGraph:
    return graph_from_edges(
        n, [(i, j) for i in range(n) for j in range(i + 1, n)]
    )


def star_graph(leaves: int) -> HalfEdgeGraph:
    return graph_from_edges(leaves + 1, [(0, i + 1) for i in range(leaves)])


def circulant_graph(n: int, connections: set[int]) -> HalfEdgeGraph:
    """Circulant graph on Z/n with symmetric connection set S ⊂ {1..n-1}."""
    conns = {s % n for s in connections}
    if 0 in conns or not conns:
        raise ValidationError("connection set must be nonempty and avoid 0")
    if any((n - s) % n not in conns for s in conns):
        raise ValidationError("connection set must be symmetric")
    edges = []
    for s in sorted(conns):
        if s > n - s:
            continue
        if s == n - s:  # n even, diameter chord: each edge once
            edges.extend((i, i + s) for i in range(s))
        else:
            edges.extend((i, (i + s) % n) for i in range(n))
    return graph_from_edges(n, edges)


def petersen_graph() -> HalfEdgeGraph:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    edges += [(i + 5, (i + 2) % 5 + 5) for i in range(5)]
    return graph_from_edges(10, edges)


def random_regular_graph(degree: int, n: int, seed: int) -> HalfEdgeGraph:
    """Simple k-regular graph via the pairing model with rejection (seeded)."""
    import random

    if degree * n % 2 != 0:
        raise ValidationError("degree * n must be even")
    rng = random.Random(seed)
    stubs_proto = [v for v in range(n) for _ in range(degree)]
    for _ in range(10_000):
        stubs = stubs_proto[:]
        rng.shuffle(stubs)
        pairs = [(stubs[2 * i], stubs[2 * i + 1]) for i in range(len(stubs) // 2)]
        seen = set()
        ok = True
        for u, v in pairs:
            key = (min(u, v), max(u, v))
            if u == v or key in seen:
                ok = False
                break
            seen.add(key)
        if ok:
            return graph_from_edges(n, pairs)
    raise ResourceLimitError("pairing model failed to produce a simple graph")


def disjoint_union(a: HalfEdgeGraph, b: HalfEdgeGraph) -> HalfEdgeGraph:
    tails = a.dart_tails + tuple(t + a.vertex_count for t in b.dart_tails)
    inv = a.involution + tuple(d + a.num_darts for d in b.involution)
    return HalfEdgeGraph(a.vertex_count + b.vertex_count, tails, inv)


def double_darts(g: HalfEdgeGraph) -> HalfEdgeGraph:
    """Duplicate every dart: half-loops become full loops, edges double.

    The result has degree 2·deg(v) at every vertex and no half-loops; its
    adjacency matrix is twice the original one.
    """
    tails = tuple(g.dart_tails[d // 2] for d in range(2 * g.num_darts))
    inv = []
    for d in range(g.num_darts):
        e = g.involution[d]
        inv.extend([2 * e + 1, 2 * e])
    return HalfEdgeGraph(g.vertex_count, tails, tuple(inv))
