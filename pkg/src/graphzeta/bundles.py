"""Voltage assignments, graph bundles, and cover reconstruction.

A voltage assignment maps each dart of a base graph to an automorphism of
a fiber graph, with reversed darts carrying inverse permutations.  The
bundle is the twisted product: base darts lift along the voltage action
on fiber vertices, fiber darts are copied over every base vertex.  The
bundle adjacency decomposes as sum_gamma A_gamma (x) P_gamma + I (x) A_F,
which is checked entrywise in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graphs import (
    CoveringMap,
    GraphAutomorphism,
    HalfEdgeGraph,
    ResourceLimitError,
    ValidationError,
    adjacency_matrix,
    empty_graph,
    validate_covering,
)


@dataclass(frozen=True)
class Permutation:
    """Permutation of {0..n-1}; images[i] is the image of i.

    `after(other)` is function composition self∘other (other acts first);
    the matrix convention is P[i, j] = 1 iff j = images[i].
    """

    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if sorted(self.images) != list(range(len(self.images))):
            raise ValidationError("not a permutation")

    @property
    def size(self) -> int:
        return len(self.images)

    def apply(self, i: int) -> int:
        return self.images[i]

    def after(self, other: "Permutation") -> "Permutation":
        """self∘other: apply other first, then self."""
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        out = [0] * len(self.images)
        for i, j in enumerate(self.images):
            out[j] = i
        return Permutation(tuple(out))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def matrix(self) -> np.ndarray:
        n = len(self.images)
        p = np.zeros((n, n), dtype=np.int64)
        for i, j in enumerate(self.images):
            p[i, j] = 1
        return p

    def commutes_with(self, other: "Permutation") -> bool:
        return self.after(other) == other.after(self)


def identity_permutation(n: int) -> Permutation:
    return Permutation(tuple(range(n)))


def is_graph_automorphism(g: HalfEdgeGraph, perm: Permutation) -> bool:
    """Vertex permutation preserving adjacency counts and half-loop counts."""
    if perm.size != g.vertex_count:
        return False
    a = adjacency_matrix(g)
    idx = np.array(perm.images, dtype=np.intp)
    if not np.array_equal(a, a[np.ix_(idx, idx)]):
        return False
    hl = g.half_loop_counts
    return all(hl[v] == hl[perm.apply(v)] for v in range(g.vertex_count))


@dataclass(frozen=True)
class VoltageAssignment:
    """Per-dart fiber automorphisms with phi(reversal) = phi(dart)^-1."""

    base: HalfEdgeGraph
    fiber: HalfEdgeGraph
    voltages: tuple[Permutation, ...]

    def __post_init__(self):
        object.__setattr__(self, "voltages", tuple(self.voltages))
        if len(self.voltages) != self.base.num_darts:
            raise ValidationError("need one voltage per base dart")
        for d, perm in enumerate(self.voltages):
            if perm.size != self.fiber.vertex_count:
                raise ValidationError(f"dart {d}: voltage acts on wrong set")
            rev = self.base.involution[d]
            if self.voltages[rev] != perm.inverse():
                raise ValidationError(
                    f"dart {d}: reversed dart does not carry the inverse voltage"
                )
            if not is_graph_automorphism(self.fiber, perm):
                raise ValidationError(f"dart {d}: voltage is not a fiber automorphism")

    def distinct_voltages(self) -> list[Permutation]:
        seen: dict[tuple[int, ...], Permutation] = {}
        for perm in self.voltages:
            seen.setdefault(perm.images, perm)
        return [seen[k] for k in sorted(seen)]


def voltage_assignment(
    base: HalfEdgeGraph,
    fiber: HalfEdgeGraph,
    per_dart: Optional[dict[int, Permutation]] = None,
) -> VoltageAssignment:
    """Fill a full voltage map from a partial dart -> permutation dict.

    Unset dart orbits get the identity; setting one dart of an edge sets
    the reversal to the inverse.  Half-loop darts must be involutive.
    """
    ident = identity_permutation(fiber.vertex_count)
    volts: list[Optional[Permutation]] = [None] * base.num_darts
    for d, perm in (per_dart or {}).items():
        volts[d] = perm
    for d in range(base.num_darts):
        if volts[d] is None:
            rev = base.involution[d]
            if volts[rev] is not None:
                volts[d] = volts[rev].inverse()
            else:
                volts[d] = ident
    return VoltageAssignment(base, fiber, tuple(volts))  # type: ignore[arg-type]


@dataclass(frozen=True)
class Bundle:
    """Total graph of base x^phi fiber with its vertex and dart indexing.

    Vertex (u, i) has index u * |V(F)| + i.  Base dart d lifted at fiber
    vertex i has dart index d * |V(F)| + i; fiber dart e copied over base
    vertex u has index |darts(base)| * |V(F)| + e * |V(base)| + u.
    """

    voltage: VoltageAssignment
    total: HalfEdgeGraph

    @property
    def base(self) -> HalfEdgeGraph:
        return self.voltage.base

    @property
    def fiber(self) -> HalfEdgeGraph:
        return self.voltage.fiber

    def vertex_index(self, u: int, i: int) -> int:
        return u * self.fiber.vertex_count + i

    def vertex_pair(self, idx: int) -> tuple[int, int]:
        return divmod(idx, self.fiber.vertex_count)

    def lifted_dart_index(self, base_dart: int, fiber_vertex: int) -> int:
        return base_dart * self.fiber.vertex_count + fiber_vertex

    def fiber_dart_index(self, fiber_dart: int, base_vertex: int) -> int:
        return (
            self.base.num_darts * self.fiber.vertex_count
            + fiber_dart * self.base.vertex_count
            + base_vertex
        )


def build_bundle(va: VoltageAssignment) -> Bundle:
    """Construct the total graph dart by dart."""
    base, fiber = va.base, va.fiber
    nf, nb = fiber.vertex_count, base.vertex_count
    tails: list[int] = []
    inv: list[int] = []
    # lifted base darts: (d, i) -> tail (tail(d), i), reversal (inv d, i^phi(d))
    for d in range(base.num_darts):
        for i in range(nf):
            tails.append(base.dart_tails[d] * nf + i)
            inv.append(base.involution[d] * nf + va.voltages[d].apply(i))
    # fiber darts copied per base vertex
    offset = base.num_darts * nf
    for e in range(fiber.num_darts):
        for u in range(nb):
            tails.append(u * nf + fiber.dart_tails[e])
            inv.append(offset + fiber.involution[e] * nb + u)
    total = HalfEdgeGraph(nb * nf, tuple(tails), tuple(inv))
    return Bundle(va, total)


@dataclass(frozen=True)
class GammaSubgraph:
    """Darts of the base carrying one fixed voltage, with their adjacency."""

    gamma: Permutation
    darts: tuple[int, ...]
    matrix: np.ndarray


def gamma_spanning_subgraph(va: VoltageAssignment, gamma: Permutation) -> GammaSubgraph:
    """A_gamma[u, v] = number of darts u -> v with voltage exactly gamma."""
    nb = va.base.vertex_count
    a = np.zeros((nb, nb), dtype=np.int64)
    darts = []
    for d in range(va.base.num_darts):
        if va.voltages[d] == gamma:
            darts.append(d)
            a[va.base.dart_tails[d], va.base.head(d)] += 1
    return GammaSubgraph(gamma, tuple(darts), a)


def decomposed_adjacency(va: VoltageAssignment) -> np.ndarray:
    """sum_gamma A_gamma (x) P_gamma + I (x) A_F in bundle vertex order."""
    nb, nf = va.base.vertex_count, va.fiber.vertex_count
    out = np.zeros((nb * nf, nb * nf), dtype=np.int64)
    for gamma in va.distinct_voltages():
        a_g = gamma_spanning_subgraph(va, gamma).matrix
        out += np.kron(a_g, gamma.matrix())
    out += np.kron(np.eye(nb, dtype=np.int64), adjacency_matrix(va.fiber))
    return out


def induced_cover_of_bundles(
    p: CoveringMap, phi: VoltageAssignment
) -> tuple[VoltageAssignment, CoveringMap]:
    """Pull a voltage back along a covering and lift the covering to bundles.

    psi(d) = phi(p(d)); the bundle map sends (x, i) to (p(x), i).  The
    returned map is validated as a covering.
    """
    if phi.base is not p.target and phi.base != p.target:
        raise ValidationError("voltage must live on the covering target")
    check = validate_covering(p)
    if not check.ok:
        raise ValidationError(f"invalid covering: {check.violation}")
    psi = VoltageAssignment(
        p.source, phi.fiber, tuple(phi.voltages[p.dart_map[d]] for d in range(p.source.num_darts))
    )
    src_bundle = build_bundle(psi)
    tgt_bundle = build_bundle(phi)
    nf = phi.fiber.vertex_count
    vmap = [0] * src_bundle.total.vertex_count
    for x in range(p.source.vertex_count):
        for i in range(nf):
            vmap[src_bundle.vertex_index(x, i)] = tgt_bundle.vertex_index(
                p.vertex_map[x], i
            )
    dmap = [0] * src_bundle.total.num_darts
    for d in range(p.source.num_darts):
        for i in range(nf):
            dmap[src_bundle.lifted_dart_index(d, i)] = tgt_bundle.lifted_dart_index(
                p.dart_map[d], i
            )
    for e in range(phi.fiber.num_darts):
        for x in range(p.source.vertex_count):
            dmap[src_bundle.fiber_dart_index(e, x)] = tgt_bundle.fiber_dart_index(
                e, p.vertex_map[x]
            )
    p_tilde = CoveringMap(src_bundle.total, tgt_bundle.total, tuple(vmap), tuple(dmap))
    check = validate_covering(p_tilde)
    if not check.ok:
        raise RuntimeError(f"internal error: induced bundle map not a covering: {check.violation}")
    return psi, p_tilde


@dataclass(frozen=True)
class CompatibilityReport:
    ok: bool
    violation: Optional[str]


def check_phi_compatible(
    va: VoltageAssignment,
    base_gens: Sequence[GraphAutomorphism],
    fiber_gens: Sequence[Permutation],
) -> CompatibilityReport:
    """Voltage constant on base-automorphism orbits; image centralizes fiber gens."""
    for gi, g in enumerate(base_gens):
        if g.graph != va.base:
            return CompatibilityReport(False, f"base generator {gi} acts on wrong graph")
        for d in range(va.base.num_darts):
            if va.voltages[g.dart_perm[d]] != va.voltages[d]:
                return CompatibilityReport(
                    False, f"voltage differs on dart {d} and its image {g.dart_perm[d]}"
                )
    for di, delta in enumerate(fiber_gens):
        if not is_graph_automorphism(va.fiber, delta):
            return CompatibilityReport(False, f"fiber generator {di} is not an automorphism")
        for gamma in va.distinct_voltages():
            if not gamma.commutes_with(delta):
                return CompatibilityReport(
                    False,
                    f"voltage {gamma.images} does not commute with fiber generator {di}",
                )
    return CompatibilityReport(True, None)


def product_action_on_bundle(
    bundle: Bundle, base_auto: GraphAutomorphism, fiber_perm: Permutation
) -> Permutation:
    """(x, i) -> (gamma x, delta i) as a total-vertex permutation.

    Requires phi-compatibility of the generated pairs; verified directly
    by checking that the permutation preserves the total adjacency and
    half-loop structure.
    """
    compat = check_phi_compatible(bundle.voltage, [base_auto], [fiber_perm])
    if not compat.ok:
        raise ValidationError(f"incompatible action: {compat.violation}")
    nf = bundle.fiber.vertex_count
    images = [0] * bundle.total.vertex_count
    for x in range(bundle.base.vertex_count):
        for i in range(nf):
            images[bundle.vertex_index(x, i)] = bundle.vertex_index(
                base_auto.vertex_perm[x], fiber_perm.apply(i)
            )
    perm = Permutation(tuple(images))
    if not is_graph_automorphism(bundle.total, perm):
        raise RuntimeError("internal error: product action does not preserve adjacency")
    return perm


# ---------------------------------------------------------------------------
# regular covers as bundles over the deck group

DECK_GROUP_CAP = 10_000


@dataclass(frozen=True)
class CoverBundle:
    """Reconstruction of a regular cover as base x^phi (deck group).

    voltage lives on the covering target with an edgeless fiber indexed by
    deck-group elements; iso_vertices / iso_darts witness the isomorphism
    from the covering source onto the rebuilt bundle total.
    """

    voltage: VoltageAssignment
    bundle: Bundle
    elements: tuple[GraphAutomorphism, ...]
    representatives: tuple[int, ...]
    iso_vertices: tuple[int, ...]
    iso_darts: tuple[int, ...]


def _close_group(gens: Sequence[GraphAutomorphism], cap: int) -> list[GraphAutomorphism]:
    if not gens:
        raise ValidationError("need at least one deck generator")
    ident = GraphAutomorphism(
        gens[0].graph,
        tuple(range(gens[0].graph.vertex_count)),
        tuple(range(gens[0].graph.num_darts)),
    )
    elements = [ident]
    seen = {ident.vertex_perm + ident.dart_perm}
    frontier = [ident]
    while frontier:
        nxt = []
        for el in frontier:
            for g in gens:
                prod = g.compose(el)
                key = prod.vertex_perm + prod.dart_perm
                if key not in seen:
                    seen.add(key)
                    elements.append(prod)
                    nxt.append(prod)
                    if len(elements) > cap:
                        raise ResourceLimitError("deck group exceeds closure cap")
        frontier = nxt
    return elements


def cover_to_bundle(
    p: CoveringMap,
    deck_gens: Sequence[GraphAutomorphism],
    basepoint: int = 0,
    cap: int = DECK_GROUP_CAP,
) -> CoverBundle:
    """Present a regular cover as a bundle over its deck group.

    Fiber representatives are chosen breadth-first from `basepoint` on the
    target, with tree darts lifted so tree voltages are trivial.  The
    transition at voltage gamma right-multiplies group elements
    (P_gamma(b1, b2) = 1 iff b2 = b1∘gamma).  Rejects covers whose deck
    action is not free and transitive on some fiber.
    """
    check = validate_covering(p)
    if not check.ok:
        raise ValidationError(f"invalid covering: {check.violation}")
    src, tgt = p.source, p.target
    for gi, g in enumerate(deck_gens):
        if g.graph != src:
            raise ValidationError(f"deck generator {gi} acts on the wrong graph")
        for v in range(src.vertex_count):
            if p.vertex_map[g.vertex_perm[v]] != p.vertex_map[v]:
                raise ValidationError(f"generator {gi} is not a deck transformation")
        for d in range(src.num_darts):
            if p.dart_map[g.dart_perm[d]] != p.dart_map[d]:
                raise ValidationError(f"generator {gi} does not cover the identity on darts")

    elements = _close_group(deck_gens, cap)
    order = len(elements)
    elem_index = {el.vertex_perm: i for i, el in enumerate(elements)}

    fibers: dict[int, list[int]] = {x: [] for x in range(tgt.vertex_count)}
    for u in range(src.vertex_count):
        fibers[p.vertex_map[u]].append(u)
    for x, fib in fibers.items():
        if len(fib) != order:
            raise ValidationError(
                f"non-regular cover: fiber over vertex {x} has {len(fib)} "
                f"vertices but the deck group has order {order}"
            )

    # unique lift of target dart d at source vertex u with p(u) = tail(d)
    lift: dict[tuple[int, int], int] = {}
    for dt in range(src.num_darts):
        lift[(src.dart_tails[dt], p.dart_map[dt])] = dt

    # breadth-first representatives; tree darts lift to trivial voltages
    reps: list[Optional[int]] = [None] * tgt.vertex_count
    pending = list(range(tgt.vertex_count))
    while any(r is None for r in reps):
        root = min(
            (x for x in pending if reps[x] is None),
            key=lambda x: (x != basepoint, x),
        )
        reps[root] = min(fibers[root])
        queue = [root]
        while queue:
            x = queue.pop(0)
            for d in tgt.darts_at(x):
                y = tgt.head(d)
                if reps[y] is None:
                    reps[y] = src.head(lift[(reps[x], d)])
                    queue.append(y)

    # element sending the representative over x to each fiber vertex
    elem_over: dict[int, dict[int, int]] = {}
    for x in range(tgt.vertex_count):
        table = {}
        for i, el in enumerate(elements):
            table[el.vertex_perm[reps[x]]] = i
        if len(table) != order:
            raise ValidationError(
                f"non-regular cover: deck action not free on the fiber over {x}"
            )
        elem_over[x] = table

    # voltage of each target dart
    gammas: list[Permutation] = []
    for d in range(tgt.num_darts):
        x, y = tgt.dart_tails[d], tgt.head(d)
        u_j = src.head(lift[(reps[x], d)])
        gamma = elements[elem_over[y][u_j]]
        # right multiplication beta -> beta∘gamma on element indices
        images = tuple(
            elem_index[elements[i].compose(gamma).vertex_perm] for i in range(order)
        )
        gammas.append(Permutation(images))

    fiber_graph = empty_graph(order)
    va = VoltageAssignment(tgt, fiber_graph, tuple(gammas))
    bundle = build_bundle(va)

    iso_v = [0] * src.vertex_count
    for u in range(src.vertex_count):
        x = p.vertex_map[u]
        iso_v[u] = bundle.vertex_index(x, elem_over[x][u])
    iso_d = [0] * src.num_darts
    for dt in range(src.num_darts):
        u = src.dart_tails[dt]
        x = p.vertex_map[u]
        iso_d[dt] = bundle.lifted_dart_index(p.dart_map[dt], elem_over[x][u])

    total = bundle.total
    if sorted(iso_v) != list(range(total.vertex_count)) or sorted(iso_d) != list(
        range(total.num_darts)
    ):
        raise RuntimeError("internal error: reconstruction map is not bijective")
    for dt in range(src.num_darts):
        if total.dart_tails[iso_d[dt]] != iso_v[src.dart_tails[dt]]:
            raise RuntimeError("internal error: reconstruction does not preserve tails")
        if iso_d[src.involution[dt]] != total.involution[iso_d[dt]]:
            raise RuntimeError("internal error: reconstruction does not preserve reversal")

    return CoverBundle(
        va,
        bundle,
        tuple(elements),
        tuple(reps),  # type: ignore[arg-type]
        tuple(iso_v),
        tuple(iso_d),
    )


def group_decomposed_adjacency(va: VoltageAssignment) -> np.ndarray:
    """sum_gamma A_gamma (x) P_gamma for a group-element fiber with no edges."""
    if va.fiber.num_darts != 0:
        raise ValidationError("group fiber must be edgeless")
    nb, nf = va.base.vertex_count, va.fiber.vertex_count
    out = np.zeros((nb * nf, nb * nf), dtype=np.int64)
    for gamma in va.distinct_voltages():
        a_g = gamma_spanning_subgraph(va, gamma).matrix
        out += np.kron(a_g, gamma.matrix())
    return out


# ---------------------------------------------------------------------------
# JSON interchange

def voltage_to_json(va: VoltageAssignment) -> dict:
    from .graphs import graph_to_json

    return {
        "base": graph_to_json(va.base),
        "fiber": graph_to_json(va.fiber),
        "voltages": {str(d): list(p.images) for d, p in enumerate(va.voltages)},
    }


def voltage_from_json(obj: dict) -> VoltageAssignment:
    from .graphs import graph_from_json

    base = graph_from_json(obj["base"])
    fiber = graph_from_json(obj["fiber"])
    per_dart = {
        int(d): Permutation(tuple(images)) for d, images in obj.get("voltages", {}).items()
    }
    return voltage_assignment(base, fiber, per_dart)
