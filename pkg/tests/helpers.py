"""Shared corpus builders for the test suite (seed-deterministic)."""

from __future__ import annotations

import random

from graphzeta.bundles import Permutation, VoltageAssignment, voltage_assignment
from graphzeta.graphs import (
    HalfEdgeGraph,
    circulant_graph,
    complete_graph,
    cycle_graph,
    graph_from_edges,
    petersen_graph,
    random_regular_graph,
)


def bass_corpus() -> list[tuple[str, HalfEdgeGraph]]:
    """>= 20 half-loop-free graphs: cycles, completes, Petersen, random cubics."""
    graphs = [(f"C{n}", cycle_graph(n)) for n in range(3, 9)]
    graphs += [(f"K{n}", complete_graph(n)) for n in range(4, 7)]
    graphs.append(("Petersen", petersen_graph()))
    for seed in range(10):
        n = 8 + 2 * (seed % 3)  # 8, 10, 12 vertices
        graphs.append((f"cubic[{seed}]", random_regular_graph(3, n, seed)))
    return graphs


def random_multigraph(rng: random.Random, max_vertices: int = 8) -> HalfEdgeGraph:
    """Connected-ish random multigraph with possible parallel edges and loops."""
    n = rng.randint(1, max_vertices)
    edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 2 * n))]
    # spanning chain keeps degrees nonzero most of the time
    edges += [(i, (i + 1) % n) for i in range(n - 1)]
    return graph_from_edges(n, edges)


def random_circulant(rng: random.Random, max_vertices: int = 6) -> HalfEdgeGraph:
    n = rng.randint(3, max_vertices)
    pool = list(range(1, n // 2 + 1))
    size = rng.randint(1, len(pool))
    half = rng.sample(pool, size)
    conns = set()
    for s in half:
        conns.add(s)
        conns.add(n - s)
    conns.discard(0)
    conns.discard(n)
    return circulant_graph(n, conns)


def random_circulant_automorphism(rng: random.Random, n: int) -> Permutation:
    """i -> +-i + t mod n: always an automorphism of any circulant on Z/n."""
    t = rng.randrange(n)
    if rng.random() < 0.5:
        return Permutation(tuple((i + t) % n for i in range(n)))
    return Permutation(tuple((t - i) % n for i in range(n)))


def random_voltage_case(seed: int) -> VoltageAssignment:
    """Random base (<= 8 vertices), circulant fiber (<= 6), random voltages."""
    rng = random.Random(seed)
    base = random_multigraph(rng)
    fiber = random_circulant(rng)
    n = fiber.vertex_count
    per = {}
    for d in range(base.num_darts):
        rev = base.involution[d]
        if d < rev:
            per[d] = random_circulant_automorphism(rng, n)
        elif d == rev:  # half-loop darts need involutive voltages
            t = rng.randrange(n)
            per[d] = Permutation(tuple((t - i) % n for i in range(n)))
    return voltage_assignment(base, fiber, per)
