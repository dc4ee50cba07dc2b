"""Covering towers, strong convergence, Schreier graphs, and spectral limits.

A Tower is a chain of marked graphs with covering maps going down
(maps[i] : levels[i+1] -> levels[i]).  The limit graph is never
materialized; it is represented by a ball provider that can produce the
basepoint ball of any radius together with the projection of that ball to
every tower level.  Certification re-derives isometry and compatibility
from scratch, so a provider bug cannot silently certify a bad tower.

Built-in towers: cycle towers (limit: the two-sided line) and Schreier
graph towers of binary automaton groups, with the Grigorchuk group
preset.  Schreier levels are |S|-regular with one dart per (vertex,
generator) and half-loops at fixed points.  The doubled variant replaces
every dart by two parallel darts, giving the 2|S|-regular loop multigraph
convention under which the closed-form Grigorchuk log-zeta identity holds
(see grigorchuk_log_zeta).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Protocol, Sequence

import numpy as np
import scipy.sparse as sp

from .bundles import Bundle, VoltageAssignment, build_bundle, induced_cover_of_bundles
from .graphs import (
    CoveringMap,
    HalfEdgeGraph,
    MarkedGraph,
    ValidationError,
    adjacency_matrix,
    ball_with_origin,
    cycle_graph,
    double_darts,
    marked_isometric,
    validate_covering,
)
from .quadrature import NonConvergenceError, tanh_sinh
from .zeta import closed_geodesic_counts, series_tail_bound, zeta_inverse


class LimitBallProvider(Protocol):
    """Computable stand-in for the limit graph of a tower."""

    def ball_and_projections(
        self, radius: int, levels: Sequence[int]
    ) -> tuple[MarkedGraph, list[tuple[int, ...]]]:
        """Basepoint ball of the limit plus its vertex projection to each
        requested tower level, with one consistent vertex indexing."""
        ...


@dataclass(frozen=True)
class Tower:
    """Chain of marked covering graphs, optionally with limit data."""

    levels: tuple[MarkedGraph, ...]
    maps: tuple[CoveringMap, ...]
    radii: Optional[tuple[int, ...]] = None
    limit: Optional[LimitBallProvider] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "maps", tuple(self.maps))
        if self.radii is not None:
            object.__setattr__(self, "radii", tuple(self.radii))
        if len(self.maps) != max(len(self.levels) - 1, 0):
            raise ValidationError("need one covering map per consecutive level pair")
        for i, p in enumerate(self.maps):
            if p.source != self.levels[i + 1].graph or p.target != self.levels[i].graph:
                raise ValidationError(f"map {i} does not connect levels {i+1} -> {i}")
            if p.vertex_map[self.levels[i + 1].basepoint] != self.levels[i].basepoint:
                raise ValidationError(f"map {i} does not preserve basepoints")
            check = validate_covering(p)
            if not check.ok:
                raise ValidationError(f"map {i} is not a covering: {check.violation}")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def composite_vertex_map(self, level: int) -> tuple[int, ...]:
        """Vertex map of maps[0] ∘ ... ∘ maps[level-1] : level -> level 0."""
        g = self.levels[level].graph
        out = list(range(g.vertex_count))
        for i in range(level - 1, -1, -1):
            out = [self.maps[i].vertex_map[v] for v in out]
        return tuple(out)


# ---------------------------------------------------------------------------
# strong-convergence certification

@dataclass(frozen=True)
class LevelCertification:
    level: int
    requested_radius: int
    certified_radius: int
    ok: bool
    failure: Optional[str]


@dataclass(frozen=True)
class CertificationReport:
    levels: tuple[LevelCertification, ...]
    ok: bool


def _rho_is_ball_isomorphism(
    limit_ball: MarkedGraph, level: MarkedGraph, rho: Sequence[int], radius: int
) -> Optional[str]:
    """Check rho maps the limit ball isomorphically onto the level ball."""
    level_ball, origin = ball_with_origin(level, radius)
    lb = limit_ball.graph
    if lb.vertex_count != level_ball.graph.vertex_count:
        return "ball sizes differ"
    local = {orig: i for i, orig in enumerate(origin)}
    try:
        images = [local[rho[v]] for v in range(lb.vertex_count)]
    except KeyError:
        return "rho image leaves the level ball"
    if len(set(images)) != len(images):
        return "rho not injective on the ball"
    if images[limit_ball.basepoint] != level_ball.basepoint:
        return "rho does not preserve the basepoint"
    a_lim = adjacency_matrix(lb)
    a_lvl = adjacency_matrix(level_ball.graph)
    idx = np.array(images, dtype=np.intp)
    if not np.array_equal(a_lim, a_lvl[np.ix_(idx, idx)]):
        return "rho does not preserve adjacency"
    hl_lim = lb.half_loop_counts
    hl_lvl = level_ball.graph.half_loop_counts
    if any(hl_lim[v] != hl_lvl[images[v]] for v in range(lb.vertex_count)):
        return "rho does not preserve half-loops"
    return None


def certify_strong_convergence(
    tower: Tower,
    radius_schedule: Optional[Sequence[int]] = None,
    provider: Optional[LimitBallProvider] = None,
) -> CertificationReport:
    """Certify that the tower strongly converges to the provider's limit.

    For every level n and each radius r up to the scheduled s_n this
    checks: the limit ball is isometric to the level ball
    (marked_isometric), the provider's rho is itself an isomorphism onto
    the level ball, and the compatibility rho_0 = maps[0]∘...∘maps[n-1]∘rho_n
    holds vertexwise on the ball.  Reports the largest certified radius
    per level and the first failure.
    """
    provider = provider if provider is not None else tower.limit
    if provider is None:
        raise ValidationError("no limit ball provider available")
    radii = tuple(radius_schedule) if radius_schedule is not None else tower.radii
    if radii is None or len(radii) < tower.depth:
        raise ValidationError("radius schedule missing or too short")

    reports = []
    all_ok = True
    for n in range(tower.depth):
        requested = radii[n]
        certified = -1
        failure = None
        composite = tower.composite_vertex_map(n)
        for r in range(requested + 1):
            lball, (rho_n, rho_0) = provider.ball_and_projections(r, [n, 0])
            ok, _ = marked_isometric(lball, ball_with_origin(tower.levels[n], r)[0])
            if not ok:
                failure = f"radius {r}: limit ball not isometric to level ball"
                break
            err = _rho_is_ball_isomorphism(lball, tower.levels[n], rho_n, r)
            if err is not None:
                failure = f"radius {r}: {err}"
                break
            bad = next(
                (
                    v
                    for v in range(lball.graph.vertex_count)
                    if composite[rho_n[v]] != rho_0[v]
                ),
                None,
            )
            if bad is not None:
                failure = f"radius {r}: compatibility fails at ball vertex {bad}"
                break
            certified = r
        ok_level = certified == requested
        all_ok = all_ok and ok_level
        reports.append(LevelCertification(n, requested, certified, ok_level, failure))
    return CertificationReport(tuple(reports), all_ok)


# ---------------------------------------------------------------------------
# cycle towers (limit: the two-sided infinite line)

class LineLimitProvider:
    """Limit of cycle towers: balls are paths; rho wraps positions mod N."""

    def __init__(self, level_sizes: Sequence[int], basepoints: Sequence[int]):
        self.sizes = tuple(level_sizes)
        self.basepoints = tuple(basepoints)

    def ball_and_projections(
        self, radius: int, levels: Sequence[int]
    ) -> tuple[MarkedGraph, list[tuple[int, ...]]]:
        from .graphs import path_graph

        ball = MarkedGraph(path_graph(2 * radius + 1), radius)
        rhos = []
        for level in levels:
            size, w = self.sizes[level], self.basepoints[level]
            rhos.append(
                tuple((w + (j - radius)) % size for j in range(2 * radius + 1))
            )
        return ball, rhos


def cycle_tower(depth: int, base_length: int = 3) -> Tower:
    """C_N <- C_2N <- C_4N ... marked at 0, with wrap-around coverings."""
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    sizes = [base_length * 2**i for i in range(depth)]
    levels = [MarkedGraph(cycle_graph(n), 0) for n in sizes]
    maps = []
    for i in range(depth - 1):
        big, small = sizes[i + 1], sizes[i]
        vmap = tuple(v % small for v in range(big))
        dmap = tuple(2 * ((d // 2) % small) + d % 2 for d in range(2 * big))
        maps.append(CoveringMap(levels[i + 1].graph, levels[i].graph, vmap, dmap))
    # ball of radius r in C_N is a path iff 2r+2 <= N (no wrap-around edge)
    radii = tuple(max((n - 2) // 2, 0) for n in sizes)
    provider = LineLimitProvider(sizes, [0] * depth)
    return Tower(tuple(levels), tuple(maps), radii, provider)


def constant_tower(mg: MarkedGraph, depth: int) -> Tower:
    """The same marked graph at every level with identity maps."""
    from .graphs import identity_covering

    levels = tuple([mg] * depth)
    maps = tuple([identity_covering(mg.graph)] * (depth - 1))
    radius = max(d for d in _finite_distances(mg)) if mg.graph.vertex_count else 0
    provider = ConstantLimitProvider(mg)
    return Tower(levels, maps, tuple([radius] * depth), provider)


def _finite_distances(mg: MarkedGraph) -> list[int]:
    from .graphs import distances_from

    return [d for d in distances_from(mg.graph, mg.basepoint) if d >= 0] or [0]


class ConstantLimitProvider:
    """Limit of a constant tower: the graph itself."""

    def __init__(self, mg: MarkedGraph):
        self.mg = mg

    def ball_and_projections(
        self, radius: int, levels: Sequence[int]
    ) -> tuple[MarkedGraph, list[tuple[int, ...]]]:
        ball, origin = ball_with_origin(self.mg, radius)
        return ball, [origin for _ in levels]


# ---------------------------------------------------------------------------
# Schreier towers of binary automaton groups

@dataclass(frozen=True)
class BinaryAutomaton:
    """Involutive generators acting on binary strings by wreath recursion.

    Each generator g has an optional root swap and two child states
    (names) acting on the 0- and 1-subtrees; "e" is the identity state.
    Generator actions must be involutions at every depth (the Schreier
    dart pairing needs symmetric generating sets).
    """

    generators: tuple[str, ...]
    root_swap: dict[str, bool]
    children: dict[str, tuple[str, str]]

    def act(self, gen: str, s: tuple[int, ...]) -> tuple[int, ...]:
        if gen == "e" or not s:
            return s
        x, rest = s[0], s[1:]
        if self.root_swap[gen]:
            return (1 - x,) + rest
        return (x,) + self.act(self.children[gen][x], rest)


# Grigorchuk group, with the alphabet flipped so the stabilized ray is
# 0^infinity and the basepoint of every level is the all-zeros string.
GRIGORCHUK = BinaryAutomaton(
    generators=("a", "b", "c", "d"),
    root_swap={"a": True, "b": False, "c": False, "d": False},
    children={"a": ("e", "e"), "b": ("c", "a"), "c": ("d", "a"), "d": ("b", "e")},
)

MAX_SCHREIER_DEPTH = 12


def _bits(v: int, m: int) -> tuple[int, ...]:
    return tuple((v >> k) & 1 for k in range(m))


def _bits_to_int(s: tuple[int, ...]) -> int:
    return sum(b << k for k, b in enumerate(s))


def schreier_level_graph(
    automaton: BinaryAutomaton, m: int, doubled: bool = False
) -> HalfEdgeGraph:
    """Schreier graph on binary strings of length m, one dart per (vertex, gen)."""
    size = 2**m
    gens = automaton.generators
    tails = []
    for _ in gens:
        tails.extend(range(size))
    inv = [0] * len(tails)
    for gi, gen in enumerate(gens):
        for v in range(size):
            w = _bits_to_int(automaton.act(gen, _bits(v, m)))
            if _bits_to_int(automaton.act(gen, _bits(w, m))) != v:
                raise ValidationError(
                    f"generator {gen} is not involutive at depth {m}"
                )
            inv[gi * size + v] = gi * size + w
    g = HalfEdgeGraph(size, tuple(tails), tuple(inv))
    return double_darts(g) if doubled else g


def schreier_tower(
    automaton: BinaryAutomaton = GRIGORCHUK,
    depth: int = 8,
    doubled: bool = False,
    radii: Optional[Sequence[int]] = None,
    radius_cap: int = 24,
) -> Tower:
    """Tower of Schreier graphs with string-truncation covering maps.

    Levels are marked at the all-zeros string.  With doubled=True every
    level is the doubled (2|S|-regular) multigraph.  Default radii probe
    consecutive-level ball agreement up to radius_cap.
    """
    if not 1 <= depth <= MAX_SCHREIER_DEPTH:
        raise ValidationError(f"depth must be in 1..{MAX_SCHREIER_DEPTH}")
    levels = []
    for m in range(1, depth + 1):
        levels.append(MarkedGraph(schreier_level_graph(automaton, m, doubled), 0))
    maps = []
    gens = automaton.generators
    for m in range(1, depth):
        big, small = 2 ** (m + 1), 2**m
        vmap = tuple(v % small for v in range(big))
        base_dmap = [
            gi * small + (v % small) for gi in range(len(gens)) for v in range(big)
        ]
        if doubled:
            dmap = tuple(2 * base_dmap[d // 2] + d % 2 for d in range(2 * len(base_dmap)))
        else:
            dmap = tuple(base_dmap)
        maps.append(
            CoveringMap(levels[m].graph, levels[m - 1].graph, vmap, dmap)
        )
    provider = SchreierLimitProvider(automaton, doubled)
    if radii is None:
        radii = []
        for n in range(depth):
            radii.append(provider.stable_radius(n + 1, radius_cap))
    return Tower(tuple(levels), tuple(maps), tuple(radii), provider)


class SchreierLimitProvider:
    """Limit Schreier graph represented through deep finite levels.

    The ball of radius r around the basepoint ray is read off from a level
    deep enough that consecutive levels agree on that ball; rho maps are
    string truncations.
    """

    def __init__(self, automaton: BinaryAutomaton, doubled: bool = False):
        self.automaton = automaton
        self.doubled = doubled
        self._cache: dict[int, tuple[MarkedGraph, tuple[int, ...], int]] = {}

    def _marked_level(self, m: int) -> MarkedGraph:
        return MarkedGraph(schreier_level_graph(self.automaton, m, self.doubled), 0)

    def stable_radius(self, m: int, cap: int) -> int:
        """Largest r <= cap with level-m and level-(m+1) balls isometric."""
        a = self._marked_level(m)
        b = self._marked_level(m + 1)
        r = 0
        while r < cap:
            ok, _ = marked_isometric(
                ball_with_origin(a, r + 1)[0], ball_with_origin(b, r + 1)[0]
            )
            if not ok:
                break
            r += 1
        return r

    def _materialize(
        self, radius: int, min_depth: int
    ) -> tuple[MarkedGraph, tuple[int, ...], int]:
        cached = self._cache.get(radius)
        if cached is not None and cached[2] >= min_depth:
            return cached
        m = max(min_depth, radius.bit_length())
        while m < 28:
            here = ball_with_origin(self._marked_level(m), radius)
            nxt = ball_with_origin(self._marked_level(m + 1), radius)
            ok, _ = marked_isometric(here[0], nxt[0])
            if ok:
                self._cache[radius] = (here[0], here[1], m)
                return self._cache[radius]
            m += 1
        raise ValidationError(f"limit ball of radius {radius} did not stabilize")

    def ball_and_projections(
        self, radius: int, levels: Sequence[int]
    ) -> tuple[MarkedGraph, list[tuple[int, ...]]]:
        # tower level index n holds strings of length n+1
        depth_needed = max([lv + 1 for lv in levels], default=2)
        ball, origin, _ = self._materialize(radius, max(2, depth_needed))
        rhos = []
        for level in levels:
            mask = 2 ** (level + 1) - 1
            rhos.append(tuple(v & mask for v in origin))
        return ball, rhos


# ---------------------------------------------------------------------------
# normalized log-zeta along a tower

@dataclass(frozen=True)
class NormalizedLogZeta:
    """Per-level truncations of (1/|X_n|) ln zeta at the sample points.

    values[n][i] is the level-n series value at z_samples[i]; diffs holds
    successive absolute differences; the limit estimate is the last level
    with the last difference as an error bar.  power_normalized, when
    requested, holds zeta_{X_n}(z)^(|X_0|/|X_n|) from the exact
    polynomials.
    """

    order: int
    z_samples: tuple[complex, ...]
    level_sizes: tuple[int, ...]
    values: tuple[tuple[complex, ...], ...]
    diffs: tuple[tuple[float, ...], ...]
    limit_estimate: tuple[complex, ...]
    error_bar: tuple[float, ...]
    tail_bounds: tuple[tuple[float, ...], ...]
    power_normalized: Optional[tuple[tuple[complex, ...], ...]]


def normalized_log_zeta(
    tower: Tower,
    order: int,
    z_samples: Sequence[complex],
    tolerance: Optional[float] = None,
    include_power_normalization: bool = False,
) -> NormalizedLogZeta:
    """Evaluate (1/|X_n|) sum_{r<=order} N_r z^r / r on every level.

    Raises NonConvergenceError when a tolerance is requested but the
    documented tail bound at the given order exceeds it.
    """
    zs = [complex(z) for z in z_samples]
    values = []
    tails = []
    power_rows: list[tuple[complex, ...]] = []
    for mg in tower.levels:
        g = mg.graph
        q = max(g.max_degree - 1, 0)
        bounds = tuple(
            series_tail_bound(g.num_darts, q, abs(z), order) / g.vertex_count
            for z in zs
        )
        if tolerance is not None:
            worst = max(bounds, default=0.0)
            if worst > tolerance:
                raise NonConvergenceError(
                    f"series order {order} gives tail bound {worst:.3e} > {tolerance:.3e}",
                    worst,
                )
        counts = closed_geodesic_counts(g, order)
        row = []
        for z in zs:
            acc = 0j
            zp = 1.0 + 0j
            for r, n_r in enumerate(counts, start=1):
                zp *= z
                if n_r:
                    acc += n_r * zp / r
            row.append(acc / g.vertex_count)
        values.append(tuple(row))
        tails.append(bounds)
        if include_power_normalization:
            zr = zeta_inverse(g)
            a_ratio = tower.levels[0].graph.vertex_count / g.vertex_count
            power_rows.append(
                tuple(
                    cmath.exp(-a_ratio * cmath.log(zr.hashimoto_det(z))) for z in zs
                )
            )
    diffs = tuple(
        tuple(abs(values[n + 1][i] - values[n][i]) for i in range(len(zs)))
        for n in range(len(values) - 1)
    )
    return NormalizedLogZeta(
        order,
        tuple(zs),
        tuple(mg.graph.vertex_count for mg in tower.levels),
        tuple(values),
        diffs,
        values[-1],
        tuple(diffs[-1]) if diffs else tuple(0.0 for _ in zs),
        tuple(tails),
        tuple(power_rows) if include_power_normalization else None,
    )


# ---------------------------------------------------------------------------
# spectral measures

GRIGORCHUK_SUPPORT = ((-0.5, 0.0), (0.5, 1.0))


def grigorchuk_density(x: float, dist_left: float, dist_right: float) -> float:
    """KNS spectral density |1-4x| / (2 pi sqrt(x(2x-1)(2x+1)(1-x))).

    dist_left/dist_right are distances to the enclosing support interval's
    endpoints; the singular factors are rewritten through them so the
    density stays accurate arbitrarily close to the endpoints.
    """
    if x <= 0:  # interval [-1/2, 0]: x = -dist_right, 2x+1 = 2 dist_left
        radicand = dist_right * (1.0 - 2.0 * x) * (2.0 * dist_left) * (1.0 - x)
    else:  # interval [1/2, 1]: 2x-1 = 2 dist_left, 1-x = dist_right
        radicand = x * (2.0 * dist_left) * (2.0 * x + 1.0) * dist_right
    return abs(1.0 - 4.0 * x) / (2.0 * math.pi * math.sqrt(radicand))


@dataclass(frozen=True)
class SpectralMeasure:
    """Discrete eigenvalue measure of A/k, or the named Grigorchuk density."""

    kind: str  # "discrete" | "grigorchuk"
    eigenvalues: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.kind == "discrete":
            if not self.eigenvalues:
                raise ValidationError("discrete measure needs eigenvalues")
        elif self.kind != "grigorchuk":
            raise ValidationError(f"unknown measure kind {self.kind!r}")

    def total_mass(self, tol: float = 1e-8) -> float:
        if self.kind == "discrete":
            return 1.0
        total = 0.0
        for a, b in GRIGORCHUK_SUPPORT:
            total += tanh_sinh(
                lambda x, da, db: grigorchuk_density(x, da, db), a, b, tol=tol
            ).value.real
        return total


GRIGORCHUK_MEASURE = SpectralMeasure("grigorchuk")


def discrete_spectral_measure(g: HalfEdgeGraph) -> SpectralMeasure:
    """Eigenvalues of the Markov operator A/k of a k-regular graph.

    Non-regular graphs are rejected.  Eigenvalues within 1e-9 of the
    spectral bound are clamped to [-1, 1].
    """
    k = g.regular_degree()
    if k is None or k == 0:
        raise ValidationError("spectral measure needs a regular graph")
    eig = np.linalg.eigvalsh(adjacency_matrix(g).astype(float) / k)
    clamped = []
    for x in eig:
        if 1.0 < abs(x) <= 1.0 + 1e-9:
            x = math.copysign(1.0, x)
        clamped.append(float(x))
    return SpectralMeasure("discrete", tuple(sorted(clamped)))


def _adjacency_trace_powers(g: HalfEdgeGraph, max_j: int) -> list[int]:
    """Exact tr(A^j) for j = 1..max_j (int64; sizes checked)."""
    n = g.vertex_count
    k = g.max_degree
    if n * max(k, 1) ** max_j >= 2**62:
        raise ValidationError("moment computation would overflow int64")
    a = sp.csr_matrix(adjacency_matrix(g))
    acc = np.eye(n, dtype=np.int64)
    out = []
    for _ in range(max_j):
        acc = a @ acc
        out.append(int(np.trace(acc)))
    return out


@dataclass(frozen=True)
class MomentTable:
    """Exact rational moments of the level measures sigma_m, with diffs."""

    max_moment: int
    level_sizes: tuple[int, ...]
    moments: tuple[tuple[Fraction, ...], ...]  # [level][j], j = 0..max_moment
    diffs: tuple[tuple[Fraction, ...], ...]  # successive |m_{n+1,j} - m_{n,j}|


def moment_convergence(tower: Tower, max_moment: int) -> MomentTable:
    """j-th moments tr((A/k)^j)/|X_m| per level, exactly.

    Weak-convergence surrogate: along a converging tower the columns are
    Cauchy.  Levels must be regular.
    """
    rows = []
    for mg in tower.levels:
        g = mg.graph
        k = g.regular_degree()
        if k is None:
            raise ValidationError("moment table needs regular levels")
        traces = _adjacency_trace_powers(g, max_moment)
        row = [Fraction(1)]
        for j in range(1, max_moment + 1):
            row.append(Fraction(traces[j - 1], k**j * g.vertex_count))
        rows.append(tuple(row))
    diffs = tuple(
        tuple(abs(rows[n + 1][j] - rows[n][j]) for j in range(max_moment + 1))
        for n in range(len(rows) - 1)
    )
    return MomentTable(
        max_moment,
        tuple(mg.graph.vertex_count for mg in tower.levels),
        tuple(rows),
        diffs,
    )


# ---------------------------------------------------------------------------
# spectral integrals

def spectral_log_f(
    measure: SpectralMeasure, p: int, d: int, z: complex, tol: float = 1e-8
) -> complex:
    """Integral of ln(1 - (p*lambda + d)z + (p - 1 + d)z^2) d sigma(lambda).

    Exact finite average for discrete measures; double-exponential
    quadrature over both support intervals for the Grigorchuk density.
    Valid for |z| < 1/(p + d - 1), where the principal log branch applies
    across the support.
    """
    z = complex(z)

    def integrand_value(lam: float) -> complex:
        return cmath.log(1 - (p * lam + d) * z + (p - 1 + d) * z * z)

    if measure.kind == "discrete":
        assert measure.eigenvalues is not None
        total = sum(integrand_value(lam) for lam in measure.eigenvalues)
        return total / len(measure.eigenvalues)
    acc = 0j
    for a, b in GRIGORCHUK_SUPPORT:
        acc += tanh_sinh(
            lambda x, da, db: integrand_value(x) * grigorchuk_density(x, da, db),
            a,
            b,
            tol=tol,
        ).value
    return acc


@dataclass(frozen=True)
class GrigorchukLogZeta:
    value: complex
    integrand: str  # "log" or "raw"


def grigorchuk_log_zeta(
    z: complex, raw_integrand: bool = False, tol: float = 1e-8
) -> GrigorchukLogZeta:
    """Closed-form normalized log zeta of the limit Grigorchuk Schreier graph.

    -3 ln(1 - z^2) minus the spectral integrals with integrand
    ln(1 - 8xz + 7z^2) against the KNS density over [-1/2,0] and [1/2,1].
    These constants belong to the doubled (8-regular) Schreier graph
    convention, which is what the doubled Schreier tower converges to.
    The raw (no-log) integrand variant is retained for comparison; it
    disagrees with the tower and is interpreted as a typo upstream.
    """
    z = complex(z)

    def core(x: float) -> complex:
        val = 1 - 8 * x * z + 7 * z * z
        return val if raw_integrand else cmath.log(val)

    acc = -3.0 * cmath.log(1 - z * z)
    for a, b in GRIGORCHUK_SUPPORT:
        acc -= tanh_sinh(
            lambda x, da, db: core(x) * grigorchuk_density(x, da, db), a, b, tol=tol
        ).value
    if abs(z.imag) == 0.0:
        acc = complex(acc.real, 0.0)
    return GrigorchukLogZeta(acc, "raw" if raw_integrand else "log")


# ---------------------------------------------------------------------------
# voltage towers

@dataclass(frozen=True)
class BundleTower:
    """Tower of bundle totals with the induced voltages per level."""

    tower: Tower
    voltages: tuple[VoltageAssignment, ...]
    bundles: tuple[Bundle, ...]


def bundle_tower(
    tower: Tower, phi_first: VoltageAssignment, fiber_basepoint: int = 0
) -> BundleTower:
    """Push a level-0 voltage up the tower and bundle every level.

    phi_{n+1}(d) = phi_n(p_n(d)); levels are marked at
    (w_n, fiber_basepoint); certification radii are inherited.
    """
    if phi_first.base != tower.levels[0].graph:
        raise ValidationError("voltage must live on the first tower level")
    voltages = [phi_first]
    bundles = [build_bundle(phi_first)]
    maps = []
    for p in tower.maps:
        psi, p_tilde = induced_cover_of_bundles(p, voltages[-1])
        voltages.append(psi)
        bundles.append(build_bundle(psi))
        maps.append(p_tilde)
    nf = phi_first.fiber.vertex_count
    if not 0 <= fiber_basepoint < nf:
        raise ValidationError("fiber basepoint out of range")
    levels = tuple(
        MarkedGraph(
            b.total, b.vertex_index(tower.levels[i].basepoint, fiber_basepoint)
        )
        for i, b in enumerate(bundles)
    )
    new_tower = Tower(levels, tuple(maps), tower.radii, None)
    return BundleTower(new_tower, tuple(voltages), tuple(bundles))
