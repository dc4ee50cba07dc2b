"""Ihara zeta functions of finite multigraphs, exact and numeric.

The reciprocal zeta function is represented two ways: det(I - zT) for the
non-backtracking (Hashimoto) operator T on darts, and the Bass-factored
form (1-z^2)^(eps-nu) * det(I - Az + Qz^2).  Both are exact integer
polynomials.  A brute-force primitive-cycle enumerator provides an
independent oracle for the product-over-geodesics definition.

Half-loop convention: a half-loop dart is its own reversal, so the
self-transition d -> d counts as a backtrack and is forbidden.  The Bass
identity is only asserted for graphs without half-loops.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse as sp

from .graphs import HalfEdgeGraph, ResourceLimitError
from .polynomials import (
    ONE,
    ONE_MINUS_Z2,
    IntPolynomial,
    det_of_polynomial_matrix,
)

DEFAULT_MAX_DARTS = 400


def exact_determinant_cap() -> int:
    env = os.environ.get("ZETA_MAX_DARTS")
    return int(env) if env else DEFAULT_MAX_DARTS


def hashimoto_successors(g: HalfEdgeGraph) -> list[list[int]]:
    """successors[d] = darts d' with tail(d') = head(d), d' != reversal of d."""
    out = []
    for d in range(g.num_darts):
        h = g.head(d)
        rev = g.involution[d]
        out.append([e for e in g.darts_at(h) if e != rev])
    return out


def hashimoto_matrix(g: HalfEdgeGraph) -> np.ndarray:
    """Dense 0/1 non-backtracking transition matrix on darts."""
    n = g.num_darts
    t = np.zeros((n, n), dtype=np.int64)
    for d, succ in enumerate(hashimoto_successors(g)):
        for e in succ:
            t[d, e] = 1
    return t


def _hashimoto_sparse(g: HalfEdgeGraph) -> sp.csr_matrix:
    rows, cols = [], []
    for d, succ in enumerate(hashimoto_successors(g)):
        rows.extend([d] * len(succ))
        cols.extend(succ)
    n = g.num_darts
    data = np.ones(len(rows), dtype=np.int64)
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n), dtype=np.int64)


# ---------------------------------------------------------------------------
# exact traces of Hashimoto powers

_INT64_SAFE = 2**62


def _primes_below(limit: int, count: int) -> list[int]:
    def is_prime(n: int) -> bool:
        if n % 2 == 0:
            return n == 2
        f = 3
        while f * f <= n:
            if n % f == 0:
                return False
            f += 2
        return True

    primes = []
    cand = limit - 1
    while len(primes) < count:
        if is_prime(cand):
            primes.append(cand)
        cand -= 1
    return primes


def _trace_powers_int64(t: sp.csr_matrix, max_r: int, mod: Optional[int]) -> list[int]:
    n = t.shape[0]
    block = n if n <= 4096 else 2048
    traces = [0] * max_r
    for j0 in range(0, n, block):
        j1 = min(j0 + block, n)
        v = np.zeros((n, j1 - j0), dtype=np.int64)
        v[np.arange(j0, j1), np.arange(j1 - j0)] = 1
        for r in range(max_r):
            v = t @ v
            if mod is not None:
                v %= mod
            traces[r] += int(v[np.arange(j0, j1), np.arange(j1 - j0)].sum())
    return traces


def closed_geodesic_counts(g: HalfEdgeGraph, max_r: int) -> list[int]:
    """Exact N_r = tr(T^r) for r = 1..max_r.

    Uses int64 sparse powers directly when the path-count bound fits;
    otherwise the same computation modulo several ~2^30 primes with CRT
    reconstruction.  Exact in both regimes.
    """
    if max_r < 1:
        raise ValueError("max_r must be >= 1")
    n = g.num_darts
    if n == 0:
        return [0] * max_r
    q = max(g.max_degree - 1, 0)
    t = _hashimoto_sparse(g)
    bound = n * q**max_r
    if bound < _INT64_SAFE:
        return _trace_powers_int64(t, max_r, None)
    num_primes = 1
    prod = 1
    while prod <= 2 * bound:
        prod *= 2**30
        num_primes += 1
    primes = _primes_below(2**30, num_primes)
    residues = [_trace_powers_int64(t, max_r, p) for p in primes]
    out = []
    modulus = math.prod(primes)
    for r in range(max_r):
        x = 0
        for p, res in zip(primes, residues):
            mp = modulus // p
            x += res[r] % p * mp * pow(mp, -1, p)
        out.append(x % modulus)
    return out


# ---------------------------------------------------------------------------
# exact reciprocal zeta

@dataclass(frozen=True)
class ZetaRational:
    """Exact reciprocal Ihara zeta of a finite graph.

    hashimoto_det = det(I - zT); bass_det = det(I - Az + Qz^2);
    bass_exponent = eps - nu.  valid_radius is 1/(max degree - 1), or None
    (entire) when the graph has no cycles.  bass_from_identity marks the
    cases where bass_det was derived by exact division from hashimoto_det
    instead of an independent determinant (large cycle-like graphs only).
    """

    hashimoto_det: IntPolynomial
    bass_exponent: int
    bass_det: IntPolynomial
    valid_radius: Optional[Fraction]
    bass_from_identity: bool = False


def _functional_cycle_det(g: HalfEdgeGraph) -> IntPolynomial:
    # Max degree <= 2: every dart has at most one non-backtracking
    # successor, so T is a partial permutation and det(I - zT) is the
    # product of (1 - z^len) over its directed cycles.
    succ = hashimoto_successors(g)
    nxt = [s[0] if s else -1 for s in succ]
    seen = [False] * g.num_darts
    det = ONE
    for start in range(g.num_darts):
        if seen[start] or nxt[start] < 0:
            continue
        path = []
        d = start
        while d >= 0 and not seen[d]:
            seen[d] = True
            path.append(d)
            d = nxt[d]
        if d >= 0 and d in path:
            length = len(path) - path.index(d)
            cyc = [0] * (length + 1)
            cyc[0], cyc[length] = 1, -1
            det = det * IntPolynomial(tuple(cyc))
    return det


def _poly_divide_exact(num: IntPolynomial, den: IntPolynomial) -> IntPolynomial:
    a = list(num.coeffs)
    b = den.coeffs
    if not b:
        raise ZeroDivisionError
    out = [0] * (len(a) - len(b) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = a[k + len(b) - 1]
        if c % b[-1] != 0:
            raise ValueError("inexact polynomial division")
        q = c // b[-1]
        out[k] = q
        for j, bj in enumerate(b):
            a[k + j] -= q * bj
    if any(a[: len(b) - 1]):
        raise ValueError("nonzero remainder in polynomial division")
    return IntPolynomial(tuple(out))


def zeta_inverse(g: HalfEdgeGraph, max_darts: Optional[int] = None) -> ZetaRational:
    """Exact reciprocal zeta in both Hashimoto and Bass forms.

    Raises ResourceLimitError when an exact determinant would exceed the
    configured dart cap (ZETA_MAX_DARTS env var, default 400).  Graphs of
    maximum degree <= 2 bypass the cap: their Hashimoto operator is a
    partial permutation with a closed-form determinant.
    """
    cap = max_darts if max_darts is not None else exact_determinant_cap()
    n = g.num_darts
    nu = g.vertex_count
    eps = g.edge_count
    q = max(g.max_degree - 1, 0)

    if q <= 1:
        hdet = _functional_cycle_det(g)
    else:
        if n > cap:
            raise ResourceLimitError(
                f"{n} darts exceeds exact-determinant cap {cap}"
            )
        ident = [[int(i == j) for j in range(n)] for i in range(n)]
        t = hashimoto_matrix(g)
        hdet = det_of_polynomial_matrix([ident, (-t).tolist()], n)

    no_half_loops = g.num_half_loops == 0
    exponent = eps - nu

    bass_by_division = no_half_loops and q <= 1 and nu > 64
    if bass_by_division:
        # hashimoto = (1-z^2)^(eps-nu) * bass; cycles have eps = nu.
        if exponent >= 0:
            bdet = _poly_divide_exact(hdet, ONE_MINUS_Z2**exponent)
        else:
            bdet = hdet * ONE_MINUS_Z2 ** (-exponent)
    else:
        from .graphs import adjacency_matrix, degree_matrix_q

        a = adjacency_matrix(g)
        qmat = degree_matrix_q(g)
        ident_v = [[int(i == j) for j in range(nu)] for i in range(nu)]
        bdet = det_of_polynomial_matrix(
            [ident_v, (-a).tolist(), qmat.tolist()], 2 * nu
        )

    if no_half_loops and not bass_by_division:
        lhs = hdet * (ONE_MINUS_Z2 ** max(0, -exponent))
        rhs = bdet * (ONE_MINUS_Z2 ** max(0, exponent))
        if lhs != rhs:
            raise RuntimeError("internal error: Bass identity failed")

    radius = None if hdet == ONE else Fraction(1, max(g.max_degree - 1, 1))
    return ZetaRational(hdet, exponent, bdet, radius, bass_by_division)


def log_zeta_series(g: HalfEdgeGraph, max_r: int) -> list[Fraction]:
    """Truncation of ln zeta = sum N_r z^r / r; index r holds N_r/r.

    Tail bound for |z| < 1/q: |tail| <= darts * sum_{r>R} (q|z|)^r / r.
    """
    counts = closed_geodesic_counts(g, max_r)
    out = [Fraction(0)] * (max_r + 1)
    for r, nr in enumerate(counts, start=1):
        out[r] = Fraction(nr, r)
    return out


def series_tail_bound(num_darts: int, q: int, abs_z: float, order: int) -> float:
    """Upper bound on the dropped tail of the log-zeta series."""
    x = q * abs_z
    if x >= 1:
        return math.inf
    return num_darts * x ** (order + 1) / ((order + 1) * (1 - x))


class EvaluatedZeta(NamedTuple):
    value: complex
    in_valid_region: bool


def evaluate_zeta_inverse(zr: ZetaRational, z: complex) -> EvaluatedZeta:
    """Horner evaluation of det(I - zT) at z.

    Polynomials are entire, so evaluation is allowed anywhere; the flag
    records whether |z| lies inside the validity disc of the geodesic
    product.
    """
    value = zr.hashimoto_det(complex(z))
    if zr.valid_radius is None:
        ok = True
    else:
        ok = abs(z) < float(zr.valid_radius)
    return EvaluatedZeta(value, ok)


# ---------------------------------------------------------------------------
# primitive-cycle oracle

@dataclass(frozen=True)
class CycleClass:
    """Primitive non-backtracking closed dart cycle, up to rotation.

    Stored in the lexicographically least rotation; a cycle and its
    reversal are distinct classes.
    """

    darts: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.darts)


def _is_least_rotation(seq: list[int]) -> bool:
    n = len(seq)
    doubled = seq + seq
    for shift in range(1, n):
        if doubled[shift : shift + n] < seq:
            return False
    return True


def _is_primitive(seq: list[int]) -> bool:
    n = len(seq)
    for p in range(1, n):
        if n % p == 0 and all(seq[i] == seq[(i + p) % n] for i in range(n)):
            return False
    return True


def primitive_cycle_oracle(
    g: HalfEdgeGraph, max_len: int, node_budget: int = 5_000_000
) -> list[CycleClass]:
    """Exhaustive enumeration of primitive geodesic classes up to max_len.

    Backtracking over dart sequences: each class is found exactly once as
    its lexicographically least rotation.  Satisfies
    sum_{d | r} d * #classes(d) = tr(T^r).
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    succ = hashimoto_successors(g)
    classes: list[CycleClass] = []
    nodes = 0
    path: list[int] = []

    def dfs(start: int, d: int):
        nonlocal nodes
        for e in succ[d]:
            if e < start:
                continue
            nodes += 1
            if nodes > node_budget:
                raise ResourceLimitError("primitive-cycle enumeration budget exceeded")
            if e == start and _is_least_rotation(path) and _is_primitive(path):
                classes.append(CycleClass(tuple(path)))
            if len(path) < max_len:
                path.append(e)
                dfs(start, e)
                path.pop()

    for s in range(g.num_darts):
        path = [s]
        dfs(s, s)
    return classes


def oracle_length_counts(classes: list[CycleClass]) -> dict[int, int]:
    out: dict[int, int] = {}
    for c in classes:
        out[c.length] = out.get(c.length, 0) + 1
    return out
