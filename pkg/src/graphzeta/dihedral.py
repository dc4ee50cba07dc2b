"""Block factorization of bundle zetas for dihedral voltages on circulant fibers.

When every voltage on the base lands in the dihedral group generated by
the n-cycle a and the reflection b, and the fiber is a circulant graph on
n vertices (so its adjacency commutes with P(a)), conjugating the bundle
adjacency by I (x) M block-diagonalizes it.  The reciprocal zeta then
factors into one nu x nu determinant (the f factor), one 2nu x 2nu
determinant per Fourier pair t, and, for even n, one extra nu x nu
determinant (the h factor).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bundles import (
    Permutation,
    VoltageAssignment,
    build_bundle,
    gamma_spanning_subgraph,
)
from .graphs import HalfEdgeGraph, ValidationError, adjacency_matrix, circulant_graph, degree_matrix_q


@dataclass(frozen=True)
class DihedralSetup:
    """The n-cycle a, reflection b, primitive root mu, and circulant fiber."""

    n: int
    rotation: Permutation
    reflection: Permutation
    mu: complex
    fiber: HalfEdgeGraph
    connection_set: frozenset[int]

    @property
    def fiber_degree(self) -> int:
        return len(self.connection_set)


def build_dihedral_setup(n: int, connection_set: set[int]) -> DihedralSetup:
    """Construct a, b, mu and the circulant fiber; verify the relations.

    In 1-based terms a = (1 2 ... n) and b reverses {1..n}; 0-based that is
    a: i -> i+1 mod n and b: i -> n-1-i.  Requires n >= 3 and a symmetric
    nonempty connection set.
    """
    if n < 3:
        raise ValidationError("need n >= 3")
    conns = {s % n for s in connection_set}
    if not conns or 0 in conns or any((n - s) % n not in conns for s in conns):
        raise ValidationError("connection set must be nonempty, symmetric, nonzero")
    a = Permutation(tuple((i + 1) % n for i in range(n)))
    b = Permutation(tuple(n - 1 - i for i in range(n)))
    # defining relations a^n = b^2 = 1, bab = a^-1
    acc = a
    for _ in range(n - 1):
        acc = acc.after(a)
    if not acc.is_identity() or not b.after(b).is_identity():
        raise RuntimeError("internal error: dihedral generator orders wrong")
    if b.after(a).after(b) != a.inverse():
        raise RuntimeError("internal error: bab != a^-1")
    fiber = circulant_graph(n, conns)
    return DihedralSetup(n, a, b, cmath.exp(2j * cmath.pi / n), fiber, frozenset(conns))


def dihedral_element(setup: DihedralSetup, k: int, s: int) -> Permutation:
    """The word a^k b^s acting on points (apply a^k, then b if s)."""
    n = setup.n
    k %= n
    if s % 2:
        return Permutation(tuple(n - 1 - (i + k) % n for i in range(n)))
    return Permutation(tuple((i + k) % n for i in range(n)))


def dihedral_words(setup: DihedralSetup) -> dict[tuple[int, ...], tuple[int, int]]:
    """images -> (k, s) lookup table over all 2n group elements."""
    table = {}
    for s in (0, 1):
        for k in range(setup.n):
            table[dihedral_element(setup, k, s).images] = (k, s)
    return table


@dataclass(frozen=True)
class EigenData:
    """Fourier eigenvectors of P(a), fiber eigenvalues, and the change of basis M."""

    vectors: np.ndarray  # column k is x_k
    lambdas: tuple[float, ...]  # lambda_{(F,k)} for k = 0..n-1
    m: np.ndarray
    condition_number: float


def eigen_data(setup: DihedralSetup, tol: float = 1e-10) -> EigenData:
    """x_k = (1, mu^k, ..., mu^{(n-1)k}); M per the parity pattern.

    Verifies P(a) x_k = mu^k x_k, that P(b) x_k is a mu^{n-k} eigenvector,
    and A_F x_k = lambda_k x_k before assembling M.
    """
    n, mu = setup.n, setup.mu
    x = np.array(
        [[mu ** (i * k) for k in range(n)] for i in range(n)], dtype=complex
    )
    pa = setup.rotation.matrix().astype(complex)
    pb = setup.reflection.matrix().astype(complex)
    af = adjacency_matrix(setup.fiber).astype(complex)
    lambdas = []
    for k in range(n):
        lam = sum(mu ** (k * s) for s in setup.connection_set)
        if abs(lam.imag) > 1e-9:
            raise RuntimeError("internal error: circulant eigenvalue not real")
        lambdas.append(lam.real)
        if np.max(np.abs(pa @ x[:, k] - mu**k * x[:, k])) > tol:
            raise RuntimeError(f"internal error: x_{k} not a mu^{k} eigenvector of P(a)")
        if np.max(np.abs(pa @ (pb @ x[:, k]) - mu ** (n - k) * (pb @ x[:, k]))) > tol:
            raise RuntimeError(f"internal error: P(b)x_{k} not a mu^(n-{k}) eigenvector")
        if np.max(np.abs(af @ x[:, k] - lambdas[k] * x[:, k])) > tol:
            raise RuntimeError(f"internal error: x_{k} not a fiber eigenvector")
    cols = [x[:, 0]]
    half = (n - 1) // 2 if n % 2 else (n - 2) // 2
    for t in range(1, half + 1):
        cols.append(x[:, t])
        cols.append(pb @ x[:, t])
    if n % 2 == 0:
        cols.append(x[:, n // 2])
    m = np.column_stack(cols)
    return EigenData(x, tuple(lambdas), m, float(np.linalg.cond(m)))


@dataclass(frozen=True)
class DihedralFactorization:
    """Assembled block data for a dihedral voltage assignment on base Y."""

    setup: DihedralSetup
    voltage: VoltageAssignment
    words: tuple[tuple[int, int], ...]  # (k, s) per base dart
    eigen: EigenData
    rotation_parts: tuple[np.ndarray, ...]  # A(Y_(psi, a^k)) for k = 0..n-1
    reflection_parts: tuple[np.ndarray, ...]  # A(Y_(psi, a^k b))
    blocks: tuple[np.ndarray, ...]  # A_t for t = 1..half
    b_block: Optional[np.ndarray]  # B, n even only
    l_matrix: np.ndarray  # (Q_Y + d I) (x) I_2

    @property
    def base(self) -> HalfEdgeGraph:
        return self.voltage.base


def dihedral_factorization(
    setup: DihedralSetup, va: VoltageAssignment
) -> DihedralFactorization:
    """Classify voltages as dihedral words and assemble A_t, B, and L.

    Reports any dart whose voltage falls outside <a, b>.
    """
    if va.fiber != setup.fiber:
        raise ValidationError("voltage fiber differs from the dihedral setup fiber")
    lookup = dihedral_words(setup)
    words = []
    for d, perm in enumerate(va.voltages):
        if perm.images not in lookup:
            raise ValidationError(f"dart {d}: voltage outside the dihedral subgroup")
        words.append(lookup[perm.images])
    n, mu = setup.n, setup.mu
    nu = va.base.vertex_count
    rot = [np.zeros((nu, nu), dtype=np.int64) for _ in range(n)]
    ref = [np.zeros((nu, nu), dtype=np.int64) for _ in range(n)]
    for d, (k, s) in enumerate(words):
        target = ref[k] if s else rot[k]
        target[va.base.dart_tails[d], va.base.head(d)] += 1
    eig = eigen_data(setup)
    half = (n - 1) // 2 if n % 2 else (n - 2) // 2
    blocks = []
    for t in range(1, half + 1):
        top_rot = sum(mu ** (t * k) * rot[k] for k in range(n))
        top_ref = sum(mu ** (t * k) * ref[k] for k in range(n))
        bot_ref = sum(mu ** ((n - t) * k) * ref[k] for k in range(n))
        bot_rot = sum(mu ** ((n - t) * k) * rot[k] for k in range(n))
        blocks.append(np.block([[top_rot, top_ref], [bot_ref, bot_rot]]))
    b_block = None
    if n % 2 == 0:
        b_block = sum(
            (-1.0) ** k * rot[k] + (-1.0) ** (k + 1) * ref[k] for k in range(n)
        ).astype(complex)
    d_f = setup.fiber_degree
    qd = degree_matrix_q(va.base) + d_f * np.eye(nu, dtype=np.int64)
    l_matrix = np.kron(qd, np.eye(2, dtype=np.int64)).astype(complex)
    return DihedralFactorization(
        setup,
        va,
        tuple(words),
        eig,
        tuple(m.astype(complex) for m in rot),
        tuple(m.astype(complex) for m in ref),
        tuple(blocks),
        b_block,
        l_matrix,
    )


def _interleave_to_column_major(nu: int, n: int) -> np.ndarray:
    # permutation sending base-major index (y, col) = y*n + col
    # to column-major index col*nu + y
    perm = np.zeros(nu * n, dtype=np.intp)
    for y in range(nu):
        for c in range(n):
            perm[y * n + c] = c * nu + y
    return perm


def block_diagonal_form(fact: DihedralFactorization) -> np.ndarray:
    """Expected conjugated adjacency, in M-column-major ordering.

    Columns of M group as [x_0 | x_1, P(b)x_1 | ...top pairs... | x_{n/2}];
    the expected matrix is (A_Y + dI) ⊕ ⊕_t (A_t + lambda_t I) ⊕ (B + lambda_{n/2} I).
    """
    nu = fact.base.vertex_count
    n = fact.setup.n
    d_f = fact.setup.fiber_degree
    lam = fact.eigen.lambdas
    a_y = adjacency_matrix(fact.base).astype(complex)
    parts = [a_y + d_f * np.eye(nu)]
    for t, block in enumerate(fact.blocks, start=1):
        parts.append(block + lam[t] * np.eye(2 * nu))
    if fact.b_block is not None:
        parts.append(fact.b_block + lam[n // 2] * np.eye(nu))
    size = sum(p.shape[0] for p in parts)
    out = np.zeros((size, size), dtype=complex)
    pos = 0
    for p in parts:
        k = p.shape[0]
        out[pos : pos + k, pos : pos + k] = p
        pos += k
    return out


def conjugation_residual(fact: DihedralFactorization) -> float:
    """max |(I (x) M)^-1 A_total (I (x) M) - block diagonal| over all entries."""
    bundle = build_bundle(fact.voltage)
    a_total = adjacency_matrix(bundle.total).astype(complex)
    nu, n = fact.base.vertex_count, fact.setup.n
    im = np.kron(np.eye(nu), fact.eigen.m)
    conj = np.linalg.solve(im, a_total @ im)
    perm = _interleave_to_column_major(nu, n)
    # base-major (y, col) reordered so M-columns are contiguous blocks:
    # column-major index (col, y) = col*nu + y
    inv_perm = np.argsort(perm)
    reordered = conj[np.ix_(inv_perm, inv_perm)]
    return float(np.max(np.abs(reordered - block_diagonal_form(fact))))


@dataclass(frozen=True)
class DihedralFactors:
    """Factor values at one sample point z."""

    f: complex
    g: tuple[complex, ...]
    h: Optional[complex]
    euler_exponent: int  # eps - nu of the total graph
    assembled: complex
    in_valid_region: bool


def dihedral_zeta_factors(fact: DihedralFactorization, z: complex) -> DihedralFactors:
    """f, g_t, h and the assembled reciprocal zeta at z.

    f   = det(I - (A_Y + dI)z + (Q_Y + dI)z^2)
    g_t = det(I - (A_t + lambda_t I)z + L z^2)
    h   = det(I - (B + lambda_{n/2} I)z + (Q_Y + dI)z^2)      (n even)
    assembled = (1 - z^2)^(eps - nu of the total graph) * f * prod g_t * h.
    """
    nu = fact.base.vertex_count
    n = fact.setup.n
    d_f = fact.setup.fiber_degree
    lam = fact.eigen.lambdas
    z = complex(z)
    a_y = adjacency_matrix(fact.base).astype(complex)
    qd = (degree_matrix_q(fact.base) + d_f * np.eye(nu, dtype=np.int64)).astype(complex)
    eye_v = np.eye(nu)
    f = complex(np.linalg.det(eye_v - (a_y + d_f * eye_v) * z + qd * z * z))
    g = []
    eye_2v = np.eye(2 * nu)
    for t, block in enumerate(fact.blocks, start=1):
        g.append(
            complex(
                np.linalg.det(
                    eye_2v - (block + lam[t] * eye_2v) * z + fact.l_matrix * z * z
                )
            )
        )
    h = None
    if fact.b_block is not None:
        h = complex(
            np.linalg.det(
                eye_v - (fact.b_block + lam[n // 2] * eye_v) * z + qd * z * z
            )
        )
    total = build_bundle(fact.voltage).total
    exponent = total.edge_count - total.vertex_count
    assembled = (1 - z * z) ** exponent * f
    for val in g:
        assembled *= val
    if h is not None:
        assembled *= h
    k_plus_d = fact.base.max_degree + d_f
    in_region = abs(z) < 1 / (k_plus_d - 1) if k_plus_d > 1 else True
    return DihedralFactors(f, tuple(g), h, exponent, assembled, in_region)


def expected_factor_count(n: int) -> int:
    """1 + (n-1)/2 factors for odd n; 2 + (n-2)/2 for even n."""
    return 1 + (n - 1) // 2 if n % 2 else 2 + (n - 2) // 2
