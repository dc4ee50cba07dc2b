"""Exact integer polynomials and exact determinants of polynomial matrices.

Determinants of matrices with integer-polynomial entries are computed by
evaluating at deg+1 distinct integer points (fraction-free Bareiss
elimination at each point) followed by exact Lagrange interpolation over
the rationals.  All arithmetic uses Python ints / Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with exact integer coefficients; coeffs[k] is the z^k term.

    The zero polynomial is the empty coefficient tuple; otherwise the
    leading coefficient is nonzero.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        while c and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __call__(self, z):
        """Horner evaluation; works for int, Fraction, float, complex."""
        acc = 0 * z
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPolynomial(tuple(out))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPolynomial(())
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return IntPolynomial(tuple(out))

    def __pow__(self, n: int) -> "IntPolynomial":
        if n < 0:
            raise ValueError("negative power")
        result = IntPolynomial((1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def coefficient(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0


ONE = IntPolynomial((1,))
Z = IntPolynomial((0, 1))
ONE_MINUS_Z2 = IntPolynomial((1, 0, -1))


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free Gaussian elimination."""
    n = len(matrix)
    if n == 0:
        return 1
    m = [list(map(int, row)) for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if m[i][k] != 0), -1)
            if pivot < 0:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        pkk = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i = m[i]
            row_k = m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pkk - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pkk
    return sign * m[n - 1][n - 1]


def _interpolation_points(count: int) -> list[int]:
    # 0, 1, -1, 2, -2, ... keeps evaluated entries small.
    pts = [0]
    k = 1
    while len(pts) < count:
        pts.append(k)
        if len(pts) < count:
            pts.append(-k)
        k += 1
    return pts[:count]


def lagrange_interpolate_int(points: Sequence[int], values: Sequence[int]) -> IntPolynomial:
    """Interpolating polynomial through integer data; must have int coefficients."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        # basis polynomial for node i, built incrementally
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            denom *= points[i] - points[j]
            nxt = [Fraction(0)] * (len(basis) + 1)
            for k, c in enumerate(basis):
                nxt[k] += c * (-points[j])
                nxt[k + 1] += c
            basis = nxt
        scale = Fraction(values[i], 1) / denom
        for k, c in enumerate(basis):
            coeffs[k] += c * scale
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise ValueError(f"non-integer coefficient {c} in interpolation")
        out.append(int(c))
    return IntPolynomial(tuple(out))


def det_of_polynomial_matrix(
    matrices: Sequence[Sequence[Sequence[int]]], degree_bound: int
) -> IntPolynomial:
    """det(M0 + z*M1 + z^2*M2 + ...) as an exact IntPolynomial.

    `matrices` lists the integer coefficient matrices by power of z;
    `degree_bound` bounds the determinant degree and sets the number of
    evaluation points.
    """
    mats = [[[int(x) for x in row] for row in m] for m in matrices]
    n = len(mats[0]) if mats else 0
    if n == 0:
        return ONE
    pts = _interpolation_points(degree_bound + 1)
    values = []
    for t in pts:
        m = [[sum(mats[p][i][j] * t**p for p in range(len(mats))) for j in range(n)]
             for i in range(n)]
        values.append(bareiss_determinant(m))
    return lagrange_interpolate_int(pts, values)


# ---------------------------------------------------------------------------
# formal power series with rational coefficients (lists of Fractions)

def series_mul(a: Sequence[Fraction], b: Sequence[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai:
            for j, bj in enumerate(b[: order + 1 - i]):
                out[i + j] += ai * bj
    return out


def series_inverse(a: Sequence[Fraction], order: int) -> list[Fraction]:
    """Reciprocal of a series with a(0) != 0, to the given order."""
    a0 = Fraction(a[0])
    if a0 == 0:
        raise ValueError("series has no reciprocal (zero constant term)")
    inv = [Fraction(0)] * (order + 1)
    inv[0] = 1 / a0
    for k in range(1, order + 1):
        s = Fraction(0)
        for j in range(1, k + 1):
            aj = Fraction(a[j]) if j < len(a) else Fraction(0)
            s += aj * inv[k - j]
        inv[k] = -s / a0
    return inv


def series_log(a: Sequence[Fraction], order: int) -> list[Fraction]:
    """Formal log of a series with constant term 1."""
    if Fraction(a[0]) != 1:
        raise ValueError("formal log needs constant term 1")
    # log' = a'/a; integrate term by term
    da = [Fraction(k * (a[k] if k < len(a) else 0)) for k in range(1, order + 1)]
    inv = series_inverse(a, order - 1) if order >= 1 else []
    deriv = series_mul(da, inv, order - 1) if order >= 1 else []
    out = [Fraction(0)] * (order + 1)
    for k in range(1, order + 1):
        out[k] = deriv[k - 1] / k
    return out


def power_sums_from_det(poly: IntPolynomial, max_r: int) -> list[int]:
    """Traces tr(T^r) recovered from det(I - zT) via Newton's identities."""
    c = [poly.coefficient(k) for k in range(max_r + 1)]
    p = [0] * (max_r + 1)
    for k in range(1, max_r + 1):
        acc = -k * c[k]
        for j in range(1, k):
            acc -= c[k - j] * p[j]
        p[k] = acc
    return p[1:]


def det_from_power_sums(power_sums: Sequence[int], degree: int) -> IntPolynomial:
    """det(I - zT) from tr(T^r), r = 1..degree, via Newton's identities."""
    if len(power_sums) < degree:
        raise ValueError("need power sums up to the matrix size")
    c = [Fraction(1)] + [Fraction(0)] * degree
    for k in range(1, degree + 1):
        acc = Fraction(0)
        for j in range(1, k + 1):
            acc += power_sums[j - 1] * c[k - j]
        c[k] = -acc / k
    out = []
    for x in c:
        if x.denominator != 1:
            raise ValueError("non-integer coefficient from power sums")
        out.append(int(x))
    return IntPolynomial(tuple(out))
