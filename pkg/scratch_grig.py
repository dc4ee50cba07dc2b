"""Scratch: settle the Grigorchuk convention question numerically."""
import numpy as np
from scipy.integrate import quad
from graphzeta.graphs import HalfEdgeGraph, double_darts
from graphzeta.zeta import closed_geodesic_counts


# Grigorchuk wreath recursion, bit-flipped so 0^inf is the stabilized ray:
# a(xw) = (1-x)w
# b(0w) = 0 c(w); b(1w) = 1 a(w)
# c(0w) = 0 d(w); c(1w) = 1 a(w)
# d(0w) = 0 b(w); d(1w) = 1 w
def gen_action(gen, s):
    # s: tuple of bits
    if not s:
        return s
    x, rest = s[0], s[1:]
    if gen == 'a':
        return ((1 - x),) + rest
    if gen == 'b':
        return (x,) + (gen_action('c', rest) if x == 0 else gen_action('a', rest))
    if gen == 'c':
        return (x,) + (gen_action('d', rest) if x == 0 else gen_action('a', rest))
    if gen == 'd':
        return (x,) + (gen_action('b', rest) if x == 0 else rest)
    raise ValueError


def schreier_level(m):
    verts = [tuple((i >> k) & 1 for k in range(m)) for i in range(2 ** m)]
    index = {v: i for i, v in enumerate(verts)}
    tails, inv = [], []
    dart_id = {}
    for gen in 'abcd':
        for v in verts:
            dart_id[(index[v], gen)] = len(tails)
            tails.append(index[v])
    for gen in 'abcd':
        for v in verts:
            w = gen_action(gen, v)
            d = dart_id[(index[v], gen)]
            inv_d = dart_id[(index[w], gen)]
            if len(inv) <= d:
                inv.extend([0] * (d + 1 - len(inv)))
            inv.append if False else None
    inv = [0] * len(tails)
    for gen in 'abcd':
        for v in verts:
            w = gen_action(gen, v)
            inv[dart_id[(index[v], gen)]] = dart_id[(index[w], gen)]
    return HalfEdgeGraph(2 ** m, tuple(tails), tuple(inv))


def norm_log_zeta(g, z, R):
    N = closed_geodesic_counts(g, R)
    return sum(n * z ** r / r for r, n in enumerate(N, 1)) / g.vertex_count


def density(x):
    return abs(1 - 4 * x) / (2 * np.pi * np.sqrt(x * (2 * x - 1) * (2 * x + 1) * (1 - x)))


mass1, _ = quad(density, -0.5, 0, points=[-0.5, 0])
mass2, _ = quad(density, 0.5, 1, points=[0.5, 1])
print('density masses:', mass1, mass2, 'total', mass1 + mass2)

for z in (0.02, 0.05, 0.08):
    i1, _ = quad(lambda x: np.log(1 - 8 * x * z + 7 * z * z) * density(x), -0.5, 0)
    i2, _ = quad(lambda x: np.log(1 - 8 * x * z + 7 * z * z) * density(x), 0.5, 1)
    closed_ln = -3 * np.log(1 - z * z) - i1 - i2
    closed_raw = -3 * np.log(1 - z * z) - \
        quad(lambda x: (1 - 8 * x * z + 7 * z * z) * density(x), -0.5, 0)[0] - \
        quad(lambda x: (1 - 8 * x * z + 7 * z * z) * density(x), 0.5, 1)[0]
    print(f'z={z}: closed(ln)={closed_ln:.6f} closed(raw)={closed_raw:.6f}')
    for m in (6, 8, 10):
        g = schreier_level(m)
        gd = double_darts(g)
        v4 = norm_log_zeta(g, z, 30)
        vd = norm_log_zeta(gd, z, 20)
        print(f'  m={m}: 4-reg={v4:.6f}  doubled={vd:.6f}')

# also check eigen route for doubled at m=10
from graphzeta.graphs import adjacency_matrix
g = schreier_level(10)
A = adjacency_matrix(g).astype(float)
eig = np.linalg.eigvalsh(A / 4.0)
for z in (0.02, 0.05, 0.08):
    val = -3 * np.log(1 - z * z) - np.mean(np.log(1 - 8 * eig * z + 7 * z * z))
    print(f'z={z}: doubled-eigen(m=10) = {val:.6f}')
