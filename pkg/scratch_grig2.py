"""Scratch 2: ball stabilization radii and N_r/nu behavior across levels."""
import time
from fractions import Fraction
from graphzeta.graphs import HalfEdgeGraph, MarkedGraph, ball, marked_isometric
from graphzeta.zeta import closed_geodesic_counts


def gen_action(gen, s):
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
    tails, dart_id = [], {}
    for gen in 'abcd':
        for v in verts:
            dart_id[(index[v], gen)] = len(tails)
            tails.append(index[v])
    inv = [0] * len(tails)
    for gen in 'abcd':
        for v in verts:
            w = gen_action(gen, v)
            inv[dart_id[(index[v], gen)]] = dart_id[(index[w], gen)]
    return HalfEdgeGraph(2 ** m, tuple(tails), tuple(inv))


marked = {m: MarkedGraph(schreier_level(m), 0) for m in range(1, 10)}

for m in range(1, 7):
    a, b = marked[m], marked[m + 1]
    r = 0
    while r < 48:
        t0 = time.time()
        ok, _ = marked_isometric(ball(a, r + 1), ball(b, r + 1))
        dt = time.time() - t0
        if dt > 5:
            print(f'  (radius {r+1} took {dt:.1f}s)', flush=True)
        if not ok:
            break
        r += 1
    print(f'level {m} vs {m+1}: balls agree to radius {r}', flush=True)

for m in range(2, 9):
    g = marked[m].graph
    N = closed_geodesic_counts(g, 8)
    print(f'm={m}: N_r/nu =', [str(Fraction(n, g.vertex_count)) for n in N], flush=True)
