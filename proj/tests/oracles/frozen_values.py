"""Independent brute-force evaluation of the fixed test fixtures.

Run with plain python3; the printed numbers are frozen into the C++ tests.
Nothing here imports the library.
"""
import math


def density(points, dc, pop=None):
    pop = pop or [1] * len(points)
    out = []
    for i, xi in enumerate(points):
        s = 0.0
        for j, xj in enumerate(points):
            if j != i:
                s += pop[j] * math.exp(-((abs(xi - xj) / dc) ** 2))
        out.append(s)
    return out


def denser(rho, j, i):
    return rho[j] > rho[i] or (rho[j] == rho[i] and j < i)


def leading(points, rho):
    n = len(points)
    ln, delta = [], []
    for i in range(n):
        best, bd = -1, math.inf
        for j in range(n):
            if j != i and denser(rho, j, i):
                d = abs(points[i] - points[j])
                if d < bd:
                    best, bd = j, d
        if best < 0:
            bd = max(abs(points[i] - p) for p in points)
        ln.append(best)
        delta.append(bd)
    return ln, delta


def lodog(points, rho, ln, delta, alpha, h, nmax):
    n = len(points)
    gamma = [rho[i] * delta[i] for i in range(n)]
    root = ln.index(-1)
    order = sorted(range(n), key=lambda i: (-gamma[i], i))
    order.remove(root)
    order.insert(0, root)
    q = []
    for ng in range(1, nmax + 1):
        roots = set(order[:ng])
        cost = 0.0
        for i in range(n):
            if i not in roots:
                cost += delta[i]
        q.append(alpha * h(ng) + (1 - alpha) * cost)
    best = min(range(len(q)), key=lambda k: (q[k], k))
    return order, q, best + 1


pts = [0.0, 1.0, 2.0, 10.0]
rho = density(pts, 2.0)
print("density [0,1,2,10] dc=2:", [repr(r) for r in rho])
print("leading:", leading(pts, rho))

two = [0.0, 0.04, 0.07, 0.11, 0.15, 0.18, 0.22, 0.26, 0.29, 0.33,
       5.0, 5.03, 5.08, 5.12, 5.15, 5.19, 5.24, 5.27, 5.31, 5.36]
dists = sorted(abs(a - b) for i, a in enumerate(two) for b in two[i + 1:])
m = len(dists)
rank = min(max(math.ceil(0.2 * m), 1), m)
dc = dists[rank - 1]
rho2 = density(two, dc)
ln2, d2 = leading(two, rho2)
order, q, ngs = lodog(two, rho2, ln2, d2, 0.5, lambda x: 0.1 * x, 20)
print("two-cluster dc:", repr(dc), "root:", ln2.index(-1), "ng*:", ngs,
      "roots:", order[:ngs])
print("Q(1), Q(2), Q(20):", repr(q[0]), repr(q[1]), repr(q[19]))
sub = []
for i in range(20):
    k = i
    while k not in order[:ngs]:
        k = ln2[k]
    sub.append(order.index(k))
print("subtree membership:", sub)
