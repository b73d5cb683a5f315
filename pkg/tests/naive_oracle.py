"""Independent naive reference implementation for oracle tests.

Deliberately written with plain Python loops, dicts and itertools (no numpy,
no code shared with the package) so that agreement with the fast engine is
meaningful.
"""

import itertools
import math


def naive_log_Z(q, n, edges, field):
    """log of the partition sum by direct iteration over q**n tuples."""
    logs = []
    for sigma in itertools.product(range(q), repeat=n):
        lw = 0.0
        for (u, v, beta) in edges:
            if sigma[u] == sigma[v]:
                lw += beta
        for (v, spin, h) in field:
            if sigma[v] == spin:
                lw += h
        logs.append(lw)
    shift = max(logs)
    return shift + math.log(math.fsum(math.exp(x - shift) for x in logs))


def naive_restricted_log(q, n, edges, field, keep):
    logs = []
    for sigma in itertools.product(range(q), repeat=n):
        if not keep(sigma):
            continue
        lw = 0.0
        for (u, v, beta) in edges:
            if sigma[u] == sigma[v]:
                lw += beta
        for (v, spin, h) in field:
            if sigma[v] == spin:
                lw += h
        logs.append(lw)
    if not logs:
        return float("-inf")
    shift = max(logs)
    return shift + math.log(math.fsum(math.exp(x - shift) for x in logs))


def naive_probs(q, n, edges, field):
    weights = {}
    for sigma in itertools.product(range(q), repeat=n):
        lw = 0.0
        for (u, v, beta) in edges:
            if sigma[u] == sigma[v]:
                lw += beta
        for (v, spin, h) in field:
            if sigma[v] == spin:
                lw += h
        weights[sigma] = lw
    shift = max(weights.values())
    total = math.fsum(math.exp(x - shift) for x in weights.values())
    return {s: math.exp(x - shift) / total for s, x in weights.items()}


def naive_tv(q, n, edges_a, field_a, edges_b, field_b):
    pa = naive_probs(q, n, edges_a, field_a)
    pb = naive_probs(q, n, edges_b, field_b)
    return 0.5 * math.fsum(abs(pa[s] - pb[s]) for s in pa)


def random_model(rng, n_max=12, q_choices=(2, 3), beta_range=(-2.0, 2.0), h_range=(-1.0, 1.0)):
    """A random small model as plain tuples: (q, n, edges, field)."""
    q = int(rng.choice(q_choices))
    n = int(rng.integers(2, (n_max if q == 2 else min(n_max, 8)) + 1))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.4:
                edges.append((u, v, float(rng.uniform(*beta_range))))
    field = []
    for v in range(n):
        for s in range(q):
            if rng.random() < 0.3:
                field.append((v, s, float(rng.uniform(*h_range))))
    return q, n, tuple(edges), tuple(field)
