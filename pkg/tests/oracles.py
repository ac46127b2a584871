"""Slow, direct re-implementations used as independent references.

Nothing here imports the production modules; everything is plain loops over
Python floats.
"""

import math


def dfa_hurst(x, scales):
    """Profile, per-box OLS line removal, RMS residual, log-log OLS slope."""
    n_pts = len(x)
    mean = sum(x) / n_pts
    y, acc = [], 0.0
    for v in x:
        acc += v - mean
        y.append(acc)
    fluct = []
    for n in scales:
        nb = n_pts // n
        ss = 0.0
        for b in range(nb):
            seg = y[b * n:(b + 1) * n]
            im = (n - 1) / 2.0
            sm = sum(seg) / n
            sxy = sum((i - im) * (v - sm) for i, v in enumerate(seg))
            sxx = sum((i - im) ** 2 for i in range(n))
            slope = sxy / sxx
            for i, v in enumerate(seg):
                ss += (v - (sm + slope * (i - im))) ** 2
        fluct.append(math.sqrt(ss / (nb * n)))
    lx = [math.log(n) for n in scales]
    ly = [math.log(f) for f in fluct]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    slope = sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sum((a - mx) ** 2 for a in lx)
    return slope, fluct


def apen_counts(u, m, r):
    n_t = len(u) - m + 1
    counts = []
    for i in range(n_t):
        c = 0
        for j in range(n_t):
            if max(abs(u[i + k] - u[j + k]) for k in range(m)) <= r:
                c += 1
        counts.append(c)
    return counts


def apen_phi(u, m, r):
    counts = apen_counts(u, m, r)
    n_t = len(counts)
    return sum(math.log(c / n_t) for c in counts) / n_t


def apen(u, m, r):
    return apen_phi(u, m, r) - apen_phi(u, m + 1, r)


def delay_vector(x, n, m, tau):
    return [x[n - j * tau] for j in range(m)]


def knn(x, m, tau, k):
    """Neighbours of the last delay vector of ``x`` among positions with a successor."""
    last = len(x) - 1
    target = delay_vector(x, last, m, tau)
    scored = []
    for n in range((m - 1) * tau, last):
        v = delay_vector(x, n, m, tau)
        scored.append((sum((a - b) ** 2 for a, b in zip(v, target)), n))
    scored.sort()
    return [n for _, n in scored[:k]], [d for d, _ in scored[:k]]


def refine(x, cands, m, tau):
    last = len(x) - 1
    t_m = delay_vector(x, last, m, tau)
    t_m1 = delay_vector(x, last, m + 1, tau)
    thr = max(sum((a - b) ** 2 for a, b in zip(delay_vector(x, n, m, tau), t_m)) for n in cands)
    kept, best = [], None
    for n in cands:
        if n - m * tau < 0:
            continue
        d1 = sum((a - b) ** 2 for a, b in zip(delay_vector(x, n, m + 1, tau), t_m1))
        if d1 <= thr:
            kept.append(n)
        if best is None or d1 < best[0]:
            best = (d1, n)
    return kept if kept else [best[1]]
