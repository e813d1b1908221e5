"""Reference routines written without the package, used to freeze expected
values.  Each is deliberately naive."""
from itertools import product as cartesian


def partition_numbers(n_max):
    """p(0..n_max) by the coin-change recurrence over part sizes."""
    p = [1] + [0] * n_max
    for part in range(1, n_max + 1):
        for n in range(part, n_max + 1):
            p[n] += p[n - part]
    return p


def partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def difference_two_counts(n_max):
    """Partitions of n whose parts differ pairwise by at least 2."""
    out = []
    for n in range(n_max + 1):
        out.append(sum(1 for lam in partitions(n)
                       if all(a - b >= 2 for a, b in zip(lam, lam[1:]))))
    return out


def at_most_parts(r, n_max):
    """Number of partitions of j into at most r parts, j = 0..n_max."""
    return [sum(1 for lam in partitions(j) if len(lam) <= r) for j in range(n_max + 1)]


def a1_monomials(M, level=None):
    """Every A1 monomial of energy <= M under the level-k conditions (level
    None: no charge cap), by trying all charge sequences and all modes.

    Particle p (1-based) of charge n has mode m_p <= -n - 2(p-1)n; equal
    neighbours need m_(p+1) <= m_p - 2n.  Returns (energy, total charge)
    pairs, one per monomial.
    """
    found = []
    cap = M if level is None else level

    def charge_seqs(budget, largest):
        yield ()
        for n in range(min(budget, largest), 0, -1):
            for rest in charge_seqs(budget - n, n):
                yield (n,) + rest

    for ns in charge_seqs(M, cap):
        bounds = [-n - 2 * p * n for p, n in enumerate(ns)]
        if -sum(bounds) > M:
            continue
        ranges = [range(b - M, b + 1) for b in bounds]
        for ms in cartesian(*ranges):
            e = -sum(ms)
            if e > M:
                continue
            ok = all(not (a == b and m2 > m1 - 2 * a)
                     for a, b, m1, m2 in zip(ns, ns[1:], ms, ms[1:]))
            if ok:
                found.append((e, sum(ns)))
    return found


def pbw_by_listing(roots, M):
    """Multisets of (root, mode) with total mode <= M, by listing pairs in
    a fixed order and choosing with repetition."""
    pairs = [(a, n) for n in range(1, M + 1) for a in roots]
    tally = {}

    def rec(start, budget, q, y):
        tally[(q, y)] = tally.get((q, y), 0) + 1
        for idx in range(start, len(pairs)):
            a, n = pairs[idx]
            if n <= budget:
                rec(idx, budget - n, q + n, tuple(u + v for u, v in zip(y, a)))

    rec(0, M, 0, tuple(0 for _ in roots[0]))
    return tally
