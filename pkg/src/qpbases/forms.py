"""Exponent forms over dual charge-type configurations and the guarded
search that enumerates configurations of bounded minimal energy.

A configuration gives, for each color i, a non-increasing list
r_i^(1) >= r_i^(2) >= ... > 0.  Its exponent is

    sum_i sum_t r_i^(t)^2
      - sum_i sum_{(s, mu) partner of i} sum_t sum_{p<mu} r_s^(t) r_i^(mu*t - p)
      + sum_t r_j^(t) [t > k0]                      (rectangular weights only)

which is also the least total energy of a monomial with that charge-type.

Grouping the entries r_i^(t) with nu_i*(T-1) < t <= nu_i*T into block T
splits the quadratic part into a sum of identical integer forms, one per
block.  The block form is checked positive definite with exact rational
arithmetic; enumeration then runs block by block with Fincke-Pohst bounds.
Since the block form is integral and positive definite, each nonzero block
costs at least 1, so at most M blocks are nonzero at energy <= M.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .lie_data import RootSystemData

# float slack for the pruning radius; every leaf is rechecked exactly
_EPS = 1e-9


class FormNotPositiveDefinite(RuntimeError):
    """Raised instead of risking an incomplete enumeration."""


# color plans ---------------------------------------------------------------

# (i_1..i_l ; i''_3..i''_l) and the (j, k) pair using two partners
ALT_E_TABLE = {
    8: ((1, 7, 2, 3, 4, 5, 6, 8), (1, 2, 3, 4, 5, 5), (7, 2)),
    7: ((1, 6, 5, 4, 3, 2, 7), (6, 5, 4, 3, 3), (6, 1)),
    6: ((6, 5, 4, 3, 2, 1), (5, 4, 3, 2), (4, 1)),
}


@dataclass(frozen=True)
class ColorPlan:
    """Processing order of colors and, per color, the partner colors whose
    charges enter its energy bound, with their ratios mu."""
    order: tuple[int, ...]
    partners: dict  # color -> tuple[(partner, mu), ...]

    def partner_list(self, i: int):
        return self.partners.get(i, ())


def standard_plan(rs: RootSystemData) -> ColorPlan:
    partners = {i: ((rs.i_prime[i], rs.mu[i]),) for i in range(2, rs.rank + 1)}
    return ColorPlan(tuple(range(1, rs.rank + 1)), partners)


def alt_e_plan(rs: RootSystemData) -> ColorPlan:
    if rs.spec.family != "E":
        raise ValueError(f"alternative E bases need type E, got {rs.spec.name}")
    order, dprime, (jj, kk) = ALT_E_TABLE[rs.rank]
    partners = {}
    for j in range(3, rs.rank + 1):
        color = order[j - 1]
        ps = [dprime[j - 3]]
        if j == jj:
            ps.append(order[kk - 1])
        partners[color] = tuple((p, 1) for p in ps)
    return ColorPlan(order, partners)


# the exponent itself ---------------------------------------------------------

def exponent(config, plan: ColorPlan, rect=None) -> int:
    """Exponent of q for a configuration, evaluated term by term.

    ``config[i-1]`` is color i's list r_i^(1), r_i^(2), ...; ``rect`` is
    ``(j, k0)`` for a rectangular weight.
    """
    def r(i, t):
        lst = config[i - 1]
        return lst[t - 1] if 1 <= t <= len(lst) else 0

    total = sum(x * x for lst in config for x in lst)
    for i in plan.order:
        for s, mu in plan.partner_list(i):
            for t in range(1, len(config[s - 1]) + 1):
                rs_t = config[s - 1][t - 1]
                total -= rs_t * sum(r(i, mu * t - p) for p in range(mu))
    if rect is not None:
        j, k0 = rect
        total += sum(config[j - 1][k0:])
    return total


def cross_term(r_s, r_i, mu: int) -> int:
    """sum_t sum_{p<mu} r_s^(t) r_i^(mu*t - p), t over the support of r_s."""
    total = 0
    n = len(r_i)
    for t, a in enumerate(r_s, 1):
        for p in range(mu):
            u = mu * t - p
            if u <= n:
                total += a * r_i[u - 1]
    return total


# block form ------------------------------------------------------------------

def _ldl_from_last(mat):
    """Complete squares from the last variable backwards.

    Returns (d, c) with  x^T mat x = sum_s d[s] * (x_s + sum_{u<s} c[s][u] x_u)^2.
    Works over Fractions when given Fractions.
    """
    n = len(mat)
    a = [row[:] for row in mat]
    d = [None] * n
    c = [[0] * n for _ in range(n)]
    for s in range(n - 1, -1, -1):
        piv = a[s][s]
        d[s] = piv
        if piv <= 0:
            return d, None
        for u in range(s):
            c[s][u] = a[s][u] / piv
        for u in range(s):
            if a[u][s] == 0:
                continue
            for w in range(s):
                a[u][w] = a[u][w] - a[u][s] * a[s][w] / piv
    return d, c


def _fp_vectors(d, cc, prev_same, colors, caps, budget, rect_var=None):
    """Fincke-Pohst enumeration of nonzero integer vectors x >= 0 with
    sum_s d[s] (x_s - center_s)^2 (+ x_rect) <= budget, entries of one color
    non-increasing and each color's first entry capped by ``caps``.

    Floats prune with a small slack; callers recheck exactly when they need to.
    """
    n = len(d)
    x = [0] * n
    out = []

    def rec(s, partial):
        if s == n:
            if any(x):
                out.append(tuple(x))
            return
        center = 0.0
        for u, cf in cc[s]:
            center -= cf * x[u]
        room = budget - partial
        if room < -_EPS:
            return
        half = math.sqrt(max(room, 0.0) / d[s]) + _EPS
        lo = max(0, math.ceil(center - half))
        hi = math.floor(center + half)
        ps = prev_same[s]
        if ps is not None:
            hi = min(hi, x[ps])
        else:
            cap = caps.get(colors[s])
            if cap is not None:
                hi = min(hi, cap)
        lin = 1 if s == rect_var else 0
        for v in range(lo, hi + 1):
            x[s] = v
            t = v - center
            rec(s + 1, partial + d[s] * t * t + lin * v)
        x[s] = 0

    rec(0, 0.0)
    return out


def schur_complement(mat, keep):
    """Exact Schur complement of a symmetric rational matrix onto the
    indices ``keep``: the form min over the other coordinates, as a
    function of the kept ones."""
    n = len(mat)
    a = [[Fraction(v) for v in row] for row in mat]
    keep = list(keep)
    for e in (v for v in range(n) if v not in keep):
        piv = a[e][e]
        if piv <= 0:
            raise FormNotPositiveDefinite("nonpositive pivot while eliminating")
        for u in range(n):
            if u == e or a[u][e] == 0:
                continue
            f = a[u][e] / piv
            for w in range(n):
                a[u][w] -= f * a[e][w]
        for u in range(n):
            if u != e:
                a[u][e] = a[e][u] = Fraction(0)
    return [[a[u][w] for w in keep] for u in keep]


class BlockForm:
    """The per-block quadratic form and the search over block sequences."""

    def __init__(self, rs: RootSystemData, plan: ColorPlan, rect=None):
        self.rs = rs
        self.plan = plan
        self.rect = rect
        self.vars = [(i, c) for i in plan.order for c in range(1, rs.nu[i - 1] + 1)]
        index = {v: n for n, v in enumerate(self.vars)}
        n = len(self.vars)
        # integer matrix of the form: Q = sum_v x_v^2 + sum_{v<w} coupling[v][w] x_v x_w
        coupling = [[0] * n for _ in range(n)]
        for i in plan.order:
            for s, mu in plan.partner_list(i):
                for c1 in range(1, rs.nu[s - 1] + 1):
                    for p in range(mu):
                        a, b = index[(s, c1)], index[(i, mu * c1 - p)]
                        lo, hi = min(a, b), max(a, b)
                        coupling[lo][hi] -= 1
        self.coupling = coupling
        self.pairs = [(v, w, coupling[v][w]) for v in range(n) for w in range(v + 1, n)
                      if coupling[v][w]]
        sym = [[Fraction(0)] * n for _ in range(n)]
        for v in range(n):
            sym[v][v] = Fraction(1)
        for v, w, cf in self.pairs:
            sym[v][w] = sym[w][v] = Fraction(cf, 2)
        self.matrix = sym
        d, c = _ldl_from_last(sym)
        if c is None:
            raise FormNotPositiveDefinite(
                f"exponent form for {rs.spec.name} is not positive definite "
                f"(pivots {[str(x) for x in d if x is not None]}); refusing to enumerate")
        self.pivots = d
        self._d = [float(x) for x in d]
        self._c = [[(u, float(c[s][u])) for u in range(s) if c[s][u]] for s in range(n)]
        # position of the first entry of each color, and of the previous entry
        self._prev_same = [index[(i, cc - 1)] if cc > 1 else None for i, cc in self.vars]
        self._first_of = {i: index[(i, 1)] for i in plan.order}
        self._last_of = {i: index[(i, rs.nu[i - 1])] for i in plan.order}
        self._rect_var = index[(rect[0], 1)] if rect else None

    def value(self, x) -> int:
        q = sum(v * v for v in x)
        for v, w, cf in self.pairs:
            q += cf * x[v] * x[w]
        return q

    def block_vectors(self, caps, budget: float, linear: bool) -> Iterator[tuple[tuple[int, ...], int]]:
        """Nonzero block vectors x with x_first(i) <= caps[i] and value <= budget.

        ``caps`` maps color -> cap on that color's first entry in the block
        (None for no cap).  ``linear`` adds the rectangular term.
        """
        rect_var = self._rect_var if linear else None
        colors = [i for i, _ in self.vars]
        for vec in _fp_vectors(self._d, self._c, self._prev_same, colors, caps,
                               budget, rect_var):
            val = self.value(vec)
            if linear:
                val += vec[self._rect_var]
            if val <= budget:
                yield vec, val

    def configurations(self, M: int, max_blocks: int | None = None):
        """All configurations with exponent <= M and at most ``max_blocks``
        nonzero blocks, as ``(config, exponent)``; ``config[i-1]`` lists
        color i's positive entries r_i^(1), r_i^(2), ...

        Deterministic order (depth first, block vectors in enumeration order).
        """
        l = self.rs.rank
        nvars = len(self.vars)
        var_color = [i for i, _ in self.vars]
        k0 = self.rect[1] if self.rect else None
        lists = [[] for _ in range(l)]
        cache: dict = {}

        def blocks_for(caps_key, budget, linear):
            key = (caps_key, budget, linear)
            got = cache.get(key)
            if got is None:
                caps = dict(zip(self.plan.order, caps_key))
                got = list(self.block_vectors(caps, budget, linear))
                cache[key] = got
            return got

        def walk(T, caps_key, used):
            yield tuple(tuple(v for v in lst if v) for lst in lists), used
            if max_blocks is not None and T > max_blocks:
                return
            if used >= M:
                return
            linear = k0 is not None and T > k0
            for vec, val in blocks_for(caps_key, M - used, linear):
                for n in range(nvars):
                    lists[var_color[n] - 1].append(vec[n])
                new_caps = tuple(vec[self._last_of[i]] for i in self.plan.order)
                yield from walk(T + 1, new_caps, used + val)
                for n in range(nvars):
                    lists[var_color[n] - 1].pop()

        first_caps = tuple(None for _ in self.plan.order)
        yield from walk(1, first_caps, 0)


def flattened_matrix(rs: RootSystemData, plan: ColorPlan, caps: dict):
    """Symmetric rational matrix of the quadratic part over all entries
    r_i^(t), t <= caps[i], in (color, t) order.  Used to cross-check the
    block decomposition."""
    vars_ = [(i, t) for i in plan.order for t in range(1, caps[i] + 1)]
    index = {v: n for n, v in enumerate(vars_)}
    n = len(vars_)
    m = [[Fraction(0)] * n for _ in range(n)]
    for v in range(n):
        m[v][v] = Fraction(1)
    for i in plan.order:
        for s, mu in plan.partner_list(i):
            for t in range(1, caps[s] + 1):
                for p in range(mu):
                    u = mu * t - p
                    if 1 <= u <= caps[i]:
                        a, b = index[(s, t)], index[(i, u)]
                        m[a][b] -= Fraction(1, 2)
                        m[b][a] -= Fraction(1, 2)
    return vars_, m


def is_positive_definite(mat) -> bool:
    _, c = _ldl_from_last([[Fraction(x) for x in row] for row in mat])
    return c is not None


class Projection:
    """Restrictions of the configurations with exponent <= M to a subset of
    colors.

    Each block of a restricted sequence is charged the least value the full
    block form can take given those entries (an exact Schur complement),
    rounded up, and at least 1 when the block is nonzero; the true block
    value is an integer at least as large.  The result is therefore a
    superset of the true restrictions, usually equal to it.
    """

    def __init__(self, bf: BlockForm, colors):
        self.bf = bf
        self.colors = tuple(colors)
        keep = [n for n, (i, _) in enumerate(bf.vars) if i in self.colors]
        self.vars = [bf.vars[n] for n in keep]
        sub = schur_complement(bf.matrix, keep)
        d, c = _ldl_from_last(sub)
        if c is None:
            raise FormNotPositiveDefinite("projected form is not positive definite")
        self._sub = [[float(v) for v in row] for row in sub]
        self._d = [float(v) for v in d]
        self._c = [[(u, float(c[s][u])) for u in range(s) if c[s][u]]
                   for s in range(len(keep))]
        index = {v: n for n, v in enumerate(self.vars)}
        self._prev_same = [index[(i, cc - 1)] if cc > 1 else None for i, cc in self.vars]
        self._last = [max(n for n, (i, _) in enumerate(self.vars) if i == col)
                      for col in self.colors]
        self._slot = [self.colors.index(i) for i, _ in self.vars]

    def _blocks(self, caps_key, budget):
        caps = dict(zip(self.colors, caps_key))
        colors = [i for i, _ in self.vars]
        m = len(self.vars)
        out = []
        for vec in _fp_vectors(self._d, self._c, self._prev_same, colors, caps, budget):
            val = sum(self._sub[a][b] * vec[a] * vec[b] for a in range(m) for b in range(m))
            cost = max(1, math.ceil(val - 1e-7))
            if cost <= budget:
                out.append((vec, cost))
        return out

    def restrictions(self, M: int, max_blocks: int | None = None) -> list:
        """Sorted list of tuples (one dual list per color, in ``colors`` order)."""
        lists = [[] for _ in self.colors]
        found = set()
        cache: dict = {}

        def walk(T, caps_key, used):
            found.add(tuple(tuple(lst) for lst in lists))
            if (max_blocks is not None and T > max_blocks) or used >= M:
                return
            key = (caps_key, M - used)
            blocks = cache.get(key)
            if blocks is None:
                blocks = cache[key] = self._blocks(caps_key, M - used)
            for vec, cost in blocks:
                for n, v in enumerate(vec):
                    lists[self._slot[n]].append(v)
                walk(T + 1, tuple(vec[n] for n in self._last), used + cost)
                for n in range(len(vec)):
                    lists[self._slot[n]].pop()

        walk(1, tuple(None for _ in self.colors), 0)
        return sorted(tuple(tuple(v for v in lst if v) for lst in cfg) for cfg in found)


def conditional_bound(bf: BlockForm, colors, given: int):
    """Lower bound for the part of the exponent living on ``colors`` (their
    squares and the cross terms among them) once color ``given`` (one of
    ``colors``) is fixed.  Returns a function of given's dual list."""
    if given not in colors:
        raise ValueError("the fixed color must be among the colors")
    idx = [n for n, (i, _) in enumerate(bf.vars) if i in colors]
    mat = [[bf.matrix[a][b] for b in idx] for a in idx]
    keep = [k for k, n in enumerate(idx) if bf.vars[n][0] == given]
    kf = [[float(v) for v in row] for row in schur_complement(mat, keep)]
    nu = len(keep)

    def bound(r) -> int:
        total = 0.0
        for start in range(0, len(r), nu):
            x = list(r[start:start + nu]) + [0] * (nu - len(r[start:start + nu]))
            total += sum(kf[a][b] * x[a] * x[b] for a in range(nu) for b in range(nu))
        return math.ceil(total - 1e-7)

    return bound
