"""Character series: the fermionic sum sides, the Euler product side and a
PBW counting oracle, all as truncated series in q and y_1..y_l.

Sum side summand for a configuration r (one non-increasing list per color):

    q^(exponent(r)) * prod_i prod_t 1/(q;q)_(r_i^(t) - r_i^(t+1)) * prod_i y_i^(sum_t r_i^(t))

with the exponent of ``forms.exponent``.  Level k caps color i at nu_i*k
entries; the generalized Verma sum has no cap.
"""
from __future__ import annotations

import json
from functools import lru_cache

from .colortree import TreeStats, tree_sum
from .forms import BlockForm, ColorPlan, cross_term, exponent, standard_plan
from .lie_data import RootSystemData, height
from .series import (TruncatedSeries, divide_by_one_minus, inv_q_pochhammer_coeffs, pack)


class CharacterError(ValueError):
    pass


# sum sides -------------------------------------------------------------------

class SumWeights:
    """Per-color and per-edge factors of the sum side."""

    def __init__(self, plan: ColorPlan, rect=None):
        self.plan = plan
        self.rect = rect
        self.mu = {(s, c): mu for c in plan.order for s, mu in plan.partner_list(c)}

    def unary(self, color, r, limit):
        e0 = sum(x * x for x in r)
        if self.rect is not None and color == self.rect[0]:
            e0 += sum(r[self.rect[1]:])
        if e0 > limit:
            return {}
        coeffs = pochhammer_product(r, limit - e0)
        return {e0 + d: c for d, c in enumerate(coeffs) if c}

    def edge(self, partner, dependent, r_partner, r_dependent):
        return cross_term(r_partner, r_dependent, self.mu[(partner, dependent)])


@lru_cache(maxsize=65536)
def pochhammer_product(r: tuple, limit: int) -> tuple:
    """Coefficients of prod_t 1/(q;q)_(r^(t) - r^(t+1)) up to q^limit."""
    coeffs = [1] + [0] * limit
    nxt = list(r[1:]) + [0]
    for a, b in zip(r, nxt):
        if a == b:
            continue
        pc = inv_q_pochhammer_coeffs(a - b, limit)
        new = [0] * (limit + 1)
        for i, x in enumerate(coeffs):
            if x:
                for j in range(limit + 1 - i):
                    new[i + j] += x * pc[j]
        coeffs = new
    return tuple(coeffs)


def _check_level(k):
    if not isinstance(k, int) or k < 1:
        raise CharacterError(f"level must be a positive integer, got {k!r}")


def char_L_sum(rs: RootSystemData, k: int, M: int, stats: TreeStats | None = None) -> TruncatedSeries:
    """Sum side for the standard module of level k."""
    _check_level(k)
    plan = standard_plan(rs)
    return tree_sum(BlockForm(rs, plan), SumWeights(plan), M, max_blocks=k, stats=stats)


def char_N_sum(rs: RootSystemData, M: int, stats: TreeStats | None = None) -> TruncatedSeries:
    """Sum side for the generalized Verma module: all finite configurations."""
    plan = standard_plan(rs)
    return tree_sum(BlockForm(rs, plan), SumWeights(plan), M, stats=stats)


def check_rectangular(rs: RootSystemData, k0, j, kj) -> None:
    if not rs.level_one_nodes:
        raise CharacterError(f"rectangular weights are not supported for {rs.spec.name}")
    if j not in rs.level_one_nodes:
        raise CharacterError(f"node {j} is not a level-one node of {rs.spec.name} "
                             f"(allowed: {list(rs.level_one_nodes)})")
    for name, v in (("k0", k0), ("kj", kj)):
        if not isinstance(v, int) or v < 1:
            raise CharacterError(f"{name} must be a positive integer, got {v!r}")


def char_rect_sum(rs: RootSystemData, k0: int, j: int, kj: int, M: int,
                  stats: TreeStats | None = None) -> TruncatedSeries:
    """Sum side for the weight k0*Lambda_0 + kj*Lambda_j: level k0+kj caps
    plus the linear term sum_{t > k0} r_j^(t)."""
    check_rectangular(rs, k0, j, kj)
    plan = standard_plan(rs)
    bf = BlockForm(rs, plan, rect=(j, k0))
    return tree_sum(bf, SumWeights(plan, rect=(j, k0)), M, max_blocks=k0 + kj, stats=stats)


def char_sum_by_configs(rs: RootSystemData, M: int, k: int | None = None, rect=None) -> TruncatedSeries:
    """The same sums, one configuration at a time (small cases only).

    ``rect`` is ``(k0, j, kj)``; then the level is k0 + kj.
    """
    plan = standard_plan(rs)
    r_arg = None
    if rect is not None:
        k0, j, kj = rect
        check_rectangular(rs, k0, j, kj)
        r_arg, k = (j, k0), k0 + kj
    bf = BlockForm(rs, plan, rect=r_arg)
    out = TruncatedSeries(rs.rank, M)
    for cfg, Q in bf.configurations(M, max_blocks=k):
        coeffs = [1] + [0] * (M - Q)
        for lst in cfg:
            pc = pochhammer_product(lst, M - Q)
            coeffs = [sum(coeffs[a] * pc[d - a] for a in range(d + 1)) for d in range(M - Q + 1)]
        key = pack([sum(lst) for lst in cfg], rs.rank)
        for d, c in enumerate(coeffs):
            out.add_term(Q + d, key, c)
    return out


def config_exponent(rs: RootSystemData, config, rect=None) -> int:
    return exponent(config, standard_plan(rs), rect)


# product side ------------------------------------------------------------------

def ordered_roots(rs: RootSystemData):
    return sorted(rs.positive_roots, key=lambda a: (height(a), a))


def char_product(rs: RootSystemData, M: int, drop_root=None) -> TruncatedSeries:
    """prod over positive roots a and n >= 1 of 1/(1 - q^n y^a), truncated.

    Roots by ascending height, then lexicographically.  ``drop_root`` omits
    one root (fault injection for the verifier).
    """
    s = TruncatedSeries.one(rs.rank, M)
    for a in ordered_roots(rs):
        if drop_root is not None and tuple(a) == tuple(drop_root):
            continue
        for n in range(1, M + 1):
            s = divide_by_one_minus(s, n, a)
    return s


# PBW oracle ------------------------------------------------------------------

@lru_cache(maxsize=None)
def partitions_by_parts(M: int) -> tuple:
    """table[s][c] = number of partitions of s into exactly c parts, s <= M,
    by listing every partition."""
    table = [[0] * (M + 1) for _ in range(M + 1)]

    def rec(remaining, largest, parts, total):
        table[total][parts] += 1
        for p in range(min(largest, remaining), 0, -1):
            rec(remaining - p, p, parts + 1, total + p)

    rec(M, M, 0, 0)
    return tuple(tuple(row) for row in table)


def pbw_census(rs: RootSystemData, M: int) -> TruncatedSeries:
    """Count multisets of pairs (a, n), a a positive root and n >= 1, with
    sum of n <= M, weighted q^(sum n) y^(sum a).

    The multiset is built root by root: for root a choose the multiset of
    its modes, i.e. a partition of some s into c parts, counted from
    ``partitions_by_parts``.  States (degree, y) are tallied so that equal
    partial multisets are counted once.
    """
    l = rs.rank
    table = partitions_by_parts(M)
    layers = [dict() for _ in range(M + 1)]
    layers[0][0] = 1
    for a in ordered_roots(rs):
        step = pack(a, l)
        for q in range(M - 1, -1, -1):
            items = list(layers[q].items())
            if not items:
                continue
            for s in range(1, M - q + 1):
                target = layers[q + s]
                row = table[s]
                for c in range(1, s + 1):
                    ways = row[c]
                    if not ways:
                        continue
                    shift = c * step
                    for key, cnt in items:
                        k2 = key + shift
                        target[k2] = target.get(k2, 0) + cnt * ways
    return TruncatedSeries(l, M, layers)


def pbw_multisets(rs: RootSystemData, M: int):
    """Yield every multiset of (root index, mode) pairs with total mode <= M,
    as a sorted tuple.  Exponential; for cross-checking tiny cases."""
    pairs = [(i, n) for n in range(1, M + 1) for i in range(len(rs.positive_roots))]

    def rec(start, budget, acc):
        yield tuple(acc)
        for idx in range(start, len(pairs)):
            i, n = pairs[idx]
            if n <= budget:
                acc.append((i, n))
                yield from rec(idx, budget - n, acc)
                acc.pop()

    yield from rec(0, M, [])


# serialization ------------------------------------------------------------------

FORMULAS = ("L_sum", "N_sum", "rect_sum", "product", "pbw", "census")


def series_document(formula: str, rs: RootSystemData, params: dict, series: TruncatedSeries) -> dict:
    if formula not in FORMULAS:
        raise CharacterError(f"unknown formula {formula!r}")
    return {"formula": formula, "spec": rs.spec.name, "params": params,
            "series": series.to_dict()}


def series_document_json(*args) -> str:
    return json.dumps(series_document(*args), separators=(",", ":"))
